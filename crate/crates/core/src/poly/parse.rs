//! Recursive-descent parser for polynomial expressions.
//!
//! Grammar: integers, rationals `a/b`, the imaginary unit `i`, variables
//! `[a-zA-Z][a-zA-Z0-9_]*`, the operators `+ - * ^` and parentheses.
//! Exponents are nonnegative integers; juxtaposition is a syntax error.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::gaussian::GaussianRational;
use super::multipoly::MultiPoly;
use super::PolyError;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, PolyError> {
    let bytes: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k < bytes.len() {
        let (pos, ch) = bytes[k];
        match ch {
            c if c.is_whitespace() => k += 1,
            '0'..='9' => {
                let start = k;
                while k < bytes.len() && bytes[k].1.is_ascii_digit() {
                    k += 1;
                }
                let s: String = bytes[start..k].iter().map(|&(_, c)| c).collect();
                out.push((pos, Tok::Int(s.parse().expect("digits parse"))));
            }
            c if c.is_ascii_alphabetic() => {
                let start = k;
                while k < bytes.len() && (bytes[k].1.is_ascii_alphanumeric() || bytes[k].1 == '_') {
                    k += 1;
                }
                let s: String = bytes[start..k].iter().map(|&(_, c)| c).collect();
                out.push((pos, Tok::Ident(s)));
            }
            '+' | '-' | '*' | '/' | '^' | '(' | ')' => {
                out.push((
                    pos,
                    match ch {
                        '+' => Tok::Plus,
                        '-' => Tok::Minus,
                        '*' => Tok::Star,
                        '/' => Tok::Slash,
                        '^' => Tok::Caret,
                        '(' => Tok::LParen,
                        _ => Tok::RParen,
                    },
                ));
                k += 1;
            }
            other => {
                return Err(PolyError::Syntax { pos, msg: format!("unexpected character '{other}'") })
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
    vars: &'a [String],
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, PolyError> {
        Err(PolyError::Syntax { pos: self.pos(), msg: msg.into() })
    }

    fn expr(&mut self) -> Result<MultiPoly, PolyError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.at += 1;
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.at += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<MultiPoly, PolyError> {
        let mut acc = self.unary()?;
        while let Some(Tok::Star) = self.peek() {
            self.at += 1;
            acc = &acc * &self.unary()?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<MultiPoly, PolyError> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.at += 1;
                Ok(-&self.unary()?)
            }
            Some(Tok::Plus) => {
                self.at += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<MultiPoly, PolyError> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.at += 1;
            match self.peek().cloned() {
                Some(Tok::Int(n)) => {
                    let e = n.to_u32().ok_or(PolyError::Syntax {
                        pos: self.pos(),
                        msg: "exponent too large".into(),
                    })?;
                    self.at += 1;
                    Ok(base.pow(e))
                }
                _ => self.err("expected nonnegative integer exponent"),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<MultiPoly, PolyError> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.at += 1;
                let mut value = BigRational::from_integer(n);
                if let Some(Tok::Slash) = self.peek() {
                    self.at += 1;
                    match self.peek().cloned() {
                        Some(Tok::Int(d)) if !d.is_zero() => {
                            self.at += 1;
                            value /= BigRational::from_integer(d);
                        }
                        Some(Tok::Int(_)) => return self.err("zero denominator"),
                        _ => return self.err("expected integer denominator"),
                    }
                }
                Ok(MultiPoly::constant(self.vars, GaussianRational::real(value)))
            }
            Some(Tok::Ident(name)) => {
                self.at += 1;
                if name == "i" {
                    return Ok(MultiPoly::constant(self.vars, GaussianRational::i()));
                }
                MultiPoly::var_named(self.vars, &name)
            }
            Some(Tok::LParen) => {
                self.at += 1;
                let inner = self.expr()?;
                match self.peek() {
                    Some(Tok::RParen) => {
                        self.at += 1;
                        Ok(inner)
                    }
                    _ => self.err("expected ')'"),
                }
            }
            Some(t) => self.err(format!("unexpected token {t:?}")),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parse `text` into a fully expanded polynomial over `vars`.
pub fn parse_poly(text: &str, vars: &[String]) -> Result<MultiPoly, PolyError> {
    if let Some(bad) = vars.iter().find(|v| v.as_str() == "i") {
        return Err(PolyError::Syntax { pos: 0, msg: format!("'{bad}' is reserved for the imaginary unit") });
    }
    let toks = lex(text)?;
    let mut p = Parser { toks, at: 0, end: text.len(), vars };
    let out = p.expr()?;
    if p.at != p.toks.len() {
        return p.err("trailing input (implicit multiplication is not allowed)");
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xy() -> Vec<String> {
        vec!["x".into(), "y".into()]
    }

    #[test]
    fn expands_example_component() {
        let p = parse_poly("x^2*y*(y+2)", &xy()).unwrap();
        assert_eq!(p.to_string(), "x^2*y^2 + 2*x^2*y");
    }

    #[test]
    fn zero_has_sentinel_degree() {
        let p = parse_poly("0", &xy()).unwrap();
        assert!(p.is_zero());
        assert_eq!(p.degree(), -1);
    }

    #[test]
    fn difference_of_squares_over_gaussians() {
        let p = parse_poly("(x+i*y)*(x-i*y)", &xy()).unwrap();
        assert_eq!(p, parse_poly("x^2 + y^2", &xy()).unwrap());
    }

    #[test]
    fn rationals_and_unary_minus() {
        let p = parse_poly("-3/6*x^2 + -(y)", &xy()).unwrap();
        assert_eq!(p.to_string(), "-1/2*x^2 - y");
    }

    #[test]
    fn rejects_implicit_multiplication() {
        match parse_poly("2x", &xy()) {
            Err(PolyError::Syntax { pos, .. }) => assert_eq!(pos, 1),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_unknown_variable() {
        assert!(matches!(parse_poly("x + z", &xy()), Err(PolyError::UnknownVariable(v)) if v == "z"));
    }

    #[test]
    fn reports_position_of_bad_character() {
        assert!(matches!(parse_poly("x + $", &xy()), Err(PolyError::Syntax { pos: 4, .. })));
        assert!(matches!(parse_poly("(x + y", &xy()), Err(PolyError::Syntax { pos: 6, .. })));
        assert!(matches!(parse_poly("x^y", &xy()), Err(PolyError::Syntax { .. })));
        assert!(matches!(parse_poly("1/0", &xy()), Err(PolyError::Syntax { .. })));
    }

    #[test]
    fn complex_coefficients_print_and_reparse() {
        let p = parse_poly("(1+2*i)*x*y - i + 3/4*y^2", &xy()).unwrap();
        let printed = p.to_string();
        assert_eq!(parse_poly(&printed, &xy()).unwrap(), p);
    }
}
