//! Elimination and gcd machinery: Sylvester resultants, multivariate gcd,
//! squarefree parts and a light splitting into coprime pieces.


use super::multipoly::{MultiPoly, PolyMap};
use super::PolyError;

/// Determinant by fraction-free (Bareiss) elimination over the polynomial ring.
pub fn det_bareiss(mut m: Vec<Vec<MultiPoly>>, vars: &[String]) -> MultiPoly {
    let n = m.len();
    if n == 0 {
        return MultiPoly::one(vars);
    }
    let mut negate = false;
    let mut prev = MultiPoly::one(vars);
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    negate = !negate;
                }
                None => return MultiPoly::zero(vars),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&m[i][j] * &m[k][k]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = num.div_exact(&prev).expect("Bareiss division is exact");
            }
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if negate {
        -&det
    } else {
        det
    }
}

/// Sylvester matrix of `p` and `q` with respect to the variable at `idx`
/// (rows of `p` first, coefficients from highest to lowest degree).
pub fn sylvester_matrix(p: &MultiPoly, q: &MultiPoly, idx: usize) -> Vec<Vec<MultiPoly>> {
    let dp = p.degree_in(idx).max(0) as usize;
    let dq = q.degree_in(idx).max(0) as usize;
    let n = dp + dq;
    let vars = p.vars();
    let zero = MultiPoly::zero(vars);
    let pc = p.coeffs_in(idx);
    let qc = q.coeffs_in(idx);
    let mut m = vec![vec![zero; n]; n];
    for r in 0..dq {
        for (k, c) in pc.iter().rev().enumerate() {
            m[r][r + k] = c.clone();
        }
    }
    for r in 0..dp {
        for (k, c) in qc.iter().rev().enumerate() {
            m[dq + r][r + k] = c.clone();
        }
    }
    m
}

/// Resultant of `p` and `q` with respect to the variable at `idx`.
pub fn resultant(p: &MultiPoly, q: &MultiPoly, idx: usize) -> Result<MultiPoly, PolyError> {
    if p.is_zero() || q.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let dp = p.degree_in(idx);
    let dq = q.degree_in(idx);
    if dp == 0 && dq == 0 {
        return Err(PolyError::ConstantInVariable(p.vars()[idx].clone()));
    }
    if dp == 0 {
        return Ok(p.pow(dq as u32));
    }
    if dq == 0 {
        return Ok(q.pow(dp as u32));
    }
    Ok(det_bareiss(sylvester_matrix(p, q, idx), p.vars()))
}

pub fn resultant_by(p: &MultiPoly, q: &MultiPoly, var: &str) -> Result<MultiPoly, PolyError> {
    resultant(p, q, p.var_index(var)?)
}

/// Determinant of the Jacobian matrix, expanded.
pub fn jacobian_det(f: &PolyMap) -> MultiPoly {
    det_bareiss(f.jacobian_matrix(), f.vars())
}

/// Gcd of the coefficients of `p` viewed as a polynomial in the variable at `idx`.
pub fn content_in(p: &MultiPoly, idx: usize) -> MultiPoly {
    p.coeffs_in(idx)
        .iter()
        .fold(MultiPoly::zero(p.vars()), |acc, c| gcd(&acc, c))
}

/// `p` divided by its content in the variable at `idx`.
pub fn primitive_part(p: &MultiPoly, idx: usize) -> MultiPoly {
    if p.is_zero() {
        return p.clone();
    }
    let c = content_in(p, idx);
    p.div_exact(&c).expect("content divides")
}

/// Monic greatest common divisor over Q(i), via recursive primitive
/// pseudo-remainder sequences. `gcd(0, 0) = 0`.
pub fn gcd(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    let mut support = a.support_vars();
    support.extend(b.support_vars());
    support.sort_unstable();
    support.dedup();
    let Some(&v) = support.last() else {
        return MultiPoly::one(a.vars());
    };
    if a.degree_in(v) == 0 {
        return gcd(a, &content_in(b, v));
    }
    if b.degree_in(v) == 0 {
        return gcd(&content_in(a, v), b);
    }
    let c = gcd(&content_in(a, v), &content_in(b, v));
    let mut p = primitive_part(a, v);
    let mut q = primitive_part(b, v);
    if p.degree_in(v) < q.degree_in(v) {
        std::mem::swap(&mut p, &mut q);
    }
    while !q.is_zero() {
        let r = p.pseudo_rem(&q, v);
        p = q;
        q = if r.is_zero() { r } else { primitive_part(&r, v) };
    }
    let g = if p.degree_in(v) == 0 { MultiPoly::one(a.vars()) } else { primitive_part(&p, v) };
    (&c * &g).monic()
}

/// Monic squarefree part: `p / gcd(p, ∂p/∂v_1, …)`.
pub fn squarefree(p: &MultiPoly) -> MultiPoly {
    if p.is_zero() || p.is_constant() {
        return p.monic();
    }
    let mut g = p.clone();
    for v in p.support_vars() {
        g = gcd(&g, &p.derivative(v));
    }
    p.div_exact(&g).expect("gcd divides").monic()
}

/// Split `p` into monic squarefree pieces using contents with respect to
/// each variable. This is not a factorization: pieces may be reducible.
pub fn split_components(p: &MultiPoly) -> Vec<MultiPoly> {
    fn rec(p: &MultiPoly, out: &mut Vec<MultiPoly>) {
        if p.is_zero() || p.is_constant() {
            return;
        }
        let s = squarefree(p);
        for v in s.support_vars() {
            let c = content_in(&s, v);
            if !c.is_constant() {
                rec(&c, out);
                rec(&primitive_part(&s, v), out);
                return;
            }
        }
        out.push(s.monic());
    }
    let mut out = Vec::new();
    rec(p, &mut out);
    let mut uniq: Vec<MultiPoly> = Vec::new();
    for c in out {
        if !uniq.contains(&c) {
            uniq.push(c);
        }
    }
    uniq.sort_by(|a, b| a.degree().cmp(&b.degree()).then_with(|| a.to_string().cmp(&b.to_string())));
    uniq
}

/// Product of the pieces (one for an empty list).
pub fn product(pieces: &[MultiPoly], vars: &[String]) -> MultiPoly {
    pieces.iter().fold(MultiPoly::one(vars), |acc, p| &acc * p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse::parse_poly;

    fn vars(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn p(s: &str, v: &[String]) -> MultiPoly {
        parse_poly(s, v).unwrap()
    }

    #[test]
    fn resultant_examples() {
        let v = vars(&["x", "y"]);
        assert_eq!(resultant_by(&p("y^2 - x", &v), &p("y - 1", &v), "y").unwrap(), p("1 - x", &v));
        let v = vars(&["x", "a", "b"]);
        assert_eq!(resultant_by(&p("x - a", &v), &p("x^2 - b", &v), "x").unwrap(), p("a^2 - b", &v));
        let v = vars(&["y", "a", "b"]);
        assert_eq!(resultant_by(&p("y - a", &v), &p("y - b", &v), "y").unwrap(), p("a - b", &v));
    }

    #[test]
    fn resultant_rejects_constants() {
        let v = vars(&["x", "y"]);
        assert!(matches!(
            resultant_by(&p("x", &v), &p("x + 1", &v), "y"),
            Err(PolyError::ConstantInVariable(_))
        ));
    }

    #[test]
    fn jacobian_examples() {
        let f = PolyMap::parse(&["x", "x^2*y^2 + 2*x^2*y"], &["x", "y"]).unwrap();
        assert_eq!(jacobian_det(&f), p("2*x^2*y + 2*x^2", f.vars()));
        let f = PolyMap::parse(&["x", "y"], &["x", "y"]).unwrap();
        assert_eq!(jacobian_det(&f), MultiPoly::one(f.vars()));
        let f = PolyMap::parse(&["x", "y + x^2"], &["x", "y"]).unwrap();
        assert_eq!(jacobian_det(&f), MultiPoly::one(f.vars()));
    }

    #[test]
    fn gcd_and_squarefree() {
        let v = vars(&["x", "y"]);
        let g = gcd(&p("x^2*y + x^2", &v), &p("x*y^2 - x", &v));
        assert_eq!(g, p("x*y + x", &v));
        assert_eq!(squarefree(&p("2*x^2*y + 2*x^2", &v)), p("x*y + x", &v));
        assert_eq!(squarefree(&p("(x - y)^3*(x + 1)^2", &v)), p("(x - y)*(x + 1)", &v).monic());
    }

    #[test]
    fn split_separates_content() {
        let v = vars(&["a", "b"]);
        let parts = split_components(&p("-a^2*(a^2 + b)", &v));
        assert_eq!(parts, vec![p("a", &v), p("a^2 + b", &v)]);
    }
}
