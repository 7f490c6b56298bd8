//! Dense univariate polynomials over Q(i): gcd, squarefree degree, and
//! Sturm sequences for real-coefficient inputs.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::gaussian::GaussianRational;
use super::multipoly::MultiPoly;
use super::PolyError;

/// Coefficients from the constant term upwards, trailing zeros trimmed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniPoly {
    coeffs: Vec<GaussianRational>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<GaussianRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    /// View a polynomial whose only occurring variable is `idx`.
    pub fn from_multi(p: &MultiPoly, idx: usize) -> Result<Self, PolyError> {
        if p.support_vars().iter().any(|&v| v != idx) {
            return Err(PolyError::VariableMismatch);
        }
        let coeffs = p.coeffs_in(idx).iter().map(|c| c.constant_term()).collect();
        Ok(Self::new(coeffs))
    }

    pub fn coeffs(&self) -> &[GaussianRational] {
        &self.coeffs
    }

    pub fn degree(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_real(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_real())
    }

    fn lc(&self) -> &GaussianRational {
        self.coeffs.last().expect("nonzero polynomial")
    }

    pub fn derivative(&self) -> UniPoly {
        UniPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * &GaussianRational::from_int(k as i64))
                .collect(),
        )
    }

    pub fn rem(&self, d: &UniPoly) -> UniPoly {
        assert!(!d.is_zero(), "division by zero polynomial");
        let mut r = self.coeffs.clone();
        let dd = d.coeffs.len();
        let inv = d.lc().inv().expect("nonzero lc");
        while r.len() >= dd {
            let q = r.last().unwrap() * &inv;
            let shift = r.len() - dd;
            for (k, c) in d.coeffs.iter().enumerate() {
                r[shift + k] -= &(&q * c);
            }
            r.pop();
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
        }
        UniPoly::new(r)
    }

    pub fn div_exact(&self, d: &UniPoly) -> UniPoly {
        let mut r = self.coeffs.clone();
        let dd = d.coeffs.len();
        let inv = d.lc().inv().expect("nonzero lc");
        let mut q = vec![GaussianRational::zero(); r.len().saturating_sub(dd) + 1];
        while r.len() >= dd && !r.is_empty() {
            let c = r.last().unwrap() * &inv;
            let shift = r.len() - dd;
            for (k, dc) in d.coeffs.iter().enumerate() {
                r[shift + k] -= &(&c * dc);
            }
            q[shift] = c;
            r.pop();
        }
        UniPoly::new(q)
    }

    pub fn monic(&self) -> UniPoly {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.lc().inv().unwrap();
        UniPoly::new(self.coeffs.iter().map(|c| c * &inv).collect())
    }

    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn squarefree(&self) -> UniPoly {
        if self.degree() <= 0 {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.div_exact(&g).monic()
    }

    fn real_coeff(c: &GaussianRational) -> &BigRational {
        &c.re
    }

    /// Number of distinct real roots, by Sturm's theorem. Requires real coefficients.
    pub fn count_real_roots(&self) -> Result<usize, PolyError> {
        if !self.is_real() {
            return Err(PolyError::NonReal);
        }
        if self.degree() <= 0 {
            return Ok(0);
        }
        let mut seq = vec![self.clone(), self.derivative()];
        loop {
            let n = seq.len();
            let r = seq[n - 2].rem(&seq[n - 1]);
            if r.is_zero() {
                break;
            }
            seq.push(UniPoly::new(r.coeffs.iter().map(|c| -c).collect()));
        }
        let sign_changes = |signs: Vec<i32>| -> usize {
            let nz: Vec<i32> = signs.into_iter().filter(|&s| s != 0).collect();
            nz.windows(2).filter(|w| w[0] != w[1]).count()
        };
        let at_pos: Vec<i32> = seq
            .iter()
            .map(|p| if Self::real_coeff(p.lc()).is_positive() { 1 } else { -1 })
            .collect();
        let at_neg: Vec<i32> = seq
            .iter()
            .map(|p| {
                let s = if Self::real_coeff(p.lc()).is_positive() { 1 } else { -1 };
                if p.degree() % 2 == 0 {
                    s
                } else {
                    -s
                }
            })
            .collect();
        Ok(sign_changes(at_neg) - sign_changes(at_pos))
    }
}
