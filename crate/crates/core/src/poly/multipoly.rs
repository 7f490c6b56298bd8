//! Sparse multivariate polynomials over Q(i).

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use num_traits::{One, Zero};

use super::gaussian::GaussianRational;
use super::PolyError;

pub type Exponent = Vec<u32>;

/// A polynomial in an ordered list of named variables.
///
/// Terms are keyed by exponent vector; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    vars: Arc<[String]>,
    terms: BTreeMap<Exponent, GaussianRational>,
}

/// Graded lexicographic comparison, larger first when sorted descending.
pub fn grlex_cmp(a: &[u32], b: &[u32]) -> Ordering {
    let da: u64 = a.iter().map(|&e| e as u64).sum();
    let db: u64 = b.iter().map(|&e| e as u64).sum();
    da.cmp(&db).then_with(|| a.cmp(b))
}

impl MultiPoly {
    pub fn zero(vars: &[String]) -> Self {
        MultiPoly { vars: vars.into(), terms: BTreeMap::new() }
    }

    pub fn constant(vars: &[String], c: GaussianRational) -> Self {
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(vec![0; vars.len()], c);
        }
        p
    }

    pub fn one(vars: &[String]) -> Self {
        Self::constant(vars, GaussianRational::one())
    }

    pub fn from_int(vars: &[String], n: i64) -> Self {
        Self::constant(vars, GaussianRational::from_int(n))
    }

    /// The polynomial consisting of the single variable at `idx`.
    pub fn var(vars: &[String], idx: usize) -> Self {
        let mut e = vec![0; vars.len()];
        e[idx] = 1;
        Self::monomial(vars, e, GaussianRational::one())
    }

    pub fn var_named(vars: &[String], name: &str) -> Result<Self, PolyError> {
        let idx = vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| PolyError::UnknownVariable(name.to_string()))?;
        Ok(Self::var(vars, idx))
    }

    pub fn monomial(vars: &[String], exp: Exponent, c: GaussianRational) -> Self {
        assert_eq!(exp.len(), vars.len(), "exponent length must match variable count");
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(exp, c);
        }
        p
    }

    pub fn from_terms<I>(vars: &[String], terms: I) -> Self
    where
        I: IntoIterator<Item = (Exponent, GaussianRational)>,
    {
        let mut p = Self::zero(vars);
        for (e, c) in terms {
            p.add_term(e, &c);
        }
        p
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn terms(&self) -> &BTreeMap<Exponent, GaussianRational> {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn var_index(&self, name: &str) -> Result<usize, PolyError> {
        self.vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| PolyError::UnknownVariable(name.to_string()))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    /// The constant term (zero if absent).
    pub fn constant_term(&self) -> GaussianRational {
        self.terms.get(&vec![0; self.nvars()]).cloned().unwrap_or_else(GaussianRational::zero)
    }

    /// Whether every coefficient is real.
    pub fn is_real(&self) -> bool {
        self.terms.values().all(|c| c.is_real())
    }

    fn add_term(&mut self, e: Exponent, c: &GaussianRational) {
        if c.is_zero() {
            return;
        }
        let remove = match self.terms.get_mut(&e) {
            Some(existing) => {
                *existing += c;
                existing.is_zero()
            }
            None => {
                self.terms.insert(e.clone(), c.clone());
                false
            }
        };
        if remove {
            self.terms.remove(&e);
        }
    }

    /// Total degree, with -1 for the zero polynomial.
    pub fn degree(&self) -> i64 {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&x| x as i64).sum::<i64>())
            .max()
            .unwrap_or(-1)
    }

    /// Degree in one variable, with -1 for the zero polynomial.
    pub fn degree_in(&self, idx: usize) -> i64 {
        self.terms.keys().map(|e| e[idx] as i64).max().unwrap_or(-1)
    }

    /// Indices of variables that actually occur.
    pub fn support_vars(&self) -> Vec<usize> {
        (0..self.nvars()).filter(|&i| self.degree_in(i) > 0).collect()
    }

    fn check_vars(&self, other: &MultiPoly) {
        assert!(
            self.vars == other.vars,
            "polynomial variable lists differ: {:?} vs {:?}",
            self.vars,
            other.vars
        );
    }

    pub fn scale(&self, c: &GaussianRational) -> MultiPoly {
        if c.is_zero() {
            return Self::zero(&self.vars);
        }
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> MultiPoly {
        let mut base = self.clone();
        let mut acc = Self::one(&self.vars);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Leading term in graded lexicographic order.
    pub fn leading_term(&self) -> Option<(&Exponent, &GaussianRational)> {
        self.terms.iter().max_by(|a, b| grlex_cmp(a.0, b.0))
    }

    /// Rescale so the grlex leading coefficient is one.
    pub fn monic(&self) -> MultiPoly {
        match self.leading_term() {
            None => self.clone(),
            Some((_, c)) => self.scale(&c.inv().expect("nonzero leading coefficient")),
        }
    }

    /// Formal partial derivative with respect to the variable at `idx`.
    pub fn derivative(&self, idx: usize) -> MultiPoly {
        let mut out = Self::zero(&self.vars);
        for (e, c) in &self.terms {
            if e[idx] == 0 {
                continue;
            }
            let mut ne = e.clone();
            ne[idx] -= 1;
            out.add_term(ne, &(c * &GaussianRational::from_int(e[idx] as i64)));
        }
        out
    }

    pub fn derivative_by(&self, name: &str) -> Result<MultiPoly, PolyError> {
        Ok(self.derivative(self.var_index(name)?))
    }

    /// Sum of the terms of the given total degree.
    pub fn homogeneous_part(&self, d: i64) -> MultiPoly {
        MultiPoly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.iter().map(|&x| x as i64).sum::<i64>() == d)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Top-degree homogeneous component.
    pub fn leading_form(&self) -> Result<MultiPoly, PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        Ok(self.homogeneous_part(self.degree()))
    }

    pub fn is_homogeneous(&self) -> bool {
        let d = self.degree();
        self.terms.keys().all(|e| e.iter().map(|&x| x as i64).sum::<i64>() == d)
    }

    pub fn evaluate(&self, point: &[GaussianRational]) -> Result<GaussianRational, PolyError> {
        if point.len() != self.nvars() {
            return Err(PolyError::DimensionMismatch { expected: self.nvars(), got: point.len() });
        }
        let mut acc = GaussianRational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    t = &t * &x.pow(k);
                }
            }
            acc += &t;
        }
        Ok(acc)
    }

    /// Floating point evaluation; panics on a dimension mismatch.
    pub fn eval_complex(&self, point: &[Complex64]) -> Complex64 {
        assert_eq!(point.len(), self.nvars());
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut t = c.to_complex();
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    t *= x.powu(k);
                }
            }
            acc += t;
        }
        acc
    }

    /// Sum of the absolute values of the terms at `point`; a scale for
    /// relative vanishing tests.
    pub fn eval_abs_scale(&self, point: &[Complex64]) -> f64 {
        let mut acc = 0.0;
        for (e, c) in &self.terms {
            let mut t = c.to_complex().norm();
            for (x, &k) in point.iter().zip(e) {
                t *= x.norm().powi(k as i32);
            }
            acc += t;
        }
        acc
    }

    /// Coefficients as a polynomial in the variable at `idx`:
    /// `self = sum_k out[k] * var^k`, each `out[k]` free of that variable.
    pub fn coeffs_in(&self, idx: usize) -> Vec<MultiPoly> {
        let d = self.degree_in(idx);
        if d < 0 {
            return Vec::new();
        }
        let mut out = vec![Self::zero(&self.vars); d as usize + 1];
        for (e, c) in &self.terms {
            let k = e[idx] as usize;
            let mut ne = e.clone();
            ne[idx] = 0;
            out[k].terms.insert(ne, c.clone());
        }
        out
    }

    /// Leading coefficient with respect to a variable (zero for the zero polynomial).
    pub fn lc_in(&self, idx: usize) -> MultiPoly {
        self.coeffs_in(idx).pop().unwrap_or_else(|| Self::zero(&self.vars))
    }

    /// Multiply by `var^k`.
    pub fn shift(&self, idx: usize, k: u32) -> MultiPoly {
        MultiPoly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut ne = e.clone();
                    ne[idx] += k;
                    (ne, c.clone())
                })
                .collect(),
        }
    }

    /// Replace the variable at `idx` by `value` (a polynomial over the same variables).
    pub fn substitute(&self, idx: usize, value: &MultiPoly) -> MultiPoly {
        self.check_vars(value);
        let coeffs = self.coeffs_in(idx);
        let mut acc = Self::zero(&self.vars);
        for c in coeffs.iter().rev() {
            acc = &(&acc * value) + c;
        }
        acc
    }

    /// Replace the variable at `idx` by a constant.
    pub fn specialize(&self, idx: usize, value: &GaussianRational) -> MultiPoly {
        self.substitute(idx, &Self::constant(&self.vars, value.clone()))
    }

    /// Re-express over another variable list; every variable that occurs
    /// must be present in `vars`.
    pub fn embed(&self, vars: &[String]) -> Result<MultiPoly, PolyError> {
        let mut map = Vec::with_capacity(self.nvars());
        for (i, v) in self.vars.iter().enumerate() {
            match vars.iter().position(|w| w == v) {
                Some(j) => map.push(Some(j)),
                None if self.degree_in(i) <= 0 => map.push(None),
                None => return Err(PolyError::UnknownVariable(v.clone())),
            }
        }
        let mut out = Self::zero(vars);
        for (e, c) in &self.terms {
            let mut ne = vec![0; vars.len()];
            for (i, &k) in e.iter().enumerate() {
                if let Some(j) = map[i] {
                    ne[j] += k;
                }
            }
            out.add_term(ne, c);
        }
        Ok(out)
    }

    /// Exact division; `None` when `divisor` does not divide `self`.
    pub fn div_exact(&self, divisor: &MultiPoly) -> Option<MultiPoly> {
        self.check_vars(divisor);
        let (dl_e, dl_c) = divisor.leading_term()?;
        let dl_inv = dl_c.inv()?;
        let mut rem = self.clone();
        let mut quot = Self::zero(&self.vars);
        while let Some((re, rc)) = rem.leading_term() {
            if re.iter().zip(dl_e).any(|(a, b)| a < b) {
                return None;
            }
            let qe: Exponent = re.iter().zip(dl_e).map(|(a, b)| a - b).collect();
            let qc = rc * &dl_inv;
            let qt = Self::monomial(&self.vars, qe, qc);
            rem = &rem - &(&qt * divisor);
            quot = &quot + &qt;
        }
        Some(quot)
    }

    /// Pseudo-remainder of `self` by `b` with respect to the variable at `idx`.
    pub fn pseudo_rem(&self, b: &MultiPoly, idx: usize) -> MultiPoly {
        let db = b.degree_in(idx);
        assert!(db >= 0, "pseudo-remainder by zero");
        let lb = b.lc_in(idx);
        let mut r = self.clone();
        while !r.is_zero() && r.degree_in(idx) >= db {
            let dr = r.degree_in(idx);
            let lr = r.lc_in(idx);
            r = &(&r * &lb) - &(&b.shift(idx, (dr - db) as u32) * &lr);
        }
        r
    }

    /// Rename variables positionally.
    pub fn with_var_names(&self, names: &[String]) -> MultiPoly {
        assert_eq!(names.len(), self.nvars());
        MultiPoly { vars: names.into(), terms: self.terms.clone() }
    }

    /// Terms in printing order: graded lexicographic, largest first.
    pub fn sorted_terms(&self) -> Vec<(&Exponent, &GaussianRational)> {
        let mut ts: Vec<_> = self.terms.iter().collect();
        ts.sort_by(|a, b| grlex_cmp(b.0, a.0));
        ts
    }

    fn fmt_monomial(&self, e: &[u32]) -> String {
        let mut parts = Vec::new();
        for (v, &k) in self.vars.iter().zip(e) {
            match k {
                0 => {}
                1 => parts.push(v.clone()),
                _ => parts.push(format!("{v}^{k}")),
            }
        }
        parts.join("*")
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.sorted_terms() {
            let mono = self.fmt_monomial(e);
            let (neg, mag) = if c.is_negative_real() { (true, -c) } else { (false, c.clone()) };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let coeff = if mag.is_real() { mag.to_string() } else { format!("({mag})") };
            if mono.is_empty() {
                write!(f, "{coeff}")?;
            } else if mag.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{coeff}*{mono}")?;
            }
        }
        Ok(())
    }
}

impl<'a> std::ops::Add<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        self.check_vars(rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c);
        }
        out
    }
}

impl<'a> std::ops::Sub<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self.check_vars(rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), &-c);
        }
        out
    }
}

impl<'a> std::ops::Mul<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.check_vars(rhs);
        let mut out = MultiPoly::zero(&self.vars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: Exponent = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, &(c1 * c2));
            }
        }
        out
    }
}

impl std::ops::Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&GaussianRational::from_int(-1))
    }
}

macro_rules! forward_poly_owned {
    ($tr:ident, $m:ident) => {
        impl std::ops::$tr for MultiPoly {
            type Output = MultiPoly;
            fn $m(self, rhs: MultiPoly) -> MultiPoly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_poly_owned!(Add, add);
forward_poly_owned!(Sub, sub);
forward_poly_owned!(Mul, mul);

/// A polynomial map `C^n -> C^n`; all components share one variable list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMap {
    components: Vec<MultiPoly>,
}

impl PolyMap {
    pub fn new(components: Vec<MultiPoly>) -> Result<Self, PolyError> {
        let n = components.len();
        if n == 0 {
            return Err(PolyError::DimensionMismatch { expected: 1, got: 0 });
        }
        let vars = components[0].vars().to_vec();
        if vars.len() != n {
            return Err(PolyError::DimensionMismatch { expected: n, got: vars.len() });
        }
        if components.iter().any(|c| c.vars() != vars.as_slice()) {
            return Err(PolyError::VariableMismatch);
        }
        Ok(PolyMap { components })
    }

    /// Parse one expression per component over `vars`.
    pub fn parse(exprs: &[&str], vars: &[&str]) -> Result<Self, PolyError> {
        let vars: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
        let comps = exprs
            .iter()
            .map(|e| super::parse::parse_poly(e, &vars))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(comps)
    }

    pub fn identity(vars: &[String]) -> Self {
        PolyMap { components: (0..vars.len()).map(|i| MultiPoly::var(vars, i)).collect() }
    }

    pub fn n(&self) -> usize {
        self.components.len()
    }

    pub fn vars(&self) -> &[String] {
        self.components[0].vars()
    }

    pub fn components(&self) -> &[MultiPoly] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &MultiPoly {
        &self.components[i]
    }

    pub fn is_real(&self) -> bool {
        self.components.iter().all(|c| c.is_real())
    }

    pub fn jacobian_matrix(&self) -> Vec<Vec<MultiPoly>> {
        self.components
            .iter()
            .map(|f| (0..self.n()).map(|j| f.derivative(j)).collect())
            .collect()
    }

    pub fn eval_complex(&self, point: &[Complex64]) -> Vec<Complex64> {
        self.components.iter().map(|c| c.eval_complex(point)).collect()
    }

    pub fn evaluate(&self, point: &[GaussianRational]) -> Result<Vec<GaussianRational>, PolyError> {
        self.components.iter().map(|c| c.evaluate(point)).collect()
    }

    /// Componentwise composition `self ∘ inner`.
    pub fn compose(&self, inner: &PolyMap) -> PolyMap {
        let comps = self
            .components
            .iter()
            .map(|f| {
                let shifted = f.with_var_names(&fresh_names(f.nvars()));
                let mut all = shifted.vars().to_vec();
                all.extend(inner.vars().iter().cloned());
                let mut g = shifted.embed(&all).expect("fresh names embed");
                for (k, h) in inner.components.iter().enumerate() {
                    g = g.substitute(k, &h.embed(&all).expect("inner vars embed"));
                }
                g.embed(inner.vars()).expect("composition stays in inner vars")
            })
            .collect();
        PolyMap { components: comps }
    }
}

fn fresh_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("__z{i}")).collect()
}

impl fmt::Display for PolyMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}
