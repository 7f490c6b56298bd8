//! Behaviour of a polynomial map at infinity: leading forms, the generic rank
//! of their Jacobian, the common zero locus V of the leading forms, and limit
//! directions of arcs escaping to infinity.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use num_traits::Zero;
use rand::Rng;
use serde_json::{json, Value};
use thiserror::Error;

use crate::asymptotic::{AlgebraicSet, Flavor};
use crate::numeric::{cnorm, poly_roots, realify, rng_for, specialize_complex};
use crate::poly::{gcd, GaussianRational, MultiPoly, PolyError, PolyMap};

/// Agreement tolerance for extrapolated limit directions.
pub const DIRECTION_TOL: f64 = 1e-4;
/// Parameter values at which arc directions are estimated.
pub const DIRECTION_SCALES: [f64; 3] = [1e-2, 1e-3, 1e-4];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InfinityError {
    #[error("component {0} is the zero polynomial")]
    ZeroComponent(usize),
    #[error("no arcs given")]
    EmptyArcList,
    #[error("arc file line {line}: {msg}")]
    ArcSyntax { line: usize, msg: String },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Finite Laurent polynomial in `t`, keyed by exponent.
pub type Laurent = BTreeMap<i64, Complex64>;

fn laurent_mul(a: &Laurent, b: &Laurent) -> Laurent {
    let mut out = Laurent::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            *out.entry(ea + eb).or_insert_with(Complex64::zero) += ca * cb;
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArcTerm {
    pub exponent: i32,
    pub coeff: Complex64,
}

/// A parametrized curve `t ↦ (Σ c t^e, …)` on `(0, epsilon]`, meant to leave
/// every compact set as `t → 0⁺`.
#[derive(Clone, Debug, PartialEq)]
pub struct WitnessArc {
    pub coords: Vec<Vec<ArcTerm>>,
    pub epsilon: f64,
}

impl WitnessArc {
    /// One monomial `c_j t^{a_j}` per coordinate.
    pub fn monomial(coeffs: &[Complex64], exponents: &[i32]) -> Self {
        let coords = coeffs
            .iter()
            .zip(exponents)
            .map(|(&coeff, &exponent)| vec![ArcTerm { exponent, coeff }])
            .collect();
        WitnessArc { coords, epsilon: 1e-2 }
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    /// Lowest exponent carrying a nonzero coefficient, per coordinate
    /// (`None` for an identically zero coordinate).
    pub fn exponents(&self) -> Vec<Option<i32>> {
        self.coords
            .iter()
            .map(|c| c.iter().filter(|t| t.coeff.norm() > 0.0).map(|t| t.exponent).min())
            .collect()
    }

    /// Whether some coordinate has a negative leading exponent.
    pub fn escapes(&self) -> bool {
        self.exponents().iter().any(|e| e.is_some_and(|e| e < 0))
    }

    pub fn eval(&self, t: f64) -> Vec<Complex64> {
        self.coords
            .iter()
            .map(|c| c.iter().map(|term| term.coeff * t.powi(term.exponent)).sum())
            .collect()
    }

    fn as_laurent(&self) -> Vec<Laurent> {
        self.coords
            .iter()
            .map(|c| {
                let mut l = Laurent::new();
                for term in c {
                    *l.entry(term.exponent as i64).or_insert_with(Complex64::zero) += term.coeff;
                }
                l
            })
            .collect()
    }

    /// Laurent expansion of each `F_i ∘ γ`.
    pub fn laurent_image(&self, f: &PolyMap) -> Vec<Laurent> {
        let base = self.as_laurent();
        let mut powers: Vec<Vec<Laurent>> =
            base.iter().map(|l| vec![Laurent::from([(0, Complex64::new(1.0, 0.0))]), l.clone()]).collect();
        let mut out = Vec::with_capacity(f.n());
        for comp in f.components() {
            let mut acc = Laurent::new();
            for (e, c) in comp.terms() {
                let mut prod = Laurent::from([(0, c.to_complex())]);
                for (j, &k) in e.iter().enumerate() {
                    while powers[j].len() <= k as usize {
                        let next = laurent_mul(powers[j].last().unwrap(), &base[j]);
                        powers[j].push(next);
                    }
                    if k > 0 {
                        prod = laurent_mul(&prod, &powers[j][k as usize]);
                    }
                }
                for (s, v) in prod {
                    *acc.entry(s).or_insert_with(Complex64::zero) += v;
                }
            }
            out.push(acc);
        }
        out
    }

    /// Parse the text arc format: one `label: c*t^e + …` line per coordinate.
    pub fn parse(text: &str) -> Result<Self, InfinityError> {
        let mut coords = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| InfinityError::ArcSyntax { line: k + 1, msg: msg.to_string() };
            let (_, rhs) = line.split_once(':').ok_or_else(|| err("expected 'label: terms'"))?;
            let mut terms = Vec::new();
            for piece in split_terms(rhs) {
                terms.push(parse_arc_term(&piece).map_err(|m| err(&m))?);
            }
            if terms.is_empty() {
                return Err(err("empty coordinate"));
            }
            coords.push(terms);
        }
        if coords.is_empty() {
            return Err(InfinityError::ArcSyntax { line: 0, msg: "no coordinates".into() });
        }
        Ok(WitnessArc { coords, epsilon: 1e-2 })
    }

    pub fn to_json(&self) -> Value {
        let coords: Vec<Value> = self
            .coords
            .iter()
            .map(|c| {
                Value::Array(
                    c.iter()
                        .map(|t| json!({"exponent": t.exponent, "re": t.coeff.re, "im": t.coeff.im}))
                        .collect(),
                )
            })
            .collect();
        json!({"coords": coords, "epsilon": self.epsilon})
    }
}

fn fmt_complex(z: Complex64) -> String {
    let sign = if z.im < 0.0 || (z.im == 0.0 && z.im.is_sign_negative()) { '-' } else { '+' };
    format!("({}{}{}i)", z.re, sign, z.im.abs())
}

impl fmt::Display for WitnessArc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, c) in self.coords.iter().enumerate() {
            let terms: Vec<String> =
                c.iter().map(|t| format!("{}*t^{}", fmt_complex(t.coeff), t.exponent)).collect();
            writeln!(f, "x{}: {}", j + 1, terms.join(" + "))?;
        }
        Ok(())
    }
}

/// Split at top-level `+`/`-`, keeping the sign with the following term.
fn split_terms(s: &str) -> Vec<String> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut depth = 0;
    for (k, &ch) in chars.iter().enumerate() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '+' | '-' if depth == 0 => {
                let prev = chars[..k].iter().rev().find(|c| !c.is_whitespace()).copied();
                let exponent_sign = prev == Some('^');
                let sci = matches!(prev, Some('e' | 'E'))
                    && k >= 2
                    && (chars[k - 2].is_ascii_digit() || chars[k - 2] == '.');
                if !exponent_sign && !sci && cur.chars().any(|c| c.is_ascii_alphanumeric()) {
                    out.push(std::mem::take(&mut cur));
                }
            }
            _ => {}
        }
        cur.push(ch);
    }
    if !cur.trim().is_empty() {
        out.push(cur);
    }
    out
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err("empty coefficient".into());
    }
    let bad = || format!("bad complex number '{s}'");
    if let Some(body) = s.strip_suffix('i') {
        // Find the split between real and imaginary parts.
        let bytes = body.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
        let (re, im) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("0", body),
        };
        let im = match im {
            "" | "+" => 1.0,
            "-" => -1.0,
            other => other.parse::<f64>().map_err(|_| bad())?,
        };
        let re = re.parse::<f64>().map_err(|_| bad())?;
        Ok(Complex64::new(re, im))
    } else {
        Ok(Complex64::new(s.parse::<f64>().map_err(|_| bad())?, 0.0))
    }
}

fn parse_arc_term(raw: &str) -> Result<ArcTerm, String> {
    let mut s = raw.trim().to_string();
    let mut sign = 1.0;
    if let Some(rest) = s.strip_prefix('+') {
        s = rest.trim().to_string();
    } else if let Some(rest) = s.strip_prefix('-') {
        sign = -1.0;
        s = rest.trim().to_string();
    }
    let (coeff_part, t_part) = match s.rfind('t') {
        Some(k) if s[k..].starts_with('t') && !s[..k].trim_end().ends_with('(') => {
            let before = s[..k].trim_end();
            let coeff = before.strip_suffix('*').map(str::trim).unwrap_or(before);
            (coeff.to_string(), Some(s[k + 1..].trim().to_string()))
        }
        _ => (s.clone(), None),
    };
    let coeff = if coeff_part.is_empty() {
        Complex64::new(1.0, 0.0)
    } else {
        let inner = coeff_part.strip_prefix('(').and_then(|c| c.strip_suffix(')')).unwrap_or(&coeff_part);
        parse_complex(inner)?
    };
    let exponent = match t_part {
        None => 0,
        Some(rest) if rest.is_empty() => 1,
        Some(rest) => {
            let e = rest.strip_prefix('^').ok_or_else(|| format!("expected '^' after t in '{raw}'"))?;
            let e = e.trim().trim_start_matches('(').trim_end_matches(')');
            e.parse::<i32>().map_err(|_| format!("bad exponent in '{raw}'"))?
        }
    };
    Ok(ArcTerm { exponent, coeff: coeff * sign })
}

/// Componentwise leading forms `F̂_i`.
pub fn leading_map(f: &PolyMap) -> Result<PolyMap, InfinityError> {
    let mut comps = Vec::with_capacity(f.n());
    for (i, c) in f.components().iter().enumerate() {
        comps.push(c.leading_form().map_err(|_| InfinityError::ZeroComponent(i))?);
    }
    Ok(PolyMap::new(comps)?)
}

fn rank_exact(mut m: Vec<Vec<GaussianRational>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, piv);
        let inv = m[rank][col].inv().expect("nonzero pivot");
        for r in rank + 1..rows {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] * &inv;
            for c in col..cols {
                let delta = &factor * &m[rank][c];
                m[r][c] -= &delta;
            }
        }
        rank += 1;
    }
    rank
}

fn random_gaussian_point(n: usize, rng: &mut impl Rng) -> Vec<GaussianRational> {
    (0..n)
        .map(|_| {
            let d = rng.gen_range(1..=7);
            GaussianRational::from_parts(rng.gen_range(-20..=20), d, rng.gen_range(-20..=20), d)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankReport {
    pub rank: usize,
    pub n: usize,
    /// `rank > n − 2`, the hypothesis of the main equivalence theorem.
    pub condition: bool,
    pub trials: usize,
}

/// Generic rank of the Jacobian matrix of the leading map, as the maximum exact
/// rank over random Gaussian-rational points. Escalates to 32 trials before
/// settling on a rank below `n`.
pub fn leading_rank(f: &PolyMap, trials: usize, seed: u64) -> Result<RankReport, InfinityError> {
    let lead = leading_map(f)?;
    let jac = lead.jacobian_matrix();
    let n = f.n();
    let mut rng = rng_for(seed, "leading-rank");
    let mut best = 0;
    let mut done = 0;
    // A rank below n is only accepted after the escalated trial budget.
    while best < n && done < trials.max(32) {
        let p = random_gaussian_point(n, &mut rng);
        let m: Vec<Vec<GaussianRational>> = jac
            .iter()
            .map(|row| row.iter().map(|e| e.evaluate(&p).expect("point length matches")).collect())
            .collect();
        best = best.max(rank_exact(m));
        done += 1;
    }
    Ok(RankReport { rank: best, n, condition: best + 2 > n, trials: done })
}

/// V, the common zero locus of the leading forms.
pub fn leading_zero_locus(f: &PolyMap) -> Result<AlgebraicSet, InfinityError> {
    let lead = leading_map(f)?;
    Ok(AlgebraicSet::from_generators(f.vars(), lead.components().to_vec(), Flavor::Complex))
}

#[derive(Clone, Debug, PartialEq)]
pub struct DimBoundReport {
    pub rank: usize,
    pub corank: usize,
    /// Complex dimension of V (`None` when not computed).
    pub dim_v: Option<usize>,
    /// Local dimension estimate of V ∩ S^{2n−1} from PCA (`None` when empty).
    pub sphere_dim: Option<usize>,
    pub sample_count: usize,
    pub pass: bool,
    pub note: String,
}

/// Unit vectors spanning the lines of `V = {g = 0}` for a homogeneous
/// bivariate `g`.
fn lines_of_homogeneous(g: &MultiPoly) -> Vec<[Complex64; 2]> {
    let d = g.degree().max(0) as usize;
    let coeffs = specialize_complex(g, 1, &[Complex64::new(1.0, 0.0), Complex64::zero()]);
    let mut lines = Vec::new();
    for s in poly_roots(&coeffs) {
        let v = [Complex64::new(1.0, 0.0), s];
        let norm = cnorm(&v);
        lines.push([v[0] / norm, v[1] / norm]);
    }
    if g.degree_in(1) < d as i64 {
        lines.push([Complex64::zero(), Complex64::new(1.0, 0.0)]);
    }
    lines
}

/// Check that V ∩ S^{2n−1} is at most one dimensional (n = 2), comparing with
/// the corank of the leading Jacobian.
pub fn dim_bound_check(f: &PolyMap, seed: u64) -> Result<DimBoundReport, InfinityError> {
    let rank = leading_rank(f, 8, seed)?;
    let corank = f.n() - rank.rank;
    if f.n() != 2 {
        return Ok(DimBoundReport {
            rank: rank.rank,
            corank,
            dim_v: None,
            sphere_dim: None,
            sample_count: 0,
            pass: true,
            note: "dimension of V computed only for n = 2".into(),
        });
    }
    let lead = leading_map(f)?;
    let g = gcd(lead.component(0), lead.component(1));
    if g.is_constant() {
        return Ok(DimBoundReport {
            rank: rank.rank,
            corank,
            dim_v: Some(0),
            sphere_dim: None,
            sample_count: 0,
            pass: true,
            note: "V is the origin; V ∩ S^3 is empty".into(),
        });
    }
    let mut rng = rng_for(seed, "dim-bound");
    let mut worst = 0;
    let mut samples = 0;
    for line in lines_of_homogeneous(&g) {
        let phase0: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let pts: Vec<Vec<f64>> = (0..24)
            .map(|_| {
                let th = phase0 + rng.gen_range(-0.05..0.05);
                let u = Complex64::from_polar(1.0, th);
                realify(&[line[0] * u, line[1] * u])
            })
            .collect();
        samples += pts.len();
        for p in &pts {
            let z = [Complex64::new(p[0], p[1]), Complex64::new(p[2], p[3])];
            for c in lead.components() {
                debug_assert!(c.eval_complex(&z).norm() < 1e-6 * (1.0 + c.eval_abs_scale(&z)));
            }
        }
        worst = worst.max(pca_dimension(&pts, 1e-2));
    }
    Ok(DimBoundReport {
        rank: rank.rank,
        corank,
        dim_v: Some(1),
        sphere_dim: Some(worst),
        sample_count: samples,
        pass: worst <= 1,
        note: "V is a union of complex lines; V ∩ S^3 a union of circles".into(),
    })
}

/// Number of principal components with variance above `rel` times the largest.
pub fn pca_dimension(points: &[Vec<f64>], rel: f64) -> usize {
    if points.len() < 2 {
        return 0;
    }
    let d = points[0].len();
    let n = points.len() as f64;
    let mean: Vec<f64> = (0..d).map(|k| points.iter().map(|p| p[k]).sum::<f64>() / n).collect();
    let cov = DMatrix::from_fn(d, d, |a, b| {
        points.iter().map(|p| (p[a] - mean[a]) * (p[b] - mean[b])).sum::<f64>() / n
    });
    let eig = SymmetricEigen::new(cov).eigenvalues;
    let top = eig.iter().cloned().fold(0.0, f64::max);
    if top <= 1e-300 {
        return 0;
    }
    eig.iter().filter(|&&v| v > rel * top).count()
}

/// Unit directions in real coordinates `(Re z1, Im z1, …)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectionSet {
    pub directions: Vec<Vec<f64>>,
    pub tolerance: f64,
    /// Indices of input arcs whose direction did not converge.
    pub flagged: Vec<usize>,
}

fn unit(v: Vec<f64>) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / n).collect()
}

/// Limit of `γ(t)/|γ(t)|` as `t → 0⁺`, by first-order Richardson
/// extrapolation over [`DIRECTION_SCALES`]; `None` if the two extrapolants
/// disagree by more than [`DIRECTION_TOL`].
pub fn arc_direction(arc: &WitnessArc) -> Option<Vec<f64>> {
    let dirs: Vec<Vec<f64>> = DIRECTION_SCALES.iter().map(|&t| unit(realify(&arc.eval(t)))).collect();
    if dirs.iter().any(|d| d.iter().any(|x| !x.is_finite())) {
        return None;
    }
    let rich = |a: &[f64], b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| (10.0 * y - x) / 9.0).collect() };
    let r1 = rich(&dirs[0], &dirs[1]);
    let r2 = rich(&dirs[1], &dirs[2]);
    let gap = r1.iter().zip(&r2).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    (gap < DIRECTION_TOL).then(|| unit(r2))
}

/// Tangent cone at infinity spanned by explicit arcs, deduplicated within tolerance.
pub fn tangent_cone_at_infinity(arcs: &[WitnessArc]) -> Result<DirectionSet, InfinityError> {
    if arcs.is_empty() {
        return Err(InfinityError::EmptyArcList);
    }
    let mut directions: Vec<Vec<f64>> = Vec::new();
    let mut flagged = Vec::new();
    for (k, arc) in arcs.iter().enumerate() {
        match arc_direction(arc) {
            Some(d) => {
                let dup = directions
                    .iter()
                    .any(|e| e.iter().zip(&d).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt() < DIRECTION_TOL);
                if !dup {
                    directions.push(d);
                }
            }
            None => flagged.push(k),
        }
    }
    Ok(DirectionSet { directions, tolerance: DIRECTION_TOL, flagged })
}

/// Complex vector from real coordinates `(Re z1, Im z1, …)`.
pub fn complexify(v: &[f64]) -> Vec<Complex64> {
    v.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn leading_map_examples() {
        let f = PolyMap::parse(&["x", "x^2*y^2 + 2*x^2*y"], &["x", "y"]).unwrap();
        assert_eq!(leading_map(&f).unwrap(), PolyMap::parse(&["x", "x^2*y^2"], &["x", "y"]).unwrap());
        let f = PolyMap::parse(&["x + y + 1", "x^2"], &["x", "y"]).unwrap();
        assert_eq!(leading_map(&f).unwrap(), PolyMap::parse(&["x + y", "x^2"], &["x", "y"]).unwrap());
        let f = PolyMap::parse(&["x", "0"], &["x", "y"]).unwrap();
        assert_eq!(leading_map(&f), Err(InfinityError::ZeroComponent(1)));
    }

    #[test]
    fn leading_rank_examples() {
        let f = PolyMap::parse(&["x", "x^2*y*(y+2)"], &["x", "y"]).unwrap();
        let r = leading_rank(&f, 8, 0).unwrap();
        assert_eq!((r.rank, r.condition), (2, true));
        let f = PolyMap::parse(&["x^2", "x^2 + y"], &["x", "y"]).unwrap();
        let r = leading_rank(&f, 8, 0).unwrap();
        assert_eq!((r.rank, r.condition, r.trials), (1, true, 32));
    }

    #[test]
    fn zero_locus_of_example() {
        let f = PolyMap::parse(&["x", "x^2*y*(y+2)"], &["x", "y"]).unwrap();
        let v = leading_zero_locus(&f).unwrap();
        assert_eq!(v.generators.len(), 2);
        assert!(v.generators.iter().all(|g| g.is_homogeneous()));
        let rep = dim_bound_check(&f, 0).unwrap();
        assert_eq!((rep.dim_v, rep.sphere_dim, rep.pass), (Some(1), Some(1), true));
        let id = PolyMap::parse(&["x", "y"], &["x", "y"]).unwrap();
        assert_eq!(dim_bound_check(&id, 0).unwrap().dim_v, Some(0));
    }

    #[test]
    fn directions_of_simple_arcs() {
        let a = WitnessArc::monomial(&[c(1.0, 0.0), c(1.0, 0.0)], &[-1, -1]);
        let d = arc_direction(&a).unwrap();
        let s = 1.0 / 2f64.sqrt();
        assert!((d[0] - s).abs() < 1e-9 && (d[2] - s).abs() < 1e-9);
        let a = WitnessArc::monomial(&[c(1.0, 0.0), c(1.0, 0.0)], &[-2, -1]);
        let d = arc_direction(&a).unwrap();
        assert!((d[0] - 1.0).abs() < 1e-6 && d[2].abs() < 1e-6);
        let cone = tangent_cone_at_infinity(&[a.clone(), a]).unwrap();
        assert_eq!(cone.directions.len(), 1);
    }

    #[test]
    fn arc_text_round_trip() {
        let text = "x1: (1+0i)*t^1\nx2: (2-0.5i)*t^-1 + -1*t^0 + 3i\n";
        let arc = WitnessArc::parse(text).unwrap();
        assert_eq!(arc.coords[1].len(), 3);
        assert_eq!(arc.coords[1][0], ArcTerm { exponent: -1, coeff: c(2.0, -0.5) });
        assert_eq!(arc.coords[1][1], ArcTerm { exponent: 0, coeff: c(-1.0, 0.0) });
        assert_eq!(arc.coords[1][2], ArcTerm { exponent: 0, coeff: c(0.0, 3.0) });
        let again = WitnessArc::parse(&arc.to_string()).unwrap();
        assert_eq!(again, arc);
        assert!(WitnessArc::parse("x1 (1+0i)*t").is_err());
    }

    #[test]
    fn laurent_image_of_witness() {
        let f = PolyMap::parse(&["x", "x*y"], &["x", "y"]).unwrap();
        let arc = WitnessArc::monomial(&[c(1.0, 0.0), c(1.0, 0.0)], &[1, -1]);
        let img = arc.laurent_image(&f);
        assert_eq!(img[0].get(&1), Some(&c(1.0, 0.0)));
        assert_eq!(img[1].get(&0), Some(&c(1.0, 0.0)));
    }
}
