//! Perversities, the descending filtration of the target plane built from
//! the Jelonek set, and a sampling test for Whitney's condition (b).

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use serde_json::{json, Value};
use thiserror::Error;

use crate::asymptotic::{
    jelonek_set, target_vars, AlgebraicSet, AsymptoticError, Flavor, SearchParams, TARGET_VARS,
};
use crate::numeric::rng_for;
use crate::poly::{gcd, jacobian_det, resultant, split_components, squarefree, GaussianRational, MultiPoly, PolyMap};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StrataError {
    #[error("perversities need m >= 2, got m = {0}")]
    DimensionTooSmall(usize),
    #[error("perversity needs {expected} values p_2..p_m, got {got}")]
    Length { expected: usize, got: usize },
    #[error("growth law fails at p_{index}")]
    Growth { index: usize },
    #[error("bad perversity specification '{0}'")]
    Spec(String),
    #[error("parametrization of '{0}' is degenerate at a sample")]
    Degenerate(String),
    #[error("base parameters do not map to the same point")]
    BaseMismatch,
    #[error("parametrization has {got} coordinates, expected {expected}")]
    Ambient { expected: usize, got: usize },
    #[error(transparent)]
    Asymptotic(#[from] AsymptoticError),
    #[error(transparent)]
    Poly(#[from] crate::poly::PolyError),
}

/// `p̄ = (p_2, …, p_m)` with `p_2 = 0` and `p_{k+1} ∈ {p_k, p_k + 1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Perversity {
    m: usize,
    values: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PerversityKind {
    Zero,
    Max,
    LowerMiddle,
    UpperMiddle,
    Custom(Vec<i64>),
}

impl PerversityKind {
    /// `zero | max | lower-middle | upper-middle | custom:p2,p3,…`
    pub fn parse(s: &str) -> Result<Self, StrataError> {
        match s {
            "zero" => Ok(Self::Zero),
            "max" | "top" => Ok(Self::Max),
            "lower-middle" => Ok(Self::LowerMiddle),
            "upper-middle" => Ok(Self::UpperMiddle),
            other => {
                let body = other.strip_prefix("custom:").ok_or_else(|| StrataError::Spec(s.into()))?;
                body.split(',')
                    .map(|v| v.trim().parse::<i64>().map_err(|_| StrataError::Spec(s.into())))
                    .collect::<Result<Vec<_>, _>>()
                    .map(Self::Custom)
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::Zero => "zero".into(),
            Self::Max => "max".into(),
            Self::LowerMiddle => "lower-middle".into(),
            Self::UpperMiddle => "upper-middle".into(),
            Self::Custom(v) => format!("custom:{}", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")),
        }
    }
}

impl Perversity {
    pub fn new(m: usize, values: Vec<i64>) -> Result<Self, StrataError> {
        if m < 2 {
            return Err(StrataError::DimensionTooSmall(m));
        }
        if values.len() != m - 1 {
            return Err(StrataError::Length { expected: m - 1, got: values.len() });
        }
        if values[0] != 0 {
            return Err(StrataError::Growth { index: 2 });
        }
        for k in 1..values.len() {
            let step = values[k] - values[k - 1];
            if step != 0 && step != 1 {
                return Err(StrataError::Growth { index: k + 2 });
            }
        }
        Ok(Perversity { m, values })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    /// `p_k` for `2 ≤ k ≤ m`.
    pub fn p(&self, k: usize) -> i64 {
        self.values[k - 2]
    }

    /// `t̄ − p̄`.
    pub fn complement(&self) -> Perversity {
        let values = self.values.iter().enumerate().map(|(i, &p)| i as i64 - p).collect();
        Perversity { m: self.m, values }
    }

    /// `p_k ≤ q_k` for all `k`.
    pub fn le(&self, other: &Perversity) -> bool {
        self.m == other.m && self.values.iter().zip(&other.values).all(|(a, b)| a <= b)
    }
}

impl fmt::Display for Perversity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.values.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", v.join(", "))
    }
}

pub fn make_perversity(kind: &PerversityKind, m: usize) -> Result<Perversity, StrataError> {
    if m < 2 {
        return Err(StrataError::DimensionTooSmall(m));
    }
    let ks = 2..=m as i64;
    let values: Vec<i64> = match kind {
        PerversityKind::Zero => ks.map(|_| 0).collect(),
        PerversityKind::Max => ks.map(|k| k - 2).collect(),
        PerversityKind::LowerMiddle => ks.map(|k| (k - 2) / 2).collect(),
        PerversityKind::UpperMiddle => ks.map(|k| (k - 1) / 2).collect(),
        PerversityKind::Custom(v) => v.clone(),
    };
    Perversity::new(m, values)
}

/// Every perversity for dimension `m` (there are `2^{m−2}`).
pub fn all_perversities(m: usize) -> Vec<Perversity> {
    let mut out = vec![vec![0i64]];
    for _ in 3..=m {
        out = out
            .into_iter()
            .flat_map(|v| {
                let last = *v.last().unwrap();
                [0, 1].into_iter().map(move |d| {
                    let mut w = v.clone();
                    w.push(last + d);
                    w
                })
            })
            .collect();
    }
    out.into_iter().map(|v| Perversity { m, values: v }).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Ambient,
    Jelonek,
    Sing,
    JelonekOfRestriction,
    WhitneyFailureApprox,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Ambient => "ambient",
            Provenance::Jelonek => "Jelonek",
            Provenance::Sing => "Sing",
            Provenance::JelonekOfRestriction => "JelonekOfRestriction",
            Provenance::WhitneyFailureApprox => "WhitneyFailureApprox",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevelPart {
    pub provenance: Provenance,
    pub set: AlgebraicSet,
    /// Numeric approximations never enlarge the exact generators.
    pub advisory: bool,
    pub note: String,
}

/// `W_index`, the union of its parts. Odd levels share their parts with the
/// next even level below.
#[derive(Clone, Debug, PartialEq)]
pub struct FiltrationLevel {
    pub index: usize,
    pub parts: Arc<Vec<LevelPart>>,
}

impl FiltrationLevel {
    /// Empty if every exact part is empty.
    pub fn is_empty(&self) -> bool {
        self.parts.iter().filter(|p| !p.advisory).all(|p| p.set.is_empty())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Filtration {
    /// `levels[i]` is `W_i` for `i = 0..=4`.
    pub levels: Vec<FiltrationLevel>,
    pub whitney: Vec<(String, WhitneyReport)>,
}

/// Points of `{h = 0}` (a curve in the target plane) over which the map
/// restricted to `{h ∘ F = 0} \ Sing(F)` fails to be proper, as a set
/// `{h = 0, L = 0}`; `None` when there is no such point.
fn restricted_jelonek(f: &PolyMap, h: &MultiPoly, jac_sf: &MultiPoly) -> Result<Option<AlgebraicSet>, StrataError> {
    let tv = target_vars();
    let src = f.vars().to_vec();
    // h ∘ F over the source variables.
    let mut hf = MultiPoly::zero(&src);
    for (e, c) in h.terms() {
        let mut term = MultiPoly::constant(&src, c.clone());
        for (j, &k) in e.iter().enumerate() {
            term = &term * &f.component(j).pow(k);
        }
        hf = &hf + &term;
    }
    let curves: Vec<MultiPoly> =
        split_components(&hf).into_iter().filter(|c| gcd(c, jac_sf) != *c).collect();
    if curves.is_empty() {
        return Ok(None);
    }
    // Parametrize {h = 0} by a target coordinate over which it is finite.
    let j = if h.degree_in(1) > 0 { 0 } else { 1 };
    let mut ext = src.clone();
    ext.push("tau".into());
    let tau = MultiPoly::var(&ext, 2);
    let mut lcs = Vec::new();
    for c in &curves {
        let ce = c.embed(&ext)?;
        let fj = &f.component(j).embed(&ext)? - &tau;
        for (elim, keep) in [(1usize, 0usize), (0, 1)] {
            if let Ok(r) = resultant(&ce, &fj, elim) {
                if !r.is_zero() {
                    let lc = r.lc_in(keep);
                    if !lc.is_constant() {
                        lcs.push(lc);
                    }
                }
            }
        }
    }
    if lcs.is_empty() {
        return Ok(None);
    }
    let names: Vec<String> = ext.iter().enumerate().map(|(k, v)| if k == 2 { TARGET_VARS[j].to_string() } else { v.clone() }).collect();
    let l = lcs.iter().fold(MultiPoly::one(&ext), |acc, p| &acc * p);
    let l = squarefree(&l).with_var_names(&names).embed(&tv)?;
    Ok(Some(AlgebraicSet::from_generators(&tv, vec![h.clone(), l], Flavor::Complex)))
}

/// Complex points where `g`, `∂g/∂α` and `∂g/∂β` vanish together.
fn singular_points(g: &MultiPoly) -> AlgebraicSet {
    let tv = target_vars();
    let gens = vec![g.clone(), g.derivative(0), g.derivative(1)];
    if gens.iter().any(|p| p.is_constant() && !p.is_zero()) {
        return AlgebraicSet::empty(&tv);
    }
    let common = gens.iter().fold(MultiPoly::zero(&tv), |acc, p| gcd(&acc, p));
    if !common.is_constant() {
        // Non-reduced input; the squarefree generator makes this unreachable.
        return AlgebraicSet::from_generators(&tv, vec![common], Flavor::Complex);
    }
    AlgebraicSet::from_generators(&tv, gens, Flavor::Complex)
}

/// Real parametrization of a component `c·α = p(β)` or `c·β = p(α)` of a
/// complex curve in the target plane, over real parameters `(u, v)`.
fn graph_parametrization(h: &MultiPoly) -> Option<Vec<MultiPoly>> {
    let tv = target_vars();
    let (dep, free) = if h.degree_in(0) == 1 && h.lc_in(0).is_constant() {
        (0, 1)
    } else if h.degree_in(1) == 1 && h.lc_in(1).is_constant() {
        (1, 0)
    } else {
        return None;
    };
    let c = h.lc_in(dep).constant_term();
    let rest = &(h - &h.lc_in(dep).shift(dep, 1)).scale(&(-&c.inv()?));
    let mut ext: Vec<String> = vec!["u".into(), "v".into()];
    ext.extend(tv.iter().cloned());
    let w = &MultiPoly::var(&ext, 0) + &MultiPoly::var(&ext, 1).scale(&GaussianRational::i());
    let dep_val = rest.embed(&ext).ok()?.substitute(2 + free, &w).embed(&ext[..2]).ok()?;
    let free_val = w.embed(&ext[..2]).ok()?;
    let (a, b) = if dep == 0 { (dep_val, free_val) } else { (free_val, dep_val) };
    Some(vec![real_part(&a), imag_part(&a), real_part(&b), imag_part(&b)])
}

fn real_part(p: &MultiPoly) -> MultiPoly {
    MultiPoly::from_terms(p.vars(), p.terms().iter().map(|(e, c)| (e.clone(), GaussianRational::real(c.re.clone()))))
}

fn imag_part(p: &MultiPoly) -> MultiPoly {
    MultiPoly::from_terms(p.vars(), p.terms().iter().map(|(e, c)| (e.clone(), GaussianRational::real(c.im.clone()))))
}

/// Build `W_4 ⊃ W_3 = W_2 = S_F ⊃ W_1 = W_0` for a map of the plane, with
/// `W_0 = Sing(W_2) ∪ S_{F|M_2} ∪ A_2`; `A_2` comes from the Whitney sampler
/// and is advisory.
pub fn build_filtration(f: &PolyMap, seed: u64) -> Result<Filtration, StrataError> {
    if f.n() != 2 {
        return Err(AsymptoticError::Dimension(f.n()).into());
    }
    let tv = target_vars();
    let sf = jelonek_set(f, &SearchParams::with_seed(seed))?;
    let top = Arc::new(vec![LevelPart {
        provenance: Provenance::Ambient,
        set: AlgebraicSet::whole(&tv),
        advisory: false,
        note: "target space".into(),
    }]);
    let w2 = Arc::new(vec![LevelPart {
        provenance: Provenance::Jelonek,
        set: sf.clone(),
        advisory: false,
        note: "complex Jelonek set".into(),
    }]);
    let mut whitney = Vec::new();
    let w0 = if sf.is_empty() {
        // dim W_2 < 2: the chain collapses.
        Arc::clone(&w2)
    } else {
        let jac_sf = squarefree(&jacobian_det(f));
        let g = &sf.generators[0];
        let mut parts = vec![LevelPart {
            provenance: Provenance::Sing,
            set: singular_points(g),
            advisory: false,
            note: "singular points of W_2".into(),
        }];
        for h in split_components(g) {
            let (set, note) = match restricted_jelonek(f, &h, &jac_sf)? {
                Some(s) => (s, format!("over {h} = 0")),
                None => (AlgebraicSet::empty(&tv), format!("over {h} = 0: preimage inside Sing(F) or restriction proper")),
            };
            parts.push(LevelPart { provenance: Provenance::JelonekOfRestriction, set, advisory: false, note });
            let (note, failed) = match graph_parametrization(&h) {
                Some(param) => {
                    let small = Stratum::new(&format!("{h} = 0"), param, vec![GaussianRational::from_ratio(1, 2), GaussianRational::from_ratio(1, 3)]);
                    let base = small.base_point();
                    let names: Vec<String> = (1..=4).map(|k| format!("r{k}")).collect();
                    let big = Stratum::new("complement", (0..4).map(|k| MultiPoly::var(&names, k)).collect(), base);
                    let rep = whitney_b_sample_test(&big, &small, 8, seed)?;
                    let failed = rep.verdict == WhitneyVerdict::Fail;
                    whitney.push((format!("(complement, {h} = 0)"), rep));
                    ("sampled at one base point".to_string(), failed)
                }
                None => ("component is not a graph; sampler skipped".to_string(), false),
            };
            parts.push(LevelPart {
                provenance: Provenance::WhitneyFailureApprox,
                set: if failed { AlgebraicSet::from_generators(&tv, vec![h.clone()], Flavor::Complex) } else { AlgebraicSet::empty(&tv) },
                advisory: true,
                note,
            });
        }
        Arc::new(parts)
    };
    let levels = vec![
        FiltrationLevel { index: 0, parts: Arc::clone(&w0) },
        FiltrationLevel { index: 1, parts: w0 },
        FiltrationLevel { index: 2, parts: Arc::clone(&w2) },
        FiltrationLevel { index: 3, parts: w2 },
        FiltrationLevel { index: 4, parts: top },
    ];
    Ok(Filtration { levels, whitney })
}

impl Filtration {
    /// Sampled inclusion check: points of each nonempty hypersurface part of
    /// `W_i` satisfy the exact parts of `W_{i+1}`.
    pub fn check_descending(&self, samples: usize, seed: u64) -> bool {
        let mut rng = rng_for(seed, "filtration-check");
        for i in 0..self.levels.len() - 1 {
            let upper = &self.levels[i + 1];
            for part in self.levels[i].parts.iter().filter(|p| !p.advisory) {
                for p in part.set.sample_points(samples, &mut rng) {
                    let inside = upper.parts.iter().filter(|q| !q.advisory).any(|q| q.set.is_whole() || q.set.contains_approx(&p));
                    if !inside {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn to_json(&self) -> Value {
        let levels: Vec<Value> = self
            .levels
            .iter()
            .rev()
            .map(|l| {
                json!({
                    "index": l.index,
                    "empty": l.is_empty(),
                    "parts": l.parts.iter().map(|p| json!({
                        "provenance": p.provenance.to_string(),
                        "advisory": p.advisory,
                        "set": p.set.to_json(),
                        "note": p.note,
                    })).collect::<Vec<_>>(),
                })
            })
            .collect();
        let whitney: Vec<Value> = self.whitney.iter().map(|(name, r)| json!({"pair": name, "report": r.to_json()})).collect();
        json!({"levels": levels, "whitney": whitney})
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for l in self.levels.iter().rev() {
            out.push_str(&format!("W_{}:{}\n", l.index, if l.is_empty() { " empty" } else { "" }));
            for p in l.parts.iter() {
                let flag = if p.advisory { " (advisory)" } else { "" };
                out.push_str(&format!("  [{}{}] {} -- {}\n", p.provenance, flag, p.set.describe(), p.note));
            }
        }
        out
    }
}

/// A stratum given by a polynomial parametrization with real coefficients,
/// together with a parameter value mapping to the base point (possibly on
/// the closure of the parametrized set).
#[derive(Clone, Debug, PartialEq)]
pub struct Stratum {
    pub name: String,
    pub param: Vec<MultiPoly>,
    pub base: Vec<GaussianRational>,
}

impl Stratum {
    pub fn new(name: &str, param: Vec<MultiPoly>, base: Vec<GaussianRational>) -> Self {
        Stratum { name: name.into(), param, base }
    }

    pub fn dim(&self) -> usize {
        self.base.len()
    }

    pub fn base_point(&self) -> Vec<GaussianRational> {
        self.param.iter().map(|p| p.evaluate(&self.base).expect("base matches parameter count")).collect()
    }

    /// `δ ↦ P(base + δ) − P(base)`, expanded exactly so that small
    /// displacements are evaluated without cancellation.
    fn shifted(&self) -> Vec<MultiPoly> {
        self.param
            .iter()
            .map(|p| {
                let mut q = p.clone();
                for (j, b) in self.base.iter().enumerate() {
                    let shift = &MultiPoly::var(p.vars(), j) + &MultiPoly::constant(p.vars(), b.clone());
                    q = q.substitute(j, &shift);
                }
                &q - &MultiPoly::constant(p.vars(), q.constant_term())
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WhitneyVerdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WhitneyReport {
    pub verdict: WhitneyVerdict,
    /// Largest distance from a limit secant to the limit tangent space.
    pub max_distance: f64,
    pub pairs_tested: usize,
    /// Sequence pairs whose limits did not converge at the sampled scales.
    pub pairs_skipped: usize,
    pub worst_path: Option<String>,
}

impl WhitneyReport {
    pub fn to_json(&self) -> Value {
        json!({
            "verdict": format!("{:?}", self.verdict).to_uppercase(),
            "max_distance": self.max_distance,
            "pairs_tested": self.pairs_tested,
            "pairs_skipped": self.pairs_skipped,
            "worst_path": self.worst_path,
        })
    }
}

pub const WHITNEY_TOL: f64 = 1e-3;
pub const WHITNEY_SCALES: [f64; 3] = [1e-2, 1e-3, 1e-4];

fn eval_real(p: &MultiPoly, x: &[f64]) -> f64 {
    let z: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    p.eval_complex(&z).re
}

/// Orthogonal projector onto the span of the columns (normalized first).
fn column_projector(cols: &[Vec<f64>]) -> Option<DMatrix<f64>> {
    let d = cols.first()?.len();
    let k = cols.len();
    let mut m = DMatrix::zeros(d, k);
    for (j, c) in cols.iter().enumerate() {
        let n = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return None;
        }
        for i in 0..d {
            m[(i, j)] = c[i] / n;
        }
    }
    let svd = m.svd(true, false);
    let s = &svd.singular_values;
    let smax = s.iter().cloned().fold(0.0, f64::max);
    let smin = s.iter().cloned().fold(f64::INFINITY, f64::min);
    if smin < 1e-10 * smax {
        return None;
    }
    let u = svd.u?;
    let uk = u.columns(0, k);
    Some(uk * uk.transpose())
}

/// Projector onto the top `k` eigenvectors of a symmetric matrix.
fn clean_projector(m: &DMatrix<f64>, k: usize) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(m.clone());
    let mut idx: Vec<usize> = (0..m.nrows()).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
    let mut p = DMatrix::zeros(m.nrows(), m.ncols());
    for &i in idx.iter().take(k) {
        let v = eig.eigenvectors.column(i);
        p += v * v.transpose();
    }
    p
}

fn spectral_norm_sym(m: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(m.clone()).eigenvalues.iter().map(|v| v.abs()).fold(0.0, f64::max)
}

/// First-order Richardson extrapolation at the three scales; `None` when the
/// two extrapolants differ by more than the tolerance.
fn richardson(ms: &[DMatrix<f64>]) -> Option<DMatrix<f64>> {
    let r1 = (&ms[1] * 10.0 - &ms[0]) / 9.0;
    let r2 = (&ms[2] * 10.0 - &ms[1]) / 9.0;
    (spectral_norm_sym(&(&r1 - &r2)) < WHITNEY_TOL).then_some(r2)
}

/// Nearest point on the shifted small stratum to `x`, by Gauss–Newton from 0.
fn nearest_param(shifted: &[MultiPoly], jac: &[Vec<MultiPoly>], x: &[f64], k: usize) -> Vec<f64> {
    let mut eta = vec![0.0; k];
    if k == 0 {
        return eta;
    }
    for _ in 0..30 {
        let r: Vec<f64> = shifted.iter().zip(x).map(|(p, xi)| eval_real(p, &eta) - xi).collect();
        let j = DMatrix::from_fn(shifted.len(), k, |i, c| eval_real(&jac[i][c], &eta));
        let rhs = j.transpose() * DVector::from_vec(r);
        let Some(step) = (j.transpose() * &j).lu().solve(&rhs) else {
            break;
        };
        let scale = eta.iter().map(|e| e.abs()).fold(0.0, f64::max) + 1e-300;
        for c in 0..k {
            eta[c] -= step[c];
        }
        if step.amax() <= 1e-15 * scale {
            break;
        }
    }
    eta
}

/// Sample Whitney's condition (b) for the pair (big, small) at the point
/// where both base parameters land. Each sequence pair follows curved paths
/// `base + (d_j ε^{k_j})` with `k_j ∈ {1, 2, 3}`; half of the small-stratum
/// sequences are random paths, half are nearest points.
pub fn whitney_b_sample_test(big: &Stratum, small: &Stratum, samples: usize, seed: u64) -> Result<WhitneyReport, StrataError> {
    let ambient = big.param.len();
    if small.param.len() != ambient {
        return Err(StrataError::Ambient { expected: ambient, got: small.param.len() });
    }
    if big.base_point() != small.base_point() {
        return Err(StrataError::BaseMismatch);
    }
    let (kb, ks) = (big.dim(), small.dim());
    let pb = big.shifted();
    let ps = small.shifted();
    let jb: Vec<Vec<MultiPoly>> = pb.iter().map(|p| (0..kb).map(|j| p.derivative(j)).collect()).collect();
    let js: Vec<Vec<MultiPoly>> = ps.iter().map(|p| (0..ks).map(|j| p.derivative(j)).collect()).collect();
    let mut rng = rng_for(seed, "whitney");
    let mut report = WhitneyReport { verdict: WhitneyVerdict::Inconclusive, max_distance: 0.0, pairs_tested: 0, pairs_skipped: 0, worst_path: None };
    for s in 0..samples {
        let dir_b: Vec<(f64, i32)> = (0..kb).map(|_| (nonzero_uniform(&mut rng), rng.gen_range(1..=3))).collect();
        let dir_s: Vec<(f64, i32)> = (0..ks).map(|_| (nonzero_uniform(&mut rng), rng.gen_range(1..=3))).collect();
        let nearest = s % 2 == 1;
        let mut tangents = Vec::new();
        let mut secants = Vec::new();
        for &eps in &WHITNEY_SCALES {
            let delta: Vec<f64> = dir_b.iter().map(|&(d, k)| d * eps.powi(k)).collect();
            let x: Vec<f64> = pb.iter().map(|p| eval_real(p, &delta)).collect();
            let cols: Vec<Vec<f64>> = (0..kb).map(|c| (0..ambient).map(|i| eval_real(&jb[i][c], &delta)).collect()).collect();
            let t = column_projector(&cols).ok_or_else(|| StrataError::Degenerate(big.name.clone()))?;
            let eta = if nearest { nearest_param(&ps, &js, &x, ks) } else { dir_s.iter().map(|&(d, k)| d * eps.powi(k)).collect() };
            let y: Vec<f64> = ps.iter().map(|p| eval_real(p, &eta)).collect();
            let sec: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
            let Some(l) = column_projector(&[sec]) else {
                break;
            };
            tangents.push(t);
            secants.push(l);
        }
        let limits = (tangents.len() == 3).then(|| (richardson(&tangents), richardson(&secants)));
        let (Some(Some(t0)), Some(Some(l0))) = (limits.as_ref().map(|l| l.0.clone()), limits.map(|l| l.1)) else {
            report.pairs_skipped += 1;
            continue;
        };
        let t0 = clean_projector(&t0, kb);
        let l0 = clean_projector(&l0, 1);
        let eig = SymmetricEigen::new(l0);
        let top = (0..ambient).max_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap()).unwrap();
        let v = eig.eigenvectors.column(top).into_owned();
        let dist = (&v - &t0 * &v).norm();
        report.pairs_tested += 1;
        if dist > report.max_distance || report.worst_path.is_none() {
            report.max_distance = report.max_distance.max(dist);
            let exps: Vec<String> = dir_b.iter().map(|(_, k)| k.to_string()).collect();
            report.worst_path = Some(format!(
                "big-stratum exponents ({}), {} small-stratum sequence",
                exps.join(", "),
                if nearest { "nearest-point" } else { "random" }
            ));
        }
    }
    report.verdict = if report.pairs_tested == 0 {
        WhitneyVerdict::Inconclusive
    } else if report.max_distance < WHITNEY_TOL {
        WhitneyVerdict::Pass
    } else {
        WhitneyVerdict::Fail
    };
    Ok(report)
}

fn nonzero_uniform(rng: &mut impl Rng) -> f64 {
    let v: f64 = rng.gen_range(0.3..1.0);
    if rng.gen_bool(0.5) {
        v
    } else {
        -v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    fn params(names: &[&str], exprs: &[&str]) -> Vec<MultiPoly> {
        let v: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        exprs.iter().map(|e| parse_poly(e, &v).unwrap()).collect()
    }

    fn q(n: i64) -> GaussianRational {
        GaussianRational::from_int(n)
    }

    #[test]
    fn named_perversities() {
        assert_eq!(make_perversity(&PerversityKind::Max, 4).unwrap().values(), &[0, 1, 2]);
        assert_eq!(make_perversity(&PerversityKind::LowerMiddle, 6).unwrap().values(), &[0, 0, 1, 1, 2]);
        assert_eq!(make_perversity(&PerversityKind::UpperMiddle, 6).unwrap().values(), &[0, 1, 1, 2, 2]);
        assert_eq!(make_perversity(&PerversityKind::Zero, 3).unwrap().values(), &[0, 0]);
        assert_eq!(make_perversity(&PerversityKind::Zero, 1), Err(StrataError::DimensionTooSmall(1)));
        assert_eq!(
            make_perversity(&PerversityKind::Custom(vec![0, 2]), 3),
            Err(StrataError::Growth { index: 3 })
        );
        let m = make_perversity(&PerversityKind::LowerMiddle, 5).unwrap();
        assert_eq!(m.complement(), make_perversity(&PerversityKind::UpperMiddle, 5).unwrap());
        assert_eq!(all_perversities(5).len(), 8);
    }

    #[test]
    fn parse_kinds() {
        assert_eq!(PerversityKind::parse("custom:0,1,1").unwrap(), PerversityKind::Custom(vec![0, 1, 1]));
        assert!(PerversityKind::parse("middle").is_err());
    }

    #[test]
    fn filtration_of_example() {
        let f = PolyMap::parse(&["x", "x^2*y*(y+2)"], &["x", "y"]).unwrap();
        let w = build_filtration(&f, 0).unwrap();
        assert_eq!(w.levels[2].parts[0].set.describe(), "alpha = 0");
        assert!(Arc::ptr_eq(&w.levels[3].parts, &w.levels[2].parts));
        assert!(Arc::ptr_eq(&w.levels[1].parts, &w.levels[0].parts));
        assert!(w.levels[0].is_empty());
        assert!(w.check_descending(20, 0));
        let id = PolyMap::parse(&["x", "y + x^2"], &["x", "y"]).unwrap();
        let w = build_filtration(&id, 0).unwrap();
        assert!(w.levels[2].is_empty() && w.levels[0].is_empty());
    }

    #[test]
    fn restricted_jelonek_on_curves() {
        let tv = target_vars();
        let alpha = parse_poly("alpha", &tv).unwrap();
        // The preimage x = 0 maps properly onto alpha = 0.
        let f = PolyMap::parse(&["x", "y + x*y^2"], &["x", "y"]).unwrap();
        let jac = squarefree(&jacobian_det(&f));
        assert!(restricted_jelonek(&f, &alpha, &jac).unwrap().is_none());
        // The hyperbola x*y = 1 lies over alpha = 0 and its end x -> oo tends to the origin.
        let f = PolyMap::parse(&["x*(x*y - 1)", "y*(x*y - 1) + y"], &["x", "y"]).unwrap();
        let jac = squarefree(&jacobian_det(&f));
        let set = restricted_jelonek(&f, &alpha, &jac).unwrap().unwrap();
        assert_eq!(set.describe(), "alpha = 0 and beta = 0");
        let w = build_filtration(&f, 0).unwrap();
        assert!(!w.levels[0].is_empty());
        assert!(w.check_descending(10, 1));
    }

    #[test]
    fn whitney_parabola_passes() {
        let big = Stratum::new("parabola", params(&["t"], &["t", "t^2"]), vec![q(0)]);
        let small = Stratum::new("origin", vec![MultiPoly::zero(&[]), MultiPoly::zero(&[])], vec![]);
        let rep = whitney_b_sample_test(&big, &small, 12, 0).unwrap();
        assert_eq!(rep.verdict, WhitneyVerdict::Pass, "{rep:?}");
    }

    #[test]
    fn whitney_umbrella_handle_passes() {
        let big = Stratum::new("umbrella", params(&["u", "v"], &["u*v", "v", "u^2"]), vec![q(1), q(0)]);
        let small = Stratum::new("handle", params(&["w"], &["0", "0", "w"]), vec![q(1)]);
        let rep = whitney_b_sample_test(&big, &small, 16, 0).unwrap();
        assert_eq!(rep.verdict, WhitneyVerdict::Pass, "{rep:?}");
    }

    #[test]
    fn whitney_failure_detected() {
        let big = Stratum::new("surface", params(&["s", "z"], &["s^2 - z^2", "s*(s^2 - z^2)", "z"]), vec![q(0), q(0)]);
        let small = Stratum::new("z-axis", params(&["w"], &["0", "0", "w"]), vec![q(0)]);
        let rep = whitney_b_sample_test(&big, &small, 16, 0).unwrap();
        assert_eq!(rep.verdict, WhitneyVerdict::Fail, "{rep:?}");
    }
}
