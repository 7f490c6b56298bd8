//! Non-properness of polynomial maps: the singular locus Sing(F), critical
//! values K_0(F), the Jelonek set S_F, fiber counts and witness arcs.
//!
//! Exact elimination is available for maps of the plane. Target coordinates
//! are named `alpha`, `beta`; elimination runs in the ring `(x, y, alpha, beta)`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_traits::{Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

use crate::infinity::{leading_rank, leading_zero_locus, InfinityError, RankReport, WitnessArc};
use crate::numeric::{cnorm, levenberg_marquardt, poly_roots, rng_for, specialize_complex};
use crate::poly::algebra::product;
use crate::poly::{
    gcd, jacobian_det, parse_poly, resultant, split_components, squarefree, GaussianRational, MultiPoly,
    PolyError, PolyMap, UniPoly,
};

/// Names of the target coordinates for maps of the plane.
pub const TARGET_VARS: [&str; 2] = ["alpha", "beta"];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AsymptoticError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Infinity(#[from] InfinityError),
    #[error("exact elimination needs n = 2, got n = {0}")]
    Dimension(usize),
    #[error("the Jacobian determinant vanishes identically")]
    ZeroJacobian,
    #[error("the map is not generically finite (a resultant vanishes identically)")]
    NotGenericallyFinite,
    #[error("target lies on the critical-value set")]
    OnCriticalValues,
    #[error("the fiber over the target is not finite")]
    InfiniteFiber,
    #[error("source variable '{0}' clashes with a target variable name")]
    NameClash(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("map file line {line}: {msg}")]
    MapFile { line: usize, msg: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flavor {
    Complex,
    RealSemialgebraic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Ge,
    Gt,
    Eq,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Ge => ">=",
            Relation::Gt => ">",
            Relation::Eq => "=",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignCondition {
    pub poly: MultiPoly,
    pub relation: Relation,
}

/// Common zero set of `generators`, optionally cut down by sign conditions.
///
/// No generators means the whole space; a nonzero constant generator means
/// the empty set. Hypersurfaces carry a single squarefree generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraicSet {
    pub ambient_vars: Vec<String>,
    pub generators: Vec<MultiPoly>,
    pub flavor: Flavor,
    pub sign_conditions: Vec<SignCondition>,
    /// Elimination components rejected by back-substitution or arc search.
    pub discarded: Vec<MultiPoly>,
}

impl AlgebraicSet {
    pub fn empty(vars: &[String]) -> Self {
        Self::from_generators(vars, vec![MultiPoly::one(vars)], Flavor::Complex)
    }

    pub fn whole(vars: &[String]) -> Self {
        Self::from_generators(vars, Vec::new(), Flavor::Complex)
    }

    pub fn from_generators(vars: &[String], generators: Vec<MultiPoly>, flavor: Flavor) -> Self {
        AlgebraicSet {
            ambient_vars: vars.to_vec(),
            generators: generators.into_iter().filter(|g| !g.is_zero()).collect(),
            flavor,
            sign_conditions: Vec::new(),
            discarded: Vec::new(),
        }
    }

    /// Union of the zero sets of `components`, as one squarefree generator.
    pub fn hypersurface(vars: &[String], components: &[MultiPoly]) -> Self {
        if components.is_empty() {
            return Self::empty(vars);
        }
        Self::from_generators(vars, vec![squarefree(&product(components, vars))], Flavor::Complex)
    }

    pub fn is_empty(&self) -> bool {
        self.generators.iter().any(|g| g.is_constant())
    }

    pub fn is_whole(&self) -> bool {
        self.generators.is_empty() && self.sign_conditions.is_empty()
    }

    /// Union of zero sets, with the pairwise products as generators.
    pub fn union(&self, other: &AlgebraicSet) -> AlgebraicSet {
        if self.is_empty() {
            return other.clone();
        }
        if other.is_empty() {
            return self.clone();
        }
        let gens = self.generators.iter().flat_map(|a| other.generators.iter().map(move |b| a * b)).collect();
        AlgebraicSet::from_generators(&self.ambient_vars, gens, self.flavor)
    }

    /// Pieces of a hypersurface, or the generators of an intersection.
    pub fn components(&self) -> Vec<MultiPoly> {
        match self.generators.as_slice() {
            [g] if !g.is_constant() => split_components(g),
            [g] if g.is_constant() => Vec::new(),
            gens => gens.to_vec(),
        }
    }

    fn sign_ok(&self, p: &[Complex64], tol: f64) -> bool {
        self.sign_conditions.iter().all(|c| {
            let v = c.poly.eval_complex(p);
            let s = tol * (1.0 + c.poly.eval_abs_scale(p));
            match c.relation {
                Relation::Ge => v.re >= -s,
                Relation::Gt => v.re > -s,
                Relation::Eq => v.norm() <= s,
            }
        })
    }

    /// Approximate membership of a floating point.
    pub fn contains_approx(&self, p: &[Complex64]) -> bool {
        let tol = 1e-7;
        if self.is_empty() {
            return false;
        }
        let on_gens = self.generators.iter().all(|g| g.eval_complex(p).norm() <= tol * (1.0 + g.eval_abs_scale(p)));
        if !on_gens {
            return false;
        }
        match self.flavor {
            Flavor::Complex => true,
            Flavor::RealSemialgebraic => p.iter().all(|z| z.im.abs() <= tol * (1.0 + z.re.abs())) && self.sign_ok(p, tol),
        }
    }

    /// Exact membership of a Gaussian-rational point.
    pub fn contains_exact(&self, p: &[GaussianRational]) -> Result<bool, PolyError> {
        for g in &self.generators {
            if !g.evaluate(p)?.is_zero() {
                return Ok(false);
            }
        }
        if self.flavor == Flavor::RealSemialgebraic {
            if !p.iter().all(|z| z.is_real()) {
                return Ok(false);
            }
            for c in &self.sign_conditions {
                let v = c.poly.evaluate(p)?.re;
                let ok = match c.relation {
                    Relation::Ge => !v.is_negative(),
                    Relation::Gt => v.is_positive(),
                    Relation::Eq => v.is_zero(),
                };
                if !ok {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Points on the set: random values for all but one coordinate of a
    /// component, then a root in the remaining one. Real sets sample real
    /// points satisfying the sign conditions.
    pub fn sample_points(&self, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<Complex64>> {
        let comps = self.components();
        if comps.is_empty() || self.generators.len() > 1 {
            return Vec::new();
        }
        let real = self.flavor == Flavor::RealSemialgebraic;
        let mut out = Vec::new();
        let mut attempts = 0;
        while out.len() < count && attempts < 200 * count {
            let comp = &comps[attempts % comps.len()];
            attempts += 1;
            let Some(p) = sample_on_component(comp, real, rng) else {
                continue;
            };
            if !real || self.sign_ok(&p, 1e-9) {
                out.push(p);
            }
        }
        out
    }

    pub fn describe(&self) -> String {
        if self.is_empty() {
            return "empty".into();
        }
        if self.generators.is_empty() {
            return "whole space".into();
        }
        let eqs: Vec<String> = self.components().iter().map(|c| format!("{c} = 0")).collect();
        let joiner = if self.generators.len() == 1 { " or " } else { " and " };
        let mut s = eqs.join(joiner);
        for c in &self.sign_conditions {
            s.push_str(&format!(", {} {} 0", c.poly, c.relation));
        }
        s
    }

    pub fn to_json(&self) -> Value {
        json!({
            "vars": self.ambient_vars,
            "flavor": match self.flavor { Flavor::Complex => "complex", Flavor::RealSemialgebraic => "real" },
            "empty": self.is_empty(),
            "generators": self.generators.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
            "components": self.components().iter().map(|g| g.to_string()).collect::<Vec<_>>(),
            "sign_conditions": self.sign_conditions.iter()
                .map(|c| json!({"poly": c.poly.to_string(), "relation": c.relation.to_string()}))
                .collect::<Vec<_>>(),
            "discarded": self.discarded.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
        })
    }
}

fn random_complex(rng: &mut ChaCha8Rng, real: bool) -> Complex64 {
    let re = rng.gen_range(-2.0..2.0);
    let im = if real { 0.0 } else { rng.gen_range(-2.0..2.0) };
    Complex64::new(re, im)
}

fn sample_on_component(comp: &MultiPoly, real: bool, rng: &mut ChaCha8Rng) -> Option<Vec<Complex64>> {
    let v = *comp.support_vars().last()?;
    let mut p: Vec<Complex64> = (0..comp.nvars()).map(|_| random_complex(rng, real)).collect();
    let roots = poly_roots(&specialize_complex(comp, v, &p));
    let roots: Vec<Complex64> = if real {
        roots.into_iter().filter(|z| z.im.abs() < 1e-9 * (1.0 + z.re.abs())).map(|z| Complex64::new(z.re, 0.0)).collect()
    } else {
        roots
    };
    if roots.is_empty() {
        return None;
    }
    p[v] = roots[rng.gen_range(0..roots.len())];
    Some(p)
}

/// Whether two sets have the same zero set, by mutual sampling membership.
pub fn same_zero_set(a: &AlgebraicSet, b: &AlgebraicSet, samples: usize, seed: u64) -> bool {
    if a.is_empty() || b.is_empty() {
        return a.is_empty() == b.is_empty();
    }
    let mut rng = rng_for(seed, "same-zero-set");
    let pa = a.sample_points(samples, &mut rng);
    let pb = b.sample_points(samples, &mut rng);
    !pa.is_empty() && !pb.is_empty() && pa.iter().all(|p| b.contains_approx(p)) && pb.iter().all(|p| a.contains_approx(p))
}

pub fn target_vars() -> Vec<String> {
    TARGET_VARS.iter().map(|s| s.to_string()).collect()
}

/// `F_1 − alpha`, `F_2 − beta` and the squarefree Jacobian in `(x, y, alpha, beta)`.
struct Elim {
    ext: Vec<String>,
    g1: MultiPoly,
    g2: MultiPoly,
    jac: MultiPoly,
}

const A: usize = 2;
const B: usize = 3;

impl Elim {
    fn new(f: &PolyMap) -> Result<Self, AsymptoticError> {
        if f.n() != 2 {
            return Err(AsymptoticError::Dimension(f.n()));
        }
        if let Some(v) = f.vars().iter().find(|v| TARGET_VARS.contains(&v.as_str())) {
            return Err(AsymptoticError::NameClash(v.clone()));
        }
        let mut ext = f.vars().to_vec();
        ext.extend(target_vars());
        let g1 = &f.component(0).embed(&ext)? - &MultiPoly::var(&ext, A);
        let g2 = &f.component(1).embed(&ext)? - &MultiPoly::var(&ext, B);
        let jac = squarefree(&jacobian_det(f)).embed(&ext)?;
        Ok(Elim { ext, g1, g2, jac })
    }

    fn to_target(&self, p: &MultiPoly) -> MultiPoly {
        p.embed(&target_vars()).expect("source variables eliminated")
    }

    fn point(&self, x: Complex64, y: Complex64, target: &[Complex64]) -> [Complex64; 4] {
        [x, y, target[0], target[1]]
    }
}

/// Drop trailing coefficients below `rel * reference`; an empty result means
/// the polynomial vanishes identically at this tolerance.
fn trim_small(mut c: Vec<Complex64>, rel: f64, reference: f64) -> Vec<Complex64> {
    let scale = reference.max(c.iter().map(|z| z.norm()).fold(0.0, f64::max));
    while c.last().is_some_and(|z| z.norm() <= rel * scale) {
        c.pop();
    }
    c
}

fn dedup_points(pts: Vec<[Complex64; 2]>) -> Vec<[Complex64; 2]> {
    let mut out: Vec<[Complex64; 2]> = Vec::new();
    for p in pts {
        let close = out.iter().any(|q| cnorm(&[p[0] - q[0], p[1] - q[1]]) <= 1e-6 * (1.0 + cnorm(&p)));
        if !close {
            out.push(p);
        }
    }
    out
}

/// Numeric solutions of `F(x, y) = target` via the eliminant in one source
/// variable followed by back-substitution. Returns an empty list when the
/// eliminant degenerates in both orders.
fn fiber_points(el: &Elim, target: &[Complex64]) -> Vec<[Complex64; 2]> {
    for (solve, other) in [(0usize, 1usize), (1, 0)] {
        let Ok(r) = resultant(&el.g1, &el.g2, other) else {
            continue;
        };
        let coeffs = trim_small(specialize_complex(&r, solve, &el.point(Complex64::zero(), Complex64::zero(), target)), 1e-13, 0.0);
        if coeffs.len() < 2 {
            continue;
        }
        let mut pts = Vec::new();
        for v0 in poly_roots(&coeffs) {
            let mut base = el.point(Complex64::zero(), Complex64::zero(), target);
            base[solve] = v0;
            // Roots of the eliminant may be multiple, hence only accurate to about 1e-8.
            let c1 = trim_small(specialize_complex(&el.g1, other, &base), 1e-6, el.g1.eval_abs_scale(&base));
            let c2 = trim_small(specialize_complex(&el.g2, other, &base), 1e-6, el.g2.eval_abs_scale(&base));
            let (primary, check) = if c1.len() >= 2 { (&c1, &el.g2) } else if c1.is_empty() && c2.len() >= 2 { (&c2, &el.g1) } else { continue };
            for w0 in poly_roots(primary) {
                let mut q = base;
                q[other] = w0;
                let res = check.eval_complex(&q).norm();
                if res <= 1e-6 * (1.0 + check.eval_abs_scale(&q)) {
                    let mut p = [Complex64::zero(); 2];
                    p[solve] = v0;
                    p[other] = w0;
                    pts.push(newton_polish(el, p, target));
                }
            }
        }
        return dedup_points(pts);
    }
    Vec::new()
}

fn newton_polish(el: &Elim, mut p: [Complex64; 2], target: &[Complex64]) -> [Complex64; 2] {
    let d1 = [el.g1.derivative(0), el.g1.derivative(1)];
    let d2 = [el.g2.derivative(0), el.g2.derivative(1)];
    let res = |p: &[Complex64; 2]| {
        let q = el.point(p[0], p[1], target);
        [el.g1.eval_complex(&q), el.g2.eval_complex(&q)]
    };
    let mut r = res(&p);
    for _ in 0..6 {
        let q = el.point(p[0], p[1], target);
        let (a, b, c, d) = (d1[0].eval_complex(&q), d1[1].eval_complex(&q), d2[0].eval_complex(&q), d2[1].eval_complex(&q));
        let det = a * d - b * c;
        if det.norm() < 1e-12 {
            break;
        }
        let step = [(d * r[0] - b * r[1]) / det, (a * r[1] - c * r[0]) / det];
        let cand = [p[0] - step[0], p[1] - step[1]];
        let rc = res(&cand);
        if cnorm(&rc) >= cnorm(&r) {
            break;
        }
        p = cand;
        r = rc;
    }
    p
}

/// Sing(F): the zero set of the squarefree Jacobian determinant.
pub fn singular_locus(f: &PolyMap) -> AlgebraicSet {
    let j = jacobian_det(f);
    if j.is_zero() {
        return AlgebraicSet::whole(f.vars());
    }
    AlgebraicSet::from_generators(f.vars(), vec![squarefree(&j)], Flavor::Complex)
}

/// Back-substitution test: some of 10 sampled points on `comp` has a fiber
/// point where the Jacobian vanishes numerically.
fn has_critical_preimage(el: &Elim, comp: &MultiPoly, rng: &mut ChaCha8Rng) -> bool {
    let set = AlgebraicSet::hypersurface(&target_vars(), std::slice::from_ref(comp));
    set.sample_points(10, rng).iter().any(|t| {
        fiber_points(el, t).iter().any(|p| {
            let q = el.point(p[0], p[1], t);
            el.jac.eval_complex(&q).norm() <= 1e-5 * (1.0 + el.jac.eval_abs_scale(&q))
        })
    })
}

/// Eliminate the source variables from `{G1, G2, J}` by iterated resultants
/// in both variable orders; returns every nonzero result.
fn eliminate_with_jacobian(el: &Elim) -> Vec<MultiPoly> {
    let polys = [&el.g1, &el.g2, &el.jac];
    let mut out = Vec::new();
    for (first, second) in [(1usize, 0usize), (0, 1)] {
        let stage: Vec<MultiPoly> = [(0, 1), (0, 2), (1, 2)]
            .iter()
            .filter_map(|&(a, b)| resultant(polys[a], polys[b], first).ok())
            .filter(|r| !r.is_zero())
            .collect();
        for i in 0..stage.len() {
            for j in i + 1..stage.len() {
                if let Ok(r) = resultant(&stage[i], &stage[j], second) {
                    if !r.is_zero() {
                        out.push(r);
                    }
                }
            }
        }
    }
    out
}

/// K_0(F) = F(Sing F) for maps of the plane. Components produced by the
/// elimination are kept only if some sampled point has a numerically
/// critical preimage; the others are listed in `discarded`.
pub fn critical_values(f: &PolyMap, seed: u64) -> Result<AlgebraicSet, AsymptoticError> {
    let el = Elim::new(f)?;
    let tv = target_vars();
    if el.jac.is_zero() {
        return Err(AsymptoticError::ZeroJacobian);
    }
    if el.jac.is_constant() {
        return Ok(AlgebraicSet::empty(&tv));
    }
    let results = eliminate_with_jacobian(&el);
    if results.is_empty() {
        return Err(AsymptoticError::NotGenericallyFinite);
    }
    let g = results.iter().fold(MultiPoly::zero(&el.ext), |acc, r| gcd(&acc, r));
    let g = el.to_target(&g);
    let mut rng = rng_for(seed, "critical-values");
    let (kept, discarded): (Vec<MultiPoly>, Vec<MultiPoly>) =
        split_components(&g).into_iter().partition(|comp| has_critical_preimage(&el, comp, &mut rng));
    let mut set = AlgebraicSet::hypersurface(&tv, &kept);
    for p in collapsed_components(f, seed)? {
        if !set.contains_exact(&p)? {
            let point = (0..2).map(|i| &MultiPoly::var(&tv, i) - &MultiPoly::constant(&tv, p[i].clone())).collect();
            set = set.union(&AlgebraicSet::from_generators(&tv, point, Flavor::Complex));
        }
    }
    set.discarded = discarded;
    Ok(set)
}

/// The Gaussian rational with the smallest denominator (up to 1000) within
/// `1e-9` of `z`, falling back to the fine approximation.
fn small_rational(z: Complex64) -> GaussianRational {
    let part = |x: f64| (1..=1000i64).find(|&d| (x * d as f64 - (x * d as f64).round()).abs() < 1e-9 * d as f64).map(|d| ((x * d as f64).round() as i64, d));
    match (part(z.re), part(z.im)) {
        (Some((a, b)), Some((c, d))) => GaussianRational::from_parts(a, b, c, d),
        _ => GaussianRational::approximate(z),
    }
}

/// Images of the components of `Sing F` on which `F` is constant. Such a
/// component `s = 0` is detected exactly by `s | ∂(F_i, s)/∂(x, y)`; the
/// value is read off a sampled point and verified by exact division.
fn collapsed_components(f: &PolyMap, seed: u64) -> Result<Vec<Vec<GaussianRational>>, AsymptoticError> {
    let vars = f.vars();
    let mut rng = rng_for(seed, "collapsed-components");
    let mut out = Vec::new();
    for s in split_components(&squarefree(&jacobian_det(f))) {
        let constant_on = |fi: &MultiPoly| {
            let bracket = &(&fi.derivative(0) * &s.derivative(1)) - &(&fi.derivative(1) * &s.derivative(0));
            bracket.is_zero() || bracket.div_exact(&s).is_some()
        };
        if !f.components().iter().all(constant_on) {
            continue;
        }
        let Some(p) = AlgebraicSet::hypersurface(vars, std::slice::from_ref(&s)).sample_points(1, &mut rng).pop() else {
            continue;
        };
        let value: Vec<GaussianRational> = f.components().iter().map(|fi| small_rational(fi.eval_complex(&p))).collect();
        let exact = f.components().iter().zip(&value).all(|(fi, c)| {
            let shifted = fi - &MultiPoly::constant(vars, c.clone());
            shifted.is_zero() || shifted.div_exact(&s).is_some()
        });
        if exact {
            out.push(value);
        }
    }
    Ok(out)
}

/// Parameters of the monomial witness-arc search.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchParams {
    pub seed: u64,
    /// Exponents range over `[-max_exponent, max_exponent]`.
    pub max_exponent: i32,
    pub starts: usize,
    pub max_iter: usize,
    /// Sample points tried per candidate component.
    pub samples: usize,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams { seed: 0, max_exponent: 6, starts: 4, max_iter: 80, samples: 10 }
    }
}

impl SearchParams {
    pub fn with_seed(seed: u64) -> Self {
        SearchParams { seed, ..Self::default() }
    }
}

/// Exponent vectors with at least one negative entry, by increasing `Σ|a_j|`.
fn exponent_grid(n: usize, k: i32) -> Vec<Vec<i32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v: Vec<i32>| {
                (-k..=k).map(move |e| {
                    let mut w = v.clone();
                    w.push(e);
                    w
                })
            })
            .collect();
    }
    out.retain(|v| v.iter().any(|&e| e < 0));
    out.sort_by_key(|v| (v.iter().map(|e| e.abs()).sum::<i32>(), v.clone()));
    out
}

type Monomial = (Complex64, Vec<u32>);

/// One equation `Σ coef·c^e = offset`.
struct Equation {
    terms: Vec<Monomial>,
    offset: Complex64,
}

fn eval_monomial(m: &Monomial, c: &[Complex64]) -> Complex64 {
    let mut v = m.0;
    for (j, &k) in m.1.iter().enumerate() {
        if k > 0 {
            v *= c[j].powu(k);
        }
    }
    v
}

/// Equations for the monomial ansatz with exponents `a`: Laurent
/// coefficients of negative order vanish and, for a fixed target, the
/// constant coefficients match it. `None` if trivially infeasible.
fn ansatz_equations(f: &PolyMap, a: &[i32], target: Option<&[Complex64]>) -> Option<Vec<Equation>> {
    let mut eqs = Vec::new();
    for (i, comp) in f.components().iter().enumerate() {
        let mut groups: BTreeMap<i64, Vec<Monomial>> = BTreeMap::new();
        for (e, c) in comp.terms() {
            let s: i64 = e.iter().zip(a).map(|(&k, &aj)| k as i64 * aj as i64).sum();
            groups.entry(s).or_default().push((c.to_complex(), e.clone()));
        }
        let want = target.map_or(Complex64::zero(), |t| t[i]);
        if target.is_some() && !groups.contains_key(&0)
            && want.norm() > 1e-12 {
                return None;
            }
        for (s, terms) in groups {
            if s < 0 {
                eqs.push(Equation { terms, offset: Complex64::zero() });
            } else if s == 0 && target.is_some() {
                eqs.push(Equation { terms, offset: want });
            }
        }
    }
    Some(eqs)
}

/// Variables forced to vanish by single-variable monomial equations.
fn forced_zeros(eqs: &[Equation], n: usize) -> Option<Vec<bool>> {
    let mut zero = vec![false; n];
    loop {
        let mut changed = false;
        for eq in eqs {
            let live: Vec<&Monomial> =
                eq.terms.iter().filter(|m| !m.1.iter().enumerate().any(|(j, &k)| k > 0 && zero[j])).collect();
            if live.is_empty() {
                if eq.offset.norm() > 1e-12 {
                    return None;
                }
                continue;
            }
            if live.len() == 1 && eq.offset.norm() <= 1e-12 {
                let support: Vec<usize> = (0..n).filter(|&j| live[0].1[j] > 0).collect();
                match support.as_slice() {
                    [] => return None,
                    [j] => {
                        zero[*j] = true;
                        changed = true;
                    }
                    _ => {}
                }
            }
        }
        if !changed {
            return Some(zero);
        }
    }
}

/// Outcome of numerically validating an arc.
#[derive(Clone, Debug, PartialEq)]
pub struct ArcCheck {
    pub accepted: bool,
    /// `|F(γ(t)) − target|` at `t = 1e-2, 1e-4, 1e-6`, from the Laurent form.
    pub image_errors: Vec<f64>,
    /// Largest Laurent coefficient of negative order.
    pub negative_residual: f64,
    /// Constant Laurent coefficients of `F ∘ γ`.
    pub limit: Vec<Complex64>,
}

pub const ARC_CHECK_SCALES: [f64; 3] = [1e-2, 1e-4, 1e-6];

/// Check that `γ` escapes to infinity while `F(γ(t))` converges to `target`
/// (or to its own limit when `target` is `None`).
pub fn validate_arc(f: &PolyMap, arc: &WitnessArc, target: Option<&[Complex64]>) -> ArcCheck {
    let img = arc.laurent_image(f);
    let scale = img.iter().flat_map(|l| l.values()).map(|z| z.norm()).fold(1.0, f64::max);
    let negative_residual =
        img.iter().flat_map(|l| l.range(..0).map(|(_, z)| z.norm())).fold(0.0, f64::max);
    let limit: Vec<Complex64> = img.iter().map(|l| l.get(&0).copied().unwrap_or_else(Complex64::zero)).collect();
    let goal = target.map(|t| t.to_vec()).unwrap_or_else(|| limit.clone());
    let image_errors: Vec<f64> = ARC_CHECK_SCALES
        .iter()
        .map(|&t| {
            let diff: Vec<Complex64> = img
                .iter()
                .zip(&goal)
                .map(|(l, g)| l.range(0..).map(|(&s, z)| z * t.powi(s as i32)).sum::<Complex64>() - g)
                .collect();
            cnorm(&diff)
        })
        .collect();
    let norms: Vec<f64> = ARC_CHECK_SCALES.iter().map(|&t| cnorm(&arc.eval(t))).collect();
    let e = &image_errors;
    let accepted = arc.escapes()
        && negative_residual <= 1e-9 * scale
        && e[2] < 1e-3
        && e[0] >= e[1]
        && e[1] >= e[2]
        && (e[0] > e[2] || e[0] < 1e-12)
        && norms[0] < norms[1]
        && norms[1] < norms[2];
    ArcCheck { accepted, image_errors, negative_residual, limit }
}

fn search_arcs(f: &PolyMap, target: Option<&[Complex64]>, params: &SearchParams) -> Option<(WitnessArc, Vec<Complex64>)> {
    let n = f.n();
    let tag = match target {
        Some(_) => "arc-search-fixed",
        None => "arc-search-free",
    };
    let mut rng = rng_for(params.seed, tag);
    for a in exponent_grid(n, params.max_exponent) {
        let Some(eqs) = ansatz_equations(f, &a, target) else {
            continue;
        };
        let Some(zero) = forced_zeros(&eqs, n) else {
            continue;
        };
        if (0..n).filter(|&j| a[j] < 0).all(|j| zero[j]) {
            continue;
        }
        let residual = |c: &[Complex64]| -> Vec<Complex64> {
            eqs.iter().map(|eq| eq.terms.iter().map(|m| eval_monomial(m, c)).sum::<Complex64>() - eq.offset).collect()
        };
        let jacobian = |c: &[Complex64]| -> Vec<Vec<Complex64>> {
            eqs.iter()
                .map(|eq| {
                    (0..n)
                        .map(|j| {
                            eq.terms
                                .iter()
                                .filter(|m| m.1[j] > 0)
                                .map(|m| {
                                    let mut d = m.clone();
                                    let k = d.1[j];
                                    d.0 *= k as f64;
                                    d.1[j] -= 1;
                                    eval_monomial(&d, c)
                                })
                                .sum()
                        })
                        .collect()
                })
                .collect()
        };
        for _ in 0..params.starts {
            let x0: Vec<Complex64> = (0..n)
                .map(|j| {
                    if zero[j] {
                        Complex64::zero()
                    } else {
                        Complex64::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(0.0..std::f64::consts::TAU))
                    }
                })
                .collect();
            let out = if eqs.is_empty() {
                crate::numeric::LmOutcome { x: x0, residual: 0.0 }
            } else {
                levenberg_marquardt(residual, jacobian, x0, params.max_iter)
            };
            if out.residual > 1e-13 {
                continue;
            }
            let c: Vec<Complex64> =
                out.x.iter().map(|z| if z.norm() < 1e-7 { Complex64::zero() } else { *z }).collect();
            if (0..n).filter(|&j| a[j] < 0).all(|j| c[j].norm() < 1e-4) {
                continue;
            }
            let arc = WitnessArc::monomial(&c, &a);
            let check = validate_arc(f, &arc, target);
            if check.accepted {
                return Some((arc, check.limit));
            }
        }
    }
    None
}

/// Search for a monomial arc `γ(t) = (c_j t^{a_j})` with `γ → ∞` and
/// `F(γ(t)) → target` as `t → 0⁺`. Failure is a normal outcome.
pub fn witness_arc_search(f: &PolyMap, target: &[Complex64], params: &SearchParams) -> Option<WitnessArc> {
    if target.len() != f.n() {
        return None;
    }
    search_arcs(f, Some(target), params).map(|(arc, _)| arc)
}

/// Search for any arc to infinity with bounded image; returns the arc and
/// the limit of its image.
pub fn free_witness_search(f: &PolyMap, params: &SearchParams) -> Option<(WitnessArc, Vec<Complex64>)> {
    search_arcs(f, None, params)
}

/// One component of a candidate description of S_F.
#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    pub component: MultiPoly,
    /// Which leading coefficient produced it.
    pub source: String,
    pub confirmed: bool,
    /// Confirming arc and the target point it converges to.
    pub witness: Option<(WitnessArc, Vec<Complex64>)>,
    pub samples_tried: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct JelonekAnalysis {
    pub set: AlgebraicSet,
    pub candidates: Vec<Candidate>,
}

/// Complex Jelonek set of a map of the plane. Candidates are the components
/// of the leading coefficients of `res_y(F_1 − α, F_2 − β)` in `x` and of
/// `res_x(F_1 − α, F_2 − β)` in `y`; each is kept iff a witness arc is found
/// over one of its sampled points.
pub fn jelonek_analysis(f: &PolyMap, params: &SearchParams) -> Result<JelonekAnalysis, AsymptoticError> {
    let el = Elim::new(f)?;
    let tv = target_vars();
    let mut candidates: Vec<Candidate> = Vec::new();
    for (elim, keep, label) in [(1usize, 0usize, "leading coefficient in x of res_y"), (0, 1, "leading coefficient in y of res_x")] {
        let r = resultant(&el.g1, &el.g2, elim).map_err(|_| AsymptoticError::NotGenericallyFinite)?;
        if r.is_zero() {
            return Err(AsymptoticError::NotGenericallyFinite);
        }
        let lc = el.to_target(&r.lc_in(keep));
        for comp in split_components(&lc) {
            if !candidates.iter().any(|c| c.component == comp) {
                candidates.push(Candidate { component: comp, source: label.into(), confirmed: false, witness: None, samples_tried: 0 });
            }
        }
    }
    let mut rng = rng_for(params.seed, "jelonek-samples");
    for cand in candidates.iter_mut() {
        let set = AlgebraicSet::hypersurface(&tv, std::slice::from_ref(&cand.component));
        for t in set.sample_points(params.samples, &mut rng) {
            cand.samples_tried += 1;
            if let Some(arc) = witness_arc_search(f, &t, params) {
                cand.confirmed = true;
                cand.witness = Some((arc, t));
                break;
            }
        }
    }
    let kept: Vec<MultiPoly> = candidates.iter().filter(|c| c.confirmed).map(|c| c.component.clone()).collect();
    let mut set = AlgebraicSet::hypersurface(&tv, &kept);
    set.discarded = candidates.iter().filter(|c| !c.confirmed).map(|c| c.component.clone()).collect();
    Ok(JelonekAnalysis { set, candidates })
}

pub fn jelonek_set(f: &PolyMap, params: &SearchParams) -> Result<AlgebraicSet, AsymptoticError> {
    Ok(jelonek_analysis(f, params)?.set)
}

/// Whether `F` is in the family handled by the real analysis: real
/// coefficients, `F_1 = x`, `F_2` quadratic in `y`.
pub fn in_builtin_family(f: &PolyMap) -> bool {
    f.n() == 2 && f.is_real() && *f.component(0) == MultiPoly::var(f.vars(), 0) && f.component(1).degree_in(1) == 2
}

/// Real Jelonek set for the built-in family. Along a component `α = α₀` of the
/// complex set, a real fiber point escapes iff the discriminant `D(α, β)` of
/// `F_2(α, y) − β` is nonnegative near `α₀`; the lowest nonvanishing
/// coefficient of `D(α₀ + h, β)` in `h` decides the sign condition.
pub fn real_jelonek_set(f: &PolyMap, params: &SearchParams) -> Result<AlgebraicSet, AsymptoticError> {
    if !in_builtin_family(f) {
        return Err(AsymptoticError::Unsupported(
            "real Jelonek sets are computed only for F = (x, G) with G real and quadratic in y".into(),
        ));
    }
    let el = Elim::new(f)?;
    let tv = target_vars();
    let complex = jelonek_set(f, params)?;
    let h = el.g2.substitute(0, &MultiPoly::var(&el.ext, A));
    let c = h.coeffs_in(1);
    let disc = &(&c[1] * &c[1]) - &(&MultiPoly::from_int(&el.ext, 4) * &(&c[2] * &c[0]));
    let disc = el.to_target(&disc);
    let mut plain = Vec::new();
    let mut conditioned = Vec::new();
    for comp in complex.components() {
        if comp.degree() != 1 || comp.degree_in(1) != 0 {
            return Err(AsymptoticError::Unsupported(format!("component {comp} is not a vertical line")));
        }
        let lc = comp.lc_in(0).constant_term();
        let a0 = &(-&comp.constant_term()) / &lc;
        if !a0.is_real() {
            continue;
        }
        let shift = &MultiPoly::var(&tv, 0) + &MultiPoly::constant(&tv, a0);
        let expansion = disc.substitute(0, &shift).coeffs_in(0);
        let Some((k, lowest)) = expansion.iter().enumerate().find(|(_, d)| !d.is_zero()) else {
            plain.push(comp);
            continue;
        };
        if k % 2 == 1 {
            plain.push(comp);
        } else if lowest.is_constant() {
            if lowest.constant_term().re.is_positive() {
                plain.push(comp);
            }
        } else {
            let (_, lead) = lowest.leading_term().expect("nonzero");
            let norm = GaussianRational::real(lead.re.abs());
            let poly = lowest.scale(&norm.inv().expect("nonzero"));
            conditioned.push((comp, SignCondition { poly, relation: Relation::Ge }));
        }
    }
    let mut set = match (plain.is_empty(), conditioned.len()) {
        (_, 0) => AlgebraicSet::hypersurface(&tv, &plain),
        (true, 1) => {
            let (comp, cond) = conditioned.pop().unwrap();
            let mut s = AlgebraicSet::hypersurface(&tv, &[comp]);
            s.sign_conditions.push(cond);
            s
        }
        _ => {
            return Err(AsymptoticError::Unsupported("several real components with sign conditions".into()));
        }
    };
    set.flavor = Flavor::RealSemialgebraic;
    set.discarded = complex.discarded;
    Ok(set)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FiberMode {
    Complex,
    Real,
}

/// Number of distinct solutions of `F(x, y) = target`, from the eliminant in
/// `u = x + λy` for seeded generic shears `λ`.
pub fn fiber_count(f: &PolyMap, target: &[GaussianRational], mode: FiberMode, seed: u64) -> Result<usize, AsymptoticError> {
    if f.n() != 2 {
        return Err(AsymptoticError::Dimension(f.n()));
    }
    if target.len() != 2 {
        return Err(PolyError::DimensionMismatch { expected: 2, got: target.len() }.into());
    }
    if mode == FiberMode::Real && (!f.is_real() || !target.iter().all(|t| t.is_real())) {
        return Err(PolyError::NonReal.into());
    }
    let crit = critical_values(f, seed)?;
    if !crit.is_empty() && crit.contains_exact(target)? {
        return Err(AsymptoticError::OnCriticalValues);
    }
    let vars = f.vars();
    let g: Vec<MultiPoly> =
        (0..2).map(|i| f.component(i) - &MultiPoly::constant(vars, target[i].clone())).collect();
    let mut rng = rng_for(seed, "fiber-shear");
    let mut best = 0;
    let mut shears = 0;
    for _ in 0..20 {
        if shears == 2 {
            break;
        }
        let lam = GaussianRational::from_ratio(rng.gen_range(1..=9) * if rng.gen_bool(0.5) { 1 } else { -1 }, rng.gen_range(1..=5));
        let sheared_x = &MultiPoly::var(vars, 0) - &MultiPoly::var(vars, 1).scale(&lam);
        let h: Vec<MultiPoly> = g.iter().map(|p| p.substitute(0, &sheared_x)).collect();
        if h.iter().any(|p| p.degree_in(1) > 0 && !p.lc_in(1).is_constant()) {
            continue;
        }
        let e = match resultant(&h[0], &h[1], 1) {
            Ok(e) => e,
            Err(PolyError::ConstantInVariable(_)) => return Err(AsymptoticError::NotGenericallyFinite),
            Err(e) => return Err(e.into()),
        };
        if e.is_zero() {
            return Err(AsymptoticError::InfiniteFiber);
        }
        let u = UniPoly::from_multi(&e, 0)?;
        let count = match mode {
            FiberMode::Complex => u.squarefree().degree().max(0) as usize,
            FiberMode::Real => u.count_real_roots()?,
        };
        best = best.max(count);
        shears += 1;
    }
    if shears == 0 {
        return Err(AsymptoticError::Unsupported("no admissible shear found".into()));
    }
    Ok(best)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Proper,
    NonProper,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Proper => "Proper",
            Verdict::NonProper => "NonProper",
            Verdict::Unknown => "Unknown",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PropernessReport {
    pub verdict: Verdict,
    /// An arc to infinity with its image limit.
    pub witness: Option<(WitnessArc, Vec<Complex64>)>,
    pub jelonek: Option<AlgebraicSet>,
    pub note: String,
}

/// Properness verdict: exact Jelonek set for maps of the plane, monomial
/// witness search otherwise.
pub fn properness_test(f: &PolyMap, params: &SearchParams) -> PropernessReport {
    let exact = if f.n() == 2 { Some(jelonek_analysis(f, params)) } else { None };
    match exact {
        Some(Ok(an)) if !an.set.is_empty() => {
            let witness = an.candidates.iter().find_map(|c| c.witness.clone());
            PropernessReport { verdict: Verdict::NonProper, witness, jelonek: Some(an.set), note: "nonempty Jelonek set".into() }
        }
        Some(Ok(an)) => match free_witness_search(f, params) {
            Some(w) => PropernessReport {
                verdict: Verdict::NonProper,
                witness: Some(w),
                jelonek: Some(an.set),
                note: "witness arc found although the computed Jelonek set is empty".into(),
            },
            None => PropernessReport { verdict: Verdict::Proper, witness: None, jelonek: Some(an.set), note: "empty Jelonek set".into() },
        },
        other => {
            let note = match other {
                Some(Err(e)) => format!("exact path unavailable: {e}"),
                _ => "exact path needs n = 2".into(),
            };
            match free_witness_search(f, params) {
                Some(w) => PropernessReport { verdict: Verdict::NonProper, witness: Some(w), jelonek: None, note },
                None => PropernessReport { verdict: Verdict::Unknown, witness: None, jelonek: None, note },
            }
        }
    }
}

fn complex_json(z: &Complex64) -> Value {
    json!([z.re, z.im])
}

fn witness_json(w: &(WitnessArc, Vec<Complex64>)) -> Value {
    json!({"arc": w.0.to_json(), "limit": w.1.iter().map(complex_json).collect::<Vec<_>>()})
}

impl PropernessReport {
    pub fn to_json(&self) -> Value {
        json!({
            "verdict": self.verdict.to_string(),
            "witness": self.witness.as_ref().map(witness_json),
            "jelonek": self.jelonek.as_ref().map(|s| s.to_json()),
            "note": self.note,
        })
    }
}

/// Parse a map file: a `var x y …` line, then `F1 = …`, …, `Fn = …`.
/// `#` starts a comment.
pub fn parse_map_file(text: &str) -> Result<PolyMap, AsymptoticError> {
    let mut vars: Option<Vec<String>> = None;
    let mut comps: BTreeMap<usize, (usize, String)> = BTreeMap::new();
    let err = |line: usize, msg: String| AsymptoticError::MapFile { line, msg };
    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("var ").or_else(|| (line == "var").then_some("")) {
            if vars.is_some() {
                return Err(err(line_no, "duplicate var line".into()));
            }
            let names: Vec<String> = rest.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty()).map(String::from).collect();
            if names.is_empty() {
                return Err(err(line_no, "no variables declared".into()));
            }
            vars = Some(names);
            continue;
        }
        let (lhs, rhs) = line.split_once('=').ok_or_else(|| err(line_no, "expected 'Fi = expression'".into()))?;
        let idx: usize = lhs
            .trim()
            .strip_prefix('F')
            .and_then(|s| s.parse().ok())
            .filter(|&i| i >= 1)
            .ok_or_else(|| err(line_no, format!("bad component name '{}'", lhs.trim())))?;
        if comps.insert(idx, (line_no, rhs.trim().to_string())).is_some() {
            return Err(err(line_no, format!("component F{idx} defined twice")));
        }
    }
    let vars = vars.ok_or_else(|| err(0, "missing var line".into()))?;
    if comps.len() != vars.len() || comps.keys().enumerate().any(|(i, &k)| k != i + 1) {
        return Err(err(0, format!("expected components F1..F{}", vars.len())));
    }
    let mut polys = Vec::new();
    for (line_no, expr) in comps.values() {
        polys.push(parse_poly(expr, &vars).map_err(|e| err(*line_no, e.to_string()))?);
    }
    Ok(PolyMap::new(polys)?)
}

/// Everything `analyze` reports about a map.
#[derive(Clone, Debug)]
pub struct MapAnalysis {
    pub map: PolyMap,
    pub seed: u64,
    pub singular: AlgebraicSet,
    pub critical: Result<AlgebraicSet, AsymptoticError>,
    pub jelonek: Result<JelonekAnalysis, AsymptoticError>,
    pub real_jelonek: Option<Result<AlgebraicSet, AsymptoticError>>,
    pub rank: Result<RankReport, InfinityError>,
    pub leading_zero_locus: Result<AlgebraicSet, InfinityError>,
    pub properness: PropernessReport,
}

pub fn analyze_map(f: &PolyMap, seed: u64) -> MapAnalysis {
    let params = SearchParams::with_seed(seed);
    let jelonek = jelonek_analysis(f, &params);
    let real_jelonek = in_builtin_family(f).then(|| real_jelonek_set(f, &params));
    MapAnalysis {
        map: f.clone(),
        seed,
        singular: singular_locus(f),
        critical: critical_values(f, seed),
        jelonek,
        real_jelonek,
        rank: leading_rank(f, 8, seed),
        leading_zero_locus: leading_zero_locus(f),
        properness: properness_test(f, &params),
    }
}

fn set_or_error_json<E: fmt::Display>(r: &Result<AlgebraicSet, E>) -> Value {
    match r {
        Ok(s) => s.to_json(),
        Err(e) => json!({"error": e.to_string()}),
    }
}

fn set_or_error_text<E: fmt::Display>(r: &Result<AlgebraicSet, E>) -> String {
    match r {
        Ok(s) => s.describe(),
        Err(e) => format!("unavailable ({e})"),
    }
}

impl MapAnalysis {
    pub fn to_json(&self) -> Value {
        let candidates = match &self.jelonek {
            Ok(an) => Value::Array(
                an.candidates
                    .iter()
                    .map(|c| {
                        json!({
                            "component": c.component.to_string(),
                            "source": c.source,
                            "confirmed": c.confirmed,
                            "samples_tried": c.samples_tried,
                            "witness": c.witness.as_ref().map(witness_json),
                        })
                    })
                    .collect(),
            ),
            Err(e) => json!({"error": e.to_string()}),
        };
        let witnesses: Vec<Value> = self.properness.witness.iter().map(witness_json).collect();
        json!({
            "map": self.map.to_string(),
            "vars": self.map.vars(),
            "seed": self.seed,
            "verdict": self.properness.verdict.to_string(),
            "generators": {
                "singular_locus": self.singular.to_json(),
                "critical_values": set_or_error_json(&self.critical),
                "jelonek": match &self.jelonek { Ok(an) => an.set.to_json(), Err(e) => json!({"error": e.to_string()}) },
                "leading_zero_locus": set_or_error_json(&self.leading_zero_locus),
            },
            "sign_conditions": match &self.real_jelonek {
                Some(r) => set_or_error_json(r),
                None => Value::Null,
            },
            "jelonek_candidates": candidates,
            "leading_rank": match &self.rank {
                Ok(r) => json!({"rank": r.rank, "n": r.n, "condition": r.condition, "trials": r.trials}),
                Err(e) => json!({"error": e.to_string()}),
            },
            "witnesses": witnesses,
            "properness": self.properness.to_json(),
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("map: F = {}\n", self.map));
        out.push_str(&format!("verdict: {}\n", self.properness.verdict));
        let jel = match &self.jelonek {
            Ok(an) => an.set.describe(),
            Err(e) => format!("unavailable ({e})"),
        };
        if self.properness.verdict == Verdict::Proper && self.singular.is_empty() {
            out.push_str("Proper; all sets empty\n");
        }
        if self.properness.verdict == Verdict::NonProper {
            out.push_str(&format!("NonProper; S_F: {jel}\n"));
        }
        out.push_str(&format!("Sing(F): {}\n", self.singular.describe()));
        out.push_str(&format!("K_0(F): {}\n", set_or_error_text(&self.critical)));
        if let Ok(k) = &self.critical {
            for d in &k.discarded {
                out.push_str(&format!("  discarded elimination component: {d} = 0\n"));
            }
        }
        out.push_str(&format!("S_F (complex): {jel}\n"));
        if let Ok(an) = &self.jelonek {
            for c in &an.candidates {
                let status = if c.confirmed { "confirmed by witness arc" } else { "rejected, no witness arc" };
                out.push_str(&format!("  candidate {} = 0 [{}]: {} ({} samples)\n", c.component, c.source, status, c.samples_tried));
            }
        }
        if let Some(r) = &self.real_jelonek {
            out.push_str(&format!("S_F (real): {}\n", set_or_error_text(r)));
        }
        out.push_str(&format!("V (leading forms): {}\n", set_or_error_text(&self.leading_zero_locus)));
        match &self.rank {
            Ok(r) => out.push_str(&format!(
                "leading rank: {} of {} (rank > n - 2: {}; {} trials)\n",
                r.rank, r.n, r.condition, r.trials
            )),
            Err(e) => out.push_str(&format!("leading rank: unavailable ({e})\n")),
        }
        if let Some((arc, limit)) = &self.properness.witness {
            let lim: Vec<String> = limit.iter().map(|z| format!("{:.6}{:+.6}i", z.re, z.im)).collect();
            out.push_str(&format!("witness arc (image -> ({})):\n", lim.join(", ")));
            for line in arc.to_string().lines() {
                out.push_str(&format!("  {line}\n"));
            }
        }
        out.push_str(&format!("note: {}\n", self.properness.note));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(a: &str, b: &str) -> PolyMap {
        PolyMap::parse(&[a, b], &["x", "y"]).unwrap()
    }

    fn tpoly(s: &str) -> MultiPoly {
        parse_poly(s, &target_vars()).unwrap()
    }

    #[test]
    fn collapsed_singular_line_gives_a_point() {
        let k = critical_values(&map("x", "x*y"), 0).unwrap();
        assert_eq!(k.describe(), "alpha = 0 and beta = 0");
        let k = critical_values(&map("x", "x*y + 1/3"), 0).unwrap();
        assert!(k.contains_exact(&[GaussianRational::from_int(0), GaussianRational::from_ratio(1, 3)]).unwrap());
        assert_eq!(
            fiber_count(&map("x", "x*y"), &[GaussianRational::from_int(0), GaussianRational::from_int(0)], FiberMode::Complex, 0),
            Err(AsymptoticError::OnCriticalValues)
        );
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn singular_locus_examples() {
        let s = singular_locus(&map("x", "x^2*y*(y+2)"));
        assert_eq!(s.generators, vec![parse_poly("x*y + x", &["x".into(), "y".into()]).unwrap()]);
        assert!(singular_locus(&map("x", "y + x^2")).is_empty());
        assert_eq!(singular_locus(&map("x^2", "y")).describe(), "x = 0");
    }

    #[test]
    fn critical_values_examples() {
        let k = critical_values(&map("x", "x^2*y*(y+2)"), 0).unwrap();
        assert_eq!(k.components(), vec![tpoly("alpha^2 + beta")]);
        assert!(k.discarded.is_empty());
        assert!(critical_values(&map("x", "y + x^2"), 0).unwrap().is_empty());
        assert_eq!(critical_values(&map("x^2", "y"), 0).unwrap().components(), vec![tpoly("alpha")]);
    }

    #[test]
    fn back_substitution_rejects_spurious_factor() {
        let el = Elim::new(&map("x", "x^2*y*(y+2)")).unwrap();
        let mut rng = rng_for(0, "test");
        assert!(!has_critical_preimage(&el, &tpoly("alpha"), &mut rng));
        assert!(has_critical_preimage(&el, &tpoly("alpha^2 + beta"), &mut rng));
    }

    #[test]
    fn jelonek_examples() {
        let p = SearchParams::default();
        assert_eq!(jelonek_set(&map("x", "x^2*y*(y+2)"), &p).unwrap().components(), vec![tpoly("alpha")]);
        assert_eq!(jelonek_set(&map("x", "x*y"), &p).unwrap().components(), vec![tpoly("alpha")]);
        assert!(jelonek_set(&map("x", "y + x^2"), &p).unwrap().is_empty());
        assert_eq!(jelonek_set(&map("x", "x"), &p), Err(AsymptoticError::NotGenericallyFinite));
    }

    #[test]
    fn real_jelonek_of_example() {
        let s = real_jelonek_set(&map("x", "x^2*y*(y+2)"), &SearchParams::default()).unwrap();
        assert_eq!(s.components(), vec![tpoly("alpha")]);
        assert_eq!(s.sign_conditions, vec![SignCondition { poly: tpoly("beta"), relation: Relation::Ge }]);
        assert_eq!(s.describe(), "alpha = 0, beta >= 0");
    }

    #[test]
    fn witness_arcs() {
        let p = SearchParams::default();
        let arc = witness_arc_search(&map("x", "x*y"), &[c(0.0, 0.0), c(1.0, 0.0)], &p).unwrap();
        assert_eq!(arc.exponents(), vec![Some(1), Some(-1)]);
        let arc = witness_arc_search(&map("x", "x^2*y*(y+2)"), &[c(0.0, 0.0), c(4.0, 0.0)], &p).unwrap();
        let z = arc.eval(1e-6);
        let img = map("x", "x^2*y*(y+2)").eval_complex(&z);
        assert!((img[1] - c(4.0, 0.0)).norm() < 1e-3);
        assert!(witness_arc_search(&map("x", "y + x^2"), &[c(1.0, 0.0), c(2.0, 0.0)], &p).is_none());
    }

    #[test]
    fn fiber_counts() {
        let f = map("x", "x^2*y*(y+2)");
        let g = |a: i64, b: i64| [GaussianRational::from_int(a), GaussianRational::from_int(b)];
        assert_eq!(fiber_count(&f, &g(1, 1), FiberMode::Real, 0).unwrap(), 2);
        assert_eq!(fiber_count(&f, &g(1, -2), FiberMode::Real, 0).unwrap(), 0);
        assert_eq!(fiber_count(&f, &g(1, -2), FiberMode::Complex, 0).unwrap(), 2);
        assert_eq!(fiber_count(&f, &g(1, -1), FiberMode::Complex, 0), Err(AsymptoticError::OnCriticalValues));
    }

    #[test]
    fn properness_verdicts() {
        let p = SearchParams::default();
        assert_eq!(properness_test(&map("x", "y + x^2"), &p).verdict, Verdict::Proper);
        let r = properness_test(&map("x", "x*y"), &p);
        assert_eq!(r.verdict, Verdict::NonProper);
        assert_eq!(r.jelonek.unwrap().components(), vec![tpoly("alpha")]);
    }

    #[test]
    fn map_file_parsing() {
        let f = parse_map_file("# example\nvar x y\nF1 = x\nF2 = x^2*y*(y+2)\n").unwrap();
        assert_eq!(f, map("x", "x^2*y*(y+2)"));
        assert!(matches!(parse_map_file("var x y\nF1 = x\n"), Err(AsymptoticError::MapFile { .. })));
        assert!(matches!(parse_map_file("var x y\nF1 = x\nF2 = 2y\n"), Err(AsymptoticError::MapFile { line: 3, .. })));
    }
}
