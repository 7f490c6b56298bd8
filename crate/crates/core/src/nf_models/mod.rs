//! Combinatorial models of the variety `N_F` of a map of the plane: sheets
//! over the regions cut out by `S_F ∪ K_0(F)`, glued where the sheets meet
//! over those curves, and the harness comparing properness with the
//! homology of the model.
//!
//! Two families are supported. Over the reals, maps `(x, G)` with `G`
//! quadratic in `y` (or linear with constant leading coefficient) get a
//! 2-dimensional sector model. Over the complex numbers, maps
//! `(x, A(x)·y + c(x))` with `deg A ≤ 1` get a 4-dimensional product model,
//! blown up at the point whose fiber is a line.

mod blowup;
mod real;

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::Rng;
use serde_json::{json, Value};
use thiserror::Error;

use crate::asymptotic::{
    critical_values, fiber_count, jelonek_set, properness_test, real_jelonek_set, singular_locus, target_vars,
    AlgebraicSet, AsymptoticError, FiberMode, SearchParams, Verdict,
};
use crate::ih::{homology, ih_betti, FilteredComplex, IhError, Variant};
use crate::infinity::leading_rank;
use crate::numeric::rng_for;
use crate::poly::{jacobian_det, GaussianRational, MultiPoly, PolyError, PolyMap};
use crate::strata::{make_perversity, PerversityKind, StrataError};

pub use real::{TRACK_STEP, TRACK_TOL};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("unsupported map: {0}")]
    Unsupported(String),
    #[error("degenerate region: {0}")]
    Degenerate(String),
    #[error("fiber tracking failed: {0}")]
    Tracking(String),
    #[error(transparent)]
    Asymptotic(#[from] AsymptoticError),
    #[error(transparent)]
    Ih(#[from] IhError),
    #[error(transparent)]
    Strata(#[from] StrataError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

pub(crate) struct UnionFind(Vec<usize>);

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    pub fn find(&mut self, x: usize) -> usize {
        let p = self.0[x];
        if p == x {
            return x;
        }
        let r = self.find(p);
        self.0[x] = r;
        r
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Field {
    Real,
    Complex,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    pub seed: u64,
    /// Radius of the base disk; chosen from the curve coefficients if unset.
    pub radius: Option<f64>,
}

impl ModelParams {
    pub fn with_seed(seed: u64) -> Self {
        ModelParams { seed, radius: None }
    }
}

/// A connected component of the base minus the curves.
#[derive(Clone, Debug, PartialEq)]
pub struct Region {
    pub id: usize,
    /// Sign conditions shared by the whole region, e.g. `"alpha > 0"`.
    pub conditions: Vec<String>,
    pub sample: Vec<GaussianRational>,
    pub sheet_count: usize,
    /// Sheets (1-based) lying over the region.
    pub sheets: Vec<usize>,
}

/// Two sheets meeting over `curve`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gluing {
    pub sheets: (usize, usize),
    pub curve: String,
}

/// Sheets whose closure contains `curve × {0}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Attachment {
    pub curve: String,
    pub sheets: Vec<usize>,
}

#[derive(Clone, Debug)]
enum Layout {
    Sectors(real::SectorLayout),
    Bidisk { blow_up: bool },
}

#[derive(Clone, Debug)]
pub struct NFModel {
    pub field: Field,
    pub map: PolyMap,
    pub singular: AlgebraicSet,
    /// `("S_F", …)` and `("K_0", …)`.
    pub base_curves: Vec<(String, AlgebraicSet)>,
    pub regions: Vec<Region>,
    /// Region of each sheet; sheet `i` is entry `i − 1`.
    pub sheet_region: Vec<usize>,
    pub gluing: Vec<Gluing>,
    pub attachments: Vec<Attachment>,
    /// Points of the base whose fiber is a curve; their closure in the
    /// model is recorded here.
    pub exceptional: Vec<String>,
    pub radius: f64,
    layout: Layout,
}

impl NFModel {
    pub fn sheet_count(&self) -> usize {
        self.sheet_region.len()
    }

    /// Real dimension of the model.
    pub fn dim(&self) -> usize {
        match self.field {
            Field::Real => 2,
            Field::Complex => 4,
        }
    }

    /// Points of region `id` away from the curves, for spot checks of the
    /// sheet count.
    pub fn interior_samples(&self, id: usize, count: usize, seed: u64) -> Vec<Vec<GaussianRational>> {
        let mut rng = rng_for(seed, "nf-samples");
        let region = &self.regions[id - 1];
        match &self.layout {
            Layout::Sectors(layout) => {
                let g = self.geometry().expect("real models keep their geometry");
                let sectors: Vec<usize> = (0..layout.sector_count()).filter(|&s| layout.region(s) == id).collect();
                (0..count)
                    .map(|_| {
                        let s = sectors[rng.gen_range(0..sectors.len())];
                        let p = g.sector_point(s, self.radius * rng.gen_range(0.1..0.9), rng.gen_range(0.1..0.9));
                        p.iter().map(|&v| GaussianRational::from_ratio((v * 256.0).round() as i64, 256)).collect()
                    })
                    .collect()
            }
            Layout::Bidisk { .. } => {
                let base = region.sample[0].clone();
                (0..count)
                    .map(|_| {
                        let d = GaussianRational::from_parts(rng.gen_range(1..=9), 4, rng.gen_range(-9..=9), 4);
                        let b = GaussianRational::from_parts(rng.gen_range(-9..=9), 4, rng.gen_range(-9..=9), 4);
                        vec![&base + &d, b]
                    })
                    .collect()
            }
        }
    }

    fn geometry(&self) -> Result<real::Geometry, ModelError> {
        real_setup(&self.base_curves, Some(self.radius)).map(|s| s.0)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "field": format!("{:?}", self.field).to_lowercase(),
            "map": self.map.to_string(),
            "singular_locus": self.singular.to_json(),
            "base_curves": self.base_curves.iter().map(|(n, s)| json!({"name": n, "set": s.to_json()})).collect::<Vec<_>>(),
            "regions": self.regions.iter().map(|r| json!({
                "id": r.id,
                "conditions": r.conditions,
                "sample": r.sample.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                "sheet_count": r.sheet_count,
                "sheets": r.sheets,
            })).collect::<Vec<_>>(),
            "sheets": self.sheet_count(),
            "gluing": self.gluing.iter().map(|g| json!({"sheets": [g.sheets.0, g.sheets.1], "curve": g.curve})).collect::<Vec<_>>(),
            "attachments": self.attachments.iter().map(|a| json!({"curve": a.curve, "sheets": a.sheets})).collect::<Vec<_>>(),
            "exceptional": self.exceptional,
            "radius": self.radius,
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "map: {}", self.map);
        let _ = writeln!(s, "Sing F: {}", self.singular.describe());
        for (name, set) in &self.base_curves {
            let _ = writeln!(s, "{name}: {}", set.describe());
        }
        for r in &self.regions {
            let cond = if r.conditions.is_empty() { "everything else".to_string() } else { r.conditions.join(" and ") };
            let _ = writeln!(s, "region {}: {cond}; {} sheet(s) {:?}", r.id, r.sheet_count, r.sheets);
        }
        let _ = writeln!(s, "sheets: {}", self.sheet_count());
        for g in &self.gluing {
            let _ = writeln!(s, "glued: {}-{} along {}", g.sheets.0, g.sheets.1, g.curve);
        }
        for a in &self.attachments {
            let _ = writeln!(s, "attached to {}: {:?}", a.curve, a.sheets);
        }
        for e in &self.exceptional {
            let _ = writeln!(s, "exceptional: {e}");
        }
        s
    }
}

fn real_value(c: &GaussianRational) -> Result<f64, ModelError> {
    if !c.is_real() {
        return Err(ModelError::Unsupported("curve coefficients must be real".into()));
    }
    Ok(c.to_complex().re)
}

fn max_coeff(p: &MultiPoly) -> f64 {
    let lead = p.leading_term().map_or(1.0, |(_, c)| c.to_complex().norm());
    p.terms().values().map(|c| c.to_complex().norm() / lead).fold(0.0, f64::max)
}

/// Junction geometry for the real family, from the computed `S_F` and `K_0`.
fn real_setup(
    curves: &[(String, AlgebraicSet)],
    radius: Option<f64>,
) -> Result<(real::Geometry, real::Conditions), ModelError> {
    let (sf, k0) = (&curves[0].1, &curves[1].1);
    let comps = |s: &AlgebraicSet| if s.is_empty() { Vec::new() } else { s.components() };
    let (sf_comps, k0_comps) = (comps(sf), comps(k0));
    if sf_comps.len() > 1 || k0_comps.len() > 1 {
        return Err(ModelError::Unsupported("more than one curve component in S_F or K_0".into()));
    }
    let mut bound: f64 = 0.0;
    let vertical = match sf_comps.first() {
        Some(v) if v.degree() == 1 && v.degree_in(1) == 0 => {
            bound = bound.max(max_coeff(v));
            Some(v.clone())
        }
        Some(v) => return Err(ModelError::Unsupported(format!("S_F component {v} is not a vertical line"))),
        None => None,
    };
    let a0 = match &vertical {
        Some(v) => -real_value(&v.constant_term())? / real_value(&v.lc_in(0).constant_term())?,
        None => 0.0,
    };
    let (graph, kappa) = match k0_comps.first() {
        Some(g) if g.degree_in(1) == 1 && g.lc_in(1).is_constant() => {
            let lc = real_value(&g.lc_in(1).constant_term())?;
            let rest = g.coeffs_in(1)[0].clone();
            let d = rest.degree_in(0).max(0) as usize;
            let mut kappa = vec![0.0; d + 1];
            for (e, c) in rest.terms() {
                kappa[e[0] as usize] = -real_value(c)? / lc;
            }
            bound = bound.max(max_coeff(g));
            let oriented = g.scale(&GaussianRational::from_int(lc.signum() as i64));
            (Some(oriented), Some(kappa))
        }
        Some(g) => return Err(ModelError::Unsupported(format!("K_0 component {g} is not a graph over alpha"))),
        None => (None, None),
    };
    let qb = kappa.as_ref().map_or(0.0, |k| k.iter().rev().fold(0.0, |acc, &c| acc * a0 + c));
    let q = [a0, qb];
    bound = bound.max(a0.abs()).max(qb.abs());
    let radius = radius.unwrap_or(2.0 * (1.0 + bound));
    let on_sf = |dir: real::Dir| -> Result<bool, ModelError> {
        if vertical.is_none() {
            return Ok(false);
        }
        let verdicts: Vec<bool> = [0.25, 0.5, 0.75]
            .iter()
            .map(|t| {
                let b = if dir == real::Dir::Up { qb + t * radius } else { qb - t * radius };
                let p = [Complex64::new(a0, 0.0), Complex64::new(b, 0.0)];
                sf.sign_conditions.iter().all(|c| c.poly.eval_complex(&p).re >= 0.0)
            })
            .collect();
        if verdicts.iter().any(|&v| v != verdicts[0]) {
            return Err(ModelError::Unsupported("S_F changes sign along a vertical ray".into()));
        }
        Ok(verdicts[0])
    };
    let vertical_ray = |dir| -> Result<real::Ray, ModelError> {
        Ok(real::Ray { dir, curve: if on_sf(dir)? { "S_F" } else { "free" } })
    };
    let rays = if kappa.is_some() {
        vec![
            real::Ray { dir: real::Dir::Graph(1), curve: "K_0" },
            vertical_ray(real::Dir::Up)?,
            real::Ray { dir: real::Dir::Graph(-1), curve: "K_0" },
            vertical_ray(real::Dir::Down)?,
        ]
    } else {
        vec![vertical_ray(real::Dir::Down)?, vertical_ray(real::Dir::Up)?]
    };
    Ok((real::Geometry { q, kappa, radius, rays }, real::Conditions { vertical, graph }))
}

fn real_model(f: &PolyMap, params: &ModelParams) -> Result<NFModel, ModelError> {
    let g = f.component(1);
    let d = g.degree_in(1);
    let linear_ok = d == 1 && g.lc_in(1).is_constant();
    if !(f.is_real() && *f.component(0) == MultiPoly::var(f.vars(), 0) && (d == 2 || linear_ok)) {
        return Err(ModelError::Unsupported(
            "the real model needs F = (x, G) with G real and quadratic in y, or linear with constant coefficient".into(),
        ));
    }
    let tv = target_vars();
    let search = SearchParams::with_seed(params.seed);
    let sf = if d == 2 { real_jelonek_set(f, &search)? } else { AlgebraicSet::empty(&tv) };
    let k0 = critical_values(f, params.seed)?;
    let curves = vec![("S_F".to_string(), sf), ("K_0".to_string(), k0)];
    let (geom, conds) = real_setup(&curves, params.radius)?;
    let fiber = real::Fiber::new(g);
    let count_at = |p: &[GaussianRational]| Ok(fiber_count(f, p, FiberMode::Real, params.seed)?);
    let built = real::build(&geom, &fiber, &conds, count_at)?;
    Ok(NFModel {
        field: Field::Real,
        map: f.clone(),
        singular: singular_locus(f),
        base_curves: curves,
        regions: built.regions,
        sheet_region: built.sheet_region,
        gluing: built.gluing,
        attachments: built.attachments,
        exceptional: Vec::new(),
        radius: geom.radius,
        layout: Layout::Sectors(built.layout),
    })
}

fn complex_model(f: &PolyMap, params: &ModelParams) -> Result<NFModel, ModelError> {
    let unsupported = || {
        ModelError::Unsupported("the complex model needs F = (x, A(x)·y + c(x)) with A nonzero of degree at most 1".into())
    };
    if f.n() != 2 || *f.component(0) != MultiPoly::var(f.vars(), 0) || f.component(1).degree_in(1) != 1 {
        return Err(unsupported());
    }
    let coeffs = f.component(1).coeffs_in(1);
    let (c, a) = (&coeffs[0], &coeffs[1]);
    if a.degree_in(0) > 1 {
        return Err(unsupported());
    }
    let tv = target_vars();
    let search = SearchParams::with_seed(params.seed);
    let sf = jelonek_set(f, &search)?;
    let k0 = critical_values(f, params.seed)?;
    let root = if a.degree_in(0) == 1 {
        let ac = a.coeffs_in(0);
        Some(-&(&ac[0].constant_term() / &ac[1].constant_term()))
    } else {
        None
    };
    let mut regions = Vec::new();
    let mut exceptional = Vec::new();
    let mut attachments = Vec::new();
    let zero = GaussianRational::from_int(0);
    let base = root.clone().unwrap_or_else(|| zero.clone());
    // Consistency with the computed curves: S_F is the line α = a and K_0 the point over it.
    match &root {
        Some(r) => {
            let line = &MultiPoly::var(&tv, 0) - &MultiPoly::constant(&tv, r.clone());
            let expected = AlgebraicSet::hypersurface(&tv, std::slice::from_ref(&line));
            if sf.generators != expected.generators {
                return Err(ModelError::Unsupported(format!("S_F is {}, not the line {line} = 0", sf.describe())));
            }
            let b = c.evaluate(&[r.clone(), zero.clone()])?;
            if !k0.contains_exact(&[r.clone(), b.clone()])? {
                return Err(ModelError::Unsupported("K_0 misses the point over the line".into()));
            }
            attachments.push(Attachment { curve: "S_F".into(), sheets: vec![1] });
            exceptional.push(format!(
                "fiber over ({r}, {b}) is the line x = {r}; its closure meets S_F x {{0}} in one point and is a 2-sphere"
            ));
            regions.push(Region {
                id: 1,
                conditions: vec![format!("{line} != 0")],
                sample: vec![&base + &GaussianRational::from_int(1), GaussianRational::from_ratio(1, 3)],
                sheet_count: 0,
                sheets: vec![1],
            });
        }
        None => {
            if !sf.is_empty() || !k0.is_empty() {
                return Err(unsupported());
            }
            regions.push(Region {
                id: 1,
                conditions: Vec::new(),
                sample: vec![GaussianRational::from_int(1), GaussianRational::from_ratio(1, 3)],
                sheet_count: 0,
                sheets: vec![1],
            });
        }
    }
    let count = fiber_count(f, &regions[0].sample, FiberMode::Complex, params.seed)?;
    if count != 1 {
        return Err(ModelError::Tracking(format!("expected one sheet, fiber count is {count}")));
    }
    regions[0].sheet_count = count;
    let bound = [a, c].iter().map(|p| max_coeff(p)).fold(base.to_complex().norm(), f64::max);
    Ok(NFModel {
        field: Field::Complex,
        map: f.clone(),
        singular: singular_locus(f),
        base_curves: vec![("S_F".into(), sf), ("K_0".into(), k0)],
        regions,
        sheet_region: vec![1],
        gluing: Vec::new(),
        attachments,
        exceptional,
        radius: params.radius.unwrap_or(2.0 * (1.0 + bound)),
        layout: Layout::Bidisk { blow_up: root.is_some() },
    })
}

/// Build the model of `N_F` over the given field.
pub fn build_nf_model(f: &PolyMap, field: Field, params: &ModelParams) -> Result<NFModel, ModelError> {
    if f.n() != 2 {
        return Err(AsymptoticError::Dimension(f.n()).into());
    }
    match field {
        Field::Real => real_model(f, params),
        Field::Complex => complex_model(f, params),
    }
}

/// Top cells of a triangulated model with their image: `(region, base
/// cell, sheet)`. Base cells are numbered per model.
pub type Projection = Vec<(usize, usize, usize)>;

/// The compact model `N_F ∩ B̄(0, R)` with its filtration and the boundary
/// at the cutoff marked.
pub fn triangulate_model(model: &NFModel) -> Result<FilteredComplex, ModelError> {
    triangulate_with_projection(model).map(|(k, _)| k)
}

pub fn triangulate_with_projection(model: &NFModel) -> Result<(FilteredComplex, Projection), ModelError> {
    match &model.layout {
        Layout::Sectors(layout) => real::triangulate(layout),
        Layout::Bidisk { blow_up } => {
            let k = blowup::model_complex(*blow_up)?;
            let proj = (0..k.count(4)).map(|j| (1, j, 1)).collect();
            Ok((k, proj))
        }
    }
}

/// `F(x, y) = (x, x²y(y + 2))` over the reals with its model and triangulation.
pub fn example_3_2() -> (PolyMap, NFModel, FilteredComplex) {
    let f = PolyMap::parse(&["x", "x^2*y*(y+2)"], &["x", "y"]).expect("fixed map parses");
    let model = build_nf_model(&f, Field::Real, &ModelParams::with_seed(0)).expect("built-in example builds");
    let k = triangulate_model(&model).expect("built-in example triangulates");
    (f, model, k)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Consistency {
    Consistent,
    Inconsistent,
    /// Outside the hypotheses of the equivalence theorem.
    Informational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceReport {
    pub properness: Verdict,
    /// `None` when the harness ran on a hand-built complex.
    pub jacobian_constant: Option<bool>,
    pub rank_hypothesis: Option<bool>,
    pub model_dim: usize,
    /// Ordinary homology of the model.
    pub homology: Vec<usize>,
    /// `(perversity, IH_2)` on the closed model.
    pub ih2: Vec<(String, usize)>,
    /// `(perversity, IH_2)` relative to the cutoff boundary.
    pub ih2_relative: Vec<(String, usize)>,
    pub consistency: Consistency,
    pub note: String,
}

impl EquivalenceReport {
    pub fn h2(&self) -> usize {
        self.homology.get(2).copied().unwrap_or(0)
    }

    pub fn is_consistent(&self) -> bool {
        self.consistency != Consistency::Inconsistent
    }

    pub fn to_json(&self) -> Value {
        let pairs = |v: &[(String, usize)]| v.iter().map(|(p, b)| json!({"perversity": p, "betti": b})).collect::<Vec<_>>();
        json!({
            "properness": self.properness.to_string(),
            "jacobian_constant": self.jacobian_constant,
            "rank_hypothesis": self.rank_hypothesis,
            "model_dimension": self.model_dim,
            "homology": self.homology,
            "h2": self.h2(),
            "ih2": pairs(&self.ih2),
            "ih2_relative": pairs(&self.ih2_relative),
            "consistency": format!("{:?}", self.consistency).to_lowercase(),
            "note": self.note,
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "properness: {}", self.properness);
        let show = |b: Option<bool>| b.map_or("n/a".to_string(), |b| b.to_string());
        let _ = writeln!(s, "constant nonzero Jacobian: {}", show(self.jacobian_constant));
        let _ = writeln!(s, "leading rank hypothesis: {}", show(self.rank_hypothesis));
        let _ = writeln!(s, "model dimension: {}", self.model_dim);
        let _ = writeln!(s, "homology: {:?}", self.homology);
        for ((p, b), (_, r)) in self.ih2.iter().zip(&self.ih2_relative) {
            let _ = writeln!(s, "IH_2^{p} = {b}   relative IH_2^{p} = {r}");
        }
        let _ = writeln!(s, "consistency: {:?}", self.consistency);
        let _ = writeln!(s, "note: {}", self.note);
        s
    }
}

/// Homological half of the harness, for any filtered complex.
pub fn homological_numbers(
    k: &FilteredComplex,
    kinds: &[PerversityKind],
) -> Result<(Vec<usize>, Vec<(String, usize)>, Vec<(String, usize)>), ModelError> {
    let h = homology(k, Variant::Closed)?;
    let mut closed = Vec::new();
    let mut relative = Vec::new();
    for kind in kinds {
        let p = make_perversity(kind, k.m())?;
        let at2 = |v: Vec<usize>| v.get(2).copied().unwrap_or(0);
        closed.push((p.to_string(), at2(ih_betti(k, &p, Variant::Closed)?.betti)));
        let rel = if k.has_boundary() { at2(ih_betti(k, &p, Variant::Relative)?.betti) } else { 0 };
        relative.push((p.to_string(), rel));
    }
    Ok((h, closed, relative))
}

/// Decide consistency from the stored numbers alone.
fn judge(properness: Verdict, hypotheses: Option<bool>, h2: usize, ih2: &[(String, usize)]) -> (Consistency, String) {
    let vanish = h2 == 0 && ih2.iter().all(|(_, b)| *b == 0);
    match (properness, hypotheses) {
        (Verdict::Proper, _) if vanish => (Consistency::Consistent, "proper: H_2 and IH_2 vanish".into()),
        (Verdict::Proper, _) => (Consistency::Inconsistent, "proper map with nonzero H_2 or IH_2".into()),
        (Verdict::NonProper, Some(true)) if ih2.iter().all(|(_, b)| *b > 0) => {
            (Consistency::Consistent, "non-proper under the theorem hypotheses: IH_2 is nonzero".into())
        }
        (Verdict::NonProper, Some(true)) => {
            (Consistency::Inconsistent, "non-proper under the theorem hypotheses but IH_2 vanishes".into())
        }
        (Verdict::NonProper, _) => (
            Consistency::Informational,
            "outside theorem hypotheses (the Jacobian is not a nonzero constant); numbers reported without a verdict".into(),
        ),
        (Verdict::Unknown, _) => (Consistency::Informational, "properness undecided; numbers reported without a verdict".into()),
    }
}

/// Run properness, the leading-rank hypothesis and the homology of the
/// model, and check the implications that can be checked at this scale.
pub fn equivalence_harness(
    f: &PolyMap,
    field: Field,
    params: &ModelParams,
    kinds: &[PerversityKind],
) -> Result<EquivalenceReport, ModelError> {
    let model = build_nf_model(f, field, params)?;
    let k = triangulate_model(&model)?;
    let prop = properness_test(f, &SearchParams::with_seed(params.seed));
    let jac = jacobian_det(f);
    let jacobian_constant = jac.is_constant() && !jac.is_zero();
    let rank = leading_rank(f, 8, params.seed).map_err(AsymptoticError::from)?;
    let (homology, ih2, ih2_relative) = homological_numbers(&k, kinds)?;
    let hypotheses = field == Field::Complex && jacobian_constant && rank.condition;
    let h2 = homology.get(2).copied().unwrap_or(0);
    let (consistency, note) = judge(prop.verdict, Some(hypotheses), h2, &ih2);
    Ok(EquivalenceReport {
        properness: prop.verdict,
        jacobian_constant: Some(jacobian_constant),
        rank_hypothesis: Some(rank.condition),
        model_dim: k.m(),
        homology,
        ih2,
        ih2_relative,
        consistency,
        note,
    })
}

/// The harness on a hand-built complex with a stated properness verdict.
pub fn equivalence_harness_on_complex(
    k: &FilteredComplex,
    properness: Verdict,
    kinds: &[PerversityKind],
) -> Result<EquivalenceReport, ModelError> {
    let (homology, ih2, ih2_relative) = homological_numbers(k, kinds)?;
    let h2 = homology.get(2).copied().unwrap_or(0);
    let (consistency, note) = judge(properness, None, h2, &ih2);
    Ok(EquivalenceReport {
        properness,
        jacobian_constant: None,
        rank_hypothesis: None,
        model_dim: k.m(),
        homology,
        ih2,
        ih2_relative,
        consistency,
        note,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ih::{corpus, validate_pseudomanifold};
    use std::collections::HashMap;

    fn map(exprs: &[&str]) -> PolyMap {
        PolyMap::parse(exprs, &["x", "y"]).unwrap()
    }

    fn all_kinds() -> Vec<PerversityKind> {
        vec![PerversityKind::Zero, PerversityKind::LowerMiddle, PerversityKind::UpperMiddle, PerversityKind::Max]
    }

    #[test]
    fn example_sets_sheets_and_gluing() {
        let (_, m, k) = example_3_2();
        assert_eq!(m.singular.describe(), "x = 0 or y + 1 = 0");
        assert_eq!(m.base_curves[0].1.describe(), "alpha = 0, beta >= 0");
        assert_eq!(m.base_curves[1].1.describe(), "alpha^2 + beta = 0");
        assert_eq!(m.sheet_count(), 4);
        let counts: Vec<usize> = m.regions.iter().map(|r| r.sheet_count).collect();
        assert_eq!(counts, vec![2, 2, 0]);
        let pairs: Vec<(usize, usize)> = m.gluing.iter().map(|g| g.sheets).collect();
        assert_eq!(pairs, vec![(1, 2), (3, 4)]);
        assert!(m.attachments.iter().any(|a| a.curve == "S_F" && a.sheets == vec![1, 2, 3, 4]));
        let report = validate_pseudomanifold(&k);
        assert!(!report.is_pseudomanifold);
        assert_eq!(report.codim, Some(1));
        assert!(!report.codim1_failures.is_empty());
        assert_eq!(homology(&k, Variant::Closed).unwrap(), vec![1, 0, 0]);
    }

    #[test]
    fn sheet_counts_hold_across_each_region() {
        let (f, m, _) = example_3_2();
        for r in &m.regions {
            for p in m.interior_samples(r.id, 10, 7) {
                assert_eq!(fiber_count(&f, &p, FiberMode::Real, 0).unwrap(), r.sheet_count, "region {}", r.id);
            }
        }
    }

    #[test]
    fn projection_is_a_covering_off_the_curves() {
        let (_, m, _) = example_3_2();
        let (k, proj) = triangulate_with_projection(&m).unwrap();
        assert_eq!(proj.len(), k.count(2));
        let mut over: HashMap<usize, (usize, Vec<usize>)> = HashMap::new();
        for &(region, cell, sheet) in &proj {
            let e = over.entry(cell).or_insert((region, Vec::new()));
            assert_eq!(e.0, region);
            e.1.push(sheet);
        }
        for (region, sheets) in over.values() {
            let mut distinct = sheets.clone();
            distinct.dedup();
            assert_eq!(distinct.len(), sheets.len());
            assert_eq!(sheets.len(), m.regions[region - 1].sheet_count);
        }
    }

    #[test]
    fn real_automorphism_is_a_disk() {
        let f = map(&["x", "y + x^2"]);
        let m = build_nf_model(&f, Field::Real, &ModelParams::with_seed(0)).unwrap();
        assert_eq!(m.regions.len(), 1);
        assert_eq!(m.sheet_count(), 1);
        assert!(m.gluing.is_empty() && m.attachments.is_empty());
        let k = triangulate_model(&m).unwrap();
        assert_eq!(homology(&k, Variant::Closed).unwrap(), vec![1, 0, 0]);
        assert_eq!(homology(&k, Variant::Relative).unwrap(), vec![0, 0, 1]);
        assert!((0..=2).all(|d| k.cells(d).iter().all(|c| c.level == 2)));
    }

    #[test]
    fn model_of_x_xy_is_a_blow_up() {
        let f = map(&["x", "x*y"]);
        let m = build_nf_model(&f, Field::Complex, &ModelParams::with_seed(0)).unwrap();
        assert_eq!(m.regions[0].sheet_count, 1);
        assert_eq!(m.regions[0].conditions, vec!["alpha != 0".to_string()]);
        assert_eq!(m.attachments, vec![Attachment { curve: "S_F".into(), sheets: vec![1] }]);
        assert_eq!(m.exceptional.len(), 1);
        let k = triangulate_model(&m).unwrap();
        assert_eq!(k.m(), 4);
        assert_eq!(homology(&k, Variant::Closed).unwrap(), vec![1, 0, 1, 0, 0]);
    }

    #[test]
    fn harness_on_x_xy_is_informational() {
        let f = map(&["x", "x*y"]);
        let r = equivalence_harness(&f, Field::Complex, &ModelParams::with_seed(0), &all_kinds()).unwrap();
        assert_eq!(r.properness, Verdict::NonProper);
        assert_eq!(r.jacobian_constant, Some(false));
        assert_eq!(r.h2(), 1);
        assert!(r.ih2.iter().all(|(_, b)| *b == 1));
        assert!(r.ih2_relative.iter().all(|(_, b)| *b == 1));
        assert_eq!(r.consistency, Consistency::Informational);
        assert!(r.note.contains("outside theorem hypotheses"));
    }

    #[test]
    fn harness_on_automorphisms_is_consistent() {
        let f = map(&["x", "y + x^2"]);
        for field in [Field::Real, Field::Complex] {
            let r = equivalence_harness(&f, field, &ModelParams::with_seed(0), &all_kinds()).unwrap();
            assert_eq!(r.properness, Verdict::Proper);
            assert_eq!(r.h2(), 0);
            assert!(r.ih2.iter().all(|(_, b)| *b == 0));
            assert_eq!(r.consistency, Consistency::Consistent);
        }
    }

    #[test]
    fn harness_on_example_is_informational() {
        let (f, _, _) = example_3_2();
        let r = equivalence_harness(&f, Field::Real, &ModelParams::with_seed(0), &[PerversityKind::Zero]).unwrap();
        assert_eq!(r.properness, Verdict::NonProper);
        assert_eq!(r.consistency, Consistency::Informational);
        assert!(r.note.contains("outside theorem hypotheses"));
    }

    #[test]
    fn hand_built_complex_contradicting_properness_is_flagged() {
        let r = equivalence_harness_on_complex(&corpus::sphere(), Verdict::Proper, &[PerversityKind::Zero]).unwrap();
        assert_eq!(r.consistency, Consistency::Inconsistent);
        let r = equivalence_harness_on_complex(&corpus::disk(), Verdict::Proper, &[PerversityKind::Zero]).unwrap();
        assert_eq!(r.consistency, Consistency::Consistent);
    }

    #[test]
    fn unsupported_maps_are_rejected() {
        let params = ModelParams::with_seed(0);
        let err = build_nf_model(&map(&["x^2", "y"]), Field::Real, &params).unwrap_err();
        assert!(matches!(err, ModelError::Unsupported(_)));
        let err = build_nf_model(&map(&["x", "x^2*y"]), Field::Complex, &params).unwrap_err();
        assert!(matches!(err, ModelError::Unsupported(_)));
        let err = build_nf_model(&map(&["x", "y^3 + x*y"]), Field::Real, &params).unwrap_err();
        assert!(matches!(err, ModelError::Unsupported(_)));
    }

    #[test]
    fn json_dump_lists_regions_and_gluing() {
        let (_, m, _) = example_3_2();
        let v = m.to_json();
        assert_eq!(v["sheets"], 4);
        assert_eq!(v["regions"].as_array().unwrap().len(), 3);
        assert_eq!(v["gluing"][0]["sheets"], serde_json::json!([1, 2]));
    }
}
