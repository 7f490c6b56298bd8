//! Sector model of the real variety for maps `(x, G(x, y))`.
//!
//! The base disk around the junction point `Q` is cut by at most four rays:
//! the two branches of the critical-value graph `β = κ(α)` and the vertical
//! half-lines above and below `Q`. Sheets over each sector are the real
//! roots of `G(α, y) = β`; how they end on a ray is found by continuation.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::f64::consts::PI;

use num_complex::Complex64;

use super::{Attachment, Gluing, ModelError, Region, UnionFind};
use crate::ih::FilteredComplex;
use crate::numeric::poly_roots;
use crate::poly::{GaussianRational, MultiPoly};

/// Continuation step in the path parameter.
pub const TRACK_STEP: f64 = 1e-2;
/// Newton residual tolerance, relative to the size of the terms.
pub const TRACK_TOL: f64 = 1e-6;
/// Angular approach offsets, as fractions of the sector width.
const APPROACH: [f64; 3] = [1e-2, 1e-4, 1e-6];
/// Ray sample radii, as fractions of the model radius.
const RAY_SAMPLES: [f64; 3] = [0.25, 0.5, 0.75];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(super) enum Dir {
    Up,
    Down,
    /// Branch of the graph to the right (`+1`) or left (`-1`) of `Q`.
    Graph(i8),
}

#[derive(Clone, Debug)]
pub(super) struct Ray {
    pub dir: Dir,
    /// `"K_0"`, `"S_F"` or `"free"`.
    pub curve: &'static str,
}

pub(super) struct Geometry {
    pub q: [f64; 2],
    /// Coefficients of `κ`, lowest degree first.
    pub kappa: Option<Vec<f64>>,
    pub radius: f64,
    pub rays: Vec<Ray>,
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &v| acc * x + v)
}

impl Geometry {
    fn ray_point(&self, dir: Dir, rho: f64) -> [f64; 2] {
        let [a, b] = self.q;
        match dir {
            Dir::Up => [a, b + rho],
            Dir::Down => [a, b - rho],
            Dir::Graph(s) => {
                let k = self.kappa.as_ref().expect("graph rays need κ");
                let at = |t: f64| [a + s as f64 * t, horner(k, a + s as f64 * t)];
                let dist = |t: f64| {
                    let p = at(t);
                    (p[0] - a).hypot(p[1] - b)
                };
                let (mut lo, mut hi) = (0.0, rho);
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    if dist(mid) < rho {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                at(0.5 * (lo + hi))
            }
        }
    }

    fn angle(&self, dir: Dir, rho: f64) -> f64 {
        let p = self.ray_point(dir, rho);
        (p[1] - self.q[1]).atan2(p[0] - self.q[0])
    }

    /// Angular interval of sector `s` at radius `rho`.
    fn span(&self, s: usize, rho: f64) -> (f64, f64) {
        let n = self.rays.len();
        let t0 = self.angle(self.rays[s].dir, rho);
        let mut t1 = self.angle(self.rays[(s + 1) % n].dir, rho);
        while t1 <= t0 {
            t1 += 2.0 * PI;
        }
        (t0, t1)
    }

    pub fn sector_point(&self, s: usize, rho: f64, frac: f64) -> [f64; 2] {
        let (t0, t1) = self.span(s, rho);
        let t = t0 + frac * (t1 - t0);
        [self.q[0] + rho * t.cos(), self.q[1] + rho * t.sin()]
    }

    /// The rays must keep their cyclic order at every radius used.
    fn check_order(&self) -> Result<(), ModelError> {
        let n = self.rays.len();
        for k in 1..=20 {
            let rho = self.radius * k as f64 / 20.0;
            let t0 = self.angle(self.rays[0].dir, rho);
            let mut prev = t0;
            for r in 1..=n {
                let mut t = if r == n { t0 + 2.0 * PI } else { self.angle(self.rays[r].dir, rho) };
                while t <= prev {
                    t += 2.0 * PI;
                }
                if t - prev < 1e-9 || t - t0 > 2.0 * PI + 1e-12 {
                    return Err(ModelError::Degenerate(format!("sector {} has empty interior at radius {rho}", r - 1)));
                }
                prev = t;
            }
        }
        Ok(())
    }
}

/// Real roots in `y` of `G(α, y) − β`.
pub(super) struct Fiber {
    coeffs: Vec<MultiPoly>,
}

impl Fiber {
    pub fn new(g: &MultiPoly) -> Self {
        Fiber { coeffs: g.coeffs_in(1) }
    }

    fn at(&self, alpha: f64, beta: f64) -> Vec<f64> {
        let p = [Complex64::new(alpha, 0.0), Complex64::new(0.0, 0.0)];
        let mut c: Vec<f64> = self.coeffs.iter().map(|k| k.eval_complex(&p).re).collect();
        c[0] -= beta;
        c
    }

    pub fn roots(&self, alpha: f64, beta: f64) -> Vec<f64> {
        let c: Vec<Complex64> = self.at(alpha, beta).into_iter().map(|v| Complex64::new(v, 0.0)).collect();
        let mut r: Vec<f64> = poly_roots(&c).into_iter().filter(|z| z.im.abs() <= 1e-7 * (1.0 + z.re.abs())).map(|z| z.re).collect();
        r.sort_by(f64::total_cmp);
        r
    }

    fn newton(&self, c: &[f64], mut y: f64) -> Option<f64> {
        for _ in 0..12 {
            let (mut v, mut dv, mut scale) = (0.0, 0.0, 0.0);
            for (k, &ck) in c.iter().enumerate().rev() {
                dv = dv * y + v;
                v = v * y + ck;
                scale += ck.abs() * y.abs().powi(k as i32);
            }
            if v.abs() <= TRACK_TOL * scale.max(f64::MIN_POSITIVE) {
                return Some(y);
            }
            if dv == 0.0 {
                return None;
            }
            y -= v / dv;
        }
        None
    }

    /// |∂G/∂y| at `(α, y)` relative to the size of its terms.
    fn slope(&self, alpha: f64, y: f64) -> f64 {
        let c = self.at(alpha, 0.0);
        let (mut d, mut scale) = (0.0, 1.0);
        for (k, &ck) in c.iter().enumerate().skip(1) {
            d += k as f64 * ck * y.powi(k as i32 - 1);
            scale += (k as f64 * ck * y.powi(k as i32 - 1)).abs();
        }
        d.abs() / scale
    }

    /// Continue the roots `ys` along `path(0) → path(1)`.
    pub fn track(&self, path: impl Fn(f64) -> [f64; 2], mut ys: Vec<f64>) -> Result<Vec<f64>, ModelError> {
        let (mut s, mut ds) = (0.0, TRACK_STEP);
        while s < 1.0 {
            let next = (s + ds).min(1.0);
            let [a, b] = path(next);
            let c = self.at(a, b);
            let moved: Option<Vec<f64>> = ys.iter().map(|&y| self.newton(&c, y)).collect();
            let ok = moved.as_ref().is_some_and(|m| {
                m.windows(2).all(|w| w[1] > w[0])
                    && m.iter().zip(&ys).enumerate().all(|(i, (new, old))| {
                        let gap = gap_at(&ys, i);
                        (new - old).abs() < 0.5 * gap
                    })
            });
            if ok {
                ys = moved.expect("checked");
                s = next;
                ds = (ds * 2.0).min(TRACK_STEP);
            } else {
                ds *= 0.5;
                if ds < 1e-12 {
                    return Err(ModelError::Tracking(format!("continuation stalled at ({a:.6}, {b:.6})")));
                }
            }
        }
        Ok(ys)
    }
}

fn gap_at(ys: &[f64], i: usize) -> f64 {
    let mut g = f64::INFINITY;
    if i > 0 {
        g = g.min(ys[i] - ys[i - 1]);
    }
    if i + 1 < ys.len() {
        g = g.min(ys[i + 1] - ys[i]);
    }
    if g.is_infinite() {
        1.0 + ys[i].abs()
    } else {
        g
    }
}

#[derive(Clone, Debug, PartialEq)]
enum End {
    Escape,
    /// Merges with the other members of the group (by index) at a double root.
    Merge(usize),
    Critical,
    Regular(f64),
}

impl End {
    fn attached(&self) -> bool {
        !matches!(self, End::Regular(_))
    }

    fn shape(&self) -> End {
        match self {
            End::Regular(_) => End::Regular(0.0),
            e => e.clone(),
        }
    }
}

fn classify(fiber: &Fiber, alpha: f64, runs: &[Vec<f64>; 3]) -> Vec<End> {
    let n = runs[0].len();
    let mut ends: Vec<Option<End>> = vec![None; n];
    for i in 0..n {
        if runs[2][i].abs() >= 20.0 * (1.0 + runs[0][i].abs()) {
            ends[i] = Some(End::Escape);
        }
    }
    let mut group = 0;
    for i in 0..n {
        if ends[i].is_some() {
            continue;
        }
        let y = runs[2][i];
        let mates: Vec<usize> = (i + 1..n)
            .filter(|&j| ends[j].is_none() && (runs[2][j] - y).abs() <= 1e-2 * (1.0 + y.abs()))
            .collect();
        if mates.is_empty() {
            ends[i] = Some(if fiber.slope(alpha, y) <= 1e-4 { End::Critical } else { End::Regular(y) });
        } else {
            for j in std::iter::once(i).chain(mates) {
                ends[j] = Some(End::Merge(group));
            }
            group += 1;
        }
    }
    ends.into_iter().map(|e| e.expect("every sheet classified")).collect()
}

/// How the sheets of one sector end on one of its two rays.
fn sheet_ends(g: &Geometry, fiber: &Fiber, sector: usize, at_start: bool, start: &[f64]) -> Result<Vec<Vec<End>>, ModelError> {
    let rho_s = g.radius / 2.0;
    let mut out = Vec::new();
    for frac in RAY_SAMPLES {
        let rho_b = g.radius * frac;
        let radial = |t: f64| g.sector_point(sector, rho_s + t * (rho_b - rho_s), 0.5);
        let ys = fiber.track(radial, start.to_vec())?;
        let side = |d: f64| if at_start { d } else { 1.0 - d };
        let swing = |t: f64| g.sector_point(sector, rho_b, 0.5 + t * (side(APPROACH[0]) - 0.5));
        let mut runs = vec![fiber.track(swing, ys)?];
        for w in APPROACH.windows(2) {
            let (l0, l1) = (w[0].log10(), w[1].log10());
            let close = |t: f64| g.sector_point(sector, rho_b, side(10f64.powf(l0 + t * (l1 - l0))));
            let next = fiber.track(close, runs.last().expect("nonempty").clone())?;
            runs.push(next);
        }
        let dir = g.rays[if at_start { sector } else { (sector + 1) % g.rays.len() }].dir;
        let alpha = g.ray_point(dir, rho_b)[0];
        let runs: [Vec<f64>; 3] = runs.try_into().expect("three approach offsets");
        out.push(classify(fiber, alpha, &runs));
    }
    let shape: Vec<End> = out[0].iter().map(End::shape).collect();
    if out.iter().any(|o| o.iter().map(End::shape).collect::<Vec<_>>() != shape) {
        return Err(ModelError::Tracking(format!("ray samples disagree on the limits of sector {sector}")));
    }
    Ok(out)
}

/// Regular sheets on both sides of a ray, matched by their common limit.
fn match_across(left: &[Vec<End>], right: &[Vec<End>]) -> Result<Vec<(usize, usize)>, ModelError> {
    let mut pairs: Option<Vec<(usize, usize)>> = None;
    for (l, r) in left.iter().zip(right) {
        let mut here = Vec::new();
        let mut used = vec![false; r.len()];
        for (i, e) in l.iter().enumerate() {
            let End::Regular(y) = e else { continue };
            let hit = r.iter().enumerate().find(|(j, f)| {
                !used[*j] && matches!(f, End::Regular(z) if (y - z).abs() <= 1e-3 * (1.0 + y.abs()))
            });
            let Some((j, _)) = hit else {
                return Err(ModelError::Tracking("a regular sheet has no continuation across a ray".into()));
            };
            used[j] = true;
            here.push((i, j));
        }
        if r.iter().enumerate().any(|(j, f)| matches!(f, End::Regular(_)) && !used[j]) {
            return Err(ModelError::Tracking("a regular sheet has no continuation across a ray".into()));
        }
        match &pairs {
            None => pairs = Some(here),
            Some(p) if *p != here => return Err(ModelError::Tracking("ray samples disagree on sheet matching".into())),
            _ => {}
        }
    }
    Ok(pairs.unwrap_or_default())
}

/// Combinatorial data of the sector model, enough to triangulate it.
#[derive(Clone, Debug)]
pub(super) struct SectorLayout {
    rays: Vec<(Dir, &'static str)>,
    /// Sheets per sector.
    counts: Vec<usize>,
    /// `ends[s]` is `(start ray ends, end ray ends)`, shapes only.
    ends: Vec<(Vec<bool>, Vec<bool>)>,
    /// Regular matches across ray `r`: (sheet in sector `r − 1`, sheet in sector `r`).
    matches: Vec<Vec<(usize, usize)>>,
    /// Sheet component of each (sector, root index).
    component: Vec<Vec<usize>>,
    region_of_sector: Vec<usize>,
}

impl SectorLayout {
    pub fn sector_count(&self) -> usize {
        self.counts.len()
    }

    pub fn region(&self, s: usize) -> usize {
        self.region_of_sector[s]
    }
}

pub(super) struct Built {
    pub layout: SectorLayout,
    pub regions: Vec<Region>,
    pub sheet_region: Vec<usize>,
    pub gluing: Vec<Gluing>,
    pub attachments: Vec<Attachment>,
}

fn exact_sample(p: [f64; 2]) -> Vec<GaussianRational> {
    p.iter().map(|&v| GaussianRational::from_ratio((v * 64.0).round() as i64, 64)).collect()
}

pub(super) struct Conditions {
    /// `α − α₀`, if there is a vertical line.
    pub vertical: Option<MultiPoly>,
    /// `β − κ(α)`, if there is a graph.
    pub graph: Option<MultiPoly>,
}

pub(super) fn build(
    g: &Geometry,
    fiber: &Fiber,
    conds: &Conditions,
    count_at: impl Fn(&[GaussianRational]) -> Result<usize, ModelError>,
) -> Result<Built, ModelError> {
    g.check_order()?;
    let n = g.rays.len();
    let mut samples = Vec::new();
    let mut counts = Vec::new();
    let mut starts = Vec::new();
    for s in 0..n {
        let exact = exact_sample(g.sector_point(s, g.radius / 2.0, 0.5));
        let p: Vec<f64> = exact.iter().map(|v| v.to_complex().re).collect();
        let count = count_at(&exact)?;
        let ys = fiber.roots(p[0], p[1]);
        if ys.len() != count {
            return Err(ModelError::Tracking(format!("sector {s}: {} numeric roots, {count} exact", ys.len())));
        }
        samples.push(exact);
        counts.push(count);
        starts.push(ys);
    }
    let mut raw: Vec<(Vec<Vec<End>>, Vec<Vec<End>>)> = Vec::new();
    for s in 0..n {
        raw.push((sheet_ends(g, fiber, s, true, &starts[s])?, sheet_ends(g, fiber, s, false, &starts[s])?));
    }
    let mut matches = Vec::new();
    for r in 0..n {
        let before = (r + n - 1) % n;
        let (left, right) = (&raw[before].1, &raw[r].0);
        let free = g.rays[r].curve == "free";
        if free && left.iter().chain(right).flatten().any(End::attached) {
            return Err(ModelError::Tracking(format!("sheet limit is singular on the free ray {r}")));
        }
        matches.push(match_across(left, right)?);
    }
    let offset: Vec<usize> = counts.iter().scan(0, |acc, &c| {
        let o = *acc;
        *acc += c;
        Some(o)
    }).collect();
    let total: usize = counts.iter().sum();
    let mut uf = UnionFind::new(total);
    for (r, pairs) in matches.iter().enumerate() {
        let before = (r + n - 1) % n;
        for &(i, j) in pairs {
            uf.union(offset[before] + i, offset[r] + j);
        }
    }
    let mut label = HashMap::new();
    let mut component = Vec::new();
    for s in 0..n {
        component.push(
            (0..counts[s])
                .map(|i| {
                    let root = uf.find(offset[s] + i);
                    let next = label.len() + 1;
                    *label.entry(root).or_insert(next)
                })
                .collect::<Vec<_>>(),
        );
    }
    let mut reg = UnionFind::new(n);
    for r in 0..n {
        if g.rays[r].curve == "free" {
            reg.union((r + n - 1) % n, r);
        }
    }
    let mut reg_label = HashMap::new();
    let region_of_sector: Vec<usize> = (0..n)
        .map(|s| {
            let next = reg_label.len() + 1;
            *reg_label.entry(reg.find(s)).or_insert(next)
        })
        .collect();
    let mut regions = Vec::new();
    for id in 1..=reg_label.len() {
        let sectors: Vec<usize> = (0..n).filter(|&s| region_of_sector[s] == id).collect();
        let c = counts[sectors[0]];
        if sectors.iter().any(|&s| counts[s] != c) {
            return Err(ModelError::Tracking(format!("sheet count varies inside region {id}")));
        }
        let mut sheets: Vec<usize> = sectors.iter().flat_map(|&s| component[s].clone()).collect();
        sheets.sort_unstable();
        sheets.dedup();
        regions.push(Region {
            id,
            conditions: region_conditions(g, conds, &sectors),
            sample: samples[sectors[0]].clone(),
            sheet_count: c,
            sheets,
        });
    }
    let mut sheet_region = vec![0; label.len()];
    for s in 0..n {
        for &c in &component[s] {
            sheet_region[c - 1] = region_of_sector[s];
        }
    }
    let mut gluing = BTreeSet::new();
    let mut attached: BTreeMap<&'static str, BTreeSet<usize>> = BTreeMap::new();
    for s in 0..n {
        for (ray, ends) in [(s, &raw[s].0[0]), ((s + 1) % n, &raw[s].1[0])] {
            let curve = g.rays[ray].curve;
            for (i, e) in ends.iter().enumerate() {
                if e.attached() {
                    attached.entry(curve).or_default().insert(component[s][i]);
                }
                if let End::Merge(grp) = e {
                    let mates: Vec<usize> =
                        ends.iter().enumerate().filter(|(_, f)| **f == End::Merge(*grp)).map(|(j, _)| component[s][j]).collect();
                    for w in mates.windows(2) {
                        gluing.insert((w[0].min(w[1]), w[0].max(w[1]), curve));
                    }
                }
            }
        }
    }
    let layout = SectorLayout {
        rays: g.rays.iter().map(|r| (r.dir, r.curve)).collect(),
        counts,
        ends: raw
            .iter()
            .map(|(a, b)| (a[0].iter().map(End::attached).collect(), b[0].iter().map(End::attached).collect()))
            .collect(),
        matches,
        component,
        region_of_sector,
    };
    Ok(Built {
        layout,
        regions,
        sheet_region,
        gluing: gluing.into_iter().map(|(a, b, c)| Gluing { sheets: (a, b), curve: c.to_string() }).collect(),
        attachments: attached.into_iter().map(|(c, s)| Attachment { curve: c.to_string(), sheets: s.into_iter().collect() }).collect(),
    })
}

fn region_conditions(g: &Geometry, conds: &Conditions, sectors: &[usize]) -> Vec<String> {
    let mut out = Vec::new();
    let probe = |poly: &MultiPoly, s: usize| {
        let p = g.sector_point(s, g.radius / 2.0, 0.5);
        poly.eval_complex(&[Complex64::new(p[0], 0.0), Complex64::new(p[1], 0.0)]).re.signum()
    };
    for poly in [&conds.vertical, &conds.graph].into_iter().flatten() {
        let signs: BTreeSet<i8> = sectors.iter().map(|&s| probe(poly, s) as i8).collect();
        if signs.len() == 1 {
            let rel = if signs.contains(&1) { ">" } else { "<" };
            out.push(format!("{poly} {rel} 0"));
        }
    }
    out
}

/// Vertex keys are interned in first-use order.
#[derive(Default)]
struct Vertices {
    ids: HashMap<String, usize>,
    level: Vec<usize>,
    rim: Vec<bool>,
}

impl Vertices {
    fn get(&mut self, key: String, level: usize, rim: bool) -> usize {
        let next = self.level.len();
        let id = *self.ids.entry(key).or_insert(next);
        if id == next {
            self.level.push(level);
            self.rim.push(rim);
        }
        id
    }
}

fn ray_vertex(v: &mut Vertices, layout: &SectorLayout, (s, i): (usize, usize), r: usize, attached: bool, pos: &str) -> usize {
    let rim = pos == "out";
    if attached {
        return v.get(format!("r{r}:{pos}"), 1, rim);
    }
    let n = layout.rays.len();
    let before = (r + n - 1) % n;
    // Continuing sheets are keyed by the sheet on the `before` side of the ray.
    let left = if r == s { layout.matches[r].iter().find(|m| m.1 == i).map(|m| m.0) } else { Some(i) };
    let left = left.expect("regular sheets are matched");
    v.get(format!("r{r}:{pos}:{before}.{left}"), 2, rim)
}

/// Each sector sheet is the cone from its own center over the hexagon
/// `Q, r₁ (mid, out), arc, r₂ (out, mid)`. Attached sheets share the ray
/// vertices of the curve; sheets continuing across a ray share vertices
/// with their partner.
pub(super) fn triangulate(layout: &SectorLayout) -> Result<(FilteredComplex, Vec<(usize, usize, usize)>), ModelError> {
    let n = layout.rays.len();
    let total: usize = layout.counts.iter().sum();
    let offset: Vec<usize> = layout.counts.iter().scan(0, |acc, &c| {
        let o = *acc;
        *acc += c;
        Some(o)
    }).collect();
    // Sheets meeting at Q: regular continuations, plus everything attached.
    let mut at_q = UnionFind::new(total + 1);
    let mut attached_rays = BTreeSet::new();
    for s in 0..n {
        for i in 0..layout.counts[s] {
            if layout.ends[s].0[i] {
                at_q.union(offset[s] + i, total);
                attached_rays.insert(s);
            }
            if layout.ends[s].1[i] {
                at_q.union(offset[s] + i, total);
                attached_rays.insert((s + 1) % n);
            }
        }
    }
    for (r, pairs) in layout.matches.iter().enumerate() {
        for &(i, j) in pairs {
            at_q.union(offset[(r + n - 1) % n] + i, offset[r] + j);
        }
    }
    let dirs: BTreeSet<String> = attached_rays.iter().map(|&r| format!("{:?}", layout.rays[r].0)).collect();
    let smooth = |a: &str, b: &str| dirs.len() == 2 && dirs.contains(a) && dirs.contains(b);
    let q_level = if dirs.is_empty() {
        2
    } else if smooth("Up", "Down") || smooth("Graph(1)", "Graph(-1)") {
        1
    } else {
        0
    };
    let root_attached = at_q.find(total);
    let mut v = Vertices::default();
    let mut tops = Vec::new();
    let mut projection = Vec::new();
    for s in 0..n {
        for i in 0..layout.counts[s] {
            let root = at_q.find(offset[s] + i);
            let q = v.get(format!("Q{root}"), if root == root_attached { q_level } else { 2 }, false);
            let r1 = s;
            let r2 = (s + 1) % n;
            let (a1, a2) = (layout.ends[s].0[i], layout.ends[s].1[i]);
            let hex = [
                q,
                ray_vertex(&mut v, layout, (s, i), r1, a1, "mid"),
                ray_vertex(&mut v, layout, (s, i), r1, a1, "out"),
                v.get(format!("arc{s}.{i}"), 2, true),
                ray_vertex(&mut v, layout, (s, i), r2, a2, "out"),
                ray_vertex(&mut v, layout, (s, i), r2, a2, "mid"),
            ];
            let c = v.get(format!("c{s}.{i}"), 2, false);
            for k in 0..6 {
                tops.push(vec![c, hex[k], hex[(k + 1) % 6]]);
                projection.push((layout.region_of_sector[s], s * 6 + k, layout.component[s][i]));
            }
        }
    }
    let levels = v.level;
    let rim = v.rim;
    let level = |simplex: &[usize]| simplex.iter().map(|&x| levels[x]).max().unwrap_or(2);
    let on_rim = |simplex: &[usize]| simplex.iter().all(|&x| rim[x]);
    let k = FilteredComplex::from_simplices(2, &tops, level, Some(&on_rim))?;
    // `from_simplices` orders top cells lexicographically; reorder the projection to match.
    let mut keyed: Vec<(Vec<usize>, (usize, usize, usize))> = tops
        .into_iter()
        .map(|mut t| {
            t.sort_unstable();
            t
        })
        .zip(projection)
        .collect();
    keyed.sort();
    Ok((k, keyed.into_iter().map(|x| x.1).collect()))
}
