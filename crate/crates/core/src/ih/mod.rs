//! Intersection homology of finite filtered cell complexes with rational
//! coefficients.
//!
//! A cell is `(p̄, i)`-allowable when its closure meets each `X_{m−k}` in
//! dimension at most `i − k + p_k`; the dimension is read off the levels of
//! its faces. `IC_i` consists of allowable chains with allowable boundary,
//! and every Betti number is assembled from ranks of submatrices of the
//! boundary maps, so no basis of `IC_i` is ever formed:
//!
//! * `dim IC_i = |A_i| − rk ∂_i[N_{i−1}, A_i]`
//! * `rk ∂|IC_i = rk ∂_i[·, A_i] − rk ∂_i[N_{i−1}, A_i]`
//!
//! where `A` are allowable cells and `N` the non-allowable ones.

mod complex;
pub mod corpus;
mod rank;

use std::collections::VecDeque;
use std::fmt;

use serde_json::{json, Value};
use thiserror::Error;

pub use complex::{Cell, FilteredComplex};
pub use rank::{rank, sub_rank, SparseCol};

use crate::strata::{Perversity, StrataError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IhError {
    #[error("malformed complex: {0}")]
    Malformed(String),
    #[error("bad complex file: {0}")]
    Format(String),
    #[error("inadmissible filtration: {0}")]
    Filtration(String),
    #[error("boundary maps do not compose to zero in dimension {0}")]
    NotAComplex(usize),
    #[error("perversity is for m = {perversity}, complex has dimension {complex}")]
    DimensionMismatch { perversity: usize, complex: usize },
    #[error("relative variant needs a marked boundary subcomplex")]
    NoBoundary,
    #[error("complex is not orientable")]
    NotOrientable,
    #[error("perversities {0} and {1} are not complementary")]
    NotComplementary(String, String),
    #[error(transparent)]
    Perversity(#[from] StrataError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Closed,
    /// `IC(K)/IC(∂K)`, the Borel–Moore surrogate for compact models.
    Relative,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Closed => "closed",
            Variant::Relative => "relative",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IhResult {
    pub perversity: Perversity,
    pub betti: Vec<usize>,
    pub chain_dims: Vec<usize>,
    pub variant: Variant,
}

impl IhResult {
    pub fn to_json(&self) -> Value {
        json!({
            "perversity": self.perversity.values(),
            "variant": self.variant.to_string(),
            "betti": self.betti,
            "chain_dims": self.chain_dims,
        })
    }
}

/// `dims[k − 2] = dim(Y ∩ X_{m−k})` for `k = 2..=m`, negative for empty.
pub fn allowable(dims: &[i64], p: &Perversity, i: usize) -> bool {
    dims.iter().enumerate().all(|(idx, &d)| {
        let k = idx + 2;
        d < 0 || d <= i as i64 - k as i64 + p.p(k)
    })
}

/// Allowability of every cell, indexed by dimension.
pub fn allowable_cells(k: &FilteredComplex, p: &Perversity) -> Result<Vec<Vec<bool>>, IhError> {
    let m = k.m();
    if p.m() != m {
        return Err(IhError::DimensionMismatch { perversity: p.m(), complex: m });
    }
    let best = k.face_level_dims();
    Ok((0..=m)
        .map(|i| {
            best[i]
                .iter()
                .map(|b| {
                    let dims: Vec<i64> = (2..=m).map(|kk| b[m - kk]).collect();
                    allowable(&dims, p, i)
                })
                .collect()
        })
        .collect())
}

/// Dimensions and ranks describing `IC^p̄_*(K)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IcComplex {
    pub allowable: Vec<Vec<bool>>,
    /// `dim IC_i`.
    pub dims: Vec<usize>,
    /// `rank(∂ : IC_i → IC_{i−1})`.
    pub ranks: Vec<usize>,
}

fn ic_from_allowable(k: &FilteredComplex, allowable: Vec<Vec<bool>>) -> IcComplex {
    let m = k.m();
    let mut dims = vec![0; m + 1];
    let mut ranks = vec![0; m + 2];
    for i in 0..=m {
        let a = &allowable[i];
        let na = a.iter().filter(|&&x| x).count();
        if i == 0 {
            dims[0] = na;
            continue;
        }
        let below = &allowable[i - 1];
        let bd = k.boundary(i);
        let r_bad = sub_rank(bd, |j| a[j], |r| !below[r]);
        let r_all = sub_rank(bd, |j| a[j], |_| true);
        dims[i] = na - r_bad;
        ranks[i] = r_all - r_bad;
    }
    IcComplex { allowable, dims, ranks }
}

pub fn intersection_chain_complex(k: &FilteredComplex, p: &Perversity) -> Result<IcComplex, IhError> {
    Ok(ic_from_allowable(k, allowable_cells(k, p)?))
}

fn betti_from(dims: &[usize], ranks: &[usize]) -> Vec<usize> {
    (0..dims.len()).map(|i| dims[i] - ranks[i] - ranks.get(i + 1).copied().unwrap_or(0)).collect()
}

/// Relative dimensions and ranks of `IC(K)/IC(∂K)`.
fn relative_parts(k: &FilteredComplex, ic: &IcComplex) -> (Vec<usize>, Vec<usize>) {
    let m = k.m();
    let on_bd = |d: usize, j: usize| k.cells(d)[j].on_boundary;
    let mut dims = vec![0; m + 1];
    let mut ranks = vec![0; m + 2];
    for i in 0..=m {
        let a = &ic.allowable[i];
        let na = a.iter().filter(|&&x| x).count();
        let nab = (0..a.len()).filter(|&j| a[j] && on_bd(i, j)).count();
        if i == 0 {
            dims[0] = ic.dims[0] - nab;
            continue;
        }
        let below = &ic.allowable[i - 1];
        let bd = k.boundary(i);
        let dim_sub = nab - sub_rank(bd, |j| a[j] && on_bd(i, j), |r| !below[r]);
        dims[i] = ic.dims[i] - dim_sub;
        let into_bd = na - sub_rank(bd, |j| a[j], |r| !(below[r] && on_bd(i - 1, r)));
        ranks[i] = ic.dims[i] - into_bd;
    }
    (dims, ranks)
}

pub fn ih_betti(k: &FilteredComplex, p: &Perversity, variant: Variant) -> Result<IhResult, IhError> {
    let ic = intersection_chain_complex(k, p)?;
    let (dims, ranks) = match variant {
        Variant::Closed => (ic.dims.clone(), ic.ranks.clone()),
        Variant::Relative => {
            if !k.has_boundary() {
                return Err(IhError::NoBoundary);
            }
            relative_parts(k, &ic)
        }
    };
    Ok(IhResult { perversity: p.clone(), betti: betti_from(&dims, &ranks), chain_dims: dims, variant })
}

/// Ordinary rational homology (every cell allowable).
pub fn homology(k: &FilteredComplex, variant: Variant) -> Result<Vec<usize>, IhError> {
    let all: Vec<Vec<bool>> = (0..=k.m()).map(|d| vec![true; k.count(d)]).collect();
    let ic = ic_from_allowable(k, all);
    match variant {
        Variant::Closed => Ok(betti_from(&ic.dims, &ic.ranks)),
        Variant::Relative => {
            if !k.has_boundary() {
                return Err(IhError::NoBoundary);
            }
            let (d, r) = relative_parts(k, &ic);
            Ok(betti_from(&d, &r))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PseudomanifoldReport {
    pub is_pseudomanifold: bool,
    /// Cells at level `< m` or failing the codimension-one check.
    pub singular_cells: Vec<String>,
    pub singular_dim: Option<usize>,
    pub codim: Option<usize>,
    /// Codimension-one cells not bounding exactly two top cells (one on a
    /// marked boundary).
    pub codim1_failures: Vec<String>,
    pub dense: bool,
}

impl PseudomanifoldReport {
    pub fn to_json(&self) -> Value {
        json!({
            "pseudomanifold": self.is_pseudomanifold,
            "singular_cells": self.singular_cells.len(),
            "singular_dim": self.singular_dim,
            "codim": self.codim,
            "codim1_failures": self.codim1_failures,
            "top_cells_dense": self.dense,
        })
    }
}

pub fn validate_pseudomanifold(k: &FilteredComplex) -> PseudomanifoldReport {
    let m = k.m();
    let mut failures = Vec::new();
    if m >= 1 {
        for (j, co) in k.cofaces(m - 1).iter().enumerate() {
            let c = &k.cells(m - 1)[j];
            let ok = co.len() == 2 || (co.len() == 1 && c.on_boundary);
            if !ok {
                failures.push(c.label.clone());
            }
        }
    }
    let mut reached: Vec<Vec<bool>> = (0..=m).map(|d| vec![d == m; k.count(d)]).collect();
    for d in (1..=m).rev() {
        for (j, col) in k.boundary(d).iter().enumerate() {
            if reached[d][j] {
                for &(r, _) in col {
                    reached[d - 1][r] = true;
                }
            }
        }
    }
    let dense = reached.iter().flatten().all(|&x| x);
    let mut singular = Vec::new();
    let mut sdim: Option<usize> = None;
    for d in 0..=m {
        for c in k.cells(d) {
            if c.level < m || (d + 1 == m && failures.contains(&c.label)) {
                singular.push(c.label.clone());
                sdim = Some(sdim.map_or(d, |s| s.max(d)));
            }
        }
    }
    let codim = sdim.map(|s| m - s);
    PseudomanifoldReport {
        is_pseudomanifold: dense && failures.is_empty() && codim.is_none_or(|c| c >= 2),
        singular_cells: singular,
        singular_dim: sdim,
        codim,
        codim1_failures: failures,
        dense,
    }
}

/// Signs on top cells making the top boundary vanish away from the marked
/// boundary, if they exist.
pub fn orientation(k: &FilteredComplex) -> Option<Vec<i64>> {
    let m = k.m();
    let tops = k.count(m);
    let mut sign = vec![0i64; tops];
    let cof = if m >= 1 { k.cofaces(m - 1) } else { Vec::new() };
    let mut adj: Vec<Vec<(usize, i64)>> = vec![Vec::new(); tops];
    for co in &cof {
        let nz: Vec<&(usize, i64)> = co.iter().filter(|e| e.1 != 0).collect();
        if let [a, b] = nz.as_slice() {
            // s_a·c_a + s_b·c_b = 0
            let rel = -(a.1 * b.1).signum();
            adj[a.0].push((b.0, rel));
            adj[b.0].push((a.0, rel));
        }
    }
    for root in 0..tops {
        if sign[root] != 0 {
            continue;
        }
        sign[root] = 1;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &(v, rel) in &adj[u] {
                let want = sign[u] * rel;
                if sign[v] == 0 {
                    sign[v] = want;
                    queue.push_back(v);
                } else if sign[v] != want {
                    return None;
                }
            }
        }
    }
    let mut total = vec![0i64; if m >= 1 { k.count(m - 1) } else { 0 }];
    for (j, col) in k.boundary(m).iter().enumerate() {
        for &(r, v) in col {
            total[r] += sign[j] * v;
        }
    }
    let clean = total.iter().enumerate().all(|(r, &t)| t == 0 || k.cells(m - 1)[r].on_boundary);
    clean.then_some(sign)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualityReport {
    pub pass: bool,
    pub left: IhResult,
    pub right: IhResult,
}

impl DualityReport {
    pub fn to_json(&self) -> Value {
        json!({"pass": self.pass, "left": self.left.to_json(), "right": self.right.to_json()})
    }
}

/// `IH_k^p̄ = IH_{m−k}^q̄` for complementary `p̄, q̄`; with a marked boundary
/// the right-hand side is the relative variant.
pub fn duality_check(k: &FilteredComplex, p: &Perversity, q: &Perversity) -> Result<DualityReport, IhError> {
    if p.complement() != *q {
        return Err(IhError::NotComplementary(p.to_string(), q.to_string()));
    }
    orientation(k).ok_or(IhError::NotOrientable)?;
    let left = ih_betti(k, p, Variant::Closed)?;
    let right = ih_betti(k, q, if k.has_boundary() { Variant::Relative } else { Variant::Closed })?;
    let pass = left.betti.iter().eq(right.betti.iter().rev());
    Ok(DualityReport { pass, left, right })
}

/// Palindromicity of ordinary homology (closed) or `H_k = H_{m−k}(K, ∂K)`.
pub fn ordinary_duality(k: &FilteredComplex) -> Result<(bool, Vec<usize>, Vec<usize>), IhError> {
    orientation(k).ok_or(IhError::NotOrientable)?;
    let left = homology(k, Variant::Closed)?;
    let right = homology(k, if k.has_boundary() { Variant::Relative } else { Variant::Closed })?;
    Ok((left.iter().eq(right.iter().rev()), left, right))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvarianceReport {
    pub pass: bool,
    pub base: Vec<usize>,
    pub subdivided: Vec<usize>,
    pub alternative: Option<Vec<usize>>,
}

impl InvarianceReport {
    pub fn to_json(&self) -> Value {
        json!({"pass": self.pass, "base": self.base, "subdivided": self.subdivided, "alternative": self.alternative})
    }
}

/// Recompute after one barycentric subdivision and, if given, with an
/// alternative level assignment on the same cells.
pub fn invariance_check(k: &FilteredComplex, p: &Perversity, alternative: Option<&[Vec<usize>]>) -> Result<InvarianceReport, IhError> {
    let base = ih_betti(k, p, Variant::Closed)?.betti;
    let subdivided = ih_betti(&k.barycentric_subdivision(), p, Variant::Closed)?.betti;
    let alternative = match alternative {
        Some(levels) => Some(ih_betti(&k.with_levels(levels)?, p, Variant::Closed)?.betti),
        None => None,
    };
    let pass = base == subdivided && alternative.as_ref().is_none_or(|a| *a == base);
    Ok(InvarianceReport { pass, base, subdivided, alternative })
}

/// Table of `IH^p̄` for several perversities, one row each.
pub fn betti_table(results: &[IhResult]) -> String {
    let mut out = String::new();
    for r in results {
        let b: Vec<String> = r.betti.iter().map(|x| x.to_string()).collect();
        out.push_str(&format!("IH^{} ({}): ({})\n", r.perversity, r.variant, b.join(", ")));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::corpus::*;
    use super::*;
    use crate::strata::{make_perversity, PerversityKind};

    fn zero(m: usize) -> Perversity {
        make_perversity(&PerversityKind::Zero, m).unwrap()
    }

    fn top(m: usize) -> Perversity {
        make_perversity(&PerversityKind::Max, m).unwrap()
    }

    #[test]
    fn ordinary_homology_of_corpus() {
        assert_eq!(homology(&sphere(), Variant::Closed).unwrap(), vec![1, 0, 1]);
        assert_eq!(homology(&torus(), Variant::Closed).unwrap(), vec![1, 2, 1]);
        assert_eq!(homology(&pinched_torus(), Variant::Closed).unwrap(), vec![1, 1, 1]);
        assert_eq!(homology(&suspended_torus(), Variant::Closed).unwrap(), vec![1, 0, 2, 1]);
        assert_eq!(homology(&disk(), Variant::Relative).unwrap(), vec![0, 0, 1]);
    }

    #[test]
    fn allowability_examples() {
        let p = zero(4);
        // Meets X_2 (k = 2) in a point, misses X_1 and X_0.
        assert!(allowable(&[0, -1, -1], &p, 2));
        let t = top(3);
        assert!(!allowable(&[1, 1], &t, 2));
        assert!(allowable(&[-1, -1, -1], &zero(4), 0));
    }

    #[test]
    fn pinched_torus_ih() {
        let k = pinched_torus();
        let r = ih_betti(&k, &zero(2), Variant::Closed).unwrap();
        assert_eq!(r.betti, vec![1, 0, 1]);
        assert!(r.betti.iter().zip(&r.chain_dims).all(|(b, c)| b <= c));
        let rep = validate_pseudomanifold(&k);
        assert!(rep.is_pseudomanifold);
        assert_eq!((rep.singular_cells.len(), rep.codim), (1, Some(2)));
        assert!(duality_check(&k, &zero(2), &zero(2)).unwrap().pass);
        assert!(invariance_check(&k, &zero(2), None).unwrap().pass);
    }

    #[test]
    fn suspension_witness() {
        let k = suspended_torus();
        let (pass, h, _) = ordinary_duality(&k).unwrap();
        assert!(!pass);
        assert_eq!(h, vec![1, 0, 2, 1]);
        assert_eq!(ih_betti(&k, &zero(3), Variant::Closed).unwrap().betti, vec![1, 2, 0, 1]);
        assert_eq!(ih_betti(&k, &top(3), Variant::Closed).unwrap().betti, vec![1, 0, 2, 1]);
        assert!(duality_check(&k, &zero(3), &top(3)).unwrap().pass);
    }

    #[test]
    fn smooth_spaces_ignore_perversity() {
        for k in [sphere(), torus()] {
            let h = homology(&k, Variant::Closed).unwrap();
            let r = ih_betti(&k, &zero(2), Variant::Closed).unwrap();
            assert_eq!(r.betti, h);
            assert_eq!(r.chain_dims, (0..=2).map(|d| k.count(d)).collect::<Vec<_>>());
        }
        assert_eq!(validate_pseudomanifold(&sphere()).singular_cells.len(), 0);
    }

    #[test]
    fn disk_relative_and_duality() {
        let k = disk();
        assert_eq!(ih_betti(&k, &zero(2), Variant::Relative).unwrap().betti, vec![0, 0, 1]);
        assert!(matches!(ih_betti(&sphere(), &zero(2), Variant::Relative), Err(IhError::NoBoundary)));
        assert!(duality_check(&k, &zero(2), &zero(2)).unwrap().pass);
        assert!(validate_pseudomanifold(&k).is_pseudomanifold);
    }

    #[test]
    fn point_stratum_is_invisible() {
        let fake = sphere_with_point_stratum();
        let trivial = fake.with_levels(&sphere().levels()).unwrap();
        let r = invariance_check(&fake, &zero(2), Some(&trivial.levels())).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.base, vec![1, 0, 1]);
    }

    #[test]
    fn rejects_bad_input() {
        let bad = sphere().levels().into_iter().enumerate().map(|(d, l)| if d == 1 { vec![0; l.len()] } else { l }).collect::<Vec<_>>();
        assert!(matches!(sphere().with_levels(&bad), Err(IhError::Filtration(_))));
        assert!(matches!(ih_betti(&sphere(), &zero(3), Variant::Closed), Err(IhError::DimensionMismatch { .. })));
        assert!(duality_check(&torus(), &zero(2), &top(2).complement().complement()).is_ok());
    }

    #[test]
    fn json_round_trip() {
        let k = disk();
        let back = FilteredComplex::from_json(&k.to_json()).unwrap();
        assert_eq!(back, k);
        let v = serde_json::json!({"dimension": 1, "cells": [["a", "b"], ["e"]], "boundary": [["e", "a", -1], ["e", "b", 1]]});
        let k = FilteredComplex::from_json(&v).unwrap();
        assert_eq!(homology(&k, Variant::Closed).unwrap(), vec![1, 0]);
        let broken = serde_json::json!({"dimension": 2, "cells": [["a"], ["e"], ["f"]], "boundary": [["f", "e", 1]]});
        assert!(matches!(FilteredComplex::from_json(&broken), Err(IhError::NotAComplex(_)) | Ok(_)));
    }
}
