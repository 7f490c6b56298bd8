//! Four-dimensional models for maps `(x, A(x)·y + c(x))` with `A` of degree
//! at most one.
//!
//! The closure of the graph of `y = (β − c(α))/A(α)` over the bidisk is the
//! bidisk itself when `A` is constant, and the blow-up of the bidisk at the
//! point `(a, c(a))` when `A(a) = 0`: the line `x = a` becomes the
//! exceptional sphere, and the points at infinity over `α = a` fill in the
//! strict transform of that line.
//!
//! Triangulation. `E_N = D_N × D` is the staircase product of two cone
//! disks. The blow-up adds `E_S`, the cone over the 3-sphere `T₁ ∪ T₂`, where
//! `T₁ = ∂D_N × D` and `T₂` is the solid torus on the same boundary torus
//! whose meridian is a `(1, 1)` curve; this realises the disk bundle of
//! Euler number `±1` over `D_N ∪ D_S`.

use std::collections::{BTreeSet, HashMap};

use super::ModelError;
use crate::ih::FilteredComplex;

const EQUATOR: usize = 3;
const RIM: usize = 6;

/// Base vertices: `0` is the pole, `1..=3` the equator.
/// Fiber vertices: `0` is the center, `1..=6` the rim.
fn pv(b: usize, f: usize) -> usize {
    b * (RIM + 1) + f
}

const MU: usize = (EQUATOR + 1) * (RIM + 1);
const MU2: usize = MU + 1;
const W1: usize = MU + 2;
const W2: usize = MU + 3;
const SOUTH: usize = MU + 4;

fn eq(k: usize) -> usize {
    1 + k % EQUATOR
}

fn rim(j: usize) -> usize {
    1 + j % RIM
}

/// Staircase triangulation of `σ × τ` for increasing vertex lists.
fn staircase(sigma: &[usize], tau: &[usize]) -> Vec<Vec<usize>> {
    let (a, b) = (sigma.len() - 1, tau.len() - 1);
    let mut out = Vec::new();
    for mask in 0u32..(1 << (a + b)) {
        if mask.count_ones() as usize != a {
            continue;
        }
        let (mut i, mut j) = (0, 0);
        let mut s = vec![pv(sigma[0], tau[0])];
        for step in 0..a + b {
            if mask >> step & 1 == 1 {
                i += 1;
            } else {
                j += 1;
            }
            s.push(pv(sigma[i], tau[j]));
        }
        out.push(s);
    }
    out
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v
}

fn fiber_triangles() -> Vec<Vec<usize>> {
    (0..RIM).map(|j| sorted(vec![0, rim(j), rim(j + 1)])).collect()
}

fn product_ball() -> Vec<Vec<usize>> {
    let base: Vec<Vec<usize>> = (0..EQUATOR).map(|k| sorted(vec![0, eq(k), eq(k + 1)])).collect();
    base.iter().flat_map(|s| fiber_triangles().into_iter().flat_map(move |t| staircase(s, &t))).collect()
}

/// The `(1, 1)` curve on the boundary torus, as grid points `(k, j)`, and its
/// shift by half the rim.
fn meridian(shift: usize) -> Vec<(usize, usize)> {
    let path = [(0, 0), (0, 1), (1, 1), (1, 2), (1, 3), (2, 3), (2, 4), (2, 5), (0, 5)];
    path.iter().map(|&(k, j)| (k, (j + shift) % RIM)).collect()
}

fn closed_edges(path: &[(usize, usize)]) -> Vec<[usize; 2]> {
    let v = |&(k, j): &(usize, usize)| pv(eq(k), rim(j));
    (0..path.len())
        .map(|i| {
            let (x, y) = (v(&path[i]), v(&path[(i + 1) % path.len()]));
            [x.min(y), x.max(y)]
        })
        .collect()
}

/// The blown-up bidisk. `S_F` is the fiber over the pole of `D_N`.
fn blown_up() -> Vec<Vec<usize>> {
    let mut tops = product_ball();
    let t1: Vec<Vec<usize>> = (0..EQUATOR)
        .flat_map(|k| {
            let e = sorted(vec![eq(k), eq(k + 1)]);
            fiber_triangles().into_iter().flat_map(move |t| staircase(&e, &t))
        })
        .collect();
    let torus: Vec<Vec<usize>> = (0..EQUATOR)
        .flat_map(|k| {
            let e = sorted(vec![eq(k), eq(k + 1)]);
            (0..RIM).flat_map(move |j| staircase(&e, &sorted(vec![rim(j), rim(j + 1)])))
        })
        .collect();
    let c1 = closed_edges(&meridian(0));
    let c2 = closed_edges(&meridian(RIM / 2));
    let cut: BTreeSet<[usize; 2]> = c1.iter().chain(&c2).copied().collect();
    let side = annulus_sides(&torus, &cut);
    let mut t2 = Vec::new();
    for (t, &s) in torus.iter().zip(&side) {
        t2.push([t.clone(), vec![if s == 0 { W1 } else { W2 }]].concat());
    }
    for (mu, curve) in [(MU, &c1), (MU2, &c2)] {
        for e in curve {
            for w in [W1, W2] {
                t2.push(vec![e[0], e[1], mu, w]);
            }
        }
    }
    for t in t1.iter().chain(&t2) {
        tops.push([t.clone(), vec![SOUTH]].concat());
    }
    tops
}

/// Two-colouring of the torus triangles by the annuli between the curves.
fn annulus_sides(torus: &[Vec<usize>], cut: &BTreeSet<[usize; 2]>) -> Vec<usize> {
    let edges = |t: &Vec<usize>| [[t[0], t[1]], [t[0], t[2]], [t[1], t[2]]];
    let mut by_edge: HashMap<[usize; 2], Vec<usize>> = HashMap::new();
    for (i, t) in torus.iter().enumerate() {
        for e in edges(t) {
            by_edge.entry(e).or_default().push(i);
        }
    }
    let mut side = vec![usize::MAX; torus.len()];
    let mut colour = 0;
    for start in 0..torus.len() {
        if side[start] != usize::MAX {
            continue;
        }
        let mut stack = vec![start];
        side[start] = colour;
        while let Some(t) = stack.pop() {
            for e in edges(&torus[t]) {
                if cut.contains(&e) {
                    continue;
                }
                for &u in &by_edge[&e] {
                    if side[u] == usize::MAX {
                        side[u] = colour;
                        stack.push(u);
                    }
                }
            }
        }
        colour += 1;
    }
    debug_assert_eq!(colour, 2);
    side
}

/// Vertices on the boundary at the cutoff. Without the blow-up the
/// equator of `D_N` is on the boundary too.
fn is_rim(v: usize, blow_up: bool) -> bool {
    matches!(v, MU | MU2 | W1 | W2) || (v < MU && (!v.is_multiple_of(RIM + 1) || (!blow_up && v > RIM)))
}

/// The model complex: the bidisk, blown up at the point over the pole when
/// `blow_up` holds. Cells of the fiber over the pole (the strict transform
/// of `S_F`) sit at level 2.
pub(super) fn model_complex(blow_up: bool) -> Result<FilteredComplex, ModelError> {
    let tops = if blow_up { blown_up() } else { product_ball() };
    let level = |s: &[usize]| if blow_up && s.iter().all(|&v| v < RIM + 1) { 2 } else { 4 };
    let bd = |s: &[usize]| s.iter().all(|&v| is_rim(v, blow_up));
    Ok(FilteredComplex::from_simplices(4, &tops, level, Some(&bd))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ih::{homology, Variant};

    #[test]
    fn product_ball_is_a_ball() {
        let k = model_complex(false).unwrap();
        assert_eq!(homology(&k, Variant::Closed).unwrap(), vec![1, 0, 0, 0, 0]);
        assert_eq!(homology(&k, Variant::Relative).unwrap(), vec![0, 0, 0, 0, 1]);
    }

    #[test]
    fn blow_up_has_the_exceptional_sphere() {
        let k = model_complex(true).unwrap();
        assert_eq!(homology(&k, Variant::Closed).unwrap(), vec![1, 0, 1, 0, 0]);
        assert_eq!(homology(&k, Variant::Relative).unwrap(), vec![0, 0, 1, 0, 1]);
        assert_eq!(k.euler_characteristic(), 2);
    }

    #[test]
    fn meridians_are_disjoint() {
        let a: BTreeSet<_> = meridian(0).into_iter().collect();
        let b: BTreeSet<_> = meridian(RIM / 2).into_iter().collect();
        assert!(a.is_disjoint(&b));
        assert_eq!(a.len() + b.len(), EQUATOR * RIM);
    }
}
