//! Small triangulated spaces used by the tests, the acceptance suite and
//! `selftest`.

use super::{FilteredComplex, IhError};

/// Möbius's 7-vertex torus.
pub fn torus_triangles() -> Vec<Vec<usize>> {
    (0..7).flat_map(|i| [vec![i, (i + 1) % 7, (i + 3) % 7], vec![i, (i + 2) % 7, (i + 3) % 7]]).collect()
}

fn build(m: usize, tops: &[Vec<usize>], level: impl Fn(&[usize]) -> usize) -> FilteredComplex {
    FilteredComplex::from_simplices(m, tops, level, None).expect("corpus complexes are well formed")
}

/// Boundary of the octahedron.
pub fn sphere() -> FilteredComplex {
    build(2, &octahedron(), |_| 2)
}

fn octahedron() -> Vec<Vec<usize>> {
    // Poles 0, 5; equator 1..=4.
    (1..=4).flat_map(|i| {
        let j = i % 4 + 1;
        [vec![0, i, j], vec![5, i, j]]
    })
    .collect()
}

/// The octahedral sphere with the pole `0` declared a point stratum.
pub fn sphere_with_point_stratum() -> FilteredComplex {
    build(2, &octahedron(), |s| if s == [0] { 0 } else { 2 })
}

pub fn torus() -> FilteredComplex {
    build(2, &torus_triangles(), |_| 2)
}

/// A 4×3 grid torus with one meridian circle collapsed to the point `0`.
pub fn pinched_torus() -> FilteredComplex {
    let (cols, rows) = (4usize, 3usize);
    let id = |i: usize, j: usize| {
        let (i, j) = (i % cols, j % rows);
        if i == 0 {
            0
        } else {
            1 + (i - 1) * rows + j
        }
    };
    let mut tops = Vec::new();
    for i in 0..cols {
        for j in 0..rows {
            for t in [[id(i, j), id(i + 1, j), id(i + 1, j + 1)], [id(i, j), id(i, j + 1), id(i + 1, j + 1)]] {
                let mut t = t.to_vec();
                t.sort_unstable();
                t.dedup();
                if t.len() == 3 && !tops.contains(&t) {
                    tops.push(t);
                }
            }
        }
    }
    build(2, &tops, |s| if s == [0] { 0 } else { 2 })
}

/// `S⁰ * T²`: the torus with suspension points `7` and `8` at level 0.
pub fn suspended_torus() -> FilteredComplex {
    let tops: Vec<Vec<usize>> =
        torus_triangles().into_iter().flat_map(|t| [7, 8].map(|p| [t.clone(), vec![p]].concat())).collect();
    build(3, &tops, |s| if s == [7] || s == [8] { 0 } else { 3 })
}

/// `S⁰ * S⁰ * T²`, a 4-dimensional pseudomanifold whose singular stratum is
/// the square circle on vertices `7..=10`, with link the torus.
pub fn double_suspended_torus() -> FilteredComplex {
    let square = [[7, 8], [8, 9], [9, 10], [10, 7]];
    let tops: Vec<Vec<usize>> =
        torus_triangles().into_iter().flat_map(|t| square.map(|e| [t.clone(), e.to_vec()].concat())).collect();
    build(4, &tops, |s| if s.iter().all(|&v| v >= 7) { 1 } else { 4 })
}

/// A hexagonal disk, coned from vertex `0`, with its rim marked as boundary.
pub fn disk() -> FilteredComplex {
    let tops: Vec<Vec<usize>> = (1..=6).map(|i| vec![0, i, i % 6 + 1]).collect();
    let rim = |s: &[usize]| !s.contains(&0);
    FilteredComplex::from_simplices(2, &tops, |_| 2, Some(&rim)).expect("disk is well formed")
}

/// The compact orientable pseudomanifolds used for duality and invariance.
pub fn corpus() -> Vec<(&'static str, FilteredComplex)> {
    vec![
        ("sphere", sphere()),
        ("torus", torus()),
        ("pinched torus", pinched_torus()),
        ("suspended torus", suspended_torus()),
        ("double suspended torus", double_suspended_torus()),
    ]
}

pub fn by_name(name: &str) -> Result<FilteredComplex, IhError> {
    match name {
        "sphere" => Ok(sphere()),
        "sphere-point-stratum" => Ok(sphere_with_point_stratum()),
        "torus" => Ok(torus()),
        "pinched-torus" => Ok(pinched_torus()),
        "suspended-torus" => Ok(suspended_torus()),
        "double-suspended-torus" => Ok(double_suspended_torus()),
        "disk" => Ok(disk()),
        _ => Err(IhError::Format(format!("unknown built-in complex '{name}'"))),
    }
}

pub const BUILTIN_NAMES: [&str; 7] =
    ["sphere", "sphere-point-stratum", "torus", "pinched-torus", "suspended-torus", "double-suspended-torus", "disk"];
