//! Independent check of the IH engine: allowability straight from the face
//! closure, explicit bases of `IC_i` by dense rational row reduction, and
//! homology of the resulting subcomplex.

use num_rational::BigRational;
use num_traits::Zero;
use polyinf::ih::{corpus, homology, ih_betti, FilteredComplex, Variant};
use polyinf::strata::{all_perversities, Perversity};

type Mat = Vec<Vec<BigRational>>;

fn q(v: i64) -> BigRational {
    BigRational::from_integer(v.into())
}

/// Reduced row echelon form; returns pivot columns.
fn rref(m: &mut Mat) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].clone().recip();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let v = &m[r][j] * &f;
                    m[i][j] = &m[i][j] - &v;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    pivots
}

fn rank(m: &Mat) -> usize {
    let mut m = m.clone();
    rref(&mut m).len()
}

/// Basis of the null space of `m` (with `cols` columns), as column vectors.
fn kernel(m: &Mat, cols: usize) -> Vec<Vec<BigRational>> {
    let mut m = m.clone();
    let pivots = rref(&mut m);
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![q(0); cols];
            v[free] = q(1);
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[row][free].clone();
            }
            v
        })
        .collect()
}

fn dense_boundary(k: &FilteredComplex, d: usize) -> Mat {
    let mut m = vec![vec![q(0); k.count(d)]; k.count(d - 1)];
    for (j, col) in k.boundary(d).iter().enumerate() {
        for &(r, v) in col {
            m[r][j] = &m[r][j] + q(v);
        }
    }
    m
}

fn closure(k: &FilteredComplex) -> Vec<Vec<Vec<(usize, usize)>>> {
    let mut out: Vec<Vec<Vec<(usize, usize)>>> = Vec::new();
    for d in 0..=k.m() {
        let mut layer = Vec::new();
        for j in 0..k.count(d) {
            let mut s = vec![(d, j)];
            if d > 0 {
                for &(r, _) in &k.boundary(d)[j] {
                    s.extend(out[d - 1][r].iter().copied());
                }
            }
            s.sort_unstable();
            s.dedup();
            layer.push(s);
        }
        out.push(layer);
    }
    out
}

fn oracle_allowable(k: &FilteredComplex, p: &Perversity) -> Vec<Vec<bool>> {
    let m = k.m() as i64;
    let cl = closure(k);
    (0..=k.m())
        .map(|i| {
            cl[i]
                .iter()
                .map(|faces| {
                    (2..=m).all(|kk| {
                        let stratum = (m - kk) as usize;
                        let dim = faces.iter().filter(|&&(d, j)| k.cells(d)[j].level <= stratum).map(|&(d, _)| d as i64).max();
                        dim.is_none_or(|dim| dim <= i as i64 - kk + p.p(kk as usize))
                    })
                })
                .collect()
        })
        .collect()
}

/// Columns spanning `IC_i` inside `C_i`.
fn ic_basis(k: &FilteredComplex, allow: &[Vec<bool>], i: usize) -> Vec<Vec<BigRational>> {
    let a: Vec<usize> = (0..k.count(i)).filter(|&j| allow[i][j]).collect();
    let constraint: Mat = if i == 0 {
        Vec::new()
    } else {
        let bd = dense_boundary(k, i);
        (0..k.count(i - 1)).filter(|&r| !allow[i - 1][r]).map(|r| a.iter().map(|&j| bd[r][j].clone()).collect()).collect()
    };
    kernel(&constraint, a.len())
        .into_iter()
        .map(|v| {
            let mut full = vec![q(0); k.count(i)];
            for (x, &j) in v.into_iter().zip(&a) {
                full[j] = x;
            }
            full
        })
        .collect()
}

fn apply(m: &Mat, v: &[BigRational]) -> Vec<BigRational> {
    m.iter().map(|row| row.iter().zip(v).fold(q(0), |acc, (a, b)| acc + a * b)).collect()
}

fn transpose(cols: &[Vec<BigRational>], rows: usize) -> Mat {
    (0..rows).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect()
}

fn oracle_ih(k: &FilteredComplex, p: &Perversity) -> Vec<usize> {
    let allow = oracle_allowable(k, p);
    let bases: Vec<_> = (0..=k.m()).map(|i| ic_basis(k, &allow, i)).collect();
    let mut image_rank = vec![0; k.m() + 2];
    for i in 1..=k.m() {
        let bd = dense_boundary(k, i);
        let images: Vec<Vec<BigRational>> = bases[i].iter().map(|v| apply(&bd, v)).collect();
        image_rank[i] = rank(&transpose(&images, k.count(i - 1)));
        // The boundary of an intersection chain is an intersection chain.
        let below = transpose(&bases[i - 1], k.count(i - 1));
        let both: Vec<Vec<BigRational>> = bases[i - 1].iter().chain(&images).cloned().collect();
        assert_eq!(rank(&transpose(&both, k.count(i - 1))), rank(&below));
    }
    (0..=k.m()).map(|i| bases[i].len() - image_rank[i] - image_rank[i + 1]).collect()
}

#[test]
fn engine_matches_dense_oracle_on_corpus() {
    for (name, k) in corpus::corpus() {
        for p in all_perversities(k.m()) {
            let got = ih_betti(&k, &p, Variant::Closed).unwrap().betti;
            assert_eq!(got, oracle_ih(&k, &p), "{name} {p}");
        }
    }
}

#[test]
fn oracle_values_for_named_spaces() {
    let p0 = Perversity::new(2, vec![0]).unwrap();
    assert_eq!(oracle_ih(&corpus::pinched_torus(), &p0), vec![1, 0, 1]);
    let k = corpus::suspended_torus();
    assert_eq!(oracle_ih(&k, &Perversity::new(3, vec![0, 0]).unwrap()), vec![1, 2, 0, 1]);
    assert_eq!(oracle_ih(&k, &Perversity::new(3, vec![0, 1]).unwrap()), vec![1, 0, 2, 1]);
}

#[test]
fn engine_matches_oracle_after_subdivision() {
    let k = corpus::pinched_torus().barycentric_subdivision();
    let p0 = Perversity::new(2, vec![0]).unwrap();
    assert_eq!(ih_betti(&k, &p0, Variant::Closed).unwrap().betti, oracle_ih(&k, &p0));
}

#[test]
fn chain_dims_grow_with_perversity() {
    for (name, k) in corpus::corpus() {
        let ps = all_perversities(k.m());
        for p in &ps {
            for r in &ps {
                if p.le(r) {
                    let a = ih_betti(&k, p, Variant::Closed).unwrap().chain_dims;
                    let b = ih_betti(&k, r, Variant::Closed).unwrap().chain_dims;
                    assert!(a.iter().zip(&b).all(|(x, y)| x <= y), "{name}: {p} vs {r}");
                }
            }
        }
    }
}

#[test]
fn euler_characteristic_matches_cell_count() {
    for (name, k) in corpus::corpus().into_iter().chain([("disk", corpus::disk())]) {
        let h = homology(&k, Variant::Closed).unwrap();
        let chi: i64 = h.iter().enumerate().map(|(i, &b)| if i % 2 == 0 { b as i64 } else { -(b as i64) }).sum();
        assert_eq!(chi, k.euler_characteristic(), "{name}");
    }
}

#[test]
fn unit_matrix_helpers() {
    let m = vec![vec![q(1), q(2)], vec![q(2), q(4)]];
    assert_eq!(rank(&m), 1);
    assert_eq!(kernel(&m, 2).len(), 1);
}
