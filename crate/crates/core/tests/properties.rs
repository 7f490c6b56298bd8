//! Property tests for the exact algebra, the leading-form machinery,
//! perversities and the Whitney sampler.

use num_complex::Complex64;
use num_traits::{One, Zero};
use polyinf::infinity::{leading_map, leading_rank};
use polyinf::poly::{parse_poly, resultant, var_names, GaussianRational, MultiPoly, PolyMap};
use polyinf::strata::{whitney_b_sample_test, Perversity, Stratum, WhitneyVerdict};
use proptest::prelude::*;

fn xy() -> Vec<String> {
    var_names(&["x", "y"])
}

fn q(n: i64, d: i64) -> GaussianRational {
    GaussianRational::from_ratio(n, d)
}

/// Polynomials in `x, y` of total degree at most `deg` with small integer
/// coefficients.
fn poly(deg: u32) -> impl Strategy<Value = MultiPoly> {
    prop::collection::vec(((0..=deg), (0..=deg), -5i64..=5), 1..7).prop_map(move |terms| {
        let vars = xy();
        let mut p = MultiPoly::zero(&vars);
        for (i, j, c) in terms {
            if i + j <= deg {
                p = &p + &MultiPoly::monomial(&vars, vec![i, j], GaussianRational::from_int(c));
            }
        }
        p
    })
}

fn gaussian() -> impl Strategy<Value = GaussianRational> {
    (-6i64..=6, 1i64..=4, -6i64..=6, 1i64..=4).prop_map(|(a, b, c, d)| GaussianRational::from_parts(a, b, c, d))
}

fn gaussian_poly(deg: u32) -> impl Strategy<Value = MultiPoly> {
    prop::collection::vec(((0..=deg), (0..=deg), gaussian()), 1..6).prop_map(move |terms| {
        let vars = xy();
        let mut p = MultiPoly::zero(&vars);
        for (i, j, c) in terms {
            if i + j <= deg {
                p = &p + &MultiPoly::monomial(&vars, vec![i, j], c);
            }
        }
        p
    })
}

/// Determinant by cofactor expansion along the first row.
fn laplace_det(m: &[Vec<GaussianRational>]) -> GaussianRational {
    if m.is_empty() {
        return GaussianRational::one();
    }
    let mut acc = GaussianRational::zero();
    for (j, a) in m[0].iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let minor: Vec<Vec<GaussianRational>> =
            m[1..].iter().map(|row| row.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, v)| v.clone()).collect()).collect();
        let term = a * &laplace_det(&minor);
        if j % 2 == 0 {
            acc += &term;
        } else {
            acc -= &term;
        }
    }
    acc
}

/// Sylvester matrix in `x` written out from the coefficient lists, with the
/// coefficients evaluated at `y = y0`.
fn sylvester_at(p: &MultiPoly, q: &MultiPoly, y0: &GaussianRational) -> Vec<Vec<GaussianRational>> {
    let at = |c: &MultiPoly| c.evaluate(&[GaussianRational::zero(), y0.clone()]).unwrap();
    let pc: Vec<GaussianRational> = p.coeffs_in(0).iter().rev().map(at).collect();
    let qc: Vec<GaussianRational> = q.coeffs_in(0).iter().rev().map(at).collect();
    let (dp, dq) = (pc.len() - 1, qc.len() - 1);
    let n = dp + dq;
    let mut m = vec![vec![GaussianRational::zero(); n]; n];
    for r in 0..dq {
        for (k, c) in pc.iter().enumerate() {
            m[r][r + k] = c.clone();
        }
    }
    for r in 0..dp {
        for (k, c) in qc.iter().enumerate() {
            m[dq + r][r + k] = c.clone();
        }
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn leading_form_is_multiplicative(p in poly(3), r in poly(3)) {
        prop_assume!(!p.is_zero() && !r.is_zero());
        let lhs = (&p * &r).leading_form().unwrap();
        let rhs = &p.leading_form().unwrap() * &r.leading_form().unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn resultant_matches_sylvester_and_swaps_with_sign(p in poly(3), r in poly(3), y0 in gaussian()) {
        prop_assume!(p.degree_in(0) >= 1 && r.degree_in(0) >= 1);
        let res = resultant(&p, &r, 0).unwrap();
        let swapped = resultant(&r, &p, 0).unwrap();
        let sign = if (p.degree_in(0) * r.degree_in(0)) % 2 == 0 { 1 } else { -1 };
        prop_assert_eq!(&swapped, &res.scale(&GaussianRational::from_int(sign)));
        let brute = laplace_det(&sylvester_at(&p, &r, &y0));
        prop_assert_eq!(res.evaluate(&[GaussianRational::zero(), y0]).unwrap(), brute);
    }

    #[test]
    fn derivative_matches_central_differences(p in poly(3), a in -2.0f64..2.0, b in -2.0f64..2.0, v in 0usize..2) {
        let h = 1e-4;
        let at = |x: f64, y: f64| p.eval_complex(&[Complex64::new(x, 0.0), Complex64::new(y, 0.0)]).re;
        let fd = if v == 0 { (at(a + h, b) - at(a - h, b)) / (2.0 * h) } else { (at(a, b + h) - at(a, b - h)) / (2.0 * h) };
        let exact = p.derivative(v).eval_complex(&[Complex64::new(a, 0.0), Complex64::new(b, 0.0)]).re;
        prop_assert!((fd - exact).abs() <= 1e-6 * exact.abs().max(1.0), "{} vs {}", fd, exact);
    }

    #[test]
    fn print_then_parse_round_trips(p in gaussian_poly(3)) {
        let back = parse_poly(&p.to_string(), &xy()).unwrap();
        prop_assert_eq!(back.terms(), p.terms());
    }

    #[test]
    fn leading_map_is_homogeneous(f1 in gaussian_poly(3), f2 in gaussian_poly(3), t in gaussian(), z in (gaussian(), gaussian())) {
        prop_assume!(!f1.is_zero() && !f2.is_zero());
        let lead = leading_map(&PolyMap::new(vec![f1, f2]).unwrap()).unwrap();
        let point = [z.0.clone(), z.1.clone()];
        let scaled = [&t * &z.0, &t * &z.1];
        for c in lead.components() {
            let mut tp = GaussianRational::one();
            for _ in 0..c.degree() {
                tp *= &t;
            }
            prop_assert_eq!(c.evaluate(&scaled).unwrap(), &tp * &c.evaluate(&point).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn perversity_law_is_the_stored_invariant(m in 2usize..8, raw in prop::collection::vec(0i64..5, 6)) {
        let values: Vec<i64> = raw[..m - 1].to_vec();
        let lawful = values[0] == 0 && values.windows(2).all(|w| w[1] == w[0] || w[1] == w[0] + 1);
        let built = Perversity::new(m, values.clone());
        prop_assert_eq!(built.is_ok(), lawful);
        if let Ok(p) = built {
            prop_assert_eq!(p.values(), &values[..]);
            let c = Perversity::new(m, p.complement().values().to_vec()).unwrap();
            prop_assert_eq!(c.complement(), p);
        }
    }
}

fn linear(vars: &[String], a: i64, b: i64, c: i64, d: i64) -> PolyMap {
    let x = MultiPoly::var(vars, 0);
    let y = MultiPoly::var(vars, 1);
    let comb = |s: i64, t: i64| &x.scale(&GaussianRational::from_int(s)) + &y.scale(&GaussianRational::from_int(t));
    PolyMap::new(vec![comb(a, b), comb(c, d)]).unwrap()
}

/// `(a·F1 + b·F2, c·F1 + d·F2)`.
fn postcompose(f: &PolyMap, a: i64, b: i64, c: i64, d: i64) -> PolyMap {
    let [f1, f2] = [f.component(0), f.component(1)];
    let comb = |s: i64, t: i64| &f1.scale(&GaussianRational::from_int(s)) + &f2.scale(&GaussianRational::from_int(t));
    PolyMap::new(vec![comb(a, b), comb(c, d)]).unwrap()
}

const LINEAR_CHANGES: [(i64, i64, i64, i64); 3] = [(1, 2, 0, 1), (2, -1, 3, 1), (0, 1, -1, 4)];

fn rank_corpus() -> Vec<PolyMap> {
    [
        ["x", "y"],
        ["x", "y + x^2"],
        ["x", "x*y"],
        ["x", "x^2*y*(y+2)"],
        ["x + y^3", "y"],
        ["x^2", "y^2"],
        ["x*y", "x^2 - y^2"],
        ["x^2 + y", "x^2 - y"],
    ]
    .iter()
    .map(|e| PolyMap::parse(e, &["x", "y"]).unwrap())
    .collect()
}

#[test]
fn leading_rank_is_invariant_under_linear_precomposition() {
    for f in rank_corpus() {
        let r = leading_rank(&f, 8, 0).unwrap().rank;
        for (a, b, c, d) in LINEAR_CHANGES {
            let g = f.compose(&linear(f.vars(), a, b, c, d));
            assert_eq!(leading_rank(&g, 8, 1).unwrap().rank, r, "{f} precomposed");
        }
    }
}

#[test]
fn leading_rank_is_invariant_under_postcomposition_when_degrees_agree() {
    for f in rank_corpus().into_iter().filter(|f| f.component(0).degree() == f.component(1).degree()) {
        let r = leading_rank(&f, 8, 0).unwrap().rank;
        for (a, b, c, d) in LINEAR_CHANGES {
            let g = postcompose(&f, a, b, c, d);
            assert_eq!(leading_rank(&g, 8, 1).unwrap().rank, r, "{f} postcomposed");
        }
    }
}

#[test]
fn postcomposition_can_change_rank_across_degrees() {
    let f = PolyMap::parse(&["x", "y^2"], &["x", "y"]).unwrap();
    assert_eq!(leading_rank(&f, 8, 0).unwrap().rank, 2);
    assert_eq!(leading_rank(&postcompose(&f, 1, 1, 0, 1), 8, 0).unwrap().rank, 1);
}

#[test]
fn rank_never_exceeds_n_nor_grows_under_combinations_of_equal_degree() {
    for f in rank_corpus() {
        let r = leading_rank(&f, 8, 0).unwrap().rank;
        assert!(r <= f.n());
        if f.component(0).degree() == f.component(1).degree() {
            for (a, b, c, d) in [(1, 1, 2, 2), (1, 0, 1, 0), (3, -1, 0, 0)] {
                let g = postcompose(&f, a, b, c, d);
                if g.components().iter().all(|c| !c.is_zero()) {
                    assert!(leading_rank(&g, 8, 0).unwrap().rank <= r, "{f}");
                }
            }
        }
    }
}

fn params(vars: &[&str], exprs: &[&str]) -> Vec<MultiPoly> {
    let v = var_names(vars);
    exprs.iter().map(|e| parse_poly(e, &v).unwrap()).collect()
}

/// Substitute `vars[k] ↦ subs[k]` simultaneously.
fn reparametrize(param: &[MultiPoly], subs: &[MultiPoly]) -> Vec<MultiPoly> {
    let vars = param[0].vars().to_vec();
    // Rename to fresh variables first so the substitutions do not interact.
    let fresh: Vec<String> = vars.iter().map(|v| format!("{v}_old")).collect();
    let all: Vec<String> = vars.iter().chain(&fresh).cloned().collect();
    param
        .iter()
        .map(|p| {
            let mut r = p.with_var_names(&fresh).embed(&all).unwrap();
            for (k, s) in subs.iter().enumerate() {
                r = r.substitute(vars.len() + k, &s.embed(&all).unwrap());
            }
            let back: Vec<MultiPoly> = (0..vars.len()).map(|k| MultiPoly::var(&vars, k)).collect();
            let mut out = MultiPoly::zero(&vars);
            for (e, c) in r.terms() {
                if e[vars.len()..].iter().all(|&x| x == 0) {
                    let mut m = MultiPoly::constant(&vars, c.clone());
                    for (k, &x) in e[..vars.len()].iter().enumerate() {
                        m = &m * &back[k].pow(x);
                    }
                    out = &out + &m;
                }
            }
            out
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn whitney_verdict_survives_reparametrization(a in 1i64..=3, b in -2i64..=2, c in -2i64..=2) {
        let cases: Vec<(Stratum, Stratum, Vec<&str>, WhitneyVerdict)> = vec![
            (
                Stratum::new("parabola", params(&["t"], &["t", "t^2"]), vec![q(0, 1)]),
                Stratum::new("origin", vec![MultiPoly::zero(&[]), MultiPoly::zero(&[])], vec![]),
                vec!["t"],
                WhitneyVerdict::Pass,
            ),
            (
                Stratum::new("umbrella", params(&["u", "v"], &["u*v", "v", "u^2"]), vec![q(1, 1), q(0, 1)]),
                Stratum::new("handle", params(&["w"], &["0", "0", "w"]), vec![q(1, 1)]),
                vec!["u", "v"],
                WhitneyVerdict::Pass,
            ),
            (
                Stratum::new("surface", params(&["s", "z"], &["s^2 - z^2", "s*(s^2 - z^2)", "z"]), vec![q(0, 1), q(0, 1)]),
                Stratum::new("z-axis", params(&["w"], &["0", "0", "w"]), vec![q(0, 1)]),
                vec!["s", "z"],
                WhitneyVerdict::Fail,
            ),
        ];
        for (big, small, vars, expected) in cases {
            // Fix the base point: the new parameters start at the old base.
            let subs: Vec<String> = if vars.len() == 1 {
                vec![format!("{a}*t + {b}*t^2")]
            } else if big.base[0].is_zero() {
                vec![format!("{a}*{0} + {b}*{1}^2", vars[0], vars[1]), format!("{1} + {c}*{0}^2", vars[0], vars[1])]
            } else {
                vec![format!("{0} + {b}*{1}^2", vars[0], vars[1]), format!("{a}*{0} + {c}*{0}^2", vars[1])]
            };
            let sub_polys = params(&vars, &subs.iter().map(String::as_str).collect::<Vec<_>>());
            let moved = Stratum::new(&big.name, reparametrize(&big.param, &sub_polys), big.base.clone());
            prop_assert_eq!(moved.base_point(), big.base_point());
            let rep = whitney_b_sample_test(&moved, &small, 16, 0).unwrap();
            prop_assert_eq!(rep.verdict, expected, "{}: {:?}", big.name, rep);
        }
    }
}
