//! Floating point helpers for the sampling-based operations: polynomial
//! root finding, complex Levenberg–Marquardt, and seeded random streams.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::poly::MultiPoly;

/// Deterministic random stream derived from a user seed and a purpose tag.
pub fn rng_for(seed: u64, stream: &str) -> ChaCha8Rng {
    // FNV-1a over the tag keeps streams independent of call order.
    let mut h: u64 = 0xcbf29ce484222325;
    for b in stream.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    ChaCha8Rng::seed_from_u64(seed ^ h)
}

fn horner(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// All complex roots (with multiplicity) of `sum coeffs[k] z^k`, by
/// Aberth–Ehrlich iteration followed by Newton polishing.
pub fn poly_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Vec::new();
    }
    let mut c: Vec<Complex64> = coeffs.to_vec();
    while c.last().is_some_and(|x| x.norm() <= 1e-14 * scale) {
        c.pop();
    }
    // Roots at zero.
    let mut zeros = 0;
    while c.len() > 1 && c[0].norm() == 0.0 {
        c.remove(0);
        zeros += 1;
    }
    let n = c.len().saturating_sub(1);
    let mut out = vec![Complex64::new(0.0, 0.0); zeros];
    if n == 0 {
        return out;
    }
    if n == 1 {
        out.push(-c[0] / c[1]);
        return out;
    }
    let lead = c[n];
    let radius = 1.0 + c[..n].iter().map(|x| (x / lead).norm()).fold(0.0, f64::max);
    let r0 = radius.min(1e6).max(1e-3);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(r0 * 0.5, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4))
        .collect();
    for _ in 0..800 {
        let mut max_step: f64 = 0.0;
        for k in 0..n {
            let (p, dp) = horner(&c, z[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let mut sum = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != k {
                    let d = z[k] - z[j];
                    if d.norm() > 0.0 {
                        sum += 1.0 / d;
                    }
                }
            }
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * sum);
            if w.is_finite() {
                z[k] -= w;
                max_step = max_step.max(w.norm() / (1.0 + z[k].norm()));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
    for zk in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = horner(&c, *zk);
            if dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            if !step.is_finite() || step.norm() > 1e-6 * (1.0 + zk.norm()) {
                break;
            }
            *zk -= step;
        }
    }
    out.extend(z);
    out
}

/// Coefficients of `p` in the variable at `idx` after substituting the
/// complex `point` for every other variable (the entry at `idx` is ignored).
pub fn specialize_complex(p: &MultiPoly, idx: usize, point: &[Complex64]) -> Vec<Complex64> {
    let d = p.degree_in(idx).max(0) as usize;
    let mut out = vec![Complex64::new(0.0, 0.0); d + 1];
    if p.is_zero() {
        return Vec::new();
    }
    for (e, c) in p.terms() {
        let mut t = c.to_complex();
        for (j, &k) in e.iter().enumerate() {
            if j != idx && k > 0 {
                t *= point[j].powu(k);
            }
        }
        out[e[idx] as usize] += t;
    }
    out
}

/// Result of a damped Gauss–Newton solve.
#[derive(Clone, Debug)]
pub struct LmOutcome {
    pub x: Vec<Complex64>,
    pub residual: f64,
}

/// Levenberg–Marquardt for holomorphic residual systems `r(x) = 0` with
/// `x ∈ C^k`, minimising `|r|²`.
pub fn levenberg_marquardt<R, J>(residual: R, jacobian: J, x0: Vec<Complex64>, max_iter: usize) -> LmOutcome
where
    R: Fn(&[Complex64]) -> Vec<Complex64>,
    J: Fn(&[Complex64]) -> Vec<Vec<Complex64>>,
{
    let norm = |r: &[Complex64]| r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut x = x0;
    let mut r = residual(&x);
    let mut rn = norm(&r);
    let mut mu = 1e-3;
    let k = x.len();
    for _ in 0..max_iter {
        if rn < 1e-14 || !rn.is_finite() {
            break;
        }
        let jm = jacobian(&x);
        let m = r.len();
        let jmat = DMatrix::from_fn(m, k, |i, j| jm[i][j]);
        let rv = DVector::from_iterator(m, r.iter().copied());
        let jh = jmat.adjoint();
        let jhj = &jh * &jmat;
        let g = &jh * &rv;
        let mut improved = false;
        for _ in 0..12 {
            let mut a = jhj.clone();
            for d in 0..k {
                a[(d, d)] += Complex64::new(mu * (1.0 + jhj[(d, d)].re), 0.0);
            }
            let Some(step) = a.lu().solve(&(-&g)) else {
                mu *= 10.0;
                continue;
            };
            let xn: Vec<Complex64> = x.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            let rnew = residual(&xn);
            let rnn = norm(&rnew);
            if rnn.is_finite() && rnn < rn {
                x = xn;
                r = rnew;
                rn = rnn;
                mu = (mu * 0.3).max(1e-15);
                improved = true;
                break;
            }
            mu *= 10.0;
        }
        if !improved {
            break;
        }
    }
    LmOutcome { x, residual: rn }
}

/// Euclidean norm of a complex vector.
pub fn cnorm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Real coordinates `(Re z1, Im z1, Re z2, …)`.
pub fn realify(v: &[Complex64]) -> Vec<f64> {
    v.iter().flat_map(|z| [z.re, z.im]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn roots_of_cubic() {
        // (z-1)(z-2)(z+3) = z^3 - 7z + 6
        let mut r = poly_roots(&[c(6.0), c(-7.0), c(0.0), c(1.0)]);
        r.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        for (got, want) in r.iter().zip([-3.0, 1.0, 2.0]) {
            assert!((got - c(want)).norm() < 1e-10, "{got} vs {want}");
        }
    }

    #[test]
    fn roots_with_multiplicity() {
        // (z-1)^2 (z^2 + 1)
        let r = poly_roots(&[c(1.0), c(-2.0), c(2.0), c(-2.0), c(1.0)]);
        assert_eq!(r.len(), 4);
        let near_one = r.iter().filter(|z| (*z - c(1.0)).norm() < 1e-6).count();
        assert_eq!(near_one, 2);
    }

    #[test]
    fn lm_solves_simple_system() {
        // x*y = 1, x - y = 0 -> x = y = ±1
        let res = |x: &[Complex64]| vec![x[0] * x[1] - 1.0, x[0] - x[1]];
        let jac = |x: &[Complex64]| vec![vec![x[1], x[0]], vec![c(1.0), c(-1.0)]];
        let out = levenberg_marquardt(res, jac, vec![c(0.7), c(1.4)], 100);
        assert!(out.residual < 1e-12);
        assert!((out.x[0].norm() - 1.0).abs() < 1e-9);
    }
}
