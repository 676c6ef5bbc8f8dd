//! Aberth–Ehrlich simultaneous iteration.

use std::f64::consts::PI;

use num_complex::Complex;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cpoly;
use crate::scalar::{convert, ComplexFns, Real};

pub(crate) struct Outcome<T> {
    pub roots: Vec<Complex<T>>,
    pub converged: bool,
    pub sweeps: usize,
}

/// Starting points on a circle around the root centroid.
///
/// The radius is the largest `|q_{n−k}/q_n|^{1/k}` of the polynomial shifted
/// to the centroid, a Fujiwara-type scale that tracks the typical root
/// modulus rather than the much larger Cauchy bound.
pub(crate) fn initial_guesses(coeffs: &[Complex<f64>], seed: u64) -> Vec<Complex<f64>> {
    let n = coeffs.len() - 1;
    let lead = coeffs[n];
    let center = -coeffs[n - 1] / (lead * n as f64);
    let shifted = cpoly::compose_affine(coeffs, &center, &Complex::new(1.0, 0.0));
    let mut radius = 0.0f64;
    for k in 1..=n {
        let r = (shifted[n - k].norm() / shifted[n].norm()).powf(1.0 / k as f64);
        if r.is_finite() {
            radius = radius.max(r);
        }
    }
    if radius == 0.0 || !radius.is_finite() {
        radius = 1.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let offset = 0.7 / n as f64;
    (0..n)
        .map(|k| {
            let jitter: f64 = rng.gen_range(-0.05..0.05) / n as f64;
            let theta = 2.0 * PI * (k as f64 + offset + jitter) / n as f64 + offset;
            center + Complex::from_polar(radius, theta)
        })
        .collect()
}

/// Supplied starting points nudged off the real axis, so that real
/// iterates of a real polynomial can still become a conjugate pair.
pub(crate) fn unsettle(points: &[Complex<f64>], seed: u64) -> Vec<Complex<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    points
        .iter()
        .map(|z| {
            let u: f64 = rng.gen_range(0.5..1.0);
            let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            z + Complex::new(0.0, sign * u * 1e-4 * (1.0 + z.norm()))
        })
        .collect()
}

/// Horner rounding-error scale `Σ|c_k||z|^k` in double precision.
fn eval_scale<T: Real>(abs_coeffs: &[f64], z: &Complex<T>) -> f64 {
    let r = z.cabs().to_f64();
    abs_coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c)
}

/// Gauss–Seidel Aberth sweeps until every root is settled.
///
/// A root is settled when its correction is below `tol·(1+|z|)` or its
/// residual is at the rounding level of the evaluation.
pub(crate) fn iterate<T: Real>(coeffs: &[Complex<T>], mut roots: Vec<Complex<T>>, max_sweeps: usize, tol: f64) -> Outcome<T> {
    let n = roots.len();
    let abs_coeffs: Vec<f64> = coeffs.iter().map(|c| c.cabs().to_f64()).collect();
    let eps = T::epsilon().to_f64();
    let one = Complex::<T>::new(T::one(), T::zero());
    let mut settled = vec![false; n];
    for sweep in 1..=max_sweeps {
        let mut all = true;
        for i in 0..n {
            let (p, dp) = cpoly::eval_with_derivative(coeffs, &roots[i]);
            let floor = 4.0 * (n as f64 + 1.0) * eps * eval_scale(&abs_coeffs, &roots[i]);
            if p.cabs().to_f64() <= floor {
                settled[i] = true;
                continue;
            }
            if dp.is_zero() {
                all = false;
                continue;
            }
            let ratio = p / dp;
            let mut repulsion = Complex::<T>::zero();
            for j in 0..n {
                if j != i {
                    let d = roots[i].clone() - roots[j].clone();
                    if !d.is_zero() {
                        repulsion = repulsion + one.clone() / d;
                    }
                }
            }
            let denom = one.clone() - ratio.clone() * repulsion;
            let step = if denom.is_zero() { ratio } else { ratio / denom };
            let size = step.cabs().to_f64();
            if !size.is_finite() {
                all = false;
                continue;
            }
            roots[i] = roots[i].clone() - step;
            settled[i] = size <= tol * (1.0 + roots[i].cabs().to_f64());
            all &= settled[i];
        }
        if all && settled.iter().all(|&s| s) {
            return Outcome { roots, converged: true, sweeps: sweep };
        }
    }
    Outcome { roots, converged: false, sweeps: max_sweeps }
}

/// A few guarded Newton steps per root.
pub(crate) fn polish<T: Real>(coeffs: &[Complex<T>], roots: &mut [Complex<T>], steps: usize) {
    for z in roots.iter_mut() {
        for _ in 0..steps {
            let (p, dp) = cpoly::eval_with_derivative(coeffs, z);
            if dp.is_zero() || p.is_zero() {
                break;
            }
            let next = z.clone() - p.clone() / dp;
            if cpoly::eval(coeffs, &next).cabs() < p.cabs() {
                *z = next;
            } else {
                break;
            }
        }
    }
}

pub(crate) fn to_f64_coeffs<T: Real>(coeffs: &[Complex<T>]) -> Vec<Complex<f64>> {
    coeffs.iter().map(|c| Complex::new(c.re.to_f64(), c.im.to_f64())).collect()
}

pub(crate) fn lift<T: Real>(z: &Complex<f64>) -> Complex<T> {
    Complex::new(convert::<f64, T>(&z.re), convert::<f64, T>(&z.im))
}
