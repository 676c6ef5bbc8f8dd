//! Small helpers for polynomials with complex coefficients (ascending order).

use num_complex::Complex;
use num_traits::Zero;

use crate::scalar::{ComplexFns, Real};

/// Horner evaluation.
pub fn eval<T: Real>(coeffs: &[Complex<T>], x: &Complex<T>) -> Complex<T> {
    coeffs
        .iter()
        .rev()
        .fold(Complex::zero(), |acc, c| acc * x.clone() + c.clone())
}

/// Value and first derivative in one pass.
pub fn eval_with_derivative<T: Real>(coeffs: &[Complex<T>], x: &Complex<T>) -> (Complex<T>, Complex<T>) {
    let mut p = Complex::zero();
    let mut dp = Complex::zero();
    for c in coeffs.iter().rev() {
        dp = dp * x.clone() + p.clone();
        p = p * x.clone() + c.clone();
    }
    (p, dp)
}

/// Coefficients of `p(a + b·x)`.
pub fn compose_affine<T: Real>(coeffs: &[Complex<T>], a: &Complex<T>, b: &Complex<T>) -> Vec<Complex<T>> {
    let mut out: Vec<Complex<T>> = vec![Complex::zero(); coeffs.len()];
    let mut len = 0;
    for c in coeffs.iter().rev() {
        // out ← out·(a + b x) + c
        let mut next = vec![Complex::zero(); len + 1];
        for (j, o) in out.iter().take(len).enumerate() {
            next[j] = next[j].clone() + o.clone() * a.clone();
            next[j + 1] = next[j + 1].clone() + o.clone() * b.clone();
        }
        next[0] = next[0].clone() + c.clone();
        len += 1;
        out[..len].clone_from_slice(&next[..len]);
    }
    out
}

/// Largest coefficient magnitude.
pub fn max_abs<T: Real>(coeffs: &[Complex<T>]) -> T {
    coeffs.iter().map(|c| c.cabs()).fold(T::zero(), T::max_of)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex<f64> {
        Complex::new(x, 0.0)
    }

    #[test]
    fn compose_shift_and_scale() {
        // p(x) = 1 + 2x + 3x², p(1 − x) = 6 − 8x + 3x²
        let p = [c(1.0), c(2.0), c(3.0)];
        let q = compose_affine(&p, &c(1.0), &c(-1.0));
        assert_eq!(q, vec![c(6.0), c(-8.0), c(3.0)]);
        let x = Complex::new(0.3, -0.7);
        let (v, d) = eval_with_derivative(&p, &x);
        assert!((v - eval(&p, &x)).norm() < 1e-15);
        assert!((d - (c(2.0) + c(6.0) * x)).norm() < 1e-15);
        assert_eq!(max_abs(&p), 3.0);
    }
}
