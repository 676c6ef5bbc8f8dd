//! Reference implementations of ζ, ζ′, Γ, 1/Γ and ψ.
//!
//! These are built from textbook methods (Euler–Maclaurin summation,
//! Spouge's formula, the asymptotic digamma series) and are deliberately
//! independent of the operator series in [`crate::continuation`], which they
//! are used to validate.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::cache::cached;
use crate::exact::{bernoulli_numbers, factorial, ExactRational, SignConvention};
use crate::scalar::{re, ComplexFns, Mp, Real};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("pole of zeta at s = 1")]
    PoleAtOne,
    #[error("pole at non-positive integer {0}")]
    PoleAtNonPositiveInteger(i64),
}

fn half<T: Real>() -> T {
    T::one() / T::from_i64(2)
}

fn is_one<T: Real>(s: &Complex<T>) -> bool {
    s.im.is_zero() && s.re == T::one()
}

fn nonpositive_integer<T: Real>(z: &Complex<T>) -> Option<i64> {
    (z.is_real_integer() && z.re <= T::zero()).then(|| z.re.to_f64() as i64)
}

/// Euler–Maclaurin cut `N` and correction order `M` for the type's precision.
fn em_params<T: Real>() -> (usize, usize) {
    let p = T::BITS as f64;
    (((0.35 * p).ceil() as usize).max(10), (p / 8.0).ceil() as usize)
}

/// `B_{2j}/(2j)!` for `j = 1..=m`.
fn em_coefficients<T: Real>(m: usize) -> std::rc::Rc<Vec<T>> {
    cached("em", m, || {
        let b = bernoulli_numbers(2 * m, SignConvention::Classical);
        (1..=m)
            .map(|j| T::from_rational(&(&b[2 * j] / ExactRational::from_integer(factorial(2 * j)))))
            .collect()
    })
}

/// `(ζ(s), ζ′(s))` by Euler–Maclaurin, valid for any `s ≠ 1` but used for
/// `Re s ≥ 0`.
fn zeta_em<T: Real>(s: &Complex<T>, with_derivative: bool) -> (Complex<T>, Complex<T>) {
    let (n, m) = em_params::<T>();
    let coeffs = em_coefficients::<T>(m);
    let one = Complex::<T>::one();
    let mut sum = Complex::zero();
    let mut dsum = Complex::zero();
    for k in 1..n {
        let lnk = T::from_i64(k as i64).ln();
        let term = (-(s.clone()) * re(lnk.clone())).cexp();
        if with_derivative {
            dsum = dsum - term.clone() * re(lnk);
        }
        sum = sum + term;
    }
    let big_n = T::from_i64(n as i64);
    let ln_n = re(big_n.ln());
    let n_pow = (-(s.clone()) * ln_n.clone()).cexp(); // N^{-s}
    let n_c = re(big_n.clone());
    let sm1 = s.clone() - one.clone();
    // N^{1-s}/(s-1)
    let tail = n_pow.clone() * n_c.clone() / sm1.clone();
    sum = sum + tail.clone() + n_pow.clone() * re(half::<T>());
    if with_derivative {
        dsum = dsum - tail.clone() * ln_n.clone() - tail / sm1;
        dsum = dsum - n_pow.clone() * ln_n.clone() * re(half::<T>());
    }
    // Σ_j B_{2j}/(2j)! · s(s+1)…(s+2j−2) · N^{−s−2j+1}
    let inv_n2 = re(T::one() / (big_n.clone() * big_n));
    let mut poch = s.clone();
    let mut dpoch = one.clone();
    let mut npow = n_pow / n_c; // N^{-s-1}
    for (j, c) in coeffs.iter().enumerate() {
        let j = j + 1;
        if j > 1 {
            for i in [2 * j - 3, 2 * j - 2] {
                let f = s.clone() + re(T::from_i64(i as i64));
                dpoch = dpoch * f.clone() + poch.clone();
                poch = poch * f;
            }
            npow = npow * inv_n2.clone();
        }
        let c = re(c.clone());
        sum = sum + c.clone() * poch.clone() * npow.clone();
        if with_derivative {
            dsum = dsum + c * (dpoch.clone() - poch.clone() * ln_n.clone()) * npow.clone();
        }
    }
    (sum, dsum)
}

/// `2(2π)^{−u}Γ(u)` and the trigonometric factors used by the reflection.
fn reflection_parts<T: Real>(u: &Complex<T>) -> (Complex<T>, Complex<T>, Complex<T>) {
    let two_pi = T::pi() * T::from_i64(2);
    let pre = (-(u.clone()) * re(two_pi.ln())).cexp() * re(T::from_i64(2))
        * gamma_oracle(u).expect("Re u > 1 is pole free");
    let arg = u.clone() * re(T::pi() / T::from_i64(2));
    (pre, arg.ccos(), arg.csin())
}

/// ζ(s) by Euler–Maclaurin, with the functional equation for `Re s < 0`.
pub fn zeta_oracle<T: Real>(s: &Complex<T>) -> Result<Complex<T>, OracleError> {
    if is_one(s) {
        return Err(OracleError::PoleAtOne);
    }
    if s.re < T::zero() {
        if s.is_real_integer() && s.re.to_f64() as i64 % 2 == 0 {
            return Ok(Complex::zero());
        }
        let u = Complex::<T>::one() - s.clone();
        let (pre, cos, _) = reflection_parts(&u);
        return Ok(pre * cos * zeta_em(&u, false).0);
    }
    Ok(zeta_em(s, false).0)
}

/// ζ′(s) by term-wise differentiated Euler–Maclaurin; for `Re s < 0` the
/// derivative of the functional equation is used.
pub fn zeta_prime_oracle<T: Real>(s: &Complex<T>) -> Result<Complex<T>, OracleError> {
    if is_one(s) {
        return Err(OracleError::PoleAtOne);
    }
    if s.re < T::zero() {
        let u = Complex::<T>::one() - s.clone();
        let (pre, cos, sin) = reflection_parts(&u);
        let (z, dz) = zeta_em(&u, true);
        let psi = digamma(&u).expect("Re u > 1 is pole free");
        let two_pi = re((T::pi() * T::from_i64(2)).ln());
        let half_pi = re(T::pi() / T::from_i64(2));
        let f = pre.clone() * cos.clone();
        let df = pre * ((psi - two_pi) * cos - half_pi * sin);
        return Ok(-(df * z + f * dz));
    }
    Ok(zeta_em(s, true).1)
}

/// Real-argument convenience wrapper.
pub fn zeta_real<T: Real>(x: T) -> Result<T, OracleError> {
    zeta_oracle(&re(x)).map(|z| z.re)
}

fn spouge_a<T: Real>() -> usize {
    (0.39 * T::BITS as f64).ceil() as usize + 2
}

/// Spouge coefficients `c_0 = √(2π)`, `c_k = (−1)^{k−1}/(k−1)!·(a−k)^{k−1/2}·e^{a−k}`.
fn spouge_coefficients<T: Real>() -> std::rc::Rc<Vec<T>> {
    let a = spouge_a::<T>();
    cached("spouge", a, || {
        let mut c = Vec::with_capacity(a);
        c.push((T::pi() * T::from_i64(2)).sqrt());
        let mut fact = T::one();
        for k in 1..a {
            if k > 1 {
                fact = fact * T::from_i64(k as i64 - 1);
            }
            let base = T::from_i64((a - k) as i64);
            let expo = (T::from_i64(k as i64) - half::<T>()) * base.ln() + base;
            let mag = expo.exp() / fact.clone();
            c.push(if k % 2 == 1 { mag } else { -mag });
        }
        c
    })
}

/// Γ(z) for `Re z ≥ 1/2` by Spouge's formula.
///
/// Spouge's sum cancels roughly a fifth of the working bits, so double
/// precision evaluates it at 128 bits and rounds back.
fn spouge<T: Real>(z: &Complex<T>) -> Complex<T> {
    if T::BITS <= 53 {
        let wide = Complex::new(Mp::<128>::from_f64(z.re.to_f64()), Mp::<128>::from_f64(z.im.to_f64()));
        let g = spouge(&wide);
        return Complex::new(T::from_f64(g.re.to_f64()), T::from_f64(g.im.to_f64()));
    }
    let a = spouge_a::<T>();
    let c = spouge_coefficients::<T>();
    let x = z.clone() - Complex::<T>::one();
    let mut sum = re(c[0].clone());
    for (k, ck) in c.iter().enumerate().skip(1) {
        sum = sum + re(ck.clone()) / (x.clone() + re(T::from_i64(k as i64)));
    }
    let xa = x.clone() + re(T::from_i64(a as i64));
    let expo = (x + re(half::<T>())) * xa.cln() - xa;
    expo.cexp() * sum
}

/// Γ(z), with reflection for `Re z < 1/2`.
pub fn gamma_oracle<T: Real>(z: &Complex<T>) -> Result<Complex<T>, OracleError> {
    if let Some(n) = nonpositive_integer(z) {
        return Err(OracleError::PoleAtNonPositiveInteger(n));
    }
    if z.re < half::<T>() {
        let pi = re(T::pi());
        let w = Complex::<T>::one() - z.clone();
        return Ok(pi.clone() / ((z.clone() * pi).csin() * spouge(&w)));
    }
    Ok(spouge(z))
}

/// 1/Γ(z); exactly zero at `0, −1, −2, …`.
pub fn reciprocal_gamma<T: Real>(z: &Complex<T>) -> Complex<T> {
    if nonpositive_integer(z).is_some() {
        return Complex::zero();
    }
    if z.re < half::<T>() {
        let pi = re(T::pi());
        let w = Complex::<T>::one() - z.clone();
        return (z.clone() * pi.clone()).csin() * spouge(&w) / pi;
    }
    Complex::<T>::one() / spouge(z)
}

/// Real-argument 1/Γ.
pub fn rgamma_real<T: Real>(x: &T) -> T {
    reciprocal_gamma(&re(x.clone())).re
}

/// Real-argument Γ.
pub fn gamma_real<T: Real>(x: &T) -> Result<T, OracleError> {
    gamma_oracle(&re(x.clone())).map(|g| g.re)
}

/// ψ(z) = Γ′/Γ by upward shifting and the asymptotic Bernoulli series.
pub fn digamma<T: Real>(z: &Complex<T>) -> Result<Complex<T>, OracleError> {
    if let Some(n) = nonpositive_integer(z) {
        return Err(OracleError::PoleAtNonPositiveInteger(n));
    }
    if z.re < half::<T>() {
        let pi = re(T::pi());
        let arg = z.clone() * pi.clone();
        let cot = arg.ccos() / arg.csin();
        return Ok(digamma(&(Complex::<T>::one() - z.clone()))? - pi * cot);
    }
    let p = T::BITS as f64;
    let threshold = T::from_f64((0.4 * p).ceil().max(10.0));
    let mut x = z.clone();
    let mut shift = Complex::zero();
    while x.cabs() < threshold {
        shift = shift + Complex::<T>::one() / x.clone();
        x = x + Complex::<T>::one();
    }
    let terms = (p / 8.0).ceil() as usize;
    let b = bernoulli_numbers(2 * terms, SignConvention::Classical);
    let inv2 = Complex::<T>::one() / (x.clone() * x.clone());
    let mut pow = inv2.clone();
    let mut acc = x.cln() - Complex::<T>::one() / (x.clone() * re(T::from_i64(2)));
    let tiny = T::epsilon() * acc.cabs();
    for k in 1..=terms {
        let c: T = T::from_rational(&(&b[2 * k] / ExactRational::from_integer((2 * k).into())));
        let term = pow.clone() * re(c);
        acc = acc - term.clone();
        if term.cabs() < tiny {
            break;
        }
        pow = pow * inv2.clone();
    }
    Ok(acc - shift)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c64;

    type M = Mp<256>;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn zeta_special_values_f64() {
        assert!(close(zeta_real(-1.0f64).unwrap(), -1.0 / 12.0, 1e-13));
        assert!(close(zeta_real(0.0f64).unwrap(), -0.5, 1e-14));
        let pi = std::f64::consts::PI;
        assert!(close(zeta_real(2.0f64).unwrap(), pi * pi / 6.0, 1e-14));
        assert!(close(zeta_real(3.0f64).unwrap(), 1.2020569031595942, 1e-14));
        assert_eq!(zeta_real(-4.0f64).unwrap(), 0.0);
        assert_eq!(zeta_oracle(&c64::<f64>(1.0, 0.0)), Err(OracleError::PoleAtOne));
    }

    #[test]
    fn zeta_two_at_256_bits() {
        let z = zeta_real(M::from_i64(2)).unwrap();
        let want = M::pi() * M::pi() / M::from_i64(6);
        let err = (z - want).abs();
        assert!(err < M::pow2(-128), "{err}");
    }

    #[test]
    fn zeta_critical_line_point() {
        // ζ(1/2 + 14.134725141734693i) is close to the first nontrivial zero
        let z = zeta_oracle(&c64::<M>(0.5, 14.134725141734693790)).unwrap();
        assert!(z.cabs().to_f64() < 1e-14);
    }

    #[test]
    fn zeta_prime_at_zero_and_minus_two() {
        let d0 = zeta_prime_oracle(&c64::<M>(0.0, 0.0)).unwrap().re;
        let want = -(M::pi() * M::from_i64(2)).ln() / M::from_i64(2);
        assert!((d0 - want).abs() < M::pow2(-100));
        let d2 = zeta_prime_oracle(&c64::<f64>(-2.0, 0.0)).unwrap().re;
        let pi = std::f64::consts::PI;
        let z3 = -4.0 * pi * pi * d2;
        assert!(close(z3, 1.2020569031595942, 1e-12), "{z3}");
    }

    #[test]
    fn gamma_values() {
        assert!(close(gamma_real(&5.0f64).unwrap(), 24.0, 1e-11));
        let half = gamma_real(&M::from_f64(0.5)).unwrap();
        assert!((half - M::pi().sqrt()).abs() < M::pow2(-190));
        let a = gamma_real(&3.01f64).unwrap();
        let b = gamma_real(&4.01f64).unwrap() / 3.01;
        assert!(close(a, b, 1e-11));
        assert_eq!(gamma_real(&-3.0f64), Err(OracleError::PoleAtNonPositiveInteger(-3)));
        assert!(close(gamma_real(&-0.5f64).unwrap(), -2.0 * std::f64::consts::PI.sqrt(), 1e-11));
    }

    #[test]
    fn reciprocal_gamma_values() {
        assert_eq!(rgamma_real(&0.0f64), 0.0);
        assert_eq!(rgamma_real(&-7.0f64), 0.0);
        assert!(close(rgamma_real(&1.0f64), 1.0, 1e-12));
        let r = rgamma_real(&0.01f64);
        assert!(close(r, 1.0 / gamma_real(&0.01f64).unwrap(), 1e-12));
        assert!(close(1.0 / r, 99.43258511915060, 1e-10));
    }

    #[test]
    fn digamma_values() {
        let euler_gamma = 0.5772156649015329;
        assert!(close(digamma(&c64::<f64>(1.0, 0.0)).unwrap().re, -euler_gamma, 1e-14));
        let d = digamma(&c64::<M>(0.5, 0.0)).unwrap().re.to_f64();
        assert!(close(d, -euler_gamma - 2.0 * std::f64::consts::LN_2, 1e-15));
        assert!(close(digamma(&c64::<f64>(-0.5, 0.0)).unwrap().re, 0.03648997397857652, 1e-12));
        assert!(digamma(&c64::<f64>(-2.0, 0.0)).is_err());
    }
}
