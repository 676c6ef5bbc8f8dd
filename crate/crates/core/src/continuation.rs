//! Operator-series continuation of the Bernoulli numbers and what follows
//! from it: `B(s)`, `ζ(1−s)`, the nested ζ formula with its odd branch,
//! `B′(s)`, `B(−n)`, and the continued polynomials `B(s,w)`, `E(s,w)`.
//!
//! The series is
//!
//! ```text
//! B(s) = w^{s−1} Γ(1+s) ( 1/2 + Σ_{n≥1} a_n(s) T_n(w) )
//! a_n(s) = (−1)^n/n! Π_{k=1}^{n} (s−k)
//! T_n(w) = 1/2 + Σ_{m=1}^{n} (−1/w)^m C(n,m) B_{m+1}/(m+1)!
//! ```
//!
//! For integer `s` the product vanishes from `n = s` on and the sum is
//! finite. Elsewhere the terms decay only algebraically, roughly like
//! `n^{−Re s}`, while `T_n` oscillates with a period near `2πw`.

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::cache::cached;
use crate::cpoly;
use crate::exact::{bernoulli_numbers, factorial, ExactRational, SignConvention};
use crate::oracle::{digamma, gamma_oracle, rgamma_real, zeta_oracle, zeta_prime_oracle, OracleError};
use crate::scalar::{re, to_c64, ComplexFns, Precision, Real};

/// Controls for the outer series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesParams {
    /// Expansion parameter; `None` picks `max(2, 2/Re s)`.
    pub w: Option<f64>,
    /// Stop once three consecutive terms fall below `tol·|partial sum|`.
    pub tol: f64,
    /// Hard cap on the number of outer terms.
    pub n_cap: usize,
    /// Scalar used by the dynamically dispatched entry points.
    pub precision: Precision,
    /// Sum exactly this many outer terms and skip the stopping rule.
    pub fixed_terms: Option<usize>,
}

impl Default for SeriesParams {
    fn default() -> Self {
        SeriesParams { w: None, tol: 1e-12, n_cap: 200, precision: Precision::P128, fixed_terms: None }
    }
}

impl SeriesParams {
    pub fn with_w(w: f64) -> Self {
        SeriesParams { w: Some(w), ..Self::default() }
    }

    pub fn resolve_w(&self, re_s: f64) -> f64 {
        self.w.unwrap_or_else(|| if re_s > 0.0 { (2.0 / re_s).max(2.0) } else { 2.0 })
    }

    fn validate(&self) -> Result<(), SeriesError> {
        if let Some(w) = self.w {
            if !(w > 0.0 && w.is_finite()) {
                return Err(SeriesError::InvalidParams(format!("w must be positive, got {w}")));
            }
        }
        if self.n_cap < 8 {
            return Err(SeriesError::InvalidParams(format!("n_cap must be ≥ 8, got {}", self.n_cap)));
        }
        if !(self.tol > 0.0) {
            return Err(SeriesError::InvalidParams(format!("tol must be positive, got {}", self.tol)));
        }
        Ok(())
    }
}

/// A series result with its bookkeeping.
#[derive(Clone, Debug, PartialEq)]
pub struct ContinuedValue<T> {
    pub value: Complex<T>,
    pub terms_used: usize,
    pub w_used: f64,
    pub est_error: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SeriesError {
    /// The cap was reached; the partial sum is still reported.
    #[error("series not converged after {terms} terms (value {value}, estimated error {est_error:.3e})")]
    NotConverged { value: Complex<f64>, est_error: f64, terms: usize },
    #[error("Re(s) = {re_s} is not above 1/w = {}", 1.0 / w)]
    DomainError { re_s: f64, w: f64 },
    #[error("pole at s = 1")]
    PoleAtOne,
    #[error("invalid series parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

impl SeriesError {
    /// Partial value and error estimate carried by `NotConverged`.
    pub fn partial(&self) -> Option<(Complex<f64>, f64)> {
        match self {
            SeriesError::NotConverged { value, est_error, .. } => Some((*value, *est_error)),
            _ => None,
        }
    }
}

/// `B_{m+1}/(m+1)!` for `m = 0..len`.
fn inner_coefficients<T: Real>(len: usize) -> std::rc::Rc<Vec<T>> {
    cached("inner", len, || {
        let b = bernoulli_numbers(len + 1, SignConvention::Woon);
        (0..len)
            .map(|m| T::from_rational(&(&b[m + 1] / ExactRational::from_integer(factorial(m + 1)))))
            .collect()
    })
}

/// Raw outcome of summing the bracket `1/2 + Σ a_n T_n` (and its s-derivative).
struct Bracket<T> {
    sum: Complex<T>,
    dsum: Complex<T>,
    terms: usize,
    converged: bool,
    err: f64,
    derr: f64,
}

fn bracket<T: Real>(s: &Complex<T>, w: f64, params: &SeriesParams, derivative: bool) -> Bracket<T> {
    let cap = params.fixed_terms.unwrap_or(params.n_cap);
    let b = inner_coefficients::<T>(cap + 1);
    let wt = T::from_f64(w);
    let inv_w = -(T::one() / wt);
    let mut pw = Vec::with_capacity(cap + 1);
    pw.push(T::one());
    for m in 1..=cap {
        pw.push(pw[m - 1].clone() * inv_w.clone());
    }
    let pw_abs: Vec<f64> = pw.iter().map(|x| x.to_f64().abs()).collect();
    let b_abs: Vec<f64> = b.iter().map(|x| x.to_f64().abs()).collect();

    let half = re(T::one() / T::from_i64(2));
    let mut sum = half.clone();
    let mut dsum = Complex::<T>::zero();
    let mut a = Complex::<T>::one();
    let mut da = Complex::<T>::zero();
    let mut consec = 0usize;
    let mut terms = 0usize;
    let mut converged = false;
    let mut roundoff = 0.5f64;
    let mut droundoff = 0.0f64;
    let window = ((2.0 * std::f64::consts::PI * w).ceil() as usize).max(3);
    let mut recent: std::collections::VecDeque<f64> = Default::default();
    let mut drecent: std::collections::VecDeque<f64> = Default::default();

    for n in 1..=cap {
        let nt = re(T::from_i64(n as i64));
        let ratio = (nt.clone() - s.clone()) / nt.clone();
        if derivative {
            da = da * ratio.clone() - a.clone() / nt;
        }
        a = a * ratio;
        terms = n;
        if a.is_zero() && (!derivative || da.is_zero()) {
            converged = params.fixed_terms.is_none();
            break;
        }
        // T_n = 1/2 + Σ_m C(n,m) (−1/w)^m b_m
        let mut t = half.re.clone();
        let mut t_abs = 0.5f64;
        let mut c = T::one();
        let mut c_f = 1.0f64;
        for m in 1..=n {
            c = c * T::from_i64((n - m + 1) as i64) / T::from_i64(m as i64);
            c_f = c_f * (n - m + 1) as f64 / m as f64;
            t = t + c.clone() * pw[m].clone() * b[m].clone();
            t_abs += c_f * pw_abs[m] * b_abs[m];
        }
        let term = a.clone() * re(t.clone());
        let dterm = da.clone() * re(t);
        let a_abs = a.cabs().to_f64();
        let da_abs = da.cabs().to_f64();
        roundoff += a_abs * t_abs;
        droundoff += da_abs * t_abs;
        sum = sum + term.clone();
        let tmag = term.cabs().to_f64();
        recent.push_back(tmag);
        if recent.len() > window {
            recent.pop_front();
        }
        let mut small = tmag <= params.tol * sum.cabs().to_f64();
        if derivative {
            dsum = dsum + dterm.clone();
            let dmag = dterm.cabs().to_f64();
            drecent.push_back(dmag);
            if drecent.len() > window {
                drecent.pop_front();
            }
            small = small && dmag <= params.tol * dsum.cabs().to_f64().max(f64::MIN_POSITIVE);
        }
        consec = if small { consec + 1 } else { 0 };
        if params.fixed_terms.is_none() && consec >= 3 {
            converged = true;
            break;
        }
    }

    let eps = T::epsilon().to_f64();
    let re_s = s.re.to_f64();
    let tail = |recent: &std::collections::VecDeque<f64>| -> f64 {
        if recent.is_empty() {
            return 0.0;
        }
        let last3: f64 = recent.iter().rev().take(3).sum();
        let peak = recent.iter().cloned().fold(0.0, f64::max);
        last3.max(terms as f64 * peak / (re_s - 1.0).max(0.5))
    };
    let exact_stop = a.is_zero() && (!derivative || da.is_zero());
    let (trunc, dtrunc) = if exact_stop { (0.0, 0.0) } else { (tail(&recent), tail(&drecent)) };
    Bracket {
        sum,
        dsum,
        terms,
        converged,
        err: trunc + 4.0 * eps * roundoff * terms.max(1) as f64,
        derr: dtrunc + 4.0 * eps * droundoff * terms.max(1) as f64,
    }
}

fn check_domain<T: Real>(s: &Complex<T>, w: f64) -> Result<(), SeriesError> {
    let re_s = s.re.to_f64();
    if re_s * w <= 1.0 {
        return Err(SeriesError::DomainError { re_s, w });
    }
    Ok(())
}

fn finish<T: Real>(value: Complex<T>, terms: usize, w: f64, est_error: f64, converged: bool) -> Result<ContinuedValue<T>, SeriesError> {
    if converged {
        Ok(ContinuedValue { value, terms_used: terms, w_used: w, est_error })
    } else {
        let v = Complex::new(value.re.to_f64(), value.im.to_f64());
        Err(SeriesError::NotConverged { value: v, est_error, terms })
    }
}

fn pow_real<T: Real>(base: f64, expo: &Complex<T>) -> Complex<T> {
    (expo.clone() * re(T::from_f64(base).ln())).cexp()
}

/// `B(s)` from the operator series.
pub fn b_continued<T: Real>(s: &Complex<T>, params: &SeriesParams) -> Result<ContinuedValue<T>, SeriesError> {
    params.validate()?;
    let w = params.resolve_w(s.re.to_f64());
    check_domain(s, w)?;
    let br = bracket(s, w, params, false);
    let pre = pow_real(w, &(s.clone() - Complex::one())) * gamma_oracle(&(s.clone() + Complex::one()))?;
    let err = pre.cabs().to_f64() * br.err;
    let converged = br.converged || params.fixed_terms.is_some();
    finish(pre * br.sum, br.terms, w, err, converged)
}

/// `B′(s)`, the term-wise derivative of the operator series.
pub fn b_prime<T: Real>(s: &Complex<T>, params: &SeriesParams) -> Result<ContinuedValue<T>, SeriesError> {
    params.validate()?;
    let w = params.resolve_w(s.re.to_f64());
    check_domain(s, w)?;
    let br = bracket(s, w, params, true);
    let s1 = s.clone() + Complex::one();
    let pre = pow_real(w, &(s.clone() - Complex::one())) * gamma_oracle(&s1)?;
    let log_deriv = re(T::from_f64(w).ln()) + digamma(&s1)?;
    let value = pre.clone() * (br.sum * log_deriv.clone() + br.dsum);
    let err = pre.cabs().to_f64() * (log_deriv.cabs().to_f64() * br.err + br.derr);
    let converged = br.converged || params.fixed_terms.is_some();
    finish(value, br.terms, w, err, converged)
}

/// `ζ(1−s) = −B(s)/s`.
pub fn zeta_one_minus<T: Real>(s: &Complex<T>, params: &SeriesParams) -> Result<ContinuedValue<T>, SeriesError> {
    let b = b_continued(s, params).map_err(|e| scale_partial(e, -1.0 / to_c64(s)))?;
    let abs_s = s.cabs().to_f64();
    Ok(ContinuedValue {
        value: -(b.value / s.clone()),
        est_error: b.est_error / abs_s,
        ..b
    })
}

fn scale_partial(e: SeriesError, f: Complex<f64>) -> SeriesError {
    match e {
        SeriesError::NotConverged { value, est_error, terms } => {
            SeriesError::NotConverged { value: value * f, est_error: est_error * f.norm(), terms }
        }
        other => other,
    }
}

/// Odd positive integer, if `s` is one.
fn odd_integer<T: Real>(s: &Complex<T>) -> Option<i64> {
    if !s.is_real_integer() {
        return None;
    }
    let k = s.re.to_f64() as i64;
    (k > 0 && k % 2 == 1).then_some(k)
}

/// `ζ(s)` through the nested series
/// `ζ(s) = −(2π)^s/(2Γ(1+s)) · lim B(ŝ)/cos(πŝ/2)`.
///
/// At odd integers `s ≥ 3` the limit is `(−1)^{(s+1)/2}·2B′(s)/π`; at `s = 1`
/// it is a pole.
pub fn zeta_nested<T: Real>(s: &Complex<T>, params: &SeriesParams) -> Result<ContinuedValue<T>, SeriesError> {
    let two_pi = T::pi() * T::from_i64(2);
    let pre = -(s.clone() * re(two_pi.ln())).cexp()
        / (gamma_oracle(&(s.clone() + Complex::one()))? * re(T::from_i64(2)));
    match odd_integer(s) {
        Some(1) => Err(SeriesError::PoleAtOne),
        Some(k) => {
            let sign = if ((k + 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
            let f = pre.clone() * re(T::from_f64(2.0 * sign) / T::pi());
            let d = b_prime(s, params).map_err(|e| scale_partial(e, to_c64(&f)))?;
            let abs_f = f.cabs().to_f64();
            Ok(ContinuedValue { value: f * d.value, est_error: d.est_error * abs_f, ..d })
        }
        None => {
            let cos = (s.clone() * re(T::pi() / T::from_i64(2))).ccos();
            let f = pre / cos;
            let f64v = to_c64(&f);
            let b = b_continued(s, params).map_err(|e| scale_partial(e, f64v))?;
            let abs_f = f.cabs().to_f64();
            Ok(ContinuedValue { value: f * b.value, est_error: b.est_error * abs_f, ..b })
        }
    }
}

/// `B(−n) = n·ζ(n+1)`.
pub fn b_negative<T: Real>(n: u32) -> Result<T, SeriesError> {
    assert!(n >= 1, "b_negative needs n ≥ 1");
    let z = zeta_oracle(&re(T::from_i64(n as i64 + 1)))?;
    Ok(z.re * T::from_i64(n as i64))
}

/// Both odd-zeta routes for `ζ(2n+1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct OddZeta<T> {
    /// `(−1)^n (2π)^{2n+1}/(2n+1)! · B′(2n+1)/π` from the operator series.
    pub via_b_prime: ContinuedValue<T>,
    /// `(−1)^n (2π)^{2n+1}/((2n)! π) · ζ′(−2n)` from the oracle.
    pub via_zeta_prime: T,
}

pub fn zeta_odd<T: Real>(n: u32, params: &SeriesParams) -> Result<OddZeta<T>, SeriesError> {
    assert!(n >= 1, "zeta_odd needs n ≥ 1");
    let k = 2 * n as i64 + 1;
    let two_pi = T::pi() * T::from_i64(2);
    let sign = if n % 2 == 0 { T::one() } else { -T::one() };
    let pow = two_pi.powi(k as i32);
    let f28 = sign.clone() * pow.clone() / (T::from_bigint(&factorial(k as usize)) * T::pi());
    let f30 = sign * pow / (T::from_bigint(&factorial(k as usize - 1)) * T::pi());
    let zp = zeta_prime_oracle(&re(T::from_i64(-(k - 1))))?.re;
    let f28c = Complex::new(f28.to_f64(), 0.0);
    let d = b_prime(&re(T::from_i64(k)), params).map_err(|e| scale_partial(e, f28c))?;
    let abs_f = f28.abs().to_f64();
    Ok(OddZeta {
        via_b_prime: ContinuedValue { value: d.value * re(f28), est_error: d.est_error * abs_f, ..d },
        via_zeta_prime: f30 * zp,
    })
}

/// `B(s,w)` or `E(s,w)` as coefficients in ascending powers of `w`.
#[derive(Clone, Debug, PartialEq)]
pub struct ContinuedPoly<T> {
    pub s: T,
    pub coefficients: Vec<Complex<T>>,
    pub convention: SignConvention,
}

impl<T: Real> ContinuedPoly<T> {
    pub fn eval(&self, w: &Complex<T>) -> Complex<T> {
        cpoly::eval(&self.coefficients, w)
    }

    /// Degree after dropping top coefficients below `rel·max|c|`.
    pub fn effective_degree(&self, rel: f64) -> usize {
        let max = cpoly::max_abs(&self.coefficients).to_f64();
        let mut d = self.coefficients.len() - 1;
        while d > 0 && self.coefficients[d].cabs().to_f64() <= rel * max {
            d -= 1;
        }
        d
    }
}

/// `B(σ) = −σ·ζ(1−σ)`, with the removable point `B(0) = 1`.
pub fn b_via_zeta<T: Real>(sigma: &T) -> Result<T, SeriesError> {
    if sigma.is_zero() {
        return Ok(T::one());
    }
    let z = zeta_oracle(&re(T::one() - sigma.clone()))?;
    Ok(-(sigma.clone() * z.re))
}

/// Coefficients of the continued Bernoulli polynomial
/// `B(s,w) = Σ_{k=0}^{[s]+1} c_k w^{[s]+1−k}` with
/// `c_k = (−1)^{[s]+k+1} Γ(1+s) B(k−1+{s}) / (Γ(k+{s}) Γ(2+[s]−k))`.
///
/// At integer `s` the `k = 0` term carries `1/Γ(0) = 0` and the rest
/// reduce to the Woon-convention `B_s(w)`.
pub fn b_poly_continued<T: Real>(s: &T) -> Result<ContinuedPoly<T>, SeriesError> {
    if *s < T::one() {
        return Err(SeriesError::DomainError { re_s: s.to_f64(), w: 1.0 });
    }
    let int = s.floor();
    let frac = s.clone() - int.clone();
    let n = int.to_f64() as usize;
    let g = gamma_oracle(&re(s.clone() + T::one()))?.re;
    let mut coeffs = vec![Complex::<T>::zero(); n + 2];
    for k in 0..=n + 1 {
        let sigma = T::from_i64(k as i64 - 1) + frac.clone();
        let r1 = rgamma_real(&(T::from_i64(k as i64) + frac.clone()));
        if r1.is_zero() {
            continue;
        }
        let r2 = rgamma_real(&T::from_i64((n + 2 - k) as i64));
        let mut c = g.clone() * b_via_zeta(&sigma)? * r1 * r2;
        if (n + k + 1) % 2 == 1 {
            c = -c;
        }
        coeffs[n + 1 - k] = re(c);
    }
    Ok(ContinuedPoly { s: s.clone(), coefficients: coeffs, convention: SignConvention::Woon })
}

/// `E(s,w) = (2/(s+1))·(B^c(s+1, w) − 2^{s+1}·B^c(s+1, w/2))` where
/// `B^c(σ, w) = B(σ, 1−w)` is the classical-convention continuation.
pub fn e_poly_continued<T: Real>(s: &T) -> Result<ContinuedPoly<T>, SeriesError> {
    if *s < T::one() {
        return Err(SeriesError::DomainError { re_s: s.to_f64(), w: 1.0 });
    }
    let s1 = s.clone() + T::one();
    let b = b_poly_continued(&s1)?;
    let one = Complex::<T>::one();
    let half = re(T::one() / T::from_i64(2));
    let p1 = cpoly::compose_affine(&b.coefficients, &one, &-one.clone());
    let p2 = cpoly::compose_affine(&b.coefficients, &one, &-half);
    let scale = (s1.clone() * T::from_i64(2).ln()).exp();
    let pre = T::from_i64(2) / s1;
    let coeffs = p1
        .into_iter()
        .zip(p2)
        .map(|(a, b)| (a - b * re(scale.clone())) * re(pre.clone()))
        .collect();
    Ok(ContinuedPoly { s: s.clone(), coefficients: coeffs, convention: SignConvention::Classical })
}

/// `E(s) = 2^s·E(s, 1/2)`.
pub fn e_continued<T: Real>(s: &T) -> Result<T, SeriesError> {
    let p = e_poly_continued(s)?;
    let half = re(T::one() / T::from_i64(2));
    let v = p.eval(&half).re;
    Ok(v * (s.clone() * T::from_i64(2).ln()).exp())
}
