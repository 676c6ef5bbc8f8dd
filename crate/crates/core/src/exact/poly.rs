use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{bernoulli_numbers, binomial, factorial, rational_to_string, ExactRational, SignConvention};
use crate::scalar::Real;

/// Polynomial with exact rational coefficients, ascending powers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactPoly {
    pub coefficients: Vec<ExactRational>,
    pub convention: SignConvention,
}

impl ExactPoly {
    /// Trailing zeros are trimmed; the zero polynomial keeps one entry.
    pub fn new(mut coefficients: Vec<ExactRational>, convention: SignConvention) -> Self {
        while coefficients.len() > 1 && coefficients.last().is_some_and(Zero::is_zero) {
            coefficients.pop();
        }
        if coefficients.is_empty() {
            coefficients.push(ExactRational::zero());
        }
        ExactPoly { coefficients, convention }
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn leading(&self) -> &ExactRational {
        &self.coefficients[self.degree()]
    }

    pub fn eval(&self, x: &ExactRational) -> ExactRational {
        self.coefficients
            .iter()
            .rev()
            .fold(ExactRational::zero(), |acc, c| acc * x + c)
    }

    pub fn to_real<T: Real>(&self) -> Vec<T> {
        self.coefficients.iter().map(T::from_rational).collect()
    }

    pub fn derivative(&self) -> ExactPoly {
        let coeffs = self
            .coefficients
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * ExactRational::from_integer(BigInt::from(k)))
            .collect();
        ExactPoly::new(coeffs, self.convention)
    }

    /// `p(x·a)` for a rational scale `a`.
    pub fn scale_argument(&self, a: &ExactRational) -> ExactPoly {
        let mut power = ExactRational::one();
        let mut coeffs = Vec::with_capacity(self.coefficients.len());
        for c in &self.coefficients {
            coeffs.push(c * &power);
            power *= a;
        }
        ExactPoly::new(coeffs, self.convention)
    }

    /// `p(x + a)`.
    pub fn shift(&self, a: &ExactRational) -> ExactPoly {
        let n = self.degree();
        let mut out = vec![ExactRational::zero(); n + 1];
        for (k, c) in self.coefficients.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            // c·(x+a)^k
            let mut a_pow = ExactRational::one();
            for j in (0..=k).rev() {
                out[j] += c * ExactRational::from_integer(binomial(k, j)) * &a_pow;
                a_pow *= a;
            }
        }
        ExactPoly::new(out, self.convention)
    }

    pub fn scaled(&self, f: &ExactRational) -> ExactPoly {
        ExactPoly::new(self.coefficients.iter().map(|c| c * f).collect(), self.convention)
    }

    pub fn sub(&self, other: &ExactPoly) -> ExactPoly {
        let len = self.coefficients.len().max(other.coefficients.len());
        let zero = ExactRational::zero();
        let coeffs = (0..len)
            .map(|k| {
                self.coefficients.get(k).unwrap_or(&zero) - other.coefficients.get(k).unwrap_or(&zero)
            })
            .collect();
        ExactPoly::new(coeffs, self.convention)
    }
}

impl fmt::Display for ExactPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (k, c) in self.coefficients.iter().enumerate() {
            if c.is_zero() && self.degree() > 0 {
                continue;
            }
            let c = rational_to_string(c);
            parts.push(match k {
                0 => c,
                1 => format!("({c})x"),
                _ => format!("({c})x^{k}"),
            });
        }
        f.write_str(&parts.join(" + "))
    }
}

/// Exact `B_n(x)`.
///
/// Classical: `Σ_k C(n,k) B_k x^{n−k}`. Woon: the same sum with the extra
/// sign `(−1)^{n+k}`, which makes it `(−1)^n` times the classical one.
pub fn bernoulli_poly(n: usize, conv: SignConvention) -> ExactPoly {
    let b = bernoulli_numbers(n, conv);
    let mut coeffs = vec![ExactRational::zero(); n + 1];
    for (k, bk) in b.iter().enumerate() {
        let mut c = bk * ExactRational::from_integer(binomial(n, k));
        if conv == SignConvention::Woon && (n + k) % 2 == 1 {
            c = -c;
        }
        coeffs[n - k] = c;
    }
    ExactPoly::new(coeffs, conv)
}

/// Outcome of testing `B_n(w+1) − B_n(w)` against `w^{n−1}`.
///
/// `holds_verbatim` compares with `w^{n−1}` exactly as usually quoted;
/// `holds_scaled` compares with the true difference `n·w^{n−1}` (times
/// `(−1)^n` in the Woon convention).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DifferenceReport {
    pub n: usize,
    pub convention: SignConvention,
    pub difference: ExactRational,
    pub verbatim_rhs: ExactRational,
    pub scaled_rhs: ExactRational,
    pub holds_verbatim: bool,
    pub holds_scaled: bool,
}

pub fn difference_identity_check(n: usize, w: &ExactRational, conv: SignConvention) -> DifferenceReport {
    assert!(n >= 1, "difference identity needs n ≥ 1");
    let p = bernoulli_poly(n, conv);
    let difference = p.eval(&(w + ExactRational::one())) - p.eval(w);
    let verbatim_rhs = pow_q(w, n - 1);
    let mut scaled_rhs = &verbatim_rhs * ExactRational::from_integer(BigInt::from(n));
    if conv == SignConvention::Woon && n % 2 == 1 {
        scaled_rhs = -scaled_rhs;
    }
    DifferenceReport {
        n,
        convention: conv,
        holds_verbatim: difference == verbatim_rhs,
        holds_scaled: difference == scaled_rhs,
        difference,
        verbatim_rhs,
        scaled_rhs,
    }
}

fn pow_q(x: &ExactRational, k: usize) -> ExactRational {
    (0..k).fold(ExactRational::one(), |acc, _| acc * x)
}

fn pow2_q(k: i64) -> ExactRational {
    let p = BigInt::one() << k.unsigned_abs();
    if k >= 0 {
        ExactRational::from_integer(p)
    } else {
        ExactRational::new(BigInt::one(), p)
    }
}

/// `E_n` through the Bernoulli relation,
/// `E_n = 2^n·(2/(n+1))·(B_{n+1}(1/2) − 2^{n+1} B_{n+1}(1/4))` (classical `B`).
pub fn euler_number(n: usize) -> ExactRational {
    euler_poly(n).eval(&ExactRational::new(1.into(), 2.into())) * pow2_q(n as i64)
}

/// `E_n = n!·[z^n] sech z`, by exact inversion of the cosine-hyperbolic series.
pub fn euler_number_sech(n: usize) -> ExactRational {
    let cosh: Vec<ExactRational> = (0..=n)
        .map(|k| {
            if k % 2 == 0 {
                ExactRational::new(BigInt::one(), factorial(k))
            } else {
                ExactRational::zero()
            }
        })
        .collect();
    let inv = series_reciprocal(&cosh);
    &inv[n] * ExactRational::from_integer(factorial(n))
}

/// `E_n(x) = (2/(n+1))·(B_{n+1}(x) − 2^{n+1}·B_{n+1}(x/2))` with classical `B`.
pub fn euler_poly(n: usize) -> ExactPoly {
    let b = bernoulli_poly(n + 1, SignConvention::Classical);
    let half = ExactRational::new(1.into(), 2.into());
    let b_half = b.scale_argument(&half).scaled(&pow2_q(n as i64 + 1));
    let pre = ExactRational::new(2.into(), BigInt::from(n + 1));
    let out = b.sub(&b_half).scaled(&pre);
    ExactPoly::new(out.coefficients, SignConvention::Classical)
}

/// `E_n(x) = Σ_r C(n,r)·E_r/2^r·(x − 1/2)^{n−r}`, with `E_r` from the sech series.
pub fn euler_poly_direct(n: usize) -> ExactPoly {
    let minus_half = ExactRational::new((-1).into(), 2.into());
    let mut total = ExactPoly::new(vec![ExactRational::zero()], SignConvention::Classical);
    for r in 0..=n {
        let e = euler_number_sech(r);
        if e.is_zero() {
            continue;
        }
        let c = e * ExactRational::from_integer(binomial(n, r)) * pow2_q(-(r as i64));
        let mut mono = vec![ExactRational::zero(); n - r + 1];
        mono[n - r] = c;
        let term = ExactPoly::new(mono, SignConvention::Classical).shift(&minus_half);
        total = total.sub(&term.scaled(&-ExactRational::one()));
    }
    total
}

/// Taylor coefficients of `1/f` for a series with `f[0] ≠ 0`.
fn series_reciprocal(f: &[ExactRational]) -> Vec<ExactRational> {
    let mut g: Vec<ExactRational> = Vec::with_capacity(f.len());
    let f0_inv = f[0].recip();
    for n in 0..f.len() {
        if n == 0 {
            g.push(f0_inv.clone());
            continue;
        }
        let mut acc = ExactRational::zero();
        for k in 1..=n {
            if !f[k].is_zero() {
                acc += &f[k] * &g[n - k];
            }
        }
        g.push(-acc * &f0_inv);
    }
    g
}

/// Largest `|[z^n] z/(e^z−1) − (±1)^n B_n/n!|` over `n ≤ n_max`.
///
/// The generating function is expanded by exact series division; the Woon
/// convention carries the `(−1)^n` factor.
pub fn generating_function_check(n_max: usize, conv: SignConvention) -> ExactRational {
    // (e^z − 1)/z = Σ z^k/(k+1)!
    let f: Vec<ExactRational> = (0..=n_max)
        .map(|k| ExactRational::new(BigInt::one(), factorial(k + 1)))
        .collect();
    let g = series_reciprocal(&f);
    let b = bernoulli_numbers(n_max, conv);
    let mut worst = ExactRational::zero();
    for n in 0..=n_max {
        let mut want = &b[n] / ExactRational::from_integer(factorial(n));
        if conv == SignConvention::Woon && n % 2 == 1 {
            want = -want;
        }
        let dev = (&g[n] - want).abs();
        if dev > worst {
            worst = dev;
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> ExactRational {
        ExactRational::new(p.into(), d.into())
    }

    fn qs(v: &[(i64, i64)]) -> Vec<ExactRational> {
        v.iter().map(|&(p, d)| q(p, d)).collect()
    }

    #[test]
    fn printed_woon_polynomials() {
        assert_eq!(bernoulli_poly(2, SignConvention::Woon).coefficients, qs(&[(1, 6), (-1, 1), (1, 1)]));
        assert_eq!(
            bernoulli_poly(3, SignConvention::Woon).coefficients,
            qs(&[(0, 1), (-1, 2), (3, 2), (-1, 1)])
        );
        assert_eq!(bernoulli_poly(0, SignConvention::Classical).coefficients, qs(&[(1, 1)]));
    }

    #[test]
    fn classical_b1_and_reflection() {
        let p = bernoulli_poly(1, SignConvention::Classical);
        assert_eq!(p.coefficients, qs(&[(-1, 2), (1, 1)]));
        // B_n(1 − x) = (−1)^n B_n(x) classically
        let p5 = bernoulli_poly(5, SignConvention::Classical);
        let x = q(2, 7);
        assert_eq!(p5.eval(&(q(1, 1) - &x)), -p5.eval(&x));
    }

    #[test]
    fn difference_reports() {
        let r = difference_identity_check(3, &q(0, 1), SignConvention::Woon);
        assert!(r.holds_verbatim && r.holds_scaled);
        let r = difference_identity_check(2, &q(1, 2), SignConvention::Classical);
        assert_eq!(r.difference, q(1, 1));
        assert!(!r.holds_verbatim);
        assert!(r.holds_scaled);
        let r = difference_identity_check(1, &q(7, 1), SignConvention::Classical);
        assert!(r.holds_verbatim);
        let r = difference_identity_check(1, &q(7, 1), SignConvention::Woon);
        assert_eq!(r.difference, q(-1, 1));
        assert!(!r.holds_verbatim && r.holds_scaled);
    }

    #[test]
    fn euler_numbers_both_routes() {
        let known = [1, 0, -1, 0, 5, 0, -61, 0, 1385, 0, -50521];
        for (n, &e) in known.iter().enumerate() {
            assert_eq!(euler_number(n), q(e, 1), "n = {n}");
            assert_eq!(euler_number_sech(n), q(e, 1), "n = {n}");
        }
    }

    #[test]
    fn euler_polys() {
        assert_eq!(euler_poly(0).coefficients, qs(&[(1, 1)]));
        assert_eq!(euler_poly(1).coefficients, qs(&[(-1, 2), (1, 1)]));
        assert_eq!(euler_poly(2).coefficients, qs(&[(0, 1), (-1, 1), (1, 1)]));
        assert!(euler_poly(5).eval(&q(1, 2)).is_zero());
        for n in 0..=12 {
            assert_eq!(euler_poly(n), euler_poly_direct(n), "n = {n}");
        }
    }

    #[test]
    fn generating_function() {
        for conv in SignConvention::ALL {
            assert!(generating_function_check(5, conv).is_zero());
            assert!(generating_function_check(30, conv).is_zero());
        }
    }

    #[test]
    fn poly_helpers() {
        let p = ExactPoly::new(qs(&[(1, 1), (2, 1), (0, 1)]), SignConvention::Classical);
        assert_eq!(p.degree(), 1);
        assert_eq!(p.derivative().coefficients, qs(&[(2, 1)]));
        assert_eq!(p.shift(&q(1, 1)).coefficients, qs(&[(3, 1), (2, 1)]));
        assert_eq!(p.to_string(), "1 + (2)x");
        let z = ExactPoly::new(vec![], SignConvention::Woon);
        assert_eq!(z.degree(), 0);
        assert!(z.leading().is_zero());
    }
}
