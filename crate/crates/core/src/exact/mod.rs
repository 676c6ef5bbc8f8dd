//! Exact rational generation of Bernoulli and Euler numbers and polynomials.
//!
//! Three independent generators of the Bernoulli numbers live here: the
//! linear recurrence (production path), the binary operator tree and a
//! Hessenberg determinant. The latter two are exponential or cubic and are
//! kept as oracles for the first.

mod poly;
mod tree;

use std::fmt;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

pub use poly::{
    bernoulli_poly, difference_identity_check, euler_number, euler_number_sech, euler_poly,
    euler_poly_direct, generating_function_check, DifferenceReport, ExactPoly,
};
pub use tree::{
    apply_operator, determinant_s, tree_row_sum, tree_row_sum_capped, Branch, FormalTerm, TermBag,
    DEFAULT_TREE_CAP, MATERIALIZE_CAP,
};

pub type ExactRational = BigRational;

/// Sign convention for `B_1` and the Bernoulli polynomials.
///
/// `Woon` fixes `B_1 = +1/2`, the value the analytic continuation `B(s)`
/// takes at `s = 1`. The two conventions agree on every other `B_n`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SignConvention {
    Classical,
    #[default]
    Woon,
}

impl SignConvention {
    pub const ALL: [SignConvention; 2] = [SignConvention::Classical, SignConvention::Woon];

    fn slot(self) -> usize {
        match self {
            SignConvention::Classical => 0,
            SignConvention::Woon => 1,
        }
    }
}

impl fmt::Display for SignConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SignConvention::Classical => "classical",
            SignConvention::Woon => "woon",
        })
    }
}

impl std::str::FromStr for SignConvention {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "classical" => Ok(SignConvention::Classical),
            "woon" => Ok(SignConvention::Woon),
            other => Err(format!("unknown convention '{other}' (expected classical|woon)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExactError {
    #[error("tree row {n} exceeds the configured depth cap {cap}")]
    RowTooDeep { n: usize, cap: usize },
}

/// Process-wide memo of `B_0..B_k`, one table per convention.
///
/// Values are computed by the recurrence on a miss; the table only ever
/// grows, so a reader that sees a prefix sees correct values.
fn memo() -> &'static [RwLock<Vec<ExactRational>>; 2] {
    static TABLE: OnceLock<[RwLock<Vec<ExactRational>>; 2]> = OnceLock::new();
    TABLE.get_or_init(|| [RwLock::new(Vec::new()), RwLock::new(Vec::new())])
}

/// Exact `B_n` in the requested convention from the linear recurrence.
///
/// Classical: `Σ_{k=0}^{n} C(n+1,k) B_k = 0`.
/// Woon: `B_n = (−1)^{n+1}/(n+1) · Σ_{k<n} (−1)^k C(n+1,k) B_k`.
pub fn bernoulli_recurrence(n: usize, conv: SignConvention) -> ExactRational {
    bernoulli_numbers(n, conv).swap_remove(n)
}

/// `B_0..=B_n` as a vector.
pub fn bernoulli_numbers(n: usize, conv: SignConvention) -> Vec<ExactRational> {
    let lock = &memo()[conv.slot()];
    {
        let table = lock.read().unwrap_or_else(|e| e.into_inner());
        if table.len() > n {
            return table[..=n].to_vec();
        }
    }
    let mut table = lock.write().unwrap_or_else(|e| e.into_inner());
    while table.len() <= n {
        let m = table.len();
        let next = recurrence_step(&table, conv);
        debug_assert_eq!(table.len(), m);
        table.push(next);
    }
    table[..=n].to_vec()
}

/// `B_m` for `m = prev.len()` from the already known `B_0..B_{m-1}`.
fn recurrence_step(prev: &[ExactRational], conv: SignConvention) -> ExactRational {
    let n = prev.len();
    if n == 0 {
        return ExactRational::one();
    }
    // binom runs over C(n+1, k) for k = 0..n-1
    let mut binom = BigInt::one();
    let mut acc = ExactRational::zero();
    for (k, b) in prev.iter().enumerate() {
        if !b.is_zero() {
            let term = b * ExactRational::from_integer(binom.clone());
            match conv {
                SignConvention::Classical => acc += term,
                SignConvention::Woon if k % 2 == 0 => acc += term,
                SignConvention::Woon => acc -= term,
            }
        }
        binom = binom * BigInt::from(n + 1 - k) / BigInt::from(k + 1);
    }
    let scale = ExactRational::new(BigInt::one(), BigInt::from(n + 1));
    match conv {
        SignConvention::Classical => -acc * scale,
        SignConvention::Woon if n % 2 == 1 => acc * scale,
        SignConvention::Woon => -acc * scale,
    }
}

/// Binomial coefficient as a big integer.
pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut c = BigInt::one();
    for i in 0..k {
        c = c * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    c
}

pub fn factorial(n: usize) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Render an exact rational as `p/q` (or `p` when integral).
pub fn rational_to_string(q: &ExactRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parse `p/q`, `p` or a terminating decimal such as `-0.25`.
pub fn parse_rational(s: &str) -> Option<ExactRational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(ExactRational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let neg = int.starts_with('-');
        let whole: BigInt = match int.trim_start_matches(['-', '+']) {
            "" => BigInt::zero(),
            digits => digits.parse().ok()?,
        };
        let scale = BigInt::from(10).pow(frac.len() as u32);
        let mag = whole * &scale + frac.parse::<BigInt>().ok()?;
        let q = ExactRational::new(mag, scale);
        return Some(if neg { -q } else { q });
    }
    s.parse::<BigInt>().ok().map(ExactRational::from_integer)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> ExactRational {
        ExactRational::new(p.into(), d.into())
    }

    #[test]
    fn first_values_classical() {
        let b = bernoulli_numbers(8, SignConvention::Classical);
        let want = [q(1, 1), q(-1, 2), q(1, 6), q(0, 1), q(-1, 30), q(0, 1), q(1, 42), q(0, 1), q(-1, 30)];
        assert_eq!(b, want);
    }

    #[test]
    fn woon_differs_only_at_one() {
        let c = bernoulli_numbers(40, SignConvention::Classical);
        let w = bernoulli_numbers(40, SignConvention::Woon);
        assert_eq!(w[1], q(1, 2));
        for n in (0..=40).filter(|&n| n != 1) {
            assert_eq!(c[n], w[n], "n = {n}");
        }
    }

    #[test]
    fn b12_and_b20() {
        assert_eq!(bernoulli_recurrence(12, SignConvention::Woon), q(-691, 2730));
        assert_eq!(bernoulli_recurrence(20, SignConvention::Classical), q(-174611, 330));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(10, 3), BigInt::from(120));
        assert_eq!(binomial(3, 5), BigInt::zero());
        assert_eq!(factorial(6), BigInt::from(720));
    }

    #[test]
    fn rational_text_round_trip() {
        for s in ["-691/2730", "5", "0"] {
            assert_eq!(rational_to_string(&parse_rational(s).unwrap()), s);
        }
        assert_eq!(parse_rational("-0.25"), Some(q(-1, 4)));
        assert_eq!(parse_rational("2.5"), Some(q(5, 2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }

    #[test]
    fn convention_parse() {
        assert_eq!("Woon".parse::<SignConvention>(), Ok(SignConvention::Woon));
        assert!("other".parse::<SignConvention>().is_err());
        assert_eq!(SignConvention::default(), SignConvention::Woon);
    }
}
