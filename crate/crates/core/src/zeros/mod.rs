//! Zeros of Bernoulli and Euler polynomials and their structural checks.
//!
//! Roots are found by Aberth–Ehrlich iteration at the working precision of
//! the scalar type, optionally seeded from a double-precision pre-solve,
//! then Newton-polished and symmetrized under conjugation and, for the exact
//! Bernoulli and Euler polynomials, under `w → 1−w`.

mod aberth;

use std::fmt;

use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::continuation::ContinuedPoly;
use crate::cpoly;
use crate::exact::{bernoulli_poly, euler_poly, ExactPoly, SignConvention};
use crate::scalar::{ComplexFns, Precision, Real};
use crate::with_precision;

/// Where a polynomial came from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum PolySource {
    BernoulliExact(usize),
    EulerExact(usize),
    Continued(f64),
    Custom,
}

impl PolySource {
    /// Value written to the `n_or_s` column.
    pub fn label(&self) -> String {
        match self {
            Self::BernoulliExact(n) | Self::EulerExact(n) => n.to_string(),
            Self::Continued(s) => format!("{s}"),
            Self::Custom => String::new(),
        }
    }

    /// Exact polynomials with the `w → 1−w` (anti)symmetry.
    fn reflects(&self) -> bool {
        matches!(self, Self::BernoulliExact(_) | Self::EulerExact(_))
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ZeroError {
    #[error("polynomial has degree zero or a vanishing leading coefficient")]
    InvalidDegree,
    #[error("root iteration did not converge within {sweeps} sweeps (degree {degree})")]
    NoConvergence { sweeps: usize, degree: usize },
}

/// A polynomial in ascending powers with provenance.
#[derive(Clone, Debug, PartialEq)]
pub struct PolySpec<T> {
    pub coefficients: Vec<Complex<T>>,
    pub degree: usize,
    pub source: PolySource,
    pub precision: Precision,
}

impl<T: Real> PolySpec<T> {
    /// Drops trailing exact zeros; fails on a constant.
    pub fn new(mut coefficients: Vec<Complex<T>>, source: PolySource) -> Result<Self, ZeroError> {
        while coefficients.last().is_some_and(|c| c.is_zero()) {
            coefficients.pop();
        }
        if coefficients.len() < 2 {
            return Err(ZeroError::InvalidDegree);
        }
        let degree = coefficients.len() - 1;
        Ok(PolySpec { coefficients, degree, source, precision: T::precision() })
    }

    pub fn from_exact(p: &ExactPoly, source: PolySource) -> Result<Self, ZeroError> {
        let coeffs = p.to_real::<T>().into_iter().map(|c| Complex::new(c, T::zero())).collect();
        Self::new(coeffs, source)
    }

    pub fn bernoulli(n: usize, conv: SignConvention) -> Result<Self, ZeroError> {
        Self::from_exact(&bernoulli_poly(n, conv), PolySource::BernoulliExact(n))
    }

    pub fn euler(n: usize) -> Result<Self, ZeroError> {
        Self::from_exact(&euler_poly(n), PolySource::EulerExact(n))
    }

    /// Continued polynomial with top coefficients below `rel·max|c|` removed.
    pub fn continued(p: &ContinuedPoly<T>, rel: f64) -> Result<Self, ZeroError> {
        let d = p.effective_degree(rel);
        Self::new(p.coefficients[..=d].to_vec(), PolySource::Continued(p.s.to_f64()))
    }

    fn has_real_coefficients(&self) -> bool {
        self.coefficients.iter().all(|c| c.im.is_zero())
    }
}

/// Controls for [`find_zeros`].
#[derive(Clone, Debug, PartialEq)]
pub struct FindOptions {
    pub max_sweeps: usize,
    /// Seed for the angular jitter of the starting circle.
    pub seed: u64,
    /// Starting points; the circle is used when absent or of the wrong length.
    pub initial: Option<Vec<Complex<f64>>>,
    /// Average paired roots to enforce the exact symmetries.
    pub symmetrize: bool,
}

impl Default for FindOptions {
    fn default() -> Self {
        FindOptions { max_sweeps: 500, seed: 0, initial: None, symmetrize: true }
    }
}

/// All zeros of one polynomial, sorted by `(re, im)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ZeroSet<T> {
    pub zeros: Vec<Complex<T>>,
    pub is_real: Vec<bool>,
    pub real_count: usize,
    pub complex_count: usize,
    pub classification_epsilon: f64,
    /// `max |p(z)| / max|c_k|` over the returned zeros.
    pub max_residual: f64,
    pub sweeps: usize,
    pub source: PolySource,
}

impl<T: Real> ZeroSet<T> {
    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    pub fn to_c64(&self) -> Vec<Complex<f64>> {
        self.zeros.iter().map(|z| Complex::new(z.re.to_f64(), z.im.to_f64())).collect()
    }

    /// CSV rows `n_or_s,index,re,im,is_real` without the header.
    pub fn csv_rows(&self) -> String {
        let label = self.source.label();
        let mut out = String::new();
        for (k, (z, real)) in self.zeros.iter().zip(&self.is_real).enumerate() {
            out.push_str(&format!("{label},{k},{},{},{real}\n", z.re.to_sci(25), z.im.to_sci(25)));
        }
        out
    }

    pub fn to_csv(&self) -> String {
        format!("{CSV_HEADER}\n{}", self.csv_rows())
    }
}

pub const CSV_HEADER: &str = "n_or_s,index,re,im,is_real";

/// One parsed CSV row.
#[derive(Clone, Debug, PartialEq)]
pub struct ZeroRow {
    pub n_or_s: String,
    pub index: usize,
    pub re: f64,
    pub im: f64,
    pub is_real: bool,
}

/// Parse a zero-set CSV, skipping any leading `#` comment lines.
pub fn parse_zero_csv(text: &str) -> Result<Vec<ZeroRow>, String> {
    let mut lines = text.lines().skip_while(|l| l.starts_with('#'));
    if lines.next() != Some(CSV_HEADER) {
        return Err("missing zero-set header".into());
    }
    lines
        .filter(|l| !l.is_empty())
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 5 {
                return Err(format!("expected 5 fields: {line}"));
            }
            let bad = |_| format!("malformed row: {line}");
            Ok(ZeroRow {
                n_or_s: f[0].to_string(),
                index: f[1].parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?,
                re: f[2].parse().map_err(|e: std::num::ParseFloatError| bad(e.to_string()))?,
                im: f[3].parse().map_err(|e: std::num::ParseFloatError| bad(e.to_string()))?,
                is_real: f[4].parse().map_err(|e: std::str::ParseBoolError| bad(e.to_string()))?,
            })
        })
        .collect()
}

fn key<T: Real>(z: &Complex<T>) -> (T, T) {
    (z.re.clone(), z.im.clone())
}

fn sort_roots<T: Real>(roots: &mut [Complex<T>]) {
    roots.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap_or(std::cmp::Ordering::Equal));
}

/// `2^{−p/4}`, the realness threshold at `p` bits.
pub fn classification_epsilon(bits: u32) -> f64 {
    2f64.powf(-(bits as f64) / 4.0)
}

/// Every root of `p`.
pub fn find_zeros<T: Real>(p: &PolySpec<T>, opts: &FindOptions) -> Result<ZeroSet<T>, ZeroError> {
    let n = p.degree;
    let coeffs = &p.coefficients[..=n];
    if n == 0 || coeffs[n].is_zero() {
        return Err(ZeroError::InvalidDegree);
    }
    let (mut roots, sweeps) = if n == 1 {
        (vec![-(coeffs[0].clone() / coeffs[1].clone())], 0)
    } else {
        solve(coeffs, opts)?
    };
    aberth::polish(coeffs, &mut roots, 4);

    let eps = classification_epsilon(T::BITS);
    let real_coeffs = p.has_real_coefficients();
    if real_coeffs {
        for z in roots.iter_mut() {
            if z.im.abs().to_f64() < eps * (1.0 + z.re.abs().to_f64()) {
                z.im = T::zero();
            }
        }
    }
    if opts.symmetrize {
        if real_coeffs {
            pair_conjugates(&mut roots);
        }
        if p.source.reflects() {
            reflect_pairs(&mut roots);
        }
    }
    sort_roots(&mut roots);

    let is_real: Vec<bool> = if real_coeffs {
        roots.iter().map(|z| z.im.abs().to_f64() < eps * (1.0 + z.re.abs().to_f64())).collect()
    } else {
        vec![false; n]
    };
    let real_count = is_real.iter().filter(|&&r| r).count();
    let scale = cpoly::max_abs(coeffs);
    let max_residual = roots
        .iter()
        .map(|z| (cpoly::eval(coeffs, z).cabs() / scale.clone()).to_f64())
        .fold(0.0, f64::max);
    Ok(ZeroSet {
        zeros: roots,
        is_real,
        real_count,
        complex_count: n - real_count,
        classification_epsilon: eps,
        max_residual,
        sweeps,
        source: p.source,
    })
}

fn solve<T: Real>(coeffs: &[Complex<T>], opts: &FindOptions) -> Result<(Vec<Complex<T>>, usize), ZeroError> {
    let n = coeffs.len() - 1;
    let c64 = aberth::to_f64_coeffs(coeffs);
    let usable = c64.iter().all(|c| c.re.is_finite() && c.im.is_finite()) && c64[n].norm() > 0.0;
    let start: Vec<Complex<f64>> = match &opts.initial {
        Some(v) if v.len() == n => aberth::unsettle(v, opts.seed),
        _ if usable => aberth::initial_guesses(&c64, opts.seed),
        _ => (0..n)
            .map(|k| Complex::from_polar(1.0, std::f64::consts::TAU * (k as f64 + 0.25) / n as f64))
            .collect(),
    };
    let tol_t = T::epsilon().to_f64().powf(2.0 / 3.0);
    let lifted = |v: &[Complex<f64>]| v.iter().map(aberth::lift::<T>).collect::<Vec<_>>();

    let mut seeds = lifted(&start);
    let mut pre_sweeps = 0;
    if T::BITS > 53 && usable {
        let pre = aberth::iterate(&c64, start.clone(), opts.max_sweeps, f64::EPSILON.powf(2.0 / 3.0));
        if pre.converged {
            seeds = lifted(&pre.roots);
            pre_sweeps = pre.sweeps;
        }
    }
    let out = aberth::iterate(coeffs, seeds, opts.max_sweeps, tol_t);
    if out.converged {
        return Ok((out.roots, pre_sweeps + out.sweeps));
    }
    if pre_sweeps > 0 {
        let retry = aberth::iterate(coeffs, lifted(&start), opts.max_sweeps, tol_t);
        if retry.converged {
            return Ok((retry.roots, retry.sweeps));
        }
    }
    Err(ZeroError::NoConvergence { sweeps: opts.max_sweeps, degree: n })
}

/// Replace each non-real root and its nearest conjugate partner by their average.
fn pair_conjugates<T: Real>(roots: &mut [Complex<T>]) {
    let n = roots.len();
    let mut used = vec![false; n];
    for i in 0..n {
        if used[i] || roots[i].im.is_zero() || roots[i].im < T::zero() {
            continue;
        }
        let target = roots[i].conj();
        let partner = (0..n)
            .filter(|&j| j != i && !used[j] && roots[j].im < T::zero())
            .min_by(|&a, &b| {
                let da = (roots[a].clone() - target.clone()).cabs();
                let db = (roots[b].clone() - target.clone()).cabs();
                da.partial_cmp(&db).unwrap_or(std::cmp::Ordering::Equal)
            });
        if let Some(j) = partner {
            let half = T::one() / T::from_i64(2);
            let avg = (roots[i].clone() + roots[j].conj()) * half;
            roots[j] = avg.conj();
            roots[i] = avg;
            used[i] = true;
            used[j] = true;
        }
    }
}

/// Average `z_i` with `1 − z_{n−1−i}` after a lexicographic sort.
///
/// Pairs whose images disagree by more than the square root of the working
/// epsilon are left alone: the sort cannot be trusted to pair them.
fn reflect_pairs<T: Real>(roots: &mut [Complex<T>]) {
    sort_roots(roots);
    let n = roots.len();
    let one = Complex::<T>::one();
    let half = T::one() / T::from_i64(2);
    let guard = T::epsilon().sqrt();
    for i in 0..n.div_ceil(2) {
        let j = n - 1 - i;
        let image = one.clone() - roots[j].clone();
        let gap = (roots[i].clone() - image.clone()).cabs();
        if gap.to_f64() > guard.to_f64() * (1.0 + roots[i].cabs().to_f64()) {
            continue;
        }
        let avg = (roots[i].clone() + image) * half.clone();
        roots[j] = one.clone() - avg.clone();
        roots[i] = avg;
    }
}

/// Zeros of the exact `B_n` in the given convention.
pub fn bernoulli_zeros<T: Real>(n: usize, conv: SignConvention, opts: &FindOptions) -> Result<ZeroSet<T>, ZeroError> {
    find_zeros(&PolySpec::<T>::bernoulli(n, conv)?, opts)
}

/// `(z_R, z_C)` with offset `δ = ⌊(n+31)/21⌋`, which reproduces every row of
/// the tabulated counts.
pub fn count_zeros_formula(n: usize) -> (usize, usize) {
    counts_with_offset(n, 31)
}

/// `(z_R, z_C)` with the printed offset `δ = ⌊(n+30)/21⌋`; this disagrees
/// with the table at `n = 11, 32, 53, 74`.
pub fn count_zeros_formula_printed(n: usize) -> (usize, usize) {
    counts_with_offset(n, 30)
}

fn counts_with_offset(n: usize, offset: usize) -> (usize, usize) {
    let delta = (n + offset) / 21;
    let c = 4 * (n.saturating_sub(delta) / 5);
    (n - c, c)
}

/// Working precision sufficient to separate the zeros of `B_n`.
pub fn precision_for_degree(n: usize) -> Precision {
    match n {
        0..=20 => Precision::P53,
        21..=60 => Precision::P256,
        _ => Precision::P512,
    }
}

/// Computed `(z_R, z_C)` for `B_n` at precision `p`.
pub fn computed_counts(n: usize, p: Precision) -> Result<(usize, usize), ZeroError> {
    with_precision!(p, T => {
        let z = bernoulli_zeros::<T>(n, SignConvention::Woon, &FindOptions::default())?;
        Ok((z.real_count, z.complex_count))
    })
}

/// Whether the computed split agrees with [`count_zeros_formula`].
pub fn verify_counts(n: usize, p: Precision) -> Result<bool, ZeroError> {
    Ok(computed_counts(n, p)? == count_zeros_formula(n))
}

/// Whether the zero multiset is closed under `w → 1−w` and `w → w̄`,
/// each image matched to a distinct zero within `tol`.
pub fn check_symmetries<T: Real>(zs: &ZeroSet<T>, tol: f64) -> bool {
    let one = Complex::<T>::one();
    let reflect: Vec<_> = zs.zeros.iter().map(|z| one.clone() - z.clone()).collect();
    let conj: Vec<_> = zs.zeros.iter().map(|z| z.conj()).collect();
    matched(&zs.zeros, &reflect, tol) && matched(&zs.zeros, &conj, tol)
}

fn matched<T: Real>(set: &[Complex<T>], images: &[Complex<T>], tol: f64) -> bool {
    let tol = T::from_f64(tol);
    let mut used = vec![false; set.len()];
    images.iter().all(|w| {
        let best = (0..set.len())
            .filter(|&j| !used[j])
            .map(|j| (j, (set[j].clone() - w.clone()).cabs()))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
        match best {
            Some((j, d)) if d <= tol => {
                used[j] = true;
                true
            }
            _ => false,
        }
    })
}

/// `B_n(1/2) = 0` in exact arithmetic for every odd `n ≤ n_max_odd`, in both
/// conventions.
pub fn central_zero_check(n_max_odd: usize) -> bool {
    let half = BigRational::new(1.into(), 2.into());
    (1..=n_max_odd)
        .step_by(2)
        .all(|n| SignConvention::ALL.iter().all(|&c| bernoulli_poly(n, c).eval(&half).is_zero()))
}

/// Real zeros of `B_n` with the outermost pair removed when there are more
/// than two.
fn inner_real_zeros<T: Real>(z: &ZeroSet<T>) -> Vec<T> {
    let mut reals: Vec<T> = z.zeros.iter().zip(&z.is_real).filter(|(_, &r)| r).map(|(w, _)| w.re.clone()).collect();
    reals.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    if reals.len() > 2 {
        reals.pop();
        reals.remove(0);
    }
    reals
}

/// Largest distance of an inner real zero of `B_n` from the lattice `Z/2`
/// (odd `n`) or `Z/2 + 1/4` (even `n`).
pub fn lattice_deviation(n: usize, p: Precision) -> Result<f64, ZeroError> {
    with_precision!(p, T => {
        let z = bernoulli_zeros::<T>(n, SignConvention::Woon, &FindOptions::default())?;
        let shift = if n % 2 == 0 { 0.25 } else { 0.0 };
        Ok(inner_real_zeros(&z)
            .iter()
            .map(|x| {
                let y = x.to_f64() - shift;
                (y - (2.0 * y).round() / 2.0).abs()
            })
            .fold(0.0, f64::max))
    })
}

/// Largest Newton distance `|E_n(x)/E_n′(x)|` at `x = 2w_B − 1/2` over the
/// inner real zeros `w_B` of `B_n`: how far each doubled Bernoulli zero sits
/// from a zero of `E_n`, to first order. The complex and outermost zeros do
/// not follow the doubling and are left out.
pub fn euler_bernoulli_zero_map(n: usize, p: Precision) -> Result<f64, ZeroError> {
    with_precision!(p, T => {
        let z = bernoulli_zeros::<T>(n, SignConvention::Classical, &FindOptions::default())?;
        let e = PolySpec::<T>::euler(n)?;
        let half = T::one() / T::from_i64(2);
        Ok(inner_real_zeros(&z)
            .into_iter()
            .map(|w| {
                let x = Complex::new(T::from_i64(2) * w - half.clone(), T::zero());
                let (v, d) = cpoly::eval_with_derivative(&e.coefficients, &x);
                if v.is_zero() {
                    0.0
                } else {
                    (v.cabs() / d.cabs()).to_f64()
                }
            })
            .fold(0.0, f64::max))
    })
}

/// Smallest pairwise distance among the zeros of `B_n`; `+∞` for `n = 1`.
pub fn nondegeneracy_check(n: usize, p: Precision) -> Result<f64, ZeroError> {
    with_precision!(p, T => {
        let z = bernoulli_zeros::<T>(n, SignConvention::Woon, &FindOptions::default())?;
        Ok(min_gap(&z.zeros))
    })
}

pub fn min_gap<T: Real>(zs: &[Complex<T>]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..zs.len() {
        for j in i + 1..zs.len() {
            best = best.min((zs[i].clone() - zs[j].clone()).cabs().to_f64());
        }
    }
    best
}

/// Hausdorff distance between two finite point sets.
pub fn hausdorff(a: &[Complex<f64>], b: &[Complex<f64>]) -> f64 {
    let one_way = |x: &[Complex<f64>], y: &[Complex<f64>]| {
        x.iter()
            .map(|p| y.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

impl fmt::Display for PolySource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::BernoulliExact(n) => write!(f, "B_{n}"),
            Self::EulerExact(n) => write!(f, "E_{n}"),
            Self::Continued(s) => write!(f, "B({s}, w)"),
            Self::Custom => write!(f, "custom"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::R256;

    #[test]
    fn quadratic_roots() {
        let z = bernoulli_zeros::<f64>(2, SignConvention::Woon, &FindOptions::default()).unwrap();
        let d = 1.0 / (2.0 * 3f64.sqrt());
        assert!((z.zeros[0].re - (0.5 - d)).abs() < 1e-14);
        assert!((z.zeros[1].re - (0.5 + d)).abs() < 1e-14);
        assert_eq!((z.real_count, z.complex_count), (2, 0));
    }

    #[test]
    fn counts_formula_rows() {
        assert_eq!(count_zeros_formula(6), (2, 4));
        assert_eq!(count_zeros_formula(12), (4, 8));
        assert_eq!(count_zeros_formula(80), (20, 60));
        assert_eq!(count_zeros_formula(11), (7, 4));
        assert_eq!(count_zeros_formula_printed(11), (3, 8));
    }

    #[test]
    fn central_zero_at_256_bits() {
        let z = bernoulli_zeros::<R256>(9, SignConvention::Woon, &FindOptions::default()).unwrap();
        assert!(z.zeros.iter().any(|w| w.re == R256::from_f64(0.5) && w.im.is_zero()));
    }

    #[test]
    fn single_point_set_is_symmetric() {
        let z = bernoulli_zeros::<f64>(1, SignConvention::Woon, &FindOptions::default()).unwrap();
        assert_eq!(z.zeros, vec![Complex::new(0.5, 0.0)]);
        assert!(check_symmetries(&z, 1e-12));
        assert_eq!(nondegeneracy_check(1, Precision::P53).unwrap(), f64::INFINITY);
    }
}
