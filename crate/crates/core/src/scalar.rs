//! Scalar abstraction shared by every numerical module.
//!
//! All floating-point code in the crate is generic over [`Real`], which is
//! implemented for `f64` (53-bit mantissa) and for [`Mp`], a fixed-precision
//! multiprecision float backed by `astro-float`. Complex arithmetic uses
//! `num_complex::Complex<T>`; the elementary functions it lacks for non-`Float`
//! scalars live on [`ComplexFns`].

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign, Word};
use num_bigint::{BigInt, BigUint, Sign as BigSign};
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Working precision of a computation, in mantissa bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Precision {
    P53,
    P128,
    P256,
    P512,
}

impl Precision {
    pub const ALL: [Precision; 4] = [Self::P53, Self::P128, Self::P256, Self::P512];

    pub fn bits(self) -> u32 {
        match self {
            Self::P53 => 53,
            Self::P128 => 128,
            Self::P256 => 256,
            Self::P512 => 512,
        }
    }

    pub fn from_bits(bits: u32) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.bits() == bits)
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.bits())
    }
}

/// Run `$body` with the type alias `$t` bound to the scalar type of `$prec`.
#[macro_export]
macro_rules! with_precision {
    ($prec:expr, $t:ident => $body:expr) => {
        match $prec {
            $crate::Precision::P53 => {
                type $t = f64;
                $body
            }
            $crate::Precision::P128 => {
                type $t = $crate::Mp<128>;
                $body
            }
            $crate::Precision::P256 => {
                type $t = $crate::Mp<256>;
                $body
            }
            $crate::Precision::P512 => {
                type $t = $crate::Mp<512>;
                $body
            }
        }
    };
}

/// A real scalar of fixed binary precision.
pub trait Real:
    Num + Neg<Output = Self> + Clone + PartialOrd + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    /// Mantissa bits.
    const BITS: u32;

    fn precision() -> Precision {
        Precision::from_bits(Self::BITS).expect("scalar types carry a supported precision")
    }

    fn from_f64(x: f64) -> Self;
    fn from_i64(n: i64) -> Self;
    fn from_bigint(n: &BigInt) -> Self;
    fn from_rational(q: &BigRational) -> Self {
        Self::from_bigint(q.numer()) / Self::from_bigint(q.denom())
    }
    fn to_f64(&self) -> f64;

    /// Unit roundoff, `2^(1 - BITS)`.
    fn epsilon() -> Self;
    fn pi() -> Self;

    fn abs(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn atan2(&self, x: &Self) -> Self;
    fn floor(&self) -> Self;
    fn is_finite(&self) -> bool;

    /// Scientific notation with `digits` significant digits.
    fn to_sci(&self, digits: usize) -> String;

    fn powi(&self, n: i32) -> Self {
        let mut base = if n < 0 { Self::one() / self.clone() } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }

    /// `2^k` exactly.
    fn pow2(k: i32) -> Self {
        Self::from_i64(2).powi(k)
    }

    fn is_integer(&self) -> bool {
        self.is_finite() && self.floor() == *self
    }

    fn max_of(a: Self, b: Self) -> Self {
        if a >= b {
            a
        } else {
            b
        }
    }

    fn min_of(a: Self, b: Self) -> Self {
        if a <= b {
            a
        } else {
            b
        }
    }
}

impl Real for f64 {
    const BITS: u32 = 53;

    fn from_f64(x: f64) -> Self {
        x
    }
    fn from_i64(n: i64) -> Self {
        n as f64
    }
    fn from_bigint(n: &BigInt) -> Self {
        n.to_f64().unwrap_or(f64::NAN)
    }
    fn from_rational(q: &BigRational) -> Self {
        // Both parts may overflow f64 while the ratio does not.
        match (q.numer().to_f64(), q.denom().to_f64()) {
            (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
            _ => Mp::<128>::from_rational(q).to_f64(),
        }
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn epsilon() -> Self {
        f64::EPSILON
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn atan2(&self, x: &Self) -> Self {
        f64::atan2(*self, *x)
    }
    fn floor(&self) -> Self {
        f64::floor(*self)
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
    fn to_sci(&self, digits: usize) -> String {
        format!("{:.*e}", digits.saturating_sub(1), self)
    }
    fn powi(&self, n: i32) -> Self {
        f64::powi(*self, n)
    }
}

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constant cache"));
}

fn with_consts<R>(f: impl FnOnce(&mut Consts) -> R) -> R {
    CONSTS.with(|cc| f(&mut cc.borrow_mut()))
}

/// Binary floating point number with a `BITS`-bit mantissa.
#[derive(Clone)]
pub struct Mp<const BITS: usize>(BigFloat);

impl<const BITS: usize> Mp<BITS> {
    pub fn from_big_float(x: BigFloat) -> Self {
        let mut x = x;
        // Only fails on NaN/Inf, which keep their flavour.
        let _ = x.set_precision(BITS, RM);
        Mp(x)
    }

    pub fn as_big_float(&self) -> &BigFloat {
        &self.0
    }

    /// Exact value as `(integer mantissa, binary exponent)`, or `None` for 0/NaN/Inf.
    fn decompose(&self) -> Option<(BigInt, i64)> {
        let (words, _, sign, exp, _) = self.0.as_raw_parts()?;
        let mag = words_to_biguint(words);
        if mag.is_zero() {
            return None;
        }
        let shift = exp as i64 - 64 * words.len() as i64;
        let sign = if sign == Sign::Neg { BigSign::Minus } else { BigSign::Plus };
        Some((BigInt::from_biguint(sign, mag), shift))
    }

    /// Round to the nearest integer (ties away from zero).
    pub fn round_to_bigint(&self) -> BigInt {
        match self.decompose() {
            None => BigInt::zero(),
            Some((m, shift)) if shift >= 0 => m << shift as usize,
            Some((m, shift)) => {
                let k = (-shift) as usize;
                let half = BigInt::one() << (k - 1);
                let neg = m.is_negative();
                let r = (m.abs() + half) >> k;
                if neg {
                    -r
                } else {
                    r
                }
            }
        }
    }
}

fn words_to_biguint(words: &[Word]) -> BigUint {
    let mut digits: Vec<u32> = Vec::with_capacity(words.len() * 2);
    for w in words {
        digits.push(*w as u32);
        digits.push((*w >> 32) as u32);
    }
    BigUint::new(digits)
}

fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e as i32)
}

impl<const BITS: usize> Real for Mp<BITS> {
    const BITS: u32 = BITS as u32;

    fn from_f64(x: f64) -> Self {
        Mp(BigFloat::from_f64(x, BITS))
    }
    fn from_i64(n: i64) -> Self {
        Mp(BigFloat::from_i64(n, BITS))
    }
    fn from_bigint(n: &BigInt) -> Self {
        let (sign, digits) = n.to_u64_digits();
        if digits.is_empty() {
            return Self::zero();
        }
        let sign = if sign == BigSign::Minus { Sign::Neg } else { Sign::Pos };
        let exp = 64 * digits.len() as i32;
        Self::from_big_float(BigFloat::from_words(&digits, sign, exp))
    }
    fn from_rational(q: &BigRational) -> Self {
        // Extra guard bits so that only the final division rounds noticeably.
        let wide = |n: &BigInt| {
            let (sign, digits) = n.to_u64_digits();
            let sign = if sign == BigSign::Minus { Sign::Neg } else { Sign::Pos };
            let mut x = BigFloat::from_words(&digits, sign, 64 * digits.len() as i32);
            let _ = x.set_precision(BITS + 64, RM);
            x
        };
        if q.is_zero() {
            return Self::zero();
        }
        Mp(wide(q.numer()).div(&wide(q.denom()), BITS, RM))
    }
    fn to_f64(&self) -> f64 {
        if self.0.is_nan() {
            return f64::NAN;
        }
        if self.0.is_inf_pos() {
            return f64::INFINITY;
        }
        if self.0.is_inf_neg() {
            return f64::NEG_INFINITY;
        }
        let Some((words, _, sign, exp, _)) = self.0.as_raw_parts() else {
            return 0.0;
        };
        let n = words.len();
        if n == 0 || words[n - 1] == 0 {
            return 0.0;
        }
        let hi = words[n - 1] as f64;
        let lo = if n > 1 { words[n - 2] as f64 * 2f64.powi(-64) } else { 0.0 };
        let v = ldexp(hi + lo, exp as i64 - 64);
        if sign == Sign::Neg {
            -v
        } else {
            v
        }
    }
    fn epsilon() -> Self {
        Self::pow2(1 - BITS as i32)
    }
    fn pi() -> Self {
        Mp(with_consts(|cc| cc.pi(BITS, RM)))
    }
    fn abs(&self) -> Self {
        Mp(self.0.abs())
    }
    fn sqrt(&self) -> Self {
        Mp(self.0.sqrt(BITS, RM))
    }
    fn exp(&self) -> Self {
        Mp(with_consts(|cc| self.0.exp(BITS, RM, cc)))
    }
    fn ln(&self) -> Self {
        Mp(with_consts(|cc| self.0.ln(BITS, RM, cc)))
    }
    fn sin(&self) -> Self {
        Mp(with_consts(|cc| self.0.sin(BITS, RM, cc)))
    }
    fn cos(&self) -> Self {
        Mp(with_consts(|cc| self.0.cos(BITS, RM, cc)))
    }
    fn atan2(&self, x: &Self) -> Self {
        let pi = Self::pi();
        if x.0.is_zero() {
            return match self.partial_cmp(&Self::zero()) {
                Some(Ordering::Greater) => pi / Self::from_i64(2),
                Some(Ordering::Less) => -(pi / Self::from_i64(2)),
                _ => Self::zero(),
            };
        }
        let ratio = self.0.div(&x.0, BITS, RM);
        let base = Mp(with_consts(|cc| ratio.atan(BITS, RM, cc)));
        if x.0.is_positive() {
            base
        } else if self.0.is_negative() {
            base - pi
        } else {
            base + pi
        }
    }
    fn floor(&self) -> Self {
        Mp(self.0.floor())
    }
    fn is_finite(&self) -> bool {
        !(self.0.is_nan() || self.0.is_inf())
    }
    fn to_sci(&self, digits: usize) -> String {
        sci_from_exact(self.decompose(), digits, self.to_f64())
    }
    fn pow2(k: i32) -> Self {
        let mut x = BigFloat::from_word(1, BITS);
        x.set_exponent(k + 1);
        Mp(x)
    }
}

/// Decimal scientific notation of `m * 2^shift`, rounded to `digits` digits.
fn sci_from_exact(parts: Option<(BigInt, i64)>, digits: usize, approx: f64) -> String {
    let digits = digits.max(1);
    let Some((m, shift)) = parts else {
        return format!("{:.*e}", digits - 1, 0.0);
    };
    let neg = m.is_negative();
    let m = m.abs();
    let exact = if shift >= 0 {
        BigRational::from_integer(m << shift as usize)
    } else {
        BigRational::new(m, BigInt::one() << (-shift) as usize)
    };
    let mut e10 = approx.abs().log10().floor() as i64;
    let ten = BigInt::from(10);
    let lower = num_traits::pow(ten.clone(), digits - 1);
    let upper = num_traits::pow(ten.clone(), digits);
    let mut scaled;
    // The f64 estimate of the decade can be off by one either way.
    loop {
        let k = digits as i64 - 1 - e10;
        let factor = BigRational::from_integer(num_traits::pow(ten.clone(), k.unsigned_abs() as usize));
        let v = if k >= 0 { &exact * &factor } else { &exact / &factor };
        scaled = v.round().to_integer();
        if scaled >= upper {
            e10 += 1;
        } else if scaled < lower {
            e10 -= 1;
        } else {
            break;
        }
    }
    let s = scaled.to_string();
    let (head, tail) = s.split_at(1);
    let sign = if neg { "-" } else { "" };
    if tail.is_empty() {
        format!("{sign}{head}e{e10}")
    } else {
        format!("{sign}{head}.{tail}e{e10}")
    }
}

impl<const BITS: usize> fmt::Display for Mp<BITS> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().map(|p| p + 1).unwrap_or((BITS as f64 * std::f64::consts::LOG10_2) as usize);
        f.write_str(&self.to_sci(digits))
    }
}

impl<const BITS: usize> fmt::Debug for Mp<BITS> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mp<{BITS}>({})", self.to_sci(20))
    }
}

impl<const BITS: usize> PartialEq for Mp<BITS> {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

impl<const BITS: usize> PartialOrd for Mp<BITS> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

macro_rules! mp_binop {
    ($tr:ident, $method:ident, $op:ident) => {
        impl<const BITS: usize> $tr for Mp<BITS> {
            type Output = Self;
            fn $method(self, rhs: Self) -> Self {
                Mp(self.0.$op(&rhs.0, BITS, RM))
            }
        }
        impl<'a, const BITS: usize> $tr<&'a Mp<BITS>> for &'a Mp<BITS> {
            type Output = Mp<BITS>;
            fn $method(self, rhs: &'a Mp<BITS>) -> Mp<BITS> {
                Mp(self.0.$op(&rhs.0, BITS, RM))
            }
        }
    };
}

mp_binop!(Add, add, add);
mp_binop!(Sub, sub, sub);
mp_binop!(Mul, mul, mul);
mp_binop!(Div, div, div);

impl<const BITS: usize> Rem for Mp<BITS> {
    type Output = Self;
    fn rem(self, rhs: Self) -> Self {
        Mp(self.0.rem(&rhs.0))
    }
}

impl<const BITS: usize> Neg for Mp<BITS> {
    type Output = Self;
    fn neg(self) -> Self {
        Mp(self.0.neg())
    }
}

impl<const BITS: usize> Zero for Mp<BITS> {
    fn zero() -> Self {
        Mp(BigFloat::from_word(0, BITS))
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl<const BITS: usize> One for Mp<BITS> {
    fn one() -> Self {
        Mp(BigFloat::from_word(1, BITS))
    }
}

impl<const BITS: usize> Num for Mp<BITS> {
    type FromStrRadixErr = String;

    fn from_str_radix(s: &str, radix: u32) -> Result<Self, String> {
        if radix != 10 {
            return Err(format!("unsupported radix {radix}"));
        }
        let x = with_consts(|cc| BigFloat::parse(s, Radix::Dec, BITS, RM, cc));
        if x.is_nan() {
            Err(format!("not a number: {s:?}"))
        } else {
            Ok(Mp(x))
        }
    }
}

/// Elementary functions on `Complex<T>` for any [`Real`] scalar.
pub trait ComplexFns<T: Real> {
    fn cabs(&self) -> T;
    fn carg(&self) -> T;
    fn cexp(&self) -> Complex<T>;
    fn cln(&self) -> Complex<T>;
    fn csqrt(&self) -> Complex<T>;
    fn csin(&self) -> Complex<T>;
    fn ccos(&self) -> Complex<T>;
    /// Principal power `self^w`.
    fn cpow(&self, w: &Complex<T>) -> Complex<T>;
    fn is_real_integer(&self) -> bool;
}

impl<T: Real> ComplexFns<T> for Complex<T> {
    fn cabs(&self) -> T {
        let (a, b) = (self.re.abs(), self.im.abs());
        let (big, small) = if a >= b { (a, b) } else { (b, a) };
        if big.is_zero() {
            return big;
        }
        let r = small / big.clone();
        big * (T::one() + r.clone() * r).sqrt()
    }
    fn carg(&self) -> T {
        self.im.atan2(&self.re)
    }
    fn cexp(&self) -> Complex<T> {
        let m = self.re.exp();
        Complex::new(m.clone() * self.im.cos(), m * self.im.sin())
    }
    fn cln(&self) -> Complex<T> {
        Complex::new(self.cabs().ln(), self.carg())
    }
    fn csqrt(&self) -> Complex<T> {
        if self.im.is_zero() {
            return if self.re >= T::zero() {
                Complex::new(self.re.sqrt(), T::zero())
            } else {
                Complex::new(T::zero(), (-self.re.clone()).sqrt())
            };
        }
        let r = self.cabs();
        let two = T::from_i64(2);
        let a = ((r.clone() + self.re.clone()) / two.clone()).sqrt();
        let b = ((r - self.re.clone()) / two).sqrt();
        if self.im < T::zero() {
            Complex::new(a, -b)
        } else {
            Complex::new(a, b)
        }
    }
    fn csin(&self) -> Complex<T> {
        let (ch, sh) = cosh_sinh(&self.im);
        Complex::new(self.re.sin() * ch, self.re.cos() * sh)
    }
    fn ccos(&self) -> Complex<T> {
        let (ch, sh) = cosh_sinh(&self.im);
        Complex::new(self.re.cos() * ch, -(self.re.sin() * sh))
    }
    fn cpow(&self, w: &Complex<T>) -> Complex<T> {
        if self.is_zero() {
            return if w.is_zero() { Complex::one() } else { Complex::zero() };
        }
        (w.clone() * self.cln()).cexp()
    }
    fn is_real_integer(&self) -> bool {
        self.im.is_zero() && self.re.is_integer()
    }
}

fn cosh_sinh<T: Real>(x: &T) -> (T, T) {
    let e = x.exp();
    let inv = T::one() / e.clone();
    let two = T::from_i64(2);
    ((e.clone() + inv.clone()) / two.clone(), (e - inv) / two)
}

/// Lift a real into the complex plane.
pub fn re<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

/// Complex number from `f64` parts at precision `T`.
pub fn c64<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::from_f64(re), T::from_f64(im))
}

/// Convert a complex value to double precision.
pub fn to_c64<T: Real>(z: &Complex<T>) -> Complex<f64> {
    Complex::new(z.re.to_f64(), z.im.to_f64())
}

/// Convert between precisions through an exact rational when widening.
pub fn convert<S: Real, T: Real>(x: &S) -> T {
    if T::BITS <= 53 || S::BITS <= 53 {
        return T::from_f64(x.to_f64());
    }
    let v = x.to_f64();
    if v == 0.0 || !v.is_finite() {
        return T::from_f64(v);
    }
    // Split into a high f64 part and a remainder until the source is exhausted.
    let mut rest = x.clone();
    let mut acc = T::zero();
    for _ in 0..(S::BITS / 50 + 2) {
        let hi = rest.to_f64();
        if hi == 0.0 {
            break;
        }
        acc = acc + T::from_f64(hi);
        rest = rest - S::from_f64(hi);
    }
    acc
}
