//! Reference values printed in the source tables, kept verbatim.

use num_complex::Complex;

use crate::scalar::{ComplexFns, Real};

/// Row of the zero-count table: degree, real zeros, complex zeros.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CountRow {
    pub n: usize,
    pub real: usize,
    pub complex: usize,
}

/// Inclusive degree ranges sharing a complex-zero count.
const COMPLEX_BLOCKS: [(usize, usize, usize); 16] = [
    (1, 5, 0),
    (6, 11, 4),
    (12, 16, 8),
    (17, 21, 12),
    (22, 26, 16),
    (27, 32, 20),
    (33, 37, 24),
    (38, 42, 28),
    (43, 47, 32),
    (48, 53, 36),
    (54, 58, 40),
    (59, 63, 44),
    (64, 68, 48),
    (69, 74, 52),
    (75, 79, 56),
    (80, 80, 60),
];

/// The full table, rows `n = 1..=80`.
pub fn count_table() -> Vec<CountRow> {
    COMPLEX_BLOCKS
        .iter()
        .flat_map(|&(lo, hi, c)| (lo..=hi).map(move |n| CountRow { n, real: n - c, complex: c }))
        .collect()
}

pub fn count_row(n: usize) -> Option<CountRow> {
    count_table().into_iter().find(|r| r.n == n)
}

/// Printed decimals of the zeros of `B_n`, as `(re, im)` pairs.
pub fn printed_zeros(n: usize) -> Option<&'static [(f64, f64)]> {
    const B2: [(f64, f64); 2] = [(0.21133, 0.0), (0.78868, 0.0)];
    const B3: [(f64, f64); 3] = [(0.0, 0.0), (0.5, 0.0), (1.0, 0.0)];
    const B4: [(f64, f64); 4] = [(-0.15770, 0.0), (0.24034, 0.0), (0.75967, 0.0), (1.15770, 0.0)];
    const B5: [(f64, f64); 5] = [(-0.26376, 0.0), (0.0, 0.0), (0.5, 0.0), (1.0, 0.0), (1.26376, 0.0)];
    const B7: [(f64, f64); 7] = [
        (-0.38137, -0.16376),
        (-0.38137, 0.16376),
        (0.0, 0.0),
        (0.5, 0.0),
        (1.0, 0.0),
        (1.38137, -0.16376),
        (1.38137, 0.16376),
    ];
    match n {
        2 => Some(&B2),
        3 => Some(&B3),
        4 => Some(&B4),
        5 => Some(&B5),
        7 => Some(&B7),
        _ => None,
    }
}

/// Radical expressions for the zeros of `B_n`, sorted by `(re, im)`.
pub fn closed_form_zeros<T: Real>(n: usize) -> Option<Vec<Complex<T>>> {
    let r = |x: T| Complex::new(x, T::zero());
    let i = |k: i64| T::from_i64(k);
    let half = r(T::one() / i(2));
    let mut out = match n {
        2 => {
            let d = r(T::one() / (i(2) * i(3).sqrt()));
            vec![half.clone() - d.clone(), half + d]
        }
        3 => vec![r(T::zero()), half, r(T::one())],
        4 => {
            let root30 = i(30).sqrt();
            let denom = i(2) * i(15).sqrt();
            let a = ((i(15) + i(2) * root30.clone()).sqrt() / denom.clone()).clone();
            let b = (i(15) - i(2) * root30).sqrt() / denom;
            vec![half.clone() - r(a.clone()), half.clone() - r(b.clone()), half.clone() + r(b), half + r(a)]
        }
        5 => {
            let d = r((i(7) / i(3)).sqrt() / i(2));
            vec![half.clone() - d.clone(), r(T::zero()), half.clone(), r(T::one()), half + d]
        }
        7 => {
            let denom = r(i(2) * i(3).sqrt());
            let up = Complex::new(i(9), i(2) * i(3).sqrt()).csqrt() / denom.clone();
            let down = Complex::new(i(9), -(i(2) * i(3).sqrt())).csqrt() / denom;
            vec![
                half.clone() - up.clone(),
                half.clone() - down.clone(),
                r(T::zero()),
                half.clone(),
                r(T::one()),
                half.clone() + up,
                half + down,
            ]
        }
        _ => return None,
    };
    out.sort_by(|a, b| (a.re.to_f64(), a.im.to_f64()).partial_cmp(&(b.re.to_f64(), b.im.to_f64())).unwrap());
    Some(out)
}

/// Printed coefficients of `B(2.01, w)` and `B(2.99, w)`, ascending in `w`.
pub const PRINTED_CONTINUED: [(f64, [f64; 4]); 2] = [
    (2.01, [0.16420, -0.99660, 1.00920, -0.00554]),
    (2.99, [0.00092, -0.50576, 1.50001, -0.98744]),
];
