//! The golden suite: every tabulated value re-derived and compared.

use crate::continuation::b_poly_continued;
use crate::exact::SignConvention;
use crate::golden::{closed_form_zeros, count_table, printed_zeros, PRINTED_CONTINUED};
use crate::scalar::{ComplexFns, Real};
use crate::zeros::{bernoulli_zeros, computed_counts, count_zeros_formula, precision_for_degree, FindOptions};
use crate::{R128, R256};

#[derive(Clone, Debug, PartialEq)]
pub struct GoldenCheck {
    pub section: &'static str,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Absolute tolerance on the printed five-decimal coefficients.
pub const COEFF_TOL: f64 = 2e-4;
/// Absolute tolerance on printed zero decimals.
pub const ZERO_TOL: f64 = 1e-5;

/// Run every check; `slow` adds the degree-80 table row.
pub fn golden_suite(slow: bool) -> Vec<GoldenCheck> {
    let mut out = Vec::new();
    continued_coefficients(&mut out);
    zero_decimals(&mut out);
    count_rows(if slow { 80 } else { 60 }, &mut out);
    out
}

fn continued_coefficients(out: &mut Vec<GoldenCheck>) {
    let printed: [(f64, [f64; 4]); 4] = [
        (2.0, [0.16667, -1.0, 1.0, 0.0]),
        PRINTED_CONTINUED[0],
        PRINTED_CONTINUED[1],
        (3.0, [0.0, -0.5, 1.5, -1.0]),
    ];
    for (s, want) in printed {
        let check = match b_poly_continued(&R128::from_f64(s)) {
            Ok(p) => {
                let got: Vec<f64> = p.coefficients.iter().map(|c| c.re.to_f64()).collect();
                let err = got.iter().zip(want).map(|(g, w)| (g - w).abs()).fold(0.0, f64::max);
                let shown: Vec<String> = got.iter().take(4).map(|g| format!("{g:.5}")).collect();
                GoldenCheck {
                    section: "continued polynomial",
                    name: format!("B({s}, w)"),
                    passed: err <= COEFF_TOL,
                    detail: format!("[{}] max |err| {err:.1e}", shown.join(", ")),
                }
            }
            Err(e) => GoldenCheck { section: "continued polynomial", name: format!("B({s}, w)"), passed: false, detail: e.to_string() },
        };
        out.push(check);
    }
}

fn zero_decimals(out: &mut Vec<GoldenCheck>) {
    for n in [2, 3, 4, 5, 7] {
        let name = format!("zeros of B_{n}");
        let printed = printed_zeros(n).unwrap();
        let exact = closed_form_zeros::<R256>(n).unwrap();
        let check = match bernoulli_zeros::<R256>(n, SignConvention::Woon, &FindOptions::default()) {
            Ok(z) => {
                let vs_printed = z
                    .zeros
                    .iter()
                    .zip(printed)
                    .map(|(g, &(x, y))| (g.re.to_f64() - x).abs().max((g.im.to_f64() - y).abs()))
                    .fold(0.0, f64::max);
                let vs_radicals = z
                    .zeros
                    .iter()
                    .zip(&exact)
                    .map(|(g, e)| (g.clone() - e.clone()).cabs().to_f64())
                    .fold(0.0, f64::max);
                GoldenCheck {
                    section: "closed-form zeros",
                    name,
                    passed: vs_printed <= ZERO_TOL && vs_radicals < 1e-60,
                    detail: format!("vs decimals {vs_printed:.1e}, vs radicals {vs_radicals:.1e}"),
                }
            }
            Err(e) => GoldenCheck { section: "closed-form zeros", name, passed: false, detail: e.to_string() },
        };
        out.push(check);
    }
}

fn count_rows(n_max: usize, out: &mut Vec<GoldenCheck>) {
    for row in count_table().into_iter().filter(|r| r.n <= n_max) {
        let want = (row.real, row.complex);
        let formula = count_zeros_formula(row.n);
        let (passed, detail) = match computed_counts(row.n, precision_for_degree(row.n)) {
            Ok(c) => (
                c == want && formula == want,
                format!("table {want:?}, formula {formula:?}, computed {c:?}"),
            ),
            Err(e) => (false, e.to_string()),
        };
        out.push(GoldenCheck { section: "zero counts", name: format!("n = {}", row.n), passed, detail });
    }
}
