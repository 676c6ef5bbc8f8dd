use std::fmt::Write as _;
use std::path::PathBuf;

use bernoulli_core::continuation::{b_poly_continued, zeta_nested, zeta_odd, ContinuedValue, SeriesError, SeriesParams};
use bernoulli_core::exact::{
    bernoulli_recurrence, factorial, rational_to_string, tree_row_sum, ExactError, ExactRational, SignConvention, TermBag,
    MATERIALIZE_CAP,
};
use bernoulli_core::flow::{export_events_csv, export_frames, flow, ExportFormat, FlowConfig, FlowError};
use bernoulli_core::golden::count_row;
use bernoulli_core::oracle::{zeta_oracle, OracleError};
use bernoulli_core::scalar::c64;
use bernoulli_core::verify::golden_suite;
use bernoulli_core::zeros::{bernoulli_zeros, computed_counts, count_zeros_formula, precision_for_degree, FindOptions, ZeroError};
use bernoulli_core::{with_precision, Precision, Real};
use serde_json::json;

use crate::args::{Command, Format, Global, ZetaMethod};

#[derive(Debug)]
pub enum CliError {
    /// Bad input; exit code 2.
    Validation(String),
    /// A computation failed or a check did not hold; exit code 3.
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "invalid input: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<String> for CliError {
    fn from(m: String) -> Self {
        CliError::Validation(m)
    }
}

impl From<SeriesError> for CliError {
    fn from(e: SeriesError) -> Self {
        match e {
            SeriesError::DomainError { .. } | SeriesError::InvalidParams(_) | SeriesError::PoleAtOne => {
                CliError::Validation(e.to_string())
            }
            SeriesError::Oracle(o) => o.into(),
            SeriesError::NotConverged { .. } => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<ZeroError> for CliError {
    fn from(e: ZeroError) -> Self {
        match e {
            ZeroError::InvalidDegree => CliError::Validation(e.to_string()),
            ZeroError::NoConvergence { .. } => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<FlowError> for CliError {
    fn from(e: FlowError) -> Self {
        match e {
            FlowError::InvalidConfig(_) => CliError::Validation(e.to_string()),
            FlowError::Series(s) => s.into(),
            FlowError::NoConvergence { .. } => CliError::Numerical(e.to_string()),
        }
    }
}

/// What a command produced. A failed check still prints its report.
pub struct Output {
    pub text: String,
    pub failure: Option<CliError>,
}

impl From<String> for Output {
    fn from(text: String) -> Self {
        Output { text, failure: None }
    }
}

type Res = Result<Output, CliError>;

pub fn run(cmd: &Command, g: &Global) -> Res {
    g.validate().map_err(CliError::Validation)?;
    match cmd {
        Command::Bernoulli { n } => bernoulli(*n, g),
        Command::Tree { n, dump } => tree(*n, *dump, g),
        Command::Zeta { s, method } => zeta(*s, *method, g),
        Command::Bpoly { s } => bpoly(*s, g),
        Command::Zeros { n } => zeros(*n, g),
        Command::Counts { n_max } => counts(*n_max, g),
        Command::Flow { s0, s1, ds } => flow_cmd(*s0, *s1, *ds, g),
        Command::Verify => verify(g),
    }
}

/// Settings line that makes every artifact self-describing.
fn header(g: &Global, what: &str, precision: Option<Precision>) -> String {
    let p = precision.map_or_else(|| "exact".to_string(), |p| p.bits().to_string());
    let w = g.w.map_or_else(|| "auto".to_string(), |w| w.to_string());
    let conv = g.convention.map_or_else(|| "both".to_string(), |c| SignConvention::from(c).to_string());
    format!("# bernzeta {what} precision={p} w={w} tol={:e} convention={conv} seed={}", g.tol, g.seed)
}

fn digits(p: Precision) -> usize {
    match p {
        Precision::P53 => 17,
        other => (other.bits() as f64 * std::f64::consts::LOG10_2).floor() as usize,
    }
}

fn conventions(g: &Global) -> Vec<SignConvention> {
    match g.convention {
        Some(c) => vec![c.into()],
        None => SignConvention::ALL.to_vec(),
    }
}

fn bernoulli(n: usize, g: &Global) -> Res {
    if n > 20_000 {
        return Err(CliError::Validation(format!("n = {n} is beyond the supported 20000")));
    }
    let rows: Vec<(SignConvention, String)> =
        conventions(g).into_iter().map(|c| (c, rational_to_string(&bernoulli_recurrence(n, c)))).collect();
    let text = match g.format {
        Format::Table => {
            let mut s = header(g, &format!("bernoulli n={n}"), None) + "\n";
            for (c, v) in &rows {
                writeln!(s, "{:<10} {v}", c.to_string()).unwrap();
            }
            s
        }
        Format::Csv => {
            let mut s = "n,convention,value\n".to_string();
            for (c, v) in &rows {
                writeln!(s, "{n},{c},{v}").unwrap();
            }
            s
        }
        Format::Json => {
            let map: serde_json::Map<_, _> = rows.iter().map(|(c, v)| (c.to_string(), json!(v))).collect();
            json!({ "n": n, "values": map }).to_string() + "\n"
        }
    };
    Ok(text.into())
}

fn tree(n: usize, dump: bool, g: &Global) -> Res {
    let sum = tree_row_sum(n).map_err(|e: ExactError| CliError::Validation(e.to_string()))?;
    let b = &sum * ExactRational::from_integer(factorial(n + 1));
    let terms = if dump {
        let bag = TermBag::row(n)
            .ok_or_else(|| CliError::Validation(format!("term dump is limited to rows n ≤ {MATERIALIZE_CAP}")))?;
        bag.terms.iter().map(|t| t.to_string()).collect()
    } else {
        Vec::new()
    };
    let text = match g.format {
        Format::Table => {
            let mut s = header(g, &format!("tree n={n}"), None) + "\n";
            writeln!(s, "S_{n} = {}", rational_to_string(&sum)).unwrap();
            writeln!(s, "B_{} = {}", n + 1, rational_to_string(&b)).unwrap();
            for t in &terms {
                writeln!(s, "  {t}").unwrap();
            }
            s
        }
        Format::Csv => {
            let mut s = "row,term\n".to_string();
            for t in &terms {
                writeln!(s, "{n},{t}").unwrap();
            }
            writeln!(s, "{n},sum={}", rational_to_string(&sum)).unwrap();
            s
        }
        Format::Json => {
            json!({ "n": n, "row_sum": rational_to_string(&sum), "b_next": rational_to_string(&b), "terms": terms }).to_string() + "\n"
        }
    };
    Ok(text.into())
}

fn params(g: &Global, p: Precision) -> SeriesParams {
    SeriesParams { w: g.w, tol: g.tol, precision: p, ..SeriesParams::default() }
}

struct ZetaLine {
    route: &'static str,
    value: String,
    est_error: Option<f64>,
    terms: Option<usize>,
}

fn series_line<T: Real>(route: &'static str, r: Result<ContinuedValue<T>, SeriesError>, d: usize) -> Result<ZetaLine, CliError> {
    let v = r?;
    Ok(ZetaLine { route, value: v.value.re.to_sci(d), est_error: Some(v.est_error), terms: Some(v.terms_used) })
}

fn zeta(s: f64, method: ZetaMethod, g: &Global) -> Res {
    if !s.is_finite() {
        return Err(CliError::Validation("s must be finite".into()));
    }
    let p = g.precision_or(Precision::P128)?;
    let d = digits(p);
    let params = params(g, p);
    let lines: Vec<ZetaLine> = with_precision!(p, T => {
        match method {
            ZetaMethod::Oracle => {
                let z = zeta_oracle(&c64::<T>(s, 0.0))?;
                vec![ZetaLine { route: "oracle", value: z.re.to_sci(d), est_error: None, terms: None }]
            }
            ZetaMethod::Nested => vec![series_line("nested", zeta_nested(&c64::<T>(s, 0.0), &params), d)?],
            ZetaMethod::Odd => {
                if s < 3.0 || s.fract() != 0.0 || (s as i64) % 2 == 0 {
                    return Err(CliError::Validation(format!("the odd method needs an odd integer s ≥ 3, got {s}")));
                }
                let z = zeta_odd::<T>(((s as u32) - 1) / 2, &params)?;
                vec![
                    ZetaLine {
                        route: "b_prime",
                        value: z.via_b_prime.value.re.to_sci(d),
                        est_error: Some(z.via_b_prime.est_error),
                        terms: Some(z.via_b_prime.terms_used),
                    },
                    ZetaLine { route: "zeta_prime", value: z.via_zeta_prime.to_sci(d), est_error: None, terms: None },
                ]
            }
        }
    });
    let text = match g.format {
        Format::Table => {
            let mut out = header(g, &format!("zeta s={s}"), Some(p)) + "\n";
            for l in &lines {
                write!(out, "{:<11} {}", l.route, l.value).unwrap();
                if let (Some(e), Some(t)) = (l.est_error, l.terms) {
                    write!(out, "  est_error={e:.3e} terms={t}").unwrap();
                }
                out.push('\n');
            }
            out
        }
        Format::Csv => {
            let mut out = "s,route,value,est_error,terms\n".to_string();
            for l in &lines {
                let e = l.est_error.map(|e| format!("{e:e}")).unwrap_or_default();
                let t = l.terms.map(|t| t.to_string()).unwrap_or_default();
                writeln!(out, "{s},{},{},{e},{t}", l.route, l.value).unwrap();
            }
            out
        }
        Format::Json => {
            let v: Vec<_> = lines
                .iter()
                .map(|l| json!({ "route": l.route, "value": l.value, "est_error": l.est_error, "terms": l.terms }))
                .collect();
            json!({ "s": s, "precision": p.bits(), "results": v }).to_string() + "\n"
        }
    };
    Ok(text.into())
}

fn bpoly(s: f64, g: &Global) -> Res {
    if !(s.is_finite() && s >= 1.0) {
        return Err(CliError::Validation(format!("B(s, w) is defined for s ≥ 1, got {s}")));
    }
    let p = g.precision_or(Precision::P128)?;
    let d = digits(p);
    let coeffs: Vec<String> = with_precision!(p, T => {
        b_poly_continued(&T::from_f64(s))?.coefficients.iter().map(|c| c.re.to_sci(d)).collect()
    });
    let text = match g.format {
        Format::Table => {
            let mut out = header(g, &format!("bpoly s={s}"), Some(p)) + "\n";
            for (k, c) in coeffs.iter().enumerate() {
                writeln!(out, "w^{k:<3} {c}").unwrap();
            }
            out
        }
        Format::Csv => {
            let mut out = "s,power,coefficient\n".to_string();
            for (k, c) in coeffs.iter().enumerate() {
                writeln!(out, "{s},{k},{c}").unwrap();
            }
            out
        }
        Format::Json => json!({ "s": s, "precision": p.bits(), "coefficients": coeffs }).to_string() + "\n",
    };
    Ok(text.into())
}

fn zeros(n: usize, g: &Global) -> Res {
    if n == 0 {
        return Err(CliError::Validation("degree must be at least 1".into()));
    }
    if n > 60 && !g.slow {
        return Err(CliError::Validation(format!("degree {n} > 60 needs --slow")));
    }
    let p = g.precision_or(precision_for_degree(n))?;
    let conv = g.convention.map_or(SignConvention::Woon, SignConvention::from);
    let opts = FindOptions { seed: g.seed, ..FindOptions::default() };
    let head = header(g, &format!("zeros n={n}"), Some(p));
    let text = with_precision!(p, T => {
        let z = bernoulli_zeros::<T>(n, conv, &opts)?;
        match g.format {
            Format::Csv => format!("{head}\n{}", z.to_csv()),
            Format::Table => {
                let mut out = format!("{head}\n# real {} complex {} max residual {:.3e}\n", z.real_count, z.complex_count, z.max_residual);
                for (k, (w, r)) in z.zeros.iter().zip(&z.is_real).enumerate() {
                    writeln!(out, "{k:>3}  {:>28}  {:>28}  {}", w.re.to_sci(20), w.im.to_sci(20), if *r { "real" } else { "complex" }).unwrap();
                }
                out
            }
            Format::Json => {
                let zs: Vec<_> = z
                    .zeros
                    .iter()
                    .zip(&z.is_real)
                    .enumerate()
                    .map(|(k, (w, r))| json!({ "index": k, "re": w.re.to_sci(25), "im": w.im.to_sci(25), "is_real": r }))
                    .collect();
                json!({
                    "n": n,
                    "precision": p.bits(),
                    "real_count": z.real_count,
                    "complex_count": z.complex_count,
                    "max_residual": z.max_residual,
                    "zeros": zs,
                })
                .to_string()
                    + "\n"
            }
        }
    });
    Ok(text.into())
}

fn counts(n_max: usize, g: &Global) -> Res {
    if n_max == 0 {
        return Err(CliError::Validation("n_max must be at least 1".into()));
    }
    if n_max > 60 && !g.slow {
        return Err(CliError::Validation(format!("rows beyond 60 need --slow (asked for {n_max})")));
    }
    struct Row {
        n: usize,
        formula: (usize, usize),
        computed: (usize, usize),
        table: Option<(usize, usize)>,
    }
    let mut rows = Vec::new();
    for n in 1..=n_max {
        let p = g.precision.map_or(Ok(precision_for_degree(n)), |_| g.precision_or(Precision::P256))?;
        rows.push(Row {
            n,
            formula: count_zeros_formula(n),
            computed: computed_counts(n, p)?,
            table: count_row(n).map(|r| (r.real, r.complex)),
        });
    }
    let ok = |r: &Row| r.formula == r.computed && r.table.map_or(true, |t| t == r.computed);
    let bad: Vec<usize> = rows.iter().filter(|r| !ok(r)).map(|r| r.n).collect();
    let text = match g.format {
        Format::Table => {
            let mut out = header(g, &format!("counts n_max={n_max}"), None) + "\n";
            writeln!(out, "{:>3} {:>7} {:>7} {:>7} {:>7} {:>7} {:>7}  match", "n", "z_R", "z_C", "calc_R", "calc_C", "tab_R", "tab_C").unwrap();
            for r in &rows {
                let (tr, tc) = r.table.map_or(("-".into(), "-".into()), |(a, b)| (a.to_string(), b.to_string()));
                writeln!(
                    out,
                    "{:>3} {:>7} {:>7} {:>7} {:>7} {:>7} {:>7}  {}",
                    r.n,
                    r.formula.0,
                    r.formula.1,
                    r.computed.0,
                    r.computed.1,
                    tr,
                    tc,
                    if ok(r) { "yes" } else { "NO" }
                )
                .unwrap();
            }
            out
        }
        Format::Csv => {
            let mut out = "n,formula_real,formula_complex,computed_real,computed_complex,table_real,table_complex\n".to_string();
            for r in &rows {
                let (tr, tc) = r.table.map_or((String::new(), String::new()), |(a, b)| (a.to_string(), b.to_string()));
                writeln!(out, "{},{},{},{},{},{tr},{tc}", r.n, r.formula.0, r.formula.1, r.computed.0, r.computed.1).unwrap();
            }
            out
        }
        Format::Json => {
            let v: Vec<_> = rows
                .iter()
                .map(|r| json!({ "n": r.n, "formula": [r.formula.0, r.formula.1], "computed": [r.computed.0, r.computed.1], "table": r.table.map(|t| [t.0, t.1]) }))
                .collect();
            json!({ "rows": v }).to_string() + "\n"
        }
    };
    let failure = (!bad.is_empty()).then(|| CliError::Numerical(format!("count mismatch at n = {bad:?}")));
    Ok(Output { text, failure })
}

fn flow_cmd(s0: f64, s1: f64, ds: f64, g: &Global) -> Res {
    let cfg = FlowConfig { ds, seed: g.seed, precision: g.precision_or(Precision::P53)?, ..FlowConfig::new(s0, s1) };
    cfg.validate()?;
    let run = flow(&cfg)?;
    let text = match g.format {
        Format::Csv => {
            let mut buf = Vec::new();
            export_frames(&run, ExportFormat::Csv, &mut buf).unwrap();
            if let Some(path) = &g.out {
                let mut ev = Vec::new();
                export_events_csv(&run.events, &mut ev).unwrap();
                let events_path = PathBuf::from(format!("{}.events.csv", path.display()));
                std::fs::write(&events_path, ev).map_err(|e| CliError::Validation(format!("{}: {e}", events_path.display())))?;
            }
            String::from_utf8(buf).unwrap()
        }
        Format::Json => {
            let mut buf = Vec::new();
            export_frames(&run, ExportFormat::Jsonl, &mut buf).unwrap();
            String::from_utf8(buf).unwrap()
        }
        Format::Table => {
            let mut out = header(g, &format!("flow s0={s0} s1={s1} ds={ds}"), Some(cfg.precision)) + "\n";
            writeln!(out, "slices {}  step halvings {}", run.slices.len(), run.halvings).unwrap();
            for t in &run.trajectories {
                let last = t.samples.last().unwrap();
                writeln!(
                    out,
                    "trajectory {:>2} born {:.4} from {:<8} ends at {:+.6} {:+.6}i",
                    t.id,
                    t.born_at,
                    t.born_from.tag(),
                    last.w.re,
                    last.w.im
                )
                .unwrap();
            }
            for e in &run.events {
                let when = e.s_end.map_or_else(|| format!("s = {:.4}", e.s_at), |end| format!("s in [{:.4}, {end:.4}]", e.s_at));
                writeln!(out, "event {:>2} {:<10} {when} ids {:?} at {:+.6}", e.id, e.kind.tag(), e.participants, e.location.re).unwrap();
            }
            out
        }
    };
    Ok(text.into())
}

fn verify(g: &Global) -> Res {
    let checks = golden_suite(g.slow);
    let failed = checks.iter().filter(|c| !c.passed).count();
    let text = match g.format {
        Format::Json => {
            let v: Vec<_> = checks
                .iter()
                .map(|c| json!({ "section": c.section, "name": c.name, "passed": c.passed, "detail": c.detail }))
                .collect();
            json!({ "checks": v, "failed": failed }).to_string() + "\n"
        }
        Format::Csv => {
            let mut out = "section,name,passed,detail\n".to_string();
            for c in &checks {
                writeln!(out, "{},{},{},\"{}\"", c.section, c.name, c.passed, c.detail).unwrap();
            }
            out
        }
        Format::Table => {
            let mut out = header(g, "verify", None) + "\n";
            for c in &checks {
                writeln!(out, "{} [{}] {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.section, c.name, c.detail).unwrap();
            }
            writeln!(out, "{} checks, {failed} failed", checks.len()).unwrap();
            out
        }
    };
    let failure = (failed > 0).then(|| CliError::Numerical(format!("{failed} golden checks failed")));
    Ok(Output { text, failure })
}
