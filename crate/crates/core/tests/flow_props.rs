use std::sync::OnceLock;

use bernoulli_core::continuation::b_poly_continued;
use bernoulli_core::exact::SignConvention;
use bernoulli_core::flow::*;
use bernoulli_core::zeros::{bernoulli_zeros, hausdorff, FindOptions, PolySpec};
use bernoulli_core::Complex;

fn five_to_seven() -> &'static FlowRun {
    static RUN: OnceLock<FlowRun> = OnceLock::new();
    RUN.get_or_init(|| flow(&FlowConfig::new(5.0, 7.0)).unwrap())
}

fn zeros_at(run: &FlowRun, s: f64) -> Vec<Complex<f64>> {
    let k = run.slice_index(s).unwrap();
    run.zeros_at(k).into_iter().map(|(_, p)| p.w).collect()
}

#[test]
fn integer_slices_are_anchored() {
    let run = five_to_seven();
    for m in [5usize, 6, 7] {
        let exact = bernoulli_zeros::<f64>(m, SignConvention::Woon, &FindOptions::default()).unwrap();
        let tracked = zeros_at(run, m as f64);
        assert!(hausdorff(&tracked, &exact.to_c64()) < 1e-6, "s = {m}");
    }
    let k = run.slice_index(6.0).unwrap();
    let real = run.zeros_at(k).iter().filter(|(_, p)| p.is_real).count();
    assert_eq!((real, 6 - real), (2, 4));
}

#[test]
fn collisions_between_five_and_seven() {
    let run = five_to_seven();
    let found = run
        .events
        .iter()
        .filter(|e| matches!(e.kind, EventKind::Point | EventKind::Loop) && e.s_at > 5.0 && e.s_at <= 7.0)
        .count();
    assert!(found >= 1, "{:?}", run.events);
    for e in run.events.iter().filter(|e| e.kind == EventKind::Loop) {
        assert!(e.s_end.unwrap() - e.s_at < 1.0, "{e:?}");
        assert_eq!(e.participants.len(), 2);
    }
}

#[test]
fn live_count_is_effective_degree() {
    let run = five_to_seven();
    for (k, &s) in run.slices.iter().enumerate().step_by(7) {
        let p = b_poly_continued(&s).unwrap();
        let degree = PolySpec::continued(&p, run.config.birth_threshold).unwrap().degree;
        assert_eq!(run.zeros_at(k).len(), degree, "s = {s}");
    }
}

#[test]
fn slices_increase_and_sets_stay_conjugate() {
    let run = five_to_seven();
    assert!(run.slices.windows(2).all(|w| w[0] < w[1]));
    for t in &run.trajectories {
        assert!(t.samples.windows(2).all(|w| w[0].s < w[1].s));
    }
    for k in 0..run.slices.len() {
        let zs = zeros_at(run, run.slices[k]);
        let conj: Vec<_> = zs.iter().map(|z| z.conj()).collect();
        assert!(hausdorff(&zs, &conj) < 1e-9, "s = {}", run.slices[k]);
    }
    for m in [5.0, 6.0, 7.0] {
        let zs = zeros_at(run, m);
        let refl: Vec<_> = zs.iter().map(|z| Complex::new(1.0, 0.0) - z).collect();
        assert!(hausdorff(&zs, &refl) < 1e-6, "s = {m}");
    }
}

#[test]
fn deterministic_exports() {
    let a = five_to_seven();
    let b = flow(&FlowConfig::new(5.0, 7.0)).unwrap();
    for format in [ExportFormat::Csv, ExportFormat::Jsonl] {
        let (mut x, mut y) = (Vec::new(), Vec::new());
        export_frames(a, format, &mut x).unwrap();
        export_frames(&b, format, &mut y).unwrap();
        assert_eq!(x, y);
    }
}

#[test]
fn zero_flies_in_from_the_right() {
    let run = flow(&FlowConfig::new(2.0, 3.0)).unwrap();
    assert_eq!(run.zeros_at(0).len(), 2);
    assert_eq!(run.zeros_at(run.slices.len() - 1).len(), 3);
    let born: Vec<_> = run.trajectories.iter().filter(|t| t.born_from == BornFrom::Infinity).collect();
    assert_eq!(born.len(), 1);
    let t = born[0];
    assert!(t.samples[0].w.re > 10.0);
    assert!(t.samples.windows(2).all(|w| w[1].w.re < w[0].w.re));
    let angle = t.entry_angle.unwrap();
    assert!((angle.abs() - std::f64::consts::PI).abs() < 1e-6, "{angle}");
}

#[test]
fn quiet_stretch_has_no_events() {
    let run = flow(&FlowConfig::new(2.1, 2.9)).unwrap();
    assert!(run.events.is_empty(), "{:?}", run.events);
}

#[test]
fn lone_zero_stays_put() {
    let run = flow(&FlowConfig { ds: 0.001, ..FlowConfig::new(1.0, 1.003) }).unwrap();
    let t = &run.trajectories[0];
    assert!(t.samples.iter().all(|p| (p.w - Complex::new(0.5, 0.0)).norm() < 0.01));
}

#[test]
fn csv_has_one_row_per_sample() {
    let run = five_to_seven();
    let mut buf = Vec::new();
    export_frames(run, ExportFormat::Csv, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let samples: usize = run.trajectories.iter().map(|t| t.samples.len()).sum();
    assert_eq!(text.lines().count(), samples + 1);
    assert_eq!(text.lines().next(), Some(FRAME_CSV_HEADER));
    let mut ev = Vec::new();
    export_events_csv(&run.events, &mut ev).unwrap();
    assert_eq!(String::from_utf8(ev).unwrap().lines().count(), run.events.len() + 1);
}

#[test]
fn empty_run_exports_header_only() {
    let run = FlowRun {
        config: FlowConfig::new(1.0, 2.0),
        slices: vec![],
        trajectories: vec![],
        events: vec![],
        halvings: 0,
    };
    let mut buf = Vec::new();
    export_frames(&run, ExportFormat::Csv, &mut buf).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap(), format!("{FRAME_CSV_HEADER}\n"));
}

#[test]
fn jsonl_round_trip() {
    let run = five_to_seven();
    let mut buf = Vec::new();
    export_frames(run, ExportFormat::Jsonl, &mut buf).unwrap();
    let back = parse_jsonl(std::str::from_utf8(&buf).unwrap()).unwrap();
    assert_eq!(&back, run);
}
