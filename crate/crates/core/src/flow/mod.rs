//! Zeros of the continued Bernoulli polynomial `B(s, w)` followed as `s` grows.
//!
//! Each slice is solved with [`find_zeros`] seeded from the previous slice,
//! and roots are linked to trajectories by a minimum-total-displacement
//! assignment. A new trajectory starts at the largest root whenever the
//! effective degree goes up.

mod assign;
mod events;
mod export;

pub use assign::assign;
pub use events::{detect_events, EventKind, ScatterEvent};
pub use export::{export_events_csv, export_frames, parse_jsonl, ExportFormat, FRAME_CSV_HEADER};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::continuation::{b_poly_continued, SeriesError};
use crate::scalar::{Precision, Real};
use crate::with_precision;
use crate::zeros::{classification_epsilon, find_zeros, FindOptions, PolySpec, ZeroError};

/// Controls for [`flow`] and [`detect_events`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowConfig {
    pub s_start: f64,
    pub s_end: f64,
    /// Base step; halved locally when roots crowd.
    pub ds: f64,
    pub precision: Precision,
    /// Fixed collision radius; by default `10·ds·` the median root speed
    /// over the previous five slices.
    pub collision_radius: Option<f64>,
    /// Realness threshold; by default `2^{−p/4}`.
    pub realness_eps: Option<f64>,
    /// Top coefficients below this fraction of `max|c_k|` are ignored.
    pub birth_threshold: f64,
    pub max_halvings: u32,
    /// Fractional speed loss that marks a long-range slowdown.
    pub speed_drop: f64,
    /// Number of steps over which the slowdown is measured.
    pub speed_window: usize,
    pub seed: u64,
}

impl FlowConfig {
    pub fn new(s_start: f64, s_end: f64) -> Self {
        FlowConfig {
            s_start,
            s_end,
            ds: 0.01,
            precision: Precision::P53,
            collision_radius: None,
            realness_eps: None,
            birth_threshold: 1e-6,
            max_halvings: 6,
            speed_drop: 0.5,
            speed_window: 3,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), FlowError> {
        let bad = |m: &str| Err(FlowError::InvalidConfig(m.to_string()));
        if !(self.s_start.is_finite() && self.s_end.is_finite()) {
            return bad("s range must be finite");
        }
        if self.s_start < 1.0 {
            return bad("s_start must be at least 1");
        }
        if self.s_start >= self.s_end {
            return bad("s_start must be below s_end");
        }
        if !(self.ds > 0.0) {
            return bad("ds must be positive");
        }
        if !(self.speed_drop > 0.0 && self.speed_drop < 1.0) || self.speed_window == 0 {
            return bad("speed_drop must lie in (0, 1) and speed_window be positive");
        }
        Ok(())
    }

    pub fn realness(&self) -> f64 {
        self.realness_eps.unwrap_or_else(|| classification_epsilon(self.precision.bits()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BornFrom {
    InitialSet,
    Infinity,
    /// Reserved for identities created at a collision; the assignment keeps
    /// both identities through every collision, so [`flow`] never emits it.
    Bifurcation(usize),
}

impl BornFrom {
    pub fn tag(&self) -> String {
        match self {
            Self::InitialSet => "initial".into(),
            Self::Infinity => "infinity".into(),
            Self::Bifurcation(e) => format!("bifurcation:{e}"),
        }
    }

    pub fn parse(tag: &str) -> Option<Self> {
        match tag {
            "initial" => Some(Self::InitialSet),
            "infinity" => Some(Self::Infinity),
            _ => tag.strip_prefix("bifurcation:")?.parse().ok().map(Self::Bifurcation),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowSample {
    pub s: f64,
    pub w: Complex<f64>,
    pub is_real: bool,
}

/// One zero followed across slices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub id: usize,
    /// Index of the slice holding `samples[0]`.
    pub first_slice: usize,
    pub samples: Vec<FlowSample>,
    pub born_at: f64,
    pub born_from: BornFrom,
    /// Direction of the first step, `arg(w₁ − w₀)`, for zeros born at infinity.
    pub entry_angle: Option<f64>,
}

impl Trajectory {
    /// Sample at a global slice index, if alive there.
    pub fn at(&self, slice: usize) -> Option<&FlowSample> {
        slice.checked_sub(self.first_slice).and_then(|k| self.samples.get(k))
    }

    pub fn last_slice(&self) -> usize {
        self.first_slice + self.samples.len() - 1
    }
}

/// Output of [`flow`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowRun {
    pub config: FlowConfig,
    pub slices: Vec<f64>,
    pub trajectories: Vec<Trajectory>,
    pub events: Vec<ScatterEvent>,
    /// Total step halvings taken.
    pub halvings: usize,
}

impl FlowRun {
    /// Zeros alive at a slice, ordered by trajectory id.
    pub fn zeros_at(&self, slice: usize) -> Vec<(usize, FlowSample)> {
        self.trajectories.iter().filter_map(|t| t.at(slice).map(|p| (t.id, *p))).collect()
    }

    /// Slice index whose `s` equals `s` to `1e−9`.
    pub fn slice_index(&self, s: f64) -> Option<usize> {
        self.slices.iter().position(|&x| (x - s).abs() < 1e-9)
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum FlowError {
    #[error("invalid flow configuration: {0}")]
    InvalidConfig(String),
    #[error("no convergence at s = {s} after {halvings} step halvings")]
    NoConvergence { s: f64, halvings: u32 },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

struct Slice {
    roots: Vec<Complex<f64>>,
    is_real: Vec<bool>,
}

fn solve_slice<T: Real>(s: f64, guess: Option<Vec<Complex<f64>>>, cfg: &FlowConfig) -> Result<Slice, FlowError> {
    let poly = b_poly_continued(&T::from_f64(s))?;
    let spec = PolySpec::continued(&poly, cfg.birth_threshold).map_err(|_| FlowError::NoConvergence { s, halvings: 0 })?;
    let d = spec.degree;
    let initial = guess.map(|mut g| {
        if g.len() < d {
            // Newborn roots: place them so the root sum matches Vieta.
            let c = |k: usize| Complex::new(spec.coefficients[k].re.to_f64(), spec.coefficients[k].im.to_f64());
            let total = -c(d - 1) / c(d);
            let have: Complex<f64> = g.iter().sum();
            let extra = (total - have) / (d - g.len()) as f64;
            let missing = d - g.len();
            g.extend((0..missing).map(|k| extra + Complex::new(0.0, 1e-3 * k as f64)));
        }
        g
    });
    let opts = FindOptions { seed: cfg.seed, initial, ..Default::default() };
    let z = find_zeros(&spec, &opts).map_err(|e| match e {
        ZeroError::NoConvergence { .. } | ZeroError::InvalidDegree => FlowError::NoConvergence { s, halvings: 0 },
    })?;
    let eps = cfg.realness();
    let roots = z.to_c64();
    let is_real = roots.iter().map(|w| w.im.abs() < eps * (1.0 + w.re.abs())).collect();
    Ok(Slice { roots, is_real })
}

/// How roots of a new slice continue the live trajectories.
struct Link {
    /// `(index into live, index into roots)`
    pairs: Vec<(usize, usize)>,
    newborn: Vec<usize>,
    /// Every continued root moved less than a quarter of its distance to
    /// the nearest other root.
    smooth: bool,
}

fn link(prev: &[Complex<f64>], next: &[Complex<f64>]) -> Link {
    let (m, d) = (prev.len(), next.len());
    let mut newborn = Vec::new();
    let pairs: Vec<(usize, usize)> = if d >= m {
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| next[b].norm().total_cmp(&next[a].norm()));
        newborn = order[..d - m].to_vec();
        newborn.sort_unstable();
        let kept: Vec<usize> = (0..d).filter(|j| !newborn.contains(j)).collect();
        let cost: Vec<Vec<f64>> = prev.iter().map(|p| kept.iter().map(|&j| (next[j] - p).norm()).collect()).collect();
        assign(&cost).into_iter().enumerate().map(|(i, c)| (i, kept[c])).collect()
    } else {
        let cost: Vec<Vec<f64>> = next.iter().map(|q| prev.iter().map(|p| (q - p).norm()).collect()).collect();
        assign(&cost).into_iter().enumerate().map(|(j, i)| (i, j)).collect()
    };
    let smooth = pairs.iter().all(|&(i, j)| {
        let gap = next
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != j)
            .map(|(_, q)| (q - next[j]).norm())
            .fold(f64::INFINITY, f64::min);
        4.0 * (next[j] - prev[i]).norm() <= gap
    });
    Link { pairs, newborn, smooth }
}

/// Follow the zeros of `B(s, ·)` over `[s_start, s_end]` and detect events.
pub fn flow(cfg: &FlowConfig) -> Result<FlowRun, FlowError> {
    cfg.validate()?;
    with_precision!(cfg.precision, T => flow_in::<T>(cfg))
}

fn snap(s: f64) -> f64 {
    if (s - s.round()).abs() < 1e-9 {
        s.round()
    } else {
        s
    }
}

fn flow_in<T: Real>(cfg: &FlowConfig) -> Result<FlowRun, FlowError> {
    let first = solve_slice::<T>(cfg.s_start, None, cfg)?;
    let mut slices = vec![cfg.s_start];
    let mut trajectories: Vec<Trajectory> = first
        .roots
        .iter()
        .zip(&first.is_real)
        .enumerate()
        .map(|(id, (&w, &is_real))| Trajectory {
            id,
            first_slice: 0,
            samples: vec![FlowSample { s: cfg.s_start, w, is_real }],
            born_at: cfg.s_start,
            born_from: BornFrom::InitialSet,
            entry_angle: None,
        })
        .collect();
    let mut live: Vec<usize> = (0..trajectories.len()).collect();
    let mut halvings = 0usize;

    let steps = ((cfg.s_end - cfg.s_start) / cfg.ds - 1e-9).ceil() as usize;
    let mut s_prev = cfg.s_start;
    for k in 1..=steps {
        let target = snap((cfg.s_start + k as f64 * cfg.ds).min(cfg.s_end));
        while s_prev < target {
            let prev: Vec<Complex<f64>> = live.iter().map(|&t| trajectories[t].samples.last().unwrap().w).collect();
            let mut h = target - s_prev;
            let mut tries = 0u32;
            let (s, slice, link) = loop {
                let s = if tries == 0 { target } else { s_prev + h };
                match solve_slice::<T>(s, Some(prev.clone()), cfg) {
                    Ok(slice) => {
                        let l = link(&prev, &slice.roots);
                        if l.smooth || tries == cfg.max_halvings {
                            break (s, slice, l);
                        }
                    }
                    Err(FlowError::NoConvergence { .. }) if tries < cfg.max_halvings => {}
                    Err(FlowError::NoConvergence { .. }) => {
                        return Err(FlowError::NoConvergence { s, halvings: tries });
                    }
                    Err(e) => return Err(e),
                }
                h /= 2.0;
                tries += 1;
                halvings += 1;
            };
            let index = slices.len();
            slices.push(s);
            let mut next_live = Vec::with_capacity(slice.roots.len());
            for &(i, j) in &link.pairs {
                let t = &mut trajectories[live[i]];
                let w = slice.roots[j];
                if t.born_from == BornFrom::Infinity && t.samples.len() == 1 {
                    let d = w - t.samples[0].w;
                    t.entry_angle = Some(d.im.atan2(d.re));
                }
                t.samples.push(FlowSample { s, w, is_real: slice.is_real[j] });
                next_live.push((j, live[i]));
            }
            for &j in &link.newborn {
                let id = trajectories.len();
                trajectories.push(Trajectory {
                    id,
                    first_slice: index,
                    samples: vec![FlowSample { s, w: slice.roots[j], is_real: slice.is_real[j] }],
                    born_at: s,
                    born_from: BornFrom::Infinity,
                    entry_angle: None,
                });
                next_live.push((j, id));
            }
            next_live.sort_unstable();
            live = next_live.into_iter().map(|(_, id)| id).collect();
            s_prev = s;
        }
    }
    let events = detect_events(&trajectories, cfg);
    Ok(FlowRun { config: cfg.clone(), slices, trajectories, events, halvings })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(FlowConfig::new(0.5, 2.0).validate().is_err());
        assert!(FlowConfig::new(3.0, 2.0).validate().is_err());
        let mut c = FlowConfig::new(1.0, 2.0);
        c.ds = 0.0;
        assert!(c.validate().is_err());
        assert!(FlowConfig::new(1.0, 1.5).validate().is_ok());
    }

    #[test]
    fn born_from_tags_round_trip() {
        for b in [BornFrom::InitialSet, BornFrom::Infinity, BornFrom::Bifurcation(4)] {
            assert_eq!(BornFrom::parse(&b.tag()), Some(b));
        }
    }

    #[test]
    fn single_zero_stays_near_half() {
        let mut c = FlowConfig::new(1.0, 1.05);
        c.ds = 0.01;
        let run = flow(&c).unwrap();
        let t = &run.trajectories[0];
        assert_eq!(t.samples[0].w, Complex::new(0.5, 0.0));
        assert!(t.samples.iter().all(|p| (p.w - Complex::new(0.5, 0.0)).norm() < 0.2));
    }
}
