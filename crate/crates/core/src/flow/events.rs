//! Classification of zero collisions along a flow.
//!
//! * Point: two real zeros meet, leave as a conjugate pair, and the
//!   imaginary part grows monotonically for at least `1/2` in `s`.
//! * Loop: as Point, but the pair returns to the real axis within a unit
//!   interval of `s`.
//! * LongRange: a real zero arriving from infinity slows sharply while a
//!   nearby conjugate pair turns its imaginary motion around.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::{BornFrom, FlowConfig, Trajectory};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EventKind {
    Point,
    Loop,
    LongRange,
}

impl EventKind {
    pub fn tag(&self) -> &'static str {
        match self {
            Self::Point => "point",
            Self::Loop => "loop",
            Self::LongRange => "long_range",
        }
    }

    pub fn parse(tag: &str) -> Option<Self> {
        match tag {
            "point" => Some(Self::Point),
            "loop" => Some(Self::Loop),
            "long_range" => Some(Self::LongRange),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScatterEvent {
    pub id: usize,
    pub kind: EventKind,
    pub s_at: f64,
    /// End of the excursion for loops.
    pub s_end: Option<f64>,
    pub participants: Vec<usize>,
    pub location: Complex<f64>,
}

/// Sample at a global slice index as `(s, w, is_real)`.
fn at(t: &Trajectory, k: usize) -> Option<(f64, Complex<f64>, bool)> {
    t.at(k).map(|p| (p.s, p.w, p.is_real))
}

fn is_pair(a: Complex<f64>, b: Complex<f64>) -> bool {
    (a - b.conj()).norm() <= 1e-9 * (1.0 + a.norm())
}

/// Zero crossing of a quantity that behaves linearly in `s`, extrapolated
/// from two samples and clamped to `[lo, hi]`.
fn extrapolate(s1: f64, q1: f64, s2: f64, q2: f64, lo: f64, hi: f64) -> f64 {
    let slope = (q2 - q1) / (s2 - s1);
    if slope == 0.0 || !slope.is_finite() {
        return hi;
    }
    (s2 - q2 / slope).clamp(lo, hi)
}

/// `10·ds·` the median speed of all zeros over the five slices before `k`.
fn dynamic_radius(trajectories: &[Trajectory], k: usize, ds: f64) -> f64 {
    let mut speeds = Vec::new();
    for j in k.saturating_sub(5).max(1)..=k {
        for t in trajectories {
            if let (Some(a), Some(b)) = (t.at(j - 1), t.at(j)) {
                if b.s > a.s {
                    speeds.push((b.w - a.w).norm() / (b.s - a.s));
                }
            }
        }
    }
    if speeds.is_empty() {
        return f64::INFINITY;
    }
    speeds.sort_by(f64::total_cmp);
    10.0 * ds * speeds[speeds.len() / 2]
}

/// Point, Loop and LongRange events, ordered by `s_at`.
pub fn detect_events(trajectories: &[Trajectory], cfg: &FlowConfig) -> Vec<ScatterEvent> {
    let mut events = Vec::new();
    for (ia, a) in trajectories.iter().enumerate() {
        for b in &trajectories[ia + 1..] {
            collisions(a, b, trajectories, cfg, &mut events);
        }
    }
    for t in trajectories.iter().filter(|t| t.born_from == BornFrom::Infinity) {
        long_range(t, trajectories, cfg, &mut events);
    }
    events.sort_by(|x, y| x.s_at.total_cmp(&y.s_at).then(x.kind.cmp(&y.kind)).then(x.participants.cmp(&y.participants)));
    for (id, e) in events.iter_mut().enumerate() {
        e.id = id;
    }
    events
}

fn collisions(a: &Trajectory, b: &Trajectory, all: &[Trajectory], cfg: &FlowConfig, out: &mut Vec<ScatterEvent>) {
    let lo = a.first_slice.max(b.first_slice);
    let hi = a.last_slice().min(b.last_slice());
    if hi <= lo {
        return;
    }
    let both_real = |k: usize| a.at(k).unwrap().is_real && b.at(k).unwrap().is_real;
    let paired = |k: usize| {
        let (p, q) = (a.at(k).unwrap(), b.at(k).unwrap());
        !p.is_real && !q.is_real && is_pair(p.w, q.w)
    };
    let gap = |k: usize| (a.at(k).unwrap().w - b.at(k).unwrap().w).norm();
    let half_im = |k: usize| a.at(k).unwrap().w.im.abs();
    let s = |k: usize| a.at(k).unwrap().s;

    let mut k = lo;
    while k < hi {
        if !(both_real(k) && paired(k + 1)) {
            k += 1;
            continue;
        }
        let radius = cfg.collision_radius.unwrap_or_else(|| dynamic_radius(all, k, cfg.ds));
        let approached = (k.saturating_sub(2).max(lo)..=k).any(|j| gap(j) < radius);
        // Separation squared is linear in s near a simple collision.
        let s_on = if k > lo {
            extrapolate(s(k - 1), gap(k - 1).powi(2), s(k), gap(k).powi(2), s(k), s(k + 1))
        } else {
            s(k)
        };
        let location = (a.at(k).unwrap().w + b.at(k).unwrap().w) / 2.0;
        let mut end = k + 1;
        while end < hi && paired(end + 1) {
            end += 1;
        }
        let returns = end < hi && both_real(end + 1);
        let participants = vec![a.id.min(b.id), a.id.max(b.id)];
        if approached {
            if returns {
                let s_off = if end > k + 1 {
                    extrapolate(s(end - 1), half_im(end - 1).powi(2), s(end), half_im(end).powi(2), s(end), s(end + 1))
                } else {
                    s(end + 1)
                };
                if s_off - s_on < 1.0 {
                    out.push(ScatterEvent { id: 0, kind: EventKind::Loop, s_at: s_on, s_end: Some(s_off), participants, location });
                    k = end + 1;
                    continue;
                }
            }
            let reach = (k + 1..=end).take_while(|&j| s(j) <= s_on + 0.5 + 1e-12).collect::<Vec<_>>();
            let covers = s(end) >= s_on + 0.5 - 1e-12;
            let monotone = reach.windows(2).all(|w| half_im(w[1]) >= half_im(w[0]) * (1.0 - 1e-9));
            if covers && monotone {
                out.push(ScatterEvent { id: 0, kind: EventKind::Point, s_at: s_on, s_end: None, participants, location });
            }
        }
        k = end + 1;
    }
}

fn long_range(t: &Trajectory, all: &[Trajectory], cfg: &FlowConfig, out: &mut Vec<ScatterEvent>) {
    let win = cfg.speed_window;
    let speed = |k: usize| -> Option<f64> {
        let (s0, w0, _) = at(t, k.checked_sub(1)?)?;
        let (s1, w1, _) = at(t, k)?;
        Some((w1 - w0).norm() / (s1 - s0))
    };
    let mut k = t.first_slice + win + 1;
    while k <= t.last_slice() {
        let (Some(v0), Some(v1)) = (speed(k - win), speed(k)) else {
            k += 1;
            continue;
        };
        let (s_k, w_k, real) = at(t, k).unwrap();
        if !(real && v1 < (1.0 - cfg.speed_drop) * v0) {
            k += 1;
            continue;
        }
        let turner = all.iter().find(|c| {
            c.id != t.id
                && (k - win..=k).all(|j| c.at(j).is_some_and(|p| !p.is_real && p.w.im > 0.0 && (p.w.re - w_k.re).abs() <= 1.0))
                && turns(c, k - win, k)
        });
        if let Some(c) = turner {
            let partner = all
                .iter()
                .find(|d| d.id != c.id && d.at(k).is_some_and(|p| is_pair(p.w, c.at(k).unwrap().w)))
                .map(|d| d.id);
            let mut participants = vec![t.id, c.id];
            participants.extend(partner);
            out.push(ScatterEvent { id: 0, kind: EventKind::LongRange, s_at: s_k, s_end: None, participants, location: w_k });
            k += win + 1;
        } else {
            k += 1;
        }
    }
}

/// Whether `Im w` changes direction over slices `lo..=hi`.
fn turns(c: &Trajectory, lo: usize, hi: usize) -> bool {
    let im: Vec<f64> = (lo..=hi).filter_map(|j| c.at(j).map(|p| p.w.im)).collect();
    let steps: Vec<f64> = im.windows(2).map(|w| w[1] - w[0]).filter(|d| d.abs() > 1e-12).collect();
    steps.windows(2).any(|d| d[0].signum() != d[1].signum())
}
