//! Frame files for downstream plotting: CSV and JSON lines.
//!
//! Floats are written with 17 significant digits, which round-trips every
//! `f64` exactly.

use std::io::{self, Write};

use num_complex::Complex;
use serde_json::Value;

use super::{BornFrom, EventKind, FlowConfig, FlowRun, FlowSample, ScatterEvent, Trajectory};
use crate::scalar::Precision;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Jsonl,
}

pub const FRAME_CSV_HEADER: &str = "s,trajectory_id,re,im,is_real,born_from";
pub const EVENT_CSV_HEADER: &str = "event_id,kind,s_at,s_end,participants,re,im";

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "null".into(), num)
}

/// Write every frame, ordered by `s` then trajectory id.
pub fn export_frames<W: Write>(run: &FlowRun, format: ExportFormat, out: &mut W) -> io::Result<()> {
    match format {
        ExportFormat::Csv => {
            writeln!(out, "{FRAME_CSV_HEADER}")?;
            for k in 0..run.slices.len() {
                for (id, p) in run.zeros_at(k) {
                    let born = run.trajectories[id].born_from.tag();
                    writeln!(out, "{},{id},{},{},{},{born}", num(p.s), num(p.w.re), num(p.w.im), p.is_real)?;
                }
            }
        }
        ExportFormat::Jsonl => {
            writeln!(out, "{}", run_line(run))?;
            for (k, s) in run.slices.iter().enumerate() {
                let zeros: Vec<String> = run
                    .zeros_at(k)
                    .into_iter()
                    .map(|(id, p)| format!(r#"{{"id":{id},"re":{},"im":{},"is_real":{}}}"#, num(p.w.re), num(p.w.im), p.is_real))
                    .collect();
                writeln!(out, r#"{{"type":"frame","s":{},"zeros":[{}]}}"#, num(*s), zeros.join(","))?;
            }
            for e in &run.events {
                writeln!(out, "{}", event_line(e))?;
            }
        }
    }
    Ok(())
}

/// Events as CSV; participants are separated by `;`.
pub fn export_events_csv<W: Write>(events: &[ScatterEvent], out: &mut W) -> io::Result<()> {
    writeln!(out, "{EVENT_CSV_HEADER}")?;
    for e in events {
        let ids: Vec<String> = e.participants.iter().map(|p| p.to_string()).collect();
        let end = e.s_end.map(num).unwrap_or_default();
        writeln!(out, "{},{},{},{end},{},{},{}", e.id, e.kind.tag(), num(e.s_at), ids.join(";"), num(e.location.re), num(e.location.im))?;
    }
    Ok(())
}

fn run_line(run: &FlowRun) -> String {
    let c = &run.config;
    let trajectories: Vec<String> = run
        .trajectories
        .iter()
        .map(|t| {
            format!(
                r#"{{"id":{},"first_slice":{},"born_at":{},"born_from":"{}","entry_angle":{}}}"#,
                t.id,
                t.first_slice,
                num(t.born_at),
                t.born_from.tag(),
                opt(t.entry_angle)
            )
        })
        .collect();
    format!(
        concat!(
            r#"{{"type":"run","s_start":{},"s_end":{},"ds":{},"precision":{},"collision_radius":{},"#,
            r#""realness_eps":{},"birth_threshold":{},"max_halvings":{},"speed_drop":{},"speed_window":{},"#,
            r#""seed":{},"halvings":{},"trajectories":[{}]}}"#
        ),
        num(c.s_start),
        num(c.s_end),
        num(c.ds),
        c.precision.bits(),
        opt(c.collision_radius),
        opt(c.realness_eps),
        num(c.birth_threshold),
        c.max_halvings,
        num(c.speed_drop),
        c.speed_window,
        c.seed,
        run.halvings,
        trajectories.join(",")
    )
}

fn event_line(e: &ScatterEvent) -> String {
    let when = match e.s_end {
        Some(end) => format!(r#""s_interval":[{},{}]"#, num(e.s_at), num(end)),
        None => format!(r#""s_at":{}"#, num(e.s_at)),
    };
    let ids: Vec<String> = e.participants.iter().map(|p| p.to_string()).collect();
    format!(
        r#"{{"type":"event","id":{},"kind":"{}",{when},"participant_ids":[{}],"location":{{"re":{},"im":{}}}}}"#,
        e.id,
        e.kind.tag(),
        ids.join(","),
        num(e.location.re),
        num(e.location.im)
    )
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value, String> {
    v.get(key).ok_or_else(|| format!("missing field {key}"))
}

fn f(v: &Value, key: &str) -> Result<f64, String> {
    field(v, key)?.as_f64().ok_or_else(|| format!("{key} is not a number"))
}

fn u(v: &Value, key: &str) -> Result<u64, String> {
    field(v, key)?.as_u64().ok_or_else(|| format!("{key} is not an integer"))
}

fn of(v: &Value, key: &str) -> Result<Option<f64>, String> {
    let x = field(v, key)?;
    if x.is_null() {
        Ok(None)
    } else {
        x.as_f64().map(Some).ok_or_else(|| format!("{key} is not a number"))
    }
}

/// Inverse of the JSONL form of [`export_frames`].
pub fn parse_jsonl(text: &str) -> Result<FlowRun, String> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let head: Value = serde_json::from_str(lines.next().ok_or("empty input")?).map_err(|e| e.to_string())?;
    if head.get("type").and_then(Value::as_str) != Some("run") {
        return Err("first line must be the run header".into());
    }
    let bits = u(&head, "precision")? as u32;
    let config = FlowConfig {
        s_start: f(&head, "s_start")?,
        s_end: f(&head, "s_end")?,
        ds: f(&head, "ds")?,
        precision: Precision::from_bits(bits).ok_or_else(|| format!("unsupported precision {bits}"))?,
        collision_radius: of(&head, "collision_radius")?,
        realness_eps: of(&head, "realness_eps")?,
        birth_threshold: f(&head, "birth_threshold")?,
        max_halvings: u(&head, "max_halvings")? as u32,
        speed_drop: f(&head, "speed_drop")?,
        speed_window: u(&head, "speed_window")? as usize,
        seed: u(&head, "seed")?,
    };
    let mut trajectories = Vec::new();
    for t in field(&head, "trajectories")?.as_array().ok_or("trajectories must be an array")? {
        let tag = field(t, "born_from")?.as_str().ok_or("born_from must be a string")?;
        trajectories.push(Trajectory {
            id: u(t, "id")? as usize,
            first_slice: u(t, "first_slice")? as usize,
            samples: Vec::new(),
            born_at: f(t, "born_at")?,
            born_from: BornFrom::parse(tag).ok_or_else(|| format!("unknown origin {tag}"))?,
            entry_angle: of(t, "entry_angle")?,
        });
    }
    let mut slices = Vec::new();
    let mut events = Vec::new();
    for line in lines {
        let v: Value = serde_json::from_str(line).map_err(|e| e.to_string())?;
        match v.get("type").and_then(Value::as_str) {
            Some("frame") => {
                let s = f(&v, "s")?;
                slices.push(s);
                for z in field(&v, "zeros")?.as_array().ok_or("zeros must be an array")? {
                    let id = u(z, "id")? as usize;
                    let is_real = field(z, "is_real")?.as_bool().ok_or("is_real must be a boolean")?;
                    let t = trajectories.get_mut(id).ok_or_else(|| format!("unknown trajectory {id}"))?;
                    t.samples.push(FlowSample { s, w: Complex::new(f(z, "re")?, f(z, "im")?), is_real });
                }
            }
            Some("event") => {
                let tag = field(&v, "kind")?.as_str().ok_or("kind must be a string")?;
                let (s_at, s_end) = match v.get("s_interval").and_then(Value::as_array) {
                    Some(iv) if iv.len() == 2 => (
                        iv[0].as_f64().ok_or("bad interval")?,
                        Some(iv[1].as_f64().ok_or("bad interval")?),
                    ),
                    _ => (f(&v, "s_at")?, None),
                };
                let loc = field(&v, "location")?;
                events.push(ScatterEvent {
                    id: u(&v, "id")? as usize,
                    kind: EventKind::parse(tag).ok_or_else(|| format!("unknown event kind {tag}"))?,
                    s_at,
                    s_end,
                    participants: field(&v, "participant_ids")?
                        .as_array()
                        .ok_or("participant_ids must be an array")?
                        .iter()
                        .map(|p| p.as_u64().map(|x| x as usize).ok_or("bad participant id"))
                        .collect::<Result<_, _>>()?,
                    location: Complex::new(f(loc, "re")?, f(loc, "im")?),
                });
            }
            other => return Err(format!("unexpected record type {other:?}")),
        }
    }
    Ok(FlowRun { config, slices, trajectories, events, halvings: u(&head, "halvings")? as usize })
}
