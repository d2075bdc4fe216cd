//! The JSON protocol-spec format shared with the CLI.
//!
//! ```json
//! {"segments": [{"t0": 0, "t1": 2, "kind": "tanh",
//!                "params": {"from": 1, "to": 4, "center": 1, "width": 0.2}}],
//!  "omega_in_sq": 1, "omega_out_sq": 4}
//! ```
//!
//! Segment kinds are `constant {value}`, `tanh {from, to, center, width}`,
//! `sech2 {base, amplitude, kappa, center}`, `samples {values, dt}` (first
//! value at `t0`) and `expr {expr}` (an expression in `t`). Segments built
//! from closures, or transformed by reflection, are written as samples.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;

use super::{FrequencyProfile, Level, Piecewise, PotentialProfile, Samples, Segment, Shape};

/// Default spacing used when a segment has to be written as samples.
pub const SAMPLE_SPACING: f64 = 1e-3;
const MAX_SAMPLES: usize = 4_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "lowercase")]
pub enum SegmentKind {
    Constant { value: f64 },
    Tanh { from: f64, to: f64, center: f64, width: f64 },
    Sech2 { base: f64, amplitude: f64, kappa: f64, center: f64 },
    Samples { values: Vec<f64>, dt: f64 },
    Expr { expr: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentJson {
    pub t0: f64,
    pub t1: f64,
    #[serde(flatten)]
    pub kind: SegmentKind,
}

/// Metadata attached to profiles produced by a completion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionMeta {
    pub t1: f64,
    pub tau2: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tn: Option<f64>,
    pub symmetric: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    pub segments: Vec<SegmentJson>,
    pub omega_in_sq: f64,
    pub omega_out_sq: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub completion: Option<CompletionMeta>,
}

/// Potentials use the same segment list with `v_in`/`v_out` plateaus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    pub segments: Vec<SegmentJson>,
    pub v_in: f64,
    pub v_out: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy_hint: Option<f64>,
}

impl SegmentJson {
    fn to_segment<T: Real>(&self) -> Result<Segment<T>> {
        let l = T::lit;
        let shape = match &self.kind {
            SegmentKind::Constant { value } => Shape::Constant(l(*value)),
            SegmentKind::Tanh { from, to, center, width } => {
                if *width == 0.0 {
                    return Err(Error::InvalidProfile("tanh width must be nonzero".into()));
                }
                Shape::Tanh { from: l(*from), to: l(*to), center: l(*center), width: l(*width) }
            }
            SegmentKind::Sech2 { base, amplitude, kappa, center } => {
                Shape::Sech2 { base: l(*base), amplitude: l(*amplitude), kappa: l(*kappa), center: l(*center) }
            }
            SegmentKind::Samples { values, dt } => {
                let span = *dt * (values.len().saturating_sub(1)) as f64;
                if ((self.t0 + span) - self.t1).abs() > 1e-9 * (1.0 + self.t1.abs()) {
                    return Err(Error::InvalidProfile(format!(
                        "samples on [{}, {}) must span the segment: {} values at dt = {}",
                        self.t0,
                        self.t1,
                        values.len(),
                        dt
                    )));
                }
                Shape::Samples(Samples::new(l(self.t0), l(*dt), values.iter().map(|v| l(*v)).collect())?)
            }
            SegmentKind::Expr { expr } => Shape::Expr(super::Expr::parse(expr)?),
        };
        Ok(Segment::new(l(self.t0), l(self.t1), shape))
    }

    /// Writes a segment, falling back to samples when the shape or its
    /// time/value maps have no closed form in the format.
    fn from_segment<T: Real>(seg: &Segment<T>) -> Result<Self> {
        let f = |x: T| x.as_f64();
        let (t0, t1) = (f(seg.t0), f(seg.t1));
        let identity_time = !seg.time.reversed && seg.time.shift == T::zero();
        let map = seg.value;
        let kind = match &seg.shape {
            Shape::Constant(v) => Some(SegmentKind::Constant { value: f(map.apply(*v)) }),
            Shape::Tanh { from, to, center, width } => {
                let (from, to) = (map.apply(*from), map.apply(*to));
                Some(if seg.time.reversed {
                    // tanh((shift - t - c) / w) = -tanh((t - (shift - c)) / w)
                    SegmentKind::Tanh {
                        from: f(to),
                        to: f(from),
                        center: f(seg.time.shift - *center),
                        width: f(*width),
                    }
                } else {
                    SegmentKind::Tanh {
                        from: f(from),
                        to: f(to),
                        center: f(*center - seg.time.shift),
                        width: f(*width),
                    }
                })
            }
            Shape::Sech2 { base, amplitude, kappa, center } => {
                let center = if seg.time.reversed { seg.time.shift - *center } else { *center - seg.time.shift };
                Some(SegmentKind::Sech2 {
                    base: f(map.apply(*base)),
                    amplitude: f(map.scale * *amplitude),
                    kappa: f(*kappa),
                    center: f(center),
                })
            }
            Shape::Expr(e) if identity_time && map == super::ValueMap::identity() => {
                Some(SegmentKind::Expr { expr: e.source().to_string() })
            }
            Shape::Samples(s) if identity_time && map == super::ValueMap::identity() && s.start() == seg.t0 => {
                let n = ((seg.t1 - seg.t0) / s.dt()).round().to_usize().unwrap_or(0);
                if n < s.values().len() && (s.start() + s.dt() * T::lit(n as f64) - seg.t1).abs() <= T::tol(1e-12, 16.0)
                {
                    Some(SegmentKind::Samples {
                        values: s.values()[..=n].iter().map(|v| f(*v)).collect(),
                        dt: f(s.dt()),
                    })
                } else {
                    None
                }
            }
            _ => None,
        };
        let kind = match kind {
            Some(k) => k,
            None => sampled(seg)?,
        };
        Ok(SegmentJson { t0, t1, kind })
    }
}

fn sampled<T: Real>(seg: &Segment<T>) -> Result<SegmentKind> {
    let len = (seg.t1 - seg.t0).as_f64();
    let n = ((len / SAMPLE_SPACING).ceil() as usize).max(4);
    if n > MAX_SAMPLES {
        return Err(Error::InvalidProfile(format!("segment of length {len} is too long to sample")));
    }
    let dt = len / n as f64;
    let values = (0..=n)
        .map(|i| {
            let t = if i == n { seg.t1 } else { seg.t0 + T::lit(dt * i as f64) };
            seg.eval(t).as_f64()
        })
        .collect();
    Ok(SegmentKind::Samples { values, dt })
}

fn build_piecewise<T: Real>(segments: &[SegmentJson], left: f64, right: f64) -> Result<Piecewise<T>> {
    let segs = segments.iter().map(SegmentJson::to_segment).collect::<Result<Vec<Segment<T>>>>()?;
    let (lower, upper) = match (segs.first(), segs.last()) {
        (Some(a), Some(b)) => (a.t0, b.t1),
        _ if left == right => return Ok(Piecewise::constant(T::lit(left))),
        _ => return Err(Error::InvalidProfile("unequal plateaus need at least one segment to place the jump".into())),
    };
    Piecewise::new(segs, lower, upper, Level::new(T::lit(left)), Level::new(T::lit(right)))
}

fn write_segments<T: Real>(p: &Piecewise<T>) -> Result<Vec<SegmentJson>> {
    if p.segments().is_empty() {
        if p.left_value() == p.right_value() {
            return Ok(Vec::new());
        }
        // A bare jump has no segments; spell it out as two constant pieces.
        let b = p.lower();
        return [
            Segment::constant(b - T::one(), b, p.left_value()),
            Segment::constant(b, b + T::one(), p.right_value()),
        ]
        .iter()
        .map(SegmentJson::from_segment)
        .collect();
    }
    p.segments().iter().map(SegmentJson::from_segment).collect()
}

impl ProfileSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn to_profile<T: Real>(&self) -> Result<FrequencyProfile<T>> {
        FrequencyProfile::new(build_piecewise(&self.segments, self.omega_in_sq, self.omega_out_sq)?)
    }

    pub fn from_profile<T: Real>(profile: &FrequencyProfile<T>) -> Result<Self> {
        Ok(ProfileSpec {
            segments: write_segments(profile.piecewise())?,
            omega_in_sq: profile.omega_in_sq().as_f64(),
            omega_out_sq: profile.omega_out_sq().as_f64(),
            completion: None,
        })
    }
}

impl PotentialSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn to_potential<T: Real>(&self) -> Result<PotentialProfile<T>> {
        let func = build_piecewise(&self.segments, self.v_in, self.v_out)?;
        Ok(PotentialProfile::new(func, self.energy_hint.map(T::lit)))
    }

    pub fn from_potential<T: Real>(potential: &PotentialProfile<T>) -> Result<Self> {
        Ok(PotentialSpec {
            segments: write_segments(potential.piecewise())?,
            v_in: potential.v_left().as_f64(),
            v_out: potential.v_right().as_f64(),
            energy_hint: potential.energy_hint().map(|e| e.as_f64()),
        })
    }
}
