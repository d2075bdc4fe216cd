use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::real::Real;

use super::shape::Shape;

/// Affine map applied to a shape's output: `offset + scale * value`.
///
/// Dualization composes these maps instead of wrapping closures, so that
/// dualizing twice with the same energy is bit-exact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValueMap<T> {
    pub scale: T,
    pub offset: T,
}

impl<T: Real> ValueMap<T> {
    pub fn identity() -> Self {
        ValueMap { scale: T::one(), offset: T::zero() }
    }

    #[inline]
    pub fn apply(&self, v: T) -> T {
        self.offset + self.scale * v
    }

    /// The map `v -> energy - self(v)`.
    pub fn subtracted_from(&self, energy: T) -> Self {
        ValueMap { scale: -self.scale, offset: energy - self.offset }
    }
}

/// Affine map applied to time before evaluating a shape: `sign * t + shift`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeMap<T> {
    pub reversed: bool,
    pub shift: T,
}

impl<T: Real> TimeMap<T> {
    pub fn identity() -> Self {
        TimeMap { reversed: false, shift: T::zero() }
    }

    #[inline]
    pub fn apply(&self, t: T) -> T {
        if self.reversed {
            self.shift - t
        } else {
            t + self.shift
        }
    }

    /// Map for `t -> self(2 c - t)`.
    pub fn reflected_about(&self, c: T) -> Self {
        let two_c = c + c;
        if self.reversed {
            // shift - (2c - t) = t + (shift - 2c)
            TimeMap { reversed: false, shift: self.shift - two_c }
        } else {
            // (2c - t) + shift
            TimeMap { reversed: true, shift: two_c + self.shift }
        }
    }

    /// Map for `t -> self(t - dt)`.
    pub fn delayed(&self, dt: T) -> Self {
        if self.reversed {
            TimeMap { reversed: true, shift: self.shift + dt }
        } else {
            TimeMap { reversed: false, shift: self.shift - dt }
        }
    }
}

/// One piece of a piecewise function, covering `[t0, t1)`.
#[derive(Debug, Clone)]
pub struct Segment<T> {
    pub t0: T,
    pub t1: T,
    pub shape: Shape<T>,
    pub time: TimeMap<T>,
    pub value: ValueMap<T>,
}

impl<T: Real> Segment<T> {
    pub fn new(t0: T, t1: T, shape: Shape<T>) -> Self {
        Segment { t0, t1, shape, time: TimeMap::identity(), value: ValueMap::identity() }
    }

    pub fn constant(t0: T, t1: T, v: T) -> Self {
        Segment::new(t0, t1, Shape::Constant(v))
    }

    #[inline]
    pub fn eval(&self, t: T) -> T {
        self.value.apply(self.shape.eval(self.time.apply(t)))
    }

    pub fn reflected_about(&self, c: T) -> Self {
        let two_c = c + c;
        Segment {
            t0: two_c - self.t1,
            t1: two_c - self.t0,
            shape: self.shape.clone(),
            time: self.time.reflected_about(c),
            value: self.value,
        }
    }

    pub fn delayed(&self, dt: T) -> Self {
        Segment {
            t0: self.t0 + dt,
            t1: self.t1 + dt,
            shape: self.shape.clone(),
            time: self.time.delayed(dt),
            value: self.value,
        }
    }

    pub fn with_value_map(&self, map: ValueMap<T>) -> Self {
        Segment { value: map, ..self.clone() }
    }

    /// Same function restricted to `[lo, hi)`.
    pub fn clipped(&self, lo: T, hi: T) -> Self {
        Segment { t0: lo, t1: hi, ..self.clone() }
    }
}

/// Asymptotic plateau value, stored through the same affine map machinery as
/// segments so that dualization stays exact on the plateaus too.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Level<T> {
    pub raw: T,
    pub map: ValueMap<T>,
}

impl<T: Real> Level<T> {
    pub fn new(v: T) -> Self {
        Level { raw: v, map: ValueMap::identity() }
    }

    #[inline]
    pub fn value(&self) -> T {
        self.map.apply(self.raw)
    }

    pub fn subtracted_from(&self, energy: T) -> Self {
        Level { raw: self.raw, map: self.map.subtracted_from(energy) }
    }
}

/// A function of one variable that is constant outside `[lower, upper)` and
/// given by contiguous segments inside.
///
/// This is the shared representation behind frequency profiles (variable:
/// time) and potentials (variable: position).
#[derive(Debug, Clone)]
pub struct Piecewise<T> {
    segments: Vec<Segment<T>>,
    lower: T,
    upper: T,
    left: Level<T>,
    right: Level<T>,
}

impl<T: Real> Piecewise<T> {
    /// Validates that segments tile `[lower, upper)` without gaps or overlaps.
    ///
    /// With no segments, `lower == upper` is the location of a sudden jump
    /// between the two plateaus.
    pub fn new(segments: Vec<Segment<T>>, lower: T, upper: T, left: Level<T>, right: Level<T>) -> Result<Self> {
        if !lower.is_finite() || !upper.is_finite() {
            return Err(Error::InvalidProfile("plateau edges must be finite".into()));
        }
        if !left.value().is_finite() || !right.value().is_finite() {
            return Err(Error::InvalidProfile("plateau values must be finite".into()));
        }
        if segments.is_empty() {
            if lower != upper {
                return Err(Error::SegmentOrder(lower.as_f64()));
            }
        } else {
            if segments[0].t0 != lower {
                return Err(Error::SegmentOrder(lower.as_f64()));
            }
            for s in &segments {
                if !(s.t1 > s.t0) || !s.t0.is_finite() || !s.t1.is_finite() {
                    return Err(Error::SegmentOrder(s.t0.as_f64()));
                }
            }
            for w in segments.windows(2) {
                if w[0].t1 != w[1].t0 {
                    return Err(Error::SegmentOrder(w[0].t1.as_f64()));
                }
            }
            if segments.last().map(|s| s.t1) != Some(upper) {
                return Err(Error::SegmentOrder(upper.as_f64()));
            }
        }
        Ok(Piecewise { segments, lower, upper, left, right })
    }

    pub fn constant(v: T) -> Self {
        Piecewise {
            segments: Vec::new(),
            lower: T::zero(),
            upper: T::zero(),
            left: Level::new(v),
            right: Level::new(v),
        }
    }

    pub fn segments(&self) -> &[Segment<T>] {
        &self.segments
    }

    pub fn lower(&self) -> T {
        self.lower
    }

    pub fn upper(&self) -> T {
        self.upper
    }

    pub fn left_level(&self) -> Level<T> {
        self.left
    }

    pub fn right_level(&self) -> Level<T> {
        self.right
    }

    pub fn left_value(&self) -> T {
        self.left.value()
    }

    pub fn right_value(&self) -> T {
        self.right.value()
    }

    fn locate(&self, t: T) -> Option<&Segment<T>> {
        if t < self.lower || t >= self.upper {
            return None;
        }
        let i = self
            .segments
            .binary_search_by(|s| {
                if t < s.t0 {
                    Ordering::Greater
                } else if t >= s.t1 {
                    Ordering::Less
                } else {
                    Ordering::Equal
                }
            })
            .ok()?;
        Some(&self.segments[i])
    }

    #[inline]
    pub fn eval(&self, t: T) -> T {
        self.eval_anchored(t, t)
    }

    /// Evaluates at `t` with the piece chosen by `anchor`.
    ///
    /// Integrators pass the midpoint of the current step as the anchor so
    /// that stage evaluations at a step's endpoint still use the piece the
    /// step belongs to.
    pub fn eval_anchored(&self, t: T, anchor: T) -> T {
        if anchor < self.lower {
            return self.left.value();
        }
        if anchor >= self.upper {
            return self.right.value();
        }
        match self.locate(anchor) {
            Some(seg) => seg.eval(t),
            None => self.right.value(),
        }
    }

    /// Plateau edges plus every interior segment boundary, ascending.
    pub fn boundaries(&self) -> Vec<T> {
        let mut out = vec![self.lower];
        for s in &self.segments {
            out.push(s.t1);
        }
        out.dedup();
        out
    }

    /// Segments covering exactly `[lo, hi)`, with plateau stretches turned
    /// into constant segments.
    pub fn pieces(&self, lo: T, hi: T) -> Vec<Segment<T>> {
        let mut out = Vec::new();
        if !(hi > lo) {
            return out;
        }
        if lo < self.lower {
            let end = hi.min(self.lower);
            out.push(Segment { value: self.left.map, ..Segment::constant(lo, end, self.left.raw) });
        }
        for s in &self.segments {
            let a = s.t0.max(lo);
            let b = s.t1.min(hi);
            if b > a {
                out.push(s.clipped(a, b));
            }
        }
        if hi > self.upper {
            let start = lo.max(self.upper);
            out.push(Segment { value: self.right.map, ..Segment::constant(start, hi, self.right.raw) });
        }
        out
    }

    /// The function with every segment value passed through `v -> energy - v`.
    pub fn subtracted_from(&self, energy: T) -> Self {
        Piecewise {
            segments: self.segments.iter().map(|s| s.with_value_map(s.value.subtracted_from(energy))).collect(),
            lower: self.lower,
            upper: self.upper,
            left: self.left.subtracted_from(energy),
            right: self.right.subtracted_from(energy),
        }
    }

    /// `g(t) = f(2c - t)`.
    pub fn reflected_about(&self, c: T) -> Self {
        let two_c = c + c;
        Piecewise {
            segments: self.segments.iter().rev().map(|s| s.reflected_about(c)).collect(),
            lower: two_c - self.upper,
            upper: two_c - self.lower,
            left: self.right,
            right: self.left,
        }
    }

    /// `g(t) = f(t - dt)`.
    pub fn delayed(&self, dt: T) -> Self {
        Piecewise {
            segments: self.segments.iter().map(|s| s.delayed(dt)).collect(),
            lower: self.lower + dt,
            upper: self.upper + dt,
            left: self.left,
            right: self.right,
        }
    }

    /// Minimum over a scan of every segment (exact for constant segments).
    pub fn scan_min(&self, per_segment: usize) -> (T, T) {
        let mut best = (self.lower, self.left.value());
        if self.right.value() < best.1 {
            best = (self.upper, self.right.value());
        }
        for s in &self.segments {
            if s.shape.is_constant() {
                let v = s.eval(s.t0);
                if v < best.1 {
                    best = (s.t0, v);
                }
                continue;
            }
            let n = per_segment.max(2);
            for i in 0..n {
                let t = s.t0 + (s.t1 - s.t0) * T::lit(i as f64) / T::lit(n as f64);
                let v = s.eval(t);
                if v < best.1 || v.is_nan() {
                    best = (t, v);
                }
            }
        }
        best
    }
}
