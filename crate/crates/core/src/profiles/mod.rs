//! Frequency profiles ω²(t) and their dual scattering potentials V(x).
//!
//! Both are [`Piecewise`] functions: constant plateaus outside a finite
//! window, contiguous segments inside. Profiles are immutable once built
//! and cheap to clone (segment payloads are reference counted).

mod builders;
pub mod json;
mod piecewise;
mod shape;

use std::sync::Arc;

pub use builders::{
    make_cosmology, make_desitter, make_piecewise, make_scalar_qed, make_sech2, make_sech2_with_cutoff, make_yukawa,
    SegmentSpec,
};
pub use piecewise::{Level, Piecewise, Segment, TimeMap, ValueMap};
pub use shape::{Closure, Expr, Samples, Shape};

use crate::error::{Error, Result};
use crate::real::Real;

/// Relative plateau cutoff: a closure counts as constant once it is within
/// `1e-12 * max(1, |asymptote|)` of its asymptotic value.
pub const PLATEAU_CUTOFF: f64 = 1e-12;

/// Squared frequency ω²(t) of the oscillator.
#[derive(Debug, Clone)]
pub struct FrequencyProfile<T> {
    func: Piecewise<T>,
    nonpositive_at: Option<T>,
}

impl<T: Real> FrequencyProfile<T> {
    /// Wraps a piecewise function, requiring positive plateaus.
    ///
    /// Interior stretches with ω² ≤ 0 are allowed and reported by
    /// [`FrequencyProfile::nonpositive_at`].
    pub fn new(func: Piecewise<T>) -> Result<Self> {
        for v in [func.left_value(), func.right_value()] {
            if !(v > T::zero()) {
                return Err(Error::NonPositivePlateau(v.as_f64()));
            }
        }
        let (t_min, v_min) = func.scan_min(512);
        if v_min.is_nan() {
            return Err(Error::InvalidProfile(format!("profile is not finite near t = {}", t_min.as_f64())));
        }
        let nonpositive_at = if v_min <= T::zero() { Some(t_min) } else { None };
        Ok(FrequencyProfile { func, nonpositive_at })
    }

    pub fn constant(omega_sq: T) -> Result<Self> {
        Self::new(Piecewise::constant(omega_sq))
    }

    /// Instantaneous jump from `before` to `after` at `at`.
    pub fn sudden_jump(before: T, after: T, at: T) -> Result<Self> {
        Self::new(Piecewise::new(Vec::new(), at, at, Level::new(before), Level::new(after))?)
    }

    /// Profile given by a closure, with plateaus found by scanning.
    pub fn from_closure(f: Closure<T>, search: &PlateauSearch<T>) -> Result<Self> {
        Self::new(piecewise_from_closure(f, search)?)
    }

    pub fn eval(&self, t: T) -> T {
        self.func.eval(t)
    }

    pub fn eval_anchored(&self, t: T, anchor: T) -> T {
        self.func.eval_anchored(t, anchor)
    }

    pub fn omega_in_sq(&self) -> T {
        self.func.left_value()
    }

    pub fn omega_out_sq(&self) -> T {
        self.func.right_value()
    }

    pub fn omega_in(&self) -> T {
        self.omega_in_sq().sqrt()
    }

    pub fn omega_out(&self) -> T {
        self.omega_out_sq().sqrt()
    }

    pub fn t_minus(&self) -> T {
        self.func.lower()
    }

    pub fn t_plus(&self) -> T {
        self.func.upper()
    }

    pub fn segments(&self) -> &[Segment<T>] {
        self.func.segments()
    }

    pub fn boundaries(&self) -> Vec<T> {
        self.func.boundaries()
    }

    pub fn piecewise(&self) -> &Piecewise<T> {
        &self.func
    }

    /// Where a scan found ω² ≤ 0, if anywhere.
    pub fn nonpositive_at(&self) -> Option<T> {
        self.nonpositive_at
    }

    /// `ω²(-t)`.
    pub fn reversed(&self) -> Self {
        self.reflected_about(T::zero())
    }

    /// `ω²(2c - t)`.
    pub fn reflected_about(&self, c: T) -> Self {
        FrequencyProfile { func: self.func.reflected_about(c), nonpositive_at: self.nonpositive_at.map(|t| c + c - t) }
    }

    /// `ω²(t - dt)`.
    pub fn delayed(&self, dt: T) -> Self {
        FrequencyProfile { func: self.func.delayed(dt), nonpositive_at: self.nonpositive_at.map(|t| t + dt) }
    }
}

/// Potential V(x) of the one-dimensional scattering problem (ℏ²/2m = 1).
#[derive(Debug, Clone)]
pub struct PotentialProfile<T> {
    func: Piecewise<T>,
    energy_hint: Option<T>,
}

impl<T: Real> PotentialProfile<T> {
    pub fn new(func: Piecewise<T>, energy_hint: Option<T>) -> Self {
        PotentialProfile { func, energy_hint }
    }

    pub fn constant(v: T) -> Self {
        Self::new(Piecewise::constant(v), None)
    }

    /// Well of depth `depth` on `[-half_width, half_width]`, zero outside.
    pub fn square_well(depth: T, half_width: T) -> Result<Self> {
        if !(half_width > T::zero()) {
            return Err(Error::InvalidArgument("square well half-width must be positive".into()));
        }
        let func = Piecewise::new(
            vec![Segment::constant(-half_width, half_width, -depth)],
            -half_width,
            half_width,
            Level::new(T::zero()),
            Level::new(T::zero()),
        )?;
        Ok(Self::new(func, None))
    }

    /// `-depth * sech²(kappa (x - center))`, truncated to plateaus at the
    /// standard cutoff.
    pub fn sech2_well(depth: T, kappa: T, center: T) -> Result<Self> {
        let func = builders::sech2_piecewise(T::zero(), -depth, kappa, center, T::lit(PLATEAU_CUTOFF))?;
        Ok(Self::new(func, None))
    }

    pub fn from_closure(f: Closure<T>, search: &PlateauSearch<T>) -> Result<Self> {
        Ok(Self::new(piecewise_from_closure(f, search)?, None))
    }

    pub fn eval(&self, x: T) -> T {
        self.func.eval(x)
    }

    pub fn eval_anchored(&self, x: T, anchor: T) -> T {
        self.func.eval_anchored(x, anchor)
    }

    pub fn v_left(&self) -> T {
        self.func.left_value()
    }

    pub fn v_right(&self) -> T {
        self.func.right_value()
    }

    pub fn x_minus(&self) -> T {
        self.func.lower()
    }

    pub fn x_plus(&self) -> T {
        self.func.upper()
    }

    pub fn energy_hint(&self) -> Option<T> {
        self.energy_hint
    }

    pub fn segments(&self) -> &[Segment<T>] {
        self.func.segments()
    }

    pub fn boundaries(&self) -> Vec<T> {
        self.func.boundaries()
    }

    pub fn piecewise(&self) -> &Piecewise<T> {
        &self.func
    }

    /// `V(2c - x)`.
    pub fn reflected_about(&self, c: T) -> Self {
        PotentialProfile { func: self.func.reflected_about(c), energy_hint: self.energy_hint }
    }

    /// Inverse of [`dualize`]: ω²(t) = E − V(x)|_{x=t}.
    pub fn to_frequency(&self, energy: T) -> Result<FrequencyProfile<T>> {
        FrequencyProfile::new(self.func.subtracted_from(energy))
    }
}

/// Maps a frequency profile to the scattering potential V(x) = E − ω²(t=x).
///
/// For V to vanish at both ends the caller picks E equal to the common
/// plateau value; with unequal plateaus the potential simply has two
/// different asymptotes.
pub fn dualize<T: Real>(profile: &FrequencyProfile<T>, energy: T) -> PotentialProfile<T> {
    PotentialProfile { func: profile.func.subtracted_from(energy), energy_hint: Some(energy) }
}

/// Controls how plateaus of closure-defined functions are located.
#[derive(Debug, Clone, Copy)]
pub struct PlateauSearch<T> {
    /// Asymptotic values are read at `±limit`.
    pub limit: T,
    /// Number of scan intervals over `[-limit, limit]`.
    pub samples: usize,
    /// Relative cutoff, see [`PLATEAU_CUTOFF`].
    pub rel_cutoff: T,
}

impl<T: Real> Default for PlateauSearch<T> {
    fn default() -> Self {
        PlateauSearch { limit: T::lit(1000.0), samples: 1 << 17, rel_cutoff: T::lit(PLATEAU_CUTOFF) }
    }
}

pub(crate) fn piecewise_from_closure<T: Real>(f: Closure<T>, search: &PlateauSearch<T>) -> Result<Piecewise<T>> {
    let (lower, upper, left, right) = detect_plateaus(&*f, search)?;
    let segments = if upper > lower { vec![Segment::new(lower, upper, Shape::Closure(f))] } else { Vec::new() };
    let upper = if upper > lower { upper } else { lower };
    Piecewise::new(segments, lower, upper, Level::new(left), Level::new(right))
}

/// Finds `(t_minus, t_plus, left, right)` for a closure that is asymptotically
/// constant.
pub(crate) fn detect_plateaus<T: Real>(f: &dyn Fn(T) -> T, search: &PlateauSearch<T>) -> Result<(T, T, T, T)> {
    let l = search.limit;
    let half = T::lit(0.5);
    let left = f(-l);
    let right = f(l);
    if !left.is_finite() || !right.is_finite() {
        return Err(Error::NotAsymptoticallyConstant("non-finite value at the search limit".into()));
    }
    let cut_l = search.rel_cutoff * T::one().max(left.abs());
    let cut_r = search.rel_cutoff * T::one().max(right.abs());
    for (probe, target, cut) in [(-l * half, left, cut_l), (l * half, right, cut_r)] {
        let v = f(probe);
        if !((v - target).abs() < cut) {
            return Err(Error::NotAsymptoticallyConstant(format!(
                "value {} at t = {} differs from {} at the search limit",
                v.as_f64(),
                probe.as_f64(),
                target.as_f64()
            )));
        }
    }
    let n = search.samples.max(16);
    let step = (l + l) / T::lit(n as f64);
    let at = |i: usize| -l + step * T::lit(i as f64);
    let mut first = None;
    let mut last = None;
    for i in 0..=n {
        let t = at(i);
        let v = f(t);
        if !v.is_finite() {
            return Err(Error::InvalidProfile(format!("non-finite value at t = {}", t.as_f64())));
        }
        if first.is_none() && (v - left).abs() >= cut_l {
            first = Some(i);
        }
        if (v - right).abs() >= cut_r {
            last = Some(i);
        }
    }
    match (first, last) {
        (None, None) => Ok((T::zero(), T::zero(), left, right)),
        (a, b) => {
            let lo = a.or(b).unwrap();
            let hi = b.or(a).unwrap();
            let lower = at(lo.saturating_sub(1));
            let upper = at((hi + 1).min(n));
            Ok((lower, upper.max(lower), left, right))
        }
    }
}

/// Wraps a plain closure as a shareable [`Closure`].
pub fn arc_fn<T: Real, F: Fn(T) -> T + Send + Sync + 'static>(f: F) -> Closure<T> {
    Arc::new(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateaus_are_exact_outside_window() {
        let p = make_sech2(1.5_f64, 2.0, 1.0).unwrap();
        assert_eq!(p.eval(p.t_minus() - 1e-9), 1.5);
        assert_eq!(p.eval(p.t_plus() + 1.0), 1.5);
        assert_eq!(p.eval(-1e9), 1.5);
    }

    #[test]
    fn nonpositive_interior_is_flagged_not_rejected() {
        let p = make_sech2(1.0_f64, -3.0, 1.0).unwrap();
        assert!(p.nonpositive_at().is_some());
        assert!(make_sech2(1.0_f64, 3.0, 1.0).unwrap().nonpositive_at().is_none());
    }

    #[test]
    fn dualize_round_trip_is_bit_exact() {
        let p = make_sech2(2.0_f64, 6.0, 1.3).unwrap();
        let e = 2.0;
        let v = dualize(&p, e);
        let back = v.to_frequency(e).unwrap();
        for i in 0..=200 {
            let t = -20.0 + 0.2 * i as f64;
            assert_eq!(back.eval(t).to_bits(), p.eval(t).to_bits(), "t = {t}");
            assert_eq!(v.eval(t), e - p.eval(t));
        }
    }

    #[test]
    fn sech2_well_has_expected_shape() {
        let v = PotentialProfile::sech2_well(2.0_f64, 1.0, 0.5).unwrap();
        assert!((v.eval(0.5) + 2.0).abs() < 1e-15);
        let x = 1.7_f64;
        assert!((v.eval(x) + 2.0 / (x - 0.5).cosh().powi(2)).abs() < 1e-15);
        assert_eq!(v.v_left(), 0.0);
        assert_eq!(v.v_right(), 0.0);
    }

    #[test]
    fn detect_rejects_growing_closure() {
        let f = arc_fn(|t: f64| 1.0 + t * t);
        assert!(matches!(
            FrequencyProfile::from_closure(f, &PlateauSearch::default()),
            Err(Error::NotAsymptoticallyConstant(_))
        ));
    }

    #[test]
    fn reversal_swaps_plateaus() {
        let p = FrequencyProfile::sudden_jump(1.0_f64, 4.0, 0.5).unwrap();
        let r = p.reversed();
        assert_eq!(r.omega_in_sq(), 4.0);
        assert_eq!(r.omega_out_sq(), 1.0);
        assert_eq!(r.t_minus(), -0.5);
    }
}
