use std::sync::Arc;

use crate::error::{Error, Result};
use crate::profiles::{Closure, FrequencyProfile, Level, Piecewise, Segment, Shape};
use crate::real::{linspace, Real};

/// A prescribed Ermakov amplitude `ρ_ref(t)`.
///
/// Implementors that know their derivatives should return them from
/// [`ReferenceFunction::derivatives`]; otherwise `ρ̈` is obtained by
/// Richardson-extrapolated central differences.
pub trait ReferenceFunction<T: Real>: Send + Sync {
    fn value(&self, t: T) -> T;

    /// `(ρ̇, ρ̈)` at `t`, when known in closed form.
    fn derivatives(&self, _t: T) -> Option<(T, T)> {
        None
    }
}

/// Interpolating polynomial (or cosine) used by [`Ramp`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RampKind {
    /// `10u³ − 15u⁴ + 6u⁵`: first and second derivatives vanish at both ends.
    Quintic,
    /// `35u⁴ − 84u⁵ + 70u⁶ − 20u⁷`: derivatives up to the third vanish.
    Septic,
    /// `(1 − cos πu)/2`: only the first derivative vanishes, so `ω_eff²`
    /// jumps at the junctions.
    Cosine,
}

impl RampKind {
    /// `(s, s', s'')` at `u ∈ [0, 1]`.
    fn eval<T: Real>(self, u: T) -> (T, T, T) {
        let l = T::lit;
        let v = T::one() - u;
        match self {
            RampKind::Quintic => {
                let s = u * u * u * (l(10.0) - l(15.0) * u + l(6.0) * u * u);
                (s, l(30.0) * u * u * v * v, l(60.0) * u * v * (v - u))
            }
            RampKind::Septic => {
                let u4 = u * u * u * u;
                let s = u4 * (l(35.0) - l(84.0) * u + l(70.0) * u * u - l(20.0) * u * u * u);
                let uv = u * v;
                (s, l(140.0) * uv * uv * uv, l(420.0) * uv * uv * (v - u))
            }
            RampKind::Cosine => {
                let pi = T::PI();
                let (sn, cs) = (pi * u).sin_cos();
                ((T::one() - cs) / l(2.0), pi / l(2.0) * sn, pi * pi / l(2.0) * cs)
            }
        }
    }
}

/// `ρ(t)` moving from `rho0` to `rho1` over `[t0, t0 + tau]`, optionally
/// with a bump `A·64(u(1−u))³` added on top (which leaves the junctions
/// untouched).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ramp<T> {
    pub kind: RampKind,
    pub rho0: T,
    pub rho1: T,
    pub t0: T,
    pub tau: T,
    pub bump: T,
}

impl<T: Real> Ramp<T> {
    pub fn new(kind: RampKind, rho0: T, rho1: T, t0: T, tau: T) -> Self {
        Ramp { kind, rho0, rho1, t0, tau, bump: T::zero() }
    }

    /// Ramp between the vacuum amplitudes `ω^{-1/2}` of two plateaus.
    pub fn between_frequencies(kind: RampKind, omega0: T, omega1: T, t0: T, tau: T) -> Self {
        Self::new(kind, T::one() / omega0.sqrt(), T::one() / omega1.sqrt(), t0, tau)
    }

    pub fn with_bump(self, bump: T) -> Self {
        Ramp { bump, ..self }
    }

    pub fn t1(&self) -> T {
        self.t0 + self.tau
    }

    /// `(ρ, ρ̇, ρ̈)`.
    pub fn eval(&self, t: T) -> (T, T, T) {
        let u = (t - self.t0) / self.tau;
        if u < T::zero() {
            return (self.rho0, T::zero(), T::zero());
        }
        if u > T::one() {
            return (self.rho1, T::zero(), T::zero());
        }
        let (s, s1, s2) = self.kind.eval(u);
        let l = T::lit;
        let v = T::one() - u;
        let uv = u * v;
        let b = l(64.0) * uv * uv * uv;
        let b1 = l(192.0) * uv * uv * (v - u);
        let b2 = l(384.0) * uv * ((v - u) * (v - u) - uv);
        let d = self.rho1 - self.rho0;
        let a = self.bump;
        (self.rho0 + d * s + a * b, (d * s1 + a * b1) / self.tau, (d * s2 + a * b2) / (self.tau * self.tau))
    }
}

impl<T: Real> ReferenceFunction<T> for Ramp<T> {
    fn value(&self, t: T) -> T {
        self.eval(t).0
    }

    fn derivatives(&self, t: T) -> Option<(T, T)> {
        let (_, d1, d2) = self.eval(t);
        Some((d1, d2))
    }
}

/// A reference amplitude given only by its values.
#[derive(Clone)]
pub struct ClosureReference<T> {
    f: Closure<T>,
}

impl<T: Real> ClosureReference<T> {
    pub fn new(f: Closure<T>) -> Self {
        ClosureReference { f }
    }
}

impl<T: Real> ReferenceFunction<T> for ClosureReference<T> {
    fn value(&self, t: T) -> T {
        (self.f)(t)
    }
}

/// `(ρ̇, ρ̈)` by central differences at step `h` and `h/2`, Richardson
/// extrapolated.
pub(crate) fn numeric_derivatives<T: Real>(f: &dyn ReferenceFunction<T>, t: T, h: T) -> (T, T) {
    let two = T::lit(2.0);
    let d = |h: T| {
        let (p, m, c) = (f.value(t + h), f.value(t - h), f.value(t));
        ((p - m) / (two * h), (p - two * c + m) / (h * h))
    };
    let (a1, a2) = d(h);
    let (b1, b2) = d(h / two);
    let three = T::lit(3.0);
    let four = T::lit(4.0);
    ((four * b1 - a1) / three, (four * b2 - a2) / three)
}

pub(crate) fn derivatives_of<T: Real>(f: &dyn ReferenceFunction<T>, t: T, h: T) -> (T, T) {
    f.derivatives(t).unwrap_or_else(|| numeric_derivatives(f, t, h))
}

/// Profile produced by [`inverse_engineer`].
#[derive(Debug, Clone)]
pub struct EngineeredProfile<T> {
    pub profile: FrequencyProfile<T>,
    /// Largest jump of `ω_eff²` across the two junctions.
    pub junction_jump: T,
    /// `false` when `ω_eff²` is discontinuous at a junction.
    pub smooth: bool,
}

/// Relative size of a junction jump in `ω_eff²` that still counts as smooth.
pub const JUNCTION_TOLERANCE: f64 = 1e-6;

/// `ω_eff² = ρ⁻⁴ − ρ̈/ρ` on `window`, with plateaus `ρ⁻⁴` on either side.
///
/// The Ermakov solution started adiabatically then follows `ρ_ref` exactly,
/// so the profile leaves the oscillator unexcited.
pub fn inverse_engineer<T: Real>(
    rho_ref: Arc<dyn ReferenceFunction<T>>,
    window: (T, T),
) -> Result<EngineeredProfile<T>> {
    let (a, b) = window;
    let tau = b - a;
    if !(tau > T::zero()) || !tau.is_finite() {
        return Err(Error::InvalidArgument("inverse-engineering window must have positive length".into()));
    }
    let h = T::lit(1e-5) * tau;
    for t in linspace(a, b, 1025) {
        let r = rho_ref.value(t);
        if !(r > T::zero()) || !r.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "reference amplitude must be positive, got {} at t = {}",
                r.as_f64(),
                t.as_f64()
            )));
        }
    }
    let (r_a, r_b) = (rho_ref.value(a), rho_ref.value(b));
    for (t, r) in [(a, r_a), (b, r_b)] {
        let (d1, _) = derivatives_of(&*rho_ref, t, h);
        if (d1 * tau / r).abs() > T::tol(1e-6, 1e6) {
            return Err(Error::InvalidArgument(format!(
                "reference amplitude must have zero slope at the junction t = {} (got {})",
                t.as_f64(),
                d1.as_f64()
            )));
        }
    }
    let w_in = T::one() / (r_a * r_a * r_a * r_a);
    let w_out = T::one() / (r_b * r_b * r_b * r_b);
    let f = rho_ref.clone();
    let omega_eff: Closure<T> = Arc::new(move |t: T| {
        let r = f.value(t);
        let (_, d2) = derivatives_of(&*f, t, h);
        let r2 = r * r;
        T::one() / (r2 * r2) - d2 / r
    });
    let jump = (omega_eff(a) - w_in).abs().max((omega_eff(b) - w_out).abs());
    let smooth = jump <= T::tol(JUNCTION_TOLERANCE, 1e6) * T::one().max(w_in.max(w_out));
    let func =
        Piecewise::new(vec![Segment::new(a, b, Shape::Closure(omega_eff))], a, b, Level::new(w_in), Level::new(w_out))?;
    Ok(EngineeredProfile { profile: FrequencyProfile::new(func)?, junction_jump: jump, smooth })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::arc_fn;

    #[test]
    fn ramp_kinds_hit_endpoints() {
        for kind in [RampKind::Quintic, RampKind::Septic, RampKind::Cosine] {
            let (s0, d0, _) = kind.eval(0.0_f64);
            let (s1, d1, _) = kind.eval(1.0_f64);
            assert_eq!((s0, s1), (0.0, 1.0), "{kind:?}");
            assert!(d0.abs() < 1e-15 && d1.abs() < 1e-15);
        }
        assert_eq!(RampKind::Quintic.eval(1.0_f64).2, 0.0);
        assert!(RampKind::Cosine.eval(0.0_f64).2 > 4.0);
    }

    #[test]
    fn analytic_derivatives_match_differences() {
        let r = Ramp::new(RampKind::Septic, 1.0, 0.7, 0.5, 2.0).with_bump(0.1);
        for &t in &[0.6, 1.1, 1.7, 2.3] {
            let (d1, d2) = r.derivatives(t).unwrap();
            let (n1, n2) = numeric_derivatives(&r as &dyn ReferenceFunction<f64>, t, 1e-3);
            assert!((d1 - n1).abs() < 1e-9);
            assert!((d2 - n2).abs() < 1e-7);
        }
    }

    #[test]
    fn constant_reference_gives_constant_profile() {
        let e = inverse_engineer(Arc::new(ClosureReference::new(arc_fn(|_| 0.5_f64))), (0.0, 1.0)).unwrap();
        assert_eq!(e.profile.omega_in_sq(), 16.0);
        assert!((e.profile.eval(0.5) - 16.0).abs() < 1e-9);
        assert!(e.smooth);
    }

    #[test]
    fn cosine_ramp_is_flagged() {
        let r = Ramp::between_frequencies(RampKind::Cosine, 1.0, 2.0, 0.0, 2.0);
        let e = inverse_engineer(Arc::new(r), (0.0, 2.0)).unwrap();
        assert!(!e.smooth);
        let q = Ramp::between_frequencies(RampKind::Quintic, 1.0, 2.0, 0.0, 2.0);
        assert!(inverse_engineer(Arc::new(q), (0.0, 2.0)).unwrap().smooth);
    }

    #[test]
    fn sharp_ramp_goes_nonpositive() {
        let r = Ramp::new(RampKind::Quintic, 1.0, 3.0, 0.0, 0.5);
        let e = inverse_engineer(Arc::new(r), (0.0, 0.5)).unwrap();
        assert!(e.profile.nonpositive_at().is_some());
    }

    #[test]
    fn sloped_junction_is_an_error() {
        let f = ClosureReference::new(arc_fn(|t: f64| 1.0 + 0.1 * t));
        assert!(inverse_engineer(Arc::new(f), (0.0, 1.0)).is_err());
    }
}
