//! Two-stage protocols `ω₋ → (stage I) → ω₊ → (stage II) → ω₊₊` whose
//! second stage removes the excitation created by the first.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::profiles::json::{CompletionMeta, ProfileSpec};
use crate::profiles::{Closure, FrequencyProfile, Level, Piecewise, Segment, Shape};
use crate::real::{linspace, Real};

use super::reference::{derivatives_of, ReferenceFunction};
use super::{find_extrema, fit_asymptotic, solve_ermakov_adiabatic, ErmakovOptions, ErmakovSolution};

/// Below this `δ` a stage-I protocol is treated as already unexciting.
pub const DEGENERATE_DELTA: f64 = 1e-4;

/// Post-completion diagnostics from a fresh Ermakov run on the assembled
/// profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompletionCheck<T> {
    /// Fitted `δ` on the final plateau.
    pub delta: T,
    /// `max |ω₊₊ ρ² − 1|` on the final plateau.
    pub rho_sq_deviation: T,
}

/// A completed protocol and where its second stage sits.
#[derive(Debug, Clone)]
pub struct CompletionPlan<T> {
    /// Start of stage II.
    pub t1: T,
    /// Duration of stage II.
    pub tau2: T,
    /// Stage II on its own, from `ω₊²` to `ω₊₊²`; `None` for a degenerate plan.
    pub omega_ii: Option<FrequencyProfile<T>>,
    /// Stage II is the time reversal of stage I about `tn`.
    pub symmetric: bool,
    pub tn: Option<T>,
    /// Stage I already left the oscillator unexcited; nothing was appended.
    pub degenerate: bool,
    /// The full five-piece profile.
    pub profile: FrequencyProfile<T>,
    pub check: CompletionCheck<T>,
}

impl<T: Real> CompletionPlan<T> {
    /// JSON form: the assembled profile plus a `completion` block.
    pub fn to_spec(&self) -> Result<ProfileSpec> {
        let mut spec = ProfileSpec::from_profile(&self.profile)?;
        spec.completion = Some(CompletionMeta {
            t1: self.t1.as_f64(),
            tau2: self.tau2.as_f64(),
            tn: self.tn.map(|t| t.as_f64()),
            symmetric: self.symmetric,
        });
        Ok(spec)
    }
}

/// `ω²(t)` for `t < c` and `ω²(2c − t)` afterwards.
pub fn reflect_about<T: Real>(profile: &FrequencyProfile<T>, c: T) -> Result<FrequencyProfile<T>> {
    let p = profile.piecewise();
    let mirrored = p.reflected_about(c);
    let lo = p.lower().min(c);
    let hi = c + c - lo;
    let mut segments = p.pieces(lo, c);
    segments.extend(mirrored.pieces(c, hi));
    let (lower, upper) = if segments.is_empty() { (c, c) } else { (lo, hi) };
    FrequencyProfile::new(Piecewise::new(segments, lower, upper, p.left_level(), mirrored.right_level())?)
}

fn check_completion<T: Real>(profile: &FrequencyProfile<T>, options: &ErmakovOptions<T>) -> Result<CompletionCheck<T>> {
    let opts = ErmakovOptions { span: None, ..*options };
    let sol = solve_ermakov_adiabatic(profile, &opts)?;
    let fit = fit_asymptotic(&sol, profile)?;
    let w = profile.omega_out();
    let dev = linspace(profile.t_plus(), sol.last_time(), 257).into_iter().fold(T::zero(), |acc, t| {
        let r = sol.state(t).0;
        acc.max((w * r * r - T::one()).abs())
    });
    Ok(CompletionCheck { delta: fit.delta, rho_sq_deviation: dev })
}

fn degenerate_plan<T: Real>(
    profile: &FrequencyProfile<T>,
    check: CompletionCheck<T>,
    symmetric: bool,
) -> CompletionPlan<T> {
    CompletionPlan {
        t1: profile.t_plus(),
        tau2: T::zero(),
        omega_ii: None,
        symmetric,
        tn: None,
        degenerate: true,
        profile: profile.clone(),
        check,
    }
}

/// Stage-I Ermakov run over the profile plus the usual plateau margin, so
/// the number of usable extrema grows with `options.margin`.
fn stage_one<T: Real>(profile: &FrequencyProfile<T>, options: &ErmakovOptions<T>) -> Result<ErmakovSolution<T>> {
    solve_ermakov_adiabatic(profile, &ErmakovOptions { span: None, ..*options })
}

/// Reflects stage I about the `extremum_index`-th (0-based) extremum of `ρ`
/// on the `ω₊` plateau.
///
/// At an extremum `ρ̇ = 0`, so the mirrored second half retraces the
/// amplitude back to `ω₋^{-1/2}` with zero slope.
pub fn build_symmetric_completion<T: Real>(
    profile_i: &FrequencyProfile<T>,
    extremum_index: usize,
    options: &ErmakovOptions<T>,
) -> Result<CompletionPlan<T>> {
    let sol = stage_one(profile_i, options)?;
    let fit = fit_asymptotic(&sol, profile_i)?;
    if fit.delta < T::lit(DEGENERATE_DELTA) {
        let check = check_completion(profile_i, options)?;
        return Ok(degenerate_plan(profile_i, check, true));
    }
    let extrema = find_extrema(&sol, (profile_i.t_plus(), sol.last_time()))?;
    let tn =
        extrema.get(extremum_index).ok_or(Error::ExtremumIndex { index: extremum_index, available: extrema.len() })?.t;
    let profile = reflect_about(profile_i, tn)?;
    let check = check_completion(&profile, options)?;
    Ok(CompletionPlan {
        t1: tn + tn - profile_i.t_plus(),
        tau2: profile_i.t_plus() - profile_i.t_minus(),
        omega_ii: Some(profile_i.reflected_about(tn)),
        symmetric: true,
        tn: Some(tn),
        degenerate: false,
        profile,
        check,
    })
}

/// A prescribed amplitude for stage II on `[t1, t1 + tau2]`.
#[derive(Clone)]
pub struct Continuation<T> {
    pub rho: Arc<dyn ReferenceFunction<T>>,
    pub t1: T,
    pub tau2: T,
}

/// Continuation tolerance on `ρ` and `ρ̇` at `t1`.
pub const CONTINUITY_TOLERANCE: f64 = 1e-8;

/// Stage II engineered from a prescribed continuation of `ρ`.
///
/// The continuation must take over `ρ` and `ρ̇` from stage I at `t1` (which
/// must lie on the `ω₊` plateau) and settle at `ω₊₊^{-1/2}` with zero slope
/// at `t1 + tau2`. Stage II is `ω² = ρ⁻⁴ − ρ̈/ρ` over that interval.
pub fn build_general_completion<T: Real>(
    profile_i: &FrequencyProfile<T>,
    continuation: &Continuation<T>,
    omega_pp: T,
    options: &ErmakovOptions<T>,
) -> Result<CompletionPlan<T>> {
    let Continuation { rho, t1, tau2 } = continuation.clone();
    if !(omega_pp > T::zero()) {
        return Err(Error::InvalidArgument("target frequency must be positive".into()));
    }
    if !(tau2 > T::zero()) {
        return Err(Error::InvalidArgument("stage II must have positive duration".into()));
    }
    if t1 < profile_i.t_plus() {
        return Err(Error::InvalidArgument(format!(
            "stage II must start on the plateau after stage I (t1 = {} < {})",
            t1.as_f64(),
            profile_i.t_plus().as_f64()
        )));
    }
    let w_min = profile_i.omega_in().min(profile_i.omega_out());
    let margin = options.margin.unwrap_or_else(|| (T::lit(4.0) * T::PI() / w_min).max(T::one()));
    let opts = ErmakovOptions { span: Some((profile_i.t_minus() - margin, t1 + T::one())), ..*options };
    let sol = solve_ermakov_adiabatic(profile_i, &opts)?;
    let (r1, v1) = sol.state(t1);
    let h = T::lit(1e-5) * tau2;
    let (c1, _) = derivatives_of(&*rho, t1, h);
    let tol = T::tol(CONTINUITY_TOLERANCE, 1e6);
    let (dr, dv) = ((rho.value(t1) - r1).abs(), (c1 - v1).abs());
    if dr > tol || dv > tol {
        return Err(Error::ContinuityMismatch(format!("|Δρ| = {:e}, |Δρ̇| = {:e}", dr.as_f64(), dv.as_f64())));
    }
    let t2 = t1 + tau2;
    let target = T::one() / omega_pp.sqrt();
    let (d_end, _) = derivatives_of(&*rho, t2, h);
    if (rho.value(t2) - target).abs() > tol || d_end.abs() > tol {
        return Err(Error::InvalidArgument(format!(
            "continuation must settle at ω₊₊^(-1/2) = {} with zero slope at t1 + tau2 (got {}, slope {})",
            target.as_f64(),
            rho.value(t2).as_f64(),
            d_end.as_f64()
        )));
    }
    let f = rho.clone();
    let omega_eff: Closure<T> = Arc::new(move |t: T| {
        let r = f.value(t);
        let (_, d2) = derivatives_of(&*f, t, h);
        let r2 = r * r;
        T::one() / (r2 * r2) - d2 / r
    });
    let w_pp_sq = omega_pp * omega_pp;
    let stage_ii = Segment::new(t1, t2, Shape::Closure(omega_eff));
    let p = profile_i.piecewise();
    let mut segments = p.pieces(p.lower().min(t1), t1);
    segments.push(stage_ii.clone());
    let lower = segments[0].t0;
    let profile = FrequencyProfile::new(Piecewise::new(segments, lower, t2, p.left_level(), Level::new(w_pp_sq))?)?;
    let omega_ii = FrequencyProfile::new(Piecewise::new(
        vec![stage_ii],
        t1,
        t2,
        Level::new(profile_i.omega_out_sq()),
        Level::new(w_pp_sq),
    )?)?;
    let check = check_completion(&profile, options)?;
    Ok(CompletionPlan {
        t1,
        tau2,
        omega_ii: Some(omega_ii),
        symmetric: false,
        tn: None,
        degenerate: false,
        profile,
        check,
    })
}

/// Quintic polynomial in time matching `ρ`, `ρ̇`, `ρ̈` of a stage-I solution
/// at `t1` and reaching `ω₊₊^{-1/2}` with vanishing first and second
/// derivatives at `t1 + tau2`. Matching `ρ̈` keeps `ω²` continuous at `t1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuinticContinuation<T> {
    t1: T,
    tau: T,
    c: [T; 6],
}

impl<T: Real> QuinticContinuation<T> {
    pub fn new(t1: T, tau: T, start: (T, T, T), end: T) -> Self {
        let (r, v, a) = start;
        let c0 = r;
        let c1 = v * tau;
        let c2 = a * tau * tau / T::lit(2.0);
        let d = end - (c0 + c1 + c2);
        let e1 = -(c1 + c2 + c2);
        let e2 = -(c2 + c2);
        let l = T::lit;
        let half = l(0.5);
        let c3 = l(10.0) * d - l(4.0) * e1 + half * e2;
        let c4 = l(-15.0) * d + l(7.0) * e1 - e2;
        let c5 = l(6.0) * d - l(3.0) * e1 + half * e2;
        QuinticContinuation { t1, tau, c: [c0, c1, c2, c3, c4, c5] }
    }

    fn eval(&self, t: T) -> (T, T, T) {
        let s = ((t - self.t1) / self.tau).min(T::one());
        let c = &self.c;
        let l = T::lit;
        let p = c[0] + s * (c[1] + s * (c[2] + s * (c[3] + s * (c[4] + s * c[5]))));
        if s >= T::one() {
            return (p, T::zero(), T::zero());
        }
        let dp = c[1] + s * (l(2.0) * c[2] + s * (l(3.0) * c[3] + s * (l(4.0) * c[4] + s * l(5.0) * c[5])));
        let ddp = l(2.0) * c[2] + s * (l(6.0) * c[3] + s * (l(12.0) * c[4] + s * l(20.0) * c[5]));
        (p, dp / self.tau, ddp / (self.tau * self.tau))
    }
}

impl<T: Real> ReferenceFunction<T> for QuinticContinuation<T> {
    fn value(&self, t: T) -> T {
        self.eval(t).0
    }

    fn derivatives(&self, t: T) -> Option<(T, T)> {
        let (_, d1, d2) = self.eval(t);
        Some((d1, d2))
    }
}

/// Quintic continuation of the adiabatically started stage-I amplitude from
/// `t1` to `t1 + tau2`, ending at `ω₊₊^{-1/2}`.
pub fn quintic_continuation<T: Real>(
    profile_i: &FrequencyProfile<T>,
    t1: T,
    tau2: T,
    omega_pp: T,
    options: &ErmakovOptions<T>,
) -> Result<Continuation<T>> {
    let w_min = profile_i.omega_in().min(profile_i.omega_out());
    let margin = options.margin.unwrap_or_else(|| (T::lit(4.0) * T::PI() / w_min).max(T::one()));
    let end = t1.max(profile_i.t_plus()) + T::one();
    let opts = ErmakovOptions { span: Some((profile_i.t_minus() - margin, end)), ..*options };
    let sol = solve_ermakov_adiabatic(profile_i, &opts)?;
    let (r, v) = sol.state(t1);
    let a = -profile_i.eval(t1) * r + T::one() / (r * r * r);
    let q = QuinticContinuation::new(t1, tau2, (r, v, a), T::one() / omega_pp.sqrt());
    Ok(Continuation { rho: Arc::new(q), t1, tau2 })
}
