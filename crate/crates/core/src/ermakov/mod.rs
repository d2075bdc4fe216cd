//! The Ermakov amplitude `ρ̈ + ω²ρ = ρ⁻³`, its asymptotic form on a plateau
//! and the profiles engineered from it.
//!
//! On a plateau of frequency `ω₀` every solution has the form
//! `ρ² = (1/ω₀)[cosh δ − sinh δ sin(2ω₀t + φ)]`; `δ = 0` (constant
//! `ρ² = 1/ω₀`) means the oscillator ends up unexcited.

mod completion;
mod reference;

pub use completion::{
    build_general_completion, build_symmetric_completion, quintic_continuation, reflect_about, CompletionCheck,
    CompletionPlan, Continuation, QuinticContinuation,
};
pub use reference::{inverse_engineer, ClosureReference, EngineeredProfile, Ramp, RampKind, ReferenceFunction};

use crate::error::{Error, Result};
use crate::ode::{integrate, StepPolicy, Trajectory};
use crate::profiles::FrequencyProfile;
use crate::real::{bisect, Real};

/// Integration settings for [`solve_ermakov`].
#[derive(Debug, Clone, Copy)]
pub struct ErmakovOptions<T> {
    pub policy: StepPolicy<T>,
    /// Explicit window; the initial data is imposed at its left end.
    pub span: Option<(T, T)>,
    /// Plateau time added on both sides when `span` is not given, default
    /// `max(1, 4π/ω_min)`.
    pub margin: Option<T>,
    /// Steps that would take ρ below this are rejected.
    pub floor: T,
}

impl<T: Real> Default for ErmakovOptions<T> {
    fn default() -> Self {
        ErmakovOptions { policy: StepPolicy::default(), span: None, margin: None, floor: T::lit(1e-8) }
    }
}

impl<T: Real> ErmakovOptions<T> {
    fn window(&self, profile: &FrequencyProfile<T>) -> (T, T) {
        self.span.unwrap_or_else(|| {
            let w_min = profile.omega_in().min(profile.omega_out());
            let margin = self.margin.unwrap_or_else(|| (T::lit(4.0) * T::PI() / w_min).max(T::one()));
            (profile.t_minus() - margin, profile.t_plus() + margin)
        })
    }
}

/// Amplitude trajectory with dense evaluation between grid points.
#[derive(Debug, Clone)]
pub struct ErmakovSolution<T> {
    pub grid: Vec<T>,
    pub rho: Vec<T>,
    pub rhodot: Vec<T>,
    pub fit: Option<AsymptoticFit<T>>,
    profile: FrequencyProfile<T>,
    traj: Trajectory<T, 2>,
}

pub(crate) fn ermakov_rhs<T: Real>(profile: &FrequencyProfile<T>) -> impl Fn(T, &[T; 2], T) -> [T; 2] + '_ {
    move |t, y, anchor| {
        let w2 = profile.eval_anchored(t, anchor);
        let r = y[0];
        [y[1], -w2 * r + T::one() / (r * r * r)]
    }
}

/// Adiabatic vacuum start: `ρ = ω_in^{-1/2}`, `ρ̇ = 0`.
pub fn adiabatic_start<T: Real>(profile: &FrequencyProfile<T>) -> (T, T) {
    (T::one() / profile.omega_in().sqrt(), T::zero())
}

/// Integrates the Ermakov equation from `(rho0, rhodot0)` at the left end of
/// the window.
pub fn solve_ermakov<T: Real>(
    profile: &FrequencyProfile<T>,
    rho0: T,
    rhodot0: T,
    options: &ErmakovOptions<T>,
) -> Result<ErmakovSolution<T>> {
    if !(rho0 > T::zero()) || !rhodot0.is_finite() {
        return Err(Error::InvalidArgument(format!("initial amplitude must be positive, got {}", rho0.as_f64())));
    }
    let (a, b) = options.window(profile);
    let rhs = ermakov_rhs(profile);
    let floor = options.floor;
    let traj = integrate(
        &rhs,
        (a, b),
        [rho0, rhodot0],
        &profile.boundaries(),
        &options.policy,
        |_, _| Ok(()),
        |y| y[0] > floor,
    )
    .map_err(|e| match e {
        Error::StepUnderflow(t) | Error::NonFinite(t) => Error::RhoFloor(t),
        other => other,
    })?;
    Ok(ErmakovSolution {
        grid: traj.t.clone(),
        rho: traj.y.iter().map(|y| y[0]).collect(),
        rhodot: traj.y.iter().map(|y| y[1]).collect(),
        fit: None,
        profile: profile.clone(),
        traj,
    })
}

/// [`solve_ermakov`] from [`adiabatic_start`].
pub fn solve_ermakov_adiabatic<T: Real>(
    profile: &FrequencyProfile<T>,
    options: &ErmakovOptions<T>,
) -> Result<ErmakovSolution<T>> {
    let (r, v) = adiabatic_start(profile);
    solve_ermakov(profile, r, v, options)
}

impl<T: Real> ErmakovSolution<T> {
    pub fn first_time(&self) -> T {
        self.traj.first_time()
    }

    pub fn last_time(&self) -> T {
        self.traj.last_time()
    }

    pub fn profile(&self) -> &FrequencyProfile<T> {
        &self.profile
    }

    /// `(ρ, ρ̇)` at any time inside the grid.
    pub fn state(&self, t: T) -> (T, T) {
        let rhs = ermakov_rhs(&self.profile);
        let y = self.traj.dense(&rhs, t);
        (y[0], y[1])
    }

    /// `|ρ̈ + ω²ρ − ρ⁻³|` at `t`, with `ρ̈` from a central difference of the
    /// dense `ρ̇` over `±h`.
    pub fn residual(&self, t: T, h: T) -> T {
        let (r, _) = self.state(t);
        let acc = (self.state(t + h).1 - self.state(t - h).1) / (h + h);
        (acc + self.profile.eval(t) * r - T::one() / (r * r * r)).abs()
    }

    /// Attaches the asymptotic fit on the out-plateau.
    pub fn with_fit(mut self) -> Result<Self> {
        let profile = self.profile.clone();
        self.fit = Some(fit_asymptotic(&self, &profile)?);
        Ok(self)
    }
}

/// `(δ, φ)` of the plateau solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticFit<T> {
    pub delta: T,
    pub phi: T,
    pub omega0: T,
    /// `ρ²` was constant: `δ = 0` and `φ` carries no information.
    pub degenerate: bool,
    /// `max ω₀|ρ² − model|` over the plateau samples.
    pub residual: T,
}

impl<T: Real> AsymptoticFit<T> {
    /// The fitted `ρ²(t)`.
    pub fn rho_sq(&self, t: T) -> T {
        let arg = T::lit(2.0) * self.omega0 * t + self.phi;
        (self.delta.cosh() - self.delta.sinh() * arg.sin()) / self.omega0
    }
}

/// Whether an extremum of `ρ` is a maximum or a minimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumKind {
    Max,
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum<T> {
    pub t: T,
    pub kind: ExtremumKind,
    pub rho: T,
}

const DEGENERATE_SPREAD: f64 = 1e-9;
const SAMPLES_PER_PERIOD: usize = 64;

fn sample_times<T: Real>(window: (T, T), omega: T) -> Vec<T> {
    let period = T::PI() / omega;
    let n = ((window.1 - window.0) / period * T::lit(SAMPLES_PER_PERIOD as f64)).ceil().to_usize().unwrap_or(0).max(16);
    crate::real::linspace(window.0, window.1, n + 1)
}

/// Relative spread `ω(max ρ² − min ρ²)` over sample times; `≈ 2 sinh δ`.
fn spread<T: Real>(sol: &ErmakovSolution<T>, times: &[T], omega: T) -> T {
    let (mut lo, mut hi) = (T::infinity(), T::neg_infinity());
    for &t in times {
        let r = sol.state(t).0;
        lo = lo.min(r * r);
        hi = hi.max(r * r);
    }
    omega * (hi - lo)
}

fn plateau_window<T: Real>(sol: &ErmakovSolution<T>, profile: &FrequencyProfile<T>) -> (T, T) {
    (profile.t_plus().max(sol.first_time()), sol.last_time())
}

/// Fits `(δ, φ)` on the out-plateau from the extreme values of `ρ²`:
/// `ω₀ ρ²_max = e^δ`, `ω₀ ρ²_min = e^{-δ}`, and the first maximum fixes φ.
pub fn fit_asymptotic<T: Real>(sol: &ErmakovSolution<T>, profile: &FrequencyProfile<T>) -> Result<AsymptoticFit<T>> {
    let omega = profile.omega_out();
    let window = plateau_window(sol, profile);
    let period = T::PI() / omega;
    if !(window.1 - window.0 >= period + period) {
        return Err(Error::PlateauTooShort(format!(
            "{} on the plateau, need two periods ({})",
            (window.1 - window.0).as_f64(),
            (period + period).as_f64()
        )));
    }
    let times = sample_times(window, omega);
    let tol = T::tol(1e-6, 1e9);
    if spread(sol, &times, omega) < T::tol(DEGENERATE_SPREAD, 1e6) {
        let fit =
            AsymptoticFit { delta: T::zero(), phi: T::zero(), omega0: omega, degenerate: true, residual: T::zero() };
        let residual = fit_residual(sol, &fit, &times);
        if residual > tol {
            return Err(Error::FitResidual { residual: residual.as_f64(), tol: tol.as_f64() });
        }
        return Ok(AsymptoticFit { residual, ..fit });
    }
    let extrema = scan_extrema(sol, window, omega);
    let max = extrema.iter().filter(|e| e.kind == ExtremumKind::Max).max_by(|a, b| a.rho.partial_cmp(&b.rho).unwrap());
    let min = extrema.iter().filter(|e| e.kind == ExtremumKind::Min).min_by(|a, b| a.rho.partial_cmp(&b.rho).unwrap());
    let (max, min) = match (max, min) {
        (Some(a), Some(b)) => (*a, *b),
        _ => return Err(Error::PlateauTooShort("no complete oscillation found on the plateau".into())),
    };
    let delta = (max.rho * max.rho / (min.rho * min.rho)).ln() / T::lit(2.0);
    let two_pi = T::PI() + T::PI();
    let phi = (T::lit(1.5) * T::PI() - T::lit(2.0) * omega * max.t) % two_pi;
    let phi = if phi < T::zero() { phi + two_pi } else { phi };
    let mut fit = AsymptoticFit { delta, phi, omega0: omega, degenerate: false, residual: T::zero() };
    fit.residual = fit_residual(sol, &fit, &times);
    let tol = tol * delta.cosh();
    if fit.residual > tol {
        return Err(Error::FitResidual { residual: fit.residual.as_f64(), tol: tol.as_f64() });
    }
    Ok(fit)
}

fn fit_residual<T: Real>(sol: &ErmakovSolution<T>, fit: &AsymptoticFit<T>, times: &[T]) -> T {
    times.iter().fold(T::zero(), |acc, &t| {
        let r = sol.state(t).0;
        acc.max(fit.omega0 * (r * r - fit.rho_sq(t)).abs())
    })
}

/// Roots of `ρ̇` inside `window`, refined by bisection on the dense output.
fn scan_extrema<T: Real>(sol: &ErmakovSolution<T>, window: (T, T), omega: T) -> Vec<Extremum<T>> {
    let times = sample_times(window, omega);
    let mut out = Vec::new();
    let rd = |t: T| sol.state(t).1;
    let mut prev = (times[0], rd(times[0]));
    for &t in &times[1..] {
        let cur = (t, rd(t));
        if prev.1 == T::zero() || (prev.1 > T::zero()) != (cur.1 > T::zero()) {
            let root = if prev.1 == T::zero() { prev.0 } else { bisect(rd, prev.0, cur.0, T::tol(1e-11, 64.0)) };
            // ρ̇ going from + to − is a maximum.
            let kind = if prev.1 > T::zero() || (prev.1 == T::zero() && cur.1 < T::zero()) {
                ExtremumKind::Max
            } else {
                ExtremumKind::Min
            };
            if out.last().is_none_or(|e: &Extremum<T>| root > e.t) {
                out.push(Extremum { t: root, kind, rho: sol.state(root).0 });
            }
        }
        prev = cur;
    }
    out
}

/// Extrema of `ρ` in `window`, located to `1e-10` in time.
pub fn find_extrema<T: Real>(sol: &ErmakovSolution<T>, window: (T, T)) -> Result<Vec<Extremum<T>>> {
    let lo = window.0.max(sol.first_time());
    let hi = window.1.min(sol.last_time());
    if !(hi > lo) {
        return Err(Error::InvalidArgument("extremum window lies outside the solution".into()));
    }
    let omega = sol.profile.eval(lo).max(sol.profile.eval(hi)).max(T::epsilon()).sqrt();
    let omega = omega.max(sol.profile.omega_out());
    let times = sample_times((lo, hi), omega);
    if spread(sol, &times, omega) < T::tol(DEGENERATE_SPREAD, 1e6) {
        return Err(Error::AlreadyUnexcited);
    }
    Ok(scan_extrema(sol, (lo, hi), omega))
}
