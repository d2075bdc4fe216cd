//! Mode functions `q̈ + ω²(t) q = 0` and their Bogoliubov coefficients.
//!
//! The mode starts in the "in" form `q = e^{-iω_in t}/√(2ω_in)` at the left
//! edge of the integration window and is matched at the right edge to
//! `q = α u + β u*` with `u = e^{-iω_out t}/√(2ω_out)`. Both `α` and `β`
//! are phased relative to absolute time, so for a sudden jump at `t = 0`
//! they come out real.
//!
//! The normalization is tracked through `W = q q̇* − q̇ q*`, which equals `i`
//! for the in-mode and is conserved by the mode equation.

use std::io::{self, Write};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::ode::{integrate, StepPolicy, Trajectory};
use crate::profiles::FrequencyProfile;
use crate::real::Real;

/// Integration settings for [`integrate_mode`].
#[derive(Debug, Clone, Copy)]
pub struct ModeOptions<T> {
    pub policy: StepPolicy<T>,
    /// Explicit integration window. It must contain `[t_minus, t_plus]`.
    pub span: Option<(T, T)>,
    /// Plateau time added on both sides when `span` is not given; defaults
    /// to `max(1, 4π/ω_min)`, two periods of the slower plateau.
    pub margin: Option<T>,
    /// Bound on `|W − i|` over the grid.
    pub wronskian_tol: T,
    /// Bound on `||α|² − |β|² − 1|` at extraction.
    pub norm_tol: T,
}

impl<T: Real> Default for ModeOptions<T> {
    fn default() -> Self {
        ModeOptions {
            policy: StepPolicy::default(),
            span: None,
            margin: None,
            wronskian_tol: T::tol(1e-9, 1e4),
            norm_tol: T::tol(1e-8, 1e5),
        }
    }
}

impl<T: Real> ModeOptions<T> {
    pub fn with_tolerance(tol: T) -> Self {
        ModeOptions { policy: StepPolicy::with_tolerance(tol), ..Default::default() }
    }

    fn window(&self, profile: &FrequencyProfile<T>) -> Result<(T, T)> {
        match self.span {
            Some((a, b)) => {
                if a > profile.t_minus() || b < profile.t_plus() || !(b > a) {
                    return Err(Error::InvalidArgument(format!(
                        "integration window [{}, {}] must contain the profile window [{}, {}]",
                        a.as_f64(),
                        b.as_f64(),
                        profile.t_minus().as_f64(),
                        profile.t_plus().as_f64()
                    )));
                }
                Ok((a, b))
            }
            None => {
                let w_min = profile.omega_in().min(profile.omega_out());
                let margin = self.margin.unwrap_or_else(|| (T::lit(4.0) * T::PI() / w_min).max(T::one()));
                Ok((profile.t_minus() - margin, profile.t_plus() + margin))
            }
        }
    }
}

/// Trajectory of the in-mode on the accepted integration grid.
#[derive(Debug, Clone)]
pub struct ModeSolution<T> {
    pub grid: Vec<T>,
    pub q: Vec<Complex<T>>,
    pub qdot: Vec<Complex<T>>,
    /// `max |W − i|` over the grid.
    pub wronskian_drift: T,
}

/// `q q̇* − q̇ q*`.
pub fn wronskian<T: Real>(q: Complex<T>, qdot: Complex<T>) -> Complex<T> {
    q * qdot.conj() - qdot * q.conj()
}

fn wronskian_residual<T: Real>(q: Complex<T>, qdot: Complex<T>) -> T {
    (wronskian(q, qdot) - Complex::i()).norm()
}

/// Plane wave `e^{-iωt}/√(2ω)` and its derivative.
fn plane_wave<T: Real>(omega: T, t: T) -> (Complex<T>, Complex<T>) {
    let u = Complex::from_polar(T::one() / (T::lit(2.0) * omega).sqrt(), -omega * t);
    (u, Complex::new(T::zero(), -omega) * u)
}

pub(crate) fn mode_rhs<T: Real>(profile: &FrequencyProfile<T>) -> impl Fn(T, &[T; 4], T) -> [T; 4] + '_ {
    move |t, y, anchor| {
        let w2 = profile.eval_anchored(t, anchor);
        [y[2], y[3], -w2 * y[0], -w2 * y[1]]
    }
}

/// Integrates the in-mode across the profile.
pub fn integrate_mode<T: Real>(profile: &FrequencyProfile<T>, options: &ModeOptions<T>) -> Result<ModeSolution<T>> {
    let (a, b) = options.window(profile)?;
    let (q0, p0) = plane_wave(profile.omega_in(), a);
    let rhs = mode_rhs(profile);
    let traj: Trajectory<T, 4> = integrate(
        &rhs,
        (a, b),
        [q0.re, q0.im, p0.re, p0.im],
        &profile.boundaries(),
        &options.policy,
        |_, _| Ok(()),
        |_| true,
    )?;
    let mut sol = ModeSolution {
        grid: traj.t,
        q: Vec::with_capacity(traj.y.len()),
        qdot: Vec::with_capacity(traj.y.len()),
        wronskian_drift: T::zero(),
    };
    for y in &traj.y {
        let q = Complex::new(y[0], y[1]);
        let p = Complex::new(y[2], y[3]);
        sol.wronskian_drift = sol.wronskian_drift.max(wronskian_residual(q, p));
        sol.q.push(q);
        sol.qdot.push(p);
    }
    if !(sol.wronskian_drift <= options.wronskian_tol) {
        return Err(Error::WronskianDrift { drift: sol.wronskian_drift.as_f64(), tol: options.wronskian_tol.as_f64() });
    }
    Ok(sol)
}

impl<T: Real> ModeSolution<T> {
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// CSV with columns `t, re_q, im_q, re_qdot, im_qdot, wronskian_residual`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t,re_q,im_q,re_qdot,im_qdot,wronskian_residual")?;
        for i in 0..self.grid.len() {
            let (q, p) = (self.q[i], self.qdot[i]);
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                self.grid[i].as_f64(),
                q.re.as_f64(),
                q.im.as_f64(),
                p.re.as_f64(),
                p.im.as_f64(),
                wronskian_residual(q, p).as_f64()
            )?;
        }
        Ok(())
    }
}

/// Bogoliubov coefficients and the quantities derived from them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BogoliubovPair<T> {
    pub alpha: Complex<T>,
    pub beta: Complex<T>,
    /// `|β|²`, the mean number of created quanta.
    pub occupation: T,
    /// Vacuum persistence `|⟨0_in|0_out⟩|² = 1/|α|`.
    pub persistence: T,
    /// `asinh|β|`.
    pub squeeze_r: T,
}

impl<T: Real> BogoliubovPair<T> {
    pub fn from_coefficients(alpha: Complex<T>, beta: Complex<T>) -> Self {
        BogoliubovPair {
            alpha,
            beta,
            occupation: beta.norm_sqr(),
            persistence: T::one() / alpha.norm(),
            squeeze_r: beta.norm().asinh(),
        }
    }

    /// `|α|² − |β|² − 1`.
    pub fn normalization_error(&self) -> T {
        self.alpha.norm_sqr() - self.beta.norm_sqr() - T::one()
    }
}

/// Matches the mode to out-plane waves at the last grid point.
pub fn extract_bogoliubov<T: Real>(sol: &ModeSolution<T>, profile: &FrequencyProfile<T>) -> Result<BogoliubovPair<T>> {
    extract_bogoliubov_with_tol(sol, profile, T::tol(1e-8, 1e5))
}

pub fn extract_bogoliubov_with_tol<T: Real>(
    sol: &ModeSolution<T>,
    profile: &FrequencyProfile<T>,
    norm_tol: T,
) -> Result<BogoliubovPair<T>> {
    let last = sol.grid.len().checked_sub(1).ok_or_else(|| Error::InvalidArgument("empty mode solution".into()))?;
    let t_end = sol.grid[last];
    if t_end < profile.t_plus() {
        return Err(Error::InvalidArgument(format!(
            "mode solution ends at {} before the out-plateau starts at {}",
            t_end.as_f64(),
            profile.t_plus().as_f64()
        )));
    }
    let w = profile.omega_out();
    let (u, _) = plane_wave(w, t_end);
    let (q, p) = (sol.q[last], sol.qdot[last]);
    let iw = Complex::new(T::zero(), w);
    let two_iw = iw + iw;
    let alpha = (iw * q - p) / (two_iw * u);
    let beta = (iw * q + p) / (two_iw * u.conj());
    let pair = BogoliubovPair::from_coefficients(alpha, beta);
    let err = pair.normalization_error().abs();
    if !(err <= norm_tol) {
        return Err(Error::Normalization(err.as_f64()));
    }
    Ok(pair)
}

/// Integrates and extracts in one go.
pub fn bogoliubov<T: Real>(profile: &FrequencyProfile<T>, options: &ModeOptions<T>) -> Result<BogoliubovPair<T>> {
    let sol = integrate_mode(profile, options)?;
    extract_bogoliubov_with_tol(&sol, profile, options.norm_tol)
}

/// Closed-form coefficients for an instantaneous jump `ω0 → ω1` at `t = 0`,
/// from continuity of `q` and `q̇`:
/// `α = (ω1+ω0)/(2√(ω0ω1))`, `β = (ω1−ω0)/(2√(ω0ω1))`.
pub fn sudden_jump_oracle<T: Real>(omega0: T, omega1: T) -> Result<BogoliubovPair<T>> {
    if !(omega0 > T::zero() && omega1 > T::zero()) {
        return Err(Error::InvalidArgument("sudden-jump frequencies must be positive".into()));
    }
    let d = T::lit(2.0) * (omega0 * omega1).sqrt();
    Ok(BogoliubovPair::from_coefficients(
        Complex::new((omega1 + omega0) / d, T::zero()),
        Complex::new((omega1 - omega0) / d, T::zero()),
    ))
}
