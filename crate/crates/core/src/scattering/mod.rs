//! Stationary scattering `−ψ'' + V(x)ψ = Eψ` by transfer matrices.
//!
//! The potential is replaced by piecewise-constant slabs (value at the slab
//! midpoint), each propagated exactly. Slabs never straddle a segment
//! boundary, so step potentials are represented without error. The slab
//! width is halved until `R` and `T` settle. Nothing here touches the ODE
//! integrator, which makes this path an independent check on the mode
//! solver.

mod duality;
mod well;

pub use duality::{duality_check, DualityReport};
pub use well::{symmetric_well_width, zeta_of_gamma, zeta_sweep, SymmetricWellSpec};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::profiles::PotentialProfile;
use crate::real::{golden_max, linspace, Real};

/// Slab discretization and refinement control.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlabPolicy<T> {
    /// Slab width of the first pass.
    pub initial_width: T,
    /// Minimum number of slabs on any non-constant segment.
    pub min_slabs: usize,
    /// Refinement stops once `R` and `T` change by less than this.
    pub tol: T,
    pub max_refinements: usize,
}

impl<T: Real> Default for SlabPolicy<T> {
    fn default() -> Self {
        SlabPolicy { initial_width: T::lit(0.02), min_slabs: 8, tol: T::tol(1e-9, 1e6), max_refinements: 14 }
    }
}

impl<T: Real> SlabPolicy<T> {
    /// Same policy with the initial slab width divided by `factor`.
    pub fn refined(self, factor: T) -> Self {
        SlabPolicy { initial_width: self.initial_width / factor, ..self }
    }
}

/// Amplitudes and probabilities at one energy.
///
/// For a wave `e^{ik x} + r e^{-ik x}` incident from the left and `t e^{ik' x}`
/// transmitted, `R = |r|²` and `T = |t|² k'/k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringResult<T> {
    pub r_amp: Complex<T>,
    pub t_amp: Complex<T>,
    pub reflection: T,
    pub transmission: T,
    pub energy: T,
    /// Wavenumber on the incident (left) side.
    pub k: T,
    /// Wavenumber on the transmitted (right) side.
    pub k_out: T,
    /// Number of slabs in the accepted discretization.
    pub slabs: usize,
}

impl<T: Real> ScatteringResult<T> {
    /// `R/T`, the scattering counterpart of `|β|²`.
    pub fn r_over_t(&self) -> T {
        self.reflection / self.transmission
    }
}

/// `cos(qw)` and `sin(qw)/q` for `q² = q2` (either sign), with a series
/// near `q² w² = 0`.
fn slab_cs<T: Real>(q2: T, w: T) -> (T, T) {
    let x = q2 * w * w;
    if x.abs() < T::lit(1e-3) {
        let l = T::lit;
        let c = T::one() - x / l(2.0) * (T::one() - x / l(12.0) * (T::one() - x / l(30.0) * (T::one() - x / l(56.0))));
        let s = w
            * (T::one() - x / l(6.0) * (T::one() - x / l(20.0) * (T::one() - x / l(42.0) * (T::one() - x / l(72.0)))));
        return (c, s);
    }
    if q2 > T::zero() {
        let q = q2.sqrt();
        let (sn, cs) = (q * w).sin_cos();
        (cs, sn / q)
    } else {
        let kappa = (-q2).sqrt();
        ((kappa * w).cosh(), (kappa * w).sinh() / kappa)
    }
}

/// Visits the slabs of refinement `level` from right to left as
/// `(width, value)`. A non-constant segment gets `n₀·2^level` slabs, with
/// `n₀ = max(⌈len/width₀⌉, min_slabs)`; a constant segment gets one.
fn visit_slabs_rev<T: Real>(
    potential: &PotentialProfile<T>,
    policy: &SlabPolicy<T>,
    level: u32,
    mut f: impl FnMut(T, T),
) -> usize {
    let p = potential.piecewise();
    let mut count = 0;
    for seg in p.segments().iter().rev() {
        let len = seg.t1 - seg.t0;
        if seg.shape.is_constant() {
            f(len, seg.eval(seg.t0));
            count += 1;
            continue;
        }
        let n0 = (len / policy.initial_width).ceil().to_usize().unwrap_or(1).max(policy.min_slabs).max(1);
        let n = n0 << level;
        let h = len / T::lit(n as f64);
        for i in (0..n).rev() {
            let mid = seg.t0 + h * (T::lit(i as f64) + T::lit(0.5));
            f(h, p.eval_anchored(mid, mid));
        }
        count += n;
    }
    count
}

/// One pass; returns the amplitudes `(r, t)` and the slab count.
fn solve_level<T: Real>(
    potential: &PotentialProfile<T>,
    energy: T,
    policy: &SlabPolicy<T>,
    level: u32,
) -> (Complex<T>, Complex<T>, usize) {
    let k = (energy - potential.v_left()).sqrt();
    let k_out = (energy - potential.v_right()).sqrt();
    let x_hi = potential.x_plus();
    let x_lo = potential.x_minus();
    // Start from the transmitted wave e^{ik' x} at the right edge and carry
    // (ψ, ψ') leftwards, renormalizing as we go.
    let mut psi = Complex::from_polar(T::one(), k_out * x_hi);
    let mut dpsi = Complex::new(T::zero(), k_out) * psi;
    let mut log_scale = T::zero();
    let k_ref = k.max(k_out).max(T::one());
    let count = visit_slabs_rev(potential, policy, level, |w, v| {
        let q2 = energy - v;
        let (c, s) = slab_cs(q2, w);
        let next_psi = psi * c - dpsi * s;
        let next_dpsi = psi * (q2 * s) + dpsi * c;
        psi = next_psi;
        dpsi = next_dpsi;
        let norm = psi.norm().max(dpsi.norm() / k_ref);
        if norm > T::lit(1e8) || norm < T::lit(1e-8) {
            psi /= norm;
            dpsi /= norm;
            log_scale += norm.ln();
        }
    });
    let ik = Complex::new(T::zero(), k);
    let half = T::lit(0.5);
    let a_amp = (psi + dpsi / ik) * half * Complex::from_polar(T::one(), -k * x_lo);
    let b_amp = (psi - dpsi / ik) * half * Complex::from_polar(T::one(), k * x_lo);
    (b_amp / a_amp, a_amp.inv().scale((-log_scale).exp()), count)
}

/// `R`, `T` and the amplitudes at energy `E`, refined until both
/// probabilities change by less than `policy.tol` between halvings.
///
/// Midpoint slabs are a symmetric second-order scheme, so the error is even
/// in the slab width; the returned amplitudes are the Richardson combination
/// `(4a_{w/2} − a_w)/3` of the last two passes.
pub fn transfer_matrix_rt<T: Real>(
    potential: &PotentialProfile<T>,
    energy: T,
    policy: &SlabPolicy<T>,
) -> Result<ScatteringResult<T>> {
    let asymptote = potential.v_left().max(potential.v_right());
    if !(energy > asymptote) {
        return Err(Error::BelowAsymptote { energy: energy.as_f64(), asymptote: asymptote.as_f64() });
    }
    let k = (energy - potential.v_left()).sqrt();
    let k_out = (energy - potential.v_right()).sqrt();
    let probs = |r: Complex<T>, t: Complex<T>| (r.norm_sqr(), t.norm_sqr() * k_out / k);
    let (mut r_prev, mut t_prev, mut n_prev) = solve_level(potential, energy, policy, 0);
    for level in 1..=policy.max_refinements as u32 {
        let (r_cur, t_cur, n_cur) = solve_level(potential, energy, policy, level);
        let (rp, tp) = probs(r_prev, t_prev);
        let (rc, tc) = probs(r_cur, t_cur);
        if n_cur == n_prev || ((rc - rp).abs() < policy.tol && (tc - tp).abs() < policy.tol) {
            let third = T::one() / T::lit(3.0);
            let r_amp = r_cur + (r_cur - r_prev).scale(third);
            let t_amp = t_cur + (t_cur - t_prev).scale(third);
            let (reflection, transmission) = probs(r_amp, t_amp);
            if !(reflection.is_finite() && transmission.is_finite()) {
                return Err(Error::NonFinite(energy.as_f64()));
            }
            return Ok(ScatteringResult { r_amp, t_amp, reflection, transmission, energy, k, k_out, slabs: n_cur });
        }
        (r_prev, t_prev, n_prev) = (r_cur, t_cur, n_cur);
    }
    Err(Error::NonConvergent(format!(
        "R, T still changing after {} slab refinements at E = {}",
        policy.max_refinements,
        energy.as_f64()
    )))
}

/// Threshold for a transmission resonance.
pub const RESONANCE_TOLERANCE: f64 = 1e-6;

/// Outcome of [`resonance_scan`].
#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceScan<T> {
    /// Refined resonance energies, ascending.
    pub energies: Vec<T>,
    /// `T ≥ 1 − 10⁻⁶` at every scan energy: the potential passes all waves
    /// (reflectionless) and individual resonances are meaningless.
    pub all_pass: bool,
    /// `(E, T)` on the scan grid.
    pub samples: Vec<(T, T)>,
}

/// Local maxima of `T(E)` on a `count`-point grid over `range`, refined by
/// golden-section search and kept when `T ≥ 1 − 10⁻⁶`.
pub fn resonance_scan<T: Real>(
    potential: &PotentialProfile<T>,
    range: (T, T),
    count: usize,
    policy: &SlabPolicy<T>,
) -> Result<ResonanceScan<T>> {
    let (lo, hi) = range;
    if !(hi > lo) || count < 3 {
        return Err(Error::InvalidArgument("scan needs an increasing range and at least 3 points".into()));
    }
    let grid = linspace(lo, hi, count);
    let mut samples = Vec::with_capacity(count);
    for &e in &grid {
        samples.push((e, transfer_matrix_rt(potential, e, policy)?.transmission));
    }
    let pass = T::one() - T::lit(RESONANCE_TOLERANCE);
    if samples.iter().all(|&(_, t)| t >= pass) {
        return Ok(ResonanceScan { energies: Vec::new(), all_pass: true, samples });
    }
    let mut energies: Vec<T> = Vec::new();
    let n = samples.len();
    for i in 0..n {
        let t = samples[i].1;
        let left = if i > 0 { samples[i - 1].1 } else { T::neg_infinity() };
        let right = if i + 1 < n { samples[i + 1].1 } else { T::neg_infinity() };
        if !(t >= left && t >= right) {
            continue;
        }
        let a = samples[i.saturating_sub(1)].0;
        let b = samples[(i + 1).min(n - 1)].0;
        let mut failure = None;
        let (e_best, t_best) = golden_max(
            |e| match transfer_matrix_rt(potential, e, policy) {
                Ok(r) => r.transmission,
                Err(err) => {
                    failure.get_or_insert(err);
                    T::neg_infinity()
                }
            },
            a,
            b,
            T::tol(1e-10, 1e6) * T::one().max(b.abs()),
        );
        if let Some(err) = failure {
            return Err(err);
        }
        let (e_best, t_best) = if t >= t_best { (samples[i].0, t) } else { (e_best, t_best) };
        let spacing = (hi - lo) / T::lit((count - 1) as f64);
        if t_best >= pass && energies.last().is_none_or(|&prev| (e_best - prev).abs() > spacing / T::lit(2.0)) {
            energies.push(e_best);
        }
    }
    Ok(ResonanceScan { energies, all_pass: false, samples })
}
