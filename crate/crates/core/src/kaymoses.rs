//! Reflectionless frequency profiles from bound-state data.
//!
//! Given `κ₁ > … > κ_N > 0`, the profile
//!
//! ```text
//! ω²(t) = ω₀² + 2 d²/dt² log det(I + C(t)),
//! C_ij = c_i c_j / (κ_i + κ_j) · e^{−(κ_i + κ_j) t},
//! c_n² = 2κ_n ∏_{m≠n} (κ_n + κ_m) / |κ_n − κ_m|,
//! ```
//!
//! leaves every mode unexcited: its dual potential is reflectionless at all
//! energies.
//!
//! For `t < 0` the entries of `C` grow without bound, so there the
//! determinant is rewritten as `det(D²) det(D⁻² + K)` with
//! `D = diag(c_i e^{−κ_i t})` and `K_ij = 1/(κ_i + κ_j)`. The first factor is
//! affine in `t` after the logarithm and drops out of the second derivative.

use std::sync::Arc;

use nalgebra::{DMatrix, RealField};
use num_traits::Float;

use crate::error::{Error, Result};
use crate::modes::{bogoliubov, ModeOptions};
use crate::profiles::{dualize, Closure, FrequencyProfile, Level, Piecewise, Segment, Shape, PLATEAU_CUTOFF};
use crate::real::{bisect, golden_max, linspace, Real};
use crate::scattering::{transfer_matrix_rt, SlabPolicy};

/// Scalars that can also go through nalgebra's factorizations.
pub trait MatrixReal: Real + RealField {}

impl<T: Real + RealField> MatrixReal for T {}

/// Bound-state parameters and the asymptotic squared frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct KayMosesSpec<T> {
    /// Strictly decreasing, positive.
    pub kappas: Vec<T>,
    pub omega0_sq: T,
}

impl<T: Real> KayMosesSpec<T> {
    pub fn new(kappas: Vec<T>, omega0_sq: T) -> Result<Self> {
        let spec = KayMosesSpec { kappas, omega0_sq };
        spec.validate()?;
        Ok(spec)
    }

    /// `κ_n = nκ` for `n = N, …, 1`, whose profile is `N(N+1)κ² sech²(κt)`.
    pub fn poschl_teller(n: usize, kappa: T, omega0_sq: T) -> Result<Self> {
        let kappas = (1..=n).rev().map(|i| kappa * T::lit(i as f64)).collect();
        Self::new(kappas, omega0_sq)
    }

    pub fn with_omega0_sq(&self, omega0_sq: T) -> Self {
        KayMosesSpec { kappas: self.kappas.clone(), omega0_sq }
    }

    pub fn len(&self) -> usize {
        self.kappas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kappas.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.kappas.is_empty() {
            return Err(Error::InvalidKappas("at least one kappa is required".into()));
        }
        for &k in &self.kappas {
            if !(k > T::zero()) || !k.is_finite() {
                return Err(Error::InvalidKappas(format!("kappas must be positive and finite, got {}", k.as_f64())));
            }
        }
        for w in self.kappas.windows(2) {
            if w[1] == w[0] {
                return Err(Error::InvalidKappas(format!("repeated kappa {}", w[0].as_f64())));
            }
            if w[1] > w[0] {
                return Err(Error::InvalidKappas("kappas must be strictly decreasing".into()));
            }
        }
        if !(self.omega0_sq > T::zero()) {
            return Err(Error::NonPositivePlateau(self.omega0_sq.as_f64()));
        }
        Ok(())
    }
}

/// The normalization constants `c_n > 0`.
pub fn km_coefficients<T: Real>(spec: &KayMosesSpec<T>) -> Result<Vec<T>> {
    spec.validate()?;
    let k = &spec.kappas;
    let two = T::lit(2.0);
    Ok(k.iter()
        .enumerate()
        .map(|(n, &kn)| {
            let prod = k
                .iter()
                .enumerate()
                .filter(|&(m, _)| m != n)
                .fold(T::one(), |acc, (_, &km)| acc * (kn + km) / (kn - km).abs());
            (two * kn * prod).sqrt()
        })
        .collect())
}

/// `C(t)`; entries underflow to zero for large `t`.
pub fn km_matrix<T: Real>(spec: &KayMosesSpec<T>, t: T) -> Result<DMatrix<T>> {
    let c = km_coefficients(spec)?;
    let k = &spec.kappas;
    Ok(DMatrix::from_fn(k.len(), k.len(), |i, j| {
        let s = k[i] + k[j];
        c[i] * c[j] / s * (-s * t).exp()
    }))
}

/// Matrices `(M, M', M'', M''')` whose log-determinant differs from
/// `log det(I + C)` by `offset + slope·t`.
struct Factorized<T: nalgebra::Scalar> {
    m: DMatrix<T>,
    m1: DMatrix<T>,
    m2: DMatrix<T>,
    m3: DMatrix<T>,
    offset: T,
    slope: T,
}

fn factorized<T: Real>(kappas: &[T], c: &[T], t: T) -> Factorized<T> {
    let n = kappas.len();
    if t >= T::zero() {
        let cm = DMatrix::from_fn(n, n, |i, j| {
            let s = kappas[i] + kappas[j];
            c[i] * c[j] / s * (-s * t).exp()
        });
        let m1 = DMatrix::from_fn(n, n, |i, j| -(kappas[i] + kappas[j]) * cm[(i, j)]);
        let m2 = DMatrix::from_fn(n, n, |i, j| {
            let s = kappas[i] + kappas[j];
            s * s * cm[(i, j)]
        });
        let m3 = DMatrix::from_fn(n, n, |i, j| {
            let s = kappas[i] + kappas[j];
            -s * s * s * cm[(i, j)]
        });
        let m = DMatrix::from_fn(n, n, |i, j| if i == j { T::one() + cm[(i, j)] } else { cm[(i, j)] });
        Factorized { m, m1, m2, m3, offset: T::zero(), slope: T::zero() }
    } else {
        let two = T::lit(2.0);
        let dinv: Vec<T> = (0..n).map(|i| (two * kappas[i] * t).exp() / (c[i] * c[i])).collect();
        let m = DMatrix::from_fn(n, n, |i, j| {
            let k = T::one() / (kappas[i] + kappas[j]);
            if i == j {
                k + dinv[i]
            } else {
                k
            }
        });
        let m1 = DMatrix::from_fn(n, n, |i, j| if i == j { two * kappas[i] * dinv[i] } else { T::zero() });
        let diag = |p: i32| {
            DMatrix::from_fn(n, n, |i, j| if i == j { (two * kappas[i]).powi(p) * dinv[i] } else { T::zero() })
        };
        let (m2, m3) = (diag(2), diag(3));
        let offset = c.iter().fold(T::zero(), |acc, &ci| acc + two * ci.ln());
        let slope = kappas.iter().fold(T::zero(), |acc, &ki| acc - two * ki);
        Factorized { m, m1, m2, m3, offset, slope }
    }
}

/// `log det M` and its first three derivatives by Cholesky. With
/// `X_k = M⁻¹M⁽ᵏ⁾` these are `tr X₁`, `tr X₂ − tr X₁²` and
/// `tr X₃ − 3 tr X₁X₂ + 2 tr X₁³`.
fn trace_formula<T: RealField + Copy>(f: &Factorized<T>) -> Option<[T; 4]> {
    let chol = f.m.clone().cholesky()?;
    let log_det = chol.l_dirty().diagonal().iter().fold(T::zero(), |acc, &d| acc + d.ln());
    let x1 = chol.solve(&f.m1);
    let x2 = chol.solve(&f.m2);
    let x3 = chol.solve(&f.m3);
    let two = T::one() + T::one();
    let three = two + T::one();
    let x11 = &x1 * &x1;
    let d3 = x3.trace() - three * (&x1 * &x2).trace() + two * (&x11 * &x1).trace();
    Some([two * log_det, x1.trace(), x2.trace() - x11.trace(), d3])
}

/// `log det(I + C)` and its first two time derivatives.
pub fn km_log_det<T: MatrixReal>(spec: &KayMosesSpec<T>, t: T) -> Result<(T, T, T)> {
    let c = km_coefficients(spec)?;
    let [l, d1, d2, _] = log_det_with(&spec.kappas, &c, t)?;
    Ok((l, d1, d2))
}

fn log_det_with<T: MatrixReal>(kappas: &[T], c: &[T], t: T) -> Result<[T; 4]> {
    let f = factorized(kappas, c, t);
    let [l, d1, d2, d3] = trace_formula(&f).ok_or_else(|| Error::NonFinite(t.as_f64()))?;
    Ok([l + f.offset + f.slope * t, d1 + f.slope, d2, d3])
}

/// `2 d²/dt² log det(I + C(t))`, the raw (uncentered) bump on top of `ω₀²`.
pub fn km_correction<T: MatrixReal>(spec: &KayMosesSpec<T>, t: T) -> Result<T> {
    Ok(T::lit(2.0) * km_log_det(spec, t)?.2)
}

/// Options for [`km_synthesize`].
#[derive(Debug, Clone, Copy)]
pub struct KmOptions<T> {
    /// Shift the profile so the highest point of the bump sits at `t = 0`.
    pub recenter: bool,
    /// Multiplies the bump after synthesis. Anything other than 1 breaks the
    /// reflectionless property; useful as a negative control.
    pub amplitude_scale: T,
    /// The plateau starts where the bump falls below `rel_cutoff · ω₀²`.
    pub rel_cutoff: T,
}

impl<T: Real> Default for KmOptions<T> {
    fn default() -> Self {
        KmOptions { recenter: true, amplitude_scale: T::one(), rel_cutoff: T::lit(PLATEAU_CUTOFF) }
    }
}

/// A synthesized profile with its placement data.
#[derive(Debug, Clone)]
pub struct KmSynthesis<T> {
    pub profile: FrequencyProfile<T>,
    /// Raw time of the bump maximum; the profile is `ω₀² + g(t + shift)`
    /// with `g` from [`km_correction`] (zero when not recentered).
    pub shift: T,
    /// Raw-time interval outside which the bump is below the cutoff.
    pub raw_window: (T, T),
}

/// Profile for `spec`, recentered at its peak.
pub fn km_frequency<T: MatrixReal>(spec: &KayMosesSpec<T>) -> Result<FrequencyProfile<T>> {
    Ok(km_synthesize(spec, &KmOptions::default())?.profile)
}

pub fn km_synthesize<T: MatrixReal>(spec: &KayMosesSpec<T>, options: &KmOptions<T>) -> Result<KmSynthesis<T>> {
    let c = Arc::new(km_coefficients(spec)?);
    let kappas = Arc::new(spec.kappas.clone());
    let bump: Bump<T> = Arc::new(move |t: T| {
        let [_, _, d2, d3] = log_det_with(&kappas, &c, t)?;
        Ok((T::lit(2.0) * d2, T::lit(2.0) * d3))
    });
    let c = km_coefficients(spec)?;
    place_bump(bump, &spec.kappas, &c, spec.omega0_sq, options)
}

/// The bump and its slope.
type Bump<T> = Arc<dyn Fn(T) -> Result<(T, T)> + Send + Sync>;

fn place_bump<T: Real>(g: Bump<T>, kappas: &[T], c: &[T], w0: T, options: &KmOptions<T>) -> Result<KmSynthesis<T>> {
    let cut = options.rel_cutoff * w0;
    let kmin = kappas[kappas.len() - 1];
    let kmax = kappas[0];
    // Start the outward scans near the crossover of the exponentials, which
    // is where the bump lives.
    let two = T::lit(2.0);
    let centre = kappas.iter().zip(c).fold(T::zero(), |acc, (&ki, &ci)| acc + (ci * ci / (two * ki)).ln() / (two * ki))
        / T::lit(kappas.len() as f64);
    let step = T::lit(0.25) / kmin;
    let edge = |dir: T| -> Result<T> {
        let mut t = centre;
        let mut quiet = 0;
        for _ in 0..100_000 {
            if g(t)?.0.abs() < cut {
                quiet += 1;
                if quiet == 16 {
                    return Ok(t - dir * step * T::lit(15.0));
                }
            } else {
                quiet = 0;
            }
            t += dir * step;
        }
        Err(Error::NonConvergent("Kay-Moses bump did not decay to the plateau".into()))
    };
    let lo = edge(-T::one())?;
    let hi = edge(T::one())?;
    let shift = if options.recenter {
        let samples = ((hi - lo) * kmax * T::lit(64.0)).ceil().to_usize().unwrap_or(1024).max(256);
        let grid = linspace(lo, hi, samples + 1);
        let mut best = (0, T::neg_infinity());
        for (i, &t) in grid.iter().enumerate() {
            let v = g(t)?.0;
            if v > best.1 {
                best = (i, v);
            }
        }
        let a = grid[best.0.saturating_sub(1)];
        let b = grid[(best.0 + 1).min(samples)];
        let slope = |t: T| g(t).map(|v| v.1).unwrap_or(T::nan());
        if slope(a) > T::zero() && slope(b) < T::zero() {
            bisect(slope, a, b, T::tol(1e-14, 64.0) / kmax)
        } else {
            golden_max(|t| g(t).map(|v| v.0).unwrap_or(T::neg_infinity()), a, b, T::tol(1e-13, 64.0) / kmax).0
        }
    } else {
        T::zero()
    };
    let scale = options.amplitude_scale;
    let f: Closure<T> = Arc::new(move |t: T| match g(t + shift) {
        Ok((v, _)) => w0 + scale * v,
        Err(_) => T::nan(),
    });
    let func = Piecewise::new(
        vec![Segment::new(lo - shift, hi - shift, Shape::Closure(f))],
        lo - shift,
        hi - shift,
        Level::new(w0),
        Level::new(w0),
    )?;
    Ok(KmSynthesis { profile: FrequencyProfile::new(func)?, shift, raw_window: (lo, hi) })
}

/// One `ω₀` entry of [`UnexcitingReport`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnexcitingSample<T> {
    pub omega0: T,
    pub beta_sq: T,
    /// Reflection of the dual potential at `E = ω₀²`.
    pub reflection: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnexcitingReport<T> {
    pub samples: Vec<UnexcitingSample<T>>,
    pub max_beta_sq: T,
    pub max_reflection: T,
}

/// Mode-solver `|β|²` and transfer-matrix `R` for `spec` at each `ω₀`.
pub fn verify_unexciting<T: MatrixReal>(spec: &KayMosesSpec<T>, omega0_values: &[T]) -> Result<UnexcitingReport<T>> {
    verify_unexciting_with(spec, omega0_values, &KmOptions::default())
}

/// [`verify_unexciting`] with explicit synthesis options.
pub fn verify_unexciting_with<T: MatrixReal>(
    spec: &KayMosesSpec<T>,
    omega0_values: &[T],
    options: &KmOptions<T>,
) -> Result<UnexcitingReport<T>> {
    for &w in omega0_values {
        if !(w > T::zero()) {
            return Err(Error::NonPositivePlateau((w * w).as_f64()));
        }
    }
    let results: Vec<Result<UnexcitingSample<T>>> = std::thread::scope(|s| {
        let handles: Vec<_> = omega0_values
            .iter()
            .map(|&w| {
                s.spawn(move || {
                    let syn = km_synthesize(&spec.with_omega0_sq(w * w), options)?;
                    let pair = bogoliubov(&syn.profile, &ModeOptions::default())?;
                    let scat = transfer_matrix_rt(&dualize(&syn.profile, w * w), w * w, &SlabPolicy::default())?;
                    Ok(UnexcitingSample { omega0: w, beta_sq: pair.occupation, reflection: scat.reflection })
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("verification thread panicked")).collect()
    });
    let samples = results.into_iter().collect::<Result<Vec<_>>>()?;
    let max_beta_sq = samples.iter().fold(T::zero(), |m, s| Float::max(m, s.beta_sq));
    let max_reflection = samples.iter().fold(T::zero(), |m, s| Float::max(m, s.reflection));
    Ok(UnexcitingReport { samples, max_beta_sq, max_reflection })
}

/// Result of [`desitter_unexciting_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesitterReport<T> {
    /// `[(2l+d−3)/2][(2l+d−1)/2]`.
    pub prefactor: T,
    /// `N` when `(2l+d−3)/2 = N` is a positive integer, i.e. the profile is
    /// a reflectionless Pöschl–Teller bump.
    pub poschl_teller_index: Option<u32>,
    pub beta_sq: T,
}

/// `|β|²` of de Sitter mode `l` in dimension `d`.
pub fn desitter_unexciting_check<T: Real>(l: u32, d: u32, mass_sq: T) -> Result<DesitterReport<T>> {
    let profile = crate::profiles::make_desitter(l, d, mass_sq)?;
    let twice = 2 * l as i64 + d as i64 - 3;
    let index = (twice > 0 && twice % 2 == 0).then_some((twice / 2) as u32);
    let a = T::lit(twice as f64) / T::lit(2.0);
    let pair = bogoliubov(&profile, &ModeOptions::default())?;
    Ok(DesitterReport { prefactor: a * (a + T::one()), poschl_teller_index: index, beta_sq: pair.occupation })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficients() {
        let c = km_coefficients(&KayMosesSpec::new(vec![1.5_f64], 1.0).unwrap()).unwrap();
        assert!((c[0] * c[0] - 3.0).abs() < 1e-14);
        let c = km_coefficients(&KayMosesSpec::new(vec![2.0_f64, 1.0], 1.0).unwrap()).unwrap();
        assert!((c[0] * c[0] - 12.0).abs() < 1e-13);
        assert!((c[1] * c[1] - 6.0).abs() < 1e-13);
    }

    #[test]
    fn rejects_bad_kappas() {
        assert!(matches!(KayMosesSpec::new(vec![1.0_f64, 1.0], 1.0), Err(Error::InvalidKappas(_))));
        assert!(matches!(KayMosesSpec::new(vec![1.0_f64, 2.0], 1.0), Err(Error::InvalidKappas(_))));
        assert!(matches!(KayMosesSpec::new(vec![-1.0_f64], 1.0), Err(Error::InvalidKappas(_))));
        assert!(KayMosesSpec::<f64>::new(vec![], 1.0).is_err());
        let bad = KayMosesSpec { kappas: vec![1.0_f64, 1.0], omega0_sq: 1.0 };
        assert!(km_coefficients(&bad).is_err());
    }

    #[test]
    fn matrix_at_origin() {
        let spec = KayMosesSpec::new(vec![1.0_f64], 1.0).unwrap();
        let c = km_matrix(&spec, 0.0).unwrap();
        assert!((c[(0, 0)] - 1.0).abs() < 1e-15);
        let spec = KayMosesSpec::new(vec![3.0_f64, 2.0, 1.0], 1.0).unwrap();
        let c = km_matrix(&spec, -0.3).unwrap();
        assert_eq!(c, c.transpose());
        assert!(km_matrix(&spec, 400.0).unwrap().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn both_factorizations_agree_near_zero() {
        let spec = KayMosesSpec::new(vec![3.0_f64, 2.0, 1.0], 1.0).unwrap();
        let c = km_coefficients(&spec).unwrap();
        let a = log_det_with(&spec.kappas, &c, 0.0).unwrap();
        let f = factorized(&spec.kappas, &c, -1e-300);
        let b = trace_formula(&f).unwrap();
        let b = [b[0] + f.offset, b[1] + f.slope, b[2], b[3]];
        for i in 0..4 {
            assert!((a[i] - b[i]).abs() < 1e-12, "derivative {i}: {} vs {}", a[i], b[i]);
        }
    }

    #[test]
    fn third_derivative_matches_differences() {
        let spec = KayMosesSpec::new(vec![2.5_f64, 1.1], 1.0).unwrap();
        let c = km_coefficients(&spec).unwrap();
        let h = 1e-4;
        for &t in &[-1.7, -0.2, 0.3, 1.4] {
            let d2 = |t: f64| log_det_with(&spec.kappas, &c, t).unwrap()[2];
            let fd = (d2(t - 2.0 * h) - 8.0 * d2(t - h) + 8.0 * d2(t + h) - d2(t + 2.0 * h)) / (12.0 * h);
            let d3 = log_det_with(&spec.kappas, &c, t).unwrap()[3];
            assert!((fd - d3).abs() < 1e-8 * d3.abs().max(1.0), "t = {t}: {fd} vs {d3}");
        }
    }

    #[test]
    fn two_level_poschl_teller() {
        let spec = KayMosesSpec::poschl_teller(2, 1.0_f64, 1.0).unwrap();
        let syn = km_synthesize(&spec, &KmOptions::default()).unwrap();
        for i in 0..81 {
            let t = -4.0 + 0.1 * i as f64;
            let s = 1.0 / t.cosh();
            assert!((syn.profile.eval(t) - 1.0 - 6.0 * s * s).abs() < 1e-8, "t = {t}");
        }
    }

    #[test]
    fn single_kappa_is_centered_sech2() {
        let k = 1.3;
        let spec = KayMosesSpec::new(vec![k], 2.0_f64).unwrap();
        for &t in &[-4.0, -1.0, 0.0, 0.5, 3.0] {
            let s = 1.0 / (k * t).cosh();
            assert!((km_correction(&spec, t).unwrap() - 2.0 * k * k * s * s).abs() < 1e-12);
        }
        let syn = km_synthesize(&spec, &KmOptions::default()).unwrap();
        assert!(syn.shift.abs() < 1e-9);
    }

    #[test]
    fn plateaus_are_flat() {
        let spec = KayMosesSpec::new(vec![3.0_f64, 2.0, 1.0], 0.7).unwrap();
        let syn = km_synthesize(&spec, &KmOptions::default()).unwrap();
        let (lo, hi) = syn.raw_window;
        for i in 0..200 {
            let dt = 0.05 * i as f64;
            for t in [lo - dt, hi + dt] {
                assert!(km_correction(&spec, t).unwrap().abs() < 1e-12 * 0.7);
            }
        }
        assert_eq!(syn.profile.eval(hi - syn.shift + 1.0), 0.7);
    }

    #[test]
    fn scaled_bump_is_excited() {
        let spec = KayMosesSpec::new(vec![1.0_f64], 0.25).unwrap();
        let opts = KmOptions { amplitude_scale: 1.1, ..KmOptions::default() };
        let r = verify_unexciting_with(&spec, &[0.5], &opts).unwrap();
        assert!(r.max_beta_sq > 1e-3, "{r:?}");
    }
}
