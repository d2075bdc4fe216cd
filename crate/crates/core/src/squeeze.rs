//! Gaussian states of one mode: squeezing, free rotation and the
//! squeeze–rotate–unsqueeze protocol, in the `(q̂, p̂)` covariance picture
//! with `ħ = 1` (vacuum covariance `I/2`).

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::modes::BogoliubovPair;
use crate::real::Real;

/// Tolerance on `det cov − 1/4` for a state to count as pure.
pub const PURITY_TOLERANCE: f64 = 1e-9;

/// Covariance and mean of a Gaussian state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianState<T: Real> {
    pub cov: Matrix2<T>,
    pub mean: Vector2<T>,
}

impl<T: Real> GaussianState<T> {
    pub fn vacuum() -> Self {
        let h = T::lit(0.5);
        GaussianState { cov: Matrix2::new(h, T::zero(), T::zero(), h), mean: Vector2::zeros() }
    }

    pub fn det(&self) -> T {
        let c = &self.cov;
        c[(0, 0)] * c[(1, 1)] - c[(0, 1)] * c[(1, 0)]
    }

    /// Eigenvalues of the covariance, `(λ_min, λ_max)`.
    pub fn eigenvalues(&self) -> (T, T) {
        let c = &self.cov;
        let two = T::lit(2.0);
        let half_tr = (c[(0, 0)] + c[(1, 1)]) / two;
        let off = (c[(0, 1)] + c[(1, 0)]) / two;
        let d = (c[(0, 0)] - c[(1, 1)]) / two;
        let rad = (d * d + off * off).sqrt();
        // λ_min from the determinant avoids cancellation for strong squeezing.
        let max = half_tr + rad;
        (self.det() / max, max)
    }

    /// `(r, θ)` with `cov = S(r, θ) S(r, θ)ᵀ / 2`, for a pure state.
    /// `θ` is reported in `(−π, π]`; it is undefined for the vacuum, where
    /// zero is returned.
    pub fn squeeze_params(&self) -> Result<SqueezeParams<T>> {
        let r = residual_squeeze(self)?;
        let c = &self.cov;
        let two = T::lit(2.0);
        let off = (c[(0, 1)] + c[(1, 0)]) / two;
        let d = (c[(0, 0)] - c[(1, 1)]) / two;
        // The squeezed axis (λ_min) sits at −θ/2 from q, so tan θ = 2c_qp/(c_pp − c_qq).
        let theta = if r == T::zero() { T::zero() } else { (two * off).atan2(-(d + d)) };
        Ok(SqueezeParams { r, theta })
    }

    /// `cov → M cov Mᵀ`, `mean → M mean`.
    pub fn transformed(&self, m: &Matrix2<T>) -> Self {
        GaussianState { cov: m * self.cov * m.transpose(), mean: m * self.mean }
    }
}

/// `S(r, θ)`; `θ = 0` squeezes `q̂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezeParams<T> {
    pub r: T,
    pub theta: T,
}

impl<T: Real> SqueezeParams<T> {
    pub fn new(r: T, theta: T) -> Result<Self> {
        if !(r >= T::zero()) {
            return Err(Error::InvalidArgument(format!("squeeze parameter must be non-negative, got {}", r.as_f64())));
        }
        Ok(SqueezeParams { r, theta })
    }

    /// Coefficients with `α = cosh r`, `β = sinh r e^{−iθ}`; the inverse
    /// of [`squeeze_from_bogoliubov`].
    pub fn to_bogoliubov(&self) -> BogoliubovPair<T> {
        BogoliubovPair::from_coefficients(
            Complex::new(self.r.cosh(), T::zero()),
            Complex::from_polar(self.r.sinh(), -self.theta),
        )
    }

    /// Symplectic matrix: `diag(e^{−r}, e^{r})` conjugated by a rotation of
    /// the phase plane through `θ/2`.
    pub fn matrix(&self) -> Matrix2<T> {
        let d = Matrix2::new((-self.r).exp(), T::zero(), T::zero(), self.r.exp());
        if self.theta == T::zero() {
            return d;
        }
        let rot = rotation_matrix(self.theta / T::lit(2.0));
        rot * d * rot.transpose()
    }
}

/// Free evolution through phase `angle = ωτ`: `q → q cos φ + p sin φ`,
/// `p → p cos φ − q sin φ`.
pub fn rotation_matrix<T: Real>(angle: T) -> Matrix2<T> {
    let (s, c) = angle.sin_cos();
    Matrix2::new(c, s, -s, c)
}

pub fn apply_squeeze<T: Real>(state: &GaussianState<T>, p: &SqueezeParams<T>) -> GaussianState<T> {
    state.transformed(&p.matrix())
}

pub fn apply_rotation<T: Real>(state: &GaussianState<T>, angle: T) -> GaussianState<T> {
    state.transformed(&rotation_matrix(angle))
}

/// Vacuum, squeezed by `r`, rotated by `ωτ`, then squeezed by `−r`.
pub fn protocol_final_state<T: Real>(r: T, omega: T, tau: T) -> Result<GaussianState<T>> {
    if !(r >= T::zero()) || !(omega > T::zero()) || !(tau >= T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "protocol needs r >= 0, omega > 0, tau >= 0 (got {}, {}, {})",
            r.as_f64(),
            omega.as_f64(),
            tau.as_f64()
        )));
    }
    let s = SqueezeParams { r, theta: T::zero() };
    let undo = SqueezeParams { r: -r, theta: T::zero() };
    let state = apply_squeeze(&GaussianState::vacuum(), &s);
    let state = apply_rotation(&state, omega * tau);
    Ok(apply_squeeze(&state, &undo))
}

/// Squeeze parameter of a pure state: `¼ ln(λ_max/λ_min)`, zero only for
/// the vacuum.
pub fn residual_squeeze<T: Real>(state: &GaussianState<T>) -> Result<T> {
    let det = state.det();
    if (det - T::lit(0.25)).abs() > T::tol(PURITY_TOLERANCE, 1e6) {
        return Err(Error::MixedState(det.as_f64()));
    }
    let (lo, hi) = state.eigenvalues();
    Ok((hi / lo).ln() / T::lit(4.0))
}

/// `r = asinh|β|`, `θ = arg(β*/α)`.
pub fn squeeze_from_bogoliubov<T: Real>(pair: &BogoliubovPair<T>) -> SqueezeParams<T> {
    let ratio = pair.beta.conj() / pair.alpha;
    SqueezeParams { r: pair.beta.norm().asinh(), theta: ratio.arg() }
}

/// Amplitudes on `|2n⟩`, `n = 0..=n_max`, of the in-vacuum seen by the out
/// modes: `a_n = c₀ zⁿ √((2n)!)/(2ⁿ n!)` with `z = −β*/α` and
/// `c₀ = (1 − |z|²)^{1/4}` (real and positive).
pub fn squeezed_amplitudes<T: Real>(pair: &BogoliubovPair<T>, n_max: usize) -> Result<Vec<Complex<T>>> {
    let z = -pair.beta.conj() / pair.alpha;
    let z2 = z.norm_sqr();
    if !(z2 < T::one()) {
        return Err(Error::InvalidArgument(format!("|beta/alpha| must be below 1, got {}", z2.sqrt().as_f64())));
    }
    let c0 = (T::one() - z2).sqrt().sqrt();
    let mut out = Vec::with_capacity(n_max + 1);
    let mut b = T::one();
    let mut zn = Complex::new(T::one(), T::zero());
    out.push(zn.scale(c0));
    for n in 1..=n_max {
        let nf = T::lit(n as f64);
        b *= ((T::lit(2.0) * nf - T::one()) / (T::lit(2.0) * nf)).sqrt();
        zn *= z;
        let a = zn.scale(c0 * b);
        if !(a.re.is_finite() && a.im.is_finite()) {
            return Err(Error::NonFinite(n as f64));
        }
        out.push(a);
    }
    Ok(out)
}

/// `Σ 2n |a_n|²` for amplitudes on `|2n⟩`.
pub fn mean_occupation<T: Real>(amplitudes: &[Complex<T>]) -> T {
    amplitudes.iter().enumerate().fold(T::zero(), |acc, (n, a)| acc + T::lit(2.0 * n as f64) * a.norm_sqr())
}
