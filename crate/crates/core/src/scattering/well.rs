use num_complex::Complex;

use crate::error::{Error, Result};
use crate::ode::{integrate, StepPolicy};
use crate::profiles::{Piecewise, PotentialProfile, Segment};
use crate::real::Real;

/// Symmetric well: flank `U(x)` for `x < −a`, a flat floor `−V0` on
/// `[−a, a]`, and the mirrored flank `U(−x)` for `x > a`.
#[derive(Debug, Clone)]
pub struct SymmetricWellSpec<T> {
    /// Left flank; must tend to its left plateau as `x → −∞`.
    pub flank: PotentialProfile<T>,
    /// Half-width of the floor.
    pub a: T,
    pub v0: T,
    pub energy: T,
}

impl<T: Real> SymmetricWellSpec<T> {
    pub fn new(flank: PotentialProfile<T>, a: T, v0: T, energy: T) -> Self {
        SymmetricWellSpec { flank, a, v0, energy }
    }

    /// `γ = √(E + V0)`, the wavenumber on the floor.
    pub fn gamma(&self) -> T {
        (self.energy + self.v0).sqrt()
    }

    pub fn with_half_width(&self, a: T) -> Self {
        SymmetricWellSpec { a, ..self.clone() }
    }

    /// The full potential.
    pub fn assemble(&self) -> Result<PotentialProfile<T>> {
        let a = self.a;
        if !(a > T::zero()) {
            return Err(Error::InvalidArgument("well half-width must be positive".into()));
        }
        let p = self.flank.piecewise();
        let mirrored = p.reflected_about(T::zero());
        let lo = p.lower().min(-a);
        let mut segments = p.pieces(lo, -a);
        segments.push(Segment::constant(-a, a, -self.v0));
        segments.extend(mirrored.pieces(a, -lo));
        Ok(PotentialProfile::new(
            Piecewise::new(segments, lo, -lo, p.left_level(), mirrored.right_level())?,
            Some(self.energy),
        ))
    }

    /// `(φ(−a), φ'(−a))` for the flank solution that is `e^{ikx}` at the far
    /// left.
    pub fn flank_solution(&self) -> Result<(Complex<T>, Complex<T>)> {
        let flank = &self.flank;
        let e = self.energy;
        let k2 = e - flank.v_left();
        if !(k2 > T::zero()) {
            return Err(Error::BelowAsymptote { energy: e.as_f64(), asymptote: flank.v_left().as_f64() });
        }
        let k = k2.sqrt();
        let x_end = -self.a;
        let x_start = flank.x_minus();
        let wave = |x: T| {
            let phi = Complex::from_polar(T::one(), k * x);
            (phi, Complex::new(T::zero(), k) * phi)
        };
        if x_end <= x_start {
            return Ok(wave(x_end));
        }
        let (phi0, dphi0) = wave(x_start);
        let rhs = move |x: T, y: &[T; 4], anchor: T| {
            let c = flank.eval_anchored(x, anchor) - e;
            [y[2], y[3], c * y[0], c * y[1]]
        };
        let traj = integrate(
            &rhs,
            (x_start, x_end),
            [phi0.re, phi0.im, dphi0.re, dphi0.im],
            &flank.boundaries(),
            &StepPolicy::default(),
            |_, _| Ok(()),
            |_| true,
        )?;
        let y = traj.y.last().expect("integration returns at least one point");
        Ok((Complex::new(y[0], y[1]), Complex::new(y[2], y[3])))
    }
}

/// Phase `ζ` of the resonance condition `γa = nπ/2 + ζ/4`.
///
/// With `f = |φ'|² − γ²|φ|² − 2iγ Re(φ'φ*)` at `x = −a`, resonance needs
/// `e^{4iγa} = f/f*`. The branch is `ζ = 2 arg(−f) ∈ (−2π, 2π]`, so a flat
/// flank (`f < 0` real) gives `ζ = 0`.
pub fn zeta_of_gamma<T: Real>(spec: &SymmetricWellSpec<T>) -> Result<T> {
    let (phi, dphi) = spec.flank_solution()?;
    let g = spec.gamma();
    let f = Complex::new(dphi.norm_sqr() - g * g * phi.norm_sqr(), -(g + g) * (dphi * phi.conj()).re);
    if f.norm() < T::tol(1e-12, 64.0) {
        return Err(Error::DegenerateZeta(f.norm().as_f64()));
    }
    Ok(T::lit(2.0) * (-f).arg())
}

/// `ζ` over a list of energies (at fixed `a` and `V0`), unwrapped to a
/// continuous branch anchored at the highest energy.
pub fn zeta_sweep<T: Real>(spec: &SymmetricWellSpec<T>, energies: &[T]) -> Result<Vec<T>> {
    let mut order: Vec<usize> = (0..energies.len()).collect();
    order.sort_by(|&i, &j| energies[j].partial_cmp(&energies[i]).expect("NaN energy"));
    let mut out = vec![T::zero(); energies.len()];
    let mut prev: Option<T> = None;
    for i in order {
        let raw = zeta_of_gamma(&SymmetricWellSpec { energy: energies[i], ..spec.clone() })?;
        let z = match prev {
            Some(p) => nearest_branch(raw, p),
            None => raw,
        };
        out[i] = z;
        prev = Some(z);
    }
    Ok(out)
}

/// `raw + 4πm` closest to `reference`.
fn nearest_branch<T: Real>(raw: T, reference: T) -> T {
    let period = T::lit(4.0) * T::PI();
    raw + ((reference - raw) / period).round() * period
}

/// Half-width `a` solving `γa = nπ/2 + ζ(γ, a)/4` by fixed-point iteration.
pub fn symmetric_well_width<T: Real>(spec: &SymmetricWellSpec<T>, n: u32) -> Result<T> {
    if n == 0 {
        return Err(Error::InvalidArgument("resonance index must be positive".into()));
    }
    let g = spec.gamma();
    let base = T::lit(n as f64) * T::PI() / T::lit(2.0);
    let mut a = base / g;
    let mut zeta = T::zero();
    let tol = T::tol(1e-10, 1e4);
    for _ in 0..100 {
        zeta = nearest_branch(zeta_of_gamma(&spec.with_half_width(a))?, zeta);
        let next = (base + zeta / T::lit(4.0)) / g;
        if !(next > T::zero()) {
            return Err(Error::NonConvergent(format!(
                "width iteration left the positive axis (a = {})",
                next.as_f64()
            )));
        }
        if (next - a).abs() < tol {
            return Ok(next);
        }
        a = next;
    }
    Err(Error::NonConvergent("symmetric-well width did not converge in 100 iterations".into()))
}
