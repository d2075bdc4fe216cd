//! Constructors for the named frequency profiles.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::real::Real;

use super::{
    detect_plateaus, piecewise_from_closure, Closure, FrequencyProfile, Level, Piecewise, PlateauSearch, Segment,
    Shape, PLATEAU_CUTOFF,
};

/// One entry of a piecewise protocol. The first entry may start at `-∞` and
/// the last may end at `+∞` when they are constant; they then become the
/// asymptotic plateaus.
#[derive(Debug, Clone)]
pub struct SegmentSpec<T> {
    pub t0: T,
    pub t1: T,
    pub shape: Shape<T>,
}

impl<T: Real> SegmentSpec<T> {
    pub fn new(t0: T, t1: T, shape: Shape<T>) -> Self {
        SegmentSpec { t0, t1, shape }
    }

    pub fn constant(t0: T, t1: T, v: T) -> Self {
        SegmentSpec::new(t0, t1, Shape::Constant(v))
    }
}

/// Assembles plateaus, ramps and sudden junctions into a profile.
///
/// Segment edges become integrator breakpoints, so discontinuities between
/// neighbouring segments are resolved exactly.
pub fn make_piecewise<T: Real>(specs: Vec<SegmentSpec<T>>) -> Result<FrequencyProfile<T>> {
    if specs.is_empty() {
        return Err(Error::InvalidProfile("at least one segment is required".into()));
    }
    for w in specs.windows(2) {
        if w[1].t0 < w[0].t1 {
            return Err(Error::SegmentOrder(w[1].t0.as_f64()));
        }
        if w[1].t0 > w[0].t1 {
            return Err(Error::SegmentOrder(w[0].t1.as_f64()));
        }
    }
    let mut specs = specs;
    let n = specs.len();
    let first_open = specs[0].t0 == T::neg_infinity();
    let last_open = specs[n - 1].t1 == T::infinity();
    for (open, s) in [(first_open, &specs[0]), (last_open, &specs[n - 1])] {
        if open && !s.shape.is_constant() {
            return Err(Error::InvalidProfile("only constant segments may extend to infinity".into()));
        }
    }
    for (i, s) in specs.iter().enumerate() {
        let inner_open =
            (s.t0.is_infinite() && !(i == 0 && first_open)) || (s.t1.is_infinite() && !(i == n - 1 && last_open));
        if inner_open || s.t0.is_nan() || s.t1.is_nan() {
            return Err(Error::SegmentOrder(s.t0.as_f64()));
        }
        if !(s.t1 > s.t0) {
            return Err(Error::SegmentOrder(s.t0.as_f64()));
        }
    }
    let left = if first_open { specs[0].shape.eval(T::zero()) } else { specs[0].shape.eval(specs[0].t0) };
    let right = if last_open { specs[n - 1].shape.eval(T::zero()) } else { specs[n - 1].shape.eval(specs[n - 1].t1) };
    for v in [left, right] {
        if !(v > T::zero()) {
            return Err(Error::NonPositivePlateau(v.as_f64()));
        }
    }
    let first_edge = specs[0].t1;
    if last_open {
        specs.pop();
    }
    if first_open {
        specs.remove(0);
    }
    let (lower, upper) = match (specs.first(), specs.last()) {
        (Some(a), Some(b)) => (a.t0, b.t1),
        // Two open plateaus meeting at a single instant.
        _ => return FrequencyProfile::sudden_jump(left, right, first_edge),
    };
    let segments = specs.into_iter().map(|s| Segment::new(s.t0, s.t1, s.shape)).collect();
    FrequencyProfile::new(Piecewise::new(segments, lower, upper, Level::new(left), Level::new(right))?)
}

pub(crate) fn sech2_piecewise<T: Real>(
    base: T,
    amplitude: T,
    kappa: T,
    center: T,
    rel_cutoff: T,
) -> Result<Piecewise<T>> {
    if !(kappa > T::zero()) {
        return Err(Error::InvalidArgument(format!("kappa must be positive, got {}", kappa.as_f64())));
    }
    let cut = rel_cutoff * T::one().max(base.abs());
    if amplitude.abs() <= cut {
        let mut p = Piecewise::constant(base);
        if center != T::zero() {
            p = p.delayed(center);
        }
        return Ok(p);
    }
    let half = (amplitude.abs() / cut).sqrt().acosh() / kappa;
    Piecewise::new(
        vec![Segment::new(center - half, center + half, Shape::Sech2 { base, amplitude, kappa, center })],
        center - half,
        center + half,
        Level::new(base),
        Level::new(base),
    )
}

/// `ω²(t) = omega0_sq + amplitude / cosh²(kappa t)`: the Pöschl–Teller shape.
pub fn make_sech2<T: Real>(omega0_sq: T, amplitude: T, kappa: T) -> Result<FrequencyProfile<T>> {
    make_sech2_with_cutoff(omega0_sq, amplitude, kappa, T::lit(PLATEAU_CUTOFF))
}

/// [`make_sech2`] with an explicit relative plateau cutoff.
pub fn make_sech2_with_cutoff<T: Real>(
    omega0_sq: T,
    amplitude: T,
    kappa: T,
    rel_cutoff: T,
) -> Result<FrequencyProfile<T>> {
    if !(omega0_sq > T::zero()) {
        return Err(Error::NonPositivePlateau(omega0_sq.as_f64()));
    }
    FrequencyProfile::new(sech2_piecewise(omega0_sq, amplitude, kappa, T::zero(), rel_cutoff)?)
}

fn scan_min<T: Real>(f: &dyn Fn(T) -> T, lo: T, hi: T, n: usize) -> (T, T) {
    let mut best = (lo, f(lo));
    for i in 1..=n {
        let t = lo + (hi - lo) * T::lit(i as f64) / T::lit(n as f64);
        let v = f(t);
        if v < best.1 || v.is_nan() {
            best = (t, v);
        }
    }
    best
}

/// Massive, conformally coupled scalar in a spatially flat FRW background:
/// `ω_k² = k² + m² a²(t)`.
pub fn make_cosmology<T: Real>(k: T, m: T, scale_factor: Closure<T>) -> Result<FrequencyProfile<T>> {
    let search = PlateauSearch::default();
    let a = scale_factor.clone();
    let (lo, hi, a_left, a_right) = detect_plateaus(&*a, &search)?;
    let (t_bad, a_min) = scan_min(&*a, lo - T::one(), hi + T::one(), 1 << 14);
    if !(a_min > T::zero()) || !(a_left > T::zero()) || !(a_right > T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "scale factor must be positive (a = {} at t = {})",
            a_min.as_f64(),
            t_bad.as_f64()
        )));
    }
    let f: Closure<T> = Arc::new(move |t| {
        let at = scale_factor(t);
        k * k + m * m * at * at
    });
    FrequencyProfile::new(piecewise_from_closure(f, &search)?)
}

/// Scalar QED in a homogeneous electric field:
/// `ω_k² = (k_par − A_par(t))² + k_perp² + m²`.
///
/// Unlike generic profiles this rejects any instant with ω² ≤ 0, since the
/// mode frequency of a charged field must stay real along the path.
pub fn make_scalar_qed<T: Real>(k_par: T, k_perp: T, m: T, a_par: Closure<T>) -> Result<FrequencyProfile<T>> {
    let search = PlateauSearch::default();
    let (lo, hi, _, _) = detect_plateaus(&*a_par, &search)?;
    let floor = k_perp * k_perp + m * m;
    let shifted = {
        let a = a_par.clone();
        move |t: T| k_par - a(t)
    };
    let n = 1 << 16;
    let (lo, hi) = (lo - T::one(), hi + T::one());
    let mut prev = shifted(lo);
    for i in 1..=n {
        let t = lo + (hi - lo) * T::lit(i as f64) / T::lit(n as f64);
        let cur = shifted(t);
        let crosses = prev == T::zero() || (prev > T::zero()) != (cur > T::zero());
        if crosses && floor <= T::zero() {
            return Err(Error::NonPositiveFrequency(t.as_f64()));
        }
        prev = cur;
    }
    let f: Closure<T> = Arc::new(move |t| {
        let d = k_par - a_par(t);
        d * d + floor
    });
    let profile = FrequencyProfile::new(piecewise_from_closure(f, &search)?)?;
    if let Some(t) = profile.nonpositive_at() {
        return Err(Error::NonPositiveFrequency(t.as_f64()));
    }
    Ok(profile)
}

/// Yukawa coupling to a homogeneous classical field:
/// `ω_k² = k² + m² + λ σ²(t)`.
pub fn make_yukawa<T: Real>(k: T, m: T, lambda: T, sigma: Closure<T>) -> Result<FrequencyProfile<T>> {
    let f: Closure<T> = Arc::new(move |t| {
        let s = sigma(t);
        k * k + m * m + lambda * s * s
    });
    FrequencyProfile::new(piecewise_from_closure(f, &PlateauSearch::default())?)
}

/// Mode `l` of a field of squared mass `mass_sq` on `d`-dimensional global
/// de Sitter space (conformal time, unit radius):
/// `ω² = [(2l+d−3)/2][(2l+d−1)/2] sech²t + (m² − (d−1)²/4)`.
pub fn make_desitter<T: Real>(l: u32, d: u32, mass_sq: T) -> Result<FrequencyProfile<T>> {
    if d < 3 {
        return Err(Error::InvalidArgument(format!("spacetime dimension must be at least 3, got {d}")));
    }
    let (l, d) = (T::lit(l as f64), T::lit(d as f64));
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let prefactor = (two * l + d - three) / two * ((two * l + d - T::one()) / two);
    let offset = mass_sq - (d - T::one()) * (d - T::one()) / T::lit(4.0);
    if !(offset > T::zero()) {
        return Err(Error::NonPositivePlateau(offset.as_f64()));
    }
    FrequencyProfile::new(sech2_piecewise(offset, prefactor, T::one(), T::zero(), T::lit(PLATEAU_CUTOFF))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::arc_fn;

    fn tanh_step(from: f64, to: f64) -> Closure<f64> {
        arc_fn(move |t: f64| from + (to - from) * 0.5 * (1.0 + t.tanh()))
    }

    #[test]
    fn single_constant_segment() {
        let p = make_piecewise(vec![SegmentSpec::constant(0.0, 1.0, 1.0)]).unwrap();
        assert_eq!(p.omega_in_sq(), 1.0);
        assert_eq!(p.omega_out_sq(), 1.0);
    }

    #[test]
    fn sudden_jump_records_boundary() {
        let p = make_piecewise(vec![
            SegmentSpec::constant(f64::NEG_INFINITY, 0.0, 1.0),
            SegmentSpec::constant(0.0, 2.0, 4.0),
        ])
        .unwrap();
        assert!(p.boundaries().contains(&0.0));
        assert_eq!(p.eval(-1e-12), 1.0);
        assert_eq!(p.eval(0.0), 4.0);
        assert_eq!(p.omega_out_sq(), 4.0);
    }

    #[test]
    fn five_piece_completion_layout() {
        let ramp = |a: f64, b: f64, t0: f64| Shape::Tanh { from: a, to: b, center: t0, width: 0.2 };
        let p = make_piecewise(vec![
            SegmentSpec::constant(f64::NEG_INFINITY, 0.0, 1.0),
            SegmentSpec::new(0.0, 2.0, ramp(1.0, 4.0, 1.0)),
            SegmentSpec::constant(2.0, 5.0, 4.0),
            SegmentSpec::new(5.0, 7.0, ramp(4.0, 9.0, 6.0)),
            SegmentSpec::constant(7.0, f64::INFINITY, 9.0),
        ])
        .unwrap();
        assert_eq!(p.omega_in_sq(), 1.0);
        assert_eq!(p.omega_out_sq(), 9.0);
        assert_eq!(p.boundaries(), vec![0.0, 2.0, 5.0, 7.0]);
    }

    #[test]
    fn rejects_bad_segments() {
        assert!(matches!(
            make_piecewise(vec![SegmentSpec::constant(0.0, 2.0, 1.0), SegmentSpec::constant(1.0, 3.0, 1.0)]),
            Err(Error::SegmentOrder(_))
        ));
        assert!(matches!(
            make_piecewise(vec![SegmentSpec::constant(0.0, 1.0, -1.0)]),
            Err(Error::NonPositivePlateau(_))
        ));
    }

    #[test]
    fn sech2_peaks() {
        assert_eq!(make_sech2(1.0, 2.0, 1.0).unwrap().eval(0.0), 3.0);
        assert_eq!(make_sech2(1.0, 6.0, 1.0).unwrap().eval(0.0), 7.0);
        let flat = make_sech2(1.0, 0.0, 1.0).unwrap();
        assert!(flat.segments().is_empty());
        assert_eq!(flat.eval(0.3), 1.0);
    }

    #[test]
    fn cosmology_cases() {
        let massless = make_cosmology(1.5, 0.0, tanh_step(1.0, 2.0)).unwrap();
        assert!((massless.eval(0.3) - 2.25).abs() < 1e-15);
        let static_universe = make_cosmology(1.0, 1.0, arc_fn(|_| 1.0)).unwrap();
        assert_eq!(static_universe.eval(4.0), 2.0);
        let p = make_cosmology(1.0, 1.0, tanh_step(1.0, 2.0)).unwrap();
        assert!((p.omega_in_sq() - 2.0).abs() < 1e-12);
        assert!((p.omega_out_sq() - 5.0).abs() < 1e-12);
        let t = 0.4_f64;
        let a = 1.0 + 0.5 * (1.0 + t.tanh());
        assert!((p.eval(t) - (1.0 + a * a)).abs() < 1e-14);
        assert!(make_cosmology(1.0, 1.0, arc_fn(|t: f64| 1.0 + t.abs())).is_err());
    }

    #[test]
    fn scalar_qed_cases() {
        let none = make_scalar_qed(1.0, 0.5, 0.5, arc_fn(|_| 0.0)).unwrap();
        assert_eq!(none.eval(0.0), 1.5);
        assert!(matches!(make_scalar_qed(1.0, 0.0, 0.0, tanh_step(0.0, 2.0)), Err(Error::NonPositiveFrequency(_))));
        let p = make_scalar_qed(0.0, 1.0, 1.0, tanh_step(0.0, 1.0)).unwrap();
        assert!((p.omega_in_sq() - 2.0).abs() < 1e-12);
        assert!((p.omega_out_sq() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn yukawa_sech_matches_sech2_builder() {
        let yuk = make_yukawa(1.0, 1.0, 1.0, arc_fn(|t: f64| 1.0 / t.cosh())).unwrap();
        let pt = make_sech2(2.0, 1.0, 1.0).unwrap();
        for i in 0..=400 {
            let t = -40.0 + 0.2 * i as f64;
            assert!((yuk.eval(t) - pt.eval(t)).abs() <= 4e-12, "t = {t}");
        }
        let off = make_yukawa(1.0, 1.0, 0.0, arc_fn(|t: f64| 1.0 / t.cosh())).unwrap();
        assert!(off.segments().is_empty());
        let frozen = make_yukawa(1.0, 2.0, 0.5, arc_fn(|_| 3.0)).unwrap();
        assert_eq!(frozen.eval(0.0), 1.0 + 4.0 + 0.5 * 9.0);
    }

    #[test]
    fn desitter_prefactors() {
        let p = make_desitter(1, 3, 2.0_f64).unwrap();
        assert_eq!(p.omega_in_sq(), 1.0);
        assert_eq!(p.eval(0.0), 3.0);
        let q = make_desitter(0, 4, 3.0_f64).unwrap();
        assert_eq!(q.eval(0.0) - q.omega_in_sq(), 0.75);
        assert!(matches!(make_desitter(0, 3, 1.0_f64), Err(Error::NonPositivePlateau(_))));
        assert!(make_desitter(0, 4, 2.25_f64).is_err());
    }
}
