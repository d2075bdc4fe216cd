use crate::error::{Error, Result};
use crate::modes::{bogoliubov, BogoliubovPair, ModeOptions};
use crate::profiles::{dualize, FrequencyProfile};
use crate::real::Real;

use super::{transfer_matrix_rt, ScatteringResult, SlabPolicy};

/// Both sides of `|β|² = R/T` for one profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualityReport<T> {
    pub beta_sq: T,
    pub r_over_t: T,
    /// `||β|² − R/T| / max(1, R/T)`.
    pub discrepancy: T,
    pub pair: BogoliubovPair<T>,
    pub scattering: ScatteringResult<T>,
}

/// Runs the mode solver on `profile` and the transfer-matrix solver on the
/// dual potential `V(x) = ω₀² − ω²(x)` at `E = ω₀²`.
pub fn duality_check<T: Real>(
    profile: &FrequencyProfile<T>,
    modes: &ModeOptions<T>,
    slabs: &SlabPolicy<T>,
) -> Result<DualityReport<T>> {
    let (w_in, w_out) = (profile.omega_in_sq(), profile.omega_out_sq());
    if w_in != w_out {
        return Err(Error::UnequalPlateaus(w_in.as_f64(), w_out.as_f64()));
    }
    let pair = bogoliubov(profile, modes)?;
    let scattering = transfer_matrix_rt(&dualize(profile, w_in), w_in, slabs)?;
    let r_over_t = scattering.r_over_t();
    let discrepancy = (pair.occupation - r_over_t).abs() / T::one().max(r_over_t);
    Ok(DualityReport { beta_sq: pair.occupation, r_over_t, discrepancy, pair, scattering })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::make_sech2;

    #[test]
    fn constant_profile_has_no_discrepancy() {
        let p = FrequencyProfile::constant(2.0).unwrap();
        let r = duality_check(&p, &ModeOptions::default(), &SlabPolicy::default()).unwrap();
        assert!(r.beta_sq < 1e-18);
        assert_eq!(r.r_over_t, 0.0);
        assert!(r.discrepancy < 1e-15);
    }

    #[test]
    fn reflective_bump_agrees() {
        let p = make_sech2(1.0, 3.0, 1.0).unwrap();
        let r = duality_check(&p, &ModeOptions::default(), &SlabPolicy::default()).unwrap();
        assert!(r.beta_sq > 1e-4);
        assert!(r.discrepancy < 1e-6, "{r:?}");
    }

    #[test]
    fn unequal_plateaus_rejected() {
        let p = FrequencyProfile::sudden_jump(1.0, 4.0, 0.0).unwrap();
        assert!(matches!(
            duality_check(&p, &ModeOptions::default(), &SlabPolicy::default()),
            Err(Error::UnequalPlateaus(..))
        ));
    }
}
