//! Shortcuts to adiabaticity for the time-dependent harmonic oscillator,
//! and the dual one-dimensional scattering problem.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the
//! aliases at the crate root fix the scalar to `f64`.

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ermakov;
pub mod error;
pub mod kaymoses;
pub mod modes;
pub mod ode;
pub mod profiles;
pub mod real;
pub mod scattering;
pub mod squeeze;

pub use error::{Error, Result};
pub use real::Real;

/// `f64` frequency profile.
pub type FrequencyProfile = profiles::FrequencyProfile<f64>;
/// `f64` scattering potential.
pub type PotentialProfile = profiles::PotentialProfile<f64>;
pub type ModeOptions = modes::ModeOptions<f64>;
pub type ModeSolution = modes::ModeSolution<f64>;
pub type BogoliubovPair = modes::BogoliubovPair<f64>;
pub type ErmakovOptions = ermakov::ErmakovOptions<f64>;
pub type ErmakovSolution = ermakov::ErmakovSolution<f64>;
pub type AsymptoticFit = ermakov::AsymptoticFit<f64>;
pub type CompletionPlan = ermakov::CompletionPlan<f64>;
pub type SlabPolicy = scattering::SlabPolicy<f64>;
pub type ScatteringResult = scattering::ScatteringResult<f64>;
pub type SymmetricWellSpec = scattering::SymmetricWellSpec<f64>;
pub type DualityReport = scattering::DualityReport<f64>;
pub type KayMosesSpec = kaymoses::KayMosesSpec<f64>;
pub type GaussianState = squeeze::GaussianState<f64>;
pub type SqueezeParams = squeeze::SqueezeParams<f64>;
