use std::path::PathBuf;

use clap::Args;
use serde::Serialize;

use sta_core::scattering::duality_check;
use sta_core::SlabPolicy;

use crate::output::{emit, num, CliError, CliResult, Table, Tolerances};
use crate::{io, positive, Run};

/// Agreement required between `|β|²` and `R/T`, relative to `max(1, R/T)`.
pub const DUALITY_TOLERANCE: f64 = 1e-6;
/// Bound on `|R + T − 1|`.
pub const UNITARITY_TOLERANCE: f64 = 1e-8;

#[derive(Args, Debug)]
pub struct Opts {
    /// Profile JSON with equal plateaus.
    profile: PathBuf,
    /// Stop refining slabs once R and T change by less than this.
    #[arg(long, default_value_t = 1e-9)]
    slab_tol: f64,
}

impl Opts {
    pub fn validate(self) -> CliResult<Self> {
        positive("slab-tol", self.slab_tol)?;
        Ok(self)
    }
}

#[derive(Serialize)]
struct Report {
    command: &'static str,
    tolerances: Tolerances,
    duality_tolerance: f64,
    unitarity_tolerance: f64,
    energy: f64,
    beta_sq: f64,
    r_over_t: f64,
    discrepancy: f64,
    reflection: f64,
    transmission: f64,
    unitarity_error: f64,
    pass: bool,
}

pub fn run(o: Opts, run: &Run) -> CliResult<()> {
    let profile = io::read_profile(&o.profile)?;
    let policy = SlabPolicy { tol: o.slab_tol, ..SlabPolicy::default() };
    let d = duality_check(&profile, &run.mode_options(), &policy)?;
    let s = &d.scattering;
    let unitarity_error = (s.reflection + s.transmission - 1.0).abs();
    let pass = d.discrepancy <= DUALITY_TOLERANCE && unitarity_error <= UNITARITY_TOLERANCE;
    let report = Report {
        command: "verify-duality",
        tolerances: run.tolerances(o.slab_tol),
        duality_tolerance: DUALITY_TOLERANCE,
        unitarity_tolerance: UNITARITY_TOLERANCE,
        energy: s.energy,
        beta_sq: d.beta_sq,
        r_over_t: d.r_over_t,
        discrepancy: d.discrepancy,
        reflection: s.reflection,
        transmission: s.transmission,
        unitarity_error,
        pass,
    };
    let mut table = Table::new(&["quantity", "value"]);
    for (k, v) in [
        ("energy", s.energy),
        ("beta_sq", d.beta_sq),
        ("r_over_t", d.r_over_t),
        ("discrepancy", d.discrepancy),
        ("reflection", s.reflection),
        ("transmission", s.transmission),
        ("unitarity_error", unitarity_error),
    ] {
        table.push(vec![k.to_string(), num(v)]);
    }
    emit(run.format, &report, &table)?;
    if pass {
        Ok(())
    } else {
        Err(CliError::Numeric(format!(
            "duality discrepancy {:e} or unitarity error {unitarity_error:e} out of tolerance",
            d.discrepancy
        )))
    }
}
