use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, ValueEnum};
use serde::Serialize;

use sta_core::ermakov::{inverse_engineer, ClosureReference, Ramp, RampKind, ReferenceFunction};
use sta_core::modes::bogoliubov;
use sta_core::profiles::{arc_fn, Expr};

use crate::output::{emit, num, warn, CliError, CliResult, Table, Tolerances, UNEXCITED};
use crate::{io, positive, Run};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Quintic,
    Septic,
    Cosine,
}

impl From<Kind> for RampKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Quintic => RampKind::Quintic,
            Kind::Septic => RampKind::Septic,
            Kind::Cosine => RampKind::Cosine,
        }
    }
}

#[derive(Args, Debug)]
pub struct Opts {
    /// Ramp shape for rho between the vacuum amplitudes of the two plateaus.
    #[arg(long, value_enum, default_value_t = Kind::Quintic)]
    kind: Kind,
    /// Initial frequency (not squared).
    #[arg(long, required_unless_present = "rho_expr")]
    omega_from: Option<f64>,
    /// Final frequency (not squared).
    #[arg(long, required_unless_present = "rho_expr")]
    omega_to: Option<f64>,
    /// Bump amplitude added to the ramp; leaves the junctions untouched.
    #[arg(long, default_value_t = 0.0)]
    bump: f64,
    /// Reference amplitude as an expression in `t`, instead of a ramp.
    #[arg(long, conflicts_with_all = ["omega_from", "omega_to", "kind", "bump"])]
    rho_expr: Option<String>,
    /// Start of the engineered window.
    #[arg(long, default_value_t = 0.0)]
    t0: f64,
    /// Duration of the engineered window.
    #[arg(long)]
    tau: f64,
    /// Output profile JSON, relative to the output directory.
    #[arg(long, default_value = "design.json")]
    out: PathBuf,
}

impl Opts {
    pub fn validate(self) -> CliResult<Self> {
        positive("tau", self.tau)?;
        if let Some(w) = self.omega_from {
            positive("omega-from", w)?;
        }
        if let Some(w) = self.omega_to {
            positive("omega-to", w)?;
        }
        if !self.t0.is_finite() || !self.bump.is_finite() {
            return Err(CliError::Input("--t0 and --bump must be finite".into()));
        }
        Ok(self)
    }
}

#[derive(Serialize)]
struct Report {
    command: &'static str,
    tolerances: Tolerances,
    window: (f64, f64),
    omega_in_sq: f64,
    omega_out_sq: f64,
    junction_jump: f64,
    smooth: bool,
    occupation: f64,
    unexcited: bool,
    files: Vec<String>,
}

pub fn run(o: Opts, run: &Run) -> CliResult<()> {
    let window = (o.t0, o.t0 + o.tau);
    let reference: Arc<dyn ReferenceFunction<f64>> = match &o.rho_expr {
        Some(src) => {
            let e = Expr::parse(src)?;
            Arc::new(ClosureReference::new(arc_fn(move |t| e.eval(t))))
        }
        None => {
            let (a, b) = (o.omega_from.unwrap_or(1.0), o.omega_to.unwrap_or(1.0));
            Arc::new(Ramp::between_frequencies(o.kind.into(), a, b, o.t0, o.tau).with_bump(o.bump))
        }
    };
    let engineered = inverse_engineer(reference, window)?;
    if !engineered.smooth {
        warn(&format!(
            "omega^2 jumps by {:e} at a junction; the reference is not smooth there",
            engineered.junction_jump
        ));
    }
    let path = run.out.join(&o.out);
    let written = io::write_profile(&path, &engineered.profile)?;
    let pair = bogoliubov(&written, &run.mode_options())?;
    if pair.occupation >= UNEXCITED {
        warn(&format!("written profile has |beta|^2 = {:e}, above {UNEXCITED:e}", pair.occupation));
    }
    let report = Report {
        command: "design",
        tolerances: run.tolerances(sta_core::SlabPolicy::default().tol),
        window,
        omega_in_sq: written.omega_in_sq(),
        omega_out_sq: written.omega_out_sq(),
        junction_jump: engineered.junction_jump,
        smooth: engineered.smooth,
        occupation: pair.occupation,
        unexcited: pair.occupation < UNEXCITED,
        files: vec![path.display().to_string()],
    };
    let mut table = Table::new(&["quantity", "value"]);
    for (k, v) in [
        ("omega_in_sq", report.omega_in_sq),
        ("omega_out_sq", report.omega_out_sq),
        ("junction_jump", report.junction_jump),
        ("occupation", report.occupation),
    ] {
        table.push(vec![k.to_string(), num(v)]);
    }
    emit(run.format, &report, &table)
}
