use std::path::PathBuf;

use clap::Args;
use serde::Serialize;

use sta_core::ermakov::{build_general_completion, build_symmetric_completion, quintic_continuation};
use sta_core::modes::bogoliubov;

use crate::output::{emit, num, warn, CliError, CliResult, Table, Tolerances, UNEXCITED};
use crate::{io, positive, Run};

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("target").required(true).args(["extremum", "target_omega"]))]
pub struct Opts {
    /// Stage-I profile JSON.
    profile: PathBuf,
    /// Mirror stage I about this extremum of rho on the final plateau (0 is
    /// the first).
    #[arg(long)]
    extremum: Option<usize>,
    /// Final frequency (not squared) of a general completion.
    #[arg(long)]
    target_omega: Option<f64>,
    /// Start of stage II for a general completion; defaults to the end of
    /// stage I.
    #[arg(long, requires = "target_omega")]
    t1: Option<f64>,
    /// Duration of stage II for a general completion; defaults to that of
    /// stage I.
    #[arg(long, requires = "target_omega")]
    tau2: Option<f64>,
    /// Output profile JSON, relative to the output directory.
    #[arg(long, default_value = "completed.json")]
    out: PathBuf,
}

impl Opts {
    pub fn validate(self) -> CliResult<Self> {
        if let Some(w) = self.target_omega {
            positive("target-omega", w)?;
        }
        if let Some(t) = self.tau2 {
            positive("tau2", t)?;
        }
        if self.t1.is_some_and(|t| !t.is_finite()) {
            return Err(CliError::Input("--t1 must be finite".into()));
        }
        Ok(self)
    }
}

#[derive(Serialize)]
struct Report {
    command: &'static str,
    tolerances: Tolerances,
    symmetric: bool,
    degenerate: bool,
    t1: f64,
    tau2: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    tn: Option<f64>,
    delta_after: f64,
    occupation: f64,
    unexcited: bool,
    files: Vec<String>,
}

pub fn run(o: Opts, run: &Run) -> CliResult<()> {
    let stage = io::read_profile(&o.profile)?;
    let opts = run.ermakov_options();
    let plan = match (o.extremum, o.target_omega) {
        (Some(n), _) => build_symmetric_completion(&stage, n, &opts)?,
        (None, Some(w)) => {
            let t1 = o.t1.unwrap_or_else(|| stage.t_plus());
            let tau2 = o.tau2.unwrap_or_else(|| (stage.t_plus() - stage.t_minus()).max(1.0));
            let cont = quintic_continuation(&stage, t1, tau2, w, &opts)?;
            build_general_completion(&stage, &cont, w, &opts)?
        }
        (None, None) => unreachable!("clap requires one of --extremum, --target-omega"),
    };
    if plan.degenerate {
        eprintln!("notice: stage I already leaves the oscillator unexcited; written unchanged");
    }
    let pair = bogoliubov(&plan.profile, &run.mode_options())?;
    if pair.occupation >= UNEXCITED {
        warn(&format!("completed profile has |beta|^2 = {:e}, above {UNEXCITED:e}", pair.occupation));
    }
    let path = run.out.join(&o.out);
    io::write_spec(&path, &plan.to_spec()?)?;
    let report = Report {
        command: "complete",
        tolerances: run.tolerances(sta_core::SlabPolicy::default().tol),
        symmetric: plan.symmetric,
        degenerate: plan.degenerate,
        t1: plan.t1,
        tau2: plan.tau2,
        tn: plan.tn,
        delta_after: plan.check.delta,
        occupation: pair.occupation,
        unexcited: pair.occupation < UNEXCITED,
        files: vec![path.display().to_string()],
    };
    let mut table = Table::new(&["quantity", "value"]);
    for (k, v) in
        [("t1", plan.t1), ("tau2", plan.tau2), ("delta_after", plan.check.delta), ("occupation", pair.occupation)]
    {
        table.push(vec![k.to_string(), num(v)]);
    }
    if let Some(tn) = plan.tn {
        table.push(vec!["tn".to_string(), num(tn)]);
    }
    emit(run.format, &report, &table)
}
