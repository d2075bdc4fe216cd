use std::path::PathBuf;

use clap::Args;
use serde::Serialize;

use sta_core::kaymoses::{km_synthesize, verify_unexciting_with, KayMosesSpec, KmOptions};
use sta_core::modes::bogoliubov;

use crate::output::{emit, num, CliError, CliResult, Table, Tolerances, UNEXCITED};
use crate::{io, positive, Run};

#[derive(Args, Debug)]
pub struct Opts {
    /// Bound-state parameters, comma separated, e.g. `3,2,1`.
    #[arg(long, value_delimiter = ',', required = true)]
    kappas: Vec<f64>,
    /// Plateau value of omega^2.
    #[arg(long, default_value_t = 1.0)]
    omega0_sq: f64,
    /// Keep the raw Kay-Moses time origin instead of centring the peak.
    #[arg(long)]
    no_recenter: bool,
    /// Also check |beta|^2 and R at these plateau frequencies (not squared).
    #[arg(long, value_delimiter = ',')]
    verify: Vec<f64>,
    /// Spacing of the omega^2(t) CSV.
    #[arg(long, default_value_t = 0.01)]
    dt: f64,
    /// Output profile JSON, relative to the output directory.
    #[arg(long, default_value = "synth.json")]
    out: PathBuf,
    /// Output omega^2(t) CSV, relative to the output directory.
    #[arg(long, default_value = "synth.csv")]
    csv: PathBuf,
}

impl Opts {
    pub fn validate(self) -> CliResult<Self> {
        positive("omega0-sq", self.omega0_sq)?;
        positive("dt", self.dt)?;
        for &w in &self.verify {
            positive("verify", w)?;
        }
        if self.kappas.is_empty() {
            return Err(CliError::Input("--kappas needs at least one value".into()));
        }
        Ok(self)
    }
}

#[derive(Serialize)]
struct Check {
    omega0: f64,
    beta_sq: f64,
    reflection: f64,
}

#[derive(Serialize)]
struct Report {
    command: &'static str,
    tolerances: Tolerances,
    kappas: Vec<f64>,
    omega0_sq: f64,
    shift: f64,
    window: (f64, f64),
    peak: f64,
    occupation: f64,
    unexcited: bool,
    verify: Vec<Check>,
    files: Vec<String>,
}

const MAX_ROWS: usize = 10_000_000;

pub fn run(o: Opts, run: &Run) -> CliResult<()> {
    let spec = KayMosesSpec::new(o.kappas.clone(), o.omega0_sq)?;
    let options = KmOptions { recenter: !o.no_recenter, ..KmOptions::default() };
    let synth = km_synthesize(&spec, &options)?;
    let profile = &synth.profile;
    let pair = bogoliubov(profile, &run.mode_options())?;
    let verify = if o.verify.is_empty() {
        Vec::new()
    } else {
        verify_unexciting_with(&spec, &o.verify, &options)?
            .samples
            .into_iter()
            .map(|s| Check { omega0: s.omega0, beta_sq: s.beta_sq, reflection: s.reflection })
            .collect()
    };

    let (a, b) = (profile.t_minus(), profile.t_plus());
    let n = ((b - a) / o.dt).ceil() as usize;
    if n > MAX_ROWS {
        return Err(CliError::Input(format!("--dt {} gives {n} rows; use a larger spacing", o.dt)));
    }
    let mut table = Table::new(&["t", "omega_sq"]);
    let mut peak = profile.omega_in_sq();
    for i in 0..=n {
        let t = if i == n { b } else { a + o.dt * i as f64 };
        let w = profile.eval(t);
        peak = peak.max(w);
        table.push_nums(&[t, w]);
    }
    let json = run.out.join(&o.out);
    io::write_profile(&json, profile)?;
    let csv = run.out.join(&o.csv);
    table.save(&csv)?;

    let report = Report {
        command: "synth",
        tolerances: run.tolerances(sta_core::SlabPolicy::default().tol),
        kappas: spec.kappas.clone(),
        omega0_sq: o.omega0_sq,
        shift: synth.shift,
        window: (a, b),
        peak,
        occupation: pair.occupation,
        unexcited: pair.occupation < UNEXCITED,
        verify,
        files: vec![json.display().to_string(), csv.display().to_string()],
    };
    let mut summary = Table::new(&["quantity", "value"]);
    for (k, v) in
        [("shift", synth.shift), ("t_minus", a), ("t_plus", b), ("peak", peak), ("occupation", pair.occupation)]
    {
        summary.push(vec![k.to_string(), num(v)]);
    }
    for c in &report.verify {
        summary.push(vec![format!("beta_sq_at_omega0_{}", c.omega0), num(c.beta_sq)]);
        summary.push(vec![format!("reflection_at_omega0_{}", c.omega0), num(c.reflection)]);
    }
    emit(run.format, &report, &summary)
}
