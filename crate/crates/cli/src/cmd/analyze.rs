use std::path::PathBuf;

use clap::Args;
use serde::Serialize;

use sta_core::ermakov::{find_extrema, fit_asymptotic, solve_ermakov_adiabatic, ExtremumKind};
use sta_core::modes::{extract_bogoliubov_with_tol, integrate_mode};

use crate::output::{emit, io_error, num, warn, CliResult, ComplexJson, Table, Tolerances, UNEXCITED};
use crate::{io, Run};

#[derive(Args, Debug)]
pub struct Opts {
    /// Profile JSON.
    profile: PathBuf,
    /// Mode trajectory CSV, relative to the output directory.
    #[arg(long, default_value = "mode.csv")]
    mode_csv: PathBuf,
    /// Ermakov amplitude CSV, relative to the output directory.
    #[arg(long, default_value = "ermakov.csv")]
    ermakov_csv: PathBuf,
}

impl Opts {
    pub fn validate(self) -> CliResult<Self> {
        Ok(self)
    }
}

#[derive(Serialize)]
struct Extremum {
    t: f64,
    kind: &'static str,
    rho: f64,
}

#[derive(Serialize)]
struct Report {
    command: &'static str,
    profile: String,
    tolerances: Tolerances,
    alpha: ComplexJson,
    beta: ComplexJson,
    occupation: f64,
    persistence: f64,
    squeeze_r: f64,
    delta: f64,
    phi: f64,
    unexcited: bool,
    wronskian_drift: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    nonpositive_at: Option<f64>,
    extrema: Vec<Extremum>,
    files: Vec<String>,
}

pub fn run(o: Opts, run: &Run) -> CliResult<()> {
    let profile = io::read_profile(&o.profile)?;
    let tol = run.tolerances(sta_core::SlabPolicy::default().tol);
    if let Some(t) = profile.nonpositive_at() {
        warn(&format!("omega^2 <= 0 near t = {t}; the mode tunnels there"));
    }

    let sol = integrate_mode(&profile, &run.mode_options())?;
    let pair = extract_bogoliubov_with_tol(&sol, &profile, tol.normalization)?;
    let erm = solve_ermakov_adiabatic(&profile, &run.ermakov_options())?;
    let fit = fit_asymptotic(&erm, &profile)?;
    let extrema = if fit.degenerate {
        Vec::new()
    } else {
        find_extrema(&erm, (profile.t_plus(), erm.last_time()))?
            .into_iter()
            .map(|e| Extremum {
                t: e.t,
                kind: match e.kind {
                    ExtremumKind::Max => "max",
                    ExtremumKind::Min => "min",
                },
                rho: e.rho,
            })
            .collect()
    };

    let mode_path = run.out.join(&o.mode_csv);
    let file = std::fs::File::create(&mode_path).map_err(|e| io_error(&mode_path, e))?;
    sol.write_csv(std::io::BufWriter::new(file)).map_err(|e| io_error(&mode_path, e))?;
    let mut rho = Table::new(&["t", "rho", "rhodot"]);
    for i in 0..erm.grid.len() {
        rho.push_nums(&[erm.grid[i], erm.rho[i], erm.rhodot[i]]);
    }
    let erm_path = run.out.join(&o.ermakov_csv);
    rho.save(&erm_path)?;

    let report = Report {
        command: "analyze",
        profile: o.profile.display().to_string(),
        tolerances: tol,
        alpha: pair.alpha.into(),
        beta: pair.beta.into(),
        occupation: pair.occupation,
        persistence: pair.persistence,
        squeeze_r: pair.squeeze_r,
        delta: fit.delta,
        phi: fit.phi,
        unexcited: pair.occupation < UNEXCITED,
        wronskian_drift: sol.wronskian_drift,
        nonpositive_at: profile.nonpositive_at(),
        extrema,
        files: vec![mode_path.display().to_string(), erm_path.display().to_string()],
    };
    let mut table = Table::new(&["quantity", "value"]);
    for (k, v) in [
        ("alpha_re", pair.alpha.re),
        ("alpha_im", pair.alpha.im),
        ("beta_re", pair.beta.re),
        ("beta_im", pair.beta.im),
        ("occupation", pair.occupation),
        ("persistence", pair.persistence),
        ("squeeze_r", pair.squeeze_r),
        ("delta", fit.delta),
        ("phi", fit.phi),
        ("wronskian_drift", sol.wronskian_drift),
    ] {
        table.push(vec![k.to_string(), num(v)]);
    }
    for (i, e) in report.extrema.iter().enumerate() {
        table.push(vec![format!("extremum_{i}_{}", e.kind), num(e.t)]);
    }
    emit(run.format, &report, &table)
}
