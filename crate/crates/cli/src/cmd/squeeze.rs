use std::f64::consts::PI;
use std::path::PathBuf;

use clap::Args;
use serde::Serialize;

use sta_core::squeeze::{protocol_final_state, squeezed_amplitudes, PURITY_TOLERANCE};

use crate::output::{emit, num, CliError, CliResult, Table, Tolerances};
use crate::{positive, Run};

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("times").required(true).args(["tau", "periods"]))]
pub struct Opts {
    /// Squeeze parameter of the first stage.
    #[arg(long)]
    r: f64,
    /// Oscillator frequency during the free rotation.
    #[arg(long)]
    omega: f64,
    /// Free-evolution times, comma separated.
    #[arg(long, value_delimiter = ',')]
    tau: Vec<f64>,
    /// Free-evolution times as whole periods `2 pi n / omega`.
    #[arg(long, value_delimiter = ',')]
    periods: Vec<u32>,
    /// Also write Fock amplitudes on |0>, |2>, ..., |2 n_max>.
    #[arg(long)]
    n_max: Option<usize>,
    /// Output CSV, relative to the output directory.
    #[arg(long, default_value = "squeeze.csv")]
    out: PathBuf,
    /// Fock amplitude CSV, relative to the output directory.
    #[arg(long, default_value = "amplitudes.csv")]
    amplitudes_csv: PathBuf,
}

impl Opts {
    pub fn validate(self) -> CliResult<Self> {
        positive("omega", self.omega)?;
        if !(self.r >= 0.0 && self.r.is_finite()) {
            return Err(CliError::Input(format!("--r must be non-negative, got {}", self.r)));
        }
        if self.tau.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
            return Err(CliError::Input("--tau values must be non-negative".into()));
        }
        Ok(self)
    }
}

#[derive(Serialize)]
struct Row {
    tau: f64,
    cov: [[f64; 2]; 2],
    det: f64,
    residual_squeeze: f64,
    theta: f64,
}

#[derive(Serialize)]
struct Report {
    command: &'static str,
    tolerances: Tolerances,
    purity_tolerance: f64,
    r: f64,
    omega: f64,
    rows: Vec<Row>,
    files: Vec<String>,
}

pub fn run(o: Opts, run: &Run) -> CliResult<()> {
    let taus: Vec<f64> = if o.tau.is_empty() {
        o.periods.iter().map(|&n| 2.0 * PI * n as f64 / o.omega).collect()
    } else {
        o.tau.clone()
    };
    let mut rows = Vec::with_capacity(taus.len());
    let mut table = Table::new(&["tau", "cov_qq", "cov_qp", "cov_pp", "det", "residual_squeeze", "theta"]);
    let mut amps = Table::new(&["tau", "fock_n", "re", "im"]);
    for &tau in &taus {
        let s = protocol_final_state(o.r, o.omega, tau)?;
        let p = s.squeeze_params()?;
        let c = s.cov;
        table.push_nums(&[tau, c[(0, 0)], c[(0, 1)], c[(1, 1)], s.det(), p.r, p.theta]);
        if let Some(n_max) = o.n_max {
            for (n, a) in squeezed_amplitudes(&p.to_bogoliubov(), n_max)?.iter().enumerate() {
                amps.push(vec![num(tau), (2 * n).to_string(), num(a.re), num(a.im)]);
            }
        }
        rows.push(Row {
            tau,
            cov: [[c[(0, 0)], c[(0, 1)]], [c[(1, 0)], c[(1, 1)]]],
            det: s.det(),
            residual_squeeze: p.r,
            theta: p.theta,
        });
    }
    let path = run.out.join(&o.out);
    table.save(&path)?;
    let mut files = vec![path.display().to_string()];
    if o.n_max.is_some() {
        let p = run.out.join(&o.amplitudes_csv);
        amps.save(&p)?;
        files.push(p.display().to_string());
    }
    let report = Report {
        command: "squeeze",
        tolerances: run.tolerances(sta_core::SlabPolicy::default().tol),
        purity_tolerance: PURITY_TOLERANCE,
        r: o.r,
        omega: o.omega,
        rows,
        files,
    };
    emit(run.format, &report, &table)
}
