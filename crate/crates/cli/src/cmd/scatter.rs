use std::path::PathBuf;
use std::str::FromStr;

use clap::Args;
use serde::Serialize;

use sta_core::real::linspace;
use sta_core::scattering::{resonance_scan, transfer_matrix_rt};
use sta_core::SlabPolicy;

use crate::output::{emit, CliError, CliResult, Table, Tolerances};
use crate::{io, positive, Run};

/// `Emin:Emax:N`.
#[derive(Debug, Clone, Copy)]
pub struct Scan {
    lo: f64,
    hi: f64,
    n: usize,
}

impl FromStr for Scan {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, n] = parts.as_slice() else {
            return Err(format!("expected Emin:Emax:N, got {s:?}"));
        };
        let lo: f64 = lo.trim().parse().map_err(|e| format!("Emin: {e}"))?;
        let hi: f64 = hi.trim().parse().map_err(|e| format!("Emax: {e}"))?;
        let n: usize = n.trim().parse().map_err(|e| format!("N: {e}"))?;
        if !(hi > lo) || n < 2 {
            return Err("scan needs Emax > Emin and N >= 2".into());
        }
        Ok(Scan { lo, hi, n })
    }
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("energies").required(true).args(["energy", "scan"]))]
pub struct Opts {
    /// Potential JSON (`segments`, `v_in`, `v_out`).
    #[arg(long)]
    potential: PathBuf,
    /// Single energy.
    #[arg(long)]
    energy: Option<f64>,
    /// Energy grid `Emin:Emax:N`.
    #[arg(long)]
    scan: Option<Scan>,
    /// Also locate transmission resonances on the scan grid.
    #[arg(long, requires = "scan")]
    resonances: bool,
    /// Stop refining slabs once R and T change by less than this.
    #[arg(long, default_value_t = 1e-9)]
    slab_tol: f64,
    /// Output CSV, relative to the output directory.
    #[arg(long, default_value = "scatter.csv")]
    out: PathBuf,
}

impl Opts {
    pub fn validate(self) -> CliResult<Self> {
        positive("slab-tol", self.slab_tol)?;
        if self.energy.is_some_and(|e| !e.is_finite()) {
            return Err(CliError::Input("--energy must be finite".into()));
        }
        Ok(self)
    }
}

#[derive(Serialize)]
struct Row {
    energy: f64,
    reflection: f64,
    transmission: f64,
    r_re: f64,
    r_im: f64,
    t_re: f64,
    t_im: f64,
    slabs: usize,
}

#[derive(Serialize)]
struct Report {
    command: &'static str,
    tolerances: Tolerances,
    rows: Vec<Row>,
    #[serde(skip_serializing_if = "Option::is_none")]
    resonances: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    all_pass: Option<bool>,
    files: Vec<String>,
}

pub fn run(o: Opts, run: &Run) -> CliResult<()> {
    let potential = io::read_potential(&o.potential)?;
    let policy = SlabPolicy { tol: o.slab_tol, ..SlabPolicy::default() };
    let energies = match (o.energy, o.scan) {
        (Some(e), _) => vec![e],
        (None, Some(s)) => linspace(s.lo, s.hi, s.n),
        (None, None) => unreachable!("clap requires one of --energy, --scan"),
    };
    let mut rows = Vec::with_capacity(energies.len());
    let mut table = Table::new(&["E", "R", "T", "r_re", "r_im", "t_re", "t_im"]);
    for &e in &energies {
        let r = transfer_matrix_rt(&potential, e, &policy)?;
        table.push_nums(&[e, r.reflection, r.transmission, r.r_amp.re, r.r_amp.im, r.t_amp.re, r.t_amp.im]);
        rows.push(Row {
            energy: e,
            reflection: r.reflection,
            transmission: r.transmission,
            r_re: r.r_amp.re,
            r_im: r.r_amp.im,
            t_re: r.t_amp.re,
            t_im: r.t_amp.im,
            slabs: r.slabs,
        });
    }
    let (resonances, all_pass) = match (o.resonances, o.scan) {
        (true, Some(s)) => {
            let scan = resonance_scan(&potential, (s.lo, s.hi), s.n, &policy)?;
            (Some(scan.energies), Some(scan.all_pass))
        }
        _ => (None, None),
    };
    let path = run.out.join(&o.out);
    table.save(&path)?;
    let report = Report {
        command: "scatter",
        tolerances: run.tolerances(o.slab_tol),
        rows,
        resonances,
        all_pass,
        files: vec![path.display().to_string()],
    };
    emit(run.format, &report, &table)
}
