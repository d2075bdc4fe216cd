use std::fmt;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::ValueEnum;
use serde::Serialize;

/// Input problems exit with 2, numerical failures with 3.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Input(_) => ExitCode::from(2),
            CliError::Numeric(_) => ExitCode::from(3),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Numeric(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<sta_core::Error> for CliError {
    fn from(e: sta_core::Error) -> Self {
        if e.is_numerical() {
            CliError::Numeric(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn io_error(path: &Path, e: io::Error) -> CliError {
    CliError::Input(format!("{}: {e}", path.display()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Tolerances in force for a run; every JSON report carries them.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Tolerances {
    pub ode: f64,
    pub wronskian: f64,
    pub normalization: f64,
    pub slab_refinement: f64,
    pub unexcited: f64,
}

/// `|β|²` below this counts as unexcited.
pub const UNEXCITED: f64 = 1e-6;

impl Tolerances {
    pub fn new(ode: f64, slab: f64) -> Self {
        let modes = sta_core::ModeOptions::default();
        Tolerances {
            ode,
            wronskian: modes.wronskian_tol,
            normalization: modes.norm_tol,
            slab_refinement: slab,
            unexcited: UNEXCITED,
        }
    }
}

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// A CSV table with full-precision numbers.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn push_nums(&mut self, row: &[f64]) {
        self.push(row.iter().map(|&x| num(x)).collect());
    }

    pub fn write<W: Write>(&self, out: W) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()
    }

    pub fn save(&self, path: &Path) -> CliResult<()> {
        let file = std::fs::File::create(path).map_err(|e| io_error(path, e))?;
        self.write(io::BufWriter::new(file)).map_err(|e| io_error(path, e))
    }
}

/// Where a run writes its files.
#[derive(Debug, Clone)]
pub struct OutDir(PathBuf);

impl OutDir {
    /// Creates the directory up front so a bad path fails before any
    /// computation.
    pub fn prepare(path: &Path) -> CliResult<Self> {
        std::fs::create_dir_all(path).map_err(|e| io_error(path, e))?;
        if !path.is_dir() {
            return Err(CliError::Input(format!("{} is not a directory", path.display())));
        }
        Ok(OutDir(path.to_path_buf()))
    }

    pub fn join(&self, name: &Path) -> PathBuf {
        self.0.join(name)
    }
}

/// Prints the JSON report, or the summary table in CSV mode.
pub fn emit<R: Serialize>(format: Format, report: &R, table: &Table) -> CliResult<()> {
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    let res = match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut lock, report).map_err(io::Error::from).and_then(|_| writeln!(lock))
        }
        Format::Csv => table.write(&mut lock),
    };
    res.map_err(|e| CliError::Input(format!("stdout: {e}")))
}

pub fn warn(msg: &str) {
    eprintln!("warning: {msg}");
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

impl From<num_complex::Complex<f64>> for ComplexJson {
    fn from(z: num_complex::Complex<f64>) -> Self {
        ComplexJson { re: z.re, im: z.im }
    }
}
