use std::path::Path;

use sta_core::profiles::json::{PotentialSpec, ProfileSpec};
use sta_core::{FrequencyProfile, PotentialProfile};

use crate::output::{io_error, CliError, CliResult};

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| io_error(path, e))
}

fn input(path: &Path, e: sta_core::Error) -> CliError {
    match e {
        sta_core::Error::Json(j) => CliError::Input(format!("{}: {j}", path.display())),
        other => CliError::Input(format!("{}: {other}", path.display())),
    }
}

pub fn read_profile(path: &Path) -> CliResult<FrequencyProfile> {
    let spec = ProfileSpec::from_json(&read(path)?).map_err(|e| input(path, e))?;
    spec.to_profile().map_err(|e| input(path, e))
}

pub fn read_potential(path: &Path) -> CliResult<PotentialProfile> {
    let spec = PotentialSpec::from_json(&read(path)?).map_err(|e| input(path, e))?;
    spec.to_potential().map_err(|e| input(path, e))
}

/// Writes `spec` and reads it back, so every emitted file is known to parse.
pub fn write_spec(path: &Path, spec: &ProfileSpec) -> CliResult<FrequencyProfile> {
    let text = spec.to_json()?;
    std::fs::write(path, text + "\n").map_err(|e| io_error(path, e))?;
    read_profile(path)
}

pub fn write_profile(path: &Path, profile: &FrequencyProfile) -> CliResult<FrequencyProfile> {
    write_spec(path, &ProfileSpec::from_profile(profile)?)
}
