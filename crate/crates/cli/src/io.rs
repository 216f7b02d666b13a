use std::fs;
use std::io::Write;
use std::path::Path;

use relent_core::hermitian::{matrix_from_csv, matrix_from_json, HermitianMatrix, MatrixFile};
use relent_core::{builtin, PhiSpec, StateOperator};

use crate::args::{Cli, Format, PhiArgs};
use crate::Failure;

fn read(flag: &str, path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{flag}: cannot read {}: {e}", path.display())))
}

pub fn load_phi(args: &PhiArgs) -> Result<PhiSpec, Failure> {
    match (&args.phi, &args.phi_file) {
        (Some(name), _) => builtin(name).map_err(|e| Failure::input(format!("--phi: {e}"))),
        (None, Some(path)) => PhiSpec::from_json(&read("--phi-file", path)?).map_err(|e| Failure::input(format!("--phi-file: {e}"))),
        (None, None) => Err(Failure::input("one of --phi or --phi-file is required")),
    }
}

pub fn check_dim(cli: &Cli, flag: &str, dim: usize) -> Result<(), Failure> {
    if dim == 0 || dim > cli.max_dim {
        return Err(Failure::input(format!("{flag}: dimension {dim} outside 1..={} (ENTROPY_MAX_DIM)", cli.max_dim)));
    }
    Ok(())
}

pub fn load_matrix(cli: &Cli, flag: &str, path: &Path) -> Result<HermitianMatrix, Failure> {
    let text = read(flag, path)?;
    let m = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        matrix_from_csv(&text)
    } else {
        matrix_from_json(&text)
    }
    .map_err(|e| Failure::input(format!("{flag}: {e}")))?;
    check_dim(cli, flag, m.dim())?;
    Ok(m)
}

pub fn load_state(cli: &Cli, flag: &str, path: &Path) -> Result<StateOperator, Failure> {
    StateOperator::new(load_matrix(cli, flag, path)?).map_err(|e| Failure::input(format!("{flag}: {e}")))
}

pub fn load_projectors(cli: &Cli, path: &Path) -> Result<Vec<HermitianMatrix>, Failure> {
    let files: Vec<MatrixFile> =
        serde_json::from_str(&read("--chain-file", path)?).map_err(|e| Failure::input(format!("--chain-file: {e}")))?;
    files
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let m = f
                .to_matrix()
                .and_then(HermitianMatrix::new)
                .map_err(|e| Failure::input(format!("--chain-file[{i}]: {e}")))?;
            check_dim(cli, "--chain-file", m.dim())?;
            Ok(m)
        })
        .collect()
}

/// Writes `json` or `csv` (whichever `--format` selects) to `--out` or stdout.
pub fn emit<T: serde::Serialize>(cli: &Cli, value: &T, csv: impl FnOnce() -> Result<String, Failure>) -> Result<(), Failure> {
    let text = match cli.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(value).map_err(|e| Failure::input(e.to_string()))?;
            s.push('\n');
            s
        }
        Format::Csv => csv()?,
    };
    match &cli.out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::input(format!("--out: cannot write {}: {e}", path.display()))),
        None => match std::io::stdout().lock().write_all(text.as_bytes()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure::input(format!("stdout: {e}"))),
            _ => Ok(()),
        },
    }
}
