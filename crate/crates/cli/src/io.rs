//! Reading states and channels from JSON files or inline JSON.

use std::fs;

use chandisc::qmat::CMatrix;
use chandisc::{DensityOperator, QuantumChannel};
use nalgebra::Complex;
use serde::Deserialize;

use crate::CliError;

/// A complex number written as `[re, im]`.
type Entry = [f64; 2];

/// Channel file: Kraus operators as row-major `dim_out x dim_in` matrices.
#[derive(Debug, Deserialize)]
pub struct ChannelSpec {
    #[serde(default)]
    pub name: String,
    pub dim_in: usize,
    pub dim_out: usize,
    pub kraus: Vec<Vec<Vec<Entry>>>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum StateSpec {
    Full { matrix: Vec<Vec<Entry>>, dims: Option<Vec<usize>> },
    Bare(Vec<Vec<Entry>>),
}

/// The argument itself when it looks like JSON, otherwise the file it names.
fn load_text(arg: &str) -> Result<String, CliError> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        return Ok(arg.to_string());
    }
    fs::read_to_string(arg).map_err(|e| CliError::Usage(format!("cannot read {arg}: {e}")))
}

fn matrix(rows: &[Vec<Entry>], shape: (usize, usize), what: &str) -> Result<CMatrix<f64>, CliError> {
    if rows.len() != shape.0 || rows.iter().any(|r| r.len() != shape.1) {
        return Err(CliError::Usage(format!("{what} is not a {} x {} matrix", shape.0, shape.1)));
    }
    Ok(CMatrix::from_fn(shape.0, shape.1, |r, c| Complex::new(rows[r][c][0], rows[r][c][1])))
}

pub fn read_state(arg: &str) -> Result<DensityOperator, CliError> {
    let text = load_text(arg)?;
    let spec: StateSpec = serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("malformed state {arg}: {e}")))?;
    let (rows, dims) = match spec {
        StateSpec::Full { matrix, dims } => (matrix, dims),
        StateSpec::Bare(m) => (m, None),
    };
    let d = rows.len();
    let m = matrix(&rows, (d, d), "state")?;
    Ok(DensityOperator::from_matrix(m, dims.unwrap_or(vec![d]))?)
}

pub fn read_channel(arg: &str) -> Result<QuantumChannel, CliError> {
    let text = load_text(arg)?;
    let spec: ChannelSpec =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("malformed channel {arg}: {e}")))?;
    if spec.kraus.is_empty() {
        return Err(CliError::Usage(format!("channel {:?} has no Kraus operators", spec.name)));
    }
    let kraus = spec
        .kraus
        .iter()
        .map(|k| matrix(k, (spec.dim_out, spec.dim_in), "Kraus operator"))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(QuantumChannel::new(kraus, vec![spec.dim_in], vec![spec.dim_out])?)
}
