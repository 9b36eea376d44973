//! Scenario file parsing: distribution literals plus optional defaults for
//! grid sizes, tolerances, and the output directory.

use crate::CliError;
use allpay_core::{Dist, Piece, Scenario};
use serde::Deserialize;
use std::path::Path;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub f1: DistLiteral,
    pub f2: DistLiteral,
    #[serde(default)]
    pub options: Options,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    pub grid_n: Option<usize>,
    pub tol: Option<f64>,
    pub out_dir: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistLiteral {
    Uniform { lo: f64, hi: f64 },
    Piecewise { pieces: Vec<PieceLiteral> },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceLiteral {
    pub lo: f64,
    pub hi: f64,
    /// CDF polynomial coefficients on this piece, constant term first.
    pub coeffs: Vec<f64>,
}

impl DistLiteral {
    pub fn build(&self) -> Result<Dist, CliError> {
        let built = match self {
            DistLiteral::Uniform { lo, hi } => Dist::uniform(*lo, *hi),
            DistLiteral::Piecewise { pieces } => Dist::from_pieces(
                pieces
                    .iter()
                    .map(|p| Piece::new(p.lo, p.hi, p.coeffs.clone()))
                    .collect(),
            ),
        };
        built.map_err(|e| CliError::Input(e.to_string()))
    }
}

pub fn load(path: &Path) -> Result<(Scenario, Options), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let file: ScenarioFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("malformed scenario {}: {e}", path.display())))?;
    let scenario = Scenario::new(file.f1.build()?, file.f2.build()?);
    Ok((scenario, file.options))
}
