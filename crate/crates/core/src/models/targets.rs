use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, C64};
use crate::quantum::DensityOperator;

#[derive(Clone, Debug, PartialEq)]
pub enum TargetSpec {
    Ground,
    MaxMixed,
    Ghz,
    File(PathBuf),
}

impl TargetSpec {
    pub fn parse(label: &str) -> Result<Self> {
        match label {
            "ground" => Ok(TargetSpec::Ground),
            "max_mixed" => Ok(TargetSpec::MaxMixed),
            "ghz" => Ok(TargetSpec::Ghz),
            _ => match label.strip_prefix("file:") {
                Some(p) if !p.is_empty() => Ok(TargetSpec::File(PathBuf::from(p))),
                _ => Err(Error::Parse(format!("unknown target '{label}'"))),
            },
        }
    }
}

#[derive(Clone, Debug)]
pub struct TargetState {
    pub state: DensityOperator,
    pub label: String,
}

/// Builds |0…0⟩, I/N, the GHZ state Σ_k |k…k⟩/√d (all factors of dimension
/// d) or a state read from `file:<path>`.
pub fn target_state(label: &str, dims: &[usize]) -> Result<TargetState> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::dim(format!("invalid dims {dims:?}")));
    }
    let n: usize = dims.iter().product();
    let state = match TargetSpec::parse(label)? {
        TargetSpec::Ground => {
            let mut p = vec![0.0; n];
            p[0] = 1.0;
            DensityOperator::from_diagonal(&p, dims.to_vec())?
        }
        TargetSpec::MaxMixed => DensityOperator::maximally_mixed(dims.to_vec()),
        TargetSpec::Ghz => {
            let d = dims[0];
            if dims.iter().any(|&x| x != d) {
                return Err(Error::dim("GHZ target needs equal local dimensions"));
            }
            let mut psi = vec![C64::new(0.0, 0.0); n];
            let amp = 1.0 / (d as f64).sqrt();
            for k in 0..d {
                // index of |k k … k⟩
                let idx = (0..dims.len()).fold(0, |acc, _| acc * d + k);
                psi[idx] = C64::new(amp, 0.0);
            }
            DensityOperator::pure(&psi, dims.to_vec())?
        }
        TargetSpec::File(path) => {
            let rho = load_target_file(&path)?;
            if rho.dims != dims {
                return Err(Error::dim(format!("target file has dims {:?}, system has {dims:?}", rho.dims)));
            }
            rho
        }
    };
    Ok(TargetState { state, label: label.into() })
}

#[derive(Deserialize)]
struct TargetFile {
    dims: Vec<usize>,
    /// row-major [re, im] pairs
    matrix: Vec<[f64; 2]>,
}

/// Reads `{"dims": [...], "matrix": [[re, im], ...]}` with the matrix in
/// row-major order and validates it as a density operator.
pub fn load_target_file(path: &Path) -> Result<DensityOperator> {
    let text = std::fs::read_to_string(path)?;
    let f: TargetFile = serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let n: usize = f.dims.iter().product();
    if f.dims.is_empty() || f.matrix.len() != n * n {
        return Err(Error::dim(format!("dims {:?} need {} entries, file has {}", f.dims, n * n, f.matrix.len())));
    }
    let m = ComplexMatrix::from_shape_fn((n, n), |(i, j)| {
        let [re, im] = f.matrix[i * n + j];
        C64::new(re, im)
    });
    DensityOperator::new(m, f.dims)
}
