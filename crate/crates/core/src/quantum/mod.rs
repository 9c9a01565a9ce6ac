//! Liouville-space machinery. Vectorization is column stacking,
//! vec(AρB) = (Bᵀ⊗A) vec(ρ), so a qubit's basis order is (ρ₀₀, ρ₁₀, ρ₀₁, ρ₁₁).
//! States evolve as ρ̇ = −(iĤ + Γ)ρ; every stored Γ has spectrum with
//! nonnegative real part.

mod controllability;
mod superop;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{self, ComplexMatrix, C64};
use crate::tolerances;

pub use controllability::{hamiltonian_controllability, lie_closure_dimension};
pub use superop::{
    commutator_superop, dissipator_superop, liouvillian, unitary_superop, LiouvillianTerms, Superoperator,
};

/// Density operator with its tensor-factor dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    pub matrix: ComplexMatrix,
    pub dims: Vec<usize>,
}

impl DensityOperator {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(matrix: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        let rho = Self::new_unchecked(matrix, dims)?;
        rho.validate()?;
        Ok(rho)
    }

    /// Checks only shapes; used for intermediate states of trajectories.
    pub fn new_unchecked(matrix: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        let n = numerics::ensure_square(&matrix, "density operator")?;
        let total: usize = dims.iter().product();
        if total != n {
            return Err(Error::dim(format!("dims {dims:?} give {total}, matrix is {n}x{n}")));
        }
        Ok(DensityOperator { matrix, dims })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn validate(&self) -> Result<()> {
        numerics::ensure_finite(&self.matrix, "density operator")?;
        let herm = numerics::hermiticity_defect(&self.matrix);
        if herm > tolerances::DENSITY {
            return Err(Error::InvalidState(format!("not Hermitian (defect {herm:.3e})")));
        }
        let tr = numerics::trace(&self.matrix);
        if (tr - C64::new(1.0, 0.0)).norm() > tolerances::DENSITY {
            return Err(Error::InvalidState(format!("trace {tr} != 1")));
        }
        let (vals, _) = numerics::hermitian_eigensystem(&self.matrix)?;
        if let Some(&min) = vals.last() {
            if min < -tolerances::DENSITY {
                return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
            }
        }
        Ok(())
    }

    pub fn from_diagonal(p: &[f64], dims: Vec<usize>) -> Result<Self> {
        Self::new(numerics::from_real_diag(p), dims)
    }

    /// |ψ⟩⟨ψ| for a normalized ψ.
    pub fn pure(psi: &[C64], dims: Vec<usize>) -> Result<Self> {
        let norm = numerics::vnorm(psi);
        if norm == 0.0 {
            return Err(Error::domain("zero state vector"));
        }
        let n = psi.len();
        let m = ComplexMatrix::from_shape_fn((n, n), |(i, j)| psi[i] * psi[j].conj() / (norm * norm));
        Self::new(m, dims)
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let n: usize = dims.iter().product();
        let m = numerics::identity(n).mapv(|z| z / n as f64);
        DensityOperator { matrix: m, dims }
    }

    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }
}

pub fn vectorize(rho: &DensityOperator) -> Vec<C64> {
    vec_matrix(&rho.matrix)
}

/// Column-stacked vectorization of any square matrix.
pub fn vec_matrix(m: &ComplexMatrix) -> Vec<C64> {
    m.t().iter().copied().collect()
}

pub fn unvec_matrix(v: &[C64]) -> Result<ComplexMatrix> {
    let n = (v.len() as f64).sqrt().round() as usize;
    if n * n != v.len() {
        return Err(Error::dim(format!("vector length {} is not a perfect square", v.len())));
    }
    Ok(ComplexMatrix::from_shape_fn((n, n), |(i, j)| v[i + n * j]))
}

/// Inverse of `vectorize`; does not validate the resulting state.
pub fn unvectorize(v: &[C64], dims: &[usize]) -> Result<DensityOperator> {
    DensityOperator::new_unchecked(unvec_matrix(v)?, dims.to_vec())
}

/// Places `op` on tensor factor `site` (site 0 is the leftmost factor).
pub fn embed_local(op: &ComplexMatrix, site: usize, dims: &[usize]) -> Result<ComplexMatrix> {
    let d = numerics::ensure_square(op, "local operator")?;
    if site >= dims.len() {
        return Err(Error::dim(format!("site {site} out of range for {} factors", dims.len())));
    }
    if dims[site] != d {
        return Err(Error::dim(format!("operator dim {d} vs local dim {}", dims[site])));
    }
    let factors: Vec<ComplexMatrix> = dims
        .iter()
        .enumerate()
        .map(|(k, &dk)| if k == site { op.clone() } else { numerics::identity(dk) })
        .collect();
    Ok(numerics::kronecker_all(&factors))
}

/// Eigenvalues of ρ, largest first.
pub fn spectrum_descending(rho: &DensityOperator) -> Result<Vec<f64>> {
    rho.validate()?;
    Ok(numerics::hermitian_eigensystem(&rho.matrix)?.0)
}

/// Eigenvalues without validating the state (trajectory diagnostics).
pub fn spectrum_unchecked(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let herm = (m + &numerics::dagger(m)).mapv(|z| z * 0.5);
    Ok(numerics::hermitian_eigensystem(&herm)?.0)
}

/// One weighted jump operator of a channel.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeightedJump {
    pub weight: f64,
    #[serde(skip)]
    pub operator: ComplexMatrix,
}

/// A noise channel whose rate γ is a control. Thermal channels carry several
/// jump operators in a fixed proportion, switched together by one rate.
#[derive(Clone, Debug)]
pub struct LindbladChannel {
    pub label: String,
    pub jumps: Vec<WeightedJump>,
    pub max_rate: f64,
    pub switchable: bool,
    pub lamb_ratio: f64,
    pub lamb_operator: ComplexMatrix,
}

impl LindbladChannel {
    pub fn single(label: &str, generator: ComplexMatrix, max_rate: f64) -> Result<Self> {
        let n = numerics::ensure_square(&generator, "jump operator")?;
        if !(max_rate >= 0.0) {
            return Err(Error::domain(format!("max rate {max_rate} must be >= 0")));
        }
        Ok(LindbladChannel {
            label: label.into(),
            jumps: vec![WeightedJump { weight: 1.0, operator: generator }],
            max_rate,
            switchable: true,
            lamb_ratio: 0.0,
            lamb_operator: numerics::zeros(n),
        })
    }

    pub fn with_lamb(mut self, ratio: f64, operator: ComplexMatrix) -> Result<Self> {
        numerics::ensure_hermitian(&operator, tolerances::HERMITIAN)?;
        self.lamb_ratio = ratio;
        self.lamb_operator = operator;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.lamb_operator.nrows()
    }

    /// Γ of the channel at unit rate (weighted sum of jump dissipators).
    pub fn dissipator(&self) -> Superoperator {
        let n = self.dim();
        let mut acc = numerics::zeros(n * n);
        for j in &self.jumps {
            acc = acc + dissipator_superop(&j.operator).matrix.mapv(|z| z * j.weight);
        }
        Superoperator { matrix: acc }
    }

    /// ∂L/∂γ = Γ + i·ratio·Ĥ_LS.
    pub fn rate_derivative(&self) -> Result<Superoperator> {
        let mut m = self.dissipator().matrix;
        if self.lamb_ratio != 0.0 {
            let h = commutator_superop(&self.lamb_operator)?;
            m = m + h.matrix.mapv(|z| z * C64::new(0.0, self.lamb_ratio));
        }
        Ok(Superoperator { matrix: m })
    }
}

/// Non-switchable background channel at a fixed rate.
#[derive(Clone, Debug)]
pub struct StaticChannel {
    pub label: String,
    pub generator: ComplexMatrix,
    pub rate: f64,
}
