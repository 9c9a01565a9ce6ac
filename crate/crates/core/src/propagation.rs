//! Piecewise-constant evolution of vectorized states.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::ControlSystem;
use crate::numerics::{self, matrix_exponential, ComplexMatrix, C64};
use crate::quantum::{
    commutator_superop, spectrum_unchecked, unvectorize, vectorize, DensityOperator, LiouvillianTerms, LindbladChannel,
    Superoperator,
};
use crate::tolerances;

/// Piecewise-constant amplitudes: slice k lasts `durations[k]` with coherent
/// amplitudes `coherent[k]` and channel rates `noise[k]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlSequence {
    pub durations: Vec<f64>,
    pub coherent: Vec<Vec<f64>>,
    pub noise: Vec<Vec<f64>>,
}

impl ControlSequence {
    /// M slices of length τ/M with all amplitudes zero.
    pub fn zeros(slices: usize, total_time: f64, n_coherent: usize, n_noise: usize) -> Result<Self> {
        if slices == 0 || !(total_time > 0.0) {
            return Err(Error::domain("need at least one slice and a positive total time"));
        }
        Ok(ControlSequence {
            durations: vec![total_time / slices as f64; slices],
            coherent: vec![vec![0.0; n_coherent]; slices],
            noise: vec![vec![0.0; n_noise]; slices],
        })
    }

    pub fn new(durations: Vec<f64>, coherent: Vec<Vec<f64>>, noise: Vec<Vec<f64>>) -> Result<Self> {
        let s = ControlSequence { durations, coherent, noise };
        s.check_shape()?;
        Ok(s)
    }

    pub fn slice_count(&self) -> usize {
        self.durations.len()
    }

    pub fn total_time(&self) -> f64 {
        self.durations.iter().sum()
    }

    fn check_shape(&self) -> Result<()> {
        let m = self.durations.len();
        if self.coherent.len() != m || self.noise.len() != m {
            return Err(Error::dim(format!(
                "{m} durations but {} coherent and {} noise rows",
                self.coherent.len(),
                self.noise.len()
            )));
        }
        if let Some(d) = self.durations.iter().find(|d| !(**d > 0.0) || !d.is_finite()) {
            return Err(Error::domain(format!("slice duration {d} must be positive")));
        }
        Ok(())
    }

    /// Shape and bound checks against a system.
    pub fn validate_for(&self, system: &ControlSystem) -> Result<()> {
        self.check_shape()?;
        for (u, g) in self.coherent.iter().zip(&self.noise) {
            system.check_amplitudes(u, g)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityOperator>,
    /// Descending spectrum of each recorded state.
    pub eigenflows: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn final_state(&self) -> &DensityOperator {
        self.states.last().expect("trajectory always holds the initial state")
    }

    /// Largest violation of Hermiticity, unit trace or positivity along the
    /// trajectory.
    pub fn max_invariant_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (rho, spec) in self.states.iter().zip(&self.eigenflows) {
            let tr = (numerics::trace(&rho.matrix) - C64::new(1.0, 0.0)).norm();
            let neg = spec.last().map_or(0.0, |&m| (-m).max(0.0));
            worst = worst.max(tr).max(neg).max(numerics::hermiticity_defect(&rho.matrix));
        }
        worst
    }

    /// Columns `t,lambda_0,…,lambda_{N-1}`, eigenvalues descending.
    pub fn to_csv(&self) -> String {
        let n = self.eigenflows.first().map_or(0, Vec::len);
        let mut out = String::from("t");
        for k in 0..n {
            let _ = write!(out, ",lambda_{k}");
        }
        out.push('\n');
        for (t, spec) in self.times.iter().zip(&self.eigenflows) {
            let _ = write!(out, "{t:.16e}");
            for v in spec {
                let _ = write!(out, ",{v:.16e}");
            }
            out.push('\n');
        }
        out
    }
}

/// X = e^{−Δt·L(u, γ)}.
pub fn slice_propagator(system: &ControlSystem, coherent: &[f64], noise: &[f64], dt: f64) -> Result<Superoperator> {
    system.check_amplitudes(coherent, noise)?;
    let terms = LiouvillianTerms::new(system)?;
    slice_from_terms(&terms, coherent, noise, dt)
}

fn slice_from_terms(terms: &LiouvillianTerms, coherent: &[f64], noise: &[f64], dt: f64) -> Result<Superoperator> {
    if !(dt >= 0.0) || !dt.is_finite() {
        return Err(Error::domain(format!("slice duration {dt} must be finite and >= 0")));
    }
    let l = terms.assemble(coherent, noise);
    Ok(Superoperator { matrix: matrix_exponential(&l.mapv(|z| z * -dt))? })
}

/// Records the state at every slice boundary.
pub fn propagate(system: &ControlSystem, sequence: &ControlSequence, rho0: &DensityOperator) -> Result<Trajectory> {
    propagate_sampled(system, sequence, rho0, 1)
}

/// Like [`propagate`] with `substeps` equally spaced samples per slice.
pub fn propagate_sampled(
    system: &ControlSystem,
    sequence: &ControlSequence,
    rho0: &DensityOperator,
    substeps: usize,
) -> Result<Trajectory> {
    if rho0.dim() != system.dim() {
        return Err(Error::dim(format!("state dimension {} vs system dimension {}", rho0.dim(), system.dim())));
    }
    if substeps == 0 {
        return Err(Error::domain("substeps must be at least 1"));
    }
    sequence.validate_for(system)?;
    let terms = LiouvillianTerms::new(system)?;
    let mut v = vectorize(rho0);
    let mut t = 0.0;
    let mut traj = Trajectory {
        times: vec![0.0],
        eigenflows: vec![spectrum_unchecked(&rho0.matrix)?],
        states: vec![rho0.clone()],
    };
    for k in 0..sequence.slice_count() {
        let dt = sequence.durations[k] / substeps as f64;
        let x = slice_from_terms(&terms, &sequence.coherent[k], &sequence.noise[k], dt)?;
        for _ in 0..substeps {
            v = x.apply(&v);
            t += dt;
            let rho = unvectorize(&v, &rho0.dims)?;
            traj.eigenflows.push(spectrum_unchecked(&rho.matrix)?);
            traj.times.push(t);
            traj.states.push(rho);
        }
    }
    Ok(traj)
}

/// δ_F = ‖ρ − σ‖_F.
pub fn frobenius_error(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::dim(format!("dimensions {} and {} differ", rho.dim(), sigma.dim())));
    }
    Ok(numerics::frobenius_norm(&(&rho.matrix - &sigma.matrix)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrotterMode {
    /// (e^{−(t/2k)(Γ+iĤ′)} e^{−(t/2k)(Γ−iĤ′)})ᵏ
    SignFlip,
    /// The same alternation split palindromically,
    /// e^{−(h/2)A}(e^{−hB}e^{−hA})^{k−1}e^{−hB}e^{−(h/2)A} with h = t/2k,
    /// A = Γ+iĤ′, B = Γ−iĤ′; second order in 1/k.
    Symmetric,
    /// (e^{(t/k)iĤ′} e^{−(t/k)(Γ+iĤ′)})ᵏ
    Compensator,
}

/// Approximates e^{−tΓ} of a channel at unit rate in the presence of a
/// coupling Hamiltonian H′ that is cancelled by alternation. `t` is the
/// product γ·t.
pub fn trotter_decoupled_propagator(
    channel: &LindbladChannel,
    h_prime: &ComplexMatrix,
    t: f64,
    k: usize,
    mode: TrotterMode,
) -> Result<Superoperator> {
    if k == 0 {
        return Err(Error::domain("Trotter number must be at least 1"));
    }
    if !(t >= 0.0) {
        return Err(Error::domain("time must be non-negative"));
    }
    let gamma = channel.dissipator().matrix;
    let ih = commutator_superop(h_prime)?.matrix.mapv(|z| z * C64::new(0.0, 1.0));
    let factor = match mode {
        TrotterMode::SignFlip => {
            let h = t / (2.0 * k as f64);
            let plus = matrix_exponential(&(&gamma + &ih).mapv(|z| z * -h))?;
            let minus = matrix_exponential(&(&gamma - &ih).mapv(|z| z * -h))?;
            plus.dot(&minus)
        }
        TrotterMode::Symmetric => {
            let h = t / (2.0 * k as f64);
            let a = (&gamma + &ih).mapv(|z| z * -h);
            let half = matrix_exponential(&a.mapv(|z| z * 0.5))?;
            let full = matrix_exponential(&a)?;
            let minus = matrix_exponential(&(&gamma - &ih).mapv(|z| z * -h))?;
            let inner = matrix_power(&minus.dot(&full), k - 1);
            return Ok(Superoperator { matrix: half.dot(&inner).dot(&minus).dot(&half) });
        }
        TrotterMode::Compensator => {
            let h = t / k as f64;
            let noisy = matrix_exponential(&(&gamma + &ih).mapv(|z| z * -h))?;
            let comp = matrix_exponential(&ih.mapv(|z| z * h))?;
            comp.dot(&noisy)
        }
    };
    Ok(Superoperator { matrix: matrix_power(&factor, k) })
}

/// Aᵏ by repeated squaring.
pub fn matrix_power(a: &ComplexMatrix, mut k: usize) -> ComplexMatrix {
    let mut result = numerics::identity(a.nrows());
    let mut base = a.clone();
    while k > 0 {
        if k & 1 == 1 {
            result = result.dot(&base);
        }
        k >>= 1;
        if k > 0 {
            base = base.dot(&base);
        }
    }
    result
}

/// Checks each state of a trajectory against the loosened invariant
/// tolerance.
pub fn check_trajectory(traj: &Trajectory) -> Result<()> {
    let d = traj.max_invariant_defect();
    if d > tolerances::TRAJECTORY_POSITIVITY {
        return Err(Error::InvalidState(format!("trajectory invariant defect {d:.3e}")));
    }
    Ok(())
}
