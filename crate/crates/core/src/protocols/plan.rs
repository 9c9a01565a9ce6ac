use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::ControlSystem;
use crate::numerics::{self, pauli, ComplexMatrix, C64};
use crate::propagation::{trotter_decoupled_propagator, TrotterMode};
use crate::quantum::{commutator_superop, embed_local, unitary_superop, vectorize, unvectorize, LiouvillianTerms};
use crate::{numerics::matrix_exponential, DensityOperator};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PlanStep {
    /// Applied instantaneously; `duration` is its cost under the timing model.
    Unitary { label: String, matrix: Vec<Vec<[f64; 2]>>, duration: f64 },
    /// Free evolution with one channel switched on.
    Noise { channel: usize, rate: f64, duration: f64 },
    /// Noise with the coupling Hamiltonian cancelled by alternation.
    TrotterDecouple { channel: usize, rate: f64, duration: f64, k: usize, mode: TrotterMode },
}

impl PlanStep {
    pub fn unitary(label: &str, u: &ComplexMatrix, duration: f64) -> Self {
        let matrix = u.rows().into_iter().map(|r| r.iter().map(|z| [z.re, z.im]).collect()).collect();
        PlanStep::Unitary { label: label.into(), matrix, duration }
    }

    pub fn duration(&self) -> f64 {
        match self {
            PlanStep::Unitary { duration, .. }
            | PlanStep::Noise { duration, .. }
            | PlanStep::TrotterDecouple { duration, .. } => *duration,
        }
    }

    pub fn is_dissipative(&self) -> bool {
        !matches!(self, PlanStep::Unitary { .. })
    }
}

fn matrix_of(rows: &[Vec<[f64; 2]>]) -> Result<ComplexMatrix> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::dim("plan unitary is not square"));
    }
    Ok(ComplexMatrix::from_shape_fn((n, n), |(i, j)| C64::new(rows[i][j][0], rows[i][j][1])))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolPlan {
    pub name: String,
    pub dims: Vec<usize>,
    pub steps: Vec<PlanStep>,
    /// δ_F expected from executing the plan exactly.
    pub predicted_error: f64,
}

impl ProtocolPlan {
    pub fn total_duration(&self) -> f64 {
        self.steps.iter().map(PlanStep::duration).sum()
    }

    /// Sum of the noise-on intervals.
    pub fn dissipative_time(&self) -> f64 {
        self.steps.iter().filter(|s| s.is_dissipative()).map(PlanStep::duration).sum()
    }

    pub fn noise_steps(&self) -> usize {
        self.steps.iter().filter(|s| s.is_dissipative()).count()
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Checks durations, rates and shapes against a system.
    pub fn validate_for(&self, system: &ControlSystem) -> Result<()> {
        if self.dims != system.dims {
            return Err(Error::dim(format!("plan dims {:?}, system dims {:?}", self.dims, system.dims)));
        }
        let n = system.dim();
        for step in &self.steps {
            let d = step.duration();
            if !(d >= 0.0) || !d.is_finite() {
                return Err(Error::domain(format!("step duration {d} must be finite and >= 0")));
            }
            match step {
                PlanStep::Unitary { matrix, .. } => {
                    let u = matrix_of(matrix)?;
                    if u.nrows() != n {
                        return Err(Error::dim(format!("unitary of size {} in a {n}-level system", u.nrows())));
                    }
                    let defect = numerics::max_abs_diff(&numerics::dagger(&u).dot(&u), &numerics::identity(n));
                    if defect > 1e-10 {
                        return Err(Error::domain(format!("plan matrix is not unitary (defect {defect:.2e})")));
                    }
                }
                PlanStep::Noise { channel, rate, .. } | PlanStep::TrotterDecouple { channel, rate, .. } => {
                    let ch = system
                        .channels
                        .get(*channel)
                        .ok_or_else(|| Error::dim(format!("no channel {channel}")))?;
                    if !(*rate >= 0.0 && *rate <= ch.max_rate) {
                        return Err(Error::Bound(format!("rate {rate} outside [0, {}]", ch.max_rate)));
                    }
                    if let PlanStep::TrotterDecouple { k, .. } = step {
                        if *k == 0 {
                            return Err(Error::domain("Trotter number must be at least 1"));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Runs the plan through the system's dynamics.
    pub fn execute(&self, system: &ControlSystem, rho0: &DensityOperator) -> Result<DensityOperator> {
        self.validate_for(system)?;
        let terms = LiouvillianTerms::new(system)?;
        let mut v = vectorize(rho0);
        for step in &self.steps {
            v = match step {
                PlanStep::Unitary { matrix, .. } => unitary_superop(&matrix_of(matrix)?).apply(&v),
                PlanStep::Noise { channel, rate, duration } => {
                    let mut noise = vec![0.0; system.n_noise()];
                    noise[*channel] = *rate;
                    let l = terms.assemble(&vec![0.0; system.n_coherent()], &noise);
                    numerics::matvec(&matrix_exponential(&l.mapv(|z| z * -*duration))?, &v)
                }
                PlanStep::TrotterDecouple { channel, rate, duration, k, mode } => {
                    decoupled_step(system, *channel, *rate, *duration, *k, *mode)?.apply(&v)
                }
            };
        }
        unvectorize(&v, &rho0.dims)
    }
}

/// Noise interval with H₀ + H_LS suppressed. The sign-flip modes only invert
/// the part of H′ that anticommutes with X on the noisy qubit; the commuting
/// remainder acts as ordinary free evolution alongside.
fn decoupled_step(
    system: &ControlSystem,
    channel: usize,
    rate: f64,
    duration: f64,
    k: usize,
    mode: TrotterMode,
) -> Result<crate::Superoperator> {
    if !system.static_channels.is_empty() {
        return Err(Error::domain("decoupled noise steps do not support static channels"));
    }
    let ch = &system.channels[channel];
    if rate == 0.0 || duration == 0.0 {
        let h = commutator_superop(&system.drift)?.matrix.mapv(|z| z * C64::new(0.0, -duration));
        return Ok(crate::Superoperator { matrix: matrix_exponential(&h)? });
    }
    let h_prime = &system.drift.mapv(|z| z / rate) + &ch.lamb_operator.mapv(|z| z * ch.lamb_ratio);
    match mode {
        TrotterMode::Compensator => trotter_decoupled_propagator(ch, &h_prime, rate * duration, k, mode),
        TrotterMode::SignFlip | TrotterMode::Symmetric => {
            let x = embed_local(&pauli::x(), system.noise_site, &system.dims)?;
            let flipped = x.dot(&h_prime).dot(&x);
            let anti = (&h_prime - &flipped).mapv(|z| z * 0.5);
            let comm = (&h_prime + &flipped).mapv(|z| z * 0.5);
            let decoupled = trotter_decoupled_propagator(ch, &anti, rate * duration, k, mode)?;
            let free = commutator_superop(&comm)?.matrix.mapv(|z| z * C64::new(0.0, -rate * duration));
            Ok(crate::Superoperator { matrix: matrix_exponential(&free)?.dot(&decoupled.matrix) })
        }
    }
}

/// U with U|i⟩ = |perm[i]⟩.
pub fn permutation_unitary(perm: &[usize]) -> Result<ComplexMatrix> {
    let n = perm.len();
    let mut seen = vec![false; n];
    let mut u = numerics::zeros(n);
    for (i, &p) in perm.iter().enumerate() {
        if p >= n || seen[p] {
            return Err(Error::domain(format!("{perm:?} is not a permutation")));
        }
        seen[p] = true;
        u[[p, i]] = C64::new(1.0, 0.0);
    }
    Ok(u)
}

/// Moves qubit at site s to site dest[s]; site 0 is the leftmost factor.
pub fn qubit_permutation(dest: &[usize]) -> Result<ComplexMatrix> {
    let n = dest.len();
    let perm: Vec<usize> = (0..1usize << n)
        .map(|idx| {
            (0..n).fold(0, |acc, s| {
                let bit = (idx >> (n - 1 - s)) & 1;
                acc | (bit << (n - 1 - dest[s]))
            })
        })
        .collect();
    permutation_unitary(&perm)
}

/// Identity on the first `active` blocks (2m, 2m+1) and the π/2 y-rotation
/// e^{−iπY/4} on all others, so that bit-flip noise on the last qubit leaves
/// the rotated blocks invariant.
pub fn protect_unitary(dim: usize, active: usize) -> ComplexMatrix {
    let mut u = numerics::zeros(dim);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for m in 0..dim / 2 {
        let (a, b) = (2 * m, 2 * m + 1);
        if m < active {
            u[[a, a]] = C64::new(1.0, 0.0);
            u[[b, b]] = C64::new(1.0, 0.0);
        } else {
            u[[a, a]] = C64::new(s, 0.0);
            u[[a, b]] = C64::new(-s, 0.0);
            u[[b, a]] = C64::new(s, 0.0);
            u[[b, b]] = C64::new(s, 0.0);
        }
    }
    u
}
