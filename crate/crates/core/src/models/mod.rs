//! Control systems and target states.

mod gmon;
mod ion_trap;
mod ising;
mod random;
mod targets;

use crate::error::{Error, Result};
use crate::numerics::{self, ComplexMatrix};
use crate::quantum::{LindbladChannel, StaticChannel};
use crate::tolerances;

pub use gmon::{einstein_coefficients, gmon_chain, kappa_to_rate, EinsteinCoefficients, GmonParams};
pub use ion_trap::ion_trap_collective;
pub use ising::{ising_chain, ising_chain_thermal, noise_generator};
pub use random::{random_density, random_majorized_pair, random_unitary};
pub use targets::{load_target_file, target_state, TargetSpec, TargetState};

/// A coherent control Hamiltonian with optional amplitude bounds.
#[derive(Clone, Debug)]
pub struct Control {
    pub label: String,
    pub operator: ComplexMatrix,
    pub bounds: Option<(f64, f64)>,
}

#[derive(Clone, Debug)]
pub struct ControlSystem {
    pub name: String,
    pub dims: Vec<usize>,
    pub drift: ComplexMatrix,
    pub controls: Vec<Control>,
    /// Switchable channels; their rates are controls in [0, max_rate].
    pub channels: Vec<LindbladChannel>,
    pub static_channels: Vec<StaticChannel>,
    /// Tensor factor carrying the switchable noise.
    pub noise_site: usize,
}

impl ControlSystem {
    pub fn dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn n_coherent(&self) -> usize {
        self.controls.len()
    }

    pub fn n_noise(&self) -> usize {
        self.channels.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.dim();
        let check = |m: &ComplexMatrix, what: &str| -> Result<()> {
            if m.dim() != (n, n) {
                return Err(Error::dim(format!("{what} has shape {:?}, system dimension is {n}", m.dim())));
            }
            Ok(())
        };
        check(&self.drift, "drift")?;
        numerics::ensure_hermitian(&self.drift, tolerances::HERMITIAN)?;
        for c in &self.controls {
            check(&c.operator, &c.label)?;
            numerics::ensure_hermitian(&c.operator, tolerances::HERMITIAN)?;
            if let Some((lo, hi)) = c.bounds {
                if !(lo <= hi) {
                    return Err(Error::domain(format!("control {} has empty bounds", c.label)));
                }
            }
        }
        for ch in &self.channels {
            for j in &ch.jumps {
                check(&j.operator, &ch.label)?;
            }
            check(&ch.lamb_operator, &ch.label)?;
            if !(ch.max_rate >= 0.0) {
                return Err(Error::domain(format!("channel {} has negative max rate", ch.label)));
            }
        }
        for s in &self.static_channels {
            check(&s.generator, &s.label)?;
        }
        Ok(())
    }

    /// Verifies amplitude list lengths and bounds.
    pub fn check_amplitudes(&self, coherent: &[f64], noise: &[f64]) -> Result<()> {
        for (what, got, want) in [("coherent", coherent.len(), self.n_coherent()), ("noise", noise.len(), self.n_noise())] {
            if got != want {
                return Err(Error::dim(format!("{what}: got {got} amplitudes, system has {want}")));
            }
        }
        for (g, ch) in noise.iter().zip(&self.channels) {
            if !(*g >= 0.0 && *g <= ch.max_rate) {
                return Err(Error::Bound(format!("rate {g} of {} outside [0, {}]", ch.label, ch.max_rate)));
            }
        }
        for (u, c) in coherent.iter().zip(&self.controls) {
            if !u.is_finite() {
                return Err(Error::Bound(format!("amplitude of {} is not finite", c.label)));
            }
            if let Some((lo, hi)) = c.bounds {
                if *u < lo || *u > hi {
                    return Err(Error::Bound(format!("amplitude {u} of {} outside [{lo}, {hi}]", c.label)));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds_are_enforced() {
        let s = ising_chain(2, 1.0, 0.0, 5.0, 0.0).unwrap();
        assert!(s.check_amplitudes(&[0.0; 4], &[5.0]).is_ok());
        assert!(s.check_amplitudes(&[0.0; 4], &[5.1]).is_err());
        assert!(s.check_amplitudes(&[0.0; 4], &[-0.1]).is_err());
        assert!(s.check_amplitudes(&[0.0; 3], &[1.0]).is_err());
    }
}
