//! Seeded fixtures shared by the benchmarks.

use dissctl::models::{gmon_chain, ion_trap_collective, ising_chain, target_state, GmonParams};
use dissctl::numerics::{ComplexMatrix, C64};
use dissctl::optimize::random_start;
use dissctl::{DensityOperator, OptimizerConfig, Problem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Dense complex matrix with entries uniform in [−s, s] + i[−s, s].
pub fn random_matrix(n: usize, scale: f64, seed: u64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ComplexMatrix::from_shape_fn((n, n), |_| {
        C64::new(rng.random_range(-scale..=scale), rng.random_range(-scale..=scale))
    })
}

#[derive(Clone, Copy, Debug)]
pub enum Fixture {
    /// 3-qubit Ising cooling, 64-dimensional Liouville space.
    Ising3,
    /// Two GMon qutrits, 81-dimensional Liouville space.
    Gmon2,
    /// Four-ion trap, 256-dimensional Liouville space.
    IonTrap4,
}

impl Fixture {
    pub fn label(self) -> &'static str {
        match self {
            Fixture::Ising3 => "ising3",
            Fixture::Gmon2 => "gmon2",
            Fixture::IonTrap4 => "iontrap4",
        }
    }
}

/// A transfer problem and a seeded random parameter vector for it.
pub fn problem(fixture: Fixture, slices: usize) -> (Problem, Vec<f64>) {
    let (system, target) = match fixture {
        Fixture::Ising3 => (ising_chain(3, 1.0, 0.0, 5.0, 0.0).unwrap(), "ground"),
        Fixture::Gmon2 => (gmon_chain(&GmonParams::default()).unwrap(), "ghz"),
        Fixture::IonTrap4 => (ion_trap_collective(4, 1.0, 5.0).unwrap(), "ghz"),
    };
    let dims = system.dims.clone();
    let p = Problem::new(
        system,
        DensityOperator::maximally_mixed(dims.clone()),
        target_state(target, &dims).unwrap(),
        5.0,
        slices,
    )
    .unwrap();
    let x = random_start(&p, &OptimizerConfig::default(), &mut ChaCha8Rng::seed_from_u64(3));
    (p, x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_build() {
        for f in [Fixture::Ising3, Fixture::Gmon2, Fixture::IonTrap4] {
            let (p, x) = problem(f, 4);
            assert_eq!(x.len(), 4 * (p.system.n_coherent() + p.system.n_noise()));
        }
        assert_eq!(random_matrix(5, 1.0, 1), random_matrix(5, 1.0, 1));
    }
}
