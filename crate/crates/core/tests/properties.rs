mod common;

use common::*;
use dissctl::models::{gmon_chain, ion_trap_collective, ising_chain, ising_chain_thermal, random_density, random_majorized_pair, GmonParams};
use dissctl::protocols::{greedy_equalize_plan, hlp_chain, hlp_full_plan, majorizes, PlanOptions, TTransform};
use dissctl::quantum::{liouvillian, vectorize};
use dissctl::C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cases(n: u32) -> ProptestConfig {
    ProptestConfig { cases: n, failure_persistence: None, ..ProptestConfig::default() }
}

/// tr of a column-stacked matrix.
fn trace_of(v: &[C64]) -> C64 {
    let n = (v.len() as f64).sqrt().round() as usize;
    (0..n).map(|i| v[i * (n + 1)]).sum()
}

fn check(r: Check) -> std::result::Result<(), TestCaseError> {
    r.map_err(TestCaseError::fail)
}

proptest! {
    #![proptest_config(cases(128))]

    #[test]
    fn kms_detailed_balance(beta in 0.05f64..5.0, w in 0.05f64..4.0, cutoff in 0.2f64..10.0, fermion in any::<bool>()) {
        check(kms(beta, w, cutoff, fermion))?;
    }

    #[test]
    fn diagonal_restriction_is_idempotent(b in 1.0f64..100.0) {
        check(diagonal_restriction_idempotent(b))?;
    }

    #[test]
    fn population_maps_are_stochastic(gt in 0.0f64..50.0) {
        check(population_maps_stochastic(gt))?;
    }

    #[test]
    fn switch_time_neutralizes_thermal_relaxation(
        b in 1.05f64..20.0, u in 0.0f64..1.0, gamma in 0.1f64..5.0, tau in 0.01f64..5.0, pj in 0.05f64..0.45,
    ) {
        check(switch_time_neutralizes(b, u, gamma, tau, pj))?;
    }

    #[test]
    fn stopping_condition_boundary(b in 1.05f64..50.0, gamma in 0.1f64..5.0, tau in 0.0f64..5.0) {
        check(stopping_boundary(b, gamma, tau))?;
    }

    #[test]
    fn trotter_decoupling_converges_in_k(
        theta in 0.0f64..std::f64::consts::FRAC_PI_2, gt in 0.1f64..3.0,
        hx in -2.0f64..2.0, hy in -2.0f64..2.0, hz in -2.0f64..2.0,
    ) {
        check(trotter_converges(theta, gt, [hx, hy, hz]))?;
    }

    #[test]
    fn majorization_floor_bounds_bit_flip_transfer(seed in any::<u64>(), peaks in prop::collection::vec(0.01f64..1.0, 4)) {
        check(majorization_floor_holds(seed, &peaks))?;
    }
}

proptest! {
    #![proptest_config(cases(100))]

    #[test]
    fn hlp_chain_is_short_and_monotone(raw_y in prop::collection::vec(0.01f64..1.0, 8), seed in any::<u64>()) {
        let mut y = simplex(&raw_y);
        y.sort_by(|a, b| b.total_cmp(a));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = y.clone();
        for _ in 0..5 {
            let i = rng.random_range(0..8);
            let j = (i + rng.random_range(1..8)) % 8;
            TTransform::new(i, j, rng.random_range(0.0..=1.0)).unwrap().apply(&mut x);
        }
        x.sort_by(|a, b| b.total_cmp(a));
        let chain = hlp_chain(&y, &x).unwrap();
        prop_assert!(chain.len() <= 7);
        for step in &chain {
            let mut s = step.before.clone();
            s.sort_by(|a, b| b.total_cmp(a));
            prop_assert!(majorizes(&x, &s).unwrap() && majorizes(&s, &y).unwrap());
            prop_assert!(step.transform.lambda <= 0.5 + 1e-12);
        }
    }

    #[test]
    fn greedy_never_needs_more_noise_than_hlp(seed in any::<u64>(), tol_exp in -6.0f64..-3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let system = ising_chain(3, 1.0, std::f64::consts::FRAC_PI_2, 2.5, 0.0).unwrap();
        let (rho0, target) = random_majorized_pair(&[2, 2, 2], 6, &mut rng).unwrap();
        let opts = PlanOptions { tolerance: 10f64.powf(tol_exp), ..Default::default() };
        let hlp = hlp_full_plan(&rho0, &target, &system, &opts).unwrap();
        let greedy = greedy_equalize_plan(&rho0, &target, &system, &opts).unwrap();
        prop_assert!(greedy.dissipative_time() <= hlp.dissipative_time() + 1e-12);
        if greedy.name == "greedy" {
            prop_assert!(greedy.predicted_error <= opts.tolerance * (1.0 + 1e-9));
        }
    }

    #[test]
    fn builders_preserve_trace(seed in any::<u64>(), which in 0usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let system = match which {
            0 => ising_chain(3, 1.0, 0.7, 5.0, 0.1).unwrap(),
            1 => ising_chain_thermal(2, 1.0, 3.0, 5.0, 0.2).unwrap(),
            2 => gmon_chain(&GmonParams::default()).unwrap(),
            3 => ion_trap_collective(4, 1.0, 5.0).unwrap(),
            _ => ising_chain(2, 1.0, std::f64::consts::FRAC_PI_2, 2.5, 0.0).unwrap(),
        };
        let seq = random_sequence(&system, 1, 1.0, 5.0, &mut rng);
        let l = liouvillian(&system, &seq.coherent[0], &seq.noise[0]).unwrap();
        let rho = random_density(&system.dims, &mut rng).unwrap();
        let d = trace_of(&l.apply(&vectorize(&rho))).norm();
        prop_assert!(d < 1e-10, "{}", d);
    }
}

#[test]
fn plans_execute_close_to_prediction() {
    use dissctl::propagation::frobenius_error;
    use dissctl::DensityOperator;
    let system = ising_chain(3, 1.0, std::f64::consts::FRAC_PI_2, 2.5, 0.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    // fine alternation so the Trotter error sits well below the slack
    let opts = PlanOptions { budget: 7.5, tolerance: 1e-4, trotter_k: 4096, ..Default::default() };
    for case in 0..6 {
        let (rho0, target) = random_majorized_pair(&[2, 2, 2], 4, &mut rng).unwrap();
        let target = if case % 2 == 0 { DensityOperator::maximally_mixed(vec![2, 2, 2]) } else { target };
        for plan in [
            hlp_full_plan(&rho0, &target, &system, &opts).unwrap(),
            greedy_equalize_plan(&rho0, &target, &system, &opts).unwrap(),
        ] {
            let got = frobenius_error(&plan.execute(&system, &rho0).unwrap(), &target).unwrap();
            assert!(got <= 1.1 * plan.predicted_error + 1e-8, "{}: {got} vs {}", plan.name, plan.predicted_error);
        }
    }
}
