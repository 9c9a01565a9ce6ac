use std::f64::consts::{FRAC_PI_2, PI};

use super::{Control, ControlSystem};
use crate::bath;
use crate::error::{Error, Result};
use crate::numerics::{self, pauli, ComplexMatrix, C64};
use crate::quantum::{embed_local, LindbladChannel, StaticChannel, WeightedJump};

/// V_θ = ((0, cos θ/2), (sin θ/2, 0)); θ = 0 is amplitude damping, θ = π/2 bit flip.
pub fn noise_generator(theta: f64) -> Result<ComplexMatrix> {
    if !(0.0..=FRAC_PI_2).contains(&theta) {
        return Err(Error::domain(format!("theta {theta} outside [0, pi/2]")));
    }
    let mut v = numerics::zeros(2);
    v[[0, 1]] = C64::new((theta / 2.0).cos(), 0.0);
    v[[1, 0]] = C64::new((theta / 2.0).sin(), 0.0);
    Ok(v)
}

fn chain_base(n: usize, j: f64) -> Result<(Vec<usize>, ComplexMatrix, Vec<Control>)> {
    if n == 0 {
        return Err(Error::domain("chain needs at least one qubit"));
    }
    if !(j > 0.0) {
        return Err(Error::domain(format!("coupling J = {j} must be positive")));
    }
    let dims = vec![2; n];
    let dim = 1 << n;
    let mut drift = numerics::zeros(dim);
    for k in 0..n.saturating_sub(1) {
        let zz = embed_local(&pauli::z(), k, &dims)?.dot(&embed_local(&pauli::z(), k + 1, &dims)?);
        drift = drift + zz.mapv(|z| z * (PI * j * 0.5));
    }
    let mut controls = Vec::with_capacity(2 * n);
    for k in 0..n {
        for (name, op) in [("x", pauli::x()), ("y", pauli::y())] {
            controls.push(Control {
                label: format!("{name}{k}"),
                operator: embed_local(&op.mapv(|z| z * 0.5), k, &dims)?,
                bounds: None,
            });
        }
    }
    Ok((dims, drift, controls))
}

/// Ising-ZZ chain H₀ = πJ Σ ½ Z_k Z_{k+1} with ½X, ½Y controls on every
/// qubit, a switchable V_θ channel on the last qubit and optional static
/// dephasing Z/√2 on every qubit.
pub fn ising_chain(n: usize, j: f64, theta: f64, gamma_max: f64, gamma_dephasing: f64) -> Result<ControlSystem> {
    if !(gamma_max >= 0.0) || !(gamma_dephasing >= 0.0) {
        return Err(Error::domain("rates must be non-negative"));
    }
    let (dims, drift, controls) = chain_base(n, j)?;
    let site = n - 1;
    let v = embed_local(&noise_generator(theta)?, site, &dims)?;
    let channel = LindbladChannel::single("noise", v, gamma_max)?
        .with_lamb(0.0, embed_local(&pauli::z().mapv(|z| z * 0.5), site, &dims)?)?;
    let mut static_channels = Vec::new();
    if gamma_dephasing > 0.0 {
        for k in 0..n {
            static_channels.push(StaticChannel {
                label: format!("dephasing{k}"),
                generator: embed_local(&pauli::z().mapv(|z| z / 2f64.sqrt()), k, &dims)?,
                rate: gamma_dephasing,
            });
        }
    }
    let system = ControlSystem {
        name: format!("ising_chain(n={n}, theta={theta})"),
        dims,
        drift,
        controls,
        channels: vec![channel],
        static_channels,
        noise_site: site,
    };
    system.validate()?;
    Ok(system)
}

/// Ising chain whose last qubit couples to a bosonic bath with Boltzmann
/// factor b ≥ 1 (qubit convention ω_n < 0): jump operators |1⟩⟨0| and |0⟩⟨1|
/// with weights 1/(b+1) and 1/(b⁻¹+1), and Lamb operator ½Z at the ratio
/// computed from the bath.
pub fn ising_chain_thermal(n: usize, j: f64, b: f64, gamma_max: f64, cutoff_ratio: f64) -> Result<ControlSystem> {
    if !(gamma_max >= 0.0) {
        return Err(Error::domain("rates must be non-negative"));
    }
    let (dims, drift, controls) = chain_base(n, j)?;
    let site = n - 1;
    let ratio = bath::qubit_lamb_ratio(&bath::qubit_bath(b, cutoff_ratio)?)?;
    let (wm, wp) = bath::thermal_weights(b);
    let channel = LindbladChannel {
        label: "bath".into(),
        jumps: vec![
            WeightedJump { weight: wm, operator: embed_local(&pauli::raising(), site, &dims)? },
            WeightedJump { weight: wp, operator: embed_local(&pauli::lowering(), site, &dims)? },
        ],
        max_rate: gamma_max,
        switchable: true,
        lamb_ratio: 0.0,
        lamb_operator: numerics::zeros(1 << n),
    }
    .with_lamb(ratio, embed_local(&pauli::z().mapv(|z| z * 0.5), site, &dims)?)?;
    let system = ControlSystem {
        name: format!("ising_chain_thermal(n={n}, b={b})"),
        dims,
        drift,
        controls,
        channels: vec![channel],
        static_channels: vec![],
        noise_site: site,
    };
    system.validate()?;
    Ok(system)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{max_abs_diff, from_real_rows};
    use crate::quantum::{dissipator_superop, hamiltonian_controllability};

    #[test]
    fn generators() {
        assert_eq!(noise_generator(0.0).unwrap(), pauli::lowering());
        let vb = noise_generator(FRAC_PI_2).unwrap();
        assert!(max_abs_diff(&vb, &pauli::x().mapv(|z| z / 2f64.sqrt())) < 1e-15);
        assert!(noise_generator(2.0).is_err());
        assert!(noise_generator(-0.1).is_err());
    }

    #[test]
    fn fixed_point_of_generalized_generator() {
        let th = PI / 3.0;
        let g = dissipator_superop(&noise_generator(th).unwrap());
        let c2 = (th / 2.0).cos().powi(2);
        let rho = from_real_rows(2, 2, &[c2, 0.0, 0.0, 1.0 - c2]);
        let out = g.apply(&crate::quantum::vec_matrix(&rho));
        assert!(numerics::vnorm(&out) < 1e-15);
    }

    #[test]
    fn three_qubit_system_shape() {
        let s = ising_chain(3, 1.0, 0.0, 5.0, 0.0).unwrap();
        assert_eq!(s.n_coherent(), 6);
        assert_eq!(s.n_noise(), 1);
        let v = &s.channels[0].jumps[0].operator;
        let expect = embed_local(&pauli::lowering(), 2, &[2, 2, 2]).unwrap();
        assert_eq!(v, &expect);
        let one = ising_chain(1, 1.0, 0.0, 1.0, 0.0).unwrap();
        assert!(one.drift.iter().all(|z| z.norm() == 0.0));
        assert_eq!(one.n_coherent(), 2);
        assert!(ising_chain(2, 1.0, 3.0, 1.0, 0.0).is_err());
        assert!(ising_chain(2, 1.0, 0.0, -1.0, 0.0).is_err());
        assert_eq!(ising_chain(3, 1.0, 0.0, 5.0, 0.1).unwrap().static_channels.len(), 3);
    }

    #[test]
    fn chains_are_controllable() {
        for n in 1..=3 {
            assert!(hamiltonian_controllability(&ising_chain(n, 1.0, 0.0, 1.0, 0.0).unwrap()));
        }
    }

    #[test]
    fn thermal_chain_detailed_balance() {
        let s = ising_chain_thermal(2, 1.0, 2.0, 5.0, 0.2).unwrap();
        let ch = &s.channels[0];
        assert!((ch.jumps[1].weight / ch.jumps[0].weight - 2.0).abs() < 1e-14);
        assert!(ch.lamb_ratio.is_finite());
    }
}
