use super::{Control, ControlSystem};
use crate::error::{Error, Result};
use crate::numerics::{self, pauli, ComplexMatrix};
use crate::quantum::{embed_local, LindbladChannel};

const IONS: usize = 4;

fn collective(op: &ComplexMatrix, dims: &[usize]) -> Result<ComplexMatrix> {
    let mut acc = numerics::zeros(1 << dims.len());
    for k in 0..dims.len() {
        acc = acc + embed_local(op, k, dims)?;
    }
    Ok(acc.mapv(|z| z * 0.5))
}

/// Four trapped ions without drift: joint F_x, F_y, their squares and local
/// ½Z controls, all scaled by the interaction strength `a`, plus switchable
/// amplitude damping on the last ion.
pub fn ion_trap_collective(n: usize, a: f64, gamma_max: f64) -> Result<ControlSystem> {
    if n != IONS {
        return Err(Error::domain(format!("ion-trap model is defined for {IONS} qubits, got {n}")));
    }
    if !(a > 0.0) || !(gamma_max >= 0.0) {
        return Err(Error::domain("interaction strength must be positive and gamma_max non-negative"));
    }
    let dims = vec![2; n];
    let fx = collective(&pauli::x(), &dims)?;
    let fy = collective(&pauli::y(), &dims)?;
    let fx2 = fx.dot(&fx);
    let fy2 = fy.dot(&fy);
    let scaled = |m: &ComplexMatrix| m.mapv(|z| z * a);
    let mut controls = vec![
        Control { label: "fx".into(), operator: scaled(&fx), bounds: None },
        Control { label: "fy".into(), operator: scaled(&fy), bounds: None },
        Control { label: "fx2".into(), operator: scaled(&fx2), bounds: None },
        Control { label: "fy2".into(), operator: scaled(&fy2), bounds: None },
    ];
    for k in 0..n {
        controls.push(Control {
            label: format!("z{k}"),
            operator: scaled(&embed_local(&pauli::z().mapv(|z| z * 0.5), k, &dims)?),
            bounds: None,
        });
    }
    let site = n - 1;
    let channel = LindbladChannel::single("amp_damp", embed_local(&pauli::lowering(), site, &dims)?, gamma_max)?;
    let system = ControlSystem {
        name: "ion_trap_collective(n=4)".into(),
        drift: numerics::zeros(1 << n),
        dims,
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
    use crate::numerics::{max_abs_diff, C64};

    #[test]
    fn control_inventory() {
        let s = ion_trap_collective(4, 1.0, 5.0).unwrap();
        assert_eq!(s.n_coherent(), 8);
        assert_eq!(s.n_noise(), 1);
        assert!(ion_trap_collective(3, 1.0, 5.0).is_err());
        assert!(crate::quantum::hamiltonian_controllability(&s));
    }

    #[test]
    fn fx_flips_one_spin() {
        let s = ion_trap_collective(4, 1.0, 5.0).unwrap();
        let fx = &s.controls[0].operator;
        let mut psi = vec![C64::new(0.0, 0.0); 16];
        psi[0] = C64::new(1.0, 0.0);
        let out = numerics::matvec(fx, &psi);
        for (idx, z) in out.iter().enumerate() {
            let want = if idx.count_ones() == 1 { 0.5 } else { 0.0 };
            assert!((z - C64::new(want, 0.0)).norm() < 1e-15);
        }
        let fx2 = &s.controls[2].operator;
        assert!(max_abs_diff(fx2, &fx.dot(fx)) < 1e-14);
    }

    #[test]
    fn scaling_by_interaction_strength() {
        let s1 = ion_trap_collective(4, 1.0, 5.0).unwrap();
        let s2 = ion_trap_collective(4, 2.0, 5.0).unwrap();
        for (c1, c2) in s1.controls.iter().zip(&s2.controls) {
            assert!(max_abs_diff(&c1.operator.mapv(|z| z * 2.0), &c2.operator) < 1e-14);
        }
    }
}
