use crate::error::Result;
use crate::models::ControlSystem;
use crate::numerics::{self, dagger, identity, kronecker, transpose, ComplexMatrix, C64};
use crate::tolerances;

/// N²×N² matrix acting on column-stacked density operators.
#[derive(Clone, Debug, PartialEq)]
pub struct Superoperator {
    pub matrix: ComplexMatrix,
}

impl Superoperator {
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        numerics::matvec(&self.matrix, v)
    }

    pub fn compose(&self, after: &Superoperator) -> Superoperator {
        Superoperator { matrix: after.matrix.dot(&self.matrix) }
    }

    pub fn identity(n: usize) -> Superoperator {
        Superoperator { matrix: identity(n * n) }
    }

    /// Hilbert-space dimension N.
    pub fn hilbert_dim(&self) -> usize {
        (self.matrix.nrows() as f64).sqrt().round() as usize
    }
}

/// Ĥ with Ĥ vec(ρ) = vec(Hρ − ρH), i.e. Ĥ = I⊗H − Hᵀ⊗I.
pub fn commutator_superop(h: &ComplexMatrix) -> Result<Superoperator> {
    numerics::ensure_hermitian(h, tolerances::HERMITIAN)?;
    Ok(Superoperator { matrix: commutator_superop_unchecked(h) })
}

pub(crate) fn commutator_superop_unchecked(h: &ComplexMatrix) -> ComplexMatrix {
    let n = h.nrows();
    let id = identity(n);
    kronecker(&id, h) - kronecker(&transpose(h), &id)
}

/// Γ_V with Γ_V vec(ρ) = −vec(VρV† − ½{V†V, ρ}).
pub fn dissipator_superop(v: &ComplexMatrix) -> Superoperator {
    let n = v.nrows();
    let id = identity(n);
    let vdv = dagger(v).dot(v);
    let jump = kronecker(&numerics::conj(v), v);
    let anti = kronecker(&id, &vdv) + kronecker(&transpose(&vdv), &id);
    Superoperator { matrix: anti.mapv(|z| z * 0.5) - jump }
}

/// vec(UρU†) = (Ū⊗U) vec(ρ).
pub fn unitary_superop(u: &ComplexMatrix) -> Superoperator {
    Superoperator { matrix: kronecker(&numerics::conj(u), u) }
}

/// Superoperator pieces of a control system, so that
/// L(u, γ) = drift + Σ u_j controls[j] + Σ γ_ℓ noise[ℓ].
#[derive(Clone, Debug)]
pub struct LiouvillianTerms {
    pub drift: ComplexMatrix,
    pub controls: Vec<ComplexMatrix>,
    pub noise: Vec<ComplexMatrix>,
}

impl LiouvillianTerms {
    pub fn new(system: &ControlSystem) -> Result<Self> {
        let i = C64::new(0.0, 1.0);
        let mut drift = commutator_superop(&system.drift)?.matrix.mapv(|z| z * i);
        for s in &system.static_channels {
            drift = drift + dissipator_superop(&s.generator).matrix.mapv(|z| z * s.rate);
        }
        let controls = system
            .controls
            .iter()
            .map(|c| commutator_superop(&c.operator).map(|h| h.matrix.mapv(|z| z * i)))
            .collect::<Result<Vec<_>>>()?;
        let noise = system
            .channels
            .iter()
            .map(|ch| ch.rate_derivative().map(|s| s.matrix))
            .collect::<Result<Vec<_>>>()?;
        Ok(LiouvillianTerms { drift, controls, noise })
    }

    pub fn assemble(&self, coherent: &[f64], noise: &[f64]) -> ComplexMatrix {
        let mut l = self.drift.clone();
        for (u, c) in coherent.iter().zip(&self.controls) {
            if *u != 0.0 {
                l.scaled_add(C64::new(*u, 0.0), c);
            }
        }
        for (g, c) in noise.iter().zip(&self.noise) {
            if *g != 0.0 {
                l.scaled_add(C64::new(*g, 0.0), c);
            }
        }
        l
    }
}

/// L = iĤ(u, γ) + Σ γ_ℓ Γ_ℓ + static dissipators, where the Lamb-shift
/// Hamiltonian of each channel scales with its rate.
pub fn liouvillian(system: &ControlSystem, coherent: &[f64], noise: &[f64]) -> Result<Superoperator> {
    system.check_amplitudes(coherent, noise)?;
    let terms = LiouvillianTerms::new(system)?;
    Ok(Superoperator { matrix: terms.assemble(coherent, noise) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{c, from_real_diag, from_real_rows, max_abs_diff, pauli, zeros};
    use crate::quantum::{unvec_matrix, vec_matrix};

    #[test]
    fn commutator_action() {
        assert!(commutator_superop(&zeros(3)).unwrap().matrix.iter().all(|z| z.norm() == 0.0));
        let d = commutator_superop(&from_real_diag(&[2.0, 5.0])).unwrap().matrix;
        let diag: Vec<f64> = (0..4).map(|k| d[[k, k]].re).collect();
        assert_eq!(diag, vec![0.0, 3.0, -3.0, 0.0]);
        let h = from_real_rows(2, 2, &[1.0, 0.5, 0.5, -2.0]) + pauli::y().mapv(|z| z * 0.3);
        let rho = ComplexMatrix::from_shape_fn((2, 2), |(i, j)| c(0.1 + i as f64, j as f64 - 0.2));
        let got = unvec_matrix(&commutator_superop(&h).unwrap().apply(&vec_matrix(&rho))).unwrap();
        assert!(max_abs_diff(&got, &(h.dot(&rho) - rho.dot(&h))) < 1e-12);
        assert!(commutator_superop(&pauli::lowering()).is_err());
    }

    #[test]
    fn amplitude_damping_matrix() {
        let g = dissipator_superop(&pauli::lowering()).matrix;
        let expect = from_real_rows(
            4,
            4,
            &[0.0, 0.0, 0.0, -1.0, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0, 1.0],
        );
        assert!(max_abs_diff(&g, &expect) < 1e-15);
    }

    #[test]
    fn trace_and_unitality() {
        let vb = pauli::x().mapv(|z| z / 2f64.sqrt());
        let gb = dissipator_superop(&vb).matrix;
        let vec_i = vec_matrix(&identity(2));
        let right = numerics::matvec(&gb, &vec_i);
        assert!(right.iter().all(|z| z.norm() < 1e-15));
        let ga = dissipator_superop(&pauli::lowering()).matrix;
        for g in [&ga, &gb] {
            let left = numerics::matvec(&numerics::dagger(g), &vec_i);
            assert!(left.iter().all(|z| z.norm() < 1e-15));
        }
        assert!(numerics::matvec(&ga, &vec_i).iter().any(|z| z.norm() > 0.1));
    }

    #[test]
    fn unitary_superop_conjugates() {
        let u = numerics::matrix_exponential(&pauli::y().mapv(|z| z * c(0.0, -0.4))).unwrap();
        let rho = from_real_diag(&[0.8, 0.2]);
        let got = unvec_matrix(&unitary_superop(&u).apply(&vec_matrix(&rho))).unwrap();
        assert!(max_abs_diff(&got, &u.dot(&rho).dot(&dagger(&u))) < 1e-14);
    }
}
