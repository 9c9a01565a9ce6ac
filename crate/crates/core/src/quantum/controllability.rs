use crate::models::ControlSystem;
use crate::numerics::{self, commutator, identity, ComplexMatrix, C64};
use crate::tolerances;

/// Real inner product Re tr(A†B) on skew-Hermitian matrices.
fn real_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.re * y.re + x.im * y.im).sum()
}

fn traceless(mut a: ComplexMatrix) -> ComplexMatrix {
    let n = a.nrows();
    let t = numerics::trace(&a) / n as f64;
    a.scaled_add(-t, &identity(n));
    a
}

/// Orthogonalizes `x` against `basis` (two passes) and returns it normalized
/// if it carries a new direction.
fn reduce(basis: &[ComplexMatrix], x: ComplexMatrix) -> Option<ComplexMatrix> {
    let start = numerics::frobenius_norm(&x);
    if start == 0.0 {
        return None;
    }
    let mut x = x.mapv(|z| z / start);
    for _ in 0..2 {
        for b in basis {
            let p = real_inner(b, &x);
            x.scaled_add(C64::new(-p, 0.0), b);
        }
    }
    let rest = numerics::frobenius_norm(&x);
    (rest > tolerances::LIE_RANK).then(|| x.mapv(|z| z / rest))
}

/// Dimension of the traceless part of the real Lie algebra generated by
/// {iH}, for the given Hermitian generators.
pub fn lie_closure_dimension(hamiltonians: &[ComplexMatrix]) -> usize {
    let Some(first) = hamiltonians.first() else { return 0 };
    let n = first.nrows();
    let full = n * n - 1;
    let gens: Vec<ComplexMatrix> = hamiltonians
        .iter()
        .map(|h| traceless(h.mapv(|z| z * C64::new(0.0, 1.0))))
        .collect();
    let mut basis: Vec<ComplexMatrix> = Vec::new();
    for g in &gens {
        if let Some(b) = reduce(&basis, g.clone()) {
            basis.push(b);
        }
    }
    let gens: Vec<ComplexMatrix> = gens.into_iter().filter(|g| numerics::frobenius_norm(g) > 0.0).collect();
    let mut frontier: Vec<usize> = (0..basis.len()).collect();
    let mut rounds = 0;
    while !frontier.is_empty() && basis.len() < full && rounds < 2 * n * n {
        rounds += 1;
        let mut next = Vec::new();
        for &k in &frontier {
            for g in &gens {
                let c = commutator(g, &basis[k]);
                if let Some(b) = reduce(&basis, c) {
                    basis.push(b);
                    next.push(basis.len() - 1);
                    if basis.len() == full {
                        return full;
                    }
                }
            }
        }
        frontier = next;
    }
    basis.len()
}

/// True iff {iH₀, iH_j} generate su(N).
pub fn hamiltonian_controllability(system: &ControlSystem) -> bool {
    let mut hs = vec![system.drift.clone()];
    hs.extend(system.controls.iter().map(|c| c.operator.clone()));
    let n = system.dim();
    lie_closure_dimension(&hs) == n * n - 1
}
