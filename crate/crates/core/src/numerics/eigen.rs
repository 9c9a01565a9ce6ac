use nalgebra::{DMatrix, SymmetricEigen};

use super::{ensure_hermitian, ComplexMatrix, C64};
use crate::error::Result;
use crate::tolerances;

/// Eigen-decomposition of a Hermitian matrix. Values are sorted descending
/// (stable in the solver's index order for ties); column k of the returned
/// matrix is the eigenvector for value k.
pub fn hermitian_eigensystem(a: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    ensure_hermitian(a, tolerances::HERMITIAN)?;
    let n = a.nrows();
    if n == 0 {
        return Ok((vec![], a.clone()));
    }
    // symmetrize so the solver sees an exactly Hermitian input
    let m = DMatrix::<C64>::from_fn(n, n, |i, j| (a[[i, j]] + a[[j, i]].conj()) * 0.5);
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_shape_fn((n, n), |(i, j)| eig.eigenvectors[(i, order[j])]);
    Ok((values, vectors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{c, dagger, from_real_diag, frobenius_norm, identity, max_abs_diff};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_and_diag() {
        let (v, _) = hermitian_eigensystem(&identity(8)).unwrap();
        assert!(v.iter().all(|x| (x - 1.0).abs() < 1e-14));
        let (v, vecs) = hermitian_eigensystem(&from_real_diag(&[3.0, 1.0, 2.0])).unwrap();
        assert!((v[0] - 3.0).abs() < 1e-14 && (v[1] - 2.0).abs() < 1e-14 && (v[2] - 1.0).abs() < 1e-14);
        assert!((vecs[[2, 1]].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = ComplexMatrix::from_shape_fn((8, 8), |_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let a = &g + &dagger(&g);
        let (vals, v) = hermitian_eigensystem(&a).unwrap();
        assert!(vals.windows(2).all(|w| w[0] >= w[1]));
        let rec = v.dot(&from_real_diag(&vals)).dot(&dagger(&v));
        assert!(frobenius_norm(&(rec - &a)) < 1e-10);
        assert!(max_abs_diff(&dagger(&v).dot(&v), &identity(8)) < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut a = identity(2);
        a[[0, 1]] = c(1.0, 0.0);
        assert!(hermitian_eigensystem(&a).is_err());
    }
}
