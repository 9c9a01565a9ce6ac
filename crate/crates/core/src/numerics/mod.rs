//! Dense complex-matrix kernel. Every raw matrix algorithm in the crate lives
//! here: exponentials, eigensystems, Kronecker products, norms, and the sparse
//! series propagators used by the optimizer.

mod eigen;
mod expm;
mod lu;
pub mod series;
pub mod sparse;

use ndarray::{Array2, Axis};
pub use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub use eigen::hermitian_eigensystem;
pub use expm::{exp_action_with_derivative, matrix_exponential, PADE_ORDER, THETA_13};
pub use lu::solve_in_place;
pub use sparse::CsrMatrix;

/// Dense complex matrix, row-major.
pub type ComplexMatrix = Array2<C64>;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(n: usize) -> ComplexMatrix {
    Array2::from_diag_elem(n, ONE)
}

pub fn zeros(n: usize) -> ComplexMatrix {
    Array2::zeros((n, n))
}

pub fn from_real_diag(d: &[f64]) -> ComplexMatrix {
    let mut m = zeros(d.len());
    for (i, &x) in d.iter().enumerate() {
        m[[i, i]] = C64::new(x, 0.0);
    }
    m
}

/// Builds a matrix from row-major real entries.
pub fn from_real_rows(rows: usize, cols: usize, data: &[f64]) -> ComplexMatrix {
    assert_eq!(rows * cols, data.len());
    Array2::from_shape_fn((rows, cols), |(i, j)| C64::new(data[i * cols + j], 0.0))
}

pub fn is_square(a: &ComplexMatrix) -> bool {
    a.nrows() == a.ncols()
}

pub fn ensure_square(a: &ComplexMatrix, what: &str) -> Result<usize> {
    if !is_square(a) {
        return Err(Error::dim(format!("{what} is {}x{}, expected square", a.nrows(), a.ncols())));
    }
    Ok(a.nrows())
}

pub fn ensure_finite(a: &ComplexMatrix, what: &str) -> Result<()> {
    if a.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::Numeric(format!("{what} has non-finite entries")))
    }
}

pub fn dagger(a: &ComplexMatrix) -> ComplexMatrix {
    a.t().mapv(|z| z.conj())
}

pub fn transpose(a: &ComplexMatrix) -> ComplexMatrix {
    a.t().to_owned()
}

pub fn conj(a: &ComplexMatrix) -> ComplexMatrix {
    a.mapv(|z| z.conj())
}

pub fn trace(a: &ComplexMatrix) -> C64 {
    a.diag().iter().sum()
}

pub fn frobenius_norm(a: &ComplexMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Maximum absolute column sum.
pub fn norm1(a: &ComplexMatrix) -> f64 {
    a.axis_iter(Axis(1))
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Largest entry of |A − A†|.
pub fn hermiticity_defect(a: &ComplexMatrix) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[[i, j]] - a[[j, i]].conj()).norm());
        }
    }
    worst
}

pub fn ensure_hermitian(a: &ComplexMatrix, tol: f64) -> Result<()> {
    ensure_square(a, "operator")?;
    let d = hermiticity_defect(a);
    if d > tol {
        return Err(Error::NotHermitian(d));
    }
    Ok(())
}

pub fn kronecker(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            let s = a[[i, j]];
            if s == ZERO {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[[i * br + k, j * bc + l]] = s * b[[k, l]];
                }
            }
        }
    }
    out
}

/// Kronecker product of a list of matrices, leftmost factor first.
pub fn kronecker_all(factors: &[ComplexMatrix]) -> ComplexMatrix {
    let mut out = identity(1);
    for f in factors {
        out = kronecker(&out, f);
    }
    out
}

/// Commutator AB − BA.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.dot(b) - b.dot(a)
}

/// Frobenius inner product tr(A† B).
pub fn inner(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn vdot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn vnorm(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn matvec(a: &ComplexMatrix, x: &[C64]) -> Vec<C64> {
    a.rows()
        .into_iter()
        .map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum())
        .collect()
}

/// Pauli matrices and friends.
pub mod pauli {
    use super::*;

    pub fn x() -> ComplexMatrix {
        from_real_rows(2, 2, &[0.0, 1.0, 1.0, 0.0])
    }
    pub fn y() -> ComplexMatrix {
        let mut m = zeros(2);
        m[[0, 1]] = c(0.0, -1.0);
        m[[1, 0]] = c(0.0, 1.0);
        m
    }
    pub fn z() -> ComplexMatrix {
        from_real_diag(&[1.0, -1.0])
    }
    /// |0⟩⟨1|
    pub fn lowering() -> ComplexMatrix {
        from_real_rows(2, 2, &[0.0, 1.0, 0.0, 0.0])
    }
    /// |1⟩⟨0|
    pub fn raising() -> ComplexMatrix {
        from_real_rows(2, 2, &[0.0, 0.0, 1.0, 0.0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn kron_identities() {
        assert_eq!(kronecker(&identity(2), &identity(2)), identity(4));
        let k = kronecker(&from_real_diag(&[1.0, 2.0]), &identity(2));
        assert_eq!(k, from_real_diag(&[1.0, 1.0, 2.0, 2.0]));
    }

    #[test]
    fn kron_mixed_product() {
        let a = array![[c(1.0, 0.5), c(0.0, 2.0)], [c(-1.0, 0.0), c(0.3, 0.1)]];
        let b = array![[c(0.2, 0.0), c(1.0, -1.0)], [c(0.0, 0.7), c(2.0, 0.0)]];
        let cc = array![[c(0.5, 0.5), c(1.0, 0.0)], [c(0.0, -1.0), c(0.1, 0.2)]];
        let d = array![[c(1.0, 0.0), c(0.0, 0.0)], [c(0.4, 0.4), c(-2.0, 1.0)]];
        let lhs = kronecker(&a, &b).dot(&kronecker(&cc, &d));
        let rhs = kronecker(&a.dot(&cc), &b.dot(&d));
        assert!(max_abs_diff(&lhs, &rhs) < 1e-13);
    }

    #[test]
    fn norms() {
        let a = from_real_rows(2, 2, &[1.0, -2.0, 3.0, 4.0]);
        assert_eq!(norm1(&a), 6.0);
        assert!((frobenius_norm(&a) - 30f64.sqrt()).abs() < 1e-15);
        assert_eq!(hermiticity_defect(&pauli::y()), 0.0);
    }
}
