//! Compressed sparse row storage for superoperators. Liouvillians of local
//! controls are mostly zero, which the series propagators exploit.

use super::{ComplexMatrix, C64, ZERO};

#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    pub rows: usize,
    pub cols: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<C64>,
}

impl CsrMatrix {
    pub fn from_dense(a: &ComplexMatrix) -> Self {
        Self::from_dense_on_pattern(a, &Pattern::of(&[a]))
    }

    /// Gathers the entries of `a` on a given pattern (entries of `a` off the
    /// pattern are dropped).
    pub fn from_dense_on_pattern(a: &ComplexMatrix, p: &Pattern) -> Self {
        let values = p.gather(a);
        CsrMatrix {
            rows: p.rows,
            cols: p.cols,
            row_ptr: p.row_ptr.clone(),
            col_idx: p.col_idx.clone(),
            values,
        }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros((self.rows, self.cols));
        for i in 0..self.rows {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                out[[i, self.col_idx[k]]] += self.values[k];
            }
        }
        out
    }

    /// y = A x
    pub fn matvec_into(&self, x: &[C64], y: &mut [C64]) {
        for i in 0..self.rows {
            let mut acc = ZERO;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            y[i] = acc;
        }
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![ZERO; self.rows];
        self.matvec_into(x, &mut y);
        y
    }

    /// y = A† x
    pub fn adjoint_matvec_into(&self, x: &[C64], y: &mut [C64]) {
        y.iter_mut().for_each(|z| *z = ZERO);
        for i in 0..self.rows {
            let xi = x[i];
            if xi == ZERO {
                continue;
            }
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                y[self.col_idx[k]] += self.values[k].conj() * xi;
            }
        }
    }

    /// ⟨a, A b⟩ = a† A b without allocating.
    pub fn sandwich(&self, a: &[C64], b: &[C64]) -> C64 {
        let mut acc = ZERO;
        for i in 0..self.rows {
            let mut row = ZERO;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                row += self.values[k] * b[self.col_idx[k]];
            }
            acc += a[i].conj() * row;
        }
        acc
    }

    pub fn norm1(&self) -> f64 {
        let mut cols = vec![0.0; self.cols];
        for (k, v) in self.values.iter().enumerate() {
            cols[self.col_idx[k]] += v.norm();
        }
        cols.into_iter().fold(0.0, f64::max)
    }

    pub fn scale(&mut self, s: C64) {
        self.values.iter_mut().for_each(|v| *v *= s);
    }
}

/// Sparsity pattern shared by a family of matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct Pattern {
    pub rows: usize,
    pub cols: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
}

impl Pattern {
    /// Union of the nonzero patterns of the given matrices.
    pub fn of(mats: &[&ComplexMatrix]) -> Self {
        let (rows, cols) = mats.first().map(|m| m.dim()).unwrap_or((0, 0));
        let mut row_ptr = Vec::with_capacity(rows + 1);
        let mut col_idx = Vec::new();
        row_ptr.push(0);
        for i in 0..rows {
            for j in 0..cols {
                if mats.iter().any(|m| m[[i, j]] != ZERO) {
                    col_idx.push(j);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Pattern { rows, cols, row_ptr, col_idx }
    }

    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    pub fn gather(&self, a: &ComplexMatrix) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.nnz());
        for i in 0..self.rows {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                out.push(a[[i, self.col_idx[k]]]);
            }
        }
        out
    }

    pub fn with_values(&self, values: Vec<C64>) -> CsrMatrix {
        assert_eq!(values.len(), self.nnz());
        CsrMatrix {
            rows: self.rows,
            cols: self.cols,
            row_ptr: self.row_ptr.clone(),
            col_idx: self.col_idx.clone(),
            values,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{c, matvec, max_abs_diff, vdot};

    fn sample() -> ComplexMatrix {
        let mut a = ComplexMatrix::zeros((3, 3));
        a[[0, 2]] = c(1.0, 2.0);
        a[[1, 1]] = c(-0.5, 0.0);
        a[[2, 0]] = c(0.0, 3.0);
        a[[2, 2]] = c(4.0, -1.0);
        a
    }

    #[test]
    fn round_trip_and_products() {
        let a = sample();
        let s = CsrMatrix::from_dense(&a);
        assert_eq!(s.nnz(), 4);
        assert_eq!(s.to_dense(), a);
        let x = vec![c(1.0, 1.0), c(0.0, -2.0), c(0.5, 0.0)];
        let y = s.matvec(&x);
        let yd = matvec(&a, &x);
        assert!(y.iter().zip(&yd).all(|(p, q)| (p - q).norm() < 1e-15));
        let mut ya = vec![ZERO; 3];
        s.adjoint_matvec_into(&x, &mut ya);
        let ad = crate::numerics::dagger(&a);
        let yad = matvec(&ad, &x);
        assert!(ya.iter().zip(&yad).all(|(p, q)| (p - q).norm() < 1e-15));
        assert!((s.sandwich(&x, &x) - vdot(&x, &yd)).norm() < 1e-14);
        assert_eq!(s.norm1(), crate::numerics::norm1(&a));
    }

    #[test]
    fn union_pattern() {
        let a = sample();
        let b = crate::numerics::identity(3);
        let p = Pattern::of(&[&a, &b]);
        assert_eq!(p.nnz(), 5);
        let sb = CsrMatrix::from_dense_on_pattern(&b, &p);
        assert!(max_abs_diff(&sb.to_dense(), &b) < 1e-15);
    }
}
