use super::{ComplexMatrix, C64};
use crate::error::{Error, Result};

/// Solves `a · x = b` by LU with partial pivoting; `b` is overwritten with `x`.
pub fn solve_in_place(mut a: ComplexMatrix, b: &mut ComplexMatrix) -> Result<()> {
    let n = a.nrows();
    if a.ncols() != n || b.nrows() != n {
        return Err(Error::dim("LU solve shapes"));
    }
    let scale = a.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    for k in 0..n {
        let mut p = k;
        let mut best = a[[k, k]].norm();
        for i in k + 1..n {
            let v = a[[i, k]].norm();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best <= scale * 1e-300 {
            return Err(Error::Numeric("singular matrix in LU solve".into()));
        }
        if p != k {
            for j in 0..n {
                a.swap([k, j], [p, j]);
            }
            for j in 0..b.ncols() {
                b.swap([k, j], [p, j]);
            }
        }
        let pivot = a[[k, k]];
        let inv = C64::new(1.0, 0.0) / pivot;
        let (top, mut bottom) = a.view_mut().split_at(ndarray::Axis(0), k + 1);
        let krow = top.row(k);
        let (btop, mut bbottom) = b.view_mut().split_at(ndarray::Axis(0), k + 1);
        let bk = btop.row(k);
        for (mut row, mut brow) in bottom.rows_mut().into_iter().zip(bbottom.rows_mut()) {
            let f = row[k] * inv;
            if f == C64::new(0.0, 0.0) {
                continue;
            }
            row[k] = f;
            for j in k + 1..n {
                row[j] -= f * krow[j];
            }
            brow.scaled_add(-f, &bk);
        }
    }
    // back substitution
    for k in (0..n).rev() {
        let inv = C64::new(1.0, 0.0) / a[[k, k]];
        let mut row = b.row(k).to_owned();
        for j in k + 1..n {
            let f = a[[k, j]];
            if f != C64::new(0.0, 0.0) {
                row.scaled_add(-f, &b.row(j));
            }
        }
        row.mapv_inplace(|z| z * inv);
        b.row_mut(k).assign(&row);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{c, max_abs_diff};
    use ndarray::array;

    #[test]
    fn solves_small_system() {
        let a = array![[c(0.0, 1.0), c(2.0, 0.0)], [c(1.0, 0.0), c(1.0, -1.0)]];
        let x = array![[c(1.0, 2.0)], [c(-0.5, 0.0)]];
        let mut b = a.dot(&x);
        solve_in_place(a, &mut b).unwrap();
        assert!(max_abs_diff(&b, &x) < 1e-14);
    }

    #[test]
    fn singular_is_reported() {
        let a = array![[c(1.0, 0.0), c(2.0, 0.0)], [c(2.0, 0.0), c(4.0, 0.0)]];
        let mut b = array![[c(1.0, 0.0)], [c(1.0, 0.0)]];
        assert!(solve_in_place(a, &mut b).is_err());
    }
}
