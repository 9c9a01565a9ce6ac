use ndarray::s;

use super::{ensure_finite, ensure_square, identity, norm1, solve_in_place, ComplexMatrix, C64};
use crate::error::{Error, Result};

/// Degree of the diagonal Padé approximant.
pub const PADE_ORDER: usize = 13;
/// Largest 1-norm for which the degree-13 approximant is used without scaling.
pub const THETA_13: f64 = 5.371920351148152;

const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// e^A by scaling and squaring with a degree-13 Padé approximant.
pub fn matrix_exponential(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = ensure_square(a, "exponent")?;
    ensure_finite(a, "exponent")?;
    if n == 0 {
        return Ok(a.clone());
    }
    let norm = norm1(a);
    if norm == 0.0 {
        return Ok(identity(n));
    }
    let squarings = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let scale = C64::new(0.5f64.powi(squarings), 0.0);
    let a = a.mapv(|z| z * scale);
    let mut r = pade13(&a)?;
    for _ in 0..squarings {
        r = r.dot(&r);
    }
    ensure_finite(&r, "matrix exponential")?;
    Ok(r)
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn pade13(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.nrows();
    let id = identity(n);
    let a2 = a.dot(a);
    let a4 = a2.dot(&a2);
    let a6 = a4.dot(&a2);
    let b = |k: usize| real(B13[k]);
    let inner_u = &a6 * b(13) + &a4 * b(11) + &a2 * b(9);
    let u_poly = a6.dot(&inner_u) + &a6 * b(7) + &a4 * b(5) + &a2 * b(3) + &id * b(1);
    let u = a.dot(&u_poly);
    let inner_v = &a6 * b(12) + &a4 * b(10) + &a2 * b(8);
    let v = a6.dot(&inner_v) + &a6 * b(6) + &a4 * b(4) + &a2 * b(2) + &id * b(0);
    let q = &v - &u;
    let mut p = &v + &u;
    solve_in_place(q, &mut p)?;
    Ok(p)
}

/// Returns X = e^{−dt·L} and its derivative along the direction D, read off
/// the top-right block of exp([[−dt·L, −dt·D], [0, −dt·L]]).
pub fn exp_action_with_derivative(
    l: &ComplexMatrix,
    d: &ComplexMatrix,
    dt: f64,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let n = ensure_square(l, "generator")?;
    if d.dim() != l.dim() {
        return Err(Error::dim(format!("direction {:?} vs generator {:?}", d.dim(), l.dim())));
    }
    if !(dt >= 0.0) {
        return Err(Error::domain(format!("slice duration {dt} must be non-negative")));
    }
    let mut block = ComplexMatrix::zeros((2 * n, 2 * n));
    let f = real(-dt);
    block.slice_mut(s![..n, ..n]).assign(&l.mapv(|z| z * f));
    block.slice_mut(s![n.., n..]).assign(&l.mapv(|z| z * f));
    block.slice_mut(s![..n, n..]).assign(&d.mapv(|z| z * f));
    let e = matrix_exponential(&block)?;
    Ok((e.slice(s![..n, ..n]).to_owned(), e.slice(s![..n, n..]).to_owned()))
}
