use crate::error::{Error, Result};
use crate::DensityOperator;

fn check(n: usize) -> Result<usize> {
    if n == 0 || n > 12 {
        return Err(Error::domain(format!("qubit count {n} outside 1..=12")));
    }
    Ok(1 << n)
}

/// Unnormalized diagonal b^{N/2}, b^{N/2−1}, b^{N/2−1}, …, b¹, b¹, b⁰.
fn alg_weights(dim: usize, b: f64) -> Vec<f64> {
    let half = dim / 2;
    let mut w = vec![b.powi(half as i32)];
    for k in (1..half).rev() {
        w.push(b.powi(k as i32));
        w.push(b.powi(k as i32));
    }
    w.push(1.0);
    w
}

/// Z = 1 + 2(b − b^{N/2})/(1 − b) + b^{N/2}, with the b → 1 limit N.
pub fn alg_partition(n: usize, b: f64) -> Result<f64> {
    let dim = check(n)?;
    Ok(alg_weights(dim, b).iter().sum())
}

/// Diagonal state reached by sorting-and-splitting rounds against a bath with
/// Boltzmann factor b ≥ 1.
pub fn algorithmic_cooling_state(n: usize, b: f64) -> Result<DensityOperator> {
    let dim = check(n)?;
    if !(b >= 1.0) || !b.is_finite() {
        return Err(Error::domain(format!("Boltzmann factor {b} must be finite and >= 1")));
    }
    let w = alg_weights(dim, b);
    let z: f64 = w.iter().sum();
    let p: Vec<f64> = w.iter().map(|v| v / z).collect();
    DensityOperator::from_diagonal(&p, vec![2; n])
}

/// diag(1, x, …, x)/Z with x = (Z − 1)/(N − 1), Z the partition function of
/// the algorithmic-cooling state.
pub fn test2_target(n: usize, b: f64) -> Result<DensityOperator> {
    let dim = check(n)?;
    if !(b > 1.0) || !b.is_finite() {
        return Err(Error::domain(format!("Boltzmann factor {b} must be finite and > 1")));
    }
    let z: f64 = alg_weights(dim, b).iter().sum();
    let x = (z - 1.0) / (dim as f64 - 1.0);
    let mut p = vec![x / z; dim];
    p[0] = 1.0 / z;
    DensityOperator::from_diagonal(&p, vec![2; n])
}
