//! Seeded random states for transfer benchmarks.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::numerics::{self, ComplexMatrix, C64};
use crate::protocols::TTransform;
use crate::quantum::{spectrum_descending, DensityOperator};

fn ginibre(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    ComplexMatrix::from_shape_fn((n, n), |_| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im)
    })
}

fn check_dims(dims: &[usize]) -> Result<usize> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::dim(format!("invalid dims {dims:?}")));
    }
    Ok(dims.iter().product())
}

/// Full-rank state GG†/tr(GG†) from a complex Ginibre matrix G.
pub fn random_density(dims: &[usize], rng: &mut ChaCha8Rng) -> Result<DensityOperator> {
    let n = check_dims(dims)?;
    let g = ginibre(n, rng);
    let w = g.dot(&numerics::dagger(&g));
    let tr = numerics::trace(&w).re;
    let mut m = w.mapv(|z| z / tr);
    // exact Hermiticity after rounding
    m = (&m + &numerics::dagger(&m)).mapv(|z| z * 0.5);
    DensityOperator::new(m, dims.to_vec())
}

/// Haar unitary: Gram-Schmidt columns of a Ginibre matrix.
pub fn random_unitary(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let mut q = ginibre(n, rng);
    for j in 0..n {
        for _ in 0..2 {
            for i in 0..j {
                let proj: C64 = (0..n).map(|r| q[[r, i]].conj() * q[[r, j]]).sum();
                for r in 0..n {
                    let v = q[[r, i]];
                    q[[r, j]] -= proj * v;
                }
            }
        }
        let norm = (0..n).map(|r| q[[r, j]].norm_sqr()).sum::<f64>().sqrt();
        for r in 0..n {
            q[[r, j]] /= norm;
        }
    }
    q
}

/// A random state ρ₀ and a target whose spectrum is obtained from that of ρ₀
/// by `transforms` random T-transforms, in an independent random eigenbasis.
pub fn random_majorized_pair(
    dims: &[usize],
    transforms: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(DensityOperator, DensityOperator)> {
    let n = check_dims(dims)?;
    let rho0 = random_density(dims, rng)?;
    let mut p = spectrum_descending(&rho0)?;
    if n > 1 {
        for _ in 0..transforms {
            let i = rng.random_range(0..n);
            let j = (i + rng.random_range(1..n)) % n;
            TTransform::new(i, j, rng.random_range(0.0..=1.0))?.apply(&mut p);
        }
    }
    let u = random_unitary(n, rng);
    let m = u.dot(&numerics::from_real_diag(&p)).dot(&numerics::dagger(&u));
    let m = (&m + &numerics::dagger(&m)).mapv(|z| z * 0.5);
    Ok((rho0, DensityOperator::new(m, dims.to_vec())?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{identity, max_abs_diff};
    use crate::protocols::majorizes;
    use rand::SeedableRng;

    #[test]
    fn random_states_are_valid_and_seeded() {
        let mut a = ChaCha8Rng::seed_from_u64(5);
        let mut b = ChaCha8Rng::seed_from_u64(5);
        let r = random_density(&[2, 3], &mut a).unwrap();
        assert_eq!(r, random_density(&[2, 3], &mut b).unwrap());
        assert!(spectrum_descending(&r).unwrap().iter().all(|&p| p > 0.0));
    }

    #[test]
    fn unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = random_unitary(8, &mut rng);
        assert!(max_abs_diff(&numerics::dagger(&u).dot(&u), &identity(8)) < 1e-12);
    }

    #[test]
    fn pairs_are_majorized() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let (r, t) = random_majorized_pair(&[2, 2, 2], 6, &mut rng).unwrap();
            let (y, x) = (spectrum_descending(&r).unwrap(), spectrum_descending(&t).unwrap());
            assert!(majorizes(&x, &y).unwrap());
        }
    }
}
