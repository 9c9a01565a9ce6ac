//! Truncated Taylor evaluation of e^A x and of the auxiliary-block derivative
//! contracted with a costate, λ† L(A, E) x, where L(A, E) is the top-right
//! block of exp([[A, E], [0, A]]). The exponent is split into s substeps with
//! ‖A/s‖₁ ≤ 2 so every series converges without cancellation.

use super::{vdot, CsrMatrix, C64, ZERO};
use crate::tolerances;

/// Upper bound on the per-substep 1-norm.
pub const SUBSTEP_NORM: f64 = 2.0;
const MAX_TERMS: usize = 60;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Schedule {
    pub substeps: usize,
    pub terms: usize,
}

pub fn schedule(norm1: f64) -> Schedule {
    let substeps = ((norm1 / SUBSTEP_NORM).ceil() as usize).max(1);
    let eta = norm1 / substeps as f64;
    // smallest m with η^(m+1)/(m+1)! below the truncation target
    let mut term = 1.0;
    let mut m = 1;
    while m < MAX_TERMS {
        term *= eta / (m as f64 + 1.0);
        if term * (m as f64 + 2.0) <= tolerances::TAYLOR_TRUNCATION {
            break;
        }
        m += 1;
    }
    Schedule { substeps, terms: m + 1 }
}

fn inv_factorials(n: usize) -> Vec<f64> {
    let mut out = vec![1.0; n + 1];
    for k in 1..=n {
        out[k] = out[k - 1] / k as f64;
    }
    out
}

/// Applies B = A/s to `x`.
fn apply_scaled(a: &CsrMatrix, inv_s: f64, x: &[C64], y: &mut [C64]) {
    a.matvec_into(x, y);
    y.iter_mut().for_each(|z| *z *= inv_s);
}

fn apply_scaled_adjoint(a: &CsrMatrix, inv_s: f64, x: &[C64], y: &mut [C64]) {
    a.adjoint_matvec_into(x, y);
    y.iter_mut().for_each(|z| *z *= inv_s);
}

fn taylor_step(a: &CsrMatrix, inv_s: f64, terms: usize, x: &[C64], adjoint: bool) -> Vec<C64> {
    let mut acc = x.to_vec();
    let mut cur = x.to_vec();
    let mut next = vec![ZERO; x.len()];
    for k in 1..terms {
        if adjoint {
            apply_scaled_adjoint(a, inv_s, &cur, &mut next);
        } else {
            apply_scaled(a, inv_s, &cur, &mut next);
        }
        let f = 1.0 / k as f64;
        next.iter_mut().for_each(|z| *z *= f);
        std::mem::swap(&mut cur, &mut next);
        acc.iter_mut().zip(&cur).for_each(|(s, t)| *s += t);
    }
    acc
}

/// e^A x
pub fn exp_action(a: &CsrMatrix, x: &[C64]) -> Vec<C64> {
    let sch = schedule(a.norm1());
    let inv_s = 1.0 / sch.substeps as f64;
    let mut y = x.to_vec();
    for _ in 0..sch.substeps {
        y = taylor_step(a, inv_s, sch.terms, &y, false);
    }
    y
}

/// e^{A†} x
pub fn exp_adjoint_action(a: &CsrMatrix, x: &[C64]) -> Vec<C64> {
    let sch = schedule(a.norm1());
    let inv_s = 1.0 / sch.substeps as f64;
    let mut y = x.to_vec();
    for _ in 0..sch.substeps {
        y = taylor_step(a, inv_s, sch.terms, &y, true);
    }
    y
}

#[derive(Clone, Debug)]
pub struct AdjointSlice {
    /// e^{A†} λ
    pub costate: Vec<C64>,
    /// λ† L(A, E_d) x for every direction E_d
    pub derivatives: Vec<C64>,
}

/// Propagates the costate λ backwards through e^A and contracts the
/// directional derivatives of e^A along each `dirs[d]` between λ and x.
pub fn adjoint_directional(a: &CsrMatrix, x: &[C64], lambda: &[C64], dirs: &[&CsrMatrix]) -> AdjointSlice {
    let n = x.len();
    let sch = schedule(a.norm1());
    let s = sch.substeps;
    let m = sch.terms;
    let inv_s = 1.0 / s as f64;
    let fact = inv_factorials(2 * m + 1);

    let mut forward = Vec::with_capacity(s);
    let mut y = x.to_vec();
    for r in 0..s {
        forward.push(y.clone());
        if r + 1 < s {
            y = taylor_step(a, inv_s, m, &y, false);
        }
    }

    let mut derivatives = vec![ZERO; dirs.len()];
    let mut mu = lambda.to_vec();
    let mut powers_a: Vec<Vec<C64>> = vec![vec![ZERO; n]; m];
    let mut powers_b: Vec<Vec<C64>> = vec![vec![ZERO; n]; m];
    let mut w: Vec<Vec<C64>> = vec![vec![ZERO; n]; m];
    for r in (0..s).rev() {
        powers_a[0].copy_from_slice(&mu);
        powers_b[0].copy_from_slice(&forward[r]);
        for i in 1..m {
            let (lo, hi) = powers_a.split_at_mut(i);
            apply_scaled_adjoint(a, inv_s, &lo[i - 1], &mut hi[0]);
            let (lo, hi) = powers_b.split_at_mut(i);
            apply_scaled(a, inv_s, &lo[i - 1], &mut hi[0]);
        }
        // w_j = Σ_i a_i / (i+j+1)!, so Σ_{i,j} ⟨a_i, E b_j⟩/(i+j+1)! = Σ_j ⟨w_j, E b_j⟩
        for j in 0..m {
            let wj = &mut w[j];
            wj.iter_mut().for_each(|z| *z = ZERO);
            for (i, ai) in powers_a.iter().enumerate().take(m - j) {
                let f = fact[i + j + 1];
                wj.iter_mut().zip(ai).for_each(|(p, q)| *p += q * f);
            }
        }
        for (d, e) in dirs.iter().enumerate() {
            let mut acc = ZERO;
            for j in 0..m {
                acc += e.sandwich(&w[j], &powers_b[j]);
            }
            derivatives[d] += acc * inv_s;
        }
        mu.iter_mut().for_each(|z| *z = ZERO);
        for (i, ai) in powers_a.iter().enumerate() {
            let f = fact[i];
            mu.iter_mut().zip(ai).for_each(|(p, q)| *p += q * f);
        }
    }
    AdjointSlice { costate: mu, derivatives }
}

/// λ† e^A x, used by tests to cross-check the costate.
pub fn bilinear(a: &CsrMatrix, lambda: &[C64], x: &[C64]) -> C64 {
    vdot(lambda, &exp_action(a, x))
}
