use serde::{Deserialize, Serialize};

use super::majorization::{hlp_chain, majorizes};
use super::plan::{permutation_unitary, protect_unitary, qubit_permutation, PlanStep, ProtocolPlan};
use super::switching::t_transform_noise_duration;
use crate::error::{Error, Result};
use crate::models::ControlSystem;
use crate::numerics::{self, hermitian_eigensystem, pauli, ComplexMatrix};
use crate::propagation::TrotterMode;
use crate::quantum::{embed_local, vec_matrix};
use crate::DensityOperator;

/// Settings shared by the majorization-based plans.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlanOptions {
    /// Noise rate while switched on; the channel maximum when unset.
    pub rate: Option<f64>,
    /// γτ spent on a step that completes only asymptotically.
    pub budget: f64,
    pub trotter_k: usize,
    pub trotter_mode: TrotterMode,
    /// Target δ_F of the greedy plan.
    pub tolerance: f64,
}

impl Default for PlanOptions {
    fn default() -> Self {
        PlanOptions { rate: None, budget: 20.0, trotter_k: 512, trotter_mode: TrotterMode::Symmetric, tolerance: 1e-4 }
    }
}

/// One noise interval averaging the given population pairs (by label)
/// with ε = e^{−γt}; all other blocks are protected.
#[derive(Clone, Debug)]
struct Round {
    pairs: Vec<(usize, usize)>,
    gamma_t: f64,
}

fn check_bit_flip_system(system: &ControlSystem) -> Result<f64> {
    let n = system.dims.len();
    if system.dims.iter().any(|&d| d != 2) || system.noise_site != n - 1 {
        return Err(Error::domain("plan needs a qubit register with the noise on the last qubit"));
    }
    let ch = system.channels.first().ok_or_else(|| Error::domain("system has no switchable channel"))?;
    let g = ch.dissipator();
    let id = vec_matrix(&numerics::identity(system.dim()));
    let unital = g.apply(&id).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if unital > 1e-12 || ch.jumps.len() != 1 {
        return Err(Error::domain("plan needs a bit-flip (unital) channel"));
    }
    Ok(ch.max_rate)
}

fn rate_of(opts: &PlanOptions, max_rate: f64) -> Result<f64> {
    let r = opts.rate.unwrap_or(max_rate);
    if !(r > 0.0 && r <= max_rate) {
        return Err(Error::Bound(format!("plan rate {r} outside (0, {max_rate}]")));
    }
    if !(opts.budget > 0.0) || opts.trotter_k == 0 {
        return Err(Error::domain("budget must be positive and trotter_k at least 1"));
    }
    Ok(r)
}

fn spectral(rho: &DensityOperator) -> Result<(Vec<f64>, ComplexMatrix)> {
    rho.validate()?;
    hermitian_eigensystem(&rho.matrix)
}

fn pair_after(a: f64, b: f64, eps: f64) -> (f64, f64) {
    let (m, h) = (0.5 * (a + b), 0.5 * (a - b) * eps);
    (m + h, m - h)
}

/// Turns a list of rounds into plan steps. Population labels are the basis
/// indices right after diagonalizing ρ₀; `layout[label]` tracks where each
/// label currently sits.
fn assemble(
    name: &str,
    system: &ControlSystem,
    y: &[f64],
    vy: &ComplexMatrix,
    x: &[f64],
    vx: &ComplexMatrix,
    rounds: &[Round],
    rate: f64,
    opts: &PlanOptions,
) -> Result<ProtocolPlan> {
    let n = y.len();
    let mut steps = vec![PlanStep::unitary("diagonalize", &numerics::dagger(vy), 0.0)];
    let mut pops = y.to_vec();
    let mut layout: Vec<usize> = (0..n).collect();
    for round in rounds {
        let mut target = vec![usize::MAX; n];
        for (q, &(a, b)) in round.pairs.iter().enumerate() {
            target[a] = 2 * q;
            target[b] = 2 * q + 1;
        }
        let mut next = 2 * round.pairs.len();
        for label in 0..n {
            if target[label] == usize::MAX {
                target[label] = next;
                next += 1;
            }
        }
        let mut perm = vec![0; n];
        for label in 0..n {
            perm[layout[label]] = target[label];
        }
        layout = target;
        let protect = protect_unitary(n, round.pairs.len());
        let duration = round.gamma_t / rate;
        steps.push(PlanStep::unitary("permute", &permutation_unitary(&perm)?, 0.0));
        steps.push(PlanStep::unitary("protect", &protect, 0.0));
        steps.push(PlanStep::TrotterDecouple {
            channel: 0,
            rate,
            duration,
            k: opts.trotter_k,
            mode: opts.trotter_mode,
        });
        steps.push(PlanStep::unitary("unprotect", &numerics::dagger(&protect), 0.0));
        let eps = (-round.gamma_t).exp();
        for &(a, b) in &round.pairs {
            let (pa, pb) = pair_after(pops[a], pops[b], eps);
            pops[a] = pa;
            pops[b] = pb;
        }
    }
    // largest remaining population goes to the target's leading eigenvector
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| pops[b].total_cmp(&pops[a]));
    let mut perm = vec![0; n];
    for (rank, &label) in order.iter().enumerate() {
        perm[layout[label]] = rank;
    }
    steps.push(PlanStep::unitary("sort", &permutation_unitary(&perm)?, 0.0));
    steps.push(PlanStep::unitary("target_basis", vx, 0.0));
    let err: f64 = order.iter().zip(x).map(|(&l, xi)| (pops[l] - xi).powi(2)).sum::<f64>().sqrt();
    Ok(ProtocolPlan { name: name.into(), dims: system.dims.clone(), steps, predicted_error: err })
}

/// HLP scheme with bit-flip noise on the terminal qubit: one T-transform per
/// noise interval, the other population pairs protected by U₁₂ and the
/// coupling Hamiltonian decoupled by alternation.
pub fn hlp_full_plan(
    rho0: &DensityOperator,
    target: &DensityOperator,
    system: &ControlSystem,
    opts: &PlanOptions,
) -> Result<ProtocolPlan> {
    let max_rate = check_bit_flip_system(system)?;
    let rate = rate_of(opts, max_rate)?;
    let (y, vy) = spectral(rho0)?;
    let (x, vx) = spectral(target)?;
    let rounds = hlp_rounds(&y, &x, rate, opts.budget)?;
    assemble("hlp", system, &y, &vy, &x, &vx, &rounds, rate, opts)
}

fn hlp_rounds(y: &[f64], x: &[f64], rate: f64, budget: f64) -> Result<Vec<Round>> {
    let chain = hlp_chain(y, x)?;
    // labels of the ideal (untruncated) vector in descending order
    let mut ideal = y.to_vec();
    let mut order: Vec<usize> = (0..y.len()).collect();
    let mut rounds = Vec::with_capacity(chain.len());
    for step in &chain {
        let t = step.transform;
        let (a, b) = (order[t.i], order[t.j]);
        let gamma_t = t_transform_noise_duration(t.lambda, rate)?.truncated(rate, budget) * rate;
        rounds.push(Round { pairs: vec![(a, b)], gamma_t });
        let (va, vb) = (ideal[a], ideal[b]);
        ideal[a] = (1.0 - t.lambda) * va + t.lambda * vb;
        ideal[b] = (1.0 - t.lambda) * vb + t.lambda * va;
        order.sort_by(|&p, &q| ideal[q].total_cmp(&ideal[p]));
    }
    Ok(rounds)
}

fn sorted_error2(pops: &[f64], x: &[f64]) -> f64 {
    let mut s = pops.to_vec();
    s.sort_by(|a, b| b.total_cmp(a));
    s.iter().zip(x).map(|(a, b)| (a - b).powi(2)).sum()
}

/// λ ∈ [0, ½] minimizing the sorted error when only the pair (a, b) moves.
fn best_lambda(pops: &[f64], x: &[f64], a: usize, b: usize) -> (f64, f64) {
    let mut work = pops.to_vec();
    let mut eval = |lam: f64| {
        let (pa, pb) = (pops[a], pops[b]);
        work[a] = (1.0 - lam) * pa + lam * pb;
        work[b] = (1.0 - lam) * pb + lam * pa;
        sorted_error2(&work, x)
    };
    const GRID: usize = 400;
    let (mut best, mut best_e) = (0.0, eval(0.0));
    for s in 1..=GRID {
        let lam = 0.5 * s as f64 / GRID as f64;
        let e = eval(lam);
        if e < best_e - 1e-18 {
            best = lam;
            best_e = e;
        }
    }
    // golden-section refinement around the grid minimum
    let h = 0.5 / GRID as f64;
    let (mut lo, mut hi) = ((best - h).max(0.0), (best + h).min(0.5));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..60 {
        let (m1, m2) = (hi - g * (hi - lo), lo + g * (hi - lo));
        if eval(m1) <= eval(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let lam = 0.5 * (lo + hi);
    let e = eval(lam);
    if e < best_e {
        (lam, e)
    } else {
        (best, best_e)
    }
}

/// Greedy pairwise averaging. Each round either averages a set of disjoint
/// pairs together (all protected blocks but theirs, one shared noise
/// interval sized so the residual meets the tolerance) or applies the single
/// partial T-transform with the best error reduction per unit noise time.
/// Falls back to the HLP plan when that needs less noise time or the greedy
/// search stalls above the tolerance.
pub fn greedy_equalize_plan(
    rho0: &DensityOperator,
    target: &DensityOperator,
    system: &ControlSystem,
    opts: &PlanOptions,
) -> Result<ProtocolPlan> {
    let max_rate = check_bit_flip_system(system)?;
    let rate = rate_of(opts, max_rate)?;
    let (y, vy) = spectral(rho0)?;
    let (x, vx) = spectral(target)?;
    if !majorizes(&x, &y)? {
        return Err(Error::Infeasible("target spectrum is not majorized by the initial spectrum".into()));
    }
    let hlp = assemble("hlp", system, &y, &vy, &x, &vx, &hlp_rounds(&y, &x, rate, opts.budget)?, rate, opts)?;
    let tol2 = opts.tolerance * opts.tolerance;
    let n = y.len();
    let mut pops = y.clone();
    let mut rounds = Vec::new();
    while sorted_error2(&pops, &x) > tol2 && rounds.len() < 4 * n {
        let e0 = sorted_error2(&pops, &x);
        let mut full = Vec::new();
        let mut partial: Option<(f64, usize, usize, f64)> = None;
        for a in 0..n {
            for b in 0..n {
                if pops[a] <= pops[b] + 1e-15 {
                    continue;
                }
                let (lam, e) = best_lambda(&pops, &x, a, b);
                if e >= e0 - 1e-18 {
                    continue;
                }
                if (0.5 - lam).abs() < 1e-9 {
                    full.push((e0 - e, a, b));
                } else {
                    let t = -(1.0 - 2.0 * lam).ln();
                    let score = (e0 - e) / t;
                    if partial.is_none_or(|p| score > p.0) {
                        partial = Some((score, a, b, t));
                    }
                }
            }
        }
        // pack averaging pairs by gain into disjoint blocks
        full.sort_by(|p, q| q.0.total_cmp(&p.0).then((p.1, p.2).cmp(&(q.1, q.2))));
        let mut used = vec![false; n];
        let mut pairs = Vec::new();
        let mut trial = pops.clone();
        for &(_, a, b) in &full {
            if used[a] || used[b] || pairs.len() == n / 2 {
                continue;
            }
            let before = sorted_error2(&trial, &x);
            let (sa, sb) = (trial[a], trial[b]);
            let m = 0.5 * (sa + sb);
            trial[a] = m;
            trial[b] = m;
            if sorted_error2(&trial, &x) < before - 1e-18 {
                used[a] = true;
                used[b] = true;
                pairs.push((a, b));
            } else {
                trial[a] = sa;
                trial[b] = sb;
            }
        }
        let mut averaging = None;
        if !pairs.is_empty() {
            // residual after ε: Σ ½(a − b)²ε² on top of the fully averaged error
            let spread: f64 = pairs.iter().map(|&(a, b)| 0.5 * (pops[a] - pops[b]).powi(2)).sum();
            let floor = sorted_error2(&trial, &x);
            let room = (tol2 - floor).max(tol2 * 1e-6);
            let gamma_t = (0.5 * (spread / room).ln()).clamp(1e-3, opts.budget);
            let eps = (-gamma_t).exp();
            let mut after = pops.clone();
            for &(a, b) in &pairs {
                let (pa, pb) = pair_after(pops[a], pops[b], eps);
                after[a] = pa;
                after[b] = pb;
            }
            let score = (e0 - sorted_error2(&after, &x)) / gamma_t;
            averaging = Some((score, pairs, gamma_t, after));
        }
        match (averaging, partial) {
            (Some((s_avg, pairs, gamma_t, after)), p) if p.is_none_or(|p| s_avg >= p.0) => {
                rounds.push(Round { pairs, gamma_t });
                pops = after;
            }
            (_, Some((_, a, b, t))) => {
                let eps = (-t).exp();
                let (pa, pb) = pair_after(pops[a], pops[b], eps);
                pops[a] = pa;
                pops[b] = pb;
                rounds.push(Round { pairs: vec![(a, b)], gamma_t: t });
            }
            _ => break,
        }
    }
    let reached = sorted_error2(&pops, &x) <= tol2;
    let greedy = assemble("greedy", system, &y, &vy, &x, &vx, &rounds, rate, opts)?;
    if reached && greedy.dissipative_time() <= hlp.dissipative_time() {
        Ok(greedy)
    } else {
        Ok(ProtocolPlan { name: "greedy(hlp)".into(), ..hlp })
    }
}

/// Closed-form duration bound of the cooling protocol,
/// τ_a = C(n,2)/J + (n/γ*)·ln(√(n(n+1))/(2δ_F)).
pub fn cooling_duration_bound(n: usize, j: f64, gamma_max: f64, delta_f: f64) -> f64 {
    let nf = n as f64;
    swaps(n) as f64 / j + nf / gamma_max * ((nf * (nf + 1.0)).sqrt() / (2.0 * delta_f)).ln()
}

/// δ_F of the cooling protocol with equal per-qubit noise times, ε = e^{−γ*τ_q}.
pub fn cooling_residual(n: usize, eps: f64) -> f64 {
    let n = n as i32;
    (1.0 - 2.0 * (1.0 - eps / 2.0).powi(n) + (1.0 - eps + eps * eps / 2.0).powi(n)).max(0.0).sqrt()
}

/// Inverse of the first-order bound: the protocol error at total time τ.
pub fn cooling_bound_error(n: usize, j: f64, gamma_max: f64, tau: f64) -> f64 {
    let nf = n as f64;
    (nf * (nf + 1.0)).sqrt() / 2.0 * (-(gamma_max / nf) * (tau - swaps(n) as f64 / j)).exp()
}

fn swaps(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Rotates qubit n−1−s to the last site, shifting the ones after it left.
fn shift_in(n: usize, s: usize) -> Result<ComplexMatrix> {
    let src = n - 1 - s;
    let dest: Vec<usize> = (0..n)
        .map(|q| match q {
            q if q == src => n - 1,
            q if q > src => q - 1,
            q => q,
        })
        .collect();
    qubit_permutation(&dest)
}

fn check_chain(n: usize, j: f64, gamma_max: f64) -> Result<()> {
    if n == 0 || !(j > 0.0) || !(gamma_max > 0.0) {
        return Err(Error::domain("need n >= 1, J > 0 and gamma_max > 0"));
    }
    Ok(())
}

/// Cooling I/2ⁿ → |0…0⟩ with amplitude damping on the last qubit: each qubit
/// in turn is moved to the noisy site (s nearest-neighbour iSWAPs at step s,
/// 1/J each) and relaxed for τ_q. τ_q follows the first-order bound for the
/// requested δ_F; the plan's predicted error is the exact residual at that τ_q.
pub fn cooling_protocol(n: usize, j: f64, gamma_max: f64, delta_f: f64) -> Result<(ProtocolPlan, f64)> {
    check_chain(n, j, gamma_max)?;
    if !(delta_f > 0.0) {
        return Err(Error::domain("target error must be positive"));
    }
    let nf = n as f64;
    let tau_q = (((nf * (nf + 1.0)).sqrt() / (2.0 * delta_f)).ln() / gamma_max).max(0.0);
    let mut steps = Vec::new();
    for s in 0..n {
        if s > 0 {
            steps.push(PlanStep::unitary("shift", &shift_in(n, s)?, s as f64 / j));
        }
        steps.push(PlanStep::Noise { channel: 0, rate: gamma_max, duration: tau_q });
    }
    let plan = ProtocolPlan {
        name: "cooling".into(),
        dims: vec![2; n],
        steps,
        predicted_error: cooling_residual(n, (-gamma_max * tau_q).exp()),
    };
    Ok((plan, cooling_duration_bound(n, j, gamma_max, delta_f)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum ErasureMode {
    /// Flip, then damp for ln2/γ*: exact.
    AmpDampExact,
    /// Bit flip on |0⟩ for τ_q; approaches I/2 only asymptotically.
    BitFlipAsymptotic { delta_f: f64 },
}

/// Erasure bound with bit-flip noise,
/// τ_b = C(n,2)/J − (n/2γ*)·ln((2ⁿδ_F² + 1)^{1/n} − 1).
pub fn erasure_bit_flip_bound(n: usize, j: f64, gamma_max: f64, delta_f: f64) -> f64 {
    let nf = n as f64;
    swaps(n) as f64 / j - nf / (2.0 * gamma_max) * (((2f64.powi(n as i32) * delta_f * delta_f + 1.0).powf(1.0 / nf)) - 1.0).ln()
}

/// δ_F of bit-flip erasure with ε = e^{−γ*τ_q}: δ_F² = ((1+ε²)ⁿ − 1)/2ⁿ.
pub fn erasure_bit_flip_residual(n: usize, eps: f64) -> f64 {
    (((1.0 + eps * eps).powi(n as i32) - 1.0) / 2f64.powi(n as i32)).sqrt()
}

/// The bit-flip bound solved for δ_F at total time τ (τ_q clamped at 0).
pub fn erasure_bound_error(n: usize, j: f64, gamma_max: f64, tau: f64) -> f64 {
    let tau_q = ((tau - swaps(n) as f64 / j) / n as f64).max(0.0);
    erasure_bit_flip_residual(n, (-gamma_max * tau_q).exp())
}

/// Erasure |0…0⟩ → I/2ⁿ, one qubit per step as in the cooling protocol.
pub fn erasure_protocol(n: usize, j: f64, gamma_max: f64, mode: ErasureMode) -> Result<(ProtocolPlan, f64)> {
    check_chain(n, j, gamma_max)?;
    let nf = n as f64;
    let (tau_q, predicted, total) = match mode {
        ErasureMode::AmpDampExact => {
            let tq = 2f64.ln() / gamma_max;
            (tq, 0.0, swaps(n) as f64 / j + nf * tq)
        }
        ErasureMode::BitFlipAsymptotic { delta_f } => {
            if !(delta_f > 0.0) {
                return Err(Error::domain("target error must be positive"));
            }
            let total = erasure_bit_flip_bound(n, j, gamma_max, delta_f);
            let tq = ((total - swaps(n) as f64 / j) / nf).max(0.0);
            (tq, erasure_bit_flip_residual(n, (-gamma_max * tq).exp()), total)
        }
    };
    let flip = embed_local(&pauli::x(), n - 1, &vec![2; n])?;
    let mut steps = Vec::new();
    for s in 0..n {
        if s > 0 {
            steps.push(PlanStep::unitary("shift", &shift_in(n, s)?, s as f64 / j));
        }
        if mode == ErasureMode::AmpDampExact {
            steps.push(PlanStep::unitary("flip", &flip, 0.0));
        }
        steps.push(PlanStep::Noise { channel: 0, rate: gamma_max, duration: tau_q });
    }
    let name = match mode {
        ErasureMode::AmpDampExact => "erasure_amp_damp",
        ErasureMode::BitFlipAsymptotic { .. } => "erasure_bit_flip",
    };
    let plan = ProtocolPlan { name: name.into(), dims: vec![2; n], steps, predicted_error: predicted };
    Ok((plan, total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::ising_chain;
    use crate::propagation::frobenius_error;
    use std::f64::consts::FRAC_PI_2;

    fn linear_spectrum() -> DensityOperator {
        let p: Vec<f64> = (1..=8).map(|k| k as f64 / 36.0).collect();
        DensityOperator::from_diagonal(&p, vec![2, 2, 2]).unwrap()
    }

    #[test]
    fn hlp_eight_level_instance_accounting() {
        let sys = ising_chain(3, 1.0, FRAC_PI_2, 2.5, 0.0).unwrap();
        let opts = PlanOptions { budget: 7.5, ..Default::default() };
        let target = DensityOperator::maximally_mixed(vec![2, 2, 2]);
        let plan = hlp_full_plan(&linear_spectrum(), &target, &sys, &opts).unwrap();
        assert_eq!(plan.noise_steps(), 4);
        assert!((plan.dissipative_time() - 12.0).abs() < 1e-12);
        assert!((plan.predicted_error - 9.95e-5).abs() < 1e-7, "{}", plan.predicted_error);
    }

    #[test]
    fn hlp_identity_has_no_noise() {
        let sys = ising_chain(2, 1.0, FRAC_PI_2, 2.5, 0.0).unwrap();
        let rho = DensityOperator::from_diagonal(&[0.4, 0.3, 0.2, 0.1], vec![2, 2]).unwrap();
        let plan = hlp_full_plan(&rho, &rho, &sys, &PlanOptions::default()).unwrap();
        assert_eq!(plan.noise_steps(), 0);
        let out = plan.execute(&sys, &rho).unwrap();
        assert!(frobenius_error(&out, &rho).unwrap() < 1e-12);
    }

    #[test]
    fn hlp_needs_unital_channel() {
        let sys = ising_chain(2, 1.0, 0.0, 2.5, 0.0).unwrap();
        let rho = DensityOperator::from_diagonal(&[0.4, 0.3, 0.2, 0.1], vec![2, 2]).unwrap();
        assert!(hlp_full_plan(&rho, &rho, &sys, &PlanOptions::default()).is_err());
    }

    #[test]
    fn hlp_executes_on_two_qubits() {
        let sys = ising_chain(2, 1.0, FRAC_PI_2, 2.5, 0.0).unwrap();
        let rho = DensityOperator::from_diagonal(&[0.1, 0.5, 0.15, 0.25], vec![2, 2]).unwrap();
        let target = DensityOperator::from_diagonal(&[0.3, 0.2, 0.25, 0.25], vec![2, 2]).unwrap();
        let opts = PlanOptions::default();
        let plan = hlp_full_plan(&rho, &target, &sys, &opts).unwrap();
        let out = plan.execute(&sys, &rho).unwrap();
        let err = frobenius_error(&out, &target).unwrap();
        assert!(err <= 1.1 * plan.predicted_error + 1e-6, "{err} vs {}", plan.predicted_error);
    }

    #[test]
    fn greedy_eight_level_instance() {
        let sys = ising_chain(3, 1.0, FRAC_PI_2, 2.5, 0.0).unwrap();
        let opts = PlanOptions { budget: 7.5, tolerance: 6.04e-5, ..Default::default() };
        let target = DensityOperator::maximally_mixed(vec![2, 2, 2]);
        let plan = greedy_equalize_plan(&linear_spectrum(), &target, &sys, &opts).unwrap();
        assert_eq!(plan.name, "greedy");
        assert!(plan.dissipative_time() <= 7.0, "{}", plan.dissipative_time());
        assert!(plan.predicted_error <= 6.04e-5 * (1.0 + 1e-9), "{}", plan.predicted_error);
    }

    #[test]
    fn greedy_at_target_is_empty() {
        let sys = ising_chain(2, 1.0, FRAC_PI_2, 2.5, 0.0).unwrap();
        let rho = DensityOperator::from_diagonal(&[0.4, 0.3, 0.2, 0.1], vec![2, 2]).unwrap();
        let plan = greedy_equalize_plan(&rho, &rho, &sys, &PlanOptions::default()).unwrap();
        assert_eq!(plan.noise_steps(), 0);
    }

    #[test]
    fn cooling_bound_values() {
        let b = cooling_duration_bound(3, 1.0, 5.0, 1e-4);
        assert!((b - 8.856).abs() < 1e-3, "{b}");
        let b1 = cooling_duration_bound(1, 1.0, 5.0, 1e-3);
        assert!((b1 - (2f64.sqrt() / 2e-3).ln() / 5.0).abs() < 1e-12);
        assert_eq!(cooling_residual(3, 0.0), 0.0);
        let e = cooling_bound_error(3, 1.0, 5.0, b);
        assert!((e - 1e-4).abs() < 1e-12);
    }

    #[test]
    fn cooling_plan_executes() {
        let sys = ising_chain(3, 1.0, 0.0, 5.0, 0.0).unwrap();
        let (plan, bound) = cooling_protocol(3, 1.0, 5.0, 1e-4).unwrap();
        assert!((plan.total_duration() - bound).abs() < 1e-12);
        let rho0 = DensityOperator::maximally_mixed(vec![2, 2, 2]);
        let out = plan.execute(&sys, &rho0).unwrap();
        let ground = DensityOperator::from_diagonal(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0], vec![2, 2, 2]).unwrap();
        let err = frobenius_error(&out, &ground).unwrap();
        assert!(err <= 1.1 * plan.predicted_error && err <= 1.1e-4, "{err} {}", plan.predicted_error);
        let (p1, _) = cooling_protocol(1, 1.0, 5.0, 1e-3).unwrap();
        assert!(p1.steps.iter().all(|s| s.is_dissipative()));
    }

    #[test]
    fn amp_damp_erasure_is_exact() {
        let sys = ising_chain(3, 1.0, 0.0, 5.0, 0.0).unwrap();
        let (plan, total) = erasure_protocol(3, 1.0, 5.0, ErasureMode::AmpDampExact).unwrap();
        assert!((total - (3.0 + 3.0 * 2f64.ln() / 5.0)).abs() < 1e-12);
        assert!((plan.total_duration() - total).abs() < 1e-12);
        let mut p0 = vec![0.0; 8];
        p0[0] = 1.0;
        let rho0 = DensityOperator::from_diagonal(&p0, vec![2, 2, 2]).unwrap();
        let out = plan.execute(&sys, &rho0).unwrap();
        let mixed = DensityOperator::maximally_mixed(vec![2, 2, 2]);
        assert!(frobenius_error(&out, &mixed).unwrap() < 1e-10);
    }

    #[test]
    fn bit_flip_erasure_matches_prediction() {
        let sys = ising_chain(3, 1.0, FRAC_PI_2, 2.5, 0.0).unwrap();
        let (plan, total) = erasure_protocol(3, 1.0, 2.5, ErasureMode::BitFlipAsymptotic { delta_f: 1e-3 }).unwrap();
        assert!((plan.predicted_error - 1e-3).abs() < 1e-9);
        assert!((plan.total_duration() - total).abs() < 1e-12);
        let mut p0 = vec![0.0; 8];
        p0[0] = 1.0;
        let rho0 = DensityOperator::from_diagonal(&p0, vec![2, 2, 2]).unwrap();
        let out = plan.execute(&sys, &rho0).unwrap();
        let err = frobenius_error(&out, &DensityOperator::maximally_mixed(vec![2, 2, 2])).unwrap();
        assert!(err <= 1.1 * plan.predicted_error, "{err}");
        assert!((erasure_bit_flip_residual(3, 0.0)).abs() < 1e-15);
    }
}
