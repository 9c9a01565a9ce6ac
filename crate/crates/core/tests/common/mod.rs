//! Property checks shared by the proptest suite and the acceptance harness.
//! Each returns a description of the first violation.
#![allow(dead_code)]

use dissctl::bath::{damping_rate, diagonal_restriction, BathSpec, Statistics};
use dissctl::models::{ising_chain, noise_generator, random_density};
use dissctl::numerics::{self, c, matrix_exponential, pauli};
use dissctl::propagation::{frobenius_error, propagate, trotter_decoupled_propagator, TrotterMode};
use dissctl::protocols::{finite_t_switch_time, majorization_floor, majorizes, r_a, r_b};
use dissctl::quantum::{spectrum_descending, LindbladChannel, WeightedJump};
use dissctl::{ControlSequence, ControlSystem, DensityOperator};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Check = std::result::Result<(), String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Uniform random amplitudes within each control's bounds (or ±scale) and
/// rates in [0, γ*].
pub fn random_sequence(
    system: &ControlSystem,
    slices: usize,
    tau: f64,
    scale: f64,
    rng: &mut ChaCha8Rng,
) -> ControlSequence {
    let coherent = (0..slices)
        .map(|_| {
            system
                .controls
                .iter()
                .map(|ctl| {
                    let (lo, hi) = ctl.bounds.unwrap_or((-scale, scale));
                    rng.random_range(lo.max(-scale)..=hi.min(scale))
                })
                .collect()
        })
        .collect();
    let noise = (0..slices)
        .map(|_| system.channels.iter().map(|ch| rng.random_range(0.0..=ch.max_rate)).collect())
        .collect();
    ControlSequence::new(vec![tau / slices as f64; slices], coherent, noise).unwrap()
}

pub fn simplex(raw: &[f64]) -> Vec<f64> {
    let s: f64 = raw.iter().sum();
    raw.iter().map(|v| v / s).collect()
}

pub fn kms(beta: f64, w: f64, cutoff: f64, fermion: bool) -> Check {
    let statistics = if fermion { Statistics::Fermion } else { Statistics::Boson };
    let spec = BathSpec { beta, cutoff, statistics, transition: w };
    let up = damping_rate(w, &spec).map_err(|e| e.to_string())?;
    let down = damping_rate(-w, &spec).map_err(|e| e.to_string())?;
    let want = (-beta * w).exp() * up;
    ensure((down - want).abs() <= 1e-10 * up.abs(), || format!("KMS at beta={beta}, w={w}: {down} vs {want}"))
}

pub fn diagonal_restriction_idempotent(b: f64) -> Check {
    let g = diagonal_restriction(b).map_err(|e| e.to_string())?;
    for i in 0..2 {
        for j in 0..2 {
            let sq = g[i][0] * g[0][j] + g[i][1] * g[1][j];
            ensure((sq - g[i][j]).abs() < 1e-12, || format!("Γ″² ≠ Γ″ at b={b}"))?;
        }
    }
    Ok(())
}

pub fn population_maps_stochastic(gt: f64) -> Check {
    for (name, r) in [("R_a", r_a(gt)), ("R_b", r_b(gt))] {
        for col in 0..2 {
            ensure(r[0][col] >= 0.0 && r[1][col] >= 0.0, || format!("{name}({gt}) has a negative entry"))?;
            ensure((r[0][col] + r[1][col] - 1.0).abs() < 1e-14, || format!("{name}({gt}) column {col} sum"))?;
        }
    }
    let b = r_b(gt);
    ensure((b[0][0] + b[0][1] - 1.0).abs() < 1e-14, || format!("R_b({gt}) not doubly stochastic"))
}

/// Thermal qubit channel assembled from its jump operators.
fn thermal_qubit(b: f64) -> LindbladChannel {
    LindbladChannel {
        label: "bath".into(),
        jumps: vec![
            WeightedJump { weight: 1.0 / (b + 1.0), operator: pauli::raising() },
            WeightedJump { weight: b / (b + 1.0), operator: pauli::lowering() },
        ],
        max_rate: 1.0,
        switchable: true,
        lamb_ratio: 0.0,
        lamb_operator: numerics::zeros(2),
    }
}

fn evolve_diag(ch: &LindbladChannel, gt: f64, p: [f64; 2]) -> [f64; 2] {
    let x = matrix_exponential(&ch.dissipator().matrix.mapv(|z| z * -gt)).unwrap();
    let v = numerics::matvec(&x, &[c(p[0], 0.0), c(0.0, 0.0), c(0.0, 0.0), c(p[1], 0.0)]);
    [v[0].re, v[3].re]
}

/// Relax for t_s, swap the pair, relax for τ − t_s: the pair must come back
/// with its populations exchanged. `u` ∈ [0, 1] places the ratio in [1/b, b].
pub fn switch_time_neutralizes(b: f64, u: f64, gamma: f64, tau: f64, pj: f64) -> Check {
    let ratio = (-b.ln() + 2.0 * b.ln() * u).exp();
    let pi = ratio * pj;
    let t = finite_t_switch_time(ratio, b, gamma, tau)
        .map_err(|e| e.to_string())?
        .ok_or_else(|| format!("no switch time for ratio {ratio} inside [1/b, b]"))?;
    ensure(t >= -1e-12 && t <= tau + 1e-12, || format!("switch time {t} outside [0, {tau}]"))?;
    let ch = thermal_qubit(b);
    let p = evolve_diag(&ch, gamma * t, [pi, pj]);
    let p = evolve_diag(&ch, gamma * (tau - t), [p[1], p[0]]);
    let tol = 1e-10 * (pi + pj);
    ensure((p[1] - pi).abs() < tol && (p[0] - pj).abs() < tol, || {
        format!("b={b}, ratio={ratio}: ended at {p:?}, started at ({pi}, {pj})")
    })
}

pub fn stopping_boundary(b: f64, gamma: f64, tau: f64) -> Check {
    let f = |r: f64| finite_t_switch_time(r, b, gamma, tau).map_err(|e| e.to_string());
    let at = f(b)?.ok_or("no switch time at ratio = b")?;
    ensure((at - tau).abs() < 1e-10 * (1.0 + tau), || format!("τ_ij = {at} ≠ τ = {tau} at ratio = b = {b}"))?;
    let inv = f(1.0 / b)?.ok_or("no switch time at ratio = 1/b")?;
    // 1/b carries a rounding error that dτ_ij/dratio = e^{γτ}b/(γ(b − 1/b)) amplifies
    let slack = 4.0 * f64::EPSILON * (gamma * tau).exp() / (gamma * (b - 1.0 / b));
    ensure(inv.abs() < 1e-10 * (1.0 + tau) + slack, || format!("τ_ij = {inv} ≠ 0 at ratio = 1/b"))?;
    ensure(f(b * (1.0 + 1e-6))?.is_none(), || "switch time above ratio b".into())?;
    ensure(f((1.0 - 1e-6) / b)?.is_none(), || "switch time below ratio 1/b".into())
}

/// Alternation error against e^{−γtΓ} halves (at least) for each factor 4 in k.
pub fn trotter_converges(theta: f64, gt: f64, h: [f64; 3]) -> Check {
    let ch = LindbladChannel::single("v", noise_generator(theta).unwrap(), 1.0).unwrap();
    let hp = &(&pauli::x().mapv(|z| z * h[0]) + &pauli::y().mapv(|z| z * h[1])) + &pauli::z().mapv(|z| z * h[2]);
    let exact = matrix_exponential(&ch.dissipator().matrix.mapv(|z| z * -gt)).unwrap();
    for mode in [TrotterMode::SignFlip, TrotterMode::Symmetric] {
        let err = |k: usize| {
            let p = trotter_decoupled_propagator(&ch, &hp, gt, k, mode).unwrap();
            numerics::max_abs_diff(&p.matrix, &exact)
        };
        let (e16, e64, e256) = (err(16), err(64), err(256));
        ensure(e64 <= 0.5 * e16 + 1e-13 && e256 <= 0.5 * e64 + 1e-13, || {
            format!("{mode:?} not converging: k=16 {e16:.3e}, 64 {e64:.3e}, 256 {e256:.3e}")
        })?;
    }
    Ok(())
}

/// A purer (non-majorized) target: every bit-flip-controlled trajectory from
/// ρ₀ stays at least the majorization floor away from it.
pub fn majorization_floor_holds(seed: u64, peaks: &[f64]) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let system = ising_chain(2, 1.0, std::f64::consts::FRAC_PI_2, 2.0, 0.0).unwrap();
    let rho0 = random_density(&[2, 2], &mut rng).unwrap();
    let y = spectrum_descending(&rho0).unwrap();
    let w = simplex(peaks);
    let mut x: Vec<f64> = y.iter().zip(&w).map(|(a, b)| 0.5 * a + 0.5 * b).collect();
    x[0] += 0.3;
    let x = simplex(&x);
    let target = DensityOperator::from_diagonal(&x, vec![2, 2]).unwrap();
    let xs = spectrum_descending(&target).unwrap();
    let floor = majorization_floor(&y, &xs);
    let maj = majorizes(&xs, &y).unwrap();
    ensure((floor > 0.0) == !maj, || format!("floor {floor} inconsistent with majorization {maj}"))?;
    let seq = random_sequence(&system, 4, 2.0, 3.0, &mut rng);
    let out = propagate(&system, &seq, &rho0).map_err(|e| e.to_string())?;
    let err = frobenius_error(out.final_state(), &target).unwrap();
    ensure(err >= floor - 1e-12, || format!("reached δ_F = {err} below the floor {floor}"))
}
