//! Open-loop optimal control of state transfers over coherent amplitudes and
//! channel rates.

mod gradient;
pub mod lbfgs;

use std::fmt::Write as _;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{ControlSystem, TargetState};
use crate::propagation::ControlSequence;
use crate::quantum::{unvectorize, DensityOperator};

pub use gradient::{Evaluator, GradientMethod};
pub use lbfgs::Stop;

/// State transfer ρ₀ → ρ_target in time τ with M uniform slices.
#[derive(Clone, Debug)]
pub struct Problem {
    pub system: ControlSystem,
    pub initial: DensityOperator,
    pub target: TargetState,
    pub total_time: f64,
    pub slices: usize,
}

pub type TransferProblem = Problem;

impl Problem {
    pub fn new(
        system: ControlSystem,
        initial: DensityOperator,
        target: TargetState,
        total_time: f64,
        slices: usize,
    ) -> Result<Self> {
        let p = Problem { system, initial, target, total_time, slices };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.system.dim();
        if self.initial.dim() != n || self.target.state.dim() != n {
            return Err(Error::dim(format!(
                "system dimension {n}, initial {}, target {}",
                self.initial.dim(),
                self.target.state.dim()
            )));
        }
        if !(self.total_time > 0.0) || !self.total_time.is_finite() {
            return Err(Error::domain(format!("total time {} must be positive", self.total_time)));
        }
        if self.slices == 0 {
            return Err(Error::domain("need at least one slice"));
        }
        Ok(())
    }

    pub fn durations(&self) -> Vec<f64> {
        vec![self.total_time / self.slices as f64; self.slices]
    }

    pub fn with_total_time(&self, total_time: f64) -> Result<Self> {
        let mut p = self.clone();
        p.total_time = total_time;
        p.validate()?;
        Ok(p)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iterations: usize,
    pub gradient_method: GradientMethod,
    /// Convergence target on δ_F².
    pub tolerance: f64,
    pub seed: u64,
    /// Symmetric cap on every coherent amplitude, intersected with the
    /// control's own bounds.
    pub amplitude_cap: Option<f64>,
    /// Standard deviation of the initial coherent amplitudes in units of
    /// π/(2τ).
    pub init_scale: f64,
    pub memory: usize,
    /// Run restarts on the rayon pool.
    pub parallel: bool,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            restarts: 9,
            max_iterations: 500,
            gradient_method: GradientMethod::Auxiliary,
            tolerance: 1e-12,
            seed: 0,
            amplitude_cap: Some(100.0),
            init_scale: 1.0,
            memory: 12,
            parallel: true,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::domain("restarts must be at least 1"));
        }
        if !(self.tolerance >= 0.0) {
            return Err(Error::domain("tolerance must be non-negative"));
        }
        if let Some(c) = self.amplitude_cap {
            if !(c > 0.0) {
                return Err(Error::domain("amplitude cap must be positive"));
            }
        }
        if !(self.init_scale >= 0.0) || !self.init_scale.is_finite() {
            return Err(Error::domain("init_scale must be finite and non-negative"));
        }
        if self.memory == 0 {
            return Err(Error::domain("L-BFGS memory must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RestartSummary {
    pub index: usize,
    pub error: f64,
    pub iterations: usize,
    pub stop: Stop,
    /// δ_F after each accepted iteration
    pub trace: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub best_sequence: ControlSequence,
    /// δ_F of the best restart
    pub best_error: f64,
    pub best_restart: usize,
    pub restart_errors: Vec<f64>,
    pub restarts: Vec<RestartSummary>,
    pub seed: u64,
    pub wall_time_s: f64,
}

impl OptimizationResult {
    pub fn final_state(&self, problem: &Problem) -> Result<DensityOperator> {
        let ev = Evaluator::new(problem)?;
        let x = ev.final_vector(&ev.from_sequence(&self.best_sequence)?);
        unvectorize(&x, &problem.initial.dims)
    }
}

/// Box constraints over the flattened parameters.
pub fn parameter_bounds(problem: &Problem, config: &OptimizerConfig) -> (Vec<f64>, Vec<f64>) {
    let cap = config.amplitude_cap.unwrap_or(f64::INFINITY);
    let mut lo_row = Vec::new();
    let mut hi_row = Vec::new();
    for c in &problem.system.controls {
        let (l, h) = c.bounds.unwrap_or((f64::NEG_INFINITY, f64::INFINITY));
        lo_row.push(l.max(-cap));
        hi_row.push(h.min(cap));
    }
    for ch in &problem.system.channels {
        lo_row.push(0.0);
        hi_row.push(ch.max_rate);
    }
    let m = problem.slices;
    (lo_row.repeat(m), hi_row.repeat(m))
}

/// Random start: coherent amplitudes N(0, σ²) with σ = init_scale·π/(2τ),
/// rates uniform in [0, γ*], clipped to the box.
pub fn random_start(problem: &Problem, config: &OptimizerConfig, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let (lo, hi) = parameter_bounds(problem, config);
    let sigma = config.init_scale * std::f64::consts::PI / (2.0 * problem.total_time);
    let normal = Normal::new(0.0, sigma.max(0.0)).expect("finite sigma");
    let nc = problem.system.n_coherent();
    let p = nc + problem.system.n_noise();
    (0..lo.len())
        .map(|i| {
            let v = if i % p < nc { normal.sample(rng) } else { rng.random_range(0.0..=1.0) * hi[i] };
            v.clamp(lo[i], hi[i])
        })
        .collect()
}

fn run_restart(
    ev: &Evaluator,
    start: Vec<f64>,
    lo: &[f64],
    hi: &[f64],
    config: &OptimizerConfig,
    index: usize,
) -> (RestartSummary, Vec<f64>) {
    let method = config.gradient_method;
    let mut eval = |x: &[f64]| match ev.error_and_gradient(x, method) {
        Ok(v) => v,
        Err(_) => (f64::INFINITY, vec![0.0; x.len()]),
    };
    let opts = lbfgs::Options {
        max_iterations: config.max_iterations,
        f_target: config.tolerance,
        memory: config.memory,
        ..lbfgs::Options::default()
    };
    let out = lbfgs::minimize(&mut eval, &start, lo, hi, &opts);
    let summary = RestartSummary {
        index,
        error: out.f.max(0.0).sqrt(),
        iterations: out.iterations,
        stop: out.stop,
        trace: out.trace.iter().map(|f| f.max(0.0).sqrt()).collect(),
    };
    (summary, out.x)
}

/// Multistart projected L-BFGS from seeded random initial sequences.
pub fn optimize(problem: &Problem, config: &OptimizerConfig) -> Result<OptimizationResult> {
    optimize_with_guess(problem, config, None)
}

/// As [`optimize`], with restart 0 starting from `guess` when given.
pub fn optimize_with_guess(
    problem: &Problem,
    config: &OptimizerConfig,
    guess: Option<&ControlSequence>,
) -> Result<OptimizationResult> {
    config.validate()?;
    let start_clock = Instant::now();
    let ev = Evaluator::new(problem)?;
    let (lo, hi) = parameter_bounds(problem, config);
    let guess = guess.map(|g| ev.from_sequence(g)).transpose()?;
    let starts: Vec<Vec<f64>> = (0..config.restarts)
        .map(|i| match (&guess, i) {
            (Some(g), 0) => g.clone(),
            _ => {
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(i as u64));
                random_start(problem, config, &mut rng)
            }
        })
        .collect();
    let job = |(i, s): (usize, Vec<f64>)| run_restart(&ev, s, &lo, &hi, config, i);
    let outcomes: Vec<(RestartSummary, Vec<f64>)> = if config.parallel {
        starts.into_par_iter().enumerate().map(job).collect()
    } else {
        starts.into_iter().enumerate().map(job).collect()
    };
    let best = outcomes
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .0.error.total_cmp(&b.1 .0.error))
        .map(|(i, _)| i)
        .expect("at least one restart");
    let best_sequence = ev.to_sequence(&outcomes[best].1);
    let restarts: Vec<RestartSummary> = outcomes.into_iter().map(|(s, _)| s).collect();
    Ok(OptimizationResult {
        best_sequence,
        best_error: restarts[best].error,
        best_restart: best,
        restart_errors: restarts.iter().map(|r| r.error).collect(),
        restarts,
        seed: config.seed,
        wall_time_s: start_clock.elapsed().as_secs_f64(),
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepPoint {
    pub total_time: f64,
    pub best_error: f64,
    pub restart_errors: Vec<f64>,
}

/// Optimizes the template problem at every total time in `taus`.
pub fn sweep_durations(template: &Problem, taus: &[f64], config: &OptimizerConfig) -> Result<Vec<SweepPoint>> {
    if taus.is_empty() {
        return Err(Error::domain("duration list is empty"));
    }
    config.validate()?;
    taus.iter()
        .map(|&tau| {
            let r = optimize(&template.with_total_time(tau)?, config)?;
            Ok(SweepPoint { total_time: tau, best_error: r.best_error, restart_errors: r.restart_errors })
        })
        .collect()
}

/// Running minimum of the best errors, in sweep order.
pub fn running_minimum(points: &[SweepPoint]) -> Vec<f64> {
    let mut best = f64::INFINITY;
    points
        .iter()
        .map(|p| {
            best = best.min(p.best_error);
            best
        })
        .collect()
}

/// Columns `slice,dt,<control labels…>,<channel labels…>`.
pub fn sequence_csv(system: &ControlSystem, seq: &ControlSequence) -> String {
    let mut out = String::from("slice,dt");
    for c in &system.controls {
        let _ = write!(out, ",{}", c.label);
    }
    for ch in &system.channels {
        let _ = write!(out, ",gamma_{}", ch.label);
    }
    out.push('\n');
    for k in 0..seq.slice_count() {
        let _ = write!(out, "{k},{:.16e}", seq.durations[k]);
        for v in seq.coherent[k].iter().chain(&seq.noise[k]) {
            let _ = write!(out, ",{v:.16e}");
        }
        out.push('\n');
    }
    out
}
