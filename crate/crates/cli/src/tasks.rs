//! Task execution and artifact layout.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use anyhow::{anyhow, Result};
use dissctl::bath::{damping_rate, gmon_timescales, lamb_shift_rate, occupation, validate_timescales, BathSpec, Timescales};
use dissctl::optimize::{optimize, running_minimum, sequence_csv, sweep_durations, RestartSummary};
use dissctl::propagation::{frobenius_error, propagate};
use dissctl::protocols::{
    cooling_bound_error, cooling_protocol, erasure_bound_error, erasure_protocol, greedy_equalize_plan, hlp_full_plan,
    reachability_verdict, ErasureMode, ProtocolPlan, Reachability, ReachabilityVerdict,
};
use dissctl::quantum::spectrum_descending;
use dissctl::{ControlSystem, DensityOperator, OptimizerConfig};
use serde::Serialize;

use crate::artifacts::ArtifactWriter;
use crate::config::{self, BoundKind, Instance, LoadedConfig, ProtocolKind, Task};

#[derive(Debug)]
pub enum Failure {
    Config(anyhow::Error),
    Infeasible(String),
    Numeric(anyhow::Error),
    Io(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Config(_) => 2,
            Failure::Infeasible(_) => 3,
            Failure::Numeric(_) => 4,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(e) => write!(f, "config error: {e:#}"),
            Failure::Infeasible(s) => write!(f, "infeasible: {s}"),
            Failure::Numeric(e) => write!(f, "numeric failure: {e:#}"),
            Failure::Io(e) => write!(f, "i/o error: {e:#}"),
        }
    }
}

/// Classifies a library error raised while executing a task.
fn lib(e: dissctl::Error) -> Failure {
    use dissctl::Error as E;
    match e {
        E::Infeasible(s) => Failure::Infeasible(s),
        E::Io(e) => Failure::Io(e.into()),
        E::Domain(_) | E::Dimension(_) | E::Bound(_) | E::Parse(_) => Failure::Config(e.into()),
        E::NotHermitian(_) | E::InvalidState(_) | E::Numeric(_) => Failure::Numeric(e.into()),
    }
}

fn cfg_err(e: anyhow::Error) -> Failure {
    match e.downcast::<dissctl::Error>() {
        Ok(e) => match e {
            dissctl::Error::Io(_) => lib(e),
            e => Failure::Config(e.into()),
        },
        Err(e) => Failure::Config(e),
    }
}

fn io(e: anyhow::Error) -> Failure {
    Failure::Io(e)
}

pub struct RunOptions<'a> {
    pub out: &'a Path,
    pub seed: Option<u64>,
    pub restarts: Option<usize>,
}

pub struct RunSummary {
    pub lines: Vec<String>,
}

/// Built model and transfer instances of a problem-based task.
pub struct Prepared {
    pub system: ControlSystem,
    pub instances: Vec<Instance>,
}

/// Parses every section and builds what the task needs without running it.
/// Missing `file:` states are allowed when `check_files` is false; the
/// instance list is then empty.
pub fn prepare(loaded: &LoadedConfig, check_files: bool) -> std::result::Result<Option<Prepared>, Failure> {
    let cfg = &loaded.config;
    config::check_sections(cfg).map_err(cfg_err)?;
    if matches!(cfg.task, Task::Bath | Task::ValidateTimescales) {
        return Ok(None);
    }
    let system = cfg.model().and_then(|m| m.build()).map_err(cfg_err)?;
    let instances = config::instances(loaded, &system, check_files).map_err(cfg_err)?;
    let p = cfg.problem().map_err(cfg_err)?;
    for inst in &instances {
        let tau = p.tau.or(p.taus.as_ref().and_then(|t| t.first().copied())).unwrap_or(1.0);
        config::problem_for(&system, p, inst, tau).map_err(cfg_err)?;
    }
    if matches!(cfg.task, Task::Sweep | Task::Protocol) && instances.len() > 1 {
        return Err(Failure::Config(anyhow!("task {:?} takes a single instance; give one pair seed", cfg.task)));
    }
    Ok(Some(Prepared { system, instances }))
}

#[derive(Serialize)]
struct OptimizeRun<'a> {
    label: &'a str,
    target: &'a str,
    best_error: f64,
    best_restart: usize,
    restart_errors: &'a [f64],
    final_populations: Vec<f64>,
    final_spectrum: Vec<f64>,
    final_purity: f64,
    restarts: &'a [RestartSummary],
}

#[derive(Serialize)]
struct OptimizeResult<'a> {
    name: &'a str,
    task: &'a str,
    seed: u64,
    total_time: f64,
    slices: usize,
    runs: Vec<OptimizeRun<'a>>,
}

#[derive(Serialize)]
struct SweepRow {
    tau: f64,
    best_error: f64,
    running_min: f64,
    bound: Option<f64>,
    restart_errors: Vec<f64>,
}

#[derive(Serialize)]
struct PlanReport {
    name: String,
    predicted_error: f64,
    executed_error: f64,
    dissipative_time: f64,
    total_duration: f64,
    noise_steps: usize,
    file: String,
}

#[derive(Serialize)]
struct ProtocolResult<'a> {
    name: &'a str,
    task: &'a str,
    protocol: ProtocolKind,
    /// Closed-form duration of the cooling/erasure scheme, when it has one.
    duration_bound: Option<f64>,
    plans: Vec<PlanReport>,
}

#[derive(Serialize)]
struct BathRow {
    omega: f64,
    gamma: f64,
    lamb_shift: f64,
    occupation: Option<f64>,
}

fn task_name(t: Task) -> &'static str {
    match t {
        Task::Optimize => "optimize",
        Task::Sweep => "sweep",
        Task::Protocol => "protocol",
        Task::Reachability => "reachability",
        Task::Bath => "bath",
        Task::ValidateTimescales => "validate_timescales",
    }
}

fn populations(rho: &DensityOperator) -> Vec<f64> {
    (0..rho.dim()).map(|i| rho.matrix[[i, i]].re).collect()
}

fn e(v: f64) -> String {
    format!("{v:.16e}")
}

/// Verdicts for every instance when the noise class is known.
pub fn verdicts(
    loaded: &LoadedConfig,
    prep: &Prepared,
) -> std::result::Result<Option<Vec<(String, ReachabilityVerdict)>>, Failure> {
    let Some(kind) = loaded.config.noise_kind().map_err(cfg_err)? else {
        return Ok(None);
    };
    prep.instances
        .iter()
        .map(|i| Ok((i.label.clone(), reachability_verdict(&i.initial, &i.target.state, kind).map_err(lib)?)))
        .collect::<std::result::Result<Vec<_>, Failure>>()
        .map(Some)
}

fn write_verdicts(w: &mut ArtifactWriter, v: &[(String, ReachabilityVerdict)]) -> Result<()> {
    if let [(_, one)] = v {
        w.write_json("verdict.json", one)
    } else {
        let map: std::collections::BTreeMap<&str, &ReachabilityVerdict> = v.iter().map(|(l, x)| (l.as_str(), x)).collect();
        w.write_json("verdict.json", &map)
    }
}

pub fn run(loaded: &LoadedConfig, opts: &RunOptions) -> std::result::Result<RunSummary, Failure> {
    let clock = Instant::now();
    let cfg = &loaded.config;
    let prep = prepare(loaded, true)?;
    let seed = opts.seed.unwrap_or_else(|| loaded.default_seed());
    let mut optimizer = OptimizerConfig { seed, ..cfg.optimizer.clone() };
    if let Some(r) = opts.restarts {
        optimizer.restarts = r;
    }
    optimizer.validate().map_err(|e| Failure::Config(e.into()))?;
    let mut w = ArtifactWriter::new(opts.out).map_err(io)?;
    let mut lines = Vec::new();
    let mut infeasible = None;

    if let Some(prep) = &prep {
        if let Some(v) = verdicts(loaded, prep)? {
            write_verdicts(&mut w, &v).map_err(io)?;
            for (label, verdict) in &v {
                lines.push(format!("verdict {label}: {:?} ({})", verdict.reachable, verdict.reason));
                if verdict.reachable == Reachability::No && infeasible.is_none() {
                    let floor = verdict.error_floor.map_or(String::new(), |f| format!("; error floor {f:.4e}"));
                    infeasible = Some(format!("{label}: {}{floor}", verdict.reason));
                }
            }
        } else if cfg.task == Task::Reachability {
            return Err(Failure::Config(anyhow!("no reachability classification for this model; add [reachability]")));
        }
    }

    if infeasible.is_none() {
        match (cfg.task, &prep) {
            (Task::Optimize, Some(p)) => run_optimize(loaded, p, &optimizer, &mut w, &mut lines)?,
            (Task::Sweep, Some(p)) => run_sweep(loaded, p, &optimizer, &mut w, &mut lines)?,
            (Task::Protocol, Some(p)) => run_protocol(loaded, p, &mut w, &mut lines)?,
            (Task::Reachability, _) => {}
            (Task::Bath, _) => run_bath(loaded, &mut w, &mut lines)?,
            (Task::ValidateTimescales, _) => run_timescales(loaded, &mut w, &mut lines)?,
            _ => unreachable!("problem tasks are prepared"),
        }
    }
    let manifest = w
        .finish(&cfg.name, task_name(cfg.task), &loaded.sha256(), seed, clock.elapsed().as_secs_f64())
        .map_err(io)?;
    lines.push(format!("manifest: {}", manifest.display()));
    match infeasible {
        Some(reason) => {
            for l in &lines {
                eprintln!("{l}");
            }
            Err(Failure::Infeasible(reason))
        }
        None => Ok(RunSummary { lines }),
    }
}

fn run_optimize(
    loaded: &LoadedConfig,
    prep: &Prepared,
    optimizer: &OptimizerConfig,
    w: &mut ArtifactWriter,
    lines: &mut Vec<String>,
) -> std::result::Result<(), Failure> {
    let cfg = &loaded.config;
    let p = cfg.problem().map_err(cfg_err)?;
    let tau = p.tau.expect("checked");
    let single = prep.instances.len() == 1;
    let mut outcomes = Vec::new();
    for (k, inst) in prep.instances.iter().enumerate() {
        let problem = config::problem_for(&prep.system, p, inst, tau).map_err(cfg_err)?;
        let oc = OptimizerConfig { seed: optimizer.seed.wrapping_add(1_000_003 * k as u64), ..optimizer.clone() };
        let res = optimize(&problem, &oc).map_err(lib)?;
        let traj = propagate(&prep.system, &res.best_sequence, &inst.initial).map_err(lib)?;
        let suffix = if single { String::new() } else { format!("_{}", inst.label) };
        w.write(&format!("sequence{suffix}.csv"), sequence_csv(&prep.system, &res.best_sequence).as_bytes()).map_err(io)?;
        w.write_json(&format!("sequence{suffix}.json"), &res.best_sequence).map_err(io)?;
        w.write(&format!("trajectory{suffix}.csv"), traj.to_csv().as_bytes()).map_err(io)?;
        lines.push(format!("{}: best δ_F {:.4e} (restart {})", inst.label, res.best_error, res.best_restart));
        outcomes.push((inst, res, traj));
    }
    let runs = outcomes
        .iter()
        .map(|(inst, res, traj)| {
            let last = traj.final_state();
            Ok(OptimizeRun {
                label: &inst.label,
                target: &inst.target.label,
                best_error: res.best_error,
                best_restart: res.best_restart,
                restart_errors: &res.restart_errors,
                final_populations: populations(last),
                final_spectrum: spectrum_descending(last).map_err(lib)?,
                final_purity: last.purity(),
                restarts: &res.restarts,
            })
        })
        .collect::<std::result::Result<Vec<_>, Failure>>()?;
    let result = OptimizeResult {
        name: &cfg.name,
        task: "optimize",
        seed: optimizer.seed,
        total_time: tau,
        slices: p.slices,
        runs,
    };
    w.write_json("result.json", &result).map_err(io)
}

fn run_sweep(
    loaded: &LoadedConfig,
    prep: &Prepared,
    optimizer: &OptimizerConfig,
    w: &mut ArtifactWriter,
    lines: &mut Vec<String>,
) -> std::result::Result<(), Failure> {
    let cfg = &loaded.config;
    let p = cfg.problem().map_err(cfg_err)?;
    let taus = p.taus.clone().expect("checked");
    let inst = &prep.instances[0];
    let template = config::problem_for(&prep.system, p, inst, taus[0]).map_err(cfg_err)?;
    let points = sweep_durations(&template, &taus, optimizer).map_err(lib)?;
    let mins = running_minimum(&points);
    let chain = cfg.model().map_err(cfg_err)?.chain();
    let bound = |tau: f64| match (p.bound, chain) {
        (Some(BoundKind::Cooling), Some((n, j, g))) => Some(cooling_bound_error(n, j, g, tau)),
        (Some(BoundKind::Erasure), Some((n, j, g))) => Some(erasure_bound_error(n, j, g, tau)),
        _ => None,
    };
    let mut csv = String::from("tau,best_error,running_min,bound");
    for r in 0..optimizer.restarts {
        let _ = write!(csv, ",restart_{r}");
    }
    csv.push('\n');
    let mut rows = Vec::new();
    for (pt, m) in points.iter().zip(&mins) {
        let b = bound(pt.total_time);
        let _ = write!(csv, "{},{},{},{}", e(pt.total_time), e(pt.best_error), e(*m), b.map_or(String::new(), e));
        for r in &pt.restart_errors {
            let _ = write!(csv, ",{}", e(*r));
        }
        csv.push('\n');
        lines.push(format!(
            "τ = {:.3}: best δ_F {:.4e}{}",
            pt.total_time,
            pt.best_error,
            b.map_or(String::new(), |b| format!(" (protocol {b:.4e})"))
        ));
        rows.push(SweepRow {
            tau: pt.total_time,
            best_error: pt.best_error,
            running_min: *m,
            bound: b,
            restart_errors: pt.restart_errors.clone(),
        });
    }
    w.write("sweep.csv", csv.as_bytes()).map_err(io)?;
    w.write_json(
        "result.json",
        &serde_json::json!({
            "name": cfg.name,
            "task": "sweep",
            "seed": optimizer.seed,
            "slices": p.slices,
            "points": rows,
        }),
    )
    .map_err(io)
}

fn run_protocol(
    loaded: &LoadedConfig,
    prep: &Prepared,
    w: &mut ArtifactWriter,
    lines: &mut Vec<String>,
) -> std::result::Result<(), Failure> {
    let cfg = &loaded.config;
    let pr = cfg.protocol.as_ref().expect("checked");
    let opts = pr.plan_options();
    let inst = &prep.instances[0];
    let (rho0, target) = (&inst.initial, &inst.target.state);
    let chain = || cfg.model().map_err(cfg_err).map(|m| m.chain().expect("checked ising"));
    let mut duration_bound = None;
    let plans: Vec<ProtocolPlan> = match pr.kind {
        ProtocolKind::Hlp => vec![hlp_full_plan(rho0, target, &prep.system, &opts).map_err(lib)?],
        ProtocolKind::Greedy => vec![greedy_equalize_plan(rho0, target, &prep.system, &opts).map_err(lib)?],
        ProtocolKind::HlpVsGreedy => vec![
            hlp_full_plan(rho0, target, &prep.system, &opts).map_err(lib)?,
            greedy_equalize_plan(rho0, target, &prep.system, &opts).map_err(lib)?,
        ],
        ProtocolKind::Cooling => {
            let (n, j, g) = chain()?;
            let (plan, bound) = cooling_protocol(n, j, g, pr.delta_f.expect("checked")).map_err(lib)?;
            duration_bound = Some(bound);
            vec![plan]
        }
        ProtocolKind::ErasureAmpDamp | ProtocolKind::ErasureBitFlip => {
            let (n, j, g) = chain()?;
            let mode = match pr.kind {
                ProtocolKind::ErasureAmpDamp => ErasureMode::AmpDampExact,
                _ => ErasureMode::BitFlipAsymptotic { delta_f: pr.delta_f.expect("checked") },
            };
            let (plan, bound) = erasure_protocol(n, j, g, mode).map_err(lib)?;
            duration_bound = Some(bound);
            vec![plan]
        }
    };
    let several = plans.len() > 1;
    let mut reports = Vec::new();
    for plan in &plans {
        let out = plan.execute(&prep.system, rho0).map_err(lib)?;
        let executed = frobenius_error(&out, target).map_err(lib)?;
        let file = if several { format!("plan_{}.json", plan.name.replace(['(', ')'], "_")) } else { "plan.json".into() };
        let mut text = plan.to_json().map_err(lib)?;
        text.push('\n');
        w.write(&file, text.as_bytes()).map_err(io)?;
        lines.push(format!(
            "{}: dissipative time {:.4}, predicted δ_F {:.4e}, executed δ_F {:.4e}",
            plan.name,
            plan.dissipative_time(),
            plan.predicted_error,
            executed
        ));
        reports.push(PlanReport {
            name: plan.name.clone(),
            predicted_error: plan.predicted_error,
            executed_error: executed,
            dissipative_time: plan.dissipative_time(),
            total_duration: plan.total_duration(),
            noise_steps: plan.noise_steps(),
            file,
        });
    }
    let result =
        ProtocolResult { name: &cfg.name, task: "protocol", protocol: pr.kind, duration_bound, plans: reports };
    w.write_json("result.json", &result).map_err(io)
}

pub fn bath_rows(spec: &BathSpec, omegas: &[f64]) -> std::result::Result<String, Failure> {
    let mut csv = String::from("omega,gamma,lamb_shift,occupation\n");
    for &w in omegas {
        let s = BathSpec { transition: w, ..*spec };
        let row = BathRow {
            omega: w,
            gamma: damping_rate(w, &s).map_err(lib)?,
            lamb_shift: lamb_shift_rate(w, &s).map_err(lib)?,
            occupation: occupation(w, &s).ok(),
        };
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            e(row.omega),
            e(row.gamma),
            e(row.lamb_shift),
            row.occupation.map_or(String::new(), e)
        );
    }
    Ok(csv)
}

fn run_bath(loaded: &LoadedConfig, w: &mut ArtifactWriter, lines: &mut Vec<String>) -> std::result::Result<(), Failure> {
    let b = loaded.config.bath.as_ref().expect("checked");
    let spec = BathSpec { beta: b.beta, cutoff: b.cutoff, statistics: b.statistics, transition: b.omegas[0] };
    let csv = bath_rows(&spec, &b.omegas)?;
    w.write("bath.csv", csv.as_bytes()).map_err(io)?;
    lines.push(format!("bath table with {} frequencies", b.omegas.len()));
    Ok(())
}

fn run_timescales(
    loaded: &LoadedConfig,
    w: &mut ArtifactWriter,
    lines: &mut Vec<String>,
) -> std::result::Result<(), Failure> {
    let t = loaded.config.timescales.as_ref().expect("checked");
    let base = if t.preset.is_some() { Some(gmon_timescales()) } else { None };
    let pick = |v: Option<f64>, f: fn(&Timescales) -> f64, name: &str| {
        v.or(base.as_ref().map(f)).ok_or_else(|| Failure::Config(anyhow!("timescales need `{name}` or a preset")))
    };
    let ts = Timescales {
        bath: pick(t.bath, |x| x.bath, "bath")?,
        system: pick(t.system, |x| x.system, "system")?,
        relaxation: pick(t.relaxation, |x| x.relaxation, "relaxation")?,
        control: pick(t.control, |x| x.control, "control")?,
    };
    let report = validate_timescales(&ts, t.factor).map_err(lib)?;
    for c in &report.checks {
        lines.push(format!("{}: ratio {:.3} {}", c.name, c.ratio, if c.passed { "pass" } else { "fail" }));
    }
    w.write_json("timescales.json", &serde_json::json!({ "rates": ts, "report": report })).map_err(io)
}
