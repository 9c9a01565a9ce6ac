//! Experiment configuration (TOML, schema version 1) and its translation into
//! systems, states and problems.

use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use dissctl::bath::{Statistics, DEFAULT_QUBIT_CUTOFF_RATIO};
use dissctl::models::{
    gmon_chain, ion_trap_collective, ising_chain, ising_chain_thermal, random_density, random_majorized_pair,
    target_state, GmonParams, TargetState,
};
use dissctl::propagation::TrotterMode;
use dissctl::protocols::{algorithmic_cooling_state, test2_target, NoiseKind, PlanOptions};
use dissctl::{ControlSystem, DensityOperator, OptimizerConfig, Problem};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Optimize,
    Sweep,
    Protocol,
    Reachability,
    Bath,
    ValidateTimescales,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub task: Task,
    pub seed: Option<u64>,
    pub model: Option<ModelConfig>,
    pub problem: Option<ProblemConfig>,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
    pub protocol: Option<ProtocolConfig>,
    pub reachability: Option<ReachabilityConfig>,
    pub bath: Option<BathConfig>,
    pub timescales: Option<TimescaleConfig>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QubitNoise {
    AmplitudeDamping,
    BitFlip,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelConfig {
    /// Ising-ZZ chain with a V_θ channel on the last qubit; give `noise` or
    /// `theta`.
    Ising {
        n: usize,
        #[serde(default = "one")]
        j: f64,
        noise: Option<QubitNoise>,
        theta: Option<f64>,
        gamma_max: f64,
        #[serde(default)]
        dephasing: f64,
    },
    IsingThermal {
        n: usize,
        #[serde(default = "one")]
        j: f64,
        b: f64,
        gamma_max: f64,
        #[serde(default = "default_cutoff")]
        cutoff_ratio: f64,
    },
    Gmon {
        n: Option<usize>,
        coupling_hz: Option<f64>,
        anharmonicity_hz: Option<f64>,
        carrier_hz: Option<f64>,
        cutoff_hz: Option<f64>,
        boltzmann: Option<f64>,
        gamma_max: Option<f64>,
        detuning_max_hz: Option<f64>,
        drive_max_hz: Option<f64>,
    },
    IonTrap {
        n: usize,
        #[serde(default = "one")]
        a: f64,
        gamma_max: f64,
    },
}

fn one() -> f64 {
    1.0
}

fn default_cutoff() -> f64 {
    DEFAULT_QUBIT_CUTOFF_RATIO
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Cooling,
    Erasure,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub initial: String,
    pub target: String,
    pub tau: Option<f64>,
    #[serde(default = "default_slices")]
    pub slices: usize,
    /// Durations of a sweep.
    pub taus: Option<Vec<f64>>,
    /// One instance per seed for `random` and `majorized` states.
    pub pair_seeds: Option<Vec<u64>>,
    /// Random T-transforms applied for a `majorized` target.
    #[serde(default = "default_transforms")]
    pub transforms: usize,
    /// Reference protocol error written next to a sweep.
    pub bound: Option<BoundKind>,
    /// Boltzmann factor for `alg_cooling` and `test2`; the model's when unset.
    pub b: Option<f64>,
}

fn default_slices() -> usize {
    40
}

fn default_transforms() -> usize {
    6
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtocolKind {
    Hlp,
    Greedy,
    HlpVsGreedy,
    Cooling,
    ErasureAmpDamp,
    ErasureBitFlip,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolConfig {
    pub kind: ProtocolKind,
    /// Target error of the cooling and bit-flip erasure schemes.
    pub delta_f: Option<f64>,
    pub rate: Option<f64>,
    pub budget: Option<f64>,
    pub trotter_k: Option<usize>,
    pub trotter_mode: Option<TrotterMode>,
    pub tolerance: Option<f64>,
}

impl ProtocolConfig {
    pub fn plan_options(&self) -> PlanOptions {
        let d = PlanOptions::default();
        PlanOptions {
            rate: self.rate.or(d.rate),
            budget: self.budget.unwrap_or(d.budget),
            trotter_k: self.trotter_k.unwrap_or(d.trotter_k),
            trotter_mode: self.trotter_mode.unwrap_or(d.trotter_mode),
            tolerance: self.tolerance.unwrap_or(d.tolerance),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseLabel {
    AmplitudeDamping,
    BitFlip,
    Thermal,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReachabilityConfig {
    pub noise: NoiseLabel,
    /// Required for thermal noise.
    pub b: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathConfig {
    pub beta: f64,
    pub cutoff: f64,
    #[serde(default = "boson")]
    pub statistics: Statistics,
    pub omegas: Vec<f64>,
}

fn boson() -> Statistics {
    Statistics::Boson
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimescaleConfig {
    /// `gmon` loads the device table; explicit rates override it.
    pub preset: Option<String>,
    pub bath: Option<f64>,
    pub system: Option<f64>,
    pub relaxation: Option<f64>,
    pub control: Option<f64>,
    #[serde(default = "default_factor")]
    pub factor: f64,
}

fn default_factor() -> f64 {
    10.0
}

/// Where a config came from; file-based state specs resolve against it.
#[derive(Clone, Debug)]
pub enum Origin {
    File(PathBuf),
    Bundled,
}

#[derive(Clone, Debug)]
pub struct LoadedConfig {
    pub config: ExperimentConfig,
    pub text: String,
    pub origin: Origin,
}

impl LoadedConfig {
    pub fn parse(text: &str, origin: Origin) -> Result<Self> {
        let config: ExperimentConfig = toml::from_str(text).map_err(|e| anyhow!("{e}"))?;
        if config.version != SCHEMA_VERSION {
            bail!("unsupported config version {} (expected {SCHEMA_VERSION})", config.version);
        }
        if config.name.trim().is_empty() {
            bail!("config name is empty");
        }
        Ok(LoadedConfig { config, text: text.to_string(), origin })
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text, Origin::File(path.to_path_buf())).with_context(|| format!("in {}", path.display()))
    }

    pub fn sha256(&self) -> String {
        hex(&Sha256::digest(self.text.as_bytes()))
    }

    /// Explicit seed, else the first eight bytes of the config digest.
    pub fn default_seed(&self) -> u64 {
        self.config.seed.unwrap_or_else(|| {
            let d = Sha256::digest(self.text.as_bytes());
            u64::from_le_bytes(d[..8].try_into().expect("digest has 32 bytes"))
        })
    }

    fn resolve(&self, p: &str) -> PathBuf {
        let p = PathBuf::from(p);
        match &self.origin {
            Origin::File(cfg) if p.is_relative() => cfg.parent().map_or(p.clone(), |d| d.join(&p)),
            _ => p,
        }
    }
}

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// One transfer instance of the problem section.
#[derive(Clone, Debug)]
pub struct Instance {
    pub label: String,
    pub initial: DensityOperator,
    pub target: TargetState,
}

impl ModelConfig {
    pub fn build(&self) -> Result<ControlSystem> {
        let sys = match self {
            ModelConfig::Ising { n, j, gamma_max, dephasing, .. } => {
                ising_chain(*n, *j, self.theta()?.expect("ising has an angle"), *gamma_max, *dephasing)?
            }
            ModelConfig::IsingThermal { n, j, b, gamma_max, cutoff_ratio } => {
                ising_chain_thermal(*n, *j, *b, *gamma_max, *cutoff_ratio)?
            }
            ModelConfig::Gmon { .. } => gmon_chain(&self.gmon_params().expect("gmon"))?,
            ModelConfig::IonTrap { n, a, gamma_max } => ion_trap_collective(*n, *a, *gamma_max)?,
        };
        Ok(sys)
    }

    /// Noise angle of an Ising model.
    pub fn theta(&self) -> Result<Option<f64>> {
        match self {
            ModelConfig::Ising { noise, theta, .. } => match (noise, theta) {
                (Some(QubitNoise::AmplitudeDamping), None) => Ok(Some(0.0)),
                (Some(QubitNoise::BitFlip), None) => Ok(Some(FRAC_PI_2)),
                (None, Some(t)) => Ok(Some(*t)),
                _ => bail!("ising model needs exactly one of `noise` and `theta`"),
            },
            _ => Ok(None),
        }
    }

    pub fn gmon_params(&self) -> Option<GmonParams> {
        match self {
            ModelConfig::Gmon {
                n,
                coupling_hz,
                anharmonicity_hz,
                carrier_hz,
                cutoff_hz,
                boltzmann,
                gamma_max,
                detuning_max_hz,
                drive_max_hz,
            } => {
                let d = GmonParams::default();
                Some(GmonParams {
                    n: n.unwrap_or(d.n),
                    coupling_hz: coupling_hz.unwrap_or(d.coupling_hz),
                    anharmonicity_hz: anharmonicity_hz.unwrap_or(d.anharmonicity_hz),
                    carrier_hz: carrier_hz.unwrap_or(d.carrier_hz),
                    cutoff_hz: cutoff_hz.unwrap_or(d.cutoff_hz),
                    boltzmann: boltzmann.unwrap_or(d.boltzmann),
                    gamma_max: gamma_max.unwrap_or(d.gamma_max),
                    detuning_max_hz: detuning_max_hz.unwrap_or(d.detuning_max_hz),
                    drive_max_hz: drive_max_hz.unwrap_or(d.drive_max_hz),
                })
            }
            _ => None,
        }
    }

    /// (n, J, γ*) of an Ising chain.
    pub fn chain(&self) -> Option<(usize, f64, f64)> {
        match self {
            ModelConfig::Ising { n, j, gamma_max, .. } | ModelConfig::IsingThermal { n, j, gamma_max, .. } => {
                Some((*n, *j, *gamma_max))
            }
            _ => None,
        }
    }

    /// Noise class used for reachability verdicts, when it is one of the
    /// classified kinds.
    pub fn noise_kind(&self) -> Option<NoiseKind> {
        match self {
            ModelConfig::Ising { .. } => match self.theta().ok()?? {
                t if t == 0.0 => Some(NoiseKind::AmplitudeDamping),
                t if t == FRAC_PI_2 => Some(NoiseKind::BitFlip),
                _ => None,
            },
            ModelConfig::IsingThermal { b, .. } => Some(NoiseKind::Thermal { b: *b }),
            ModelConfig::IonTrap { .. } => Some(NoiseKind::AmplitudeDamping),
            ModelConfig::Gmon { .. } => None,
        }
    }

    fn boltzmann(&self) -> Option<f64> {
        match self {
            ModelConfig::IsingThermal { b, .. } => Some(*b),
            _ => None,
        }
    }
}

impl ExperimentConfig {
    pub fn model(&self) -> Result<&ModelConfig> {
        self.model.as_ref().ok_or_else(|| anyhow!("task {:?} needs a [model] section", self.task))
    }

    pub fn problem(&self) -> Result<&ProblemConfig> {
        self.problem.as_ref().ok_or_else(|| anyhow!("task {:?} needs a [problem] section", self.task))
    }

    /// Noise kind from [reachability], else inferred from the model.
    pub fn noise_kind(&self) -> Result<Option<NoiseKind>> {
        if let Some(r) = &self.reachability {
            return Ok(Some(match r.noise {
                NoiseLabel::AmplitudeDamping => NoiseKind::AmplitudeDamping,
                NoiseLabel::BitFlip => NoiseKind::BitFlip,
                NoiseLabel::Thermal => NoiseKind::Thermal {
                    b: r
                        .b
                        .or(self.model.as_ref().and_then(ModelConfig::boltzmann))
                        .ok_or_else(|| anyhow!("thermal reachability needs `b`"))?,
                },
            }));
        }
        Ok(self.model.as_ref().and_then(ModelConfig::noise_kind))
    }
}

/// A state spec that names a file.
pub fn file_spec(spec: &str) -> Option<&str> {
    spec.strip_prefix("file:")
}

fn diag_state(list: &str, dims: &[usize]) -> Result<DensityOperator> {
    let w: Vec<f64> = list
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| anyhow!("bad diag entry '{s}': {e}")))
        .collect::<Result<_>>()?;
    let n: usize = dims.iter().product();
    if w.len() != n {
        bail!("diag state has {} entries, system dimension is {n}", w.len());
    }
    if w.iter().any(|v| !(*v >= 0.0)) {
        bail!("diag entries must be non-negative");
    }
    let s: f64 = w.iter().sum();
    if !(s > 0.0) {
        bail!("diag entries sum to zero");
    }
    let p: Vec<f64> = w.iter().map(|v| v / s).collect();
    Ok(DensityOperator::from_diagonal(&p, dims.to_vec())?)
}

fn qubit_count(dims: &[usize], what: &str) -> Result<usize> {
    if dims.iter().any(|&d| d != 2) {
        bail!("{what} state needs a qubit register");
    }
    Ok(dims.len())
}

/// Builds the instances of the problem section. With `check_files` false a
/// `file:` spec that does not exist yields no instances instead of an error.
pub fn instances(loaded: &LoadedConfig, system: &ControlSystem, check_files: bool) -> Result<Vec<Instance>> {
    let cfg = &loaded.config;
    let p = cfg.problem()?;
    let dims = system.dims.clone();
    let b = || p.b.or(cfg.model.as_ref().and_then(ModelConfig::boltzmann));
    let fixed = |spec: &str| -> Result<Option<TargetState>> {
        let state = match spec {
            "alg_cooling" | "test2" => {
                let n = qubit_count(&dims, spec)?;
                let b = b().ok_or_else(|| anyhow!("state '{spec}' needs a Boltzmann factor `b`"))?;
                let rho = if spec == "test2" { test2_target(n, b)? } else { algorithmic_cooling_state(n, b)? };
                TargetState { state: rho, label: spec.into() }
            }
            s if s.starts_with("diag:") => TargetState { state: diag_state(&s[5..], &dims)?, label: s.into() },
            s => {
                if let Some(f) = file_spec(s) {
                    let path = loaded.resolve(f);
                    if !path.exists() {
                        if check_files {
                            bail!("state file {} does not exist", path.display());
                        }
                        return Ok(None);
                    }
                    let label = format!("file:{}", path.display());
                    target_state(&label, &dims).with_context(|| format!("loading {}", path.display()))?
                } else {
                    target_state(s, &dims)?
                }
            }
        };
        Ok(Some(state))
    };
    let random = |spec: &str| matches!(spec, "random" | "majorized");
    if p.initial == "majorized" {
        bail!("`majorized` is a target spec; use initial = \"random\"");
    }
    if p.target == "majorized" && p.initial != "random" {
        bail!("target `majorized` needs initial = \"random\"");
    }
    if !random(&p.initial) && !random(&p.target) {
        if p.pair_seeds.is_some() {
            bail!("pair_seeds given but no state is random");
        }
        let (Some(init), Some(target)) = (fixed(&p.initial)?, fixed(&p.target)?) else {
            return Ok(Vec::new());
        };
        return Ok(vec![Instance { label: "main".into(), initial: init.state, target }]);
    }
    let seeds = p.pair_seeds.as_ref().filter(|s| !s.is_empty()).ok_or_else(|| anyhow!("random states need pair_seeds"))?;
    let mut out = Vec::new();
    for &seed in seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (initial, target) = if p.target == "majorized" {
            let (a, t) = random_majorized_pair(&dims, p.transforms, &mut rng)?;
            (a, TargetState { state: t, label: format!("majorized(seed {seed})") })
        } else {
            let initial = if p.initial == "random" {
                random_density(&dims, &mut rng)?
            } else {
                match fixed(&p.initial)? {
                    Some(s) => s.state,
                    None => return Ok(Vec::new()),
                }
            };
            let target = if p.target == "random" {
                TargetState { state: random_density(&dims, &mut rng)?, label: format!("random(seed {seed})") }
            } else {
                match fixed(&p.target)? {
                    Some(s) => s,
                    None => return Ok(Vec::new()),
                }
            };
            (initial, target)
        };
        out.push(Instance { label: format!("pair{seed}"), initial, target });
    }
    Ok(out)
}

pub fn problem_for(system: &ControlSystem, p: &ProblemConfig, inst: &Instance, tau: f64) -> Result<Problem> {
    Ok(Problem::new(system.clone(), inst.initial.clone(), inst.target.clone(), tau, p.slices)?)
}

/// Structural checks that do not need the model to be built.
pub fn check_sections(cfg: &ExperimentConfig) -> Result<()> {
    cfg.optimizer.validate()?;
    match cfg.task {
        Task::Optimize => {
            cfg.model()?;
            let p = cfg.problem()?;
            match p.tau {
                Some(t) if t > 0.0 && t.is_finite() => {}
                _ => bail!("optimize needs a positive problem.tau"),
            }
        }
        Task::Sweep => {
            cfg.model()?;
            let p = cfg.problem()?;
            let taus = p.taus.as_ref().ok_or_else(|| anyhow!("sweep needs problem.taus"))?;
            if taus.is_empty() || taus.iter().any(|t| !(*t > 0.0) || !t.is_finite()) {
                bail!("problem.taus must be a non-empty list of positive durations");
            }
            if p.bound.is_some() && cfg.model()?.chain().is_none() {
                bail!("a reference bound needs an Ising chain model");
            }
        }
        Task::Protocol => {
            let m = cfg.model()?;
            cfg.problem()?;
            let pr = cfg.protocol.as_ref().ok_or_else(|| anyhow!("protocol task needs a [protocol] section"))?;
            let o = pr.plan_options();
            if !(o.budget > 0.0) || o.trotter_k == 0 || !(o.tolerance > 0.0) {
                bail!("protocol budget, trotter_k and tolerance must be positive");
            }
            if matches!(pr.kind, ProtocolKind::Cooling | ProtocolKind::ErasureAmpDamp | ProtocolKind::ErasureBitFlip) {
                let want = match pr.kind {
                    ProtocolKind::ErasureBitFlip => QubitNoise::BitFlip,
                    _ => QubitNoise::AmplitudeDamping,
                };
                let theta = m.theta()?;
                let expected = if want == QubitNoise::BitFlip { FRAC_PI_2 } else { 0.0 };
                if theta != Some(expected) {
                    bail!("protocol {:?} needs an ising model with {want:?} noise", pr.kind);
                }
                if pr.kind != ProtocolKind::ErasureAmpDamp && !pr.delta_f.is_some_and(|d| d > 0.0) {
                    bail!("protocol {:?} needs a positive delta_f", pr.kind);
                }
            }
        }
        Task::Reachability => {
            cfg.problem()?;
            if cfg.model.is_none() {
                bail!("reachability needs a [model] section for the state dimensions");
            }
        }
        Task::Bath => {
            let b = cfg.bath.as_ref().ok_or_else(|| anyhow!("bath task needs a [bath] section"))?;
            if b.omegas.is_empty() {
                bail!("bath.omegas is empty");
            }
        }
        Task::ValidateTimescales => {
            let t = cfg.timescales.as_ref().ok_or_else(|| anyhow!("validate_timescales needs a [timescales] section"))?;
            if t.preset.as_deref().is_some_and(|p| p != "gmon") {
                bail!("unknown timescale preset {:?}", t.preset);
            }
        }
    }
    Ok(())
}
