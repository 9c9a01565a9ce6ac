//! Constructive transfer schemes and reachability: majorization and
//! T-transforms, switching and stopping times for damping, bit-flip and
//! thermal noise, and plans of unitary and noise steps that run through the
//! propagation module.

mod majorization;
mod plan;
mod reach;
mod schemes;
mod switching;
mod thermal;

pub use majorization::{
    hlp_chain, hlp_t_transforms, majorization_floor, majorizes, partial_sums, HlpStep, MajorizationCertificate,
    TTransform,
};
pub use plan::{permutation_unitary, protect_unitary, qubit_permutation, PlanStep, ProtocolPlan};
pub use reach::{reachability_verdict, NoiseKind, Reachability, ReachabilityVerdict};
pub use schemes::{
    cooling_bound_error, cooling_duration_bound, cooling_protocol, cooling_residual, erasure_bit_flip_bound,
    erasure_bit_flip_residual, erasure_bound_error, erasure_protocol, greedy_equalize_plan, hlp_full_plan,
    ErasureMode, PlanOptions,
};
pub use switching::{
    amp_damp_switch_time, apply_terminal, finite_t_switch_time, r_a, r_b, r_theta, t_transform_epsilon,
    t_transform_noise_duration, theta_switch_time, NoiseDuration,
};
pub use thermal::{alg_partition, algorithmic_cooling_state, test2_target};
