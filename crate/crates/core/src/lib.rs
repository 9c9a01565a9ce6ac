//! Simulation and optimal control of open quantum systems whose coherent
//! dynamics are fully controllable and whose single local noise channel can be
//! switched on and off.

pub mod bath;
pub mod error;
pub mod models;
pub mod numerics;
pub mod optimize;
pub mod propagation;
pub mod protocols;
pub mod quantum;
pub mod tolerances;

pub use error::{Error, Result};
pub use models::{ControlSystem, Control, TargetSpec};
pub use numerics::{ComplexMatrix, C64};
pub use optimize::{OptimizationResult, OptimizerConfig, Problem};
pub use propagation::{ControlSequence, Trajectory};
pub use protocols::{ProtocolPlan, ReachabilityVerdict};
pub use quantum::{DensityOperator, LindbladChannel, Superoperator};
