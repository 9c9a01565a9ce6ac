//! Numerical tolerances shared by the library and its tests.

/// Hermiticity check for operators handed to eigen- and commutator routines.
pub const HERMITIAN: f64 = 1e-10;
/// Trace, Hermiticity and positivity checks on density operators.
pub const DENSITY: f64 = 1e-10;
/// Rank tolerance for the Lie-closure Gram-Schmidt.
pub const LIE_RANK: f64 = 1e-9;
/// Entries with modulus below this are dropped when building sparse operators.
pub const SPARSE_DROP: f64 = 0.0;
/// Truncation target for the Taylor series in the sparse propagators.
pub const TAYLOR_TRUNCATION: f64 = 1e-18;
/// Absolute tolerance of the adaptive principal-value quadrature.
pub const QUADRATURE_ABS: f64 = 1e-8;
/// Upper integration limit of the principal-value part, in units of the cutoff.
pub const QUADRATURE_CEILING: f64 = 50.0;
/// Relative-ratio slack for the Born-Markov timescale separation.
pub const TIMESCALE_SEPARATION: f64 = 10.0;
/// Rounding slack used when comparing majorization partial sums.
pub const MAJORIZATION: f64 = 1e-12;
/// Probabilities below this count as zero in switching-time formulas.
pub const POPULATION_FLOOR: f64 = 1e-15;
/// Trace slack on trajectories.
pub const TRAJECTORY_TRACE: f64 = 1e-10;
/// Positivity slack on trajectories.
pub const TRAJECTORY_POSITIVITY: f64 = 1e-8;
