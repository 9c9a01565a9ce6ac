use serde::{Deserialize, Serialize};

use super::majorization::{hlp_chain, majorization_floor, majorizes, MajorizationCertificate};
use super::thermal::algorithmic_cooling_state;
use crate::error::{Error, Result};
use crate::quantum::spectrum_descending;
use crate::DensityOperator;

/// Spectra closer than this (max-norm) are treated as equal.
const SPECTRUM_EQUAL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum NoiseKind {
    AmplitudeDamping,
    BitFlip,
    /// Bath with Boltzmann factor b > 1 in the qubit convention.
    Thermal { b: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reachability {
    YesExact,
    YesAsymptotic,
    No,
    ConservativeUnknown,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReachabilityVerdict {
    pub reachable: Reachability,
    pub witness: Option<MajorizationCertificate>,
    /// Lower bound on δ_F when the target violates majorization.
    pub error_floor: Option<f64>,
    pub reason: String,
}

impl ReachabilityVerdict {
    fn new(reachable: Reachability, reason: &str) -> Self {
        ReachabilityVerdict { reachable, witness: None, error_floor: None, reason: reason.into() }
    }
}

fn same(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(p, q)| (p - q).abs() <= SPECTRUM_EQUAL)
}

/// Verdict from spectra alone. Equal spectra are reachable exactly by unitary
/// control for every noise kind; asymptotic verdicts hold in the limit
/// γτ → ∞.
pub fn reachability_verdict(
    rho0: &DensityOperator,
    target: &DensityOperator,
    noise: NoiseKind,
) -> Result<ReachabilityVerdict> {
    if rho0.dims != target.dims {
        return Err(Error::dim(format!("dims {:?} vs {:?}", rho0.dims, target.dims)));
    }
    let y = spectrum_descending(rho0)?;
    let x = spectrum_descending(target)?;
    if same(&x, &y) {
        let mut v = ReachabilityVerdict::new(Reachability::YesExact, "spectra coincide; unitary control suffices");
        v.witness = Some(MajorizationCertificate::new(&y, &x));
        return Ok(v);
    }
    match noise {
        NoiseKind::AmplitudeDamping => Ok(ReachabilityVerdict::new(
            Reachability::YesAsymptotic,
            "amplitude damping with full unitary control acts transitively in the closure",
        )),
        NoiseKind::BitFlip => {
            let cert = MajorizationCertificate::new(&y, &x);
            if majorizes(&x, &y)? {
                let asymptotic = hlp_chain(&y, &x)?.iter().any(|s| s.transform.is_averaging());
                let (r, why) = if asymptotic {
                    (Reachability::YesAsymptotic, "majorized; the T-transform chain needs a full averaging step")
                } else {
                    (Reachability::YesExact, "majorized; every T-transform completes in finite time")
                };
                let mut v = ReachabilityVerdict::new(r, why);
                v.witness = Some(cert);
                Ok(v)
            } else {
                let mut v = ReachabilityVerdict::new(Reachability::No, "target is not majorized by the initial state");
                v.error_floor = Some(majorization_floor(&y, &x));
                v.witness = Some(cert);
                Ok(v)
            }
        }
        NoiseKind::Thermal { b } => thermal_verdict(&x, b, &rho0.dims),
    }
}

fn thermal_verdict(x: &[f64], b: f64, dims: &[usize]) -> Result<ReachabilityVerdict> {
    if !(b > 1.0) || !b.is_finite() {
        return Err(Error::domain(format!("Boltzmann factor {b} must be finite and > 1")));
    }
    let n = x.len();
    if x.iter().all(|p| (p - 1.0 / n as f64).abs() <= SPECTRUM_EQUAL) {
        return Ok(ReachabilityVerdict::new(
            Reachability::YesAsymptotic,
            "the maximally mixed state is reached by pairwise averaging",
        ));
    }
    if dims.iter().any(|&d| d != 2) {
        return Ok(ReachabilityVerdict::new(
            Reachability::ConservativeUnknown,
            "finite-temperature inclusions are stated for qubit registers",
        ));
    }
    let alg = spectrum_descending(&algorithmic_cooling_state(dims.len(), b)?)?;
    if !majorizes(x, &alg)? {
        return Ok(ReachabilityVerdict::new(
            Reachability::ConservativeUnknown,
            "target is not majorized by the algorithmic-cooling state",
        ));
    }
    // each T-transform of the chain from ρ_alg must respect the stopping condition
    let chain = hlp_chain(&alg, x)?;
    let feasible = chain.iter().all(|s| {
        let (p, q) = (s.before[s.transform.i], s.before[s.transform.j]);
        q > 0.0 && p / q <= b * (1.0 + 1e-12)
    });
    let mut v = if feasible {
        ReachabilityVerdict::new(
            Reachability::YesAsymptotic,
            "majorized by the algorithmic-cooling state via stopping-condition-feasible T-transforms",
        )
    } else {
        ReachabilityVerdict::new(
            Reachability::ConservativeUnknown,
            "a T-transform of the chain violates the stopping condition",
        )
    };
    v.witness = Some(MajorizationCertificate::new(&alg, x));
    Ok(v)
}
