//! Chain of GMon qutrits in the frame rotating with the drive carrier.
//! Time is measured in units of 1/J; a frequency f in Hz becomes the angular
//! value 2πf/J.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{Control, ControlSystem};
use crate::bath::{self, BathSpec, Statistics};
use crate::error::{Error, Result};
use crate::numerics::{self, dagger, ComplexMatrix, C64};
use crate::quantum::{embed_local, LindbladChannel, WeightedJump};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GmonParams {
    pub n: usize,
    /// J in Hz; sets the time unit.
    pub coupling_hz: f64,
    pub anharmonicity_hz: f64,
    pub carrier_hz: f64,
    pub cutoff_hz: f64,
    /// b = e^{−βω_d} < 1.
    pub boltzmann: f64,
    /// γ* in units of J.
    pub gamma_max: f64,
    pub detuning_max_hz: f64,
    pub drive_max_hz: f64,
}

impl Default for GmonParams {
    fn default() -> Self {
        GmonParams {
            n: 2,
            coupling_hz: 160e6,
            anharmonicity_hz: 400e6,
            carrier_hz: 4.8e9,
            cutoff_hz: 40e9,
            boltzmann: 1e-3,
            gamma_max: 5.0,
            detuning_max_hz: 200e6,
            drive_max_hz: 0.8e9,
        }
    }
}

impl GmonParams {
    /// 2πf/J
    pub fn angular(&self, hz: f64) -> f64 {
        2.0 * PI * hz / self.coupling_hz
    }

    pub fn time_unit_seconds(&self) -> f64 {
        1.0 / self.coupling_hz
    }

    pub fn bath(&self) -> Result<BathSpec> {
        if !(self.boltzmann > 0.0 && self.boltzmann < 1.0) {
            return Err(Error::domain(format!("GMon Boltzmann factor {} must lie in (0, 1)", self.boltzmann)));
        }
        let wd = self.angular(self.carrier_hz);
        let spec = BathSpec {
            beta: -self.boltzmann.ln() / wd,
            cutoff: self.angular(self.cutoff_hz),
            statistics: Statistics::Boson,
            transition: wd,
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Truncated annihilation operator on three levels.
pub fn annihilation() -> ComplexMatrix {
    let mut a = numerics::zeros(3);
    a[[0, 1]] = C64::new(1.0, 0.0);
    a[[1, 2]] = C64::new(2f64.sqrt(), 0.0);
    a
}

pub fn gmon_chain(p: &GmonParams) -> Result<ControlSystem> {
    if p.n == 0 {
        return Err(Error::domain("GMon chain needs at least one qutrit"));
    }
    if !(p.coupling_hz > 0.0) || !(p.gamma_max >= 0.0) {
        return Err(Error::domain("coupling must be positive and gamma_max non-negative"));
    }
    let spec = p.bath()?;
    let dims = vec![3; p.n];
    let dim = 3usize.pow(p.n as u32);
    let a = annihilation();
    let ad = dagger(&a);
    let num = ad.dot(&a);
    let mut level2 = numerics::zeros(3);
    level2[[2, 2]] = C64::new(1.0, 0.0);

    let mut drift = numerics::zeros(dim);
    for k in 0..p.n.saturating_sub(1) {
        let hop = embed_local(&ad, k, &dims)?.dot(&embed_local(&a, k + 1, &dims)?);
        let term = &hop + &dagger(&hop);
        drift = drift + term.mapv(|z| z * (PI * 0.5));
    }
    let delta = p.angular(p.anharmonicity_hz);
    for k in 0..p.n {
        drift = drift - embed_local(&level2, k, &dims)?.mapv(|z| z * delta);
    }

    let det = p.angular(p.detuning_max_hz);
    let drive = p.angular(p.drive_max_hz);
    let mut controls = Vec::new();
    for k in 0..p.n {
        controls.push(Control {
            label: format!("detuning{k}"),
            operator: embed_local(&num, k, &dims)?,
            bounds: Some((-det, det)),
        });
    }
    let mut hx = numerics::zeros(dim);
    let mut hy = numerics::zeros(dim);
    let i = C64::new(0.0, 1.0);
    for k in 0..p.n {
        let ak = embed_local(&a, k, &dims)?;
        let akd = dagger(&ak);
        hx = hx + (&ak + &akd).mapv(|z| z * 0.5);
        hy = hy + (&ak - &akd).mapv(|z| z * i * 0.5);
    }
    controls.push(Control { label: "drive_x".into(), operator: hx, bounds: Some((-drive, drive)) });
    controls.push(Control { label: "drive_y".into(), operator: hy, bounds: Some((-drive, drive)) });

    let site = p.n - 1;
    let b = spec.boltzmann();
    let ratio = bath::gmon_lamb_ratio(&spec)?;
    // Γ = ½(Γ_a/(b+1) + Γ_{a†}/(b⁻¹+1)) per unit rate
    let channel = LindbladChannel {
        label: "bath".into(),
        jumps: vec![
            WeightedJump { weight: 0.5 / (b + 1.0), operator: embed_local(&a, site, &dims)? },
            WeightedJump { weight: 0.5 * b / (b + 1.0), operator: embed_local(&ad, site, &dims)? },
        ],
        max_rate: p.gamma_max,
        switchable: true,
        lamb_ratio: 0.0,
        lamb_operator: numerics::zeros(dim),
    }
    .with_lamb(ratio, embed_local(&num, site, &dims)?)?;

    let system = ControlSystem {
        name: format!("gmon_chain(n={})", p.n),
        dims,
        drift,
        controls,
        channels: vec![channel],
        static_channels: vec![],
        noise_site: site,
    };
    system.validate()?;
    Ok(system)
}

/// γ = 2κ²γ(ω_d)(b+1), the channel rate produced by coupling κ.
pub fn kappa_to_rate(kappa: f64, spec: &BathSpec) -> Result<f64> {
    Ok(2.0 * kappa * kappa * bath::damping_rate(spec.transition, spec)? * (spec.boltzmann() + 1.0))
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct EinsteinCoefficients {
    pub g10: f64,
    pub g01: f64,
    pub g21: f64,
    pub g12: f64,
}

/// Transition rates of a single undriven GMon coupled with strength κ.
pub fn einstein_coefficients(spec: &BathSpec, kappa: f64) -> Result<EinsteinCoefficients> {
    let k2 = kappa * kappa;
    let down = bath::damping_rate(spec.transition, spec)?;
    let up = bath::damping_rate(-spec.transition, spec)?;
    Ok(EinsteinCoefficients { g10: k2 * down, g01: k2 * up, g21: 2.0 * k2 * down, g12: 2.0 * k2 * up })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::vec_matrix;

    #[test]
    fn defaults_match_device() {
        let p = GmonParams::default();
        assert!((p.time_unit_seconds() - 6.25e-9).abs() < 1e-15);
        assert!((p.angular(p.anharmonicity_hz) - 5.0 * PI).abs() < 1e-12);
        let t = bath::bath_temperature_kelvin(p.boltzmann, p.carrier_hz);
        assert!((t - 0.035).abs() < 0.003);
    }

    #[test]
    fn detailed_balance_and_einstein() {
        let p = GmonParams::default();
        let s = gmon_chain(&p).unwrap();
        let ch = &s.channels[0];
        let b = p.bath().unwrap().boltzmann();
        assert!((ch.jumps[1].weight / ch.jumps[0].weight - b).abs() < 1e-15);
        assert!((ch.lamb_ratio - bath::gmon_lamb_ratio_closed_form(b, 40.0 / 4.8)).abs() < 1e-3 * ch.lamb_ratio.abs());

        let spec = p.bath().unwrap();
        let e = einstein_coefficients(&spec, 0.01).unwrap();
        assert!((e.g21 / e.g10 - 2.0).abs() < 1e-15);
        let z = einstein_coefficients(&spec, 0.0).unwrap();
        assert_eq!((z.g10, z.g01, z.g21, z.g12), (0.0, 0.0, 0.0, 0.0));

        // one GMon: ⟨0|(−γΓ)(|1⟩⟨1|)|0⟩ equals Γ₁→₀ for γ = kappa_to_rate(κ)
        let single = gmon_chain(&GmonParams { n: 1, gamma_max: 1e6, ..p }).unwrap();
        let kappa = 0.01;
        let gamma = kappa_to_rate(kappa, &spec).unwrap();
        let diss = single.channels[0].dissipator();
        let mut one = numerics::zeros(3);
        one[[1, 1]] = C64::new(1.0, 0.0);
        let out = diss.apply(&vec_matrix(&one));
        assert!(((-out[0].re) * gamma - e.g10).abs() < 1e-9 * e.g10.max(1.0));
        let mut two = numerics::zeros(3);
        two[[2, 2]] = C64::new(1.0, 0.0);
        let out2 = diss.apply(&vec_matrix(&two));
        assert!(((-out2[4].re) * gamma - e.g21).abs() < 1e-9 * e.g21.max(1.0));
    }

    #[test]
    fn shapes() {
        let s = gmon_chain(&GmonParams::default()).unwrap();
        assert_eq!(s.dim(), 9);
        assert_eq!(s.n_coherent(), 4);
        assert!(crate::quantum::hamiltonian_controllability(&s));
    }
}
