use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Noise time needed for a T-transform.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseDuration {
    Finite(f64),
    /// λ = ½, reached only as γτ → ∞.
    Asymptotic,
}

impl NoiseDuration {
    /// Seconds (or 1/J) to spend, truncating the asymptotic case at γτ = `budget`.
    pub fn truncated(self, gamma: f64, budget: f64) -> f64 {
        match self {
            NoiseDuration::Finite(t) => t,
            NoiseDuration::Asymptotic => budget / gamma,
        }
    }
}

/// Bit-flip noise time realizing a λ-weighted transposition,
/// τ = −ln|1 − 2λ|/γ. λ > ½ is realized by swapping the pair first, which the
/// absolute value already accounts for.
pub fn t_transform_noise_duration(lambda: f64, gamma: f64) -> Result<NoiseDuration> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::domain(format!("lambda {lambda} outside [0, 1]")));
    }
    if !(gamma > 0.0) {
        return Err(Error::domain("rate must be positive"));
    }
    let a = (1.0 - 2.0 * lambda).abs();
    if a <= 1e-12 {
        return Ok(NoiseDuration::Asymptotic);
    }
    Ok(NoiseDuration::Finite(-a.ln() / gamma))
}

fn check_rate_time(gamma: f64, tau: f64) -> Result<()> {
    if !(gamma > 0.0) || !(tau >= 0.0) {
        return Err(Error::domain("need gamma > 0 and tau >= 0"));
    }
    Ok(())
}

/// Time after which a pair swap neutralizes amplitude damping of the pair
/// (ρ_ii, ρ_jj) over a total time τ.
pub fn amp_damp_switch_time(ratio: f64, gamma: f64, tau: f64) -> Result<f64> {
    check_rate_time(gamma, tau)?;
    if !(ratio > 0.0) {
        return Err(Error::domain("population ratio must be positive"));
    }
    Ok(((ratio * (gamma * tau).exp() + 1.0) / (ratio + 1.0)).ln() / gamma)
}

/// Switch time for a thermal bath with Boltzmann factor b > 1; `None` when
/// the ratio violates the stopping condition b⁻¹ ≤ ratio ≤ b.
pub fn finite_t_switch_time(ratio: f64, b: f64, gamma: f64, tau: f64) -> Result<Option<f64>> {
    check_rate_time(gamma, tau)?;
    if !(b > 1.0) || !b.is_finite() {
        return Err(Error::domain(format!("Boltzmann factor {b} must be finite and > 1")));
    }
    if !(ratio > 0.0) {
        return Err(Error::domain("population ratio must be positive"));
    }
    if ratio < 1.0 / b || ratio > b {
        return Ok(None);
    }
    let num = (gamma * tau).exp() * (ratio * b - 1.0) + (b - ratio);
    let den = (b - 1.0) * (ratio + 1.0);
    Ok(Some((num / den).ln() / gamma))
}

/// Switch time for the generator V_θ, 0 ≤ θ < π/2; `None` outside
/// tan²(θ/2) ≤ ratio ≤ cot²(θ/2).
pub fn theta_switch_time(ratio: f64, theta: f64, gamma: f64, tau: f64) -> Result<Option<f64>> {
    check_rate_time(gamma, tau)?;
    if !(0.0..std::f64::consts::FRAC_PI_2).contains(&theta) {
        return Err(Error::domain(format!("theta {theta} outside [0, pi/2)")));
    }
    let t2 = (theta / 2.0).tan().powi(2);
    if ratio < t2 || ratio * t2 > 1.0 {
        return Ok(None);
    }
    let num = (gamma * tau).exp() * (ratio - t2) + (1.0 - t2 * ratio);
    let den = (1.0 - t2) * (ratio + 1.0);
    Ok(Some((num / den).ln() / gamma))
}

/// ε = e^{−γτ} at which thermal relaxation of a pair with ratio = ρ_ii/ρ_jj ≤ 1
/// equals the λ-weighted T-transform. Values outside (0, 1] mean the λ range
/// must be split with a swap.
pub fn t_transform_epsilon(lambda: f64, b: f64, ratio: f64) -> f64 {
    1.0 - lambda * (1.0 + b) * (1.0 - ratio) / (b - ratio)
}

/// Single-qubit population map of V_θ noise over γt:
/// cos θ·R_a + (1 − cos θ)·R_b, acting on (p₀, p₁).
pub fn r_theta(theta: f64, gamma_t: f64) -> [[f64; 2]; 2] {
    let e = (-gamma_t).exp();
    let (c, s) = (theta.cos(), 1.0 - theta.cos());
    [
        [c + s * 0.5 * (1.0 + e), c * (1.0 - e) + s * 0.5 * (1.0 - e)],
        [s * 0.5 * (1.0 - e), c * e + s * 0.5 * (1.0 + e)],
    ]
}

pub fn r_a(gamma_t: f64) -> [[f64; 2]; 2] {
    r_theta(0.0, gamma_t)
}

pub fn r_b(gamma_t: f64) -> [[f64; 2]; 2] {
    r_theta(std::f64::consts::FRAC_PI_2, gamma_t)
}

/// Applies I^{⊗(n−1)} ⊗ R to a population vector whose last tensor factor is
/// the noisy qubit, so levels 2m and 2m+1 form the pairs.
pub fn apply_terminal(r: &[[f64; 2]; 2], pops: &[f64]) -> Result<Vec<f64>> {
    if pops.len() % 2 != 0 {
        return Err(Error::dim("population vector length must be even"));
    }
    Ok(pops
        .chunks(2)
        .flat_map(|p| [r[0][0] * p[0] + r[0][1] * p[1], r[1][0] * p[0] + r[1][1] * p[1]])
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::thermal_propagator;

    #[test]
    fn noise_durations() {
        assert_eq!(t_transform_noise_duration(0.0, 1.0).unwrap(), NoiseDuration::Finite(0.0));
        assert_eq!(t_transform_noise_duration(0.5, 1.0).unwrap(), NoiseDuration::Asymptotic);
        let NoiseDuration::Finite(t) = t_transform_noise_duration(0.25, 1.0).unwrap() else { panic!() };
        assert!((t - 2f64.ln()).abs() < 1e-15);
        let NoiseDuration::Finite(t2) = t_transform_noise_duration(0.75, 1.0).unwrap() else { panic!() };
        assert!((t - t2).abs() < 1e-15);
        assert!(t_transform_noise_duration(1.5, 1.0).is_err());
    }

    #[test]
    fn bit_flip_realizes_quarter_transform() {
        let r = r_b(2f64.ln());
        let p = apply_terminal(&r, &[0.8, 0.2]).unwrap();
        assert!((p[0] - (0.75 * 0.8 + 0.25 * 0.2)).abs() < 1e-15);
    }

    #[test]
    fn amp_damp_switch_examples() {
        assert!(amp_damp_switch_time(3.0, 1.0, 0.0).unwrap().abs() < 1e-15);
        let t = amp_damp_switch_time(1.0, 1.0, 4f64.ln()).unwrap();
        assert!((t - 2.5f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn amp_damp_neutralization() {
        let (gamma, tau) = (1.3, 0.9);
        let (a, b) = (0.35, 0.15);
        let t = amp_damp_switch_time(a / b, gamma, tau).unwrap();
        let p = apply_terminal(&r_a(gamma * t), &[a, b]).unwrap();
        let p = apply_terminal(&r_a(gamma * (tau - t)), &[p[1], p[0]]).unwrap();
        assert!((p[1] - a).abs() < 1e-12 && (p[0] - b).abs() < 1e-12);
    }

    #[test]
    fn finite_t_boundary_and_limits() {
        let t = finite_t_switch_time(3.0, 3.0, 0.7, 1.9).unwrap().unwrap();
        assert!((t - 1.9).abs() < 1e-12);
        assert_eq!(finite_t_switch_time(4.0, 3.0, 1.0, 1.0).unwrap(), None);
        assert_eq!(finite_t_switch_time(0.2, 3.0, 1.0, 1.0).unwrap(), None);
        let big = finite_t_switch_time(2.0, 1e6, 1.0, 3.0).unwrap().unwrap();
        let zero_t = amp_damp_switch_time(2.0, 1.0, 3.0).unwrap();
        assert!((big - zero_t).abs() / zero_t < 1e-4);
    }

    #[test]
    fn theta_formula_matches_thermal() {
        let b: f64 = 2.5;
        let theta = 2.0 * (1.0 / b).sqrt().atan();
        let a = theta_switch_time(1.7, theta, 1.1, 0.8).unwrap().unwrap();
        let c = finite_t_switch_time(1.7, b, 1.1, 0.8).unwrap().unwrap();
        assert!((a - c).abs() < 1e-12);
        assert!((theta_switch_time(1.7, 0.0, 1.1, 0.8).unwrap().unwrap()
            - amp_damp_switch_time(1.7, 1.1, 0.8).unwrap())
        .abs()
            < 1e-14);
    }

    #[test]
    fn thermal_neutralization() {
        // ρ_ii sits on |0⟩ of the bath qubit
        let (b, gamma, tau) = (3.0, 1.0, 1.2);
        let (pi, pj) = (0.4, 0.25);
        let t = finite_t_switch_time(pi / pj, b, gamma, tau).unwrap().unwrap();
        let step = |p: [f64; 2], s: f64| {
            let r = thermal_propagator(b, gamma, s).unwrap();
            [r[0][0] * p[0] + r[0][1] * p[1], r[1][0] * p[0] + r[1][1] * p[1]]
        };
        let p = step([pi, pj], t);
        let p = step([p[1], p[0]], tau - t);
        assert!((p[1] - pi).abs() < 1e-12 && (p[0] - pj).abs() < 1e-12, "{p:?}");
    }

    #[test]
    fn epsilon_realizes_t_transform() {
        let (b, lambda) = (3.0, 0.3);
        let (pi, pj) = (0.2, 0.5);
        let eps = t_transform_epsilon(lambda, b, pi / pj);
        assert!(eps > 0.0 && eps <= 1.0);
        let r = thermal_propagator(b, 1.0, -eps.ln()).unwrap();
        let p = [r[0][0] * pi + r[0][1] * pj, r[1][0] * pi + r[1][1] * pj];
        assert!((p[0] - ((1.0 - lambda) * pi + lambda * pj)).abs() < 1e-12, "{p:?}");
        assert_eq!(t_transform_epsilon(0.0, b, 0.3), 1.0);
        assert_eq!(t_transform_epsilon(0.7, b, 1.0), 1.0);
    }

    #[test]
    fn population_maps_are_stochastic() {
        for gt in [0.0, 0.3, 2.0, 40.0] {
            let a = r_a(gt);
            let b = r_b(gt);
            for c in 0..2 {
                assert!((a[0][c] + a[1][c] - 1.0).abs() < 1e-15);
                assert!((b[0][c] + b[1][c] - 1.0).abs() < 1e-15);
                assert!((b[c][0] + b[c][1] - 1.0).abs() < 1e-15);
            }
        }
    }
}
