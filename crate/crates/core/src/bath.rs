//! Ohmic bath with a Lorentz-Drude cutoff: occupations, damping rates,
//! Lamb-shift rates, the thermal qubit dissipator and timescale checks.
//!
//! Units: ℏ = k_B = 1, so β multiplies angular frequencies directly.
//! S(ω) is the principal-value transform (1/2π) P∫ γ(x)/(x − ω) dx. The
//! kernel sign is fixed so that the GMon ratio comes out as
//! −¼·(1−b)/(1+b)·ω_c/ω_d.

use std::collections::BinaryHeap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{self, pauli};
use crate::quantum::{dissipator_superop, Superoperator};
use crate::tolerances;

/// Cutoff ratio |ω_n|/ω_c used by the finite-temperature qubit examples.
pub const DEFAULT_QUBIT_CUTOFF_RATIO: f64 = 0.2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistics {
    Boson,
    Fermion,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BathSpec {
    /// Inverse temperature; 0 encodes infinite temperature, +∞ zero temperature.
    pub beta: f64,
    pub cutoff: f64,
    pub statistics: Statistics,
    /// Signed transition frequency of the coupled system transition.
    pub transition: f64,
}

impl BathSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.cutoff > 0.0) || !self.cutoff.is_finite() {
            return Err(Error::domain(format!("cutoff {} must be positive", self.cutoff)));
        }
        if !(self.beta >= 0.0) {
            return Err(Error::domain(format!("beta {} must be >= 0", self.beta)));
        }
        if !self.transition.is_finite() {
            return Err(Error::domain("transition frequency must be finite"));
        }
        Ok(())
    }

    /// b = e^{−βω} at the transition frequency.
    pub fn boltzmann(&self) -> f64 {
        boltzmann_factor(self.beta, self.transition)
    }
}

fn boltzmann_factor(beta: f64, w: f64) -> f64 {
    let x = beta * w;
    if x.is_nan() {
        1.0
    } else {
        (-x).exp()
    }
}

/// Planck (bosons) or Fermi (fermions) occupation n(ω) = 1/(e^{βω} ∓ 1).
pub fn occupation(w: f64, spec: &BathSpec) -> Result<f64> {
    spec.validate()?;
    let x = spec.beta * w;
    let x = if x.is_nan() { 0.0 } else { x };
    match spec.statistics {
        Statistics::Boson => {
            if x == 0.0 {
                return Err(Error::Numeric(format!("bosonic occupation diverges at βω = 0 (ω = {w})")));
            }
            Ok(1.0 / x.exp_m1())
        }
        Statistics::Fermion => Ok(1.0 / (x.exp() + 1.0)),
    }
}

/// Lorentz-Drude cutoff f(x) = 1/(1+x²).
pub fn cutoff_function(x: f64) -> f64 {
    1.0 / (1.0 + x * x)
}

/// γ(ω) = 2π(1 ± n(ω)) f(|ω|/ω_c) ω for bosons, with |ω| for fermions.
pub fn damping_rate(w: f64, spec: &BathSpec) -> Result<f64> {
    spec.validate()?;
    rate_unchecked(w, spec)
}

fn rate_unchecked(w: f64, spec: &BathSpec) -> Result<f64> {
    let f = cutoff_function(w.abs() / spec.cutoff);
    let x = spec.beta * w;
    match spec.statistics {
        Statistics::Boson => {
            // (1+n)ω = ω/(1 − e^{−βω}), finite at ω = 0 for finite β
            if w == 0.0 {
                if spec.beta == 0.0 {
                    return Err(Error::Numeric("bosonic rate diverges at infinite temperature".into()));
                }
                return Ok(2.0 * PI * f / spec.beta);
            }
            if spec.beta == 0.0 {
                return Err(Error::Numeric("bosonic rate diverges at infinite temperature".into()));
            }
            if x.is_infinite() {
                return Ok(if w > 0.0 { 2.0 * PI * f * w } else { 0.0 });
            }
            Ok(2.0 * PI * f * w / (-(-x).exp_m1()))
        }
        Statistics::Fermion => {
            let one_minus_n = if x.is_infinite() {
                if w > 0.0 { 1.0 } else { 0.0 }
            } else {
                1.0 - 1.0 / (x.exp() + 1.0)
            };
            Ok(2.0 * PI * one_minus_n * f * w.abs())
        }
    }
}

/// Lamb-shift rate S(ω) = (1/2π) P∫ γ(x)/(ω − x) dx by principal-value
/// quadrature.
///
/// The singular part is integrated on [−Ω, Ω] with Ω = 50·ω_c after
/// subtracting γ(ω)/(x − ω); the tails |x| > Ω are mapped onto (0, 1] with
/// x = Ω/t and integrated as well. Adaptive Gauss-Kronrod (7/15) to 1e-8
/// absolute.
pub fn lamb_shift_rate(w: f64, spec: &BathSpec) -> Result<f64> {
    spec.validate()?;
    let ceiling = tolerances::QUADRATURE_CEILING * spec.cutoff;
    if w.abs() >= ceiling {
        return Err(Error::domain(format!("|ω| = {} must stay below the quadrature ceiling {ceiling}", w.abs())));
    }
    let g = |x: f64| rate_unchecked(x, spec);
    let gw = g(w)?;
    let mut err: Option<Error> = None;
    let mut eval = |x: f64| -> f64 {
        match g(x) {
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        }
    };
    let tol = tolerances::QUADRATURE_ABS;
    let mut breaks = vec![-ceiling, ceiling, w];
    if w != 0.0 {
        breaks.push(0.0);
    }
    breaks.sort_by(f64::total_cmp);
    let mut total = 0.0;
    for pair in breaks.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        total += adaptive_gk(
            &mut |x: f64| {
                let d = x - w;
                if d == 0.0 {
                    0.0
                } else {
                    (eval(x) - gw) / d
                }
            },
            a,
            b,
            tol / 4.0,
        )?;
    }
    total += gw * ((ceiling - w) / (ceiling + w)).ln();
    // tails: ∫_Ω^∞ h(x) dx = ∫_0^1 h(Ω/t) Ω/t² dt, likewise for −∞
    for sign in [1.0, -1.0] {
        total += adaptive_gk(
            &mut |t: f64| {
                if t == 0.0 {
                    return 0.0;
                }
                let x = sign * ceiling / t;
                eval(x) / (x - w) * ceiling / (t * t)
            },
            0.0,
            1.0,
            tol / 4.0,
        )?;
    }
    if let Some(e) = err {
        return Err(e);
    }
    Ok(-total / (2.0 * PI))
}

const GK_NODES: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const GK_WEIGHTS: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const G_WEIGHTS: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * GK_WEIGHTS[7];
    let mut gauss = fc * G_WEIGHTS[3];
    for k in 0..7 {
        let x = h * GK_NODES[k];
        let s = f(c - x) + f(c + x);
        kron += GK_WEIGHTS[k] * s;
        if k % 2 == 1 {
            gauss += G_WEIGHTS[k / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive Gauss-Kronrod integration to an absolute tolerance.
pub fn adaptive_gk(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64, abs_tol: f64) -> Result<f64> {
    const MAX_SEGMENTS: usize = 20_000;
    if a == b {
        return Ok(0.0);
    }
    let mut heap = BinaryHeap::new();
    let (v, e) = gk15(f, a, b);
    let mut value = v;
    let mut error = e;
    heap.push(Segment { a, b, value: v, error: e });
    while error > abs_tol {
        if heap.len() >= MAX_SEGMENTS {
            return Err(Error::Numeric(format!(
                "quadrature on [{a}, {b}] did not converge: estimate {value:.6e}, error {error:.3e} after {MAX_SEGMENTS} segments"
            )));
        }
        let seg = heap.pop().expect("non-empty heap");
        let mid = 0.5 * (seg.a + seg.b);
        let (v1, e1) = gk15(f, seg.a, mid);
        let (v2, e2) = gk15(f, mid, seg.b);
        value += v1 + v2 - seg.value;
        error += e1 + e2 - seg.error;
        heap.push(Segment { a: seg.a, b: mid, value: v1, error: e1 });
        heap.push(Segment { a: mid, b: seg.b, value: v2, error: e2 });
    }
    // re-sum to shed accumulated rounding of the running totals
    Ok(heap.iter().map(|s| s.value).sum())
}

/// Closed-form GMon Lamb ratio −¼·(1−b)/(1+b)·ω_c/ω_d.
pub fn gmon_lamb_ratio_closed_form(b: f64, cutoff_over_carrier: f64) -> f64 {
    -0.25 * (1.0 - b) / (1.0 + b) * cutoff_over_carrier
}

/// (S(ω_d) + S(−ω_d)) / (2γ(ω_d)(b+1)) by quadrature, with b = e^{−βω_d}.
pub fn gmon_lamb_ratio(spec: &BathSpec) -> Result<f64> {
    let w = spec.transition;
    let b = spec.boltzmann();
    let s = lamb_shift_rate(w, spec)? + lamb_shift_rate(-w, spec)?;
    Ok(s / (2.0 * damping_rate(w, spec)? * (b + 1.0)))
}

/// (S(ω_n) − S(−ω_n)) / (2γ(ω_n)(b+1)) by quadrature.
pub fn qubit_lamb_ratio(spec: &BathSpec) -> Result<f64> {
    let w = spec.transition;
    let b = spec.boltzmann();
    let s = lamb_shift_rate(w, spec)? - lamb_shift_rate(-w, spec)?;
    Ok(s / (2.0 * damping_rate(w, spec)? * (b + 1.0)))
}

/// Bosonic qubit bath with ω_c = 1, ω_n = −|ω_n| and Boltzmann factor b > 1.
pub fn qubit_bath(b: f64, cutoff_ratio: f64) -> Result<BathSpec> {
    if !(b > 1.0) || !b.is_finite() {
        return Err(Error::domain(format!("qubit bath needs a finite Boltzmann factor b > 1, got {b}")));
    }
    if !(cutoff_ratio > 0.0) || cutoff_ratio >= tolerances::QUADRATURE_CEILING {
        return Err(Error::domain(format!("cutoff ratio {cutoff_ratio} out of range")));
    }
    let wn = cutoff_ratio;
    Ok(BathSpec { beta: b.ln() / wn, cutoff: 1.0, statistics: Statistics::Boson, transition: -wn })
}

fn check_b(b: f64) -> Result<()> {
    if !(b >= 0.0) || !b.is_finite() {
        return Err(Error::domain(format!("Boltzmann factor {b} must be finite and >= 0")));
    }
    Ok(())
}

/// Γ′ = Γ_{σ−}/(b+1) + Γ_{σ+}/(b⁻¹+1) with σ− = |1⟩⟨0|, σ+ = |0⟩⟨1|.
/// Its fixed point is diag(b, 1)/(1+b).
pub fn thermal_dissipator(b: f64) -> Result<Superoperator> {
    check_b(b)?;
    let (wm, wp) = thermal_weights(b);
    let m = dissipator_superop(&pauli::raising()).matrix.mapv(|z| z * wm)
        + dissipator_superop(&pauli::lowering()).matrix.mapv(|z| z * wp);
    Ok(Superoperator { matrix: m })
}

/// Weights (1/(b+1), 1/(b⁻¹+1)) of the σ− and σ+ dissipators.
pub fn thermal_weights(b: f64) -> (f64, f64) {
    (1.0 / (b + 1.0), b / (b + 1.0))
}

/// Γ″, the restriction of Γ′ to populations.
pub fn diagonal_restriction(b: f64) -> Result<[[f64; 2]; 2]> {
    check_b(b)?;
    let (wm, wp) = thermal_weights(b);
    Ok([[wm, -wp], [-wm, wp]])
}

/// R_T(t) = I + (e^{−γt} − 1)Γ″ acting on (p₀, p₁).
pub fn thermal_propagator(b: f64, gamma: f64, t: f64) -> Result<[[f64; 2]; 2]> {
    if !(t >= 0.0) || !(gamma >= 0.0) {
        return Err(Error::domain("rate and time must be non-negative"));
    }
    let g = diagonal_restriction(b)?;
    let k = (-gamma * t).exp() - 1.0;
    Ok([[1.0 + k * g[0][0], k * g[0][1]], [k * g[1][0], 1.0 + k * g[1][1]]])
}

/// Rates as printed in a timescale table: 1/τ for bath correlation, system,
/// relaxation and control, all in the same unit.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Timescales {
    pub bath: f64,
    pub system: f64,
    pub relaxation: f64,
    pub control: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TimescaleCheck {
    pub name: String,
    /// ratio of the slow timescale to the fast one
    pub ratio: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TimescaleReport {
    pub factor: f64,
    pub checks: Vec<TimescaleCheck>,
}

impl TimescaleReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Born-Markov (τ_R ≫ τ_B) and secular (τ_R ≫ τ_S, τ_C ≫ τ_S) checks. A
/// condition passes when the ratio is at least `factor`; exactly `factor`
/// passes.
pub fn validate_timescales(t: &Timescales, factor: f64) -> Result<TimescaleReport> {
    for (name, v) in [("bath", t.bath), ("system", t.system), ("relaxation", t.relaxation), ("control", t.control)] {
        if !(v > 0.0) {
            return Err(Error::domain(format!("{name} rate must be positive")));
        }
    }
    let mk = |name: &str, ratio: f64| TimescaleCheck { name: name.into(), ratio, passed: ratio >= factor };
    Ok(TimescaleReport {
        factor,
        checks: vec![
            mk("born_markov: tau_R >> tau_B", t.bath / t.relaxation),
            mk("secular: tau_R >> tau_S", t.system / t.relaxation),
            mk("secular: tau_C >> tau_S", t.system / t.control),
        ],
    })
}

/// GMon device rates in GHz.
pub fn gmon_timescales() -> Timescales {
    Timescales { bath: 550.0, system: 4.8, relaxation: 0.8, control: 0.8 }
}

/// Bath temperature in kelvin for Boltzmann factor b at transition frequency
/// `freq_hz` (ordinary frequency).
pub fn bath_temperature_kelvin(b: f64, freq_hz: f64) -> f64 {
    const H: f64 = 6.62607015e-34;
    const KB: f64 = 1.380649e-23;
    H * freq_hz / (KB * (1.0 / b).ln())
}

pub fn superop_trace_defect(s: &Superoperator) -> f64 {
    let n = s.hilbert_dim();
    let vi = crate::quantum::vec_matrix(&numerics::identity(n));
    let left = numerics::matvec(&numerics::dagger(&s.matrix), &vi);
    numerics::vnorm(&left)
}
