use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerances;

/// Values closer than this count as equal when building T-transform chains.
const EQUAL: f64 = 1e-14;

fn sorted_desc(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

fn check_distribution(v: &[f64], what: &str) -> Result<()> {
    let s: f64 = v.iter().sum();
    if (s - 1.0).abs() > tolerances::DENSITY || v.iter().any(|p| !p.is_finite()) {
        return Err(Error::domain(format!("{what} sums to {s}, expected 1")));
    }
    Ok(())
}

/// Descending partial sums S_1, …, S_N.
pub fn partial_sums(v: &[f64]) -> Vec<f64> {
    sorted_desc(v)
        .iter()
        .scan(0.0, |acc, p| {
            *acc += p;
            Some(*acc)
        })
        .collect()
}

/// True iff x ≺ y, i.e. no descending partial sum of x exceeds that of y.
pub fn majorizes(x: &[f64], y: &[f64]) -> Result<bool> {
    if x.len() != y.len() {
        return Err(Error::dim(format!("lengths {} and {} differ", x.len(), y.len())));
    }
    check_distribution(x, "x")?;
    check_distribution(y, "y")?;
    Ok(partial_sums(x).iter().zip(partial_sums(&y)).all(|(a, b)| *a <= b + tolerances::MAJORIZATION))
}

/// Evidence that x ≺ y: the gaps S_k(y) − S_k(x), all non-negative.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MajorizationCertificate {
    pub initial_spectrum: Vec<f64>,
    pub target_spectrum: Vec<f64>,
    pub partial_sum_gaps: Vec<f64>,
}

impl MajorizationCertificate {
    pub fn new(initial: &[f64], target: &[f64]) -> Self {
        let gaps = partial_sums(initial).iter().zip(partial_sums(target)).map(|(y, x)| y - x).collect();
        MajorizationCertificate {
            initial_spectrum: sorted_desc(initial),
            target_spectrum: sorted_desc(target),
            partial_sum_gaps: gaps,
        }
    }

    pub fn holds(&self) -> bool {
        self.partial_sum_gaps.iter().all(|g| *g >= -tolerances::MAJORIZATION)
    }
}

/// Lower bound on δ_F between any state majorized by `initial` and any state
/// with spectrum `target`. With v_k = S_k(target) − S_k(initial) > 0, the
/// spectra must differ by v_k over the first k levels and by −v_k over the
/// rest, so ‖Δ‖₂ ≥ v_k·√(N/(k(N−k))); Mirsky's inequality carries this to
/// the Frobenius distance of the operators.
pub fn majorization_floor(initial: &[f64], target: &[f64]) -> f64 {
    let n = initial.len();
    let (py, px) = (partial_sums(initial), partial_sums(target));
    (1..n)
        .map(|k| {
            let v = (px[k - 1] - py[k - 1]).max(0.0);
            v * (n as f64 / (k * (n - k)) as f64).sqrt()
        })
        .fold(0.0, f64::max)
}

/// (1 − λ)I + λQ_ij acting on a population vector; λ weights the
/// transposition of levels i and j.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TTransform {
    pub i: usize,
    pub j: usize,
    pub lambda: f64,
}

impl TTransform {
    pub fn new(i: usize, j: usize, lambda: f64) -> Result<Self> {
        if i == j {
            return Err(Error::domain("T-transform needs two distinct levels"));
        }
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::domain(format!("lambda {lambda} outside [0, 1]")));
        }
        Ok(TTransform { i, j, lambda })
    }

    pub fn apply(&self, v: &mut [f64]) {
        let (a, b) = (v[self.i], v[self.j]);
        v[self.i] = (1.0 - self.lambda) * a + self.lambda * b;
        v[self.j] = (1.0 - self.lambda) * b + self.lambda * a;
    }

    /// λ = ½ can only be reached in the limit of infinite noise time.
    pub fn is_averaging(&self) -> bool {
        (1.0 - 2.0 * self.lambda).abs() <= 1e-12
    }
}

/// One step of the HLP chain: the transform acts on the descending vector
/// `before`, and the result is sorted again.
#[derive(Clone, Debug, PartialEq)]
pub struct HlpStep {
    pub transform: TTransform,
    pub before: Vec<f64>,
}

/// T-transforms taking descending `y` to descending `x` ≺ `y`: j is the
/// largest index with x_j < y_j, k > j the smallest with x_k > y_k, and
/// δ = min(y_j − x_j, x_k − y_k) is moved from j to k. Each transform acts on
/// the vector sorted after the previous one.
pub fn hlp_t_transforms(y: &[f64], x: &[f64]) -> Result<Vec<TTransform>> {
    Ok(hlp_chain(y, x)?.into_iter().map(|s| s.transform).collect())
}

pub fn hlp_chain(y: &[f64], x: &[f64]) -> Result<Vec<HlpStep>> {
    if !majorizes(x, y)? {
        return Err(Error::Infeasible("target spectrum is not majorized by the initial spectrum".into()));
    }
    let n = y.len();
    let mut cur = sorted_desc(y);
    let x = sorted_desc(x);
    let mut steps = Vec::new();
    for _ in 0..n {
        let Some(j) = (0..n).rev().find(|&i| x[i] < cur[i] - EQUAL) else { break };
        let Some(k) = (j + 1..n).find(|&i| x[i] > cur[i] + EQUAL) else { break };
        let (dj, dk) = (cur[j] - x[j], x[k] - cur[k]);
        let delta = dj.min(dk);
        let lambda = (delta / (cur[j] - cur[k])).clamp(0.0, 0.5);
        steps.push(HlpStep { transform: TTransform { i: j, j: k, lambda }, before: cur.clone() });
        if dj <= dk {
            cur[k] += cur[j] - x[j];
            cur[j] = x[j];
        } else {
            cur[j] -= x[k] - cur[k];
            cur[k] = x[k];
        }
        cur.sort_by(|a, b| b.total_cmp(a));
    }
    if steps.len() > n.saturating_sub(1) {
        return Err(Error::Numeric(format!("HLP chain took {} steps for {n} levels", steps.len())));
    }
    Ok(steps)
}
