//! Projected limited-memory BFGS for box constraints. Variables sitting on a
//! bound with the gradient pushing outward are frozen for the iteration; the
//! two-loop recursion acts on the remaining free variables and the step is
//! projected back onto the box with Armijo backtracking.

use std::collections::VecDeque;

#[derive(Clone, Debug)]
pub struct Options {
    pub max_iterations: usize,
    /// Stop once f drops to this value.
    pub f_target: f64,
    pub memory: usize,
    /// Stop when the projected gradient's max-norm falls below this.
    pub pg_tol: f64,
    /// Stop after `patience` iterations whose relative decrease is below this.
    pub rel_tol: f64,
    pub patience: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options { max_iterations: 500, f_target: 0.0, memory: 12, pg_tol: 1e-14, rel_tol: 1e-10, patience: 8 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stop {
    Target,
    Stationary,
    Stalled,
    LineSearch,
    MaxIterations,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    /// f after every accepted iteration, starting with the initial value
    pub trace: Vec<f64>,
    pub stop: Stop,
}

fn project(x: &mut [f64], lo: &[f64], hi: &[f64]) {
    for ((v, l), h) in x.iter_mut().zip(lo).zip(hi) {
        *v = v.clamp(*l, *h);
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn free_mask(x: &[f64], g: &[f64], lo: &[f64], hi: &[f64]) -> Vec<bool> {
    x.iter()
        .zip(g)
        .zip(lo.iter().zip(hi))
        .map(|((&xi, &gi), (&l, &h))| !((xi <= l && gi > 0.0) || (xi >= h && gi < 0.0)))
        .collect()
}

/// Minimizes f over the box [lo, hi]; `eval` returns (f, ∇f).
pub fn minimize(
    eval: &mut dyn FnMut(&[f64]) -> (f64, Vec<f64>),
    x0: &[f64],
    lo: &[f64],
    hi: &[f64],
    opts: &Options,
) -> Outcome {
    let n = x0.len();
    let mut x = x0.to_vec();
    project(&mut x, lo, hi);
    let (mut f, mut g) = eval(&x);
    let mut trace = vec![f];
    let mut history: VecDeque<(Vec<f64>, Vec<f64>)> = VecDeque::new();
    let mut slow = 0;
    let mut iterations = 0;
    let mut stop = Stop::MaxIterations;

    while iterations < opts.max_iterations {
        if f <= opts.f_target {
            stop = Stop::Target;
            break;
        }
        let free = free_mask(&x, &g, lo, hi);
        let pg = g.iter().zip(&free).map(|(gi, &fr)| if fr { gi.abs() } else { 0.0 }).fold(0.0, f64::max);
        if pg <= opts.pg_tol || !f.is_finite() {
            stop = Stop::Stationary;
            break;
        }

        let mut accepted = None;
        for attempt in 0..2 {
            let steepest = history.is_empty() || attempt == 1;
            if attempt == 1 {
                history.clear();
            }
            let mut d: Vec<f64> = g.iter().zip(&free).map(|(gi, &fr)| if fr { -gi } else { 0.0 }).collect();
            if !steepest {
                two_loop(&mut d, &history, &free);
            }
            if dot(&g, &d) >= 0.0 {
                d = g.iter().zip(&free).map(|(gi, &fr)| if fr { -gi } else { 0.0 }).collect();
                history.clear();
            }
            let mut alpha = if history.is_empty() { 1.0 / dot(&d, &d).sqrt().max(1e-300) } else { 1.0 };
            if steepest {
                alpha = alpha.min(1.0);
            }
            for _ in 0..40 {
                let mut xn: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + alpha * b).collect();
                project(&mut xn, lo, hi);
                let step: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
                let dec = dot(&g, &step);
                if dec >= 0.0 {
                    alpha *= 0.5;
                    continue;
                }
                let (fnew, gnew) = eval(&xn);
                if fnew.is_finite() && fnew <= f + 1e-4 * dec {
                    accepted = Some((xn, fnew, gnew, step));
                    break;
                }
                // quadratic interpolation, safeguarded
                let denom = 2.0 * (fnew - f - dec);
                let shrink = if fnew.is_finite() && denom > 0.0 { (-dec / denom).clamp(0.1, 0.5) } else { 0.25 };
                alpha *= shrink;
            }
            if accepted.is_some() || steepest {
                break;
            }
        }
        let Some((xn, fnew, gnew, s)) = accepted else {
            stop = Stop::LineSearch;
            break;
        };
        let y: Vec<f64> = gnew.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() && sy > 0.0 {
            history.push_back((s, y));
            if history.len() > opts.memory {
                history.pop_front();
            }
        }
        let rel = (f - fnew) / f.abs().max(1e-300);
        x = xn;
        f = fnew;
        g = gnew;
        trace.push(f);
        iterations += 1;
        if rel < opts.rel_tol {
            slow += 1;
            if slow >= opts.patience {
                stop = Stop::Stalled;
                break;
            }
        } else {
            slow = 0;
        }
    }
    if iterations >= opts.max_iterations && f <= opts.f_target {
        stop = Stop::Target;
    }
    debug_assert_eq!(x.len(), n);
    Outcome { x, f, iterations, trace, stop }
}

/// H·d restricted to the free variables, with d = −g on entry.
fn two_loop(d: &mut [f64], history: &VecDeque<(Vec<f64>, Vec<f64>)>, free: &[bool]) {
    let masked = |v: &[f64]| -> Vec<f64> { v.iter().zip(free).map(|(x, &f)| if f { *x } else { 0.0 }).collect() };
    let pairs: Vec<(Vec<f64>, Vec<f64>)> = history.iter().map(|(s, y)| (masked(s), masked(y))).collect();
    let mut alphas = vec![0.0; pairs.len()];
    let mut rhos = vec![0.0; pairs.len()];
    for (k, (s, y)) in pairs.iter().enumerate().rev() {
        let sy = dot(s, y);
        if sy <= 0.0 {
            continue;
        }
        rhos[k] = 1.0 / sy;
        alphas[k] = rhos[k] * dot(s, d);
        d.iter_mut().zip(y).for_each(|(di, yi)| *di -= alphas[k] * yi);
    }
    if let Some((s, y)) = pairs.iter().rev().find(|(s, y)| dot(s, y) > 0.0) {
        let gamma = dot(s, y) / dot(y, y);
        d.iter_mut().for_each(|v| *v *= gamma);
    }
    for (k, (s, y)) in pairs.iter().enumerate() {
        if rhos[k] == 0.0 {
            continue;
        }
        let beta = rhos[k] * dot(y, d);
        d.iter_mut().zip(s).for_each(|(di, si)| *di += (alphas[k] - beta) * si);
    }
    d.iter_mut().zip(free).for_each(|(v, &f)| {
        if !f {
            *v = 0.0
        }
    });
}
