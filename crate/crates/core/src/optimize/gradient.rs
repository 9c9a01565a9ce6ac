//! δ_F² = ‖X_M⋯X_1 vec(ρ₀) − vec(ρ_target)‖² and its gradient over all
//! slice amplitudes. Parameters are laid out slice-major: for each slice the
//! coherent amplitudes followed by the channel rates.

use serde::{Deserialize, Serialize};

use super::Problem;
use crate::error::{Error, Result};
use crate::numerics::series::{adjoint_directional, exp_action};
use crate::numerics::sparse::Pattern;
use crate::numerics::{exp_action_with_derivative, matrix_exponential, matvec, vdot, CsrMatrix, C64};
use crate::propagation::ControlSequence;
use crate::quantum::{vectorize, LiouvillianTerms};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradientMethod {
    /// Auxiliary-block derivative evaluated by Taylor series on sparse
    /// superoperators, contracted with the backward costate.
    Auxiliary,
    /// One dense 2N²×2N² block exponential per slice and direction.
    AuxiliaryDense,
    /// Central differences of the dense-propagated error.
    FiniteDifference,
}

/// Precomputed superoperator pieces for repeated error evaluations.
#[derive(Clone, Debug)]
pub struct Evaluator {
    pattern: Pattern,
    drift: Vec<C64>,
    /// gathered values of every direction (coherent then noise) on `pattern`
    terms: Vec<Vec<C64>>,
    dirs: Vec<CsrMatrix>,
    dense: LiouvillianTerms,
    x0: Vec<C64>,
    target: Vec<C64>,
    durations: Vec<f64>,
    n_coherent: usize,
    n_noise: usize,
}

impl Evaluator {
    pub fn new(problem: &Problem) -> Result<Self> {
        problem.validate()?;
        let dense = LiouvillianTerms::new(&problem.system)?;
        let mut all = vec![&dense.drift];
        all.extend(dense.controls.iter());
        all.extend(dense.noise.iter());
        let pattern = Pattern::of(&all);
        let drift = pattern.gather(&dense.drift);
        let terms: Vec<Vec<C64>> = dense.controls.iter().chain(&dense.noise).map(|m| pattern.gather(m)).collect();
        let dirs = dense.controls.iter().chain(&dense.noise).map(CsrMatrix::from_dense).collect();
        Ok(Evaluator {
            drift,
            terms,
            dirs,
            pattern,
            x0: vectorize(&problem.initial),
            target: vectorize(&problem.target.state),
            durations: problem.durations(),
            n_coherent: problem.system.n_coherent(),
            n_noise: problem.system.n_noise(),
            dense,
        })
    }

    pub fn slices(&self) -> usize {
        self.durations.len()
    }

    pub fn per_slice(&self) -> usize {
        self.n_coherent + self.n_noise
    }

    pub fn n_params(&self) -> usize {
        self.slices() * self.per_slice()
    }

    pub fn split<'a>(&self, params: &'a [f64], k: usize) -> (&'a [f64], &'a [f64]) {
        let p = self.per_slice();
        let row = &params[k * p..(k + 1) * p];
        row.split_at(self.n_coherent)
    }

    pub fn to_sequence(&self, params: &[f64]) -> ControlSequence {
        let (mut coherent, mut noise) = (Vec::new(), Vec::new());
        for k in 0..self.slices() {
            let (u, g) = self.split(params, k);
            coherent.push(u.to_vec());
            noise.push(g.to_vec());
        }
        ControlSequence { durations: self.durations.clone(), coherent, noise }
    }

    pub fn from_sequence(&self, seq: &ControlSequence) -> Result<Vec<f64>> {
        if seq.slice_count() != self.slices() {
            return Err(Error::dim(format!("sequence has {} slices, problem {}", seq.slice_count(), self.slices())));
        }
        let mut out = Vec::with_capacity(self.n_params());
        for (u, g) in seq.coherent.iter().zip(&seq.noise) {
            if u.len() != self.n_coherent || g.len() != self.n_noise {
                return Err(Error::dim("sequence amplitude rows do not match the system"));
            }
            out.extend_from_slice(u);
            out.extend_from_slice(g);
        }
        Ok(out)
    }

    /// A = −Δt·L for slice k, on the shared pattern.
    fn generator(&self, params: &[f64], k: usize) -> CsrMatrix {
        let p = self.per_slice();
        let amps = &params[k * p..(k + 1) * p];
        let mut vals = self.drift.clone();
        for (a, t) in amps.iter().zip(&self.terms) {
            if *a != 0.0 {
                vals.iter_mut().zip(t).for_each(|(v, w)| *v += w * *a);
            }
        }
        let dt = self.durations[k];
        vals.iter_mut().for_each(|v| *v *= -dt);
        self.pattern.with_values(vals)
    }

    fn residual_norm2(&self, x: &[C64]) -> f64 {
        x.iter().zip(&self.target).map(|(a, b)| (a - b).norm_sqr()).sum()
    }

    /// δ_F² by sparse series propagation.
    pub fn error(&self, params: &[f64]) -> f64 {
        let mut x = self.x0.clone();
        for k in 0..self.slices() {
            x = exp_action(&self.generator(params, k), &x);
        }
        self.residual_norm2(&x)
    }

    /// δ_F² by dense Padé propagation, independent of the series code.
    pub fn error_dense(&self, params: &[f64]) -> Result<f64> {
        let mut x = self.x0.clone();
        for k in 0..self.slices() {
            let (u, g) = self.split(params, k);
            let l = self.dense.assemble(u, g);
            let xk = matrix_exponential(&l.mapv(|z| z * -self.durations[k]))?;
            x = matvec(&xk, &x);
        }
        Ok(self.residual_norm2(&x))
    }

    pub fn error_and_gradient(&self, params: &[f64], method: GradientMethod) -> Result<(f64, Vec<f64>)> {
        if params.len() != self.n_params() {
            return Err(Error::dim(format!("{} parameters, expected {}", params.len(), self.n_params())));
        }
        match method {
            GradientMethod::Auxiliary => Ok(self.series_gradient(params)),
            GradientMethod::AuxiliaryDense => self.dense_gradient(params),
            GradientMethod::FiniteDifference => self.fd_gradient(params, 1e-6),
        }
    }

    fn series_gradient(&self, params: &[f64]) -> (f64, Vec<f64>) {
        let m = self.slices();
        let gens: Vec<CsrMatrix> = (0..m).map(|k| self.generator(params, k)).collect();
        let mut states = Vec::with_capacity(m + 1);
        states.push(self.x0.clone());
        for g in &gens {
            let next = exp_action(g, states.last().unwrap());
            states.push(next);
        }
        let last = &states[m];
        let f = self.residual_norm2(last);
        // ∂f = 2 Re⟨x_M − t, ∂x_M⟩
        let mut lambda: Vec<C64> = last.iter().zip(&self.target).map(|(a, b)| a - b).collect();
        let mut grad = vec![0.0; self.n_params()];
        let dirs: Vec<&CsrMatrix> = self.dirs.iter().collect();
        let p = self.per_slice();
        for k in (0..m).rev() {
            let res = adjoint_directional(&gens[k], &states[k], &lambda, &dirs);
            let dt = self.durations[k];
            for (d, v) in res.derivatives.iter().enumerate() {
                grad[k * p + d] = -2.0 * dt * v.re;
            }
            lambda = res.costate;
        }
        (f, grad)
    }

    fn dense_gradient(&self, params: &[f64]) -> Result<(f64, Vec<f64>)> {
        let m = self.slices();
        let p = self.per_slice();
        let mut props = Vec::with_capacity(m);
        let mut states = vec![self.x0.clone()];
        for k in 0..m {
            let (u, g) = self.split(params, k);
            let l = self.dense.assemble(u, g);
            let x = matrix_exponential(&l.mapv(|z| z * -self.durations[k]))?;
            states.push(matvec(&x, &states[k]));
            props.push((l, x));
        }
        let f = self.residual_norm2(&states[m]);
        let mut lambda: Vec<C64> = states[m].iter().zip(&self.target).map(|(a, b)| a - b).collect();
        let mut grad = vec![0.0; self.n_params()];
        let dirs: Vec<_> = self.dense.controls.iter().chain(&self.dense.noise).collect();
        for k in (0..m).rev() {
            let (l, x) = &props[k];
            for (d, dir) in dirs.iter().enumerate() {
                let (_, dx) = exp_action_with_derivative(l, dir, self.durations[k])?;
                grad[k * p + d] = 2.0 * vdot(&lambda, &matvec(&dx, &states[k])).re;
            }
            lambda = matvec(&crate::numerics::dagger(x), &lambda);
        }
        Ok((f, grad))
    }

    fn fd_gradient(&self, params: &[f64], h: f64) -> Result<(f64, Vec<f64>)> {
        let f = self.error_dense(params)?;
        let mut grad = vec![0.0; params.len()];
        let mut work = params.to_vec();
        for i in 0..params.len() {
            let orig = work[i];
            work[i] = orig + h;
            let up = self.error_dense(&work)?;
            work[i] = orig - h;
            let down = self.error_dense(&work)?;
            work[i] = orig;
            grad[i] = (up - down) / (2.0 * h);
        }
        Ok((f, grad))
    }

    /// Final vectorized state under `params`.
    pub fn final_vector(&self, params: &[f64]) -> Vec<C64> {
        let mut x = self.x0.clone();
        for k in 0..self.slices() {
            x = exp_action(&self.generator(params, k), &x);
        }
        x
    }

    pub fn zero_params(&self) -> Vec<f64> {
        vec![0.0; self.n_params()]
    }
}
