//! L2-regularized binary logistic regression fitted by full-batch gradient
//! descent with backtracking line search.
//!
//! Objective: `mean_i [softplus(z_i) - y_i z_i] + lambda/2 |w|^2` with
//! `z_i = w.x_i + b`; the bias is not regularized.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRegParams {
    pub lambda: f64,
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for LogRegParams {
    fn default() -> Self {
        LogRegParams {
            lambda: 1e-3,
            tol: 1e-6,
            max_iters: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRegFit {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Objective value at the start and after every accepted step.
    #[serde(skip)]
    pub objective_trace: Vec<f64>,
}

impl LogRegFit {
    pub fn predict(&self, x: &[f64]) -> f64 {
        sigmoid(dot(&self.weights, x) + self.bias)
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check_dims<V: AsRef<[f64]>>(x: &[V], y: &[bool]) -> Result<usize> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let dim = x.first().ok_or(Error::EmptyTrainingSet)?.as_ref().len();
    if let Some(bad) = x.iter().find(|r| r.as_ref().len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: bad.as_ref().len(),
        });
    }
    Ok(dim)
}

pub fn objective<V: AsRef<[f64]>>(x: &[V], y: &[bool], w: &[f64], b: f64, lambda: f64) -> f64 {
    let nll: f64 = x
        .iter()
        .zip(y)
        .map(|(xi, &yi)| {
            let z = dot(w, xi.as_ref()) + b;
            softplus(z) - if yi { z } else { 0.0 }
        })
        .sum();
    nll / x.len() as f64 + 0.5 * lambda * dot(w, w)
}

/// Gradient of [`objective`] with respect to `(w, b)`.
pub fn gradient<V: AsRef<[f64]>>(x: &[V], y: &[bool], w: &[f64], b: f64, lambda: f64) -> (Vec<f64>, f64) {
    let n = x.len() as f64;
    let mut gw = vec![0.0; w.len()];
    let mut gb = 0.0;
    for (xi, &yi) in x.iter().zip(y) {
        let xi = xi.as_ref();
        let r = sigmoid(dot(w, xi) + b) - if yi { 1.0 } else { 0.0 };
        gw.iter_mut().zip(xi).for_each(|(g, v)| *g += r * v);
        gb += r;
    }
    gw.iter_mut().zip(w).for_each(|(g, wi)| *g = *g / n + lambda * wi);
    (gw, gb / n)
}

const ARMIJO: f64 = 1e-4;
const MIN_STEP: f64 = 1e-16;
const MAX_STEP: f64 = 1e6;

/// Fits from zero initialization. Every accepted step strictly decreases the
/// objective; the fit stops when the gradient norm drops below `tol`, no
/// decreasing step can be found, or `max_iters` is reached.
pub fn logreg_fit<V: AsRef<[f64]>>(x: &[V], y: &[bool], params: &LogRegParams) -> Result<LogRegFit> {
    let dim = check_dims(x, y)?;
    let lambda = params.lambda;
    let mut w = vec![0.0; dim];
    let mut b = 0.0;
    let mut f = objective(x, y, &w, b, lambda);
    let mut trace = vec![f];
    let mut step: f64 = 1.0;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < params.max_iters {
        let (gw, gb) = gradient(x, y, &w, b, lambda);
        let gnorm2 = dot(&gw, &gw) + gb * gb;
        if gnorm2.sqrt() < params.tol {
            converged = true;
            break;
        }
        let mut t = (step * 2.0).min(MAX_STEP);
        let accepted = loop {
            let w_new: Vec<f64> = w.iter().zip(&gw).map(|(wi, g)| wi - t * g).collect();
            let b_new = b - t * gb;
            let f_new = objective(x, y, &w_new, b_new, lambda);
            if f_new <= f - ARMIJO * t * gnorm2 && f_new < f {
                break Some((w_new, b_new, f_new));
            }
            t *= 0.5;
            if t < MIN_STEP {
                break None;
            }
        };
        let Some((w_new, b_new, f_new)) = accepted else {
            // no representable decrease left
            converged = gnorm2.sqrt() < params.tol.sqrt();
            break;
        };
        w = w_new;
        b = b_new;
        f = f_new;
        step = t;
        trace.push(f);
        iterations += 1;
    }

    if w.iter().any(|v| !v.is_finite()) || !b.is_finite() {
        return Err(Error::Domain("logistic regression diverged".into()));
    }
    Ok(LogRegFit {
        weights: w,
        bias: b,
        iterations,
        converged,
        objective_trace: trace,
    })
}
