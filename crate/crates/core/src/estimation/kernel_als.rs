use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::{Dataset, FittedEstimate, MethodTag};
use crate::error::{Error, Result};
use crate::psi_tile::asymmetric_square_loss;

const MAX_ITERATIONS: usize = 500;
const COEF_TOL: f64 = 1e-8;

pub fn gaussian_kernel(a: &[f64], b: &[f64], bandwidth: f64) -> f64 {
    let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    (-d2 / (2.0 * bandwidth * bandwidth)).exp()
}

fn gram(data: &Dataset, bandwidth: f64) -> DMatrix<f64> {
    let n = data.len();
    DMatrix::from_fn(n, n, |i, j| gaussian_kernel(&data.x[i], &data.x[j], bandwidth))
}

/// `λ αᵀKα + (1/n) Σ l_φ(y_i − (Kα)_i)`.
pub fn als_objective(k: &DMatrix<f64>, y: &[f64], alpha: &DVector<f64>, phi: f64, lambda: f64) -> f64 {
    let n = y.len() as f64;
    let u = k * alpha;
    let fit: f64 = y.iter().zip(u.iter()).map(|(yi, ui)| asymmetric_square_loss(phi, yi - ui)).sum();
    lambda * alpha.dot(&u) + fit / n
}

fn weights(y: &[f64], u: &DVector<f64>, phi: f64) -> Vec<f64> {
    y.iter().zip(u.iter()).map(|(yi, ui)| if yi - ui >= 0.0 { phi } else { 1.0 - phi }).collect()
}

/// Kernel expectile regression with a Gaussian kernel, by iteratively
/// reweighted least squares on the representer coefficients.
///
/// Each step solves `(WK + nλI)α = Wy` for the sign weights of the current
/// residuals. That step is a descent direction of the convex objective; if
/// the full step raises the objective it is halved until it does not.
pub fn fit_kernel_als(data: &Dataset, phi: f64, lambda: f64, bandwidth: f64) -> Result<FittedEstimate> {
    if !(phi > 0.0 && phi < 1.0) {
        return Err(Error::InvalidParameter(format!("level must lie in (0, 1), got {phi}")));
    }
    if !(lambda > 0.0) || !(bandwidth > 0.0) {
        return Err(Error::InvalidParameter("λ and the bandwidth must be positive".into()));
    }
    let n = data.len();
    let k = gram(data, bandwidth);
    let y = &data.y;
    let yv = DVector::from_column_slice(y);
    let mut alpha = DVector::<f64>::zeros(n);
    let mut obj = als_objective(&k, y, &alpha, phi, lambda);
    let mut trace = vec![obj];
    for it in 0..MAX_ITERATIONS {
        let u = &k * &alpha;
        let w = weights(y, &u, phi);
        let wk = DMatrix::from_fn(n, n, |i, j| w[i] * k[(i, j)]) + DMatrix::identity(n, n) * (n as f64 * lambda);
        let rhs = DVector::from_fn(n, |i, _| w[i] * yv[i]);
        let target = wk.lu().solve(&rhs).ok_or_else(|| Error::InvalidInput("singular reweighted system".into()))?;
        let mut step = target - &alpha;
        let mut candidate = &alpha + &step;
        let mut cand_obj = als_objective(&k, y, &candidate, phi, lambda);
        let mut halvings = 0;
        while cand_obj > obj && halvings < 60 {
            step *= 0.5;
            candidate = &alpha + &step;
            cand_obj = als_objective(&k, y, &candidate, phi, lambda);
            halvings += 1;
        }
        if cand_obj > obj {
            // No decrease representable in floating point: at the optimum.
            candidate = alpha.clone();
            cand_obj = obj;
        }
        let change = (&candidate - &alpha).amax();
        alpha = candidate;
        obj = cand_obj;
        trace.push(obj);
        if change < COEF_TOL {
            let mut hyper = BTreeMap::new();
            hyper.insert("level".into(), phi);
            hyper.insert("lambda".into(), lambda);
            hyper.insert("bandwidth".into(), bandwidth);
            hyper.insert("iterations".into(), (it + 1) as f64);
            let xs = Arc::new(data.x.clone());
            let coef = Arc::new(alpha.iter().copied().collect::<Vec<f64>>());
            let predictor =
                move |x: &[f64]| xs.iter().zip(coef.iter()).map(|(xi, a)| a * gaussian_kernel(xi, x, bandwidth)).sum();
            let mut fit = FittedEstimate::new(Arc::new(predictor), MethodTag::KernelAls, hyper);
            fit.trace = trace;
            return Ok(fit);
        }
        if it + 1 == MAX_ITERATIONS {
            return Err(Error::NotConverged {
                iterations: MAX_ITERATIONS,
                last_change: change,
                last_iterate: alpha.iter().copied().collect(),
            });
        }
    }
    unreachable!("loop returns on its last iteration")
}
