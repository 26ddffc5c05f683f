use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use super::{Dataset, FittedEstimate, MethodTag, RegFn};
use crate::distributions::ErrorFamily;
use crate::error::{Error, Result};

const MAX_PAIRS: usize = 1000;
const MAX_DATA: usize = 1000;
const PROJECTION_GRID: usize = 512;

fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

struct Projector {
    pairs: Vec<(RegFn, RegFn)>,
    family: ErrorFamily,
    weights: Vec<f64>,
}

impl Projector {
    fn density(&self, g: usize, x: &[f64], y: f64) -> f64 {
        let (mu, sigma) = &self.pairs[g];
        let s = sigma(x);
        self.family.std_pdf((y - mu(x)) / s) / s
    }

    fn ln_density(&self, g: usize, x: &[f64], y: f64) -> f64 {
        let (mu, sigma) = &self.pairs[g];
        let s = sigma(x);
        self.family.std_ln_pdf((y - mu(x)) / s) - s.ln()
    }

    fn ln_mixture(&self, weights: &[f64], x: &[f64], y: f64) -> f64 {
        let terms: Vec<f64> = weights
            .iter()
            .enumerate()
            .filter(|(_, w)| **w > 0.0)
            .map(|(g, w)| w.ln() + self.ln_density(g, x, y))
            .collect();
        log_sum_exp(&terms)
    }

    fn mixture(&self, weights: &[f64], x: &[f64], y: f64) -> f64 {
        weights.iter().enumerate().filter(|(_, w)| **w > 0.0).map(|(g, w)| w * self.density(g, x, y)).sum()
    }

    /// Pair index minimising the Hellinger distance to the averaged predictive density at `x`.
    fn project(&self, x: &[f64]) -> usize {
        let centre: f64 = self.weights.iter().zip(&self.pairs).map(|(w, (mu, _))| w * mu(x)).sum();
        let scale = self.pairs.iter().map(|(_, s)| s(x)).fold(0.0, f64::max);
        let du = PI / PROJECTION_GRID as f64;
        let nodes: Vec<(f64, f64)> = (0..PROJECTION_GRID)
            .map(|i| {
                let u = -0.5 * PI + (i as f64 + 0.5) * du;
                (centre + scale * u.tan(), scale * du / u.cos().powi(2))
            })
            .collect();
        let q: Vec<f64> = nodes.iter().map(|&(y, _)| self.mixture(&self.weights, x, y).sqrt()).collect();
        let mut best = (f64::INFINITY, 0);
        for g in 0..self.pairs.len() {
            let dist: f64 =
                nodes.iter().zip(&q).map(|(&(y, w), qs)| w * (qs - self.density(g, x, y).sqrt()).powi(2)).sum();
            if dist < best.0 {
                best = (dist, g);
            }
        }
        best.1
    }
}

/// Progressive Bayes mixture over the net `{(μ_j, σ_k)}` followed by a
/// pointwise Hellinger projection back onto the net.
pub struct MixtureFit {
    pub estimate: FittedEstimate,
    projector: Arc<Projector>,
    /// Posterior weights before observation `i` (uniform for `i = 0`).
    pub step_weights: Vec<Vec<f64>>,
    /// Log posterior after all observations, normalised.
    pub final_log_weights: Vec<f64>,
    /// `−Σ_i log p̃_i(y_i | x_i)`.
    pub cumulative_log_loss: f64,
    /// `−Σ_i log f_g(y_i | x_i)` per net pair.
    pub member_log_loss: Vec<f64>,
}

impl MixtureFit {
    pub fn net_size(&self) -> usize {
        self.projector.pairs.len()
    }

    /// Pair index `(j, k)` flattened as `j·|Σ-net| + k`.
    pub fn pair_index(&self, x: &[f64]) -> usize {
        self.projector.project(x)
    }

    /// Average of the per-step predictive densities, `q̂_n(y | x)`.
    pub fn averaged_density(&self, x: &[f64], y: f64) -> f64 {
        self.projector.mixture(&self.projector.weights, x, y)
    }

    /// Predictive density `p̃_i(y | x)` used at step `i`.
    pub fn step_density(&self, step: usize, x: &[f64], y: f64) -> f64 {
        self.projector.mixture(&self.step_weights[step], x, y)
    }

    /// `ln p̃_i(y | x)`, evaluated without underflow in the tails.
    pub fn step_ln_density(&self, step: usize, x: &[f64], y: f64) -> f64 {
        self.projector.ln_mixture(&self.step_weights[step], x, y)
    }

    pub fn member_density(&self, g: usize, x: &[f64], y: f64) -> f64 {
        self.projector.density(g, x, y)
    }

    /// Cumulative log-loss regret against pair `g`; at most `log |G|`.
    pub fn regret(&self, g: usize) -> f64 {
        self.cumulative_log_loss - self.member_log_loss[g]
    }

    pub fn averaged_weights(&self) -> &[f64] {
        &self.projector.weights
    }
}

pub fn fit_mixture_net(data: &Dataset, mus: &[RegFn], sigmas: &[RegFn], family: &ErrorFamily) -> Result<MixtureFit> {
    if mus.is_empty() || sigmas.is_empty() {
        return Err(Error::InvalidInput("nets must be nonempty".into()));
    }
    let size = mus.len() * sigmas.len();
    if size > MAX_PAIRS {
        return Err(Error::Capacity {
            what: "mixture net pairs".into(),
            requested: size as f64,
            limit: MAX_PAIRS as f64,
        });
    }
    if data.len() > MAX_DATA {
        return Err(Error::Capacity {
            what: "mixture data size".into(),
            requested: data.len() as f64,
            limit: MAX_DATA as f64,
        });
    }
    let pairs: Vec<(RegFn, RegFn)> =
        mus.iter().flat_map(|m| sigmas.iter().map(move |s| (m.clone(), s.clone()))).collect();
    let mut log_w = vec![-(size as f64).ln(); size];
    let mut avg = vec![0.0; size];
    let mut step_weights = Vec::with_capacity(data.len());
    let mut cumulative_log_loss = 0.0;
    let mut member_log_loss = vec![0.0; size];
    for (x, &y) in data.x.iter().zip(&data.y) {
        let w: Vec<f64> = log_w.iter().map(|l| l.exp()).collect();
        for (a, wi) in avg.iter_mut().zip(&w) {
            *a += wi;
        }
        let ll: Vec<f64> = pairs
            .iter()
            .map(|(mu, sigma)| {
                let s = sigma(x);
                family.std_ln_pdf((y - mu(x)) / s) - s.ln()
            })
            .collect();
        let joint: Vec<f64> = log_w.iter().zip(&ll).map(|(a, b)| a + b).collect();
        let log_pred = log_sum_exp(&joint);
        assert!(log_pred.is_finite(), "log-space posterior cannot underflow");
        cumulative_log_loss -= log_pred;
        for (m, l) in member_log_loss.iter_mut().zip(&ll) {
            *m -= l;
        }
        log_w = joint.iter().map(|j| j - log_pred).collect();
        step_weights.push(w);
    }
    let n = data.len() as f64;
    avg.iter_mut().for_each(|a| *a /= n);
    let projector = Arc::new(Projector { pairs, family: family.clone(), weights: avg });
    let p = projector.clone();
    let predictor = move |x: &[f64]| {
        let g = p.project(x);
        (p.pairs[g].0)(x)
    };
    let mut hyper = BTreeMap::new();
    hyper.insert("net_size".into(), size as f64);
    hyper.insert("projection_grid".into(), PROJECTION_GRID as f64);
    Ok(MixtureFit {
        estimate: FittedEstimate::new(Arc::new(predictor), MethodTag::MixtureNet, hyper),
        projector,
        step_weights,
        final_log_weights: log_w,
        cumulative_log_loss,
        member_log_loss,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::{reg_fn, simulate, CovariateDensity, RegressionInstance};

    #[test]
    fn singleton_net_returns_truth() {
        let mu = reg_fn(|x| 0.3 * x[0]);
        let inst = RegressionInstance::new(
            mu.clone(),
            reg_fn(|_| 1.0),
            ErrorFamily::cauchy(),
            CovariateDensity::Uniform { d: 1 },
            1.0,
            1.0,
        )
        .unwrap();
        let data = simulate(&inst, 50, 1).unwrap();
        let fit =
            fit_mixture_net(&data, std::slice::from_ref(&mu), &[reg_fn(|_| 1.0)], &ErrorFamily::cauchy()).unwrap();
        for x in [0.1, 0.5, 0.9] {
            assert_eq!(fit.estimate.predict(&[x]), mu(&[x]));
        }
    }

    #[test]
    fn posterior_concentrates_and_matches_likelihood_ratio() {
        let fam = ErrorFamily::ald(0.5).unwrap();
        let m0 = reg_fn(|_| 0.0);
        let m1 = reg_fn(|_| 0.5);
        let inst = RegressionInstance::new(
            m0.clone(),
            reg_fn(|_| 1.0),
            fam.clone(),
            CovariateDensity::Uniform { d: 1 },
            1.0,
            1.0,
        )
        .unwrap();
        let data = simulate(&inst, 400, 2).unwrap();
        let fit = fit_mixture_net(&data, &[m0, m1], &[reg_fn(|_| 1.0)], &fam).unwrap();
        let llr = fit.member_log_loss[1] - fit.member_log_loss[0];
        let post1 = fit.final_log_weights[1] - fit.final_log_weights[0];
        assert!((post1 + llr).abs() < 1e-9);
        assert!(fit.final_log_weights[0].exp() > 0.99);
        assert!(fit.regret(0) <= 2f64.ln() + 1e-12);
    }

    #[test]
    fn capacity_guard() {
        let data = Dataset::new(vec![vec![0.5]], vec![0.0]).unwrap();
        let many: Vec<RegFn> = (0..40).map(|i| reg_fn(move |_| i as f64)).collect();
        assert!(matches!(fit_mixture_net(&data, &many, &many, &ErrorFamily::cauchy()), Err(Error::Capacity { .. })));
    }
}
