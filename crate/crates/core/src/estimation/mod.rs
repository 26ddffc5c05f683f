//! ψ-tile regression estimators for `Y = μ(X) + σ(X)ε` and their `L₂(h)` risk.

mod binned;
mod kernel_als;
mod mixture;

pub use binned::{fit_binned_mean, fit_binned_psi_tile};
pub use kernel_als::{als_objective, fit_kernel_als, gaussian_kernel};
pub use mixture::{fit_mixture_net, MixtureFit};

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::Rng as _;

use crate::distributions::{ErrorFamily, LocScaleMember};
use crate::error::{Error, Result};
use crate::seeding::rng_from_seed;

/// A real function on `[0,1]^d`.
pub type RegFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

pub fn reg_fn(f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> RegFn {
    Arc::new(f)
}

/// Covariate law `h` on `[0,1]^d` with independent coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CovariateDensity {
    Uniform {
        d: usize,
    },
    /// Each coordinate has density `1 + a(x − 1/2)`, `|a| < 2`.
    LinearTilt {
        d: usize,
        slope: f64,
    },
}

impl CovariateDensity {
    pub fn dim(&self) -> usize {
        match *self {
            CovariateDensity::Uniform { d } | CovariateDensity::LinearTilt { d, .. } => d,
        }
    }

    fn validate(&self) -> Result<()> {
        let d = self.dim();
        if !(1..=2).contains(&d) {
            return Err(Error::InvalidParameter(format!("covariate dimension must be 1 or 2, got {d}")));
        }
        if let CovariateDensity::LinearTilt { slope, .. } = *self {
            if !(slope.abs() < 2.0) {
                return Err(Error::InvalidParameter(format!("tilt slope must satisfy |a| < 2, got {slope}")));
            }
        }
        Ok(())
    }

    pub fn density(&self, x: &[f64]) -> f64 {
        match *self {
            CovariateDensity::Uniform { .. } => 1.0,
            CovariateDensity::LinearTilt { slope, .. } => x.iter().map(|&xi| 1.0 + slope * (xi - 0.5)).product(),
        }
    }

    pub fn sample(&self, rng: &mut crate::seeding::Rng) -> Vec<f64> {
        (0..self.dim())
            .map(|_| {
                let u: f64 = rng.random();
                match *self {
                    CovariateDensity::Uniform { .. } => u,
                    CovariateDensity::LinearTilt { slope: a, .. } => {
                        // F(x) = x + a(x² − x)/2; stable root of the quadratic.
                        if a.abs() < 1e-12 {
                            u
                        } else {
                            let b = 1.0 - a / 2.0;
                            2.0 * u / (b + (b * b + 2.0 * a * u).sqrt())
                        }
                    }
                }
            })
            .collect()
    }
}

/// `Y = μ(X) + σ(X)ε` with `sup|μ| ≤ J` and `1/σ̄ ≤ σ ≤ σ̄`.
#[derive(Clone)]
pub struct RegressionInstance {
    mu: RegFn,
    sigma_fn: RegFn,
    family: ErrorFamily,
    covariates: CovariateDensity,
    j_bound: f64,
    sigma_bar: f64,
}

impl fmt::Debug for RegressionInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RegressionInstance")
            .field("family", &self.family)
            .field("covariates", &self.covariates)
            .field("j_bound", &self.j_bound)
            .field("sigma_bar", &self.sigma_bar)
            .finish_non_exhaustive()
    }
}

impl RegressionInstance {
    /// Checks the bounds on a 257-point (d = 1) or 65² (d = 2) grid.
    pub fn new(
        mu: RegFn,
        sigma_fn: RegFn,
        family: ErrorFamily,
        covariates: CovariateDensity,
        j_bound: f64,
        sigma_bar: f64,
    ) -> Result<Self> {
        covariates.validate()?;
        if !(j_bound > 0.0) || !(sigma_bar >= 1.0) {
            return Err(Error::InvalidParameter(format!("need J > 0 and σ̄ ≥ 1, got J={j_bound}, σ̄={sigma_bar}")));
        }
        let d = covariates.dim();
        let k = if d == 1 { 257 } else { 65 };
        let axis: Vec<f64> = (0..k).map(|i| i as f64 / (k - 1) as f64).collect();
        let points: Vec<Vec<f64>> = if d == 1 {
            axis.iter().map(|&a| vec![a]).collect()
        } else {
            axis.iter().flat_map(|&a| axis.iter().map(move |&b| vec![a, b])).collect()
        };
        for x in &points {
            let m = mu(x);
            if !(m.abs() <= j_bound + 1e-12) {
                return Err(Error::InvalidParameter(format!("|μ({x:?})| = {} exceeds J = {j_bound}", m.abs())));
            }
            let s = sigma_fn(x);
            if !(s >= 1.0 / sigma_bar - 1e-12 && s <= sigma_bar + 1e-12) {
                return Err(Error::InvalidParameter(format!("σ({x:?}) = {s} outside [1/σ̄, σ̄]")));
            }
        }
        Ok(Self { mu, sigma_fn, family, covariates, j_bound, sigma_bar })
    }

    pub fn mu(&self, x: &[f64]) -> f64 {
        (self.mu)(x)
    }

    pub fn sigma(&self, x: &[f64]) -> f64 {
        (self.sigma_fn)(x)
    }

    pub fn mu_fn(&self) -> &RegFn {
        &self.mu
    }

    pub fn sigma_fn(&self) -> &RegFn {
        &self.sigma_fn
    }

    pub fn family(&self) -> &ErrorFamily {
        &self.family
    }

    pub fn covariates(&self) -> CovariateDensity {
        self.covariates
    }

    pub fn dim(&self) -> usize {
        self.covariates.dim()
    }

    pub fn j_bound(&self) -> f64 {
        self.j_bound
    }

    pub fn sigma_bar(&self) -> f64 {
        self.sigma_bar
    }

    /// Conditional law of `Y` at `x`.
    pub fn conditional(&self, x: &[f64]) -> LocScaleMember {
        LocScaleMember::new(self.family.clone(), self.mu(x), self.sigma(x)).expect("validated instance")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
}

impl Dataset {
    pub fn new(x: Vec<Vec<f64>>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() || x.is_empty() {
            return Err(Error::InvalidInput(
                "dataset needs equally many covariates and responses, at least one".into(),
            ));
        }
        let d = x[0].len();
        if d == 0 || x.iter().any(|xi| xi.len() != d) {
            return Err(Error::InvalidInput("covariates must share one positive dimension".into()));
        }
        Ok(Self { x, y })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.x[0].len()
    }

    /// The same covariates with responses `a + b·y`.
    pub fn affine_response(&self, a: f64, b: f64) -> Self {
        Self { x: self.x.clone(), y: self.y.iter().map(|y| a + b * y).collect() }
    }
}

/// `n` i.i.d. pairs from the instance, deterministic in `seed`.
pub fn simulate(instance: &RegressionInstance, n: usize, seed: u64) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::InvalidInput("sample size must be at least 1".into()));
    }
    let mut rng = rng_from_seed(seed);
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for _ in 0..n {
        let x = instance.covariates.sample(&mut rng);
        let e = instance.family.sample_std(&mut rng);
        ys.push(instance.mu(&x) + instance.sigma(&x) * e);
        xs.push(x);
    }
    Ok(Dataset { x: xs, y: ys })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MethodTag {
    BinnedPsiTile,
    BinnedMean,
    KernelAls,
    MixtureNet,
}

impl MethodTag {
    pub fn name(self) -> &'static str {
        match self {
            MethodTag::BinnedPsiTile => "binned_psi_tile",
            MethodTag::BinnedMean => "binned_mean",
            MethodTag::KernelAls => "kernel_als",
            MethodTag::MixtureNet => "mixture_net",
        }
    }
}

#[derive(Clone)]
pub struct FittedEstimate {
    predictor: RegFn,
    pub method: MethodTag,
    pub hyperparams: BTreeMap<String, f64>,
    /// Objective value per iteration (iterative fits only).
    pub trace: Vec<f64>,
}

impl fmt::Debug for FittedEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FittedEstimate")
            .field("method", &self.method)
            .field("hyperparams", &self.hyperparams)
            .field("iterations", &self.trace.len())
            .finish_non_exhaustive()
    }
}

impl FittedEstimate {
    pub fn new(predictor: RegFn, method: MethodTag, hyperparams: BTreeMap<String, f64>) -> Self {
        Self { predictor, method, hyperparams, trace: Vec::new() }
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        (self.predictor)(x)
    }

    pub fn predictor(&self) -> &RegFn {
        &self.predictor
    }
}

/// Clamp range `±(J + σ̄·t_max + 1)` for predictors.
pub fn default_clamp(j_bound: f64, sigma_bar: f64, t_max: f64) -> (f64, f64) {
    let r = j_bound + sigma_bar * t_max.abs() + 1.0;
    (-r, r)
}

const GL3_NODES: [f64; 3] = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
const GL3_WEIGHTS: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];

/// Composite 3-point Gauss–Legendre rule with `panels` panels per axis on `[0,1]^d`.
pub fn tensor_rule(d: usize, panels: usize) -> Vec<(Vec<f64>, f64)> {
    let h = 1.0 / panels as f64;
    let axis: Vec<(f64, f64)> = (0..panels)
        .flat_map(|p| {
            GL3_NODES.iter().zip(GL3_WEIGHTS).map(move |(&t, w)| ((p as f64 + 0.5 * (t + 1.0)) * h, 0.5 * w * h))
        })
        .collect();
    let mut out = vec![(Vec::new(), 1.0)];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|(p, w)| {
                axis.iter().map(move |&(a, wa)| {
                    let mut q = p.clone();
                    q.push(a);
                    (q, w * wa)
                })
            })
            .collect();
    }
    out
}

/// `∫ (μ − μ̂)² h` by the composite tensor rule with `grid ≥ 64` panels per axis.
pub fn l2_risk(estimate: &FittedEstimate, instance: &RegressionInstance, grid: usize) -> Result<f64> {
    if grid < 64 {
        return Err(Error::InvalidInput(format!("risk grid needs at least 64 panels per axis, got {grid}")));
    }
    let cov = instance.covariates();
    Ok(tensor_rule(instance.dim(), grid)
        .iter()
        .map(|(x, w)| w * cov.density(x) * (instance.mu(x) - estimate.predict(x)).powi(2))
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn instance() -> RegressionInstance {
        RegressionInstance::new(
            reg_fn(|x| 0.5 * (2.0 * std::f64::consts::PI * x[0]).sin()),
            reg_fn(|x| (0.3 * x[0]).exp()),
            ErrorFamily::ald(0.5).unwrap(),
            CovariateDensity::Uniform { d: 1 },
            1.0,
            2.0,
        )
        .unwrap()
    }

    #[test]
    fn risk_examples() {
        let inst = instance();
        let truth = FittedEstimate::new(inst.mu_fn().clone(), MethodTag::BinnedPsiTile, BTreeMap::new());
        assert!(l2_risk(&truth, &inst, 64).unwrap().abs() < 1e-15);
        let mu = inst.mu_fn().clone();
        let shifted = FittedEstimate::new(reg_fn(move |x| mu(x) + 0.3), MethodTag::BinnedPsiTile, BTreeMap::new());
        assert!((l2_risk(&shifted, &inst, 64).unwrap() - 0.09).abs() < 1e-12);
        assert!(l2_risk(&truth, &inst, 10).is_err());
    }

    #[test]
    fn piecewise_constant_against_linear_truth() {
        let inst = RegressionInstance::new(
            reg_fn(|x| x[0]),
            reg_fn(|_| 1.0),
            ErrorFamily::cauchy(),
            CovariateDensity::Uniform { d: 1 },
            1.0,
            1.0,
        )
        .unwrap();
        let est = FittedEstimate::new(
            reg_fn(|x| if x[0] < 0.5 { 0.25 } else { 0.75 }),
            MethodTag::BinnedPsiTile,
            BTreeMap::new(),
        );
        // Two cells of width 1/2, each contributing ∫_{−1/4}^{1/4} t² dt = 1/96.
        assert!((l2_risk(&est, &inst, 64).unwrap() - 2.0 / 96.0).abs() < 1e-14);
    }

    #[test]
    fn tilted_covariates_have_the_right_density() {
        let cov = CovariateDensity::LinearTilt { d: 1, slope: 1.2 };
        let mut rng = rng_from_seed(4);
        let n = 200_000;
        let below = (0..n).filter(|_| cov.sample(&mut rng)[0] < 0.5).count() as f64 / n as f64;
        // F(1/2) = 1/2 − a/8
        assert!((below - (0.5 - 1.2 / 8.0)).abs() < 0.005);
        let total: f64 = tensor_rule(1, 64).iter().map(|(x, w)| w * cov.density(x)).sum();
        assert!((total - 1.0).abs() < 1e-14);
    }

    #[test]
    fn simulation_replays() {
        let inst = instance();
        assert_eq!(simulate(&inst, 10, 5).unwrap(), simulate(&inst, 10, 5).unwrap());
        assert!(simulate(&inst, 0, 5).is_err());
    }

    #[test]
    fn instance_bounds_are_enforced() {
        let bad = RegressionInstance::new(
            reg_fn(|_| 3.0),
            reg_fn(|_| 1.0),
            ErrorFamily::cauchy(),
            CovariateDensity::Uniform { d: 1 },
            1.0,
            2.0,
        );
        assert!(bad.is_err());
    }
}
