//! Monte Carlo experiments: empirical rates, the shift identity, the
//! local-averaging failure under Cauchy noise and the toy mixture estimator.

use num_rational::Rational64;
use rand::Rng as _;
use rayon::prelude::*;

use crate::distributions::{ErrorFamily, FamilyKind, LocScaleMember};
use crate::error::{Error, Result};
use crate::estimation::{
    default_clamp, fit_binned_mean, fit_binned_psi_tile, fit_kernel_als, fit_mixture_net, reg_fn, simulate,
    tensor_rule, CovariateDensity, FittedEstimate, RegFn, RegressionInstance,
};
use crate::function_classes::{rate_from_entropy, EntropyOrder};
use crate::psi_tile::{empirical_psi_tile, psi_tile_of_density, psi_tile_shift, Generator, PsiSpec};
use crate::seeding::{derive_seed, rng_from_seed};

/// Named regression functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TruthId {
    /// `μ(x) = ½ sin(2π x₁)`, Lipschitz (α = 1).
    Sine,
    /// `μ(x) = ½ sin(2π x₁) cos(π x₂)`, Lipschitz on `[0,1]²`.
    SineCos,
}

impl TruthId {
    pub fn name(self) -> &'static str {
        match self {
            TruthId::Sine => "sine",
            TruthId::SineCos => "sine-cos",
        }
    }

    pub fn smoothness(self) -> Rational64 {
        Rational64::from_integer(1)
    }

    pub fn dim(self) -> usize {
        match self {
            TruthId::Sine => 1,
            TruthId::SineCos => 2,
        }
    }

    pub fn function(self) -> RegFn {
        use std::f64::consts::PI;
        match self {
            TruthId::Sine => reg_fn(|x| 0.5 * (2.0 * PI * x[0]).sin()),
            TruthId::SineCos => reg_fn(|x| 0.5 * (2.0 * PI * x[0]).sin() * (PI * x[1]).cos()),
        }
    }
}

impl std::str::FromStr for TruthId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sine" => Ok(TruthId::Sine),
            "sine-cos" => Ok(TruthId::SineCos),
            other => Err(Error::Config(format!("unknown truth '{other}'"))),
        }
    }
}

/// Named scale functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScaleId {
    /// `σ ≡ 1`.
    Unit,
    /// `σ(x) = exp(0.3 Σ x_i)`.
    Exp,
}

impl ScaleId {
    pub fn name(self) -> &'static str {
        match self {
            ScaleId::Unit => "unit",
            ScaleId::Exp => "exp",
        }
    }

    pub fn function(self) -> RegFn {
        match self {
            ScaleId::Unit => reg_fn(|_| 1.0),
            ScaleId::Exp => reg_fn(|x| (0.3 * x.iter().sum::<f64>()).exp()),
        }
    }
}

impl std::str::FromStr for ScaleId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unit" => Ok(ScaleId::Unit),
            "exp" => Ok(ScaleId::Exp),
            other => Err(Error::Config(format!("unknown scale function '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EstimatorSpec {
    /// Binned ψ-tile with `⌈n^{1/(2α+d)}⌉` bins per axis.
    BinnedPsiTile,
    /// Binned sample mean with the same bins.
    BinnedMean,
    KernelAls {
        lambda: f64,
        bandwidth: f64,
    },
}

impl EstimatorSpec {
    pub fn name(&self) -> &'static str {
        match self {
            EstimatorSpec::BinnedPsiTile => "binned_psi_tile",
            EstimatorSpec::BinnedMean => "binned_mean",
            EstimatorSpec::KernelAls { .. } => "kernel_als",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateExperiment {
    pub family: ErrorFamily,
    pub psi: PsiSpec,
    pub truth: TruthId,
    pub scale: ScaleId,
    pub covariates: CovariateDensity,
    pub n_grid: Vec<usize>,
    pub replications: usize,
    pub estimator: EstimatorSpec,
    pub seed: u64,
    pub j_bound: f64,
    pub sigma_bar: f64,
    /// Panels per axis of the risk rule.
    pub risk_grid: usize,
    pub clamp: bool,
}

impl RateExperiment {
    /// The default rate setup: sine truth, `σ(x) = exp(0.3x)`, uniform covariates,
    /// `n ∈ {512, …, 16384}`, 50 replications, binned ψ-tile.
    pub fn standard(family: ErrorFamily, psi: PsiSpec, seed: u64) -> Self {
        Self {
            family,
            psi,
            truth: TruthId::Sine,
            scale: ScaleId::Exp,
            covariates: CovariateDensity::Uniform { d: 1 },
            n_grid: (9..=14).map(|k| 1usize << k).collect(),
            replications: 50,
            estimator: EstimatorSpec::BinnedPsiTile,
            seed,
            j_bound: 1.0,
            sigma_bar: 2.0,
            risk_grid: 512,
            clamp: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.truth.dim()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_grid.is_empty() || self.n_grid.windows(2).any(|w| w[1] <= w[0]) || self.n_grid[0] < 2 {
            return Err(Error::Config("n_grid must be strictly increasing with entries ≥ 2".into()));
        }
        if self.replications < 10 {
            return Err(Error::Config(format!("at least 10 replications are needed, got {}", self.replications)));
        }
        if self.covariates.dim() != self.truth.dim() {
            return Err(Error::Config("covariate dimension does not match the truth".into()));
        }
        if self.risk_grid < 64 {
            return Err(Error::Config("risk_grid must be at least 64".into()));
        }
        if let EstimatorSpec::KernelAls { lambda, bandwidth } = self.estimator {
            if self.psi.generator() != Generator::Linear {
                return Err(Error::Config("kernel ALS needs the linear (expectile) generator".into()));
            }
            if !(lambda > 0.0 && bandwidth > 0.0) {
                return Err(Error::Config("kernel ALS needs positive λ and bandwidth".into()));
            }
            if *self.n_grid.last().expect("nonempty") > 2000 {
                return Err(Error::Config("kernel ALS is limited to n ≤ 2000".into()));
            }
        }
        let standard = LocScaleMember::standard(self.family.clone());
        if let Err(e @ Error::MomentNonexistent { .. }) = psi_tile_of_density(&standard, &self.psi) {
            return Err(Error::Config(format!("inadmissible generator for this family: {e}")));
        }
        Ok(())
    }

    pub fn instance(&self) -> Result<RegressionInstance> {
        RegressionInstance::new(
            self.truth.function(),
            self.scale.function(),
            self.family.clone(),
            self.covariates,
            self.j_bound,
            self.sigma_bar,
        )
    }

    pub fn bins(&self, n: usize) -> usize {
        let a = *self.truth.smoothness().numer() as f64 / *self.truth.smoothness().denom() as f64;
        let e = 1.0 / (2.0 * a + self.dim() as f64);
        ((n as f64).powf(e) - 1e-9).ceil().max(1.0) as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateRow {
    pub n: usize,
    pub bins: usize,
    pub mean_risk: f64,
    pub std_err: f64,
    /// Per-replication risks in replication order.
    pub risks: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateResult {
    pub rows: Vec<RateRow>,
    pub slope: f64,
    pub slope_se: f64,
    /// Whether the smallest n was left out of the slope fit.
    pub dropped_smallest: bool,
    pub theoretical_exponent: Rational64,
}

impl RateResult {
    pub fn theoretical_exponent_f64(&self) -> f64 {
        *self.theoretical_exponent.numer() as f64 / *self.theoretical_exponent.denom() as f64
    }
}

/// Least-squares slope of `y` on `x` and its standard error (0 with two points).
pub fn fit_slope(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    if x.len() < 3 {
        return (slope, 0.0);
    }
    let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - my - slope * (a - mx)).powi(2)).sum();
    (slope, (rss / (n - 2.0) / sxx).sqrt())
}

/// The ψ-tile target `μ(x) + σ(x) t` evaluated on the risk rule.
fn target_on_rule(instance: &RegressionInstance, psi: &PsiSpec, rule: &[(Vec<f64>, f64)]) -> Result<Vec<f64>> {
    let standard = LocScaleMember::standard(instance.family().clone());
    if psi.generator() == Generator::Huber {
        rule.par_iter().map(|(x, _)| psi_tile_shift(&standard, psi, instance.mu(x), instance.sigma(x))).collect()
    } else {
        let t = psi_tile_of_density(&standard, psi)?;
        Ok(rule.iter().map(|(x, _)| instance.mu(x) + instance.sigma(x) * t).collect())
    }
}

fn risk_against(estimate: &FittedEstimate, rule: &[(Vec<f64>, f64)], target: &[f64], cov: CovariateDensity) -> f64 {
    rule.iter().zip(target).map(|((x, w), t)| w * cov.density(x) * (t - estimate.predict(x)).powi(2)).sum()
}

fn fit_one(
    exp: &RateExperiment,
    instance: &RegressionInstance,
    n: usize,
    seed: u64,
    t_max: f64,
) -> Result<FittedEstimate> {
    let data = simulate(instance, n, seed)?;
    let clamp = exp.clamp.then(|| default_clamp(exp.j_bound, exp.sigma_bar, t_max));
    match exp.estimator {
        EstimatorSpec::BinnedPsiTile => fit_binned_psi_tile(&data, &exp.psi, exp.bins(n), clamp),
        EstimatorSpec::BinnedMean => fit_binned_mean(&data, exp.bins(n), clamp),
        EstimatorSpec::KernelAls { lambda, bandwidth } => fit_kernel_als(&data, exp.psi.level(), lambda, bandwidth),
    }
}

/// Simulate → fit → risk for every `(n, replication)`, then a log-log slope.
///
/// The smallest n is dropped from the slope fit when its risk standard
/// error exceeds a quarter of its mean risk.
pub fn run_rates(exp: &RateExperiment) -> Result<RateResult> {
    exp.validate()?;
    let instance = exp.instance()?;
    let rule = tensor_rule(exp.dim(), exp.risk_grid);
    let target = target_on_rule(&instance, &exp.psi, &rule)?;
    let standard = LocScaleMember::standard(exp.family.clone());
    let t_max = match exp.estimator {
        EstimatorSpec::BinnedMean => 0.0,
        _ => psi_tile_of_density(&standard, &exp.psi)?,
    };
    let jobs: Vec<(usize, usize)> =
        (0..exp.n_grid.len()).flat_map(|i| (0..exp.replications).map(move |r| (i, r))).collect();
    let risks = jobs
        .par_iter()
        .map(|&(i, r)| {
            let seed = derive_seed(derive_seed(exp.seed, i as u64), r as u64);
            let est = fit_one(exp, &instance, exp.n_grid[i], seed, t_max)?;
            Ok(risk_against(&est, &rule, &target, exp.covariates))
        })
        .collect::<Result<Vec<f64>>>()?;
    let rows: Vec<RateRow> = exp
        .n_grid
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let rs = risks[i * exp.replications..(i + 1) * exp.replications].to_vec();
            let k = rs.len() as f64;
            let mean = rs.iter().sum::<f64>() / k;
            let var = rs.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (k - 1.0);
            RateRow { n, bins: exp.bins(n), mean_risk: mean, std_err: (var / k).sqrt(), risks: rs }
        })
        .collect();
    let dropped_smallest = rows.len() > 2 && rows[0].std_err > 0.25 * rows[0].mean_risk;
    let used = if dropped_smallest { &rows[1..] } else { &rows[..] };
    let xs: Vec<f64> = used.iter().map(|r| (r.n as f64).ln()).collect();
    let ys: Vec<f64> = used.iter().map(|r| r.mean_risk.ln()).collect();
    let (slope, slope_se) = fit_slope(&xs, &ys);
    let order = EntropyOrder::lipschitz(exp.truth.smoothness(), exp.dim() as u32)?;
    let theoretical_exponent = rate_from_entropy(&order, *exp.n_grid.last().expect("nonempty") as u64)?.exponent;
    Ok(RateResult { rows, slope, slope_se, dropped_smallest, theoretical_exponent })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftBin {
    pub centre: f64,
    pub count: usize,
    pub estimate: f64,
    pub target: f64,
    pub bootstrap_se: f64,
}

impl ShiftBin {
    pub fn z(&self) -> f64 {
        (self.estimate - self.target) / self.bootstrap_se
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftReport {
    pub family: String,
    pub psi: String,
    pub tile: f64,
    pub bins: Vec<ShiftBin>,
}

impl ShiftReport {
    pub fn max_abs_z(&self) -> f64 {
        self.bins.iter().map(|b| b.z().abs()).fold(0.0, f64::max)
    }

    pub fn passed(&self, k: f64) -> bool {
        self.bins.iter().all(|b| b.z().abs() <= k)
    }
}

/// Empirical conditional ψ-tiles in `bins` narrow windows of half-width
/// `half_width` around equally spaced centres, against `μ(x) + σ(x)t`.
#[allow(clippy::too_many_arguments)]
pub fn shift_identity_check(
    family: &ErrorFamily,
    psi: &PsiSpec,
    scale: ScaleId,
    n: usize,
    bins: usize,
    half_width: f64,
    bootstrap: usize,
    seed: u64,
) -> Result<ShiftReport> {
    if bins == 0 || bootstrap < 2 || !(half_width > 0.0 && half_width < 0.5 / bins as f64) {
        return Err(Error::InvalidInput("need bins ≥ 1, bootstrap ≥ 2 and non-overlapping windows".into()));
    }
    let instance = RegressionInstance::new(
        TruthId::Sine.function(),
        scale.function(),
        family.clone(),
        CovariateDensity::Uniform { d: 1 },
        1.0,
        2.0,
    )?;
    let standard = LocScaleMember::standard(family.clone());
    let tile = psi_tile_of_density(&standard, psi)?;
    let data = simulate(&instance, n, seed)?;
    let out = (0..bins)
        .into_par_iter()
        .map(|b| -> Result<ShiftBin> {
            let centre = (b as f64 + 0.5) / bins as f64;
            let ys: Vec<f64> = data
                .x
                .iter()
                .zip(&data.y)
                .filter(|(x, _)| (x[0] - centre).abs() <= half_width)
                .map(|(_, &y)| y)
                .collect();
            if ys.len() < 10 {
                return Err(Error::InvalidInput(format!("window around {centre} holds only {} points", ys.len())));
            }
            let estimate = empirical_psi_tile(&ys, psi)?;
            let mut rng = rng_from_seed(derive_seed(seed ^ 0x5eed, b as u64));
            let mut boots = Vec::with_capacity(bootstrap);
            let mut resample = vec![0.0; ys.len()];
            for _ in 0..bootstrap {
                for r in resample.iter_mut() {
                    *r = ys[rng.random_range(0..ys.len())];
                }
                boots.push(empirical_psi_tile(&resample, psi)?);
            }
            let m = boots.iter().sum::<f64>() / bootstrap as f64;
            let se = (boots.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (bootstrap as f64 - 1.0)).sqrt();
            let x = [centre];
            let target = psi_tile_shift(&standard, psi, instance.mu(&x), instance.sigma(&x))?;
            Ok(ShiftBin { centre, count: ys.len(), estimate, target, bootstrap_se: se })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ShiftReport { family: family.label(), psi: psi.label(), tile, bins: out })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FailureContrast {
    pub n_grid: Vec<usize>,
    /// Mean risk per n of the binned mean.
    pub mean_estimator: Vec<f64>,
    /// Mean risk per n of the binned median.
    pub median_estimator: Vec<f64>,
    /// Fraction of replications whose binned-mean risk at the largest n is
    /// at least its risk at the smallest n.
    pub mean_not_improved: f64,
}

impl FailureContrast {
    pub fn median_monotone(&self) -> bool {
        self.median_estimator.windows(2).all(|w| w[1] < w[0])
    }
}

/// Binned mean versus binned median under Cauchy errors on the standard setup.
pub fn failure_contrast(n_grid: &[usize], replications: usize, seed: u64) -> Result<FailureContrast> {
    let mut base = RateExperiment::standard(ErrorFamily::cauchy(), PsiSpec::quantile(0.5)?, seed);
    base.n_grid = n_grid.to_vec();
    base.replications = replications;
    let median = run_rates(&base)?;
    let mut mean = base.clone();
    mean.estimator = EstimatorSpec::BinnedMean;
    mean.psi = PsiSpec::expectile(0.5)?;
    // The moment check would reject the expectile under Cauchy noise; the
    // mean estimator is run on purpose, so validation is bypassed here.
    let mean_res = run_rates_unchecked(&mean)?;
    let first = &mean_res.rows[0].risks;
    let last = &mean_res.rows[mean_res.rows.len() - 1].risks;
    let not_improved = first.iter().zip(last).filter(|(a, b)| b >= a).count() as f64 / first.len() as f64;
    Ok(FailureContrast {
        n_grid: n_grid.to_vec(),
        mean_estimator: mean_res.rows.iter().map(|r| r.mean_risk).collect(),
        median_estimator: median.rows.iter().map(|r| r.mean_risk).collect(),
        mean_not_improved: not_improved,
    })
}

fn run_rates_unchecked(exp: &RateExperiment) -> Result<RateResult> {
    let instance = exp.instance()?;
    let rule = tensor_rule(exp.dim(), exp.risk_grid);
    let target: Vec<f64> = rule.iter().map(|(x, _)| instance.mu(x)).collect();
    let jobs: Vec<(usize, usize)> =
        (0..exp.n_grid.len()).flat_map(|i| (0..exp.replications).map(move |r| (i, r))).collect();
    let risks = jobs
        .par_iter()
        .map(|&(i, r)| {
            let seed = derive_seed(derive_seed(exp.seed, i as u64), r as u64);
            let est = fit_one(exp, &instance, exp.n_grid[i], seed, 0.0)?;
            Ok(risk_against(&est, &rule, &target, exp.covariates))
        })
        .collect::<Result<Vec<f64>>>()?;
    let rows = exp
        .n_grid
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let rs = risks[i * exp.replications..(i + 1) * exp.replications].to_vec();
            let mean = rs.iter().sum::<f64>() / rs.len() as f64;
            RateRow { n, bins: exp.bins(n), mean_risk: mean, std_err: f64::NAN, risks: rs }
        })
        .collect();
    Ok(RateResult {
        rows,
        slope: f64::NAN,
        slope_se: f64::NAN,
        dropped_smallest: false,
        theoretical_exponent: Rational64::from_integer(0),
    })
}

/// Mixture-net toy: ten location members `μ_j(x) = −2.25 + 0.5j + 0.1 sin(2πx)`, unit scale.
pub fn mixture_members() -> Vec<RegFn> {
    (0..10)
        .map(|j| reg_fn(move |x: &[f64]| -2.25 + 0.5 * j as f64 + 0.1 * (2.0 * std::f64::consts::PI * x[0]).sin()))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixtureRun {
    pub seed: u64,
    /// `(1/n) Σ_i E_x KL(f_true(·|x) ‖ p̃_i(·|x))`.
    pub average_predictive_kl: f64,
    /// Largest cumulative log-loss regret against the generating member.
    pub regret: f64,
    pub recovered: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixtureCheck {
    pub n: usize,
    pub net_size: usize,
    /// KL from the generating member to its nearest net member (0 here).
    pub approximation_kl: f64,
    pub runs: Vec<MixtureRun>,
}

impl MixtureCheck {
    pub fn bound(&self) -> f64 {
        (self.net_size as f64).ln() / self.n as f64 + self.approximation_kl
    }

    /// Mean over the runs where the predictive KL was evaluated.
    pub fn mean_predictive_kl(&self) -> f64 {
        let kl: Vec<f64> = self.runs.iter().map(|r| r.average_predictive_kl).filter(|v| !v.is_nan()).collect();
        kl.iter().sum::<f64>() / kl.len() as f64
    }

    /// Monte Carlo standard error of [`Self::mean_predictive_kl`].
    pub fn predictive_kl_se(&self) -> f64 {
        let kl: Vec<f64> = self.runs.iter().map(|r| r.average_predictive_kl).filter(|v| !v.is_nan()).collect();
        let k = kl.len() as f64;
        let m = kl.iter().sum::<f64>() / k;
        (kl.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (k - 1.0) / k).sqrt()
    }

    pub fn mean_regret(&self) -> f64 {
        self.runs.iter().map(|r| r.regret).sum::<f64>() / self.runs.len() as f64
    }

    pub fn max_regret(&self) -> f64 {
        self.runs.iter().map(|r| r.regret).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn recovery_rate(&self) -> f64 {
        self.runs.iter().filter(|r| r.recovered).count() as f64 / self.runs.len() as f64
    }
}

fn tangent_rule(centre: f64, scale: f64, k: usize) -> Vec<(f64, f64)> {
    let du = std::f64::consts::PI / k as f64;
    (0..k)
        .map(|i| {
            let u = -0.5 * std::f64::consts::PI + (i as f64 + 0.5) * du;
            (centre + scale * u.tan(), scale * du / u.cos().powi(2))
        })
        .collect()
}

/// Runs the toy mixture estimator on data from member `truth` for each seed.
///
/// The predictive KL is evaluated on a 12-node Gauss–Legendre x-rule and a
/// 256-node tangent y-rule, for the first `kl_seeds` runs only.
pub fn mixture_check(
    family: &ErrorFamily,
    n: usize,
    truth: usize,
    seeds: &[u64],
    kl_seeds: usize,
) -> Result<MixtureCheck> {
    let members = mixture_members();
    if truth >= members.len() {
        return Err(Error::InvalidInput("generating member index out of range".into()));
    }
    let unit = vec![reg_fn(|_| 1.0)];
    let instance = RegressionInstance::new(
        members[truth].clone(),
        unit[0].clone(),
        family.clone(),
        CovariateDensity::Uniform { d: 1 },
        2.5,
        1.0,
    )?;
    let x_rule = tensor_rule(1, 4);
    let check_points: Vec<Vec<f64>> = (0..20).map(|i| vec![(i as f64 + 0.5) / 20.0]).collect();
    let runs = seeds
        .par_iter()
        .enumerate()
        .map(|(idx, &seed)| -> Result<MixtureRun> {
            let data = simulate(&instance, n, seed)?;
            let fit = fit_mixture_net(&data, &members, &unit, family)?;
            let recovered = check_points.iter().all(|x| fit.pair_index(x) == truth);
            let average_predictive_kl = if idx < kl_seeds {
                let mut total = 0.0;
                for step in 0..n {
                    let mut kl = 0.0;
                    for (x, w) in &x_rule {
                        let m = instance.mu(x);
                        let f = LocScaleMember::new(family.clone(), m, 1.0)?;
                        let val: f64 = tangent_rule(m, 1.0, 256)
                            .iter()
                            .map(|&(y, dy)| {
                                let p = f.pdf(y);
                                if p == 0.0 {
                                    0.0
                                } else {
                                    dy * p * (f.ln_pdf(y) - fit.step_ln_density(step, x, y))
                                }
                            })
                            .sum();
                        kl += w * val;
                    }
                    total += kl;
                }
                total / n as f64
            } else {
                f64::NAN
            };
            Ok(MixtureRun { seed, average_predictive_kl, regret: fit.regret(truth), recovered })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MixtureCheck { n, net_size: members.len(), approximation_kl: 0.0, runs })
}

/// One representative of each error family.
pub fn standard_families() -> Vec<ErrorFamily> {
    vec![
        ErrorFamily::ald(0.3).expect("valid"),
        ErrorFamily::acdtg(0.3, 1.0).expect("valid"),
        ErrorFamily::cnl(0.3).expect("valid"),
        ErrorFamily::cauchy(),
        ErrorFamily::asym_normal(0.5).expect("valid"),
    ]
}

/// True when the family/generator pair has a finite ψ-tile.
pub fn admissible(family: &ErrorFamily, psi: &PsiSpec) -> bool {
    !(family.kind() == FamilyKind::Cauchy && psi.generator().required_moment() > 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bins_follow_the_rate() {
        let e = RateExperiment::standard(ErrorFamily::ald(0.5).unwrap(), PsiSpec::quantile(0.5).unwrap(), 1);
        assert_eq!(e.bins(512), 8);
        assert_eq!(e.bins(4096), 16);
        assert_eq!(e.bins(16384), 26);
    }

    #[test]
    fn slope_of_exact_power_law() {
        let x: Vec<f64> = [1.0f64, 2.0, 4.0, 8.0].iter().map(|v| v.ln()).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 - 0.5 * v).collect();
        let (s, se) = fit_slope(&x, &y);
        assert!((s + 0.5).abs() < 1e-12 && se < 1e-12);
    }

    #[test]
    fn inadmissible_config_is_rejected() {
        let e = RateExperiment::standard(ErrorFamily::cauchy(), PsiSpec::expectile(0.5).unwrap(), 1);
        assert!(matches!(run_rates(&e), Err(Error::Config(msg)) if msg.contains("moment")));
    }

    #[test]
    fn small_rate_run_is_reproducible() {
        let mut e = RateExperiment::standard(ErrorFamily::ald(0.5).unwrap(), PsiSpec::quantile(0.5).unwrap(), 3);
        e.n_grid = vec![64, 128, 256];
        e.replications = 10;
        let a = run_rates(&e).unwrap();
        let b = run_rates(&e).unwrap();
        assert_eq!(a, b);
        assert!(a.rows.iter().all(|r| r.mean_risk > 0.0));
    }
}
