//! Flat TOML rate-experiment configuration.
//!
//! ```toml
//! family = "ald"          # ald | acdtg | cnl | cauchy | asym-normal
//! tau = 0.5               # ald, acdtg, cnl
//! alpha = 1.0             # acdtg
//! phi = 0.7               # asym-normal
//! generator = "quantile"  # quantile | expectile | momentileK | huber
//! level = 0.5
//! truth = "sine"          # sine | sine-cos
//! scale = "exp"           # exp | unit
//! covariate_slope = 0.0   # 0 gives uniform covariates
//! n_grid = [512, 1024, 2048]
//! replications = 50
//! estimator = "binned_psi_tile"  # binned_psi_tile | binned_mean | kernel_als
//! lambda = 1e-3           # kernel_als
//! bandwidth = 0.1         # kernel_als
//! seed = 1
//! j_bound = 1.0
//! sigma_bar = 2.0
//! risk_grid = 512
//! clamp = true
//! slope_tolerance = 0.15
//! ```

use psitile::distributions::{ErrorFamily, FamilyKind};
use psitile::estimation::CovariateDensity;
use psitile::experiment::{EstimatorSpec, RateExperiment, ScaleId, TruthId};
use psitile::psi_tile::{Generator, PsiSpec};
use psitile::{Error, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

fn default_truth() -> String {
    "sine".into()
}
fn default_scale() -> String {
    "exp".into()
}
fn default_replications() -> usize {
    50
}
fn default_estimator() -> String {
    "binned_psi_tile".into()
}
fn default_j() -> f64 {
    1.0
}
fn default_sigma_bar() -> f64 {
    2.0
}
fn default_risk_grid() -> usize {
    512
}
fn default_true() -> bool {
    true
}
fn default_tolerance() -> f64 {
    0.15
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateConfig {
    pub family: String,
    pub tau: Option<f64>,
    pub alpha: Option<f64>,
    pub phi: Option<f64>,
    pub generator: String,
    pub level: f64,
    #[serde(default = "default_truth")]
    pub truth: String,
    #[serde(default = "default_scale")]
    pub scale: String,
    #[serde(default)]
    pub covariate_slope: f64,
    pub n_grid: Vec<usize>,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default = "default_estimator")]
    pub estimator: String,
    pub lambda: Option<f64>,
    pub bandwidth: Option<f64>,
    pub seed: u64,
    #[serde(default = "default_j")]
    pub j_bound: f64,
    #[serde(default = "default_sigma_bar")]
    pub sigma_bar: f64,
    #[serde(default = "default_risk_grid")]
    pub risk_grid: usize,
    #[serde(default = "default_true")]
    pub clamp: bool,
    #[serde(default = "default_tolerance")]
    pub slope_tolerance: f64,
}

impl RateConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// First 16 hex digits of the SHA-256 of the canonical serialisation.
    pub fn hash(&self) -> String {
        let canonical = toml::to_string(self).expect("config serialises");
        short_hash(&canonical)
    }

    pub fn experiment(&self) -> Result<RateExperiment> {
        let kind: FamilyKind = self.family.parse()?;
        let family = ErrorFamily::from_parts(kind, self.tau, self.alpha, self.phi)?;
        let generator: Generator = self.generator.parse()?;
        let psi = PsiSpec::new(generator, self.level)?;
        let truth: TruthId = self.truth.parse()?;
        let scale: ScaleId = self.scale.parse()?;
        let d = truth.dim();
        let covariates = if self.covariate_slope == 0.0 {
            CovariateDensity::Uniform { d }
        } else {
            CovariateDensity::LinearTilt { d, slope: self.covariate_slope }
        };
        let estimator = match self.estimator.as_str() {
            "binned_psi_tile" => EstimatorSpec::BinnedPsiTile,
            "binned_mean" => EstimatorSpec::BinnedMean,
            "kernel_als" => EstimatorSpec::KernelAls {
                lambda: self.lambda.ok_or_else(|| Error::Config("kernel_als requires lambda".into()))?,
                bandwidth: self.bandwidth.ok_or_else(|| Error::Config("kernel_als requires bandwidth".into()))?,
            },
            other => return Err(Error::Config(format!("unknown estimator '{other}'"))),
        };
        Ok(RateExperiment {
            family,
            psi,
            truth,
            scale,
            covariates,
            n_grid: self.n_grid.clone(),
            replications: self.replications,
            estimator,
            seed: self.seed,
            j_bound: self.j_bound,
            sigma_bar: self.sigma_bar,
            risk_grid: self.risk_grid,
            clamp: self.clamp,
        })
    }
}

pub fn short_hash(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().take(8).map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
family = "cauchy"
generator = "quantile"
level = 0.5
n_grid = [64, 128]
seed = 3
"#;

    #[test]
    fn defaults_fill_in() {
        let c = RateConfig::parse(MINIMAL).unwrap();
        assert_eq!(c.replications, 50);
        assert_eq!(c.estimator, "binned_psi_tile");
        let e = c.experiment().unwrap();
        assert_eq!(e.dim(), 1);
    }

    #[test]
    fn hash_ignores_formatting() {
        let a = RateConfig::parse(MINIMAL).unwrap();
        let b = RateConfig::parse(&MINIMAL.replace("seed = 3", "seed=3\n# comment")).unwrap();
        assert_eq!(a.hash(), b.hash());
        let c = RateConfig::parse(&MINIMAL.replace("seed = 3", "seed = 4")).unwrap();
        assert_ne!(a.hash(), c.hash());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RateConfig::parse(&format!("{MINIMAL}\nbogus = 1")).is_err());
    }

    #[test]
    fn missing_family_parameter() {
        let text = MINIMAL.replace("cauchy", "ald");
        assert!(RateConfig::parse(&text).unwrap().experiment().is_err());
    }
}
