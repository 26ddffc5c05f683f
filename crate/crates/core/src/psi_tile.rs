//! ψ-tiles: quantiles, expectiles, momentiles and Huber-tiles of densities and samples.
//!
//! For a level φ and generator ψ the ψ-tile of `F` is the infimal root of
//!
//! ```text
//! G(z) = (1 − φ) ∫_{y ≤ z} ψ(z − y) dF(y) − φ ∫_{y > z} ψ(y − z) dF(y),
//! ```
//!
//! which is nondecreasing in `z` for every supported generator.

use crate::distributions::LocScaleMember;
use crate::error::{Error, Result};
use crate::quadrature::{integrate_upper, Tolerance};
use crate::roots::{expand_bracket, infimal_root};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Generator {
    /// ψ ≡ 1 (quantiles).
    Constant,
    /// ψ(t) = t (expectiles).
    Linear,
    /// ψ(t) = t^k; `Momentile(1)` is the expectile.
    Momentile(u32),
    /// ψ(t) = 2·min(t, 1).
    Huber,
}

impl Generator {
    #[inline]
    pub fn psi(self, t: f64) -> f64 {
        match self {
            Generator::Constant => 1.0,
            Generator::Linear => t,
            Generator::Momentile(k) => t.powi(k as i32),
            Generator::Huber => 2.0 * t.min(1.0),
        }
    }

    /// `∫_0^t ψ(s) ds` for `t ≥ 0`.
    #[inline]
    pub fn primitive(self, t: f64) -> f64 {
        match self {
            Generator::Constant => t,
            Generator::Linear => 0.5 * t * t,
            Generator::Momentile(k) => t.powi(k as i32 + 1) / (k as f64 + 1.0),
            Generator::Huber => {
                if t <= 1.0 {
                    t * t
                } else {
                    2.0 * t - 1.0
                }
            }
        }
    }

    /// Order of the absolute moment `∫ ψ(|z − y|) dF` needs.
    pub fn required_moment(self) -> u32 {
        match self {
            Generator::Constant | Generator::Huber => 0,
            Generator::Linear => 1,
            Generator::Momentile(k) => k,
        }
    }

    pub fn name(self) -> String {
        match self {
            Generator::Constant => "constant".into(),
            Generator::Linear => "linear".into(),
            Generator::Momentile(k) => format!("momentile{k}"),
            Generator::Huber => "huber".into(),
        }
    }
}

impl std::str::FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.to_ascii_lowercase();
        match s.as_str() {
            "constant" | "quantile" => Ok(Generator::Constant),
            "linear" | "expectile" => Ok(Generator::Linear),
            "huber" => Ok(Generator::Huber),
            _ => {
                let k = s
                    .strip_prefix("momentile")
                    .and_then(|rest| rest.trim_start_matches(['(', ':', '-']).trim_end_matches(')').parse::<u32>().ok())
                    .ok_or_else(|| Error::InvalidParameter(format!("unknown generator '{s}'")))?;
                if k == 0 {
                    return Err(Error::InvalidParameter("momentile order must be at least 1".into()));
                }
                Ok(Generator::Momentile(k))
            }
        }
    }
}

/// A generator together with its level φ ∈ (0, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiSpec {
    generator: Generator,
    level: f64,
}

impl PsiSpec {
    pub fn new(generator: Generator, level: f64) -> Result<Self> {
        if !(level > 0.0 && level < 1.0) {
            return Err(Error::InvalidParameter(format!("level must lie in (0, 1), got {level}")));
        }
        if generator == Generator::Momentile(0) {
            return Err(Error::InvalidParameter("momentile order must be at least 1".into()));
        }
        Ok(Self { generator, level })
    }

    pub fn quantile(tau: f64) -> Result<Self> {
        Self::new(Generator::Constant, tau)
    }

    pub fn expectile(phi: f64) -> Result<Self> {
        Self::new(Generator::Linear, phi)
    }

    pub fn momentile(k: u32, phi: f64) -> Result<Self> {
        Self::new(Generator::Momentile(k), phi)
    }

    pub fn huber(phi: f64) -> Result<Self> {
        Self::new(Generator::Huber, phi)
    }

    pub fn generator(&self) -> Generator {
        self.generator
    }

    pub fn level(&self) -> f64 {
        self.level
    }

    pub fn label(&self) -> String {
        format!("{}@{}", self.generator.name(), self.level)
    }

    pub fn loss(&self) -> TailLoss {
        TailLoss { psi: *self }
    }
}

/// The loss `J` induced by a [`PsiSpec`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailLoss {
    psi: PsiSpec,
}

impl TailLoss {
    pub fn spec(&self) -> PsiSpec {
        self.psi
    }

    /// `J(z) = φ ∫_0^z ψ` for `z ≥ 0` and `(1 − φ) ∫_0^{|z|} ψ` for `z < 0`.
    pub fn eval(&self, z: f64) -> f64 {
        let phi = self.psi.level;
        let g = self.psi.generator;
        if z >= 0.0 {
            phi * g.primitive(z)
        } else {
            (1.0 - phi) * g.primitive(-z)
        }
    }
}

/// Check loss `ρ_τ(y) = y(τ − I(y < 0))`.
pub fn check_loss(tau: f64, y: f64) -> f64 {
    y * (tau - if y < 0.0 { 1.0 } else { 0.0 })
}

/// Asymmetric square loss `l_φ(y) = y² |φ − I(y < 0)|`.
pub fn asymmetric_square_loss(phi: f64, y: f64) -> f64 {
    y * y * (phi - if y < 0.0 { 1.0 } else { 0.0 }).abs()
}

fn admissible(member: &LocScaleMember, psi: &PsiSpec) -> Result<()> {
    let order = psi.generator.required_moment();
    if member.family().has_absolute_moment(order) {
        Ok(())
    } else {
        Err(Error::MomentNonexistent { family: member.family().label(), generator: psi.generator.name(), order })
    }
}

/// The ψ-tile of a location-scale member.
pub fn psi_tile_of_density(member: &LocScaleMember, psi: &PsiSpec) -> Result<f64> {
    admissible(member, psi)?;
    if psi.generator == Generator::Constant {
        return member.quantile(psi.level);
    }
    let phi = psi.level;
    let g = psi.generator;
    let sigma = member.sigma();
    let kinks = member.kinks();
    let tol = Tolerance::new(1e-15, 1e-12);
    // One-sided pieces; each is a positive integral, so a relative target is meaningful.
    let side = |z: f64, right: bool| -> Result<f64> {
        let mut total = 0.0;
        // Split at kinks on the relevant side of z so every panel is smooth.
        let mut cuts: Vec<f64> =
            kinks.iter().copied().filter(|&k| if right { k > z } else { k < z }).map(|k| (k - z).abs()).collect();
        cuts.sort_by(f64::total_cmp);
        let f = |t: f64| {
            let y = if right { z + t } else { z - t };
            g.psi(t) * member.pdf(y)
        };
        let mut lo = 0.0;
        for c in cuts {
            total += crate::quadrature::integrate(f, lo, c, tol)?.value;
            lo = c;
        }
        total += integrate_upper(f, lo, sigma, tol)?.value;
        Ok(total)
    };
    let err = std::cell::Cell::new(None);
    let gfun = |z: f64| match (side(z, false), side(z, true)) {
        (Ok(l), Ok(r)) => (1.0 - phi) * l - phi * r,
        (Err(e), _) | (_, Err(e)) => {
            err.set(Some(e));
            f64::NAN
        }
    };
    let start = member.quantile(phi)?;
    let bracket = expand_bracket(&gfun, start - sigma, start + sigma);
    if let Some(e) = err.take() {
        return Err(e);
    }
    let (lo, hi) = bracket?;
    let root = infimal_root(&gfun, lo, hi, 1e-11 * sigma.max(1.0));
    if let Some(e) = err.take() {
        return Err(e);
    }
    root
}

/// `μ + σ·t_{φ,ψ}(f)`, the ψ-tile of the member shifted to `(μ, σ)`.
///
/// The shortcut through the standard member is exact for the
/// scale-equivariant generators (constant, linear, momentile); the Huber
/// generator has a fixed threshold, so its tile is solved on the shifted
/// member directly.
pub fn psi_tile_shift(member: &LocScaleMember, psi: &PsiSpec, mu_x: f64, sigma_x: f64) -> Result<f64> {
    let standard = LocScaleMember::standard(member.family().clone());
    if psi.generator == Generator::Huber {
        let shifted = LocScaleMember::new(member.family().clone(), mu_x, sigma_x)?;
        return psi_tile_of_density(&shifted, psi);
    }
    if !(sigma_x > 0.0) {
        return Err(Error::InvalidParameter(format!("scale must be positive, got {sigma_x}")));
    }
    Ok(mu_x + sigma_x * psi_tile_of_density(&standard, psi)?)
}

/// Empirical `G(z)` over a sample, summed rather than averaged.
pub fn empirical_g(samples: &[f64], psi: &PsiSpec, z: f64) -> f64 {
    let phi = psi.level;
    let g = psi.generator;
    let (mut left, mut right) = (0.0, 0.0);
    for &y in samples {
        if y <= z {
            left += g.psi(z - y);
        } else {
            right += g.psi(y - z);
        }
    }
    (1.0 - phi) * left - phi * right
}

/// The ψ-tile of the empirical distribution of `samples`.
pub fn empirical_psi_tile(samples: &[f64], psi: &PsiSpec) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InvalidInput("empirical ψ-tile of an empty sample".into()));
    }
    if samples.iter().any(|y| !y.is_finite()) {
        return Err(Error::InvalidInput("sample contains non-finite values".into()));
    }
    if samples.len() == 1 {
        return Ok(samples[0]);
    }
    if psi.generator == Generator::Constant {
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let k = ((n as f64) * psi.level).ceil().clamp(1.0, n as f64) as usize;
        return Ok(sorted[k - 1]);
    }
    let (min, max) = samples.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &y| (a.min(y), b.max(y)));
    let (lo, hi) = (min - 1.0, max + 1.0);
    let tol = 4.0 * f64::EPSILON * lo.abs().max(hi.abs());
    infimal_root(|z| empirical_g(samples, psi, z), lo, hi, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::ErrorFamily;

    #[test]
    fn loss_values() {
        assert_eq!(PsiSpec::quantile(0.5).unwrap().loss().eval(1.0), 0.5);
        assert_eq!(PsiSpec::quantile(0.25).unwrap().loss().eval(-2.0), 1.5);
        assert_eq!(PsiSpec::huber(0.5).unwrap().loss().eval(2.0), 1.5);
        assert_eq!(check_loss(0.25, -2.0), 1.5);
    }

    #[test]
    fn constant_and_linear_losses_match_named_losses() {
        for &z in &[-2.5, -0.3, 0.0, 0.7, 3.0] {
            let q = PsiSpec::quantile(0.3).unwrap().loss();
            assert!((q.eval(z) - check_loss(0.3, z)).abs() < 1e-15);
            let e = PsiSpec::expectile(0.3).unwrap().loss();
            assert!((e.eval(z) - 0.5 * asymmetric_square_loss(0.3, z)).abs() < 1e-15);
        }
    }

    #[test]
    fn empirical_examples() {
        assert_eq!(empirical_psi_tile(&[1.0, 2.0, 3.0], &PsiSpec::quantile(0.5).unwrap()).unwrap(), 2.0);
        let e = empirical_psi_tile(&[0.0, 3.0], &PsiSpec::expectile(0.5).unwrap()).unwrap();
        assert!((e - 1.5).abs() < 1e-12);
        let h = empirical_psi_tile(&[-1.0, 0.0, 1.0], &PsiSpec::huber(0.5).unwrap()).unwrap();
        assert!(h.abs() < 1e-12);
        assert!(empirical_psi_tile(&[], &PsiSpec::huber(0.5).unwrap()).is_err());
        assert_eq!(empirical_psi_tile(&[4.2], &PsiSpec::momentile(3, 0.2).unwrap()).unwrap(), 4.2);
    }

    #[test]
    fn density_examples() {
        let ald = LocScaleMember::standard(ErrorFamily::ald(0.3).unwrap());
        assert!(psi_tile_of_density(&ald, &PsiSpec::quantile(0.3).unwrap()).unwrap().abs() < 1e-12);
        let an = LocScaleMember::standard(ErrorFamily::asym_normal(0.7).unwrap());
        assert!(psi_tile_of_density(&an, &PsiSpec::expectile(0.7).unwrap()).unwrap().abs() < 1e-9);
        let c = LocScaleMember::standard(ErrorFamily::cauchy());
        assert!(psi_tile_of_density(&c, &PsiSpec::huber(0.5).unwrap()).unwrap().abs() < 1e-9);
        assert!(matches!(
            psi_tile_of_density(&c, &PsiSpec::expectile(0.5).unwrap()),
            Err(Error::MomentNonexistent { .. })
        ));
    }

    #[test]
    fn shift_examples() {
        let c = LocScaleMember::standard(ErrorFamily::cauchy());
        let v = psi_tile_shift(&c, &PsiSpec::quantile(0.75).unwrap(), 0.0, 1.0).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        let ald = LocScaleMember::standard(ErrorFamily::ald(0.3).unwrap());
        let q = -(0.5f64 / 0.7).ln() / 0.3;
        let v = psi_tile_shift(&ald, &PsiSpec::quantile(0.5).unwrap(), 1.0, 2.0).unwrap();
        assert!((v - (1.0 + 2.0 * q)).abs() < 1e-12, "{v} vs {}", 1.0 + 2.0 * q);
    }

    #[test]
    fn momentile_one_is_expectile() {
        let s = [0.3, -1.2, 4.0, 2.2, 0.0];
        let a = empirical_psi_tile(&s, &PsiSpec::momentile(1, 0.35).unwrap()).unwrap();
        let b = empirical_psi_tile(&s, &PsiSpec::expectile(0.35).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn parse_generators() {
        assert_eq!("quantile".parse::<Generator>().unwrap(), Generator::Constant);
        assert_eq!("momentile2".parse::<Generator>().unwrap(), Generator::Momentile(2));
        assert_eq!("momentile(3)".parse::<Generator>().unwrap(), Generator::Momentile(3));
        assert!("momentile0".parse::<Generator>().is_err());
        assert!("cubic".parse::<Generator>().is_err());
    }
}
