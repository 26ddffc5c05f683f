//! The five error laws and their location-scale families.
//!
//! Every family is stored by its standard member (`η = 0`, `σ = 1`);
//! [`LocScaleMember`] applies `(1/σ) f((y − η)/σ)`. ALD, ACDTG and CNL have
//! τ-quantile 0; the asymmetric normal has φ-expectile 0.

use std::f64::consts::{PI, SQRT_2};

use rand::Rng as _;
use rand_distr::{Distribution, Gamma, StandardNormal};
use statrs::function::erf::{erf, erfc, erfc_inv};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_line, integrate_upper, Tolerance};
use crate::roots::{expand_bracket, infimal_root};
use crate::seeding::{rng_from_seed, Rng};

const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    /// Asymmetric Laplace.
    Ald,
    /// Asymmetric connected double truncated gamma.
    Acdtg,
    /// Connected normal-Laplace.
    Cnl,
    Cauchy,
    AsymNormal,
}

impl FamilyKind {
    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Ald => "ald",
            FamilyKind::Acdtg => "acdtg",
            FamilyKind::Cnl => "cnl",
            FamilyKind::Cauchy => "cauchy",
            FamilyKind::AsymNormal => "asym-normal",
        }
    }
}

impl std::str::FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ald" => Ok(FamilyKind::Ald),
            "acdtg" => Ok(FamilyKind::Acdtg),
            "cnl" => Ok(FamilyKind::Cnl),
            "cauchy" => Ok(FamilyKind::Cauchy),
            "asym-normal" | "asymnormal" | "asym_normal" => Ok(FamilyKind::AsymNormal),
            other => Err(Error::InvalidParameter(format!("unknown error family '{other}'"))),
        }
    }
}

/// One of the five error laws with validated shape parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorFamily {
    kind: FamilyKind,
    tau: f64,
    alpha: f64,
    phi: f64,
    beta: f64,
    /// Γ(α+1, α) for ACDTG, 1 otherwise.
    gamma_norm: f64,
}

fn check_unit_open(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must lie in (0, 1), got {v}")))
    }
}

/// Upper incomplete gamma `Γ(s, x) = ∫_x^∞ t^{s−1} e^{−t} dt` by adaptive quadrature.
pub fn upper_incomplete_gamma(s: f64, x: f64) -> Result<f64> {
    if !(s > 0.0) || !(x >= 0.0) {
        return Err(Error::InvalidParameter(format!("Γ(s, x) needs s > 0, x ≥ 0; got s={s}, x={x}")));
    }
    let integrand = |t: f64| {
        if t <= 0.0 {
            return if s == 1.0 { 1.0 } else { 0.0 };
        }
        ((s - 1.0) * t.ln() - t).exp()
    };
    let est = integrate_upper(integrand, x, s.max(1.0), Tolerance::new(0.0, 1e-12))?;
    Ok(est.value)
}

impl ErrorFamily {
    pub fn ald(tau: f64) -> Result<Self> {
        check_unit_open("tau", tau)?;
        Ok(Self { kind: FamilyKind::Ald, tau, alpha: 0.0, phi: 0.0, beta: 0.0, gamma_norm: 1.0 })
    }

    /// ACDTG with shape `alpha ≥ 0`; `alpha = 0` is exactly the ALD.
    pub fn acdtg(tau: f64, alpha: f64) -> Result<Self> {
        check_unit_open("tau", tau)?;
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!("ACDTG shape must be ≥ 0, got {alpha}")));
        }
        if alpha == 0.0 {
            return Self::ald(tau);
        }
        let gamma_norm = upper_incomplete_gamma(alpha + 1.0, alpha)?;
        Ok(Self { kind: FamilyKind::Acdtg, tau, alpha, phi: 0.0, beta: 0.0, gamma_norm })
    }

    /// CNL; the right-side scale is tied to τ so the density is continuous at 0.
    pub fn cnl(tau: f64) -> Result<Self> {
        check_unit_open("tau", tau)?;
        let beta = (1.0 - tau) * SQRT_2PI / (2.0 * tau);
        Ok(Self { kind: FamilyKind::Cnl, tau, alpha: 0.0, phi: 0.0, beta, gamma_norm: 1.0 })
    }

    pub fn cauchy() -> Self {
        Self { kind: FamilyKind::Cauchy, tau: 0.0, alpha: 0.0, phi: 0.0, beta: 0.0, gamma_norm: 1.0 }
    }

    pub fn asym_normal(phi: f64) -> Result<Self> {
        check_unit_open("phi", phi)?;
        Ok(Self { kind: FamilyKind::AsymNormal, tau: 0.0, alpha: 0.0, phi, beta: 0.0, gamma_norm: 1.0 })
    }

    /// Builds a family from its kind and the parameters it uses; unused ones are ignored.
    pub fn from_parts(kind: FamilyKind, tau: Option<f64>, alpha: Option<f64>, phi: Option<f64>) -> Result<Self> {
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| Error::InvalidParameter(format!("{} requires {name}", kind.name())))
        };
        match kind {
            FamilyKind::Ald => Self::ald(need(tau, "tau")?),
            FamilyKind::Acdtg => Self::acdtg(need(tau, "tau")?, need(alpha, "alpha")?),
            FamilyKind::Cnl => Self::cnl(need(tau, "tau")?),
            FamilyKind::Cauchy => Ok(Self::cauchy()),
            FamilyKind::AsymNormal => Self::asym_normal(need(phi, "phi")?),
        }
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn tau(&self) -> Option<f64> {
        matches!(self.kind, FamilyKind::Ald | FamilyKind::Acdtg | FamilyKind::Cnl).then_some(self.tau)
    }

    pub fn alpha_shape(&self) -> Option<f64> {
        (self.kind == FamilyKind::Acdtg).then_some(self.alpha)
    }

    pub fn phi(&self) -> Option<f64> {
        (self.kind == FamilyKind::AsymNormal).then_some(self.phi)
    }

    pub fn beta(&self) -> Option<f64> {
        (self.kind == FamilyKind::Cnl).then_some(self.beta)
    }

    /// Γ(α+1, α) for ACDTG.
    pub fn gamma_normaliser(&self) -> Option<f64> {
        (self.kind == FamilyKind::Acdtg).then_some(self.gamma_norm)
    }

    /// Short label including parameters, e.g. `ald(tau=0.3)`.
    pub fn label(&self) -> String {
        match self.kind {
            FamilyKind::Ald | FamilyKind::Cnl => format!("{}(tau={})", self.kind.name(), self.tau),
            FamilyKind::Acdtg => format!("acdtg(tau={},alpha={})", self.tau, self.alpha),
            FamilyKind::Cauchy => "cauchy".to_string(),
            FamilyKind::AsymNormal => format!("asym-normal(phi={})", self.phi),
        }
    }

    /// Whether `E|ε|^order` is finite.
    pub fn has_absolute_moment(&self, order: u32) -> bool {
        order == 0 || self.kind != FamilyKind::Cauchy
    }

    /// Points where the standard density is not smooth.
    pub fn kinks(&self) -> &'static [f64] {
        match self.kind {
            FamilyKind::Cauchy => &[],
            _ => &[0.0],
        }
    }

    fn asym_normal_left_weight(&self) -> f64 {
        let (a, b) = (self.phi.sqrt(), (1.0 - self.phi).sqrt());
        a / (a + b)
    }

    fn asym_normal_const(&self) -> f64 {
        let (a, b) = (self.phi.sqrt(), (1.0 - self.phi).sqrt());
        2.0 / PI.sqrt() * (a * b) / (a + b)
    }

    #[inline]
    fn check(&self, z: f64) -> f64 {
        if z >= 0.0 {
            self.tau * z
        } else {
            (self.tau - 1.0) * z
        }
    }

    /// Log-density of the standard member. Kinks take the right-hand branch.
    pub fn std_ln_pdf(&self, z: f64) -> f64 {
        match self.kind {
            FamilyKind::Ald => (self.tau * (1.0 - self.tau)).ln() - self.check(z),
            FamilyKind::Acdtg => {
                let u = self.alpha + self.check(z);
                (self.tau * (1.0 - self.tau) / self.gamma_norm).ln() + self.alpha * u.ln() - u
            }
            FamilyKind::Cnl => {
                if z >= 0.0 {
                    ((1.0 - self.tau) / self.beta).ln() - z / self.beta
                } else {
                    (2.0 * self.tau / SQRT_2PI).ln() - 0.5 * z * z
                }
            }
            FamilyKind::Cauchy => -(PI * (1.0 + z * z)).ln(),
            FamilyKind::AsymNormal => {
                let k = if z >= 0.0 { self.phi } else { 1.0 - self.phi };
                self.asym_normal_const().ln() - k * z * z
            }
        }
    }

    pub fn std_pdf(&self, z: f64) -> f64 {
        match self.kind {
            FamilyKind::Cauchy => 1.0 / (PI * (1.0 + z * z)),
            _ => self.std_ln_pdf(z).exp(),
        }
    }

    /// `d/dz log f(z)` of the standard member (right derivative at a kink).
    pub fn std_score(&self, z: f64) -> f64 {
        match self.kind {
            FamilyKind::Ald => {
                if z >= 0.0 {
                    -self.tau
                } else {
                    1.0 - self.tau
                }
            }
            FamilyKind::Acdtg => {
                let u = self.alpha + self.check(z);
                let dcheck = if z >= 0.0 { self.tau } else { self.tau - 1.0 };
                (self.alpha / u - 1.0) * dcheck
            }
            FamilyKind::Cnl => {
                if z >= 0.0 {
                    -1.0 / self.beta
                } else {
                    -z
                }
            }
            FamilyKind::Cauchy => -2.0 * z / (1.0 + z * z),
            FamilyKind::AsymNormal => {
                let k = if z >= 0.0 { self.phi } else { 1.0 - self.phi };
                -2.0 * k * z
            }
        }
    }

    pub fn std_cdf(&self, z: f64) -> Result<f64> {
        if z.is_nan() {
            return Err(Error::InvalidInput("cdf at NaN".into()));
        }
        if z == f64::INFINITY {
            return Ok(1.0);
        }
        if z == f64::NEG_INFINITY {
            return Ok(0.0);
        }
        let t = self.tau;
        let p = match self.kind {
            FamilyKind::Ald => {
                if z < 0.0 {
                    t * ((1.0 - t) * z).exp()
                } else {
                    1.0 - (1.0 - t) * (-t * z).exp()
                }
            }
            FamilyKind::Acdtg => {
                let s = self.alpha + 1.0;
                if z < 0.0 {
                    t * upper_incomplete_gamma(s, self.alpha - (1.0 - t) * z)? / self.gamma_norm
                } else {
                    1.0 - (1.0 - t) * upper_incomplete_gamma(s, self.alpha + t * z)? / self.gamma_norm
                }
            }
            FamilyKind::Cnl => {
                if z <= 0.0 {
                    t * erfc(-z / SQRT_2)
                } else {
                    1.0 - (1.0 - t) * (-z / self.beta).exp()
                }
            }
            FamilyKind::Cauchy => 0.5 + z.atan() / PI,
            FamilyKind::AsymNormal => {
                let wl = self.asym_normal_left_weight();
                if z < 0.0 {
                    wl * erfc(-z * (1.0 - self.phi).sqrt())
                } else {
                    wl + (1.0 - wl) * erf(z * self.phi.sqrt())
                }
            }
        };
        Ok(p.clamp(0.0, 1.0))
    }

    /// Quantile function `inf { z : F(z) ≥ p }` of the standard member.
    pub fn std_quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidInput(format!("probability must lie in [0, 1], got {p}")));
        }
        if p == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        if p == 1.0 {
            return Ok(f64::INFINITY);
        }
        let t = self.tau;
        let q = match self.kind {
            FamilyKind::Ald => {
                if p < t {
                    (p / t).ln() / (1.0 - t)
                } else {
                    -((1.0 - p) / (1.0 - t)).ln() / t
                }
            }
            FamilyKind::Cnl => {
                if p <= t {
                    std_normal_quantile(p / (2.0 * t))
                } else {
                    -self.beta * ((1.0 - p) / (1.0 - t)).ln()
                }
            }
            FamilyKind::Cauchy => (PI * (p - 0.5)).tan(),
            FamilyKind::AsymNormal => {
                let wl = self.asym_normal_left_weight();
                if p <= wl {
                    std_normal_quantile(p / (2.0 * wl)) / (2.0 * (1.0 - self.phi)).sqrt()
                } else {
                    std_normal_quantile(0.5 + (p - wl) / (2.0 * (1.0 - wl))) / (2.0 * self.phi).sqrt()
                }
            }
            FamilyKind::Acdtg => {
                if p == t {
                    return Ok(0.0);
                }
                let g = |z: f64| self.std_cdf(z).map(|c| c - p).unwrap_or(f64::NAN);
                let (lo, hi) = expand_bracket(g, -1.0, 1.0)?;
                infimal_root(g, lo, hi, 1e-12)?
            }
        };
        Ok(q)
    }

    /// One draw from the standard member.
    pub fn sample_std(&self, rng: &mut Rng) -> f64 {
        match self.kind {
            FamilyKind::Ald => {
                let u: f64 = rng.random();
                // Quantile at an open-interval uniform.
                let u = u.max(f64::MIN_POSITIVE);
                self.std_quantile(u).unwrap_or(0.0)
            }
            FamilyKind::Cauchy => {
                let u: f64 = rng.random();
                (PI * (u - 0.5)).tan()
            }
            FamilyKind::Cnl => {
                let left = rng.random::<f64>() < self.tau;
                if left {
                    let n: f64 = StandardNormal.sample(rng);
                    -n.abs()
                } else {
                    let u: f64 = rng.random();
                    -self.beta * (1.0 - u).ln()
                }
            }
            FamilyKind::AsymNormal => {
                let left = rng.random::<f64>() < self.asym_normal_left_weight();
                let n: f64 = StandardNormal.sample(rng);
                if left {
                    -n.abs() / (2.0 * (1.0 - self.phi)).sqrt()
                } else {
                    n.abs() / (2.0 * self.phi).sqrt()
                }
            }
            FamilyKind::Acdtg => {
                // u = α + ρ_τ(z) is Gamma(α+1) truncated to [α, ∞) on each side.
                let left = rng.random::<f64>() < self.tau;
                let gamma = Gamma::new(self.alpha + 1.0, 1.0).expect("valid gamma shape");
                let u = loop {
                    let g: f64 = gamma.sample(rng);
                    if g >= self.alpha {
                        break g;
                    }
                };
                if left {
                    -(u - self.alpha) / (1.0 - self.tau)
                } else {
                    (u - self.alpha) / self.tau
                }
            }
        }
    }

    /// `E|ε|^order` by quadrature; fails for Cauchy with `order ≥ 1`.
    pub fn absolute_moment(&self, order: u32) -> Result<f64> {
        if !self.has_absolute_moment(order) {
            return Err(Error::MomentNonexistent { family: self.label(), generator: "moment".into(), order });
        }
        let k = order as i32;
        let est = integrate_line(|z| z.abs().powi(k) * self.std_pdf(z), &[0.0], 1.0, Tolerance::default())?;
        Ok(est.value)
    }

    /// Mean of the standard member, when it exists.
    pub fn mean(&self) -> Option<f64> {
        if !self.has_absolute_moment(1) {
            return None;
        }
        integrate_line(|z| z * self.std_pdf(z), &[0.0], 1.0, Tolerance::default()).ok().map(|e| e.value)
    }
}

fn std_normal_quantile(p: f64) -> f64 {
    -SQRT_2 * erfc_inv(2.0 * p)
}

/// A member `(1/σ) f((y − η)/σ)` of a family's location-scale family.
#[derive(Debug, Clone, PartialEq)]
pub struct LocScaleMember {
    family: ErrorFamily,
    eta: f64,
    sigma: f64,
}

impl LocScaleMember {
    pub fn new(family: ErrorFamily, eta: f64, sigma: f64) -> Result<Self> {
        if !eta.is_finite() {
            return Err(Error::InvalidParameter(format!("location must be finite, got {eta}")));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("scale must be positive, got {sigma}")));
        }
        Ok(Self { family, eta, sigma })
    }

    pub fn standard(family: ErrorFamily) -> Self {
        Self { family, eta: 0.0, sigma: 1.0 }
    }

    pub fn family(&self) -> &ErrorFamily {
        &self.family
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    #[inline]
    fn standardise(&self, y: f64) -> f64 {
        (y - self.eta) / self.sigma
    }

    pub fn pdf(&self, y: f64) -> f64 {
        self.family.std_pdf(self.standardise(y)) / self.sigma
    }

    pub fn ln_pdf(&self, y: f64) -> f64 {
        self.family.std_ln_pdf(self.standardise(y)) - self.sigma.ln()
    }

    pub fn cdf(&self, y: f64) -> Result<f64> {
        self.family.std_cdf(self.standardise(y))
    }

    pub fn quantile(&self, p: f64) -> Result<f64> {
        Ok(self.eta + self.sigma * self.family.std_quantile(p)?)
    }

    /// Kink locations of this member.
    pub fn kinks(&self) -> Vec<f64> {
        self.family.kinks().iter().map(|k| self.eta + self.sigma * k).collect()
    }

    /// `n` i.i.d. draws, deterministic in `seed`.
    pub fn sample(&self, seed: u64, n: usize) -> Result<Vec<f64>> {
        if n == 0 {
            return Err(Error::InvalidInput("sample size must be at least 1".into()));
        }
        let mut rng = rng_from_seed(seed);
        Ok(self.sample_with(&mut rng, n))
    }

    pub fn sample_with(&self, rng: &mut Rng, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.draw(rng)).collect()
    }

    #[inline]
    pub fn draw(&self, rng: &mut Rng) -> f64 {
        self.eta + self.sigma * self.family.sample_std(rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn families() -> Vec<ErrorFamily> {
        vec![
            ErrorFamily::ald(0.3).unwrap(),
            ErrorFamily::acdtg(0.3, 1.0).unwrap(),
            ErrorFamily::acdtg(0.6, 2.5).unwrap(),
            ErrorFamily::cnl(0.4).unwrap(),
            ErrorFamily::cauchy(),
            ErrorFamily::asym_normal(0.7).unwrap(),
        ]
    }

    #[test]
    fn point_values() {
        let c = LocScaleMember::standard(ErrorFamily::cauchy());
        assert!((c.pdf(0.0) - 1.0 / PI).abs() < 1e-15);
        let a = LocScaleMember::standard(ErrorFamily::ald(0.5).unwrap());
        assert!((a.pdf(0.0) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn acdtg_density_matches_direct_formula() {
        // Oracle: the displayed formula with Γ(α+1, α) from statrs' regularised
        // upper incomplete gamma, an independent route from our quadrature.
        let (tau, alpha) = (0.3, 1.0);
        let m = LocScaleMember::standard(ErrorFamily::acdtg(tau, alpha).unwrap());
        let big_gamma =
            statrs::function::gamma::gamma_ur(alpha + 1.0, alpha) * statrs::function::gamma::gamma(alpha + 1.0);
        for &y in &[-3.0, -0.7, 0.0, 0.4, 2.0, 6.0] {
            let rho = if y >= 0.0 { tau * y } else { (tau - 1.0) * y };
            let u: f64 = alpha + rho;
            let want = tau * (1.0 - tau) / big_gamma * u.powf(alpha) * (-u).exp();
            assert!((m.pdf(y) - want).abs() < 1e-12 * want.max(1e-300), "y={y}");
        }
    }

    #[test]
    fn cdf_anchor_values() {
        let ald = LocScaleMember::standard(ErrorFamily::ald(0.3).unwrap());
        assert!((ald.cdf(0.0).unwrap() - 0.3).abs() < 1e-15);
        let c = LocScaleMember::standard(ErrorFamily::cauchy());
        assert!((c.cdf(0.0).unwrap() - 0.5).abs() < 1e-15);
        let cnl = LocScaleMember::standard(ErrorFamily::cnl(0.4).unwrap());
        assert!((cnl.cdf(0.0).unwrap() - 0.4).abs() < 1e-15);
    }

    #[test]
    fn cnl_beta_constraint_is_exact() {
        let f = ErrorFamily::cnl(0.4).unwrap();
        let beta = f.beta().unwrap();
        assert!(((1.0 - 0.4) / beta - 2.0 * 0.4 / SQRT_2PI).abs() < 1e-15);
        // continuity at the junction
        assert!((f.std_pdf(0.0) - f.std_pdf(-1e-12)).abs() < 1e-12);
    }

    #[test]
    fn densities_normalise() {
        for f in families() {
            let m = LocScaleMember::new(f.clone(), 0.4, 1.7).unwrap();
            let est = integrate_line(|y| m.pdf(y), &m.kinks(), m.sigma(), Tolerance::new(1e-14, 1e-12)).unwrap();
            assert!((est.value - 1.0).abs() < 1e-8, "{}: {}", f.label(), est.value);
        }
    }

    #[test]
    fn cdf_agrees_with_integrated_density() {
        for f in families() {
            let m = LocScaleMember::new(f.clone(), -0.3, 0.8).unwrap();
            for &y in &[-2.0, -0.3, 0.1, 1.5] {
                let mut bps = m.kinks();
                bps.retain(|&k| k < y);
                let est = integrate_line(
                    |t| if t <= y { m.pdf(t) } else { 0.0 },
                    &[bps, vec![y]].concat(),
                    m.sigma(),
                    Tolerance::new(1e-14, 1e-12),
                )
                .unwrap();
                assert!((m.cdf(y).unwrap() - est.value).abs() < 1e-9, "{} at {y}", f.label());
            }
        }
    }

    #[test]
    fn quantile_inverts_cdf() {
        for f in families() {
            for &p in &[0.01, 0.2, 0.5, 0.77, 0.99] {
                let q = f.std_quantile(p).unwrap();
                assert!((f.std_cdf(q).unwrap() - p).abs() < 1e-10, "{} p={p}", f.label());
            }
        }
    }

    #[test]
    fn quantile_pinning_at_tau() {
        for f in [ErrorFamily::ald(0.3).unwrap(), ErrorFamily::acdtg(0.3, 1.0).unwrap(), ErrorFamily::cnl(0.4).unwrap()]
        {
            let tau = f.tau().unwrap();
            assert!((f.std_cdf(0.0).unwrap() - tau).abs() < 1e-8, "{}", f.label());
        }
    }

    #[test]
    fn score_matches_finite_difference() {
        for f in families() {
            for &z in &[-1.3, -0.2, 0.3, 2.1] {
                let h = 1e-6;
                let fd = (f.std_ln_pdf(z + h) - f.std_ln_pdf(z - h)) / (2.0 * h);
                assert!((fd - f.std_score(z)).abs() < 1e-6, "{} z={z}", f.label());
            }
        }
    }

    #[test]
    fn acdtg_alpha_zero_is_ald() {
        let a = ErrorFamily::acdtg(0.35, 0.0).unwrap();
        assert_eq!(a, ErrorFamily::ald(0.35).unwrap());
    }

    #[test]
    fn parameter_domain_errors() {
        assert!(ErrorFamily::ald(0.0).is_err());
        assert!(ErrorFamily::ald(1.0).is_err());
        assert!(ErrorFamily::acdtg(0.5, -1.0).is_err());
        assert!(ErrorFamily::asym_normal(1.2).is_err());
        assert!(LocScaleMember::new(ErrorFamily::cauchy(), 0.0, 0.0).is_err());
        assert!(LocScaleMember::new(ErrorFamily::cauchy(), f64::NAN, 1.0).is_err());
    }

    #[test]
    fn sampling_is_deterministic() {
        let m = LocScaleMember::standard(ErrorFamily::acdtg(0.3, 1.0).unwrap());
        assert_eq!(m.sample(11, 50).unwrap(), m.sample(11, 50).unwrap());
        assert_ne!(m.sample(11, 50).unwrap(), m.sample(12, 50).unwrap());
        assert!(m.sample(1, 0).is_err());
    }

    #[test]
    fn moments() {
        assert!(ErrorFamily::cauchy().mean().is_none());
        assert!(matches!(ErrorFamily::cauchy().absolute_moment(1), Err(Error::MomentNonexistent { .. })));
        let ald = ErrorFamily::ald(0.3).unwrap();
        // right mass (1−τ) with mean 1/τ, left mass τ with mean −1/(1−τ)
        let want = 0.7 / 0.3 - 0.3 / 0.7;
        assert!((ald.mean().unwrap() - want).abs() < 1e-9);
    }
}
