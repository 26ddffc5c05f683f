//! KL divergence and squared Hellinger distance inside a location-scale family,
//! closed-form oracles, and numerical checks of the regularity conditions.
//!
//! Every divergence is between the standard member `f_{0,1}` and `f_{η,σ}`;
//! pairs of general members reduce to that case by location-scale invariance.

use rayon::prelude::*;

use crate::distributions::{ErrorFamily, LocScaleMember};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_line, Tolerance};

const DIV_TOL: Tolerance = Tolerance { abs: 1e-13, rel: 1e-11 };

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Quadrature,
    ClosedForm,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceReport {
    pub eta: f64,
    pub sigma: f64,
    pub kl: f64,
    pub hellinger_sq: f64,
    pub method: Method,
}

fn breakpoints(family: &ErrorFamily, eta: f64, sigma: f64) -> Vec<f64> {
    let mut b: Vec<f64> = family.kinks().to_vec();
    b.extend(family.kinks().iter().map(|k| eta + sigma * k));
    b
}

/// `D(f_{0,1} || f_{η,σ})` by adaptive quadrature.
pub fn kl_quadrature(family: &ErrorFamily, eta: f64, sigma: f64) -> Result<f64> {
    kl_quadrature_tol(family, eta, sigma, DIV_TOL)
}

pub fn kl_quadrature_tol(family: &ErrorFamily, eta: f64, sigma: f64, tol: Tolerance) -> Result<f64> {
    let p = LocScaleMember::standard(family.clone());
    let q = LocScaleMember::new(family.clone(), eta, sigma)?;
    let integrand = |y: f64| {
        let lp = p.ln_pdf(y);
        let w = lp.exp();
        if w == 0.0 {
            0.0
        } else {
            w * (lp - q.ln_pdf(y))
        }
    };
    let est = integrate_line(integrand, &breakpoints(family, eta, sigma), 1.0, tol)?;
    Ok(est.value.max(0.0))
}

/// `d_H²(f_{0,1}, f_{η,σ}) = ∫ (√f_{0,1} − √f_{η,σ})²`.
pub fn hellinger_sq(family: &ErrorFamily, eta: f64, sigma: f64) -> Result<f64> {
    hellinger_sq_tol(family, eta, sigma, DIV_TOL)
}

pub fn hellinger_sq_tol(family: &ErrorFamily, eta: f64, sigma: f64, tol: Tolerance) -> Result<f64> {
    let p = LocScaleMember::standard(family.clone());
    let q = LocScaleMember::new(family.clone(), eta, sigma)?;
    let integrand = |y: f64| {
        let d = p.pdf(y).sqrt() - q.pdf(y).sqrt();
        d * d
    };
    let est = integrate_line(integrand, &breakpoints(family, eta, sigma), sigma.max(1.0), tol)?;
    Ok(est.value.clamp(0.0, 2.0))
}

/// Maps a pair of members to the `(κ, ϖ)` of the equivalent `(f_{0,1}, f_{κ,ϖ})` pair.
pub fn reduce_pair(mu1: f64, sigma1: f64, mu2: f64, sigma2: f64) -> (f64, f64) {
    ((mu2 - mu1) / sigma1, sigma2 / sigma1)
}

/// `D(f_{μ₁,σ₁} || f_{μ₂,σ₂})` through the invariance reduction.
pub fn kl_between(family: &ErrorFamily, a: (f64, f64), b: (f64, f64)) -> Result<f64> {
    let (k, w) = reduce_pair(a.0, a.1, b.0, b.1);
    kl_quadrature(family, k, w)
}

pub fn hellinger_sq_between(family: &ErrorFamily, a: (f64, f64), b: (f64, f64)) -> Result<f64> {
    let (k, w) = reduce_pair(a.0, a.1, b.0, b.1);
    hellinger_sq(family, k, w)
}

pub fn divergence_report(family: &ErrorFamily, eta: f64, sigma: f64) -> Result<DivergenceReport> {
    let (kl, method) = if family.kind() == crate::distributions::FamilyKind::Cauchy {
        (kl_closed_form_cauchy(eta, sigma)?, Method::ClosedForm)
    } else {
        (kl_quadrature(family, eta, sigma)?, Method::Quadrature)
    };
    Ok(DivergenceReport { eta, sigma, kl, hellinger_sq: hellinger_sq(family, eta, sigma)?, method })
}

/// `log[((1 + σ)² + η²) / (4σ)]`.
pub fn kl_closed_form_cauchy(eta: f64, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) || !eta.is_finite() {
        return Err(Error::InvalidParameter(format!("need σ > 0 and finite η, got ({eta}, {sigma})")));
    }
    Ok((((1.0 + sigma).powi(2) + eta * eta) / (4.0 * sigma)).ln())
}

/// `E ρ_τ(Y − η)` for `Y` standard ALD(τ).
pub fn ald_expected_check(tau: f64, eta: f64) -> f64 {
    if eta >= 0.0 {
        1.0 + (1.0 - tau) * (eta - (1.0 - (-tau * eta).exp()) / tau)
    } else {
        1.0 - tau * (1.0 - ((1.0 - tau) * eta).exp()) / (1.0 - tau) - tau * eta
    }
}

/// ALD divergence `log σ − 1 + E ρ_τ(Y − η) / σ`.
pub fn kl_closed_form_ald(tau: f64, eta: f64, sigma: f64) -> Result<f64> {
    ErrorFamily::ald(tau)?;
    if !(sigma > 0.0) {
        return Err(Error::InvalidParameter(format!("scale must be positive, got {sigma}")));
    }
    Ok(sigma.ln() - 1.0 + ald_expected_check(tau, eta) / sigma)
}

/// Reference closed-form matrix for the asymmetric-normal KL Hessian at
/// `(0, 1)`, with off-diagonal `4/√π · √(φ(1−φ)) / (√φ + √(1−φ))`.
pub fn asym_normal_hessian_reference(phi: f64) -> [[f64; 2]; 2] {
    let r = (phi * (1.0 - phi)).sqrt();
    let off = 4.0 / std::f64::consts::PI.sqrt() * r / (phi.sqrt() + (1.0 - phi).sqrt());
    [[2.0 * r, off], [off, 2.0]]
}

/// Second-order expansion of the asymmetric-normal KL at `(0, 1)`.
///
/// The diagonal agrees with the reference matrix. The mixed partial is 0:
/// `∂_η D(0, σ)` is the φ-expectile condition of the standard member and
/// vanishes for every σ.
pub fn asym_normal_hessian(phi: f64) -> [[f64; 2]; 2] {
    let r = (phi * (1.0 - phi)).sqrt();
    [[2.0 * r, 0.0], [0.0, 2.0]]
}

/// Finite-difference Hessian of `kl_quadrature` at `(0, 1)`.
///
/// The divergence is only piecewise analytic across η = 0, so the central
/// differences carry an O(h) term; two Richardson steps over `h, h/2, h/4`
/// remove both the O(h) and O(h²) terms.
pub fn kl_hessian_fd(family: &ErrorFamily, h: f64) -> Result<[[f64; 2]; 2]> {
    let tol = Tolerance::new(1e-15, 1e-13);
    let d = |e: f64, s: f64| kl_quadrature_tol(family, e, 1.0 + s, tol);
    let raw = |h: f64| -> Result<[[f64; 2]; 2]> {
        let d00 = d(0.0, 0.0)?;
        let hee = (d(h, 0.0)? - 2.0 * d00 + d(-h, 0.0)?) / (h * h);
        let hss = (d(0.0, h)? - 2.0 * d00 + d(0.0, -h)?) / (h * h);
        let hes = (d(h, h)? - d(h, -h)? - d(-h, h)? + d(-h, -h)?) / (4.0 * h * h);
        Ok([[hee, hes], [hes, hss]])
    };
    let (a0, a1, a2) = (raw(h)?, raw(h / 2.0)?, raw(h / 4.0)?);
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let r1 = 2.0 * a1[i][j] - a0[i][j];
            let r2 = 2.0 * a2[i][j] - a1[i][j];
            out[i][j] = (4.0 * r2 - r1) / 3.0;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Condition1Row {
    pub radius: f64,
    /// sup over the circle of `D / (η² + (1 − σ)²)`.
    pub sup_ratio: f64,
    /// The ratio at `(η, σ) = (r, 1)`.
    pub eta_axis_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Condition1Report {
    pub family: String,
    pub rows: Vec<Condition1Row>,
    pub passed: bool,
}

pub const CONDITION1_ANGLES: usize = 32;

fn check_decreasing(name: &str, xs: &[f64]) -> Result<()> {
    if xs.is_empty() {
        return Err(Error::InvalidInput(format!("{name} must be nonempty")));
    }
    if xs.iter().any(|&r| !(r > 0.0 && r.is_finite())) || xs.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidInput(format!("{name} must be positive and strictly decreasing")));
    }
    Ok(())
}

fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Sup-ratio table for `D(f_{0,1} || f_{η,σ}) = O(η² + (1 − σ)²)`.
///
/// PASS when the largest ratio is at most ten times the median and the
/// ratio at the smallest radius is at most twice the ratio at the largest.
pub fn check_condition1(family: &ErrorFamily, radii: &[f64]) -> Result<Condition1Report> {
    check_decreasing("radii", radii)?;
    if radii[0] >= 1.0 {
        return Err(Error::InvalidInput("radii must be below 1 so that σ stays positive".into()));
    }
    let rows = radii
        .par_iter()
        .map(|&r| -> Result<Condition1Row> {
            let mut sup: f64 = 0.0;
            for k in 0..CONDITION1_ANGLES {
                let a = 2.0 * std::f64::consts::PI * k as f64 / CONDITION1_ANGLES as f64;
                let (eta, sigma) = (r * a.cos(), 1.0 + r * a.sin());
                sup = sup.max(kl_quadrature(family, eta, sigma)? / (r * r));
            }
            Ok(Condition1Row { radius: r, sup_ratio: sup, eta_axis_ratio: kl_quadrature(family, r, 1.0)? / (r * r) })
        })
        .collect::<Result<Vec<_>>>()?;
    let ratios: Vec<f64> = rows.iter().map(|r| r.sup_ratio).collect();
    let max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let bounded = max.is_finite() && max <= 10.0 * median(&ratios);
    let trend = ratios[ratios.len() - 1] <= 2.0 * ratios[0];
    Ok(Condition1Report { family: family.label(), rows, passed: bounded && trend })
}

/// Pointwise Hellinger derivative `(ξ̇_η, ξ̇_σ)` of `√f_{η,σ}` at `(0, 1)`.
pub fn hellinger_derivative(family: &ErrorFamily, y: f64) -> (f64, f64) {
    let root = family.std_pdf(y).sqrt();
    if root == 0.0 {
        return (0.0, 0.0);
    }
    let s = family.std_score(y);
    (-0.5 * s * root, -0.5 * root * (1.0 + y * s))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualRow {
    pub step: f64,
    /// Largest `‖r_θ‖ / |θ − θ₀|` over the probe directions.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HellingerDerivativeReport {
    pub family: String,
    /// `‖ξ̇_η‖₂`.
    pub d_mu: f64,
    /// `‖ξ̇_σ‖₂`.
    pub d_sigma: f64,
    pub gram: [[f64; 2]; 2],
    pub gram_det: f64,
    pub residual_ratios: Vec<ResidualRow>,
    pub passed: bool,
}

pub const CONDITION2_DIRECTIONS: usize = 8;

/// Gram matrix `∫ ξ̇ ξ̇ᵀ` of the Hellinger derivative components.
pub fn hellinger_gram(family: &ErrorFamily) -> Result<[[f64; 2]; 2]> {
    let tol = Tolerance::new(1e-14, 1e-12);
    let kinks = family.kinks();
    let q = |f: &dyn Fn(f64) -> f64| integrate_line(f, kinks, 1.0, tol).map(|e| e.value);
    let ee = q(&|y| hellinger_derivative(family, y).0.powi(2))?;
    let ss = q(&|y| hellinger_derivative(family, y).1.powi(2))?;
    let es = q(&|y| {
        let (a, b) = hellinger_derivative(family, y);
        a * b
    })?;
    Ok([[ee, es], [es, ss]])
}

/// `‖ξ_θ − ξ_{(0,1)} − (θ − θ₀)ᵀ ξ̇‖₂` for `θ = (η, σ)`.
pub fn hellinger_residual(family: &ErrorFamily, eta: f64, sigma: f64) -> Result<f64> {
    let q = LocScaleMember::new(family.clone(), eta, sigma)?;
    let (de, ds) = (eta, sigma - 1.0);
    let integrand = |y: f64| {
        let (xe, xs) = hellinger_derivative(family, y);
        let r = q.pdf(y).sqrt() - family.std_pdf(y).sqrt() - de * xe - ds * xs;
        r * r
    };
    let est = integrate_line(integrand, &breakpoints(family, eta, sigma), sigma.max(1.0), Tolerance::new(1e-16, 1e-9))?;
    Ok(est.value.max(0.0).sqrt())
}

/// Hellinger differentiability at `(0, 1)` with nondegenerate derivative.
///
/// PASS when both component norms are positive, the Gram determinant
/// exceeds 1e−6 and the worst residual ratio at the last step is below half
/// the one at the first step.
pub fn check_condition2(family: &ErrorFamily, steps: &[f64]) -> Result<HellingerDerivativeReport> {
    check_decreasing("steps", steps)?;
    if steps[0] >= 1.0 {
        return Err(Error::InvalidInput("steps must be below 1 so that σ stays positive".into()));
    }
    let gram = hellinger_gram(family)?;
    let gram_det = gram[0][0] * gram[1][1] - gram[0][1] * gram[1][0];
    let residual_ratios = steps
        .par_iter()
        .map(|&h| -> Result<ResidualRow> {
            let mut worst: f64 = 0.0;
            for k in 0..CONDITION2_DIRECTIONS {
                let a = 2.0 * std::f64::consts::PI * k as f64 / CONDITION2_DIRECTIONS as f64;
                worst = worst.max(hellinger_residual(family, h * a.cos(), 1.0 + h * a.sin())? / h);
            }
            Ok(ResidualRow { step: h, ratio: worst })
        })
        .collect::<Result<Vec<_>>>()?;
    let (d_mu, d_sigma) = (gram[0][0].sqrt(), gram[1][1].sqrt());
    let first = residual_ratios[0].ratio;
    let last = residual_ratios[residual_ratios.len() - 1].ratio;
    let passed = d_mu > 0.0 && d_sigma > 0.0 && gram_det > 1e-6 && last < 0.5 * first;
    Ok(HellingerDerivativeReport { family: family.label(), d_mu, d_sigma, gram, gram_det, residual_ratios, passed })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lemma1Report {
    pub family: String,
    pub c_lower: f64,
    pub c_upper: f64,
    /// `(μ₁, σ₁, μ₂, σ₂)` attaining `c_lower`.
    pub argmin: [f64; 4],
    /// `(μ₁, σ₁, μ₂, σ₂)` attaining `c_upper`.
    pub argmax: [f64; 4],
    /// Distinct reduced pairs evaluated.
    pub evaluations: usize,
}

impl Lemma1Report {
    pub fn passed(&self) -> bool {
        self.c_lower > 0.0 && self.c_lower.is_finite() && self.c_upper.is_finite()
    }
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// Grid extremes of `d_H² / (μ₁ − μ₂)²` (min) and `D / [(μ₁ − μ₂)² + (σ₁ − σ₂)²]` (max)
/// over `μ ∈ [−J, J]`, `σ ∈ [1/σ̄, σ̄]` with `grid` points per axis.
///
/// Both divergences depend on `(μ₁, μ₂)` only through `μ₂ − μ₁`, which is an
/// integer multiple of the grid step, so each distinct `(Δ, σ₁, σ₂)` is
/// evaluated once.
pub fn lemma1_constants(family: &ErrorFamily, j: f64, sigma_bar: f64, grid: usize) -> Result<Lemma1Report> {
    if !(j > 0.0) || !(sigma_bar > 1.0) {
        return Err(Error::InvalidInput(format!("need J > 0 and σ̄ > 1, got J={j}, σ̄={sigma_bar}")));
    }
    if grid < 2 {
        return Err(Error::InvalidInput("grid needs at least 2 points per axis".into()));
    }
    let mus = linspace(-j, j, grid);
    let sigmas = linspace(1.0 / sigma_bar, sigma_bar, grid);
    let step = mus[1] - mus[0];
    let g = grid as i64;
    let mut combos = Vec::new();
    for d in -(g - 1)..=(g - 1) {
        for a in 0..grid {
            for b in 0..grid {
                if d != 0 || a != b {
                    combos.push((d, a, b));
                }
            }
        }
    }
    let values = combos
        .par_iter()
        .map(|&(d, a, b)| -> Result<(f64, f64)> {
            let dmu = d as f64 * step;
            let (s1, s2) = (sigmas[a], sigmas[b]);
            let (k, w) = (dmu / s1, s2 / s1);
            let kl = kl_quadrature(family, k, w)?;
            let upper = kl / (dmu * dmu + (s1 - s2).powi(2));
            let lower = if d != 0 { hellinger_sq(family, k, w)? / (dmu * dmu) } else { f64::INFINITY };
            Ok((lower, upper))
        })
        .collect::<Result<Vec<_>>>()?;
    let witness = |d: i64, a: usize, b: usize| {
        // Any (μ₁, μ₂) pair on the grid with the right offset.
        let i1 = if d >= 0 { 0 } else { (-d) as usize };
        let i2 = (i1 as i64 + d) as usize;
        [mus[i1], sigmas[a], mus[i2], sigmas[b]]
    };
    let (mut c_lower, mut c_upper) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut argmin, mut argmax) = ([f64::NAN; 4], [f64::NAN; 4]);
    for (&(d, a, b), &(lo, up)) in combos.iter().zip(&values) {
        if lo < c_lower {
            c_lower = lo;
            argmin = witness(d, a, b);
        }
        if up > c_upper {
            c_upper = up;
            argmax = witness(d, a, b);
        }
    }
    Ok(Lemma1Report { family: family.label(), c_lower, c_upper, argmin, argmax, evaluations: combos.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn families() -> Vec<ErrorFamily> {
        vec![
            ErrorFamily::ald(0.3).unwrap(),
            ErrorFamily::acdtg(0.3, 1.0).unwrap(),
            ErrorFamily::cnl(0.4).unwrap(),
            ErrorFamily::cauchy(),
            ErrorFamily::asym_normal(0.7).unwrap(),
        ]
    }

    #[test]
    fn zero_at_identity() {
        for f in families() {
            assert!(kl_quadrature(&f, 0.0, 1.0).unwrap().abs() < 1e-12);
            assert!(hellinger_sq(&f, 0.0, 1.0).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn cauchy_examples() {
        let c = ErrorFamily::cauchy();
        assert!((kl_quadrature(&c, 1.0, 1.0).unwrap() - 1.25f64.ln()).abs() < 1e-10);
        assert!((kl_quadrature(&c, 0.0, 2.0).unwrap() - (9.0f64 / 8.0).ln()).abs() < 1e-10);
        assert_eq!(kl_closed_form_cauchy(0.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn ald_closed_form_matches_quadrature() {
        for &tau in &[0.2, 0.5, 0.8] {
            let f = ErrorFamily::ald(tau).unwrap();
            for &(e, s) in &[(0.5, 1.0), (-0.7, 1.3), (1.2, 0.6), (0.0, 2.0)] {
                let q = kl_quadrature(&f, e, s).unwrap();
                let c = kl_closed_form_ald(tau, e, s).unwrap();
                assert!((q - c).abs() < 1e-9, "τ={tau} ({e},{s}): {q} vs {c}");
            }
        }
    }

    #[test]
    fn expected_check_loss_of_standard_ald_is_one() {
        for &tau in &[0.1, 0.5, 0.9] {
            assert!((ald_expected_check(tau, 0.0) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn hellinger_bounded_by_kl() {
        for f in families() {
            for &(e, s) in &[(0.3, 1.0), (-1.0, 0.7), (0.5, 1.8)] {
                let h = hellinger_sq(&f, e, s).unwrap();
                let d = kl_quadrature(&f, e, s).unwrap();
                assert!(h > 0.0 && h <= d, "{}: {h} vs {d}", f.label());
            }
        }
    }

    #[test]
    fn invariance_reduction() {
        for f in families() {
            let direct = {
                let a = LocScaleMember::new(f.clone(), 1.0, 2.0).unwrap();
                let b = LocScaleMember::new(f.clone(), 2.0, 2.0).unwrap();
                let mut bp = a.kinks();
                bp.extend(b.kinks());
                integrate_line(|y| (a.pdf(y).sqrt() - b.pdf(y).sqrt()).powi(2), &bp, 2.0, Tolerance::new(1e-14, 1e-12))
                    .unwrap()
                    .value
            };
            let reduced = hellinger_sq_between(&f, (1.0, 2.0), (2.0, 2.0)).unwrap();
            assert!((direct - reduced).abs() < 1e-9, "{}", f.label());
            assert!((reduced - hellinger_sq(&f, 0.5, 1.0).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn hellinger_derivative_norms() {
        let g = hellinger_gram(&ErrorFamily::ald(0.3).unwrap()).unwrap();
        assert!((g[0][0] - 0.3 * 0.7 / 4.0).abs() < 1e-9);
        let g = hellinger_gram(&ErrorFamily::cauchy()).unwrap();
        assert!((g[0][0] - 0.125).abs() < 1e-9);
    }

    #[test]
    fn normal_case_hessian() {
        let f = ErrorFamily::asym_normal(0.5).unwrap();
        let h = kl_hessian_fd(&f, 0.02).unwrap();
        let want = asym_normal_hessian(0.5);
        for i in 0..2 {
            for j in 0..2 {
                assert!((h[i][j] - want[i][j]).abs() < 1e-5, "{h:?}");
            }
        }
    }

    #[test]
    fn rejects_bad_radii() {
        let c = ErrorFamily::cauchy();
        assert!(check_condition1(&c, &[0.1, 0.2]).is_err());
        assert!(check_condition1(&c, &[]).is_err());
        assert!(check_condition2(&c, &[0.0]).is_err());
        assert!(lemma1_constants(&c, 1.0, 1.0, 5).is_err());
        assert!(lemma1_constants(&c, 1.0, 2.0, 1).is_err());
    }

    #[test]
    fn small_lemma1_grid() {
        let r = lemma1_constants(&ErrorFamily::cauchy(), 1.0, 2.0, 5).unwrap();
        assert!(r.passed());
        assert_eq!(r.evaluations, 9 * 25 - 5);
        assert!(r.c_upper >= 1.25f64.ln());
    }
}
