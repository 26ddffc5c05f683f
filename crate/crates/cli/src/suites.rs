//! Verification suites. Each returns one row per check.

use num_rational::Rational64;
use psitile::distributions::{ErrorFamily, LocScaleMember};
use psitile::divergences::{
    asym_normal_hessian, asym_normal_hessian_reference, check_condition1, check_condition2, hellinger_gram,
    kl_closed_form_ald, kl_closed_form_cauchy, kl_hessian_fd, kl_quadrature, lemma1_constants, linspace,
};
use psitile::experiment::standard_families;
use psitile::function_classes::{rate_from_entropy, EntropyOrder, LipschitzNet, MultiIndexNet};
use psitile::psi_tile::{psi_tile_of_density, PsiSpec};
use psitile::{Error, Result};

pub const CONDITION1_RADII: [f64; 4] = [0.2, 0.1, 0.05, 0.025];
pub const CONDITION2_STEPS: [f64; 4] = [0.1, 0.05, 0.02, 0.01];
pub const NET_RADII: [f64; 3] = [0.2, 0.1, 0.05];
pub const LEMMA1_GRID: usize = 21;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub suite: String,
    pub check: String,
    pub subject: String,
    pub value: f64,
    pub threshold: String,
    pub passed: bool,
}

impl Check {
    fn new(
        suite: &str,
        check: impl Into<String>,
        subject: impl Into<String>,
        value: f64,
        threshold: impl Into<String>,
        passed: bool,
    ) -> Self {
        Self {
            suite: suite.into(),
            check: check.into(),
            subject: subject.into(),
            value,
            threshold: threshold.into(),
            passed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Condition1,
    Condition2,
    Lemma1,
    Nets,
    DivergenceOracles,
    Hessian,
    Psitile,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum NetClass {
    Lipschitz,
    MultiIndex,
    All,
}

pub struct VerifyOptions {
    pub families: Vec<ErrorFamily>,
    pub class: NetClass,
    pub d: Option<usize>,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { families: standard_families(), class: NetClass::All, d: None, seed: 20240101 }
    }
}

pub fn run(suite: Suite, opts: &VerifyOptions) -> Result<Vec<Check>> {
    match suite {
        Suite::Condition1 => condition1(&opts.families),
        Suite::Condition2 => condition2(&opts.families),
        Suite::Lemma1 => lemma1(&opts.families),
        Suite::Nets => nets(opts.class, opts.d, opts.seed),
        Suite::DivergenceOracles => divergence_oracles(),
        Suite::Hessian => hessian(),
        Suite::Psitile => psitile_pinning(),
    }
}

pub fn condition1(families: &[ErrorFamily]) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for f in families {
        let r = check_condition1(f, &CONDITION1_RADII)?;
        for row in &r.rows {
            out.push(Check::new(
                "condition1",
                format!("sup_ratio@r={}", row.radius),
                f.label(),
                row.sup_ratio,
                "finite",
                row.sup_ratio.is_finite(),
            ));
        }
        let last = r.rows.last().map_or(f64::NAN, |row| row.sup_ratio);
        out.push(Check::new("condition1", "bounded_ratio", f.label(), last, "bounded over radii", r.passed));
    }
    Ok(out)
}

pub fn condition2(families: &[ErrorFamily]) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for f in families {
        let r = check_condition2(f, &CONDITION2_STEPS)?;
        out.push(Check::new("condition2", "gram_det", f.label(), r.gram_det, ">1e-6", r.gram_det > 1e-6));
        for row in &r.residual_ratios {
            out.push(Check::new(
                "condition2",
                format!("residual_ratio@h={}", row.step),
                f.label(),
                row.ratio,
                "finite",
                row.ratio.is_finite(),
            ));
        }
        let first = r.residual_ratios[0].ratio;
        let last = r.residual_ratios[r.residual_ratios.len() - 1].ratio;
        out.push(Check::new("condition2", "residual_decay", f.label(), last / first, "<0.5", r.passed));
    }
    Ok(out)
}

pub fn lemma1(families: &[ErrorFamily]) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for f in families {
        let r = lemma1_constants(f, 1.0, 2.0, LEMMA1_GRID)?;
        out.push(Check::new("lemma1", "c_lower", f.label(), r.c_lower, ">0", r.c_lower > 0.0));
        out.push(Check::new("lemma1", "c_upper", f.label(), r.c_upper, "finite", r.c_upper.is_finite()));
    }
    Ok(out)
}

fn ratio_check(suite: &str, name: &str, subject: &str, sizes: &[f64], target: f64) -> Vec<Check> {
    sizes
        .windows(2)
        .map(|w| {
            let ratio = w[1] / w[0];
            let pass = ratio >= target / 2.0 && ratio <= target * 2.0;
            Check::new(suite, name, subject, ratio, format!("[{}, {}]", target / 2.0, target * 2.0), pass)
        })
        .collect()
}

pub fn nets(class: NetClass, d: Option<usize>, seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    if matches!(class, NetClass::Lipschitz | NetClass::All) {
        let dims = d.map_or(vec![1, 2], |d| vec![d]);
        for d in dims {
            let subject = format!("lipschitz(alpha=1,C=1,d={d},B=1)");
            let mut sizes = Vec::new();
            for eps in NET_RADII {
                let net = LipschitzNet::new(1.0, 1.0, d, 1.0, eps)?;
                let cov = net.covering_check(100, seed);
                sizes.push(net.log_size());
                out.push(Check::new(
                    "nets",
                    format!("covering@eps={eps}"),
                    &subject,
                    cov.covered as f64,
                    "100/100",
                    cov.all_covered(),
                ));
            }
            out.extend(ratio_check("nets", "log_size_ratio", &subject, &sizes, 2f64.powi(d as i32)));
        }
    }
    if matches!(class, NetClass::MultiIndex | NetClass::All) {
        let d = d.unwrap_or(2);
        let subject = format!("multi_index(p=1,s=0,gamma=1,L=1,d={d},B=1)");
        let mut sizes = Vec::new();
        for eps in NET_RADII {
            let net = MultiIndexNet::new(1, 0, 1.0, 1.0, d, 1.0, eps)?;
            let cov = net.covering_check(100, seed);
            sizes.push(net.log_size());
            out.push(Check::new(
                "nets",
                format!("covering@eps={eps}"),
                &subject,
                cov.covered as f64,
                "100/100",
                cov.all_covered(),
            ));
        }
        out.extend(ratio_check("nets", "log_size_ratio", &subject, &sizes, 2.0));
    }
    out.extend(exponent_checks()?);
    Ok(out)
}

pub fn exponent_checks() -> Result<Vec<Check>> {
    let r = Rational64::new;
    let cases: Vec<(String, EntropyOrder, Rational64)> = vec![
        ("lipschitz(alpha=1,d=1)".into(), EntropyOrder::lipschitz(r(1, 1), 1)?, r(-2, 3)),
        ("lipschitz(alpha=1,d=2)".into(), EntropyOrder::lipschitz(r(1, 1), 2)?, r(-1, 2)),
        ("lipschitz(alpha=1/2,d=1)".into(), EntropyOrder::lipschitz(r(1, 2), 1)?, r(-1, 2)),
        ("interaction(alpha=1,r=2)".into(), EntropyOrder::interaction(r(1, 1), 2)?, r(-1, 2)),
        ("interaction(alpha=2,r=3)".into(), EntropyOrder::interaction(r(2, 1), 3)?, r(-4, 7)),
        ("multi_index(s=0,gamma=1)".into(), EntropyOrder::multi_index(0, r(1, 1))?, r(-2, 3)),
        ("multi_index(s=1,gamma=1/2)".into(), EntropyOrder::multi_index(1, r(1, 2))?, r(-3, 4)),
    ];
    cases
        .into_iter()
        .map(|(name, order, expected)| {
            let got = rate_from_entropy(&order, 10_000)?.exponent;
            let value = *got.numer() as f64 / *got.denom() as f64;
            Ok(Check::new("nets", "rate_exponent", name, value, format!("={expected}"), got == expected))
        })
        .collect()
}

pub fn divergence_oracles() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let cauchy = ErrorFamily::cauchy();
    let mut worst: f64 = 0.0;
    for eta in linspace(-2.0, 2.0, 10) {
        for sigma in linspace(0.5, 2.0, 10) {
            worst = worst.max((kl_quadrature(&cauchy, eta, sigma)? - kl_closed_form_cauchy(eta, sigma)?).abs());
        }
    }
    out.push(Check::new("divergence-oracles", "cauchy_kl_grid_max_abs", "cauchy", worst, "<1e-8", worst < 1e-8));
    for tau in [0.2, 0.5, 0.8] {
        let ald = ErrorFamily::ald(tau)?;
        let mut worst: f64 = 0.0;
        for eta in linspace(-2.0, 2.0, 5) {
            for sigma in linspace(0.5, 2.0, 5) {
                worst = worst.max((kl_quadrature(&ald, eta, sigma)? - kl_closed_form_ald(tau, eta, sigma)?).abs());
            }
        }
        out.push(Check::new("divergence-oracles", "ald_kl_grid_max_abs", ald.label(), worst, "<1e-8", worst < 1e-8));
    }
    out.extend(hellinger_norms()?);
    Ok(out)
}

/// `∫ ξ̇_η²` against its closed form for ALD, Cauchy and CNL.
pub fn hellinger_norms() -> Result<Vec<Check>> {
    let mut cases: Vec<(ErrorFamily, f64)> = Vec::new();
    for tau in [0.2, 0.5, 0.8] {
        cases.push((ErrorFamily::ald(tau)?, tau * (1.0 - tau) / 4.0));
        let cnl = ErrorFamily::cnl(tau)?;
        let beta = cnl.beta().expect("cnl has beta");
        cases.push((cnl, (1.0 - tau) / (4.0 * beta * beta) + tau / 4.0));
    }
    cases.push((ErrorFamily::cauchy(), 0.125));
    cases
        .into_iter()
        .map(|(f, expected)| {
            let got = hellinger_gram(&f)?[0][0];
            let err = (got - expected).abs();
            Ok(Check::new("divergence-oracles", "hellinger_eta_norm_abs_err", f.label(), err, "<1e-6", err < 1e-6))
        })
        .collect()
}

pub fn hessian() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for phi in [0.3, 0.5, 0.7] {
        let fam = ErrorFamily::asym_normal(phi)?;
        let fd = kl_hessian_fd(&fam, 0.02)?;
        let reference = asym_normal_hessian_reference(phi);
        let exact = asym_normal_hessian(phi);
        let label = fam.label();
        for (i, j, name) in [(0, 0, "eta_eta"), (0, 1, "eta_sigma"), (1, 1, "sigma_sigma")] {
            let e = (fd[i][j] - reference[i][j]).abs();
            out.push(Check::new("hessian", format!("reference_{name}"), &label, e, "<1e-4", e < 1e-4));
            let e = (fd[i][j] - exact[i][j]).abs();
            out.push(Check::new("hessian", format!("derived_{name}"), &label, e, "<1e-4", e < 1e-4));
        }
    }
    Ok(out)
}

pub fn psitile_pinning() -> Result<Vec<Check>> {
    let mut cases: Vec<(ErrorFamily, PsiSpec)> = Vec::new();
    for tau in [0.2, 0.5, 0.8] {
        cases.push((ErrorFamily::ald(tau)?, PsiSpec::quantile(tau)?));
        cases.push((ErrorFamily::acdtg(tau, 1.5)?, PsiSpec::quantile(tau)?));
        cases.push((ErrorFamily::cnl(tau)?, PsiSpec::quantile(tau)?));
        cases.push((ErrorFamily::asym_normal(tau)?, PsiSpec::expectile(tau)?));
    }
    cases
        .into_iter()
        .map(|(f, psi)| {
            let t = psi_tile_of_density(&LocScaleMember::standard(f.clone()), &psi)?;
            Ok(Check::new("psitile", format!("pinned_{}", psi.label()), f.label(), t.abs(), "<1e-8", t.abs() < 1e-8))
        })
        .collect()
}

pub fn parse_family(kind: &str, tau: Option<f64>, alpha: Option<f64>, phi: Option<f64>) -> Result<ErrorFamily> {
    ErrorFamily::from_parts(kind.parse()?, tau, alpha, phi).map_err(|e| Error::Config(format!("family '{kind}': {e}")))
}
