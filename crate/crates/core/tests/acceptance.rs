//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line.
//!
//! Run with `cargo test -p psitile --test acceptance -- --nocapture` to see them.

use std::time::Instant;

use num_rational::Rational64;
use psitile::distributions::{ErrorFamily, LocScaleMember};
use psitile::divergences::{
    asym_normal_hessian_reference, check_condition1, check_condition2, hellinger_gram, kl_closed_form_cauchy,
    kl_hessian_fd, kl_quadrature, lemma1_constants, linspace,
};
use psitile::experiment::{
    failure_contrast, mixture_check, run_rates, shift_identity_check, standard_families, RateExperiment, ScaleId,
};
use psitile::function_classes::{rate_from_entropy, EntropyOrder, LipschitzNet, MultiIndexNet};
use psitile::psi_tile::{empirical_psi_tile, psi_tile_of_density, PsiSpec};
use psitile::seeding::{derive_seed, rng_from_seed};
use rand::Rng;

const SEED: u64 = 20240101;

fn report(id: u32, name: &str, pass: bool, detail: &str) {
    println!("criterion {id:>2} {name}: {} ({detail})", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {id} {name} failed: {detail}");
}

#[test]
fn c01_cauchy_kl_oracle() {
    let start = Instant::now();
    let fam = ErrorFamily::cauchy();
    let mut worst: f64 = 0.0;
    for eta in linspace(-2.0, 2.0, 10) {
        for sigma in linspace(0.5, 2.0, 10) {
            let q = kl_quadrature(&fam, eta, sigma).unwrap();
            let closed = (((1.0 + sigma).powi(2) + eta * eta) / (4.0 * sigma)).ln();
            assert!((closed - kl_closed_form_cauchy(eta, sigma).unwrap()).abs() < 1e-15);
            worst = worst.max((q - closed).abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    report(1, "cauchy-kl-oracle", worst < 1e-8 && secs < 10.0, &format!("max abs error {worst:.2e}, {secs:.2}s"));
}

#[test]
fn c02_hellinger_derivative_norms() {
    let mut worst: f64 = 0.0;
    let mut cases = Vec::new();
    for tau in [0.2, 0.5, 0.8] {
        cases.push((ErrorFamily::ald(tau).unwrap(), tau * (1.0 - tau) / 4.0));
        let cnl = ErrorFamily::cnl(tau).unwrap();
        let beta = cnl.beta().unwrap();
        cases.push((cnl, (1.0 - tau) / (4.0 * beta * beta) + tau / 4.0));
    }
    cases.push((ErrorFamily::cauchy(), 0.125));
    for (fam, expected) in &cases {
        worst = worst.max((hellinger_gram(fam).unwrap()[0][0] - expected).abs());
    }
    report(2, "hellinger-derivative-norms", worst < 1e-6, &format!("{} cases, max abs error {worst:.2e}", cases.len()));
}

#[test]
fn c03_asym_normal_kl_hessian() {
    let mut worst = [[0.0f64; 2]; 2];
    for phi in [0.3, 0.5, 0.7] {
        let fd = kl_hessian_fd(&ErrorFamily::asym_normal(phi).unwrap(), 0.02).unwrap();
        let reference = asym_normal_hessian_reference(phi);
        for i in 0..2 {
            for j in 0..2 {
                worst[i][j] = worst[i][j].max((fd[i][j] - reference[i][j]).abs());
            }
        }
    }
    let pass = worst.iter().flatten().all(|e| *e < 1e-4);
    report(
        3,
        "asym-normal-kl-hessian",
        pass,
        &format!(
            "max abs error vs reference matrix: eta-eta {:.1e}, eta-sigma {:.1e}, sigma-sigma {:.1e}",
            worst[0][0], worst[0][1], worst[1][1]
        ),
    );
}

#[test]
fn c04_conditions_one_and_two() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for fam in standard_families() {
        let c1 = check_condition1(&fam, &[0.2, 0.1, 0.05, 0.025]).unwrap();
        let c2 = check_condition2(&fam, &[0.1, 0.05, 0.02, 0.01]).unwrap();
        if !c1.passed {
            failures.push(format!("condition 1 {}", fam.label()));
        }
        if !(c2.passed && c2.gram_det > 1e-6) {
            failures.push(format!("condition 2 {}", fam.label()));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    report(4, "conditions-1-2", failures.is_empty() && secs < 120.0, &format!("failures {failures:?}, {secs:.1}s"));
}

#[test]
fn c05_lemma1_constants() {
    let mut detail = Vec::new();
    let mut pass = true;
    for fam in standard_families() {
        let r = lemma1_constants(&fam, 1.0, 2.0, 21).unwrap();
        pass &= r.passed();
        detail.push(format!("{} [{:.3}, {:.3}]", fam.label(), r.c_lower, r.c_upper));
    }
    report(5, "lemma1-constants", pass, &detail.join("; "));
}

#[test]
fn c06_psi_tile_pinning() {
    let mut worst: f64 = 0.0;
    for tau in [0.1, 0.3, 0.5, 0.7, 0.9] {
        for (fam, psi) in [
            (ErrorFamily::ald(tau).unwrap(), PsiSpec::quantile(tau).unwrap()),
            (ErrorFamily::acdtg(tau, 1.5).unwrap(), PsiSpec::quantile(tau).unwrap()),
            (ErrorFamily::cnl(tau).unwrap(), PsiSpec::quantile(tau).unwrap()),
            (ErrorFamily::asym_normal(tau).unwrap(), PsiSpec::expectile(tau).unwrap()),
        ] {
            worst = worst.max(psi_tile_of_density(&LocScaleMember::standard(fam), &psi).unwrap().abs());
        }
    }
    let mut rng = rng_from_seed(SEED);
    let families = standard_families();
    let mut diff: f64 = 0.0;
    for k in 0..100u64 {
        let fam = families[(k % 5) as usize].clone();
        let n = rng.random_range(1..200);
        let level = rng.random_range(0.05..0.95);
        let xs = LocScaleMember::new(fam, rng.random_range(-1.0..1.0), rng.random_range(0.5..2.0))
            .unwrap()
            .sample(derive_seed(SEED, k), n)
            .unwrap();
        let a = empirical_psi_tile(&xs, &PsiSpec::momentile(1, level).unwrap()).unwrap();
        let b = empirical_psi_tile(&xs, &PsiSpec::expectile(level).unwrap()).unwrap();
        diff = diff.max((a - b).abs());
    }
    report(
        6,
        "psi-tile-pinning",
        worst < 1e-8 && diff < 1e-10,
        &format!("max |pinned tile| {worst:.1e}, max |momentile(1) - linear| {diff:.1e}"),
    );
}

#[test]
fn c07_shift_identity() {
    let pairs = [
        (ErrorFamily::ald(0.5).unwrap(), PsiSpec::quantile(0.3).unwrap(), ScaleId::Exp),
        (ErrorFamily::cnl(0.4).unwrap(), PsiSpec::quantile(0.7).unwrap(), ScaleId::Exp),
        (ErrorFamily::asym_normal(0.7).unwrap(), PsiSpec::expectile(0.5).unwrap(), ScaleId::Exp),
        (ErrorFamily::cauchy(), PsiSpec::huber(0.6).unwrap(), ScaleId::Unit),
        (ErrorFamily::acdtg(0.3, 1.0).unwrap(), PsiSpec::momentile(2, 0.4).unwrap(), ScaleId::Exp),
    ];
    let mut pass = true;
    let mut detail = Vec::new();
    for (fam, psi, scale) in pairs {
        let r = shift_identity_check(&fam, &psi, scale, 200_000, 20, 0.0025, 200, SEED).unwrap();
        pass &= r.passed(3.0);
        detail.push(format!("{} {} max|z| {:.2}", r.family, r.psi, r.max_abs_z()));
    }
    report(7, "shift-identity", pass, &detail.join("; "));
}

#[test]
fn c08_rate_reproduction() {
    let start = Instant::now();
    let mut pass = true;
    let mut detail = Vec::new();
    for (fam, psi) in [
        (ErrorFamily::ald(0.5).unwrap(), PsiSpec::quantile(0.5).unwrap()),
        (ErrorFamily::cauchy(), PsiSpec::quantile(0.5).unwrap()),
        (ErrorFamily::asym_normal(0.7).unwrap(), PsiSpec::expectile(0.7).unwrap()),
    ] {
        let exp = RateExperiment::standard(fam.clone(), psi, SEED);
        let r = run_rates(&exp).unwrap();
        assert_eq!(r.theoretical_exponent, Rational64::new(-2, 3));
        pass &= (r.slope + 2.0 / 3.0).abs() <= 0.15;
        detail.push(format!("{} slope {:.3} ± {:.3}", fam.label(), r.slope, r.slope_se));
    }
    let secs = start.elapsed().as_secs_f64();
    pass &= secs < 600.0;
    report(8, "rate-reproduction", pass, &format!("{}; {secs:.1}s", detail.join("; ")));
}

#[test]
fn c09_failure_contrast() {
    let fc = failure_contrast(&[512, 1024, 2048, 4096, 8192, 16384], 50, SEED).unwrap();
    let pass = fc.mean_not_improved >= 0.4 && fc.median_monotone();
    let median: Vec<String> = fc.median_estimator.iter().map(|r| format!("{r:.4}")).collect();
    report(
        9,
        "failure-contrast",
        pass,
        &format!(
            "binned mean not improved in {:.0}% of replications; binned median risks [{}]",
            100.0 * fc.mean_not_improved,
            median.join(", ")
        ),
    );
}

#[test]
fn c10_net_machinery() {
    let radii = [0.2, 0.1, 0.05];
    let mut pass = true;
    let mut detail = Vec::new();
    let band =
        |sizes: &[f64], target: f64| sizes.windows(2).all(|w| (target / 2.0..=target * 2.0).contains(&(w[1] / w[0])));
    for d in [1usize, 2] {
        let mut sizes = Vec::new();
        for eps in radii {
            let net = LipschitzNet::new(1.0, 1.0, d, 1.0, eps).unwrap();
            let cov = net.covering_check(100, SEED);
            pass &= cov.covered == 100 && cov.checked == 100;
            sizes.push(net.log_size());
        }
        pass &= band(&sizes, 2f64.powi(d as i32));
        detail.push(format!("lipschitz d={d} log-sizes {sizes:.1?}"));
    }
    let mut sizes = Vec::new();
    for eps in radii {
        let net = MultiIndexNet::new(1, 0, 1.0, 1.0, 2, 1.0, eps).unwrap();
        let cov = net.covering_check(100, SEED);
        pass &= cov.covered == 100 && cov.checked == 100;
        sizes.push(net.log_size());
    }
    pass &= band(&sizes, 2.0);
    detail.push(format!("multi-index d=2 log-sizes {sizes:.1?}"));
    let r = Rational64::new;
    for (order, expected) in [
        (EntropyOrder::lipschitz(r(1, 1), 1).unwrap(), r(-2, 3)),
        (EntropyOrder::lipschitz(r(3, 2), 2).unwrap(), r(-3, 5)),
        (EntropyOrder::interaction(r(2, 1), 3).unwrap(), r(-4, 7)),
        (EntropyOrder::multi_index(0, r(1, 1)).unwrap(), r(-2, 3)),
        (EntropyOrder::multi_index(1, r(1, 2)).unwrap(), r(-3, 4)),
    ] {
        pass &= rate_from_entropy(&order, 100_000).unwrap().exponent == expected;
    }
    report(10, "net-machinery", pass, &detail.join("; "));
}

#[test]
fn c11_mixture_net() {
    let fam = ErrorFamily::asym_normal(0.7).unwrap();
    let seeds: Vec<u64> = (0..100).map(|i| derive_seed(SEED, i)).collect();
    let m200 = mixture_check(&fam, 200, 4, &seeds, 100).unwrap();
    let m400 = mixture_check(&fam, 400, 4, &seeds, 0).unwrap();
    let (kl, se) = (m200.mean_predictive_kl(), m200.predictive_kl_se());
    let kl_ok = kl <= m200.bound() + 3.0 * se && (kl - m200.mean_regret() / 200.0).abs() <= 3.0 * se;
    let regret_ok = m200.max_regret() <= (m200.net_size as f64).ln() + 1e-9 && m400.max_regret() <= (10f64).ln() + 1e-9;
    let recovery_ok = m200.recovery_rate() >= 0.95 && m400.recovery_rate() >= 0.95;
    report(
        11,
        "mixture-net",
        kl_ok && regret_ok && recovery_ok,
        &format!(
            "n=200 mean predictive KL {kl:.5} ± {se:.5} vs bound {:.5} and mean regret/n {:.5}; max regret {:.3} vs ln10; recovery {:.0}% (n=200), {:.0}% (n=400)",
            m200.bound(),
            m200.mean_regret() / 200.0,
            m200.max_regret(),
            100.0 * m200.recovery_rate(),
            100.0 * m400.recovery_rate()
        ),
    );
}
