use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use psitile::distributions::{ErrorFamily, LocScaleMember};
use psitile::divergences::divergence_report;
use psitile::experiment::{run_rates, standard_families};
use psitile::function_classes::{LipschitzNet, MultiIndexNet};
use psitile::psi_tile::{psi_tile_of_density, Generator, PsiSpec};
use psitile::{Error, Result};

mod config;
mod output;
mod suites;

use config::{short_hash, RateConfig};
use suites::{NetClass, Suite, VerifyOptions};

/// Location-scale ψ-tile regression: verification suites and rate experiments.
#[derive(Parser)]
#[command(name = "psitile", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct FamilyArgs {
    /// ald | acdtg | cnl | cauchy | asym-normal
    #[arg(long)]
    family: String,
    #[arg(long)]
    tau: Option<f64>,
    /// ACDTG shape.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    phi: Option<f64>,
}

impl FamilyArgs {
    fn build(&self) -> Result<ErrorFamily> {
        suites::parse_family(&self.family, self.tau, self.alpha, self.phi)
    }

    fn key(&self) -> String {
        format!("{}:{:?}:{:?}:{:?}", self.family, self.tau, self.alpha, self.phi)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite; writes checks.csv.
    Verify {
        suite: Suite,
        /// Restrict to one family (default: all five).
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        phi: Option<f64>,
        /// Net class for the nets suite.
        #[arg(long, value_enum, default_value = "all")]
        class: NetClass,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long, default_value_t = 20240101)]
        seed: u64,
    },
    /// Monte Carlo rate experiment from a TOML config; writes rates.csv, checks.csv and plot.svg.
    Rates { config: PathBuf },
    /// KL and squared Hellinger from the standard member to (η, σ).
    Divergence {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, allow_hyphen_values = true)]
        eta: f64,
        #[arg(long)]
        sigma: f64,
    },
    /// ψ-tile of the standard member.
    Psitile {
        #[command(flatten)]
        family: FamilyArgs,
        /// quantile | expectile | momentileK | huber
        #[arg(long)]
        psi: String,
        #[arg(long)]
        level: f64,
    },
    /// Net summary: radius, log-size and covering pass rate.
    Net {
        #[command(subcommand)]
        class: NetCommand,
    },
}

#[derive(Subcommand)]
enum NetCommand {
    Lipschitz {
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long, default_value_t = 1.0)]
        bound: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 20240101)]
        seed: u64,
    },
    MultiIndex {
        #[arg(long, default_value_t = 1)]
        p: usize,
        #[arg(long, default_value_t = 0)]
        s: u32,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long, default_value_t = 1.0)]
        l: f64,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 1.0)]
        bound: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 20240101)]
        seed: u64,
    },
}

fn summarise(checks: &[suites::Check]) -> bool {
    for c in checks {
        println!(
            "{} {} {} {} value={:e} ({})",
            if c.passed { "PASS" } else { "FAIL" },
            c.suite,
            c.check,
            c.subject,
            c.value,
            c.threshold
        );
    }
    checks.iter().all(|c| c.passed)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Verify { suite, family, tau, alpha, phi, class, d, seed } => {
            let families = match &family {
                Some(kind) => vec![suites::parse_family(kind, tau, alpha, phi)?],
                None => standard_families(),
            };
            let key = format!("verify:{suite:?}:{family:?}:{tau:?}:{alpha:?}:{phi:?}:{class:?}:{d:?}:{seed}");
            let hash = short_hash(&key);
            let checks = suites::run(suite, &VerifyOptions { families, class, d, seed })?;
            let dir = output::run_dir(&hash)?;
            let path = output::write_checks(&dir, &hash, &checks)?;
            let ok = summarise(&checks);
            println!("wrote {}", path.display());
            Ok(ok)
        }
        Command::Rates { config } => {
            let text =
                fs::read_to_string(&config).map_err(|e| Error::Config(format!("reading {}: {e}", config.display())))?;
            let cfg = RateConfig::parse(&text)?;
            let hash = cfg.hash();
            let exp = cfg.experiment()?;
            let result = run_rates(&exp)?;
            let theo = result.theoretical_exponent_f64();
            let dev = (result.slope - theo).abs();
            let check = suites::Check {
                suite: "rates".into(),
                check: "slope".into(),
                subject: format!("{} {} {}", exp.family.label(), exp.psi.label(), exp.estimator.name()),
                value: result.slope,
                threshold: format!("{} ± {}", result.theoretical_exponent, cfg.slope_tolerance),
                passed: result.slope.is_finite() && dev <= cfg.slope_tolerance,
            };
            let dir = output::run_dir(&hash)?;
            output::write_rates(&dir, &hash, &result)?;
            output::write_checks(&dir, &hash, std::slice::from_ref(&check))?;
            let title = format!("{} / {} / {}", exp.family.label(), exp.psi.label(), exp.estimator.name());
            output::write_svg(&dir, &output::rate_svg(&result, &title))?;
            for r in &result.rows {
                println!("n={} bins={} mean_risk={:.6e} se={:.3e}", r.n, r.bins, r.mean_risk, r.std_err);
            }
            if result.dropped_smallest {
                println!("smallest n dropped from the fit (standard error above 25% of its mean)");
            }
            let ok = summarise(std::slice::from_ref(&check));
            println!("wrote {}", dir.display());
            Ok(ok)
        }
        Command::Divergence { family, eta, sigma } => {
            let f = family.build()?;
            let r = divergence_report(&f, eta, sigma)?;
            let hash = short_hash(&format!("divergence:{}:{eta:?}:{sigma:?}", family.key()));
            println!("config_hash,family,eta,sigma,kl,hellinger_sq,method");
            println!("{hash},{},{eta:?},{sigma:?},{:?},{:?},{:?}", f.label(), r.kl, r.hellinger_sq, r.method);
            Ok(true)
        }
        Command::Psitile { family, psi, level } => {
            let f = family.build()?;
            let g: Generator = psi.parse()?;
            let spec = PsiSpec::new(g, level)?;
            let t = psi_tile_of_density(&LocScaleMember::standard(f.clone()), &spec)?;
            let hash = short_hash(&format!("psitile:{}:{psi}:{level:?}", family.key()));
            println!("config_hash,family,psi,tile");
            println!("{hash},{},{},{t:?}", f.label(), spec.label());
            Ok(true)
        }
        Command::Net { class } => {
            let (key, radius, log_size, cov) = match class {
                NetCommand::Lipschitz { alpha, c, d, bound, eps, samples, seed } => {
                    let net = LipschitzNet::new(alpha, c, d, bound, eps)?;
                    let key = format!("net:lipschitz:{alpha:?}:{c:?}:{d}:{bound:?}:{eps:?}:{samples}:{seed}");
                    (key, net.radius(), net.log_size(), net.covering_check(samples, seed))
                }
                NetCommand::MultiIndex { p, s, gamma, l, d, bound, eps, samples, seed } => {
                    let net = MultiIndexNet::new(p, s, gamma, l, d, bound, eps)?;
                    let key = format!("net:multi-index:{p}:{s}:{gamma:?}:{l:?}:{d}:{bound:?}:{eps:?}:{samples}:{seed}");
                    (key, net.radius(), net.log_size(), net.covering_check(samples, seed))
                }
            };
            println!("config_hash,radius,log_size,covered,checked,max_distance");
            println!(
                "{},{radius:?},{log_size:?},{},{},{:?}",
                short_hash(&key),
                cov.covered,
                cov.checked,
                cov.max_distance
            );
            Ok(cov.all_covered())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
