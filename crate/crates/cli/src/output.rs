//! CSV tables and the log-log SVG plot.
//!
//! `checks.csv`: `config_hash,suite,check,subject,value,threshold,status`
//!
//! `rates.csv`: `config_hash,n,bins,replications,mean_risk,std_err`

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use psitile::experiment::RateResult;
use psitile::{Error, Result};

use crate::suites::Check;

pub const RESULTS_ENV: &str = "PSITILE_RESULTS";

pub fn results_root() -> PathBuf {
    std::env::var_os(RESULTS_ENV).map_or_else(|| PathBuf::from("results"), PathBuf::from)
}

pub fn run_dir(run_id: &str) -> Result<PathBuf> {
    let dir = results_root().join(run_id);
    fs::create_dir_all(&dir).map_err(|e| Error::Config(format!("cannot create {}: {e}", dir.display())))?;
    Ok(dir)
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Config(format!("writing {}: {e}", path.display()))
}

/// Shortest round-trip formatting keeps the files byte-stable.
fn num(v: f64) -> String {
    format!("{v:?}")
}

pub fn write_checks(dir: &Path, hash: &str, checks: &[Check]) -> Result<PathBuf> {
    let path = dir.join("checks.csv");
    let mut w = csv::Writer::from_path(&path).map_err(|e| io_err(&path, e))?;
    w.write_record(["config_hash", "suite", "check", "subject", "value", "threshold", "status"])
        .map_err(|e| io_err(&path, e))?;
    for c in checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        w.write_record([hash, &c.suite, &c.check, &c.subject, &num(c.value), &c.threshold, status])
            .map_err(|e| io_err(&path, e))?;
    }
    w.flush().map_err(|e| io_err(&path, e))?;
    Ok(path)
}

pub fn write_rates(dir: &Path, hash: &str, result: &RateResult) -> Result<PathBuf> {
    let path = dir.join("rates.csv");
    let mut w = csv::Writer::from_path(&path).map_err(|e| io_err(&path, e))?;
    w.write_record(["config_hash", "n", "bins", "replications", "mean_risk", "std_err"])
        .map_err(|e| io_err(&path, e))?;
    for r in &result.rows {
        w.write_record([
            hash,
            &r.n.to_string(),
            &r.bins.to_string(),
            &r.risks.len().to_string(),
            &num(r.mean_risk),
            &num(r.std_err),
        ])
        .map_err(|e| io_err(&path, e))?;
    }
    w.flush().map_err(|e| io_err(&path, e))?;
    Ok(path)
}

/// Log-log risk curve with ±2 SE bars, the fitted line and the theoretical slope through the fit's centre.
pub fn rate_svg(result: &RateResult, title: &str) -> String {
    let (w, h, m) = (640.0, 440.0, 60.0);
    let pts: Vec<(f64, f64, f64, f64)> = result
        .rows
        .iter()
        .map(|r| {
            let lo = (r.mean_risk - 2.0 * r.std_err).max(r.mean_risk * 1e-3);
            ((r.n as f64).log10(), r.mean_risk.log10(), lo.log10(), (r.mean_risk + 2.0 * r.std_err).log10())
        })
        .collect();
    let x0 = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min) - 0.1;
    let x1 = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max) + 0.1;
    let y0 = pts.iter().map(|p| p.2).fold(f64::INFINITY, f64::min) - 0.1;
    let y1 = pts.iter().map(|p| p.3).fold(f64::NEG_INFINITY, f64::max) + 0.1;
    let sx = |x: f64| m + (x - x0) / (x1 - x0) * (w - 2.0 * m);
    let sy = |y: f64| h - m - (y - y0) / (y1 - y0) * (h - 2.0 * m);
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
    let theo = result.theoretical_exponent_f64();
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, w / 2.0, escape(title));
    let _ = writeln!(s, r#"<path d="M{m} {m} V{b} H{r}" fill="none" stroke="black"/>"#, b = h - m, r = w - m);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">log10 n</text>"#, w / 2.0, h - 20.0);
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" transform="rotate(-90 16 {})" text-anchor="middle">log10 risk</text>"#,
        h / 2.0,
        h / 2.0
    );
    for p in &pts {
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{a:.2}" x2="{x:.2}" y2="{b:.2}" stroke="grey"/>"#,
            x = sx(p.0),
            a = sy(p.2),
            b = sy(p.3)
        );
        let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3.5" fill="black"/>"#, sx(p.0), sy(p.1));
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{}" text-anchor="middle" font-size="10">{:.2}</text>"#,
            sx(p.0),
            h - m + 14.0,
            p.0
        );
    }
    for (slope, colour, label) in [(result.slope, "steelblue", "fit"), (theo, "firebrick", "theory")] {
        let (a, b) = (x0 + 0.05, x1 - 0.05);
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{colour}" stroke-dasharray="{}"/>"#,
            sx(a),
            sy(my + slope * (a - mx)),
            sx(b),
            sy(my + slope * (b - mx)),
            if label == "fit" { "none" } else { "6 4" }
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" fill="steelblue">fit slope {:.3} ± {:.3}</text>"#,
        w - m - 170.0,
        m + 10.0,
        result.slope,
        result.slope_se
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" fill="firebrick">theory {}</text>"#,
        w - m - 170.0,
        m + 26.0,
        result.theoretical_exponent
    );
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn write_svg(dir: &Path, svg: &str) -> Result<PathBuf> {
    let path = dir.join("plot.svg");
    fs::write(&path, svg).map_err(|e| io_err(&path, e))?;
    Ok(path)
}
