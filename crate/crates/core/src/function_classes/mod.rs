//! Metric entropy: entropy orders, the rate equation `M(ε) = nε²`, explicit
//! ε-nets for Hölder and multi-index classes, and greedy packing counts.

mod lipschitz;
mod multi_index;
mod packing;
mod scale;

pub use lipschitz::{random_holder_function, HolderFn, LipschitzNet};
pub use multi_index::{MultiIndexMember, MultiIndexNet, SingleIndexFn};
pub use packing::packing_entropy_bruteforce;
pub use scale::{density_ratio_sup, ScaleNet};

use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::roots::{expand_bracket, infimal_root};

/// Guard on `log |net|` (nats).
pub const MAX_LOG_NET_SIZE: f64 = (1u64 << 20) as f64;
/// Guard on explicitly enumerated nets.
pub const MAX_ENUMERATED: usize = 10_000;

/// `M(ε) ≍ (1/ε)^{c1} (log 1/ε)^{c2}`; `c1` is kept exact so the rate
/// exponent is exact too.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyOrder {
    c1: Rational64,
    c2: f64,
}

impl EntropyOrder {
    pub fn new(c1: Rational64, c2: f64) -> Result<Self> {
        if c1 <= Rational64::from_integer(0) {
            return Err(Error::InvalidParameter(format!("entropy power c1 must be positive, got {c1}")));
        }
        if !c2.is_finite() {
            return Err(Error::InvalidParameter("entropy log power c2 must be finite".into()));
        }
        Ok(Self { c1, c2 })
    }

    /// Hölder-α ball on `[0,1]^d`: `c1 = d/α`.
    pub fn lipschitz(alpha: Rational64, d: u32) -> Result<Self> {
        positive("alpha", alpha)?;
        Self::new(Rational64::from_integer(d as i64) / alpha, 0.0)
    }

    /// Order-`r` interaction class with smoothness α: `c1 = r/α`.
    pub fn interaction(alpha: Rational64, r: u32) -> Result<Self> {
        positive("alpha", alpha)?;
        Self::new(Rational64::from_integer(r as i64) / alpha, 0.0)
    }

    /// Multi-index class with link smoothness `s + γ`: `c1 = 1/(s+γ)`.
    pub fn multi_index(s: u32, gamma: Rational64) -> Result<Self> {
        positive("gamma", gamma)?;
        Self::new(Rational64::from_integer(1) / (Rational64::from_integer(s as i64) + gamma), 0.0)
    }

    pub fn c1(&self) -> Rational64 {
        self.c1
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }

    fn c1_f64(&self) -> f64 {
        *self.c1.numer() as f64 / *self.c1.denom() as f64
    }

    /// `log M(ε)` without constants.
    pub fn log_entropy(&self, epsilon: f64) -> f64 {
        let l = (1.0 / epsilon).ln();
        self.c1_f64() * l + self.c2 * l.ln()
    }

    /// `M(a ε) / M(ε)`; above 1 for `a < 1` and small ε (richness).
    pub fn richness_ratio(&self, a: f64, epsilon: f64) -> f64 {
        (self.log_entropy(a * epsilon) - self.log_entropy(epsilon)).exp()
    }

    /// The order is unchanged by rescaling ε by a constant.
    pub fn rescaled(&self, _c: f64) -> Self {
        *self
    }

    /// Exponent `e` in `ε_n² ≍ n^e` (log factors dropped): `−2/(2 + c1)`.
    pub fn rate_exponent(&self) -> Rational64 {
        Rational64::from_integer(-2) / (Rational64::from_integer(2) + self.c1)
    }
}

fn positive(name: &str, v: Rational64) -> Result<()> {
    if v > Rational64::from_integer(0) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateSolution {
    pub epsilon_n: f64,
    /// `ε_n²`.
    pub risk: f64,
    pub exponent: Rational64,
}

/// Solves `(1/ε)^{c1} (log 1/ε)^{c2} = n ε²` for ε by bisection on `t = ln ε`.
pub fn rate_from_entropy(order: &EntropyOrder, n: u64) -> Result<RateSolution> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("sample size must be at least 2, got {n}")));
    }
    let (c1, c2, ln_n) = (order.c1_f64(), order.c2, (n as f64).ln());
    // h is decreasing in t; bisect on −h, which is nondecreasing.
    let neg_h = |t: f64| -(c1 * (-t) + c2 * (-t).ln() - ln_n - 2.0 * t);
    // With c2 < 0 the log factor is only meaningful for ε < 1/e.
    let hi = if c2 < 0.0 { -1.0 } else { -f64::MIN_POSITIVE.sqrt() };
    if neg_h(hi) < 0.0 {
        return Err(Error::InvalidInput(format!("no solution of the rate equation below ε = {}", hi.exp())));
    }
    let (lo, hi) = expand_bracket(neg_h, hi - 1.0, hi)?;
    let t = infimal_root(neg_h, lo, hi, 1e-13)?;
    let eps = t.exp();
    Ok(RateSolution { epsilon_n: eps, risk: eps * eps, exponent: order.rate_exponent() })
}

/// Uniform midpoint grid on `[0,1]^d` with `k` points per axis, row-major.
pub fn midpoint_grid(d: usize, k: usize) -> Vec<Vec<f64>> {
    let axis: Vec<f64> = (0..k).map(|i| (i as f64 + 0.5) / k as f64).collect();
    let mut out = vec![Vec::with_capacity(d)];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|p| {
                axis.iter().map(move |&a| {
                    let mut q = p.clone();
                    q.push(a);
                    q
                })
            })
            .collect();
    }
    out
}

/// Midpoint-rule `L₂(uniform)` distance between two functions on `[0,1]^d`.
pub fn l2_distance_on_grid(f: impl Fn(&[f64]) -> f64, g: impl Fn(&[f64]) -> f64, grid: &[Vec<f64>]) -> f64 {
    let s: f64 = grid.iter().map(|x| (f(x) - g(x)).powi(2)).sum();
    (s / grid.len() as f64).sqrt()
}

/// Result of projecting sampled class members onto a net.
#[derive(Debug, Clone, PartialEq)]
pub struct CoveringReport {
    pub checked: usize,
    pub covered: usize,
    pub max_distance: f64,
    pub radius: f64,
}

impl CoveringReport {
    pub fn all_covered(&self) -> bool {
        self.covered == self.checked
    }
}
