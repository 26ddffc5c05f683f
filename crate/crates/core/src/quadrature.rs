//! Adaptive Gauss–Kronrod (10/21) integration over finite, half-infinite and
//! doubly infinite intervals.
//!
//! Infinite pieces are mapped onto bounded ones with `y = c ± s·tan(u)`, which
//! keeps algebraic (Cauchy-type) tails bounded in `u`. Interior breakpoints let
//! callers split at density kinks so each piece has a smooth integrand.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

/// Absolute / relative stopping tolerance; the target is `max(abs, rel·|I|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Self { abs, rel }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { abs: 1e-12, rel: 1e-10 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

const MAX_SUBINTERVALS: usize = 4000;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// One 21-point Kronrod panel with the QUADPACK error heuristic.
fn gauss_kronrod_21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut resabs = fc.abs() * WGK[10];
    let mut gauss = 0.0;
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut resasc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let result = kronrod * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut err = ((kronrod - gauss) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    (result, err)
}

/// How a piece of the real line is parameterised on a bounded `u` interval.
#[derive(Debug, Clone, Copy)]
enum Map {
    Identity,
    /// y = origin + scale·tan(u), u ∈ [0, π/2)
    Right {
        origin: f64,
        scale: f64,
    },
    /// y = origin − scale·tan(u), u ∈ [0, π/2)
    Left {
        origin: f64,
        scale: f64,
    },
    /// y = origin + scale·tan(u), u ∈ (−π/2, π/2)
    Full {
        origin: f64,
        scale: f64,
    },
}

impl Map {
    #[inline]
    fn eval<F: Fn(f64) -> f64>(&self, f: &F, u: f64) -> f64 {
        let (y, jac) = match *self {
            Map::Identity => return f(u),
            Map::Right { origin, scale } | Map::Full { origin, scale } => {
                let c = u.cos();
                (origin + scale * u.tan(), scale / (c * c))
            }
            Map::Left { origin, scale } => {
                let c = u.cos();
                (origin - scale * u.tan(), scale / (c * c))
            }
        };
        if !y.is_finite() || !jac.is_finite() {
            return 0.0;
        }
        let v = f(y);
        if v == 0.0 {
            0.0
        } else {
            v * jac
        }
    }
}

struct Panel {
    piece: usize,
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn adaptive<F: Fn(f64) -> f64>(f: &F, pieces: &[(Map, f64, f64)], tol: Tolerance) -> Result<Estimate> {
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    let mut total = 0.0;
    let mut total_err = 0.0;
    for (i, &(map, lo, hi)) in pieces.iter().enumerate() {
        if lo == hi {
            continue;
        }
        let g = |u: f64| map.eval(f, u);
        let (value, error) = gauss_kronrod_21(&g, lo, hi);
        evaluations += 21;
        total += value;
        total_err += error;
        heap.push(Panel { piece: i, lo, hi, value, error });
    }
    while !(total_err <= tol.target(total)) {
        if heap.len() >= MAX_SUBINTERVALS || !total.is_finite() {
            return Err(Error::QuadratureNotConverged {
                estimate: total,
                error_bound: total_err,
                target: tol.target(total),
            });
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            // Interval cannot be split further in floating point.
            return Err(Error::QuadratureNotConverged {
                estimate: total,
                error_bound: total_err,
                target: tol.target(total),
            });
        }
        let map = pieces[worst.piece].0;
        let g = |u: f64| map.eval(f, u);
        let (v1, e1) = gauss_kronrod_21(&g, worst.lo, mid);
        let (v2, e2) = gauss_kronrod_21(&g, mid, worst.hi);
        evaluations += 42;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Panel { piece: worst.piece, lo: worst.lo, hi: mid, value: v1, error: e1 });
        heap.push(Panel { piece: worst.piece, lo: mid, hi: worst.hi, value: v2, error: e2 });
    }
    // Re-sum to shed the drift of the running updates.
    let (value, error) = heap.iter().fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
    if !value.is_finite() || !error.is_finite() {
        return Err(Error::QuadratureNotConverged { estimate: value, error_bound: error, target: tol.target(value) });
    }
    Ok(Estimate { value, error, evaluations })
}

/// Integrates `f` over `[a, b]`; either end may be infinite.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Estimate> {
    if a.is_nan() || b.is_nan() {
        return Err(Error::InvalidInput("NaN integration limit".into()));
    }
    if a > b {
        let est = integrate(f, b, a, tol)?;
        return Ok(Estimate { value: -est.value, ..est });
    }
    let pieces = match (a.is_finite(), b.is_finite()) {
        (true, true) => vec![(Map::Identity, a, b)],
        (true, false) => vec![(Map::Right { origin: a, scale: 1.0 }, 0.0, FRAC_PI_2)],
        (false, true) => vec![(Map::Left { origin: b, scale: 1.0 }, 0.0, FRAC_PI_2)],
        (false, false) => vec![(Map::Full { origin: 0.0, scale: 1.0 }, -FRAC_PI_2, FRAC_PI_2)],
    };
    adaptive(&f, &pieces, tol)
}

/// Integrates `f` over the whole real line, splitting at `breakpoints`.
///
/// The two unbounded tails use the tangent map with the given `scale`, so
/// passing the scale of the density being integrated keeps the mapped
/// integrand well conditioned.
pub fn integrate_line<F: Fn(f64) -> f64>(f: F, breakpoints: &[f64], scale: f64, tol: Tolerance) -> Result<Estimate> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::InvalidInput(format!("tail scale must be positive, got {scale}")));
    }
    let mut pts: Vec<f64> = breakpoints.iter().copied().filter(|p| p.is_finite()).collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let pieces = if pts.is_empty() {
        vec![(Map::Full { origin: 0.0, scale }, -FRAC_PI_2, FRAC_PI_2)]
    } else {
        let mut pieces = Vec::with_capacity(pts.len() + 1);
        pieces.push((Map::Left { origin: pts[0], scale }, 0.0, FRAC_PI_2));
        for w in pts.windows(2) {
            pieces.push((Map::Identity, w[0], w[1]));
        }
        pieces.push((Map::Right { origin: pts[pts.len() - 1], scale }, 0.0, FRAC_PI_2));
        pieces
    };
    adaptive(&f, &pieces, tol)
}

/// Integrates over `[a, ∞)` with a scaled tangent map.
pub fn integrate_upper<F: Fn(f64) -> f64>(f: F, a: f64, scale: f64, tol: Tolerance) -> Result<Estimate> {
    adaptive(&f, &[(Map::Right { origin: a, scale }, 0.0, FRAC_PI_2)], tol)
}
