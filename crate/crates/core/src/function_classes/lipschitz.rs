use rand::Rng as _;

use super::{l2_distance_on_grid, midpoint_grid, CoveringReport, MAX_ENUMERATED, MAX_LOG_NET_SIZE};
use crate::error::{Error, Result};
use crate::seeding::rng_from_seed;

/// ε-net of the Hölder ball `{f : |f| ≤ B, |f(x) − f(y)| ≤ C‖x − y‖^α}` on `[0,1]^d`.
///
/// Members are piecewise constant on `m^d` equal cells, with cell values on
/// the lattice `εℤ ∩ [−B − ε/2, B + ε/2]`. Consecutive cells along a
/// boustrophedon path differ by at most `K` lattice steps, which keeps the
/// net at size `exp(O(ε^{−d/α}))` while every ball member stays within ε in
/// sup norm of its projection.
#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzNet {
    alpha: f64,
    c: f64,
    d: usize,
    bound: f64,
    epsilon: f64,
    cells_per_axis: usize,
    half_levels: i32,
    max_jump: i32,
    path: Vec<usize>,
    log_size: f64,
}

fn log_sum_exp(xs: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = xs.collect();
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

impl LipschitzNet {
    pub fn new(alpha: f64, c: f64, d: usize, bound: f64, epsilon: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidParameter(format!("Hölder exponent must lie in (0, 1], got {alpha}")));
        }
        if !(c > 0.0) || !(bound > 0.0) || !(epsilon > 0.0) {
            return Err(Error::InvalidParameter("C, B and ε must be positive".into()));
        }
        if !(1..=2).contains(&d) {
            return Err(Error::InvalidParameter(format!("explicit nets support d ∈ {{1, 2}}, got {d}")));
        }
        let width = (2.0 / (d as f64).sqrt()) * (epsilon / (2.0 * c)).powf(1.0 / alpha);
        let m = (1.0 / width).ceil().max(1.0);
        if m.powi(d as i32) > (1u64 << 22) as f64 {
            return Err(Error::Capacity {
                what: "net cells".into(),
                requested: m.powi(d as i32),
                limit: (1u64 << 22) as f64,
            });
        }
        let m = m as usize;
        let half_levels = (bound / epsilon - 0.5).ceil().max(0.0) as i32;
        let max_jump = (c * (1.0 / m as f64).powf(alpha) / epsilon).floor() as i32 + 1;
        let path = snake(m, d);
        let mut net =
            Self { alpha, c, d, bound, epsilon, cells_per_axis: m, half_levels, max_jump, path, log_size: 0.0 };
        net.log_size = net.count_log();
        if net.log_size > MAX_LOG_NET_SIZE {
            return Err(Error::Capacity {
                what: "log net size".into(),
                requested: net.log_size,
                limit: MAX_LOG_NET_SIZE,
            });
        }
        Ok(net)
    }

    fn count_log(&self) -> f64 {
        let levels = (2 * self.half_levels + 1) as usize;
        let k = self.max_jump as usize;
        let mut dp = vec![0.0; levels];
        for _ in 1..self.path.len() {
            dp = (0..levels)
                .map(|j| log_sum_exp((j.saturating_sub(k)..=(j + k).min(levels - 1)).map(|i| dp[i])))
                .collect();
        }
        log_sum_exp(dp.into_iter())
    }

    pub fn radius(&self) -> f64 {
        self.epsilon
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn lipschitz_constant(&self) -> f64 {
        self.c
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn cells_per_axis(&self) -> usize {
        self.cells_per_axis
    }

    pub fn cells(&self) -> usize {
        self.path.len()
    }

    pub fn max_jump(&self) -> i32 {
        self.max_jump
    }

    pub fn levels(&self) -> usize {
        (2 * self.half_levels + 1) as usize
    }

    /// `log |net|` (nats).
    pub fn log_size(&self) -> f64 {
        self.log_size
    }

    fn cell_of(&self, x: &[f64]) -> usize {
        let m = self.cells_per_axis;
        x.iter().take(self.d).fold(0, |acc, &xi| {
            let i = ((xi * m as f64).floor().max(0.0) as usize).min(m - 1);
            acc * m + i
        })
    }

    fn cell_center(&self, idx: usize) -> Vec<f64> {
        let m = self.cells_per_axis;
        let mut out = vec![0.0; self.d];
        let mut r = idx;
        for k in (0..self.d).rev() {
            out[k] = ((r % m) as f64 + 0.5) / m as f64;
            r /= m;
        }
        out
    }

    /// Value of a member (lattice indices in row-major cell order) at `x`.
    pub fn eval(&self, member: &[i32], x: &[f64]) -> f64 {
        member[self.cell_of(x)] as f64 * self.epsilon
    }

    /// Member values per cell, row-major.
    pub fn cell_values(&self, member: &[i32]) -> Vec<f64> {
        member.iter().map(|&k| k as f64 * self.epsilon).collect()
    }

    pub fn contains(&self, member: &[i32]) -> bool {
        member.len() == self.path.len()
            && member.iter().all(|k| k.abs() <= self.half_levels)
            && self.path.windows(2).all(|w| (member[w[0]] - member[w[1]]).abs() <= self.max_jump)
    }

    /// Quantises `f` at the cell centres onto the value lattice.
    pub fn project(&self, f: impl Fn(&[f64]) -> f64) -> Vec<i32> {
        (0..self.path.len())
            .map(|i| {
                let v = f(&self.cell_center(i));
                ((v / self.epsilon).round() as i32).clamp(-self.half_levels, self.half_levels)
            })
            .collect()
    }

    /// All members in lexicographic path order; fails beyond `limit`.
    pub fn enumerate(&self, limit: usize) -> Result<Vec<Vec<i32>>> {
        let limit = limit.min(MAX_ENUMERATED);
        if self.log_size > (limit as f64).ln() + 1e-9 {
            return Err(Error::Capacity {
                what: "enumerated net".into(),
                requested: self.log_size.exp(),
                limit: limit as f64,
            });
        }
        let mut out = Vec::new();
        let mut seq = vec![0i32; self.path.len()];
        self.dfs(0, &mut seq, &mut out);
        Ok(out)
    }

    fn dfs(&self, pos: usize, seq: &mut Vec<i32>, out: &mut Vec<Vec<i32>>) {
        if pos == self.path.len() {
            let mut member = vec![0; seq.len()];
            for (p, &cell) in self.path.iter().enumerate() {
                member[cell] = seq[p];
            }
            out.push(member);
            return;
        }
        let (lo, hi) = if pos == 0 {
            (-self.half_levels, self.half_levels)
        } else {
            let prev = seq[pos - 1];
            ((prev - self.max_jump).max(-self.half_levels), (prev + self.max_jump).min(self.half_levels))
        };
        for v in lo..=hi {
            seq[pos] = v;
            self.dfs(pos + 1, seq, out);
        }
    }

    /// Projects `count` random ball members and measures their `L₂` distance on a fine grid.
    pub fn covering_check(&self, count: usize, seed: u64) -> CoveringReport {
        let grid = midpoint_grid(self.d, if self.d == 1 { 4096 } else { 128 });
        let mut covered = 0;
        let mut max_distance: f64 = 0.0;
        for i in 0..count {
            let f = random_holder_function(
                self.alpha,
                self.c,
                self.d,
                self.bound,
                crate::seeding::derive_seed(seed, i as u64),
            );
            let member = self.project(|x| f.eval(x));
            let dist = l2_distance_on_grid(|x| f.eval(x), |x| self.eval(&member, x), &grid);
            max_distance = max_distance.max(dist);
            if self.contains(&member) && dist <= self.epsilon {
                covered += 1;
            }
        }
        CoveringReport { checked: count, covered, max_distance, radius: self.epsilon }
    }
}

fn snake(m: usize, d: usize) -> Vec<usize> {
    match d {
        1 => (0..m).collect(),
        _ => (0..m)
            .flat_map(|r| {
                let row: Vec<usize> = if r % 2 == 0 { (0..m).collect() } else { (0..m).rev().collect() };
                row.into_iter().map(move |c| r * m + c)
            })
            .collect(),
    }
}

/// `x ↦ clamp(max_k (v_k − C‖x − p_k‖^α), −B, B)`, a member of the Hölder ball.
#[derive(Debug, Clone, PartialEq)]
pub struct HolderFn {
    alpha: f64,
    c: f64,
    bound: f64,
    anchors: Vec<(Vec<f64>, f64)>,
}

impl HolderFn {
    pub fn new(alpha: f64, c: f64, bound: f64, anchors: Vec<(Vec<f64>, f64)>) -> Self {
        Self { alpha, c, bound, anchors }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let v = self
            .anchors
            .iter()
            .map(|(p, v)| {
                let r = p.iter().zip(x).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                v - self.c * r.powf(self.alpha)
            })
            .fold(f64::NEG_INFINITY, f64::max);
        v.clamp(-self.bound, self.bound)
    }
}

pub fn random_holder_function(alpha: f64, c: f64, d: usize, bound: f64, seed: u64) -> HolderFn {
    let mut rng = rng_from_seed(seed);
    let k = rng.random_range(2..=8);
    let anchors = (0..k)
        .map(|_| {
            let p: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
            (p, rng.random_range(-bound..=bound))
        })
        .collect();
    HolderFn::new(alpha, c, bound, anchors)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coarse_radius_gives_constants() {
        let net = LipschitzNet::new(1.0, 1.0, 2, 1.0, 1.5).unwrap();
        assert_eq!(net.cells(), 1);
        let members = net.enumerate(100).unwrap();
        assert_eq!(members.len(), net.levels());
    }

    #[test]
    fn counted_size_matches_enumeration() {
        for &(d, eps) in &[(1, 0.25), (1, 0.5), (2, 0.9)] {
            let net = LipschitzNet::new(1.0, 1.0, d, 1.0, eps).unwrap();
            let members = net.enumerate(MAX_ENUMERATED).unwrap();
            assert!(((members.len() as f64).ln() - net.log_size()).abs() < 1e-9);
            assert!(members.iter().all(|m| net.contains(m)));
        }
    }

    #[test]
    fn covers_random_members() {
        let net = LipschitzNet::new(1.0, 1.0, 1, 1.0, 0.1).unwrap();
        assert!(net.covering_check(30, 3).all_covered());
        let net = LipschitzNet::new(0.5, 1.0, 2, 1.0, 0.3).unwrap();
        assert!(net.covering_check(10, 4).all_covered());
    }

    #[test]
    fn holder_fn_respects_bounds() {
        let f = random_holder_function(1.0, 2.0, 1, 0.5, 9);
        for i in 0..=100 {
            let x = i as f64 / 100.0;
            assert!(f.eval(&[x]).abs() <= 0.5);
            let y = (x + 0.01).min(1.0);
            assert!((f.eval(&[x]) - f.eval(&[y])).abs() <= 2.0 * (y - x) + 1e-12);
        }
    }

    #[test]
    fn capacity_guard() {
        assert!(matches!(LipschitzNet::new(0.2, 1.0, 2, 1.0, 1e-3), Err(Error::Capacity { .. })));
    }
}
