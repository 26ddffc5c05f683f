use std::f64::consts::PI;

use rand_distr::{Distribution, StandardNormal};

use super::lipschitz::{random_holder_function, HolderFn, LipschitzNet};
use super::{l2_distance_on_grid, midpoint_grid, CoveringReport, MAX_ENUMERATED, MAX_LOG_NET_SIZE};
use crate::error::{Error, Result};
use crate::seeding::{derive_seed, rng_from_seed};

/// ε-net of `{Σ_{i≤p} λ_i(β_iᵀx) : β_i ∈ S^{d−1}, λ_i γ-Hölder with constant L, |λ_i| ≤ B}`
/// on `[0,1]^d`.
///
/// Product of a sup-norm `ε/(2p)`-net of links on `[−√d, √d]` and a direction
/// net on the sphere with chordal mesh `(ε/(2pL*))^{1/γ}/√d`, with
/// `L* = L(1 + d)^{s+1}`. Only `s = 0` has an explicit construction.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiIndexNet {
    p: usize,
    s: u32,
    gamma: f64,
    l: f64,
    d: usize,
    bound: f64,
    epsilon: f64,
    l_star: f64,
    link_net: LipschitzNet,
    directions: Vec<Vec<f64>>,
    log_size: f64,
}

/// One net member: per component, link lattice indices and a direction index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiIndexMember {
    pub links: Vec<Vec<i32>>,
    pub directions: Vec<usize>,
}

impl MultiIndexNet {
    pub fn new(p: usize, s: u32, gamma: f64, l: f64, d: usize, bound: f64, epsilon: f64) -> Result<Self> {
        if !(1..=3).contains(&p) {
            return Err(Error::InvalidParameter(format!("number of indices must lie in 1..=3, got {p}")));
        }
        if s != 0 {
            return Err(Error::InvalidParameter(
                "explicit multi-index nets need s = 0; smoother links are handled at the entropy-order level".into(),
            ));
        }
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::InvalidParameter(format!("γ must lie in (0, 1], got {gamma}")));
        }
        if !(1..=3).contains(&d) {
            return Err(Error::InvalidParameter(format!("multi-index nets support d ∈ 1..=3, got {d}")));
        }
        if !(l > 0.0 && bound > 0.0 && epsilon > 0.0) {
            return Err(Error::InvalidParameter("L, B and ε must be positive".into()));
        }
        let span = 2.0 * (d as f64).sqrt();
        // A γ-Hölder link on an interval of length `span` is a γ-Hölder
        // function on [0,1] with constant L·span^γ.
        let link_net = LipschitzNet::new(gamma, l * span.powf(gamma), 1, bound, epsilon / (2.0 * p as f64))?;
        let l_star = l * (1.0 + d as f64).powi(s as i32 + 1);
        let mesh = (epsilon / (2.0 * p as f64 * l_star)).powf(1.0 / gamma) / (d as f64).sqrt();
        let directions = sphere_net(d, mesh)?;
        let log_size = p as f64 * (link_net.log_size() + (directions.len() as f64).ln());
        if log_size > MAX_LOG_NET_SIZE {
            return Err(Error::Capacity { what: "log net size".into(), requested: log_size, limit: MAX_LOG_NET_SIZE });
        }
        Ok(Self { p, s, gamma, l, d, bound, epsilon, l_star, link_net, directions, log_size })
    }

    pub fn radius(&self) -> f64 {
        self.epsilon
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn log_size(&self) -> f64 {
        self.log_size
    }

    pub fn l_star(&self) -> f64 {
        self.l_star
    }

    pub fn smoothness(&self) -> f64 {
        self.s as f64 + self.gamma
    }

    pub fn link_net(&self) -> &LipschitzNet {
        &self.link_net
    }

    pub fn directions(&self) -> &[Vec<f64>] {
        &self.directions
    }

    fn link_arg(&self, beta: &[f64], x: &[f64]) -> f64 {
        let span = (self.d as f64).sqrt();
        let u: f64 = beta.iter().zip(x).map(|(b, xi)| b * xi).sum();
        (u + span) / (2.0 * span)
    }

    pub fn eval(&self, member: &MultiIndexMember, x: &[f64]) -> f64 {
        member
            .links
            .iter()
            .zip(&member.directions)
            .map(|(link, &k)| self.link_net.eval(link, &[self.link_arg(&self.directions[k], x)]))
            .sum()
    }

    /// Nearest net direction (Euclidean) and the quantised link, per component.
    pub fn project(&self, f: &[SingleIndexFn]) -> MultiIndexMember {
        let mut links = Vec::with_capacity(f.len());
        let mut directions = Vec::with_capacity(f.len());
        for comp in f {
            let k = (0..self.directions.len())
                .min_by(|&a, &b| {
                    dist2(&self.directions[a], &comp.beta).total_cmp(&dist2(&self.directions[b], &comp.beta))
                })
                .expect("direction net is nonempty");
            directions.push(k);
            links.push(self.link_net.project(|u| comp.link.eval(u)));
        }
        MultiIndexMember { links, directions }
    }

    pub fn contains(&self, member: &MultiIndexMember) -> bool {
        member.links.len() == self.p
            && member.directions.len() == self.p
            && member.directions.iter().all(|&k| k < self.directions.len())
            && member.links.iter().all(|l| self.link_net.contains(l))
    }

    /// All members; fails beyond `limit`.
    pub fn enumerate(&self, limit: usize) -> Result<Vec<MultiIndexMember>> {
        let limit = limit.min(MAX_ENUMERATED);
        if self.log_size > (limit as f64).ln() + 1e-9 {
            return Err(Error::Capacity {
                what: "enumerated net".into(),
                requested: self.log_size.exp(),
                limit: limit as f64,
            });
        }
        let links = self.link_net.enumerate(limit)?;
        let mut out = vec![MultiIndexMember { links: vec![], directions: vec![] }];
        for _ in 0..self.p {
            out = out
                .into_iter()
                .flat_map(|m| {
                    let links = &links;
                    (0..self.directions.len()).flat_map(move |k| {
                        let m = m.clone();
                        links.iter().map(move |l| {
                            let mut m = m.clone();
                            m.links.push(l.clone());
                            m.directions.push(k);
                            m
                        })
                    })
                })
                .collect();
        }
        Ok(out)
    }

    /// Random class members with `p` components, projected and measured in `L₂` on a fine grid.
    pub fn covering_check(&self, count: usize, seed: u64) -> CoveringReport {
        let grid = midpoint_grid(self.d, [4096, 128, 24][self.d - 1]);
        let mut covered = 0;
        let mut max_distance: f64 = 0.0;
        for i in 0..count {
            let comps: Vec<SingleIndexFn> = (0..self.p)
                .map(|j| {
                    SingleIndexFn::random(
                        self.gamma,
                        self.l,
                        self.d,
                        self.bound,
                        derive_seed(seed, (i * self.p + j) as u64),
                    )
                })
                .collect();
            let member = self.project(&comps);
            let truth = |x: &[f64]| comps.iter().map(|c| c.eval(x)).sum::<f64>();
            let dist = l2_distance_on_grid(truth, |x| self.eval(&member, x), &grid);
            max_distance = max_distance.max(dist);
            if self.contains(&member) && dist <= self.epsilon {
                covered += 1;
            }
        }
        CoveringReport { checked: count, covered, max_distance, radius: self.epsilon }
    }
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum()
}

/// Points on `S^{d−1}` whose nearest-point chordal distance is at most `mesh`.
pub fn sphere_net(d: usize, mesh: f64) -> Result<Vec<Vec<f64>>> {
    if !(mesh > 0.0) {
        return Err(Error::InvalidParameter(format!("sphere mesh must be positive, got {mesh}")));
    }
    let cap = |n: f64| {
        if n > MAX_ENUMERATED as f64 * 100.0 {
            Err(Error::Capacity { what: "direction net".into(), requested: n, limit: MAX_ENUMERATED as f64 * 100.0 })
        } else {
            Ok(n as usize)
        }
    };
    match d {
        1 => Ok(vec![vec![-1.0], vec![1.0]]),
        2 => {
            let n = cap((PI / mesh).ceil().max(1.0))?;
            Ok((0..n)
                .map(|k| {
                    let a = 2.0 * PI * k as f64 / n as f64;
                    vec![a.cos(), a.sin()]
                })
                .collect())
        }
        3 => {
            let nt = cap((PI / mesh).ceil().max(1.0))?;
            let np = cap((2.0 * PI / mesh).ceil().max(1.0))?;
            cap((nt + 1) as f64 * np as f64)?;
            let mut out = Vec::new();
            for i in 0..=nt {
                let t = PI * i as f64 / nt as f64;
                for j in 0..np {
                    let f = 2.0 * PI * j as f64 / np as f64;
                    out.push(vec![t.sin() * f.cos(), t.sin() * f.sin(), t.cos()]);
                }
            }
            Ok(out)
        }
        _ => Err(Error::InvalidParameter(format!("sphere nets support d ∈ 1..=3, got {d}"))),
    }
}

/// `x ↦ λ(βᵀx)` with `λ` γ-Hölder (constant L) on `[−√d, √d]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleIndexFn {
    pub beta: Vec<f64>,
    /// The link reparametrised to `[0, 1]`.
    pub link: HolderFn,
}

impl SingleIndexFn {
    pub fn random(gamma: f64, l: f64, d: usize, bound: f64, seed: u64) -> Self {
        let mut rng = rng_from_seed(seed);
        let mut beta: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
        let norm = beta.iter().map(|b| b * b).sum::<f64>().sqrt();
        beta.iter_mut().for_each(|b| *b /= norm);
        let span = 2.0 * (d as f64).sqrt();
        let link = random_holder_function(gamma, l * span.powf(gamma), 1, bound, derive_seed(seed, 1));
        Self { beta, link }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let span = (self.beta.len() as f64).sqrt();
        let u: f64 = self.beta.iter().zip(x).map(|(b, xi)| b * xi).sum();
        self.link.eval(&[(u + span) / (2.0 * span)])
    }
}
