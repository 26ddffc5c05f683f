use rayon::prelude::*;

use super::lipschitz::LipschitzNet;
use super::multi_index::MultiIndexNet;
use super::{midpoint_grid, MAX_ENUMERATED};
use crate::error::Result;

/// Nets whose members can be listed as equally weighted value vectors, so
/// that the Euclidean RMS distance is the `L₂(uniform)` distance.
pub trait PackableNet {
    fn member_vectors(&self, limit: usize) -> Result<Vec<Vec<f64>>>;
}

impl PackableNet for LipschitzNet {
    fn member_vectors(&self, limit: usize) -> Result<Vec<Vec<f64>>> {
        Ok(self.enumerate(limit)?.iter().map(|m| self.cell_values(m)).collect())
    }
}

impl PackableNet for MultiIndexNet {
    fn member_vectors(&self, limit: usize) -> Result<Vec<Vec<f64>>> {
        let grid = midpoint_grid(self.dim(), [512, 48, 16][self.dim() - 1]);
        Ok(self.enumerate(limit)?.iter().map(|m| grid.iter().map(|x| self.eval(m, x)).collect()).collect())
    }
}

fn rms_distance(a: &[f64], b: &[f64]) -> f64 {
    (a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>() / a.len() as f64).sqrt()
}

/// Greedy maximal packing of the net's members at `separation`, in
/// enumeration order: a member joins when it is farther than `separation`
/// from every member already chosen.
pub fn packing_entropy_bruteforce<N: PackableNet>(net: &N, separation: f64) -> Result<usize> {
    let members = net.member_vectors(MAX_ENUMERATED)?;
    let mut chosen: Vec<&Vec<f64>> = Vec::new();
    for m in &members {
        if chosen.par_iter().all(|c| rms_distance(c, m) > separation) {
            chosen.push(m);
        }
    }
    Ok(chosen.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extremes() {
        let net = LipschitzNet::new(1.0, 1.0, 1, 1.0, 0.5).unwrap();
        assert_eq!(packing_entropy_bruteforce(&net, 10.0).unwrap(), 1);
        let all = net.enumerate(MAX_ENUMERATED).unwrap().len();
        assert_eq!(packing_entropy_bruteforce(&net, 1e-9).unwrap(), all);
    }
}
