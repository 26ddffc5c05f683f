use super::MAX_ENUMERATED;
use crate::error::{Error, Result};

/// Sup-norm ε-net of `Σ = {x ↦ exp(Σ c_i x_i) : |c_i| ≤ C}` on `[0,1]^d`.
///
/// Coefficients on a per-axis grid of spacing `2ε / (d e^{dC})`; since
/// `|e^a − e^b| ≤ e^{dC}|a − b|` on the class, every member is within ε of
/// the nearest grid point. The log-size is `d · log(grid points) = O(log 1/ε)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleNet {
    c: f64,
    d: usize,
    epsilon: f64,
    axis: Vec<f64>,
}

impl ScaleNet {
    pub fn new(c: f64, d: usize, epsilon: f64) -> Result<Self> {
        if !(c >= 0.0) || d == 0 || !(epsilon > 0.0) {
            return Err(Error::InvalidParameter("need C ≥ 0, d ≥ 1 and ε > 0".into()));
        }
        let spacing = 2.0 * epsilon / (d as f64 * (d as f64 * c).exp());
        let n = ((2.0 * c / spacing).ceil() + 1.0).max(1.0);
        if n > MAX_ENUMERATED as f64 {
            return Err(Error::Capacity { what: "scale-net axis".into(), requested: n, limit: MAX_ENUMERATED as f64 });
        }
        let n = n as usize;
        let axis = if n == 1 { vec![0.0] } else { (0..n).map(|i| -c + 2.0 * c * i as f64 / (n - 1) as f64).collect() };
        Ok(Self { c, d, epsilon, axis })
    }

    pub fn radius(&self) -> f64 {
        self.epsilon
    }

    pub fn log_size(&self) -> f64 {
        self.d as f64 * (self.axis.len() as f64).ln()
    }

    pub fn axis(&self) -> &[f64] {
        &self.axis
    }

    /// Nearest grid coefficients.
    pub fn project(&self, coef: &[f64]) -> Vec<f64> {
        coef.iter()
            .map(|&ci| {
                *self.axis.iter().min_by(|a, b| (*a - ci).abs().total_cmp(&(*b - ci).abs())).expect("nonempty axis")
            })
            .collect()
    }

    pub fn eval(coef: &[f64], x: &[f64]) -> f64 {
        coef.iter().zip(x).map(|(c, xi)| c * xi).sum::<f64>().exp()
    }

    pub fn bound(&self) -> f64 {
        self.c
    }
}

/// `sup h/h₀` over evaluation points; both densities given by their values.
pub fn density_ratio_sup(h: &[f64], h0: &[f64]) -> Result<f64> {
    if h.len() != h0.len() || h.is_empty() {
        return Err(Error::InvalidInput("density value vectors must be nonempty and of equal length".into()));
    }
    if h0.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::InvalidInput("reference density must be positive".into()));
    }
    Ok(h.iter().zip(h0).map(|(a, b)| a / b).fold(f64::NEG_INFINITY, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function_classes::midpoint_grid;

    #[test]
    fn covers_and_grows_logarithmically() {
        let net = ScaleNet::new(0.5, 2, 0.05).unwrap();
        let grid = midpoint_grid(2, 20);
        for coef in [[0.31, -0.44], [0.5, 0.5], [-0.07, 0.2]] {
            let p = net.project(&coef);
            let sup = grid.iter().map(|x| (ScaleNet::eval(&coef, x) - ScaleNet::eval(&p, x)).abs()).fold(0.0, f64::max);
            assert!(sup <= 0.05);
        }
        let fine = ScaleNet::new(0.5, 2, 0.05 / 64.0).unwrap();
        // 64× finer radius adds about d·log 64 nats.
        assert!(fine.log_size() - net.log_size() < 2.0 * (64f64).ln() + 1.0);
    }

    #[test]
    fn ratio_of_bounded_densities() {
        assert_eq!(density_ratio_sup(&[0.5, 2.0], &[1.0, 1.0]).unwrap(), 2.0);
        assert!(density_ratio_sup(&[1.0], &[0.0]).is_err());
    }
}
