use std::collections::BTreeMap;
use std::sync::Arc;

use super::{Dataset, FittedEstimate, MethodTag};
use crate::error::{Error, Result};
use crate::psi_tile::{empirical_psi_tile, PsiSpec};

fn cell_index(x: &[f64], m: usize) -> usize {
    x.iter().fold(0, |acc, &xi| {
        let i = ((xi * m as f64).floor().max(0.0) as usize).min(m - 1);
        acc * m + i
    })
}

fn cell_coords(idx: usize, m: usize, d: usize) -> Vec<usize> {
    let mut out = vec![0; d];
    let mut r = idx;
    for k in (0..d).rev() {
        out[k] = r % m;
        r /= m;
    }
    out
}

/// Fills empty cells from the nearest nonempty cell (Euclidean distance
/// between cell indices, ties to the lowest row-major index).
fn fill_empty(values: &mut [Option<f64>], m: usize, d: usize) {
    let filled: Vec<(Vec<usize>, f64)> =
        values.iter().enumerate().filter_map(|(i, v)| v.map(|v| (cell_coords(i, m, d), v))).collect();
    for (i, v) in values.iter_mut().enumerate() {
        if v.is_some() {
            continue;
        }
        let c = cell_coords(i, m, d);
        let mut best = (usize::MAX, f64::NAN);
        for (fc, fv) in &filled {
            let d2 = fc.iter().zip(&c).map(|(a, b)| a.abs_diff(*b).pow(2)).sum::<usize>();
            if d2 < best.0 {
                best = (d2, *fv);
            }
        }
        *v = Some(best.1);
    }
}

fn binned_fit(
    data: &Dataset,
    m: usize,
    clamp: Option<(f64, f64)>,
    method: MethodTag,
    mut hyper: BTreeMap<String, f64>,
    cell_value: impl Fn(&[f64]) -> Result<f64>,
) -> Result<FittedEstimate> {
    if m == 0 {
        return Err(Error::InvalidInput("bins per axis must be at least 1".into()));
    }
    if let Some((lo, hi)) = clamp {
        if !(lo <= hi) {
            return Err(Error::InvalidInput(format!("empty clamp range [{lo}, {hi}]")));
        }
    }
    let d = data.dim();
    let cells = m.checked_pow(d as u32).ok_or_else(|| Error::InvalidInput("too many cells".into()))?;
    let mut buckets: Vec<Vec<f64>> = vec![Vec::new(); cells];
    for (x, &y) in data.x.iter().zip(&data.y) {
        buckets[cell_index(x, m)].push(y);
    }
    let mut values: Vec<Option<f64>> =
        buckets.iter().map(|b| if b.is_empty() { Ok(None) } else { cell_value(b).map(Some) }).collect::<Result<_>>()?;
    fill_empty(&mut values, m, d);
    let values: Vec<f64> = values
        .into_iter()
        .map(|v| {
            let v = v.expect("filled");
            match clamp {
                Some((lo, hi)) => v.clamp(lo, hi),
                None => v,
            }
        })
        .collect();
    hyper.insert("bins_per_axis".into(), m as f64);
    let values = Arc::new(values);
    let predictor = move |x: &[f64]| values[cell_index(x, m)];
    Ok(FittedEstimate::new(Arc::new(predictor), method, hyper))
}

/// Within-cell empirical ψ-tile on `m^d` equal cells of `[0,1]^d`.
pub fn fit_binned_psi_tile(
    data: &Dataset,
    psi: &PsiSpec,
    m: usize,
    clamp: Option<(f64, f64)>,
) -> Result<FittedEstimate> {
    let mut hyper = BTreeMap::new();
    hyper.insert("level".into(), psi.level());
    binned_fit(data, m, clamp, MethodTag::BinnedPsiTile, hyper, |ys| empirical_psi_tile(ys, psi))
}

/// Within-cell sample mean (local averaging).
pub fn fit_binned_mean(data: &Dataset, m: usize, clamp: Option<(f64, f64)>) -> Result<FittedEstimate> {
    binned_fit(
        data,
        m,
        clamp,
        MethodTag::BinnedMean,
        BTreeMap::new(),
        |ys| Ok(ys.iter().sum::<f64>() / ys.len() as f64),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_cells_take_nearest_value() {
        let data = Dataset::new(vec![vec![0.05], vec![0.95]], vec![1.0, 5.0]).unwrap();
        let fit = fit_binned_psi_tile(&data, &PsiSpec::quantile(0.5).unwrap(), 4, None).unwrap();
        assert_eq!(fit.predict(&[0.3]), 1.0);
        assert_eq!(fit.predict(&[0.6]), 5.0);
    }

    #[test]
    fn ties_go_to_lower_row_major_index() {
        let data = Dataset::new(vec![vec![0.1], vec![0.9]], vec![1.0, 5.0]).unwrap();
        let fit = fit_binned_psi_tile(&data, &PsiSpec::quantile(0.5).unwrap(), 3, None).unwrap();
        assert_eq!(fit.predict(&[0.5]), 1.0);
    }

    #[test]
    fn two_dimensional_fill() {
        let data = Dataset::new(vec![vec![0.9, 0.1]], vec![2.0]).unwrap();
        let fit = fit_binned_mean(&data, 3, Some((-1.0, 1.0))).unwrap();
        assert_eq!(fit.predict(&[0.1, 0.9]), 1.0);
    }

    #[test]
    fn rejects_zero_bins() {
        let data = Dataset::new(vec![vec![0.5]], vec![0.0]).unwrap();
        assert!(fit_binned_mean(&data, 0, None).is_err());
    }
}
