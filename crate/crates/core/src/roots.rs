//! Bracketing for nondecreasing functions.

use crate::error::{Error, Result};

/// Locates `inf { z : g(z) >= 0 }` for a nondecreasing `g` by bisection.
///
/// Requires `g(lo) < 0 <= g(hi)`. The invariant is kept on every step, so the
/// returned point is within `abs_tol` of the infimal root even when `g` has a
/// flat zero set or jumps across zero.
pub fn infimal_root<G: FnMut(f64) -> f64>(mut g: G, mut lo: f64, mut hi: f64, abs_tol: f64) -> Result<f64> {
    if !(lo < hi) {
        return Err(Error::InvalidInput(format!("empty bracket [{lo}, {hi}]")));
    }
    let glo = g(lo);
    let ghi = g(hi);
    if !(glo < 0.0 && ghi >= 0.0) {
        return Err(Error::InvalidInput(format!("bracket [{lo}, {hi}] has no sign change (g = {glo}, {ghi})")));
    }
    while hi - lo > abs_tol {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Widens `[lo, hi]` geometrically until `g(lo) < 0 <= g(hi)`.
pub fn expand_bracket<G: FnMut(f64) -> f64>(mut g: G, mut lo: f64, mut hi: f64) -> Result<(f64, f64)> {
    let mut width = (hi - lo).max(1.0);
    for _ in 0..200 {
        let glo = g(lo);
        let ghi = g(hi);
        if glo < 0.0 && ghi >= 0.0 {
            return Ok((lo, hi));
        }
        if glo >= 0.0 {
            lo -= width;
        }
        if ghi < 0.0 {
            hi += width;
        }
        width *= 2.0;
        if !lo.is_finite() || !hi.is_finite() {
            break;
        }
    }
    Err(Error::InvalidInput("could not bracket a root".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_simple_root() {
        let r = infimal_root(|z| z * z * z - 2.0, 0.0, 2.0, 1e-12).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-11);
    }

    #[test]
    fn flat_zero_set_returns_left_end() {
        let g = |z: f64| {
            if z < 1.0 {
                z - 1.0
            } else if z <= 3.0 {
                0.0
            } else {
                z - 3.0
            }
        };
        let r = infimal_root(g, -5.0, 5.0, 1e-12).unwrap();
        assert!((r - 1.0).abs() < 1e-11);
    }

    #[test]
    fn jump_across_zero_returns_jump_point() {
        let g = |z: f64| if z < 0.5 { -1.0 } else { 1.0 };
        let r = infimal_root(g, 0.0, 1.0, 1e-12).unwrap();
        assert!((r - 0.5).abs() < 1e-11);
    }

    #[test]
    fn rejects_bracket_without_sign_change() {
        assert!(infimal_root(|z| z + 10.0, 0.0, 1.0, 1e-10).is_err());
    }

    #[test]
    fn expands_until_bracketed() {
        let (lo, hi) = expand_bracket(|z| z - 40.0, -1.0, 1.0).unwrap();
        assert!(lo < 40.0 && hi >= 40.0);
    }
}
