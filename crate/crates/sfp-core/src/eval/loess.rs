//! Degree-1 LOESS with tricube weights, used to smooth noisy accuracy curves
//! before hyperparameter selection.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

fn tricube(u: f64) -> f64 {
    if u >= 1.0 {
        0.0
    } else {
        let t = 1.0 - u * u * u;
        t * t * t
    }
}

/// Smooths `ys` over strictly increasing `xs` by local weighted linear
/// regression on the `span` fraction of nearest neighbors.
pub fn loess_smooth(xs: &[f64], ys: &[f64], span: f64) -> Result<Vec<f64>> {
    let n = xs.len();
    if n < 3 || ys.len() != n {
        return Err(Error::domain("loess needs at least 3 aligned points"));
    }
    if xs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain("loess xs must be strictly increasing"));
    }
    if !(span > 0.0 && span <= 1.0) {
        return Err(Error::domain("loess span must lie in (0, 1]"));
    }
    let q = (math::ceil(span * n as f64) as usize).clamp(3.min(n), n);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x0 = xs[i];
        // The q nearest neighbors of x0 form a contiguous window.
        let mut lo = i;
        let mut hi = i;
        while hi - lo + 1 < q {
            let extend_left = lo > 0
                && (hi + 1 >= n || x0 - xs[lo - 1] <= xs[hi + 1] - x0);
            if extend_left {
                lo -= 1;
            } else {
                hi += 1;
            }
        }
        let h = (x0 - xs[lo]).max(xs[hi] - x0).max(1e-300);
        let mut sw = 0.0;
        let mut swx = 0.0;
        let mut swy = 0.0;
        let mut swxx = 0.0;
        let mut swxy = 0.0;
        for j in lo..=hi {
            let w = tricube((xs[j] - x0).abs() / h);
            let dx = xs[j] - x0;
            sw += w;
            swx += w * dx;
            swy += w * ys[j];
            swxx += w * dx * dx;
            swxy += w * dx * ys[j];
        }
        let denom = sw * swxx - swx * swx;
        let value = if denom.abs() < 1e-300 {
            // Degenerate window: fall back to the weighted mean.
            swy / sw
        } else {
            // Weighted least squares evaluated at dx = 0.
            (swxx * swy - swx * swxy) / denom
        };
        out.push(value);
    }
    Ok(out)
}
