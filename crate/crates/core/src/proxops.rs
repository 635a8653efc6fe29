//! Closed-form proximal operators and projections.
//!
//! Two nonsmooth terms are supported: the ℓ1 norm (componentwise soft
//! thresholding) and the indicator of a scaled simplex (Euclidean
//! projection).

use crate::error::{Error, Result};

/// Componentwise soft threshold: `out_i = sign(v_i) * max(|v_i| - t, 0)`.
///
/// This is the proximal map of `t‖·‖₁`; `sign(0) = 0` is forced by the
/// prox formula.
pub fn soft_threshold(v: &[f64], t: f64) -> Result<Vec<f64>> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidArgument(
            "soft_threshold requires a finite threshold t >= 0".into(),
        ));
    }
    if !v.iter().all(|x| x.is_finite()) {
        return Err(Error::InvalidArgument(
            "soft_threshold requires finite input".into(),
        ));
    }
    Ok(v.iter()
        .map(|&x| x.signum() * (x.abs() - t).max(0.0))
        .collect())
}

/// Euclidean projection onto the scaled simplex `{x : Σx_i = s, x ≥ 0}`.
///
/// Sort-based threshold method: sort descending, locate the pivot, clip.
/// Nonnegativity is exact by construction (final clip at zero); the sum is
/// rescaled only if it drifted by more than `1e-12 * s`.
pub fn project_simplex(v: &[f64], s: f64) -> Result<Vec<f64>> {
    if !s.is_finite() || s <= 0.0 {
        return Err(Error::InvalidArgument(
            "project_simplex requires a finite s > 0".into(),
        ));
    }
    if v.is_empty() {
        return Err(Error::InvalidArgument(
            "project_simplex requires a nonempty vector".into(),
        ));
    }
    if !v.iter().all(|x| x.is_finite()) {
        return Err(Error::InvalidArgument(
            "project_simplex requires finite input".into(),
        ));
    }

    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());

    // Largest j with sorted[j] - (prefix_sum(j+1) - s) / (j+1) > 0; always
    // exists at j = 0 since sorted[0] - (sorted[0] - s) = s > 0.
    let mut pivot = 0usize;
    let mut prefix = 0.0;
    let mut pivot_prefix = sorted[0];
    for (j, &u) in sorted.iter().enumerate() {
        prefix += u;
        if u - (prefix - s) / (j + 1) as f64 > 0.0 {
            pivot = j;
            pivot_prefix = prefix;
        }
    }
    let tau = (pivot_prefix - s) / (pivot + 1) as f64;

    let mut out: Vec<f64> = v.iter().map(|&x| (x - tau).max(0.0)).collect();
    let total: f64 = out.iter().sum();
    if (total - s).abs() > 1e-12 * s {
        let scale = s / total;
        for x in &mut out {
            *x *= scale;
        }
    }
    Ok(out)
}
