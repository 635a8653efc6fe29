//! Lyapunov-sequence computation, trace audits, and empirical
//! convergence-rate estimation.
//!
//! The solver's analysis rests on the auxiliary sequence
//! `H_k = F(x_k) + alpha ‖x_k - x_{k-1}‖²`, which is nonincreasing whenever
//! the extrapolation coefficients stay at or below `sqrt(L/(L+l))` and
//! `alpha` lies in the admissible window. The audits here verify that and
//! the per-iteration decrease bound on recorded traces; the rate fitter
//! turns residual series into an empirical linear-convergence ratio.

use crate::error::{Error, Result};
use crate::linalg;
use crate::objective::Moduli;
use crate::solver::IterateTrace;

/// `F(x_k) + alpha ‖x_k - x_{k-1}‖²`.
#[inline]
pub fn lyapunov_value(f_x: f64, step_norm: f64, alpha: f64) -> f64 {
    f_x + alpha * (step_norm * step_norm)
}

/// Lyapunov series of a trace recomputed at an arbitrary weight, using the
/// same arithmetic as the solver's own H column.
pub fn lyapunov_series(trace: &IterateTrace, alpha: f64) -> Vec<f64> {
    trace
        .records()
        .iter()
        .map(|r| lyapunov_value(r.f_value, r.step_norm, alpha))
        .collect()
}

/// Outcome of a monotonicity or per-iteration-bound audit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AuditReport {
    pub ok: bool,
    /// Index of the first violating transition (the k of the left-hand
    /// element), when any.
    pub first_violation: Option<usize>,
}

/// Checks `s_{k+1} <= s_k + rel_tol * max(1, |s_k|)` for all k.
pub fn audit_monotone(series: &[f64], rel_tol: f64) -> Result<AuditReport> {
    if series.is_empty() {
        return Err(Error::InvalidArgument(
            "audit_monotone requires a nonempty series".into(),
        ));
    }
    if rel_tol < 0.0 {
        return Err(Error::InvalidArgument("rel_tol must be >= 0".into()));
    }
    for k in 0..series.len() - 1 {
        if series[k + 1] > series[k] + rel_tol * series[k].abs().max(1.0) {
            return Ok(AuditReport {
                ok: false,
                first_violation: Some(k),
            });
        }
    }
    Ok(AuditReport {
        ok: true,
        first_violation: None,
    })
}

/// Per-iteration Lyapunov decrease bound
/// `H_{k+1} - H_k <= (alpha - L/2) d_{k+1}² + ((L+l)/2 beta_k² - alpha) d_k²`
/// with `d_k = ‖x_k - x_{k-1}‖`, checked over a recorded trace at the
/// given weight and relative tolerance.
pub fn audit_h_decrease(
    trace: &IterateTrace,
    moduli: Moduli,
    alpha: f64,
    rel_tol: f64,
) -> AuditReport {
    let records = trace.records();
    let h = lyapunov_series(trace, alpha);
    for k in 0..records.len().saturating_sub(1) {
        let d_prev = records[k].step_norm;
        let d_next = records[k + 1].step_norm;
        let beta = records[k + 1].beta_used;
        let rhs = (alpha - 0.5 * moduli.lipschitz) * d_next * d_next
            + (0.5 * (moduli.lipschitz + moduli.concavity) * beta * beta - alpha) * d_prev * d_prev;
        let slack = rel_tol * h[k].abs().max(rhs.abs()).max(1.0);
        if h[k + 1] - h[k] > rhs + slack {
            return AuditReport {
                ok: false,
                first_violation: Some(k),
            };
        }
    }
    AuditReport {
        ok: true,
        first_violation: None,
    }
}

/// Per-iteration objective descent bound (the `z = x_k` instance of the
/// step inequality):
/// `F(x_{k+1}) <= F(x_k) + (L+l)/2 beta_k² d_k² - L/2 d_{k+1}²`.
pub fn audit_descent(trace: &IterateTrace, moduli: Moduli, rel_tol: f64) -> AuditReport {
    let records = trace.records();
    for k in 0..records.len().saturating_sub(1) {
        let d_prev = records[k].step_norm;
        let d_next = records[k + 1].step_norm;
        let beta = records[k + 1].beta_used;
        let bound = records[k].f_value
            + 0.5 * (moduli.lipschitz + moduli.concavity) * beta * beta * d_prev * d_prev
            - 0.5 * moduli.lipschitz * d_next * d_next;
        let slack = rel_tol * records[k].f_value.abs().max(bound.abs()).max(1.0);
        if records[k + 1].f_value > bound + slack {
            return AuditReport {
                ok: false,
                first_violation: Some(k),
            };
        }
    }
    AuditReport {
        ok: true,
        first_violation: None,
    }
}

/// Least-squares fit of a linear-convergence ratio over the tail of a
/// residual series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    /// `exp(slope)`: the per-iteration contraction ratio implied by the
    /// fit. Values >= 1 mean no observed decay.
    pub ratio_estimate: f64,
    /// Slope of the least-squares line on `log(residual)` vs `k`.
    pub slope: f64,
    /// Coefficient of determination of that line, in `[0, 1]`.
    pub r_squared: f64,
    /// Global index where the fitted tail begins.
    pub tail_start: usize,
    /// Whether any tail entry was clamped up to the positivity floor.
    pub clamped: bool,
}

const RESIDUAL_FLOOR: f64 = 1e-300;

/// Fits `log(residual_k) = a + slope * k` over the final `tail_fraction`
/// of the series and reports `ratio = exp(slope)`.
///
/// Entries must be nonnegative and finite. An exact zero ends the fit
/// window (convergence in finitely many steps); positive entries at or
/// below `1e-300` are clamped to the floor and flagged. Fewer than 10
/// usable tail points is an error.
pub fn fit_linear_rate(residuals: &[f64], tail_fraction: f64) -> Result<RateFit> {
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(Error::InvalidArgument(
            "tail_fraction must lie in (0, 1]".into(),
        ));
    }
    if residuals.iter().any(|r| !r.is_finite() || *r < 0.0) {
        return Err(Error::InvalidArgument(
            "residuals must be finite and nonnegative".into(),
        ));
    }

    let n = residuals.len();
    let tail_len = ((n as f64) * tail_fraction).ceil() as usize;
    let tail_start = n - tail_len.min(n);
    // The window ends at the first exact zero (if any) inside the tail.
    let mut end = n;
    for (i, &r) in residuals.iter().enumerate().skip(tail_start) {
        if r == 0.0 {
            end = i;
            break;
        }
    }

    let window = &residuals[tail_start..end];
    if window.len() < 10 {
        return Err(Error::InsufficientData(format!(
            "rate fit needs at least 10 tail points, got {}",
            window.len()
        )));
    }

    let mut clamped = false;
    let logs: Vec<f64> = window
        .iter()
        .map(|&r| {
            if r <= RESIDUAL_FLOOR {
                clamped = true;
                RESIDUAL_FLOOR.ln()
            } else {
                r.ln()
            }
        })
        .collect();

    let m = logs.len() as f64;
    let mean_k = tail_start as f64 + (logs.len() as f64 - 1.0) / 2.0;
    let mean_y = logs.iter().sum::<f64>() / m;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (i, &y) in logs.iter().enumerate() {
        let dx = (tail_start + i) as f64 - mean_k;
        let dy = y - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let slope = sxy / sxx;
    let ss_res = syy - slope * sxy;
    let r_squared = if syy <= f64::EPSILON * mean_y.abs().max(1.0) {
        // A constant series is fit perfectly by the zero-slope line.
        1.0
    } else {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };

    Ok(RateFit {
        ratio_estimate: slope.exp(),
        slope,
        r_squared,
        tail_start,
        clamped,
    })
}

/// `‖x_k - x_ref‖` for every recorded iterate.
pub fn distance_to_reference(trace: &IterateTrace, x_ref: &[f64]) -> Vec<f64> {
    trace
        .records()
        .iter()
        .map(|r| {
            assert_eq!(r.x.len(), x_ref.len(), "reference dimension mismatch");
            linalg::dist(&r.x, x_ref)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn lyapunov_value_cases() {
        assert_eq!(lyapunov_value(2.5, 0.0, 3.0), 2.5);
        assert_eq!(lyapunov_value(2.5, 4.0, 0.0), 2.5);
        assert_eq!(lyapunov_value(1.0, 2.0, 0.5), 3.0);
    }

    #[test]
    fn monotone_accepts_decreasing_and_constant() {
        assert_eq!(
            audit_monotone(&[3.0, 2.0, 1.0], 0.0).unwrap(),
            AuditReport {
                ok: true,
                first_violation: None
            }
        );
        assert!(audit_monotone(&[1.0, 1.0, 1.0], 0.0).unwrap().ok);
    }

    #[test]
    fn monotone_flags_first_increase() {
        let report = audit_monotone(&[1.0, 2.0], 0.0).unwrap();
        assert!(!report.ok);
        assert_eq!(report.first_violation, Some(0));
    }

    #[test]
    fn monotone_rejects_empty() {
        assert!(audit_monotone(&[], 1e-10).is_err());
    }

    #[test]
    fn monotone_tolerance_is_relative() {
        // An increase of 5e-11 on a value of order 100 passes at 1e-10.
        assert!(audit_monotone(&[100.0, 100.0 + 5e-9], 1e-10).unwrap().ok);
        assert!(!audit_monotone(&[100.0, 100.0 + 5e-8], 1e-10).unwrap().ok);
    }

    #[test]
    fn exact_geometric_series_recovers_ratio() {
        let r: f64 = 0.9;
        let series: Vec<f64> = (0..60).map(|k| r.powi(k)).collect();
        let fit = fit_linear_rate(&series, 0.5).unwrap();
        assert_relative_eq!(fit.ratio_estimate, 0.9, max_relative = 1e-12);
        assert!(fit.r_squared > 1.0 - 1e-12);
        assert_eq!(fit.tail_start, 30);
        assert!(!fit.clamped);
    }

    #[test]
    fn constant_series_has_unit_ratio() {
        let series = vec![0.25; 40];
        let fit = fit_linear_rate(&series, 0.5).unwrap();
        assert_eq!(fit.slope, 0.0);
        assert_eq!(fit.ratio_estimate, 1.0);
        assert_eq!(fit.r_squared, 1.0);
    }

    #[test]
    fn zero_entry_terminates_the_window() {
        let mut series: Vec<f64> = (0..50).map(|k| 0.8f64.powi(k)).collect();
        series[45] = 0.0;
        let fit = fit_linear_rate(&series, 0.5).unwrap();
        // Window is [25, 45): still a clean geometric fit.
        assert_relative_eq!(fit.ratio_estimate, 0.8, max_relative = 1e-12);
        assert!(!fit.clamped);
    }

    #[test]
    fn subnormal_entries_are_clamped_and_flagged() {
        let mut series = vec![1.0; 30];
        for (k, v) in series.iter_mut().enumerate() {
            *v = 0.5f64.powi(k as i32);
        }
        series[29] = 1e-310;
        let fit = fit_linear_rate(&series, 1.0).unwrap();
        assert!(fit.clamped);
    }

    #[test]
    fn short_tail_is_insufficient_data() {
        let series = vec![1.0, 0.9, 0.8, 0.7];
        assert!(matches!(
            fit_linear_rate(&series, 0.5),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn rejects_negative_residuals() {
        assert!(fit_linear_rate(&[1.0, -0.5, 0.2], 1.0).is_err());
    }

    fn trace_of(points: &[&[f64]]) -> IterateTrace {
        let mut trace = IterateTrace::default();
        for (k, x) in points.iter().enumerate() {
            trace.push(crate::solver::TraceRecord {
                k,
                x: x.to_vec(),
                f_value: 0.0,
                h_value: 0.0,
                step_norm: 0.0,
                residual: 0.0,
                gap: None,
                beta_used: 0.0,
                restart_flag: false,
            });
        }
        trace
    }

    #[test]
    fn distance_to_final_iterate_ends_at_zero() {
        let trace = trace_of(&[&[0.0, 0.0], &[1.0, 1.0], &[2.0, 2.0]]);
        let d = distance_to_reference(&trace, &[2.0, 2.0]);
        assert_eq!(*d.last().unwrap(), 0.0);
    }

    #[test]
    fn distance_of_single_iterate_trace() {
        let trace = trace_of(&[&[1.0, 2.0]]);
        let d = distance_to_reference(&trace, &[4.0, 6.0]);
        assert_eq!(d, vec![5.0]);
    }

    #[test]
    fn distance_two_point_hand_check() {
        // ‖(1,1) - (0,0)‖ = sqrt(2), ‖(3,4) - (0,0)‖ = 5.
        let trace = trace_of(&[&[1.0, 1.0], &[3.0, 4.0]]);
        let d = distance_to_reference(&trace, &[0.0, 0.0]);
        assert_relative_eq!(d[0], 2.0f64.sqrt(), max_relative = 1e-15);
        assert_eq!(d[1], 5.0);
    }

    proptest! {
        #[test]
        fn geometric_recovery_property(r in 0.05f64..0.99, len in 25usize..120) {
            let series: Vec<f64> = (0..len).map(|k| r.powi(k as i32)).collect();
            let fit = fit_linear_rate(&series, 0.5).unwrap();
            prop_assert!((fit.ratio_estimate - r).abs() <= 1e-12 * r.max(1e-3));
        }
    }
}
