//! Deterministic text output: trace CSV, run manifest, rate summary.
//! All floats carry 17 significant digits so reruns are byte-identical
//! and values round-trip exactly.

use std::fmt::Write as _;

use proxgrad::diagnostics::{distance_to_reference, fit_linear_rate, RateFit};
use proxgrad::solver::{IterateTrace, SolveResult};

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV with one row per recorded iterate. The gap columns stay empty for
/// problems without a dual.
pub fn trace_csv(trace: &IterateTrace) -> String {
    let mut out = String::with_capacity(trace.records().len() * 160);
    out.push_str("k,F,H,step_norm,residual,gap,feas_violation,beta,restart_flag\n");
    for r in trace.records() {
        let (gap, feas) = match r.gap {
            Some(g) => (fmt_f64(g.gap), fmt_f64(g.feas_violation)),
            None => (String::new(), String::new()),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.k,
            fmt_f64(r.f_value),
            fmt_f64(r.h_value),
            fmt_f64(r.step_norm),
            fmt_f64(r.residual),
            gap,
            feas,
            fmt_f64(r.beta_used),
            u8::from(r.restart_flag),
        );
    }
    out
}

/// `key = value` manifest body from pre-rendered pairs.
pub fn manifest_text(pairs: &[(&str, String)]) -> String {
    let mut out = String::new();
    for (k, v) in pairs {
        let _ = writeln!(out, "{k} = {v}");
    }
    out
}

fn rate_fields(out: &mut String, prefix: &str, fit: &Result<RateFit, proxgrad::Error>) {
    match fit {
        Ok(f) => {
            let _ = writeln!(out, "{prefix}_ratio = {}", fmt_f64(f.ratio_estimate));
            let _ = writeln!(out, "{prefix}_slope = {}", fmt_f64(f.slope));
            let _ = writeln!(out, "{prefix}_r_squared = {}", fmt_f64(f.r_squared));
            let _ = writeln!(out, "{prefix}_tail_start = {}", f.tail_start);
            let _ = writeln!(out, "{prefix}_clamped = {}", u8::from(f.clamped));
        }
        Err(e) => {
            let _ = writeln!(out, "{prefix}_fit = unavailable ({e})");
        }
    }
}

/// Rate summary over the two per-run residual series: distance to the
/// final iterate, and objective gap to `f_min` (the smallest final
/// objective among the runs of the same experiment).
pub fn rate_summary(result: &SolveResult, f_min: f64, tail_fraction: f64) -> String {
    let dists = distance_to_reference(&result.trace, &result.x_final);
    let fgaps: Vec<f64> = result
        .trace
        .records()
        .iter()
        .map(|r| (r.f_value - f_min).abs())
        .collect();

    let mut out = String::new();
    let _ = writeln!(out, "tail_fraction = {}", fmt_f64(tail_fraction));
    let _ = writeln!(out, "f_min = {}", fmt_f64(f_min));
    rate_fields(&mut out, "dist", &fit_linear_rate(&dists, tail_fraction));
    rate_fields(&mut out, "fgap", &fit_linear_rate(&fgaps, tail_fraction));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_has_17_significant_digits() {
        assert_eq!(fmt_f64(1.5), "1.5000000000000000e0");
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        let x = std::f64::consts::PI * 1e-7;
        assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
    }
}
