//! Main iteration loop with pluggable extrapolation schedules, termination
//! rules, and per-iteration trace recording.
//!
//! The loop is
//!
//! ```text
//! y_k     = x_k + beta_k (x_k - x_{k-1})        (x_{-1} = x_0)
//! x_{k+1} = prox_{g/L}( y_k - (1/L) grad f(y_k) )
//! ```
//!
//! Schedules cover the constant choice `beta_k = beta` (admissible for
//! `0 <= beta <= sqrt(L/(L+l))`), the FISTA recurrence, and FISTA with
//! fixed-interval and/or adaptive (gradient) restart.

use crate::diagnostics::lyapunov_value;
use crate::error::{Error, Result};
use crate::linalg;
use crate::objective::CompositeObjective;

/// Schedule kind for the extrapolation coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
enum ScheduleKind {
    Constant(f64),
    Fista,
    FixedRestart(usize),
    AdaptiveRestart,
    BothRestarts(usize),
}

/// Generator for the extrapolation coefficients `beta_k`, including the
/// FISTA theta recurrence and restart state.
///
/// FISTA follows `beta_k = (theta_{k-1} - 1) / theta_k` with
/// `theta_{k+1} = (1 + sqrt(1 + 4 theta_k²)) / 2` from
/// `theta_{-1} = theta_0 = 1` (Beck & Teboulle 2009). A fixed restart
/// resets the recurrence every `K` iterations; the adaptive (gradient)
/// restart resets whenever `<y_k - x_{k+1}, x_{k+1} - x_k> > 0`
/// (O'Donoghue & Candès 2015).
///
/// The FISTA recurrence assumes a convex smooth part (`concavity = 0`);
/// running it on a nonconvex objective is a heuristic without a
/// convergence guarantee and is reported as such by the harness.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaSchedule {
    kind: ScheduleKind,
    theta_prev: f64,
    theta_curr: f64,
    since_restart: usize,
}

impl BetaSchedule {
    fn with_kind(kind: ScheduleKind) -> Self {
        Self {
            kind,
            theta_prev: 1.0,
            theta_curr: 1.0,
            since_restart: 0,
        }
    }

    /// `beta_k = beta` for all k. Admissibility against the objective's
    /// threshold is checked by [`run`].
    pub fn constant(beta: f64) -> Self {
        Self::with_kind(ScheduleKind::Constant(beta))
    }

    /// Plain proximal gradient: `beta_k = 0`.
    pub fn none() -> Self {
        Self::constant(0.0)
    }

    pub fn fista() -> Self {
        Self::with_kind(ScheduleKind::Fista)
    }

    /// FISTA with the theta recurrence reset every `interval` iterations.
    /// `usize::MAX` acts as a "never restart" sentinel.
    pub fn fista_fixed_restart(interval: usize) -> Self {
        Self::with_kind(ScheduleKind::FixedRestart(interval.max(1)))
    }

    pub fn fista_adaptive_restart() -> Self {
        Self::with_kind(ScheduleKind::AdaptiveRestart)
    }

    /// FISTA with both the fixed-interval and the adaptive restart. Any
    /// restart resets both the recurrence and the interval counter.
    pub fn fista_both_restarts(interval: usize) -> Self {
        Self::with_kind(ScheduleKind::BothRestarts(interval.max(1)))
    }

    pub fn is_fista_variant(&self) -> bool {
        !matches!(self.kind, ScheduleKind::Constant(_))
    }

    fn uses_adaptive(&self) -> bool {
        matches!(
            self.kind,
            ScheduleKind::AdaptiveRestart | ScheduleKind::BothRestarts(_)
        )
    }

    fn fixed_interval(&self) -> Option<usize> {
        match self.kind {
            ScheduleKind::FixedRestart(k) | ScheduleKind::BothRestarts(k) => Some(k),
            _ => None,
        }
    }

    /// Coefficient for the current iteration; advances the internal state.
    /// A true `restart_signal` (from the adaptive trigger) or expiry of the
    /// fixed interval resets the recurrence, making this iteration's beta 0.
    /// Returns `(beta, restarted)`.
    pub fn next_beta(&mut self, restart_signal: bool) -> (f64, bool) {
        match self.kind {
            ScheduleKind::Constant(beta) => (beta, false),
            _ => {
                let fixed_due = self
                    .fixed_interval()
                    .is_some_and(|k| self.since_restart >= k);
                let adaptive_due = self.uses_adaptive() && restart_signal;
                let restarted = fixed_due || adaptive_due;
                if restarted {
                    self.theta_prev = 1.0;
                    self.theta_curr = 1.0;
                    self.since_restart = 0;
                }
                let beta = (self.theta_prev - 1.0) / self.theta_curr;
                let theta_next =
                    0.5 * (1.0 + (1.0 + 4.0 * self.theta_curr * self.theta_curr).sqrt());
                self.theta_prev = self.theta_curr;
                self.theta_curr = theta_next;
                self.since_restart += 1;
                (beta, restarted)
            }
        }
    }

    /// A priori supremum of the coefficients this schedule can emit.
    /// Plain FISTA and adaptive-only restart approach 1; a fixed restart
    /// interval caps the supremum strictly below 1.
    pub fn nominal_beta_sup(&self) -> f64 {
        match self.kind {
            ScheduleKind::Constant(beta) => beta,
            ScheduleKind::Fista | ScheduleKind::AdaptiveRestart => 1.0,
            ScheduleKind::FixedRestart(k) | ScheduleKind::BothRestarts(k) => {
                if k == usize::MAX {
                    return 1.0;
                }
                // Beta grows monotonically between resets; replay one period.
                let mut probe = Self::with_kind(ScheduleKind::Fista);
                let mut sup = 0.0f64;
                for _ in 0..k {
                    sup = sup.max(probe.next_beta(false).0);
                }
                sup
            }
        }
    }
}

/// Adaptive (gradient) restart trigger: strictly positive inner product
/// `<y - x_next, x_next - x_curr>`.
pub fn adaptive_restart_triggered(y_prev: &[f64], x_next: &[f64], x_curr: &[f64]) -> bool {
    debug_assert_eq!(y_prev.len(), x_next.len());
    debug_assert_eq!(x_next.len(), x_curr.len());
    let mut inner = 0.0;
    for i in 0..y_prev.len() {
        inner += (y_prev[i] - x_next[i]) * (x_next[i] - x_curr[i]);
    }
    inner > 0.0
}

/// Stopping test. Composite rules combine leaves: `AnyOf` fires when some
/// member fires, `AllOf` when every member fires at the same iterate.
#[derive(Debug, Clone, PartialEq)]
pub enum TerminationRule {
    /// Stop after `n` completed iterations.
    MaxIter(usize),
    /// Relative successive change `‖x_k - x_{k-1}‖ / max(‖x_k‖, 1) <= tol`.
    SuccessiveChange(f64),
    /// Duality-gap test `max(gap, feasibility violation) <= tol`; requires
    /// a problem with a dual (a gap hook passed to [`run`]).
    DualityGap(f64),
    /// Prox-gradient residual `<= tol`.
    Residual(f64),
    AnyOf(Vec<TerminationRule>),
    AllOf(Vec<TerminationRule>),
}

impl TerminationRule {
    fn validate(&self) -> Result<()> {
        match self {
            TerminationRule::MaxIter(n) => {
                if *n == 0 {
                    return Err(Error::InvalidArgument("MaxIter requires n >= 1".into()));
                }
            }
            TerminationRule::SuccessiveChange(tol)
            | TerminationRule::DualityGap(tol)
            | TerminationRule::Residual(tol) => {
                if !tol.is_finite() || *tol <= 0.0 {
                    return Err(Error::InvalidArgument(
                        "termination tolerances must be positive".into(),
                    ));
                }
            }
            TerminationRule::AnyOf(rules) | TerminationRule::AllOf(rules) => {
                if rules.is_empty() {
                    return Err(Error::InvalidArgument(
                        "composite termination rule must be nonempty".into(),
                    ));
                }
                for r in rules {
                    r.validate()?;
                }
            }
        }
        Ok(())
    }

    /// Whether the rule contains any non-MaxIter leaf (used by callers to
    /// tell "converged" from "ran out of budget").
    pub fn has_convergence_leaf(&self) -> bool {
        match self {
            TerminationRule::MaxIter(_) => false,
            TerminationRule::AnyOf(rules) | TerminationRule::AllOf(rules) => {
                rules.iter().any(|r| r.has_convergence_leaf())
            }
            _ => true,
        }
    }
}

/// Which rule ended the run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminationReason {
    MaxIterReached,
    SuccessiveChangeBelowTol,
    DualityGapBelowTol,
    ResidualBelowTol,
    /// Every member of an `AllOf` composite fired simultaneously.
    AllRulesSatisfied,
}

impl TerminationReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            TerminationReason::MaxIterReached => "max_iter",
            TerminationReason::SuccessiveChangeBelowTol => "successive_change",
            TerminationReason::DualityGapBelowTol => "duality_gap",
            TerminationReason::ResidualBelowTol => "residual",
            TerminationReason::AllRulesSatisfied => "all_rules",
        }
    }
}

/// Duality certificate components recorded per iteration: the relative
/// primal-dual gap and a (weighted) dual feasibility violation, both
/// compared against the same tolerance. Problems without an equality
/// constraint in the dual report a zero violation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapValue {
    pub gap: f64,
    pub feas_violation: f64,
}

impl GapValue {
    pub fn worst(&self) -> f64 {
        self.gap.max(self.feas_violation)
    }
}

/// Hook computing a duality certificate at a given iterate.
pub type GapFn<'a> = dyn Fn(&[f64]) -> GapValue + 'a;

/// One row of the per-iteration record stream. Record `k` describes the
/// iterate `x_k`; for `k >= 1`, `beta_used` and `restart_flag` describe the
/// extrapolation that produced it, and `step_norm = ‖x_k - x_{k-1}‖`.
#[derive(Debug, Clone)]
pub struct TraceRecord {
    pub k: usize,
    pub x: Vec<f64>,
    pub f_value: f64,
    /// Lyapunov value `F(x_k) + alpha ‖x_k - x_{k-1}‖²` at the run's alpha.
    pub h_value: f64,
    pub step_norm: f64,
    /// Prox-gradient residual at `x_k`.
    pub residual: f64,
    pub gap: Option<GapValue>,
    pub beta_used: f64,
    pub restart_flag: bool,
}

/// Per-iteration record stream for a single run.
#[derive(Debug, Clone, Default)]
pub struct IterateTrace {
    records: Vec<TraceRecord>,
}

impl IterateTrace {
    pub fn records(&self) -> &[TraceRecord] {
        &self.records
    }

    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    /// Number of completed iterations (records minus the initial point).
    pub fn iterations(&self) -> usize {
        self.records.len().saturating_sub(1)
    }

    pub fn f_series(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.f_value).collect()
    }

    pub fn h_series(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.h_value).collect()
    }

    pub fn step_norms(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.step_norm).collect()
    }

    pub(crate) fn push(&mut self, record: TraceRecord) {
        debug_assert_eq!(record.k, self.records.len());
        self.records.push(record);
    }
}

/// Outcome of a completed run.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub x_final: Vec<f64>,
    pub iterations: usize,
    pub termination_reason: TerminationReason,
    pub trace: IterateTrace,
    /// Lyapunov weight the trace's H column was computed with.
    pub alpha: f64,
}

/// Evaluates a termination rule against the latest trace record. Requires
/// at least one completed iteration. `DualityGap` on a trace without gap
/// entries is a configuration error.
pub fn check_termination(
    rule: &TerminationRule,
    trace: &IterateTrace,
) -> Result<Option<TerminationReason>> {
    let record = match trace.records().last() {
        Some(r) if r.k >= 1 => r,
        _ => {
            return Err(Error::InvalidArgument(
                "termination check requires at least one completed iteration".into(),
            ))
        }
    };
    check_record(rule, trace.iterations(), record)
}

fn check_record(
    rule: &TerminationRule,
    iterations: usize,
    record: &TraceRecord,
) -> Result<Option<TerminationReason>> {
    match rule {
        TerminationRule::MaxIter(n) => {
            Ok((iterations >= *n).then_some(TerminationReason::MaxIterReached))
        }
        TerminationRule::SuccessiveChange(tol) => {
            let scale = linalg::norm(&record.x).max(1.0);
            Ok((record.step_norm / scale <= *tol)
                .then_some(TerminationReason::SuccessiveChangeBelowTol))
        }
        TerminationRule::Residual(tol) => {
            Ok((record.residual <= *tol).then_some(TerminationReason::ResidualBelowTol))
        }
        TerminationRule::DualityGap(tol) => match record.gap {
            Some(gap) => Ok((gap.worst() <= *tol).then_some(TerminationReason::DualityGapBelowTol)),
            None => Err(Error::Config(
                "duality-gap termination requested on a problem without a dual hook".into(),
            )),
        },
        TerminationRule::AnyOf(rules) => {
            for r in rules {
                if let Some(reason) = check_record(r, iterations, record)? {
                    return Ok(Some(reason));
                }
            }
            Ok(None)
        }
        TerminationRule::AllOf(rules) => {
            for r in rules {
                if check_record(r, iterations, record)?.is_none() {
                    return Ok(None);
                }
            }
            Ok(Some(TerminationReason::AllRulesSatisfied))
        }
    }
}

/// Runs the extrapolated proximal gradient loop from `x0`.
///
/// `alpha` weights the Lyapunov column of the trace; `None` picks the
/// midpoint of the admissible window for the schedule's nominal beta
/// supremum (capped at the threshold). `gap` supplies the per-iteration
/// duality certificate for problems that have one.
///
/// The adaptive restart trigger is evaluated after every prox step,
/// starting from the very first iteration, and takes effect on the next
/// coefficient; restarts are recorded in the trace.
///
/// The loop runs until the rule fires; include a `MaxIter` leaf as an
/// iteration cap (every experiment protocol does).
pub fn run(
    obj: &CompositeObjective,
    x0: &[f64],
    mut schedule: BetaSchedule,
    rule: &TerminationRule,
    alpha: Option<f64>,
    gap: Option<&GapFn>,
) -> Result<SolveResult> {
    rule.validate()?;
    if !obj.in_domain(x0) {
        return Err(Error::InvalidArgument(
            "x0 must be a finite point in dom g".into(),
        ));
    }
    let moduli = obj.moduli();
    let threshold = moduli.beta_threshold();
    if let ScheduleKind::Constant(beta) = schedule.kind {
        if !(0.0..=threshold).contains(&beta) {
            return Err(Error::InvalidArgument(format!(
                "constant beta {beta} outside the admissible range [0, {threshold}]"
            )));
        }
    }

    // Window for the Lyapunov weight, computed at the schedule's nominal
    // supremum capped at the threshold (schedules above the threshold run
    // as heuristics and get the collapsed window at the cap).
    let beta_bar = schedule.nominal_beta_sup().min(threshold);
    let (alpha_lo, alpha_hi) = moduli.alpha_window(beta_bar)?;
    let alpha = match alpha {
        Some(a) => {
            if !(alpha_lo..=alpha_hi).contains(&a) {
                return Err(Error::InvalidArgument(format!(
                    "alpha {a} outside the admissible window [{alpha_lo}, {alpha_hi}]"
                )));
            }
            a
        }
        None => 0.5 * (alpha_lo + alpha_hi),
    };

    let mut trace = IterateTrace::default();
    let f0 = obj.value(x0);
    let residual0 = obj.stationarity_residual(x0)?;
    trace.push(TraceRecord {
        k: 0,
        x: x0.to_vec(),
        f_value: f0,
        h_value: lyapunov_value(f0, 0.0, alpha),
        step_norm: 0.0,
        residual: residual0,
        gap: gap.map(|g| g(x0)),
        beta_used: 0.0,
        restart_flag: false,
    });

    let mut x_prev = x0.to_vec();
    let mut x = x0.to_vec();
    let mut pending_restart = false;

    for k in 0.. {
        let (beta, restarted) = schedule.next_beta(pending_restart);
        let y: Vec<f64> = x
            .iter()
            .zip(&x_prev)
            .map(|(xc, xp)| xc + beta * (xc - xp))
            .collect();
        let step = obj
            .forward_backward_step(&y)
            .map_err(|e| attach_trace(e, k, &trace))?;
        let x_next = step.x_next;
        if !x_next.iter().all(|v| v.is_finite()) {
            return Err(Error::SolveFailed {
                iteration: k,
                message: "iterate left the finite range".into(),
                trace: Box::new(trace),
            });
        }
        if !step.objective_at_next.is_finite() {
            return Err(Error::SolveFailed {
                iteration: k,
                message: "objective left the finite range".into(),
                trace: Box::new(trace),
            });
        }
        pending_restart = schedule.uses_adaptive() && adaptive_restart_triggered(&y, &x_next, &x);

        let step_norm = linalg::dist(&x_next, &x);
        let f_value = step.objective_at_next;
        let residual = obj
            .stationarity_residual(&x_next)
            .map_err(|e| attach_trace(e, k, &trace))?;
        trace.push(TraceRecord {
            k: k + 1,
            x: x_next.clone(),
            f_value,
            h_value: lyapunov_value(f_value, step_norm, alpha),
            step_norm,
            residual,
            gap: gap.map(|g| g(&x_next)),
            beta_used: beta,
            restart_flag: restarted,
        });

        x_prev = x;
        x = x_next;

        if let Some(reason) = check_termination(rule, &trace)? {
            return Ok(SolveResult {
                x_final: x,
                iterations: trace.iterations(),
                termination_reason: reason,
                trace,
                alpha,
            });
        }
    }
    unreachable!("loop exits via termination rule")
}

fn attach_trace(e: Error, iteration: usize, trace: &IterateTrace) -> Error {
    match e {
        Error::Numerical(message) => Error::SolveFailed {
            iteration,
            message,
            trace: Box::new(trace.clone()),
        },
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::Moduli;
    use crate::proxops;
    use approx::assert_relative_eq;

    fn unit_quadratic(dim: usize) -> CompositeObjective {
        CompositeObjective::new(
            dim,
            Moduli::new(1.0, 0.0).unwrap(),
            Box::new(|x: &[f64]| x.iter().map(|v| 0.5 * v * v).sum()),
            Box::new(|x: &[f64]| x.to_vec()),
            Box::new(|_| 0.0),
            Box::new(|v, _| Ok(v.to_vec())),
        )
        .unwrap()
    }

    fn identity_lasso(b: Vec<f64>, lambda: f64) -> CompositeObjective {
        let dim = b.len();
        let b2 = b.clone();
        CompositeObjective::new(
            dim,
            Moduli::new(1.0, 0.0).unwrap(),
            Box::new(move |x: &[f64]| x.iter().zip(&b).map(|(a, c)| 0.5 * (a - c) * (a - c)).sum()),
            Box::new(move |x: &[f64]| x.iter().zip(&b2).map(|(a, c)| a - c).collect()),
            Box::new(move |x: &[f64]| lambda * x.iter().map(|v| v.abs()).sum::<f64>()),
            Box::new(move |v, step| proxops::soft_threshold(v, lambda * step)),
        )
        .unwrap()
    }

    #[test]
    fn fista_beta_sequence_first_values() {
        let mut s = BetaSchedule::fista();
        let (b0, _) = s.next_beta(false);
        assert_eq!(b0, 0.0);
        let (b1, _) = s.next_beta(false);
        assert_eq!(b1, 0.0);
        // theta_1 = (1+sqrt(5))/2, theta_2 = (1+sqrt(1+4 theta_1^2))/2,
        // beta_2 = (theta_1 - 1)/theta_2.
        let theta1 = 0.5 * (1.0 + 5.0f64.sqrt());
        let theta2 = 0.5 * (1.0 + (1.0 + 4.0 * theta1 * theta1).sqrt());
        let (b2, _) = s.next_beta(false);
        assert_relative_eq!(b2, (theta1 - 1.0) / theta2, max_relative = 1e-15);
        assert_relative_eq!(b2, 0.2817, max_relative = 1e-3);
    }

    #[test]
    fn fixed_restart_resets_every_interval() {
        let mut s = BetaSchedule::fista_fixed_restart(3);
        let mut betas = Vec::new();
        let mut restarts = Vec::new();
        for _ in 0..7 {
            let (b, r) = s.next_beta(false);
            betas.push(b);
            restarts.push(r);
        }
        assert_eq!(
            restarts,
            vec![false, false, false, true, false, false, true]
        );
        assert_eq!(betas[3], 0.0);
        assert_eq!(betas[6], 0.0);
        // Period repeats exactly.
        assert_eq!(betas[4], betas[1]);
        assert_eq!(betas[5], betas[2]);
    }

    #[test]
    fn fixed_restart_with_sentinel_matches_plain_fista() {
        let mut plain = BetaSchedule::fista();
        let mut sentinel = BetaSchedule::fista_fixed_restart(usize::MAX);
        for _ in 0..1000 {
            assert_eq!(plain.next_beta(false).0, sentinel.next_beta(false).0);
        }
    }

    #[test]
    fn adaptive_signal_resets_the_recurrence() {
        let mut s = BetaSchedule::fista_adaptive_restart();
        for _ in 0..5 {
            s.next_beta(false);
        }
        let (b, r) = s.next_beta(true);
        assert!(r);
        assert_eq!(b, 0.0);
        // Constant schedules ignore the signal.
        let mut c = BetaSchedule::constant(0.4);
        assert_eq!(c.next_beta(true), (0.4, false));
    }

    #[test]
    fn fista_betas_stay_in_unit_interval() {
        // Random restart signals never push beta outside [0, 1).
        let mut s = BetaSchedule::fista_both_restarts(7);
        let mut state = 0x12345u64;
        for _ in 0..2000 {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            let (b, _) = s.next_beta(state.is_multiple_of(11));
            assert!((0.0..1.0).contains(&b), "beta {b} outside [0,1)");
        }
    }

    #[test]
    fn nominal_sup_of_fixed_restart_is_below_one() {
        let sup = BetaSchedule::fista_fixed_restart(500).nominal_beta_sup();
        assert!(sup < 1.0);
        assert!(sup > 0.9);
        assert_eq!(BetaSchedule::fista().nominal_beta_sup(), 1.0);
        assert_eq!(BetaSchedule::constant(0.25).nominal_beta_sup(), 0.25);
    }

    #[test]
    fn adaptive_trigger_sign_cases() {
        // Descent-aligned: inner product -1.
        assert!(!adaptive_restart_triggered(
            &[1.0, 0.0],
            &[0.0, 0.0],
            &[1.0, 0.0]
        ));
        // Opposed: inner product +1.
        assert!(adaptive_restart_triggered(
            &[2.0, 0.0],
            &[1.0, 0.0],
            &[0.0, 0.0]
        ));
        // Orthogonal: exactly zero stays false (strict inequality).
        assert!(!adaptive_restart_triggered(
            &[1.0, 1.0],
            &[1.0, 0.0],
            &[0.0, 0.0]
        ));
    }

    #[test]
    fn single_gradient_step_reaches_quadratic_minimizer() {
        let obj = unit_quadratic(2);
        let result = run(
            &obj,
            &[1.0, 1.0],
            BetaSchedule::none(),
            &TerminationRule::MaxIter(1),
            None,
            None,
        )
        .unwrap();
        assert_eq!(result.x_final, vec![0.0, 0.0]);
        assert_eq!(result.iterations, 1);
        assert_eq!(result.termination_reason, TerminationReason::MaxIterReached);
        assert_eq!(result.trace.records().len(), 2);
    }

    #[test]
    fn constant_zero_matches_reference_proximal_gradient_loop() {
        // Independent reference loop: x <- prox(x - grad(x)/L, 1/L).
        let obj = identity_lasso(vec![2.0, -1.0, 0.3], 0.5);
        let x0 = vec![0.0, 0.0, 0.0];
        let result = run(
            &obj,
            &x0,
            BetaSchedule::none(),
            &TerminationRule::MaxIter(50),
            None,
            None,
        )
        .unwrap();

        let mut x = x0;
        for record in result.trace.records().iter().skip(1) {
            let g = obj.smooth_grad(&x);
            let shifted: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - gi / 1.0).collect();
            x = proxops::soft_threshold(&shifted, 0.5).unwrap();
            for (a, b) in record.x.iter().zip(&x) {
                assert!((a - b).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn rejects_x0_outside_domain() {
        let obj = CompositeObjective::new(
            2,
            Moduli::new(1.0, 0.0).unwrap(),
            Box::new(|_| 0.0),
            Box::new(|x: &[f64]| vec![0.0; x.len()]),
            Box::new(|x: &[f64]| {
                let sum: f64 = x.iter().sum();
                if x.iter().all(|&v| v >= 0.0) && (sum - 1.0).abs() <= 1e-12 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }),
            Box::new(|v, _| proxops::project_simplex(v, 1.0)),
        )
        .unwrap();
        assert!(matches!(
            run(
                &obj,
                &[0.0, 0.0],
                BetaSchedule::none(),
                &TerminationRule::MaxIter(5),
                None,
                None,
            ),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn rejects_constant_beta_above_threshold() {
        let obj = unit_quadratic(2);
        assert!(matches!(
            run(
                &obj,
                &[1.0, 1.0],
                BetaSchedule::constant(1.5),
                &TerminationRule::MaxIter(5),
                None,
                None,
            ),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn max_iter_rule_fires_at_the_cap() {
        let obj = unit_quadratic(1);
        let result = run(
            &obj,
            &[4.0],
            BetaSchedule::none(),
            &TerminationRule::MaxIter(3),
            None,
            None,
        )
        .unwrap();
        assert_eq!(result.iterations, 3);
    }

    #[test]
    fn successive_change_fires_on_stalled_iterates() {
        // The quadratic reaches its minimizer in one exact step; the next
        // step has zero change.
        let obj = unit_quadratic(2);
        let rule = TerminationRule::AnyOf(vec![
            TerminationRule::SuccessiveChange(1e-6),
            TerminationRule::MaxIter(100),
        ]);
        let result = run(&obj, &[1.0, -2.0], BetaSchedule::none(), &rule, None, None).unwrap();
        assert_eq!(
            result.termination_reason,
            TerminationReason::SuccessiveChangeBelowTol
        );
        assert!(result.iterations <= 2);
    }

    #[test]
    fn duality_gap_rule_threshold_comparison() {
        let mut trace = IterateTrace::default();
        trace.push(TraceRecord {
            k: 0,
            x: vec![0.0],
            f_value: 1.0,
            h_value: 1.0,
            step_norm: 0.0,
            residual: 1.0,
            gap: None,
            beta_used: 0.0,
            restart_flag: false,
        });
        trace.push(TraceRecord {
            k: 1,
            x: vec![0.5],
            f_value: 0.5,
            h_value: 0.5,
            step_norm: 0.5,
            residual: 0.5,
            gap: Some(GapValue {
                gap: 2e-6,
                feas_violation: 0.0,
            }),
            beta_used: 0.0,
            restart_flag: false,
        });
        // gap 2e-6 > tol 1e-6: does not fire.
        assert_eq!(
            check_termination(&TerminationRule::DualityGap(1e-6), &trace).unwrap(),
            None
        );
        assert_eq!(
            check_termination(&TerminationRule::DualityGap(1e-5), &trace).unwrap(),
            Some(TerminationReason::DualityGapBelowTol)
        );
    }

    #[test]
    fn duality_gap_without_hook_is_config_error() {
        let obj = unit_quadratic(1);
        let rule = TerminationRule::AnyOf(vec![
            TerminationRule::DualityGap(1e-6),
            TerminationRule::MaxIter(10),
        ]);
        assert!(matches!(
            run(&obj, &[1.0], BetaSchedule::none(), &rule, None, None),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn trace_indices_strictly_increase_from_zero() {
        let obj = unit_quadratic(2);
        let result = run(
            &obj,
            &[1.0, 1.0],
            BetaSchedule::fista(),
            &TerminationRule::MaxIter(10),
            None,
            None,
        )
        .unwrap();
        for (i, r) in result.trace.records().iter().enumerate() {
            assert_eq!(r.k, i);
        }
    }

    #[test]
    fn all_of_composite_requires_every_rule() {
        let obj = unit_quadratic(2);
        let rule = TerminationRule::AllOf(vec![
            TerminationRule::SuccessiveChange(1e-9),
            TerminationRule::Residual(1e-9),
        ]);
        let result = run(&obj, &[1.0, -1.0], BetaSchedule::none(), &rule, None, None).unwrap();
        assert_eq!(
            result.termination_reason,
            TerminationReason::AllRulesSatisfied
        );
    }
}
