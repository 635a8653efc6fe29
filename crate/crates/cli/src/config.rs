//! Experiment configuration and CLI-level errors.

use std::path::PathBuf;

use proxgrad::solver::{BetaSchedule, TerminationRule};

/// Errors surfaced to the binary, mapped onto exit codes there.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<proxgrad::Error> for CliError {
    fn from(e: proxgrad::Error) -> Self {
        match e {
            proxgrad::Error::InvalidArgument(_)
            | proxgrad::Error::DimensionMismatch { .. }
            | proxgrad::Error::Config(_)
            | proxgrad::Error::InsufficientData(_) => CliError::Usage(e.to_string()),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Lasso,
    Logistic,
    Qp,
}

impl Family {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "lasso" => Ok(Family::Lasso),
            "logistic" => Ok(Family::Logistic),
            "qp" => Ok(Family::Qp),
            other => Err(CliError::Usage(format!(
                "unknown family {other:?} (expected lasso, logistic or qp)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Lasso => "lasso",
            Family::Logistic => "logistic",
            Family::Qp => "qp",
        }
    }
}

/// Extrapolation schedule requested on the command line. `ConstantFrac`
/// resolves against the instance's own threshold `sqrt(L/(L+l))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScheduleSpec {
    /// Plain proximal gradient (`beta = 0`).
    None,
    Constant(f64),
    ConstantFrac(f64),
    Fista,
    FistaFixedRestart,
    FistaAdaptiveRestart,
    FistaBothRestarts,
}

impl ScheduleSpec {
    /// Parses the 1-2 token form used by `--schedule`, e.g. `none`,
    /// `fista-both`, `constant 0.3`, `constant-frac 0.98`.
    pub fn parse(tokens: &[String]) -> Result<Self, CliError> {
        let usage = || {
            CliError::Usage(
                "expected --schedule none|fista|fista-r|fista-ar|fista-both|constant <beta>|constant-frac <frac>"
                    .into(),
            )
        };
        let (head, param) = match tokens {
            [head] => (head.as_str(), None),
            [head, value] => {
                let v: f64 = value
                    .parse()
                    .map_err(|_| CliError::Usage(format!("bad schedule parameter {value:?}")))?;
                (head.as_str(), Some(v))
            }
            _ => return Err(usage()),
        };
        match (head, param) {
            ("none", None) => Ok(ScheduleSpec::None),
            ("fista", None) => Ok(ScheduleSpec::Fista),
            ("fista-r", None) => Ok(ScheduleSpec::FistaFixedRestart),
            ("fista-ar", None) => Ok(ScheduleSpec::FistaAdaptiveRestart),
            ("fista-both", None) => Ok(ScheduleSpec::FistaBothRestarts),
            ("constant", Some(beta)) => Ok(ScheduleSpec::Constant(beta)),
            ("constant-frac", Some(frac)) => Ok(ScheduleSpec::ConstantFrac(frac)),
            _ => Err(usage()),
        }
    }

    pub fn build(&self, threshold: f64, restart_interval: usize) -> Result<BetaSchedule, CliError> {
        match *self {
            ScheduleSpec::None => Ok(BetaSchedule::none()),
            ScheduleSpec::Constant(beta) => Ok(BetaSchedule::constant(beta)),
            ScheduleSpec::ConstantFrac(frac) => {
                if !(0.0..=1.0).contains(&frac) {
                    return Err(CliError::Usage(format!(
                        "constant-frac must lie in [0, 1], got {frac}"
                    )));
                }
                Ok(BetaSchedule::constant(frac * threshold))
            }
            ScheduleSpec::Fista => Ok(BetaSchedule::fista()),
            ScheduleSpec::FistaFixedRestart => {
                Ok(BetaSchedule::fista_fixed_restart(restart_interval))
            }
            ScheduleSpec::FistaAdaptiveRestart => Ok(BetaSchedule::fista_adaptive_restart()),
            ScheduleSpec::FistaBothRestarts => {
                Ok(BetaSchedule::fista_both_restarts(restart_interval))
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            ScheduleSpec::None => "none".into(),
            ScheduleSpec::Constant(beta) => format!("constant {beta}"),
            ScheduleSpec::ConstantFrac(frac) => format!("constant-frac {frac}"),
            ScheduleSpec::Fista => "fista".into(),
            ScheduleSpec::FistaFixedRestart => "fista-r".into(),
            ScheduleSpec::FistaAdaptiveRestart => "fista-ar".into(),
            ScheduleSpec::FistaBothRestarts => "fista-both".into(),
        }
    }

    pub fn is_fista_variant(&self) -> bool {
        matches!(
            self,
            ScheduleSpec::Fista
                | ScheduleSpec::FistaFixedRestart
                | ScheduleSpec::FistaAdaptiveRestart
                | ScheduleSpec::FistaBothRestarts
        )
    }
}

/// Full configuration of one experiment run.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub family: Family,
    /// Sample count for the regression families.
    pub m: usize,
    /// Variable count (the QP dimension for the QP family).
    pub n: usize,
    /// Ground-truth sparsity for the regression families.
    pub sparsity: usize,
    pub lambda: f64,
    /// Optional override of the generated simplex sum (QP only).
    pub simplex_sum: Option<f64>,
    pub schedule: ScheduleSpec,
    /// Fixed-restart interval K.
    pub restart_interval: usize,
    /// Tolerance of the family's convergence test (duality gap for the
    /// convex families, relative successive change for the QP).
    pub tol: f64,
    pub max_iter: usize,
    /// Lyapunov weight; `None` uses the admissible-window midpoint.
    pub alpha: Option<f64>,
    pub seed: u64,
    /// Batch size for the QP comparison table.
    pub instances: usize,
    pub out_dir: PathBuf,
    pub save_instance: bool,
    pub load_instance: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn desk(family: Family) -> Self {
        let (m, n, sparsity) = match family {
            Family::Qp => (0, 200, 0),
            _ => (50, 500, 5),
        };
        Self {
            family,
            m,
            n,
            sparsity,
            lambda: 5.0,
            simplex_sum: None,
            schedule: ScheduleSpec::FistaBothRestarts,
            restart_interval: 500,
            tol: 1e-6,
            max_iter: 5000,
            alpha: None,
            seed: 42,
            instances: 10,
            out_dir: PathBuf::from("proxgrad-out"),
            save_instance: false,
            load_instance: None,
        }
    }

    pub fn paper(family: Family) -> Self {
        let mut cfg = Self::desk(family);
        match family {
            Family::Qp => cfg.n = 2000,
            _ => {
                cfg.m = 300;
                cfg.n = 3000;
                cfg.sparsity = 30;
            }
        }
        cfg
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.max_iter == 0 {
            return Err(CliError::Usage("max-iter must be >= 1".into()));
        }
        if self.restart_interval == 0 {
            return Err(CliError::Usage("K must be >= 1".into()));
        }
        if !self.tol.is_finite() || self.tol <= 0.0 {
            return Err(CliError::Usage("tol must be positive".into()));
        }
        if self.family != Family::Qp {
            if self.m == 0 || self.n == 0 {
                return Err(CliError::Usage("dims must be positive".into()));
            }
            if self.sparsity > self.n {
                return Err(CliError::Usage("sparsity cannot exceed n".into()));
            }
            if !self.lambda.is_finite() || self.lambda <= 0.0 {
                return Err(CliError::Usage("lambda must be positive".into()));
            }
        } else if self.n == 0 {
            return Err(CliError::Usage("n must be positive".into()));
        }
        if self.instances == 0 {
            return Err(CliError::Usage("instances must be >= 1".into()));
        }
        Ok(())
    }

    /// The family's stopping protocol: its convergence test plus the
    /// iteration cap.
    pub fn termination_rule(&self) -> TerminationRule {
        let convergence = match self.family {
            Family::Lasso | Family::Logistic => TerminationRule::DualityGap(self.tol),
            Family::Qp => TerminationRule::SuccessiveChange(self.tol),
        };
        TerminationRule::AnyOf(vec![convergence, TerminationRule::MaxIter(self.max_iter)])
    }
}

/// Splices the `key = value` lines of a `--config` file into the argument
/// list right after the subcommand. Keys whose flag is already present on
/// the command line are skipped, so explicit flags override the file.
/// Values with several tokens (e.g. `schedule = constant-frac 0.98`)
/// expand to separate arguments; single-letter keys map to short flags.
pub fn expand_config_args(raw: Vec<String>) -> Result<Vec<String>, CliError> {
    let Some(pos) = raw.iter().position(|a| a == "--config") else {
        return Ok(raw);
    };
    let path = raw
        .get(pos + 1)
        .ok_or_else(|| CliError::Usage("--config requires a path".into()))?;
    let text = std::fs::read_to_string(path)?;

    let mut injected = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("malformed config line: {line:?}")))?;
        let key = key.trim();
        let flag = if key.len() == 1 {
            format!("-{key}")
        } else {
            format!("--{key}")
        };
        if raw.contains(&flag) {
            continue;
        }
        injected.push(flag);
        for token in value.split_whitespace() {
            injected.push(token.to_string());
        }
    }

    let subcommand_idx = 1 + raw
        .iter()
        .skip(1)
        .position(|a| !a.starts_with('-'))
        .ok_or_else(|| CliError::Usage("expected a subcommand".into()))?;
    let mut out = Vec::with_capacity(raw.len() + injected.len());
    out.extend(raw[..=subcommand_idx].iter().cloned());
    out.extend(injected);
    out.extend(raw[subcommand_idx + 1..].iter().cloned());
    Ok(out)
}
