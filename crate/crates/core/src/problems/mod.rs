//! The three benchmark problem families as [`CompositeObjective`]
//! constructors, with dual certificates, reproducible random instance
//! generators, and a plain-text instance format for bit-exact replay.

mod format;
mod generate;
mod lasso;
mod logistic;
mod qp;

pub use format::{instance_from_text, instance_to_text};
pub use generate::{
    derive_seed, gen_lasso, gen_lasso_with_lambda, gen_logistic, gen_logistic_with_lambda, gen_qp,
    GENERATOR_VERSION,
};
pub use lasso::LassoInstance;
pub use logistic::LogisticInstance;
pub use qp::SimplexQpInstance;

use crate::error::Result;
use crate::objective::CompositeObjective;
use crate::solver::GapValue;

/// Tolerance for the power-iteration moduli estimates. The iteration
/// budget is sized for symmetric Gaussian instances whose edge eigenvalue
/// gaps occasionally come out small.
pub(crate) const MODULI_TOL: f64 = 1e-8;
pub(crate) const MODULI_MAX_ITER: usize = 150_000;
/// Estimated moduli are inflated by `1 + 10*tol` before use so that `1/L`
/// stays a valid step size despite estimation error.
pub(crate) const MODULI_INFLATION: f64 = 1.0 + 10.0 * MODULI_TOL;

/// Components of a duality certificate at a primal point.
#[derive(Debug, Clone)]
pub struct DualCertificate {
    /// Relative primal-dual gap `|F(x) - d(u)| / max(F(x), 1)`.
    pub gap: f64,
    /// Weighted dual feasibility violation (zero for problems whose dual
    /// has no equality constraint).
    pub feas_violation: f64,
    /// Primal objective `F(x)`.
    pub primal: f64,
    /// Dual objective `d(u)` at the scaled dual point.
    pub dual: f64,
    /// The feasible dual point the certificate was evaluated at.
    pub u: Vec<f64>,
}

impl DualCertificate {
    pub fn as_gap_value(&self) -> GapValue {
        GapValue {
            gap: self.gap,
            feas_violation: self.feas_violation,
        }
    }
}

/// A generated or loaded problem instance of any family.
#[derive(Debug, Clone, PartialEq)]
pub enum ProblemInstance {
    Lasso(LassoInstance),
    Logistic(LogisticInstance),
    SimplexQp(SimplexQpInstance),
}

impl ProblemInstance {
    pub fn family(&self) -> &'static str {
        match self {
            ProblemInstance::Lasso(_) => "lasso",
            ProblemInstance::Logistic(_) => "logistic",
            ProblemInstance::SimplexQp(_) => "qp",
        }
    }

    /// Dimension of the solver variable (includes the intercept coordinate
    /// for logistic regression).
    pub fn dim(&self) -> usize {
        match self {
            ProblemInstance::Lasso(p) => p.design().cols(),
            ProblemInstance::Logistic(p) => p.design().cols() + 1,
            ProblemInstance::SimplexQp(p) => p.matrix().rows(),
        }
    }

    pub fn objective(&self) -> Result<CompositeObjective> {
        match self {
            ProblemInstance::Lasso(p) => p.objective(),
            ProblemInstance::Logistic(p) => p.objective(),
            ProblemInstance::SimplexQp(p) => p.objective(),
        }
    }

    /// Whether this family exposes a dual certificate.
    pub fn has_dual(&self) -> bool {
        !matches!(self, ProblemInstance::SimplexQp(_))
    }

    pub fn certificate(&self, x: &[f64]) -> Option<DualCertificate> {
        match self {
            ProblemInstance::Lasso(p) => Some(p.duality_gap(x)),
            ProblemInstance::Logistic(p) => Some(p.duality_gap(x).expect(
                "sigmoid-derived dual points stay inside the dual domain for finite iterates",
            )),
            ProblemInstance::SimplexQp(_) => None,
        }
    }

    pub fn gap_value(&self, x: &[f64]) -> Option<GapValue> {
        self.certificate(x).map(|c| c.as_gap_value())
    }

    /// Start point used by the experiment protocols: the origin where it
    /// is in `dom g`, otherwise its Euclidean projection onto the domain
    /// (the uniform point of the simplex for the QP family).
    pub fn default_start(&self) -> Vec<f64> {
        match self {
            ProblemInstance::Lasso(_) | ProblemInstance::Logistic(_) => vec![0.0; self.dim()],
            ProblemInstance::SimplexQp(p) => {
                let n = p.matrix().rows();
                vec![p.simplex_sum() / n as f64; n]
            }
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            ProblemInstance::Lasso(p) => p.seed(),
            ProblemInstance::Logistic(p) => p.seed(),
            ProblemInstance::SimplexQp(p) => p.seed(),
        }
    }
}
