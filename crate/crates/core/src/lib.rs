//! Proximal gradient methods with extrapolation and restart for composite
//! minimization problems of the form
//!
//! ```text
//! minimize  F(x) = f(x) + g(x)
//! ```
//!
//! where `f` is smooth (possibly nonconvex) with a Lipschitz gradient and
//! `g` is proper closed convex with an easy proximal map. The iteration is
//!
//! ```text
//! y_k     = x_k + beta_k (x_k - x_{k-1})
//! x_{k+1} = prox_{g/L}( y_k - (1/L) grad f(y_k) )
//! ```
//!
//! with a pluggable schedule for the extrapolation coefficients `beta_k`:
//! a constant value, the FISTA recurrence, and FISTA with fixed and/or
//! adaptive (gradient-based) restart.
//!
//! The crate ships three ready-made problem families (LASSO, ℓ1-regularized
//! logistic regression, and quadratic programming over a scaled simplex)
//! together with duality-gap certificates, reproducible random instance
//! generators, and a diagnostics layer (Lyapunov-sequence audits, empirical
//! linear-rate fitting) used to study convergence behavior.

pub mod diagnostics;
pub mod error;
pub mod linalg;
pub mod objective;
pub mod problems;
pub mod proxops;
pub mod solver;

pub use error::Error;
pub use linalg::{DenseMatrix, EigenEstimate};
pub use objective::{CompositeObjective, Moduli, StepResult};
pub use solver::{
    run, BetaSchedule, GapValue, IterateTrace, SolveResult, TerminationReason, TerminationRule,
    TraceRecord,
};
