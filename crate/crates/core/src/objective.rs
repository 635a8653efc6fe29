//! The composite objective `F = f + g` with its gradient moduli, the
//! forward-backward step, and the prox-gradient stationarity residual.

use crate::error::{Error, Result};
use crate::linalg;

/// Gradient moduli of the smooth part under the convex/concave split
/// `f = f₁ - f₂` (both convex): `lipschitz` bounds `∇f₁` (and hence `∇f`)
/// and `concavity` bounds `∇f₂`. Convex problems have `concavity = 0`.
/// Always `lipschitz >= concavity >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moduli {
    pub lipschitz: f64,
    pub concavity: f64,
}

impl Moduli {
    pub fn new(lipschitz: f64, concavity: f64) -> Result<Self> {
        if !lipschitz.is_finite() || !concavity.is_finite() {
            return Err(Error::InvalidArgument("moduli must be finite".into()));
        }
        if lipschitz <= 0.0 {
            return Err(Error::InvalidArgument(
                "lipschitz modulus must be positive".into(),
            ));
        }
        if concavity < 0.0 || concavity > lipschitz {
            return Err(Error::InvalidArgument(format!(
                "moduli must satisfy lipschitz >= concavity >= 0, got ({lipschitz}, {concavity})"
            )));
        }
        Ok(Self {
            lipschitz,
            concavity,
        })
    }

    /// Admissible supremum for extrapolation coefficients:
    /// `sqrt(L / (L + l))`. Equals 1 in the convex case (`l = 0`).
    pub fn beta_threshold(&self) -> f64 {
        (self.lipschitz / (self.lipschitz + self.concavity)).sqrt()
    }

    /// Admissible range `[ (L+l)/2 * beta_bar², L/2 ]` for the Lyapunov
    /// weight given a bound `beta_bar` on the extrapolation coefficients.
    pub fn alpha_window(&self, beta_bar: f64) -> Result<(f64, f64)> {
        if !(0.0..=self.beta_threshold()).contains(&beta_bar) {
            return Err(Error::InvalidArgument(format!(
                "beta_bar {beta_bar} outside [0, {}]",
                self.beta_threshold()
            )));
        }
        let lower = 0.5 * (self.lipschitz + self.concavity) * beta_bar * beta_bar;
        let upper = 0.5 * self.lipschitz;
        Ok((lower, upper))
    }
}

type ValueFn = Box<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type GradFn = Box<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
type ProxFn = Box<dyn Fn(&[f64], f64) -> Result<Vec<f64>> + Send + Sync>;

/// Callable bundle for `F = f + g`: smooth value and gradient, nonsmooth
/// value (may return `+inf` outside `dom g`), proximal map of `g`, and the
/// gradient moduli. Immutable after construction and shareable across
/// threads.
pub struct CompositeObjective {
    dim: usize,
    moduli: Moduli,
    smooth_value: ValueFn,
    smooth_grad: GradFn,
    nonsmooth_value: ValueFn,
    prox: ProxFn,
}

/// Output of one forward-backward step taken from the extrapolated point.
#[derive(Debug, Clone)]
pub struct StepResult {
    /// The new iterate, always in `dom g`.
    pub x_next: Vec<f64>,
    /// Smooth gradient evaluated at the extrapolated point.
    pub f_grad_at_y: Vec<f64>,
    /// `F(x_next)`, computed eagerly for the per-iteration trace.
    pub objective_at_next: f64,
}

impl CompositeObjective {
    pub fn new(
        dim: usize,
        moduli: Moduli,
        smooth_value: ValueFn,
        smooth_grad: GradFn,
        nonsmooth_value: ValueFn,
        prox: ProxFn,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        Ok(Self {
            dim,
            moduli,
            smooth_value,
            smooth_grad,
            nonsmooth_value,
            prox,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn moduli(&self) -> Moduli {
        self.moduli
    }

    pub fn smooth_value(&self, x: &[f64]) -> f64 {
        (self.smooth_value)(x)
    }

    pub fn smooth_grad(&self, x: &[f64]) -> Vec<f64> {
        (self.smooth_grad)(x)
    }

    /// `g(x)`; returns `+inf` outside `dom g`.
    pub fn nonsmooth_value(&self, x: &[f64]) -> f64 {
        (self.nonsmooth_value)(x)
    }

    pub fn prox(&self, v: &[f64], step: f64) -> Result<Vec<f64>> {
        (self.prox)(v, step)
    }

    /// `F(x) = f(x) + g(x)`.
    pub fn value(&self, x: &[f64]) -> f64 {
        self.smooth_value(x) + self.nonsmooth_value(x)
    }

    /// Whether `x` carries a finite nonsmooth value.
    pub fn in_domain(&self, x: &[f64]) -> bool {
        x.len() == self.dim
            && x.iter().all(|v| v.is_finite())
            && self.nonsmooth_value(x).is_finite()
    }

    /// One forward-backward step from `y`:
    /// `x_next = prox_{g/L}( y - (1/L) ∇f(y) )`.
    pub fn forward_backward_step(&self, y: &[f64]) -> Result<StepResult> {
        if y.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: y.len(),
            });
        }
        let grad = self.smooth_grad(y);
        if !grad.iter().all(|v| v.is_finite()) {
            return Err(Error::Numerical(format!(
                "non-finite gradient at y = {:?}",
                clip_for_message(y)
            )));
        }
        let lip = self.moduli.lipschitz;
        let forward: Vec<f64> = y.iter().zip(&grad).map(|(yi, gi)| yi - gi / lip).collect();
        let x_next = self.prox(&forward, 1.0 / lip)?;
        let objective_at_next = self.value(&x_next);
        Ok(StepResult {
            x_next,
            f_grad_at_y: grad,
            objective_at_next,
        })
    }

    /// Prox-gradient residual `‖prox_{g/L}(x - (1/L)∇f(x)) - x‖`; zero
    /// exactly at stationary points of `F`.
    pub fn stationarity_residual(&self, x: &[f64]) -> Result<f64> {
        let step = self.forward_backward_step(x)?;
        Ok(linalg::dist(&step.x_next, x))
    }
}

impl std::fmt::Debug for CompositeObjective {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CompositeObjective")
            .field("dim", &self.dim)
            .field("moduli", &self.moduli)
            .finish_non_exhaustive()
    }
}

fn clip_for_message(x: &[f64]) -> Vec<f64> {
    x.iter().take(8).copied().collect()
}
