//! LASSO: `F(x) = ½‖Ax - b‖² + λ‖x‖₁`.

use crate::error::{Error, Result};
use crate::linalg::{self, DenseMatrix};
use crate::objective::{CompositeObjective, Moduli};
use crate::proxops;

use super::{DualCertificate, MODULI_INFLATION, MODULI_MAX_ITER, MODULI_TOL};

/// One LASSO instance: design matrix, observations, regularization weight.
#[derive(Debug, Clone, PartialEq)]
pub struct LassoInstance {
    a: DenseMatrix,
    b: Vec<f64>,
    lambda: f64,
    seed: u64,
}

impl LassoInstance {
    pub fn new(a: DenseMatrix, b: Vec<f64>, lambda: f64, seed: u64) -> Result<Self> {
        if b.len() != a.rows() {
            return Err(Error::DimensionMismatch {
                expected: a.rows(),
                got: b.len(),
            });
        }
        if !lambda.is_finite() || lambda <= 0.0 {
            return Err(Error::InvalidArgument("lambda must be positive".into()));
        }
        if !b.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidArgument("b must be finite".into()));
        }
        Ok(Self { a, b, lambda, seed })
    }

    pub fn design(&self) -> &DenseMatrix {
        &self.a
    }

    pub fn observations(&self) -> &[f64] {
        &self.b
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Gradient modulus `λ_max(AᵀA)`, inflated against estimation error.
    pub fn moduli(&self) -> Result<Moduli> {
        let est = linalg::gram_spectral_norm(&self.a, MODULI_TOL, MODULI_MAX_ITER)?;
        Moduli::new(est.value * MODULI_INFLATION, 0.0)
    }

    /// `f(x) = ½‖Ax - b‖²`, `g(x) = λ‖x‖₁`, prox by soft thresholding.
    pub fn objective(&self) -> Result<CompositeObjective> {
        let moduli = self.moduli()?;
        let dim = self.a.cols();
        let (a1, b1) = (self.a.clone(), self.b.clone());
        let (a2, b2) = (self.a.clone(), self.b.clone());
        let lambda = self.lambda;
        CompositeObjective::new(
            dim,
            moduli,
            Box::new(move |x| {
                let ax = linalg::mat_vec(&a1, x).expect("dimension fixed at construction");
                0.5 * ax
                    .iter()
                    .zip(&b1)
                    .map(|(p, q)| (p - q) * (p - q))
                    .sum::<f64>()
            }),
            Box::new(move |x| {
                let ax = linalg::mat_vec(&a2, x).expect("dimension fixed at construction");
                let r: Vec<f64> = ax.iter().zip(&b2).map(|(p, q)| p - q).collect();
                linalg::mat_t_vec(&a2, &r).expect("dimension fixed at construction")
            }),
            Box::new(move |x| lambda * x.iter().map(|v| v.abs()).sum::<f64>()),
            Box::new(move |v, step| proxops::soft_threshold(v, lambda * step)),
        )
    }

    /// Duality certificate at `x`. The residual `Ax - b` is rescaled into
    /// the dual feasible set `{u : ‖Aᵀu‖∞ <= λ}` and evaluated on the dual
    /// objective `d(u) = -½‖u‖² - bᵀu`.
    pub fn duality_gap(&self, x: &[f64]) -> DualCertificate {
        let ax = linalg::mat_vec(&self.a, x).expect("dimension fixed at construction");
        let grad_h: Vec<f64> = ax.iter().zip(&self.b).map(|(p, q)| p - q).collect();
        let at_g = linalg::mat_t_vec(&self.a, &grad_h).expect("dimension fixed at construction");
        let inf_norm = at_g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let scale = (self.lambda / inf_norm).min(1.0);
        let u: Vec<f64> = grad_h.iter().map(|v| v * scale).collect();

        let dual = -0.5 * linalg::dot(&u, &u) - linalg::dot(&self.b, &u);
        let primal = 0.5 * linalg::dot(&grad_h, &grad_h)
            + self.lambda * x.iter().map(|v| v.abs()).sum::<f64>();
        DualCertificate {
            gap: (primal - dual).abs() / primal.max(1.0),
            feas_violation: 0.0,
            primal,
            dual,
            u,
        }
    }
}
