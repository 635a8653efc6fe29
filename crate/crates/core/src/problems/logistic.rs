//! ℓ1-regularized logistic regression with an unpenalized intercept:
//!
//! ```text
//! F(x̃, x₀) = Σᵢ log(1 + exp(-bᵢ(aᵢᵀx̃ + x₀))) + λ‖x̃‖₁
//! ```
//!
//! The intercept is carried as an explicit extra coordinate: the solver
//! variable is `x = (x̃, x₀) ∈ R^{n+1}` and the model matrix `D` has rows
//! `(aᵢᵀ 1)`, so the smooth part is `p(Dx)` with `p` the logistic loss.

use crate::error::{Error, Result};
use crate::linalg::{self, DenseMatrix};
use crate::objective::{CompositeObjective, Moduli};
use crate::proxops;

use super::{DualCertificate, MODULI_INFLATION, MODULI_MAX_ITER, MODULI_TOL};

/// One regularized logistic-regression instance.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticInstance {
    a: DenseMatrix,
    /// Labels in {-1, +1}, never all equal.
    b: Vec<f64>,
    lambda: f64,
    seed: u64,
    /// `A` with an appended all-ones intercept column.
    d: DenseMatrix,
}

impl LogisticInstance {
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
        if !b.iter().all(|&v| v == 1.0 || v == -1.0) {
            return Err(Error::InvalidArgument(
                "labels must be exactly +1 or -1".into(),
            ));
        }
        if b.iter().all(|&v| v == 1.0) || b.iter().all(|&v| v == -1.0) {
            return Err(Error::InvalidArgument(
                "labels must not all be the same".into(),
            ));
        }
        let (m, n) = (a.rows(), a.cols());
        let mut d_entries = Vec::with_capacity(m * (n + 1));
        for i in 0..m {
            d_entries.extend_from_slice(a.row(i));
            d_entries.push(1.0);
        }
        let d = DenseMatrix::new(m, n + 1, d_entries)?;
        Ok(Self {
            a,
            b,
            lambda,
            seed,
            d,
        })
    }

    pub fn design(&self) -> &DenseMatrix {
        &self.a
    }

    /// The intercept-augmented model matrix.
    pub fn model_matrix(&self) -> &DenseMatrix {
        &self.d
    }

    pub fn labels(&self) -> &[f64] {
        &self.b
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Gradient modulus `0.25 λ_max(DᵀD)`, inflated against estimation
    /// error.
    pub fn moduli(&self) -> Result<Moduli> {
        let est = linalg::gram_spectral_norm(&self.d, MODULI_TOL, MODULI_MAX_ITER)?;
        Moduli::new(0.25 * est.value * MODULI_INFLATION, 0.0)
    }

    pub fn objective(&self) -> Result<CompositeObjective> {
        let moduli = self.moduli()?;
        let dim = self.d.cols();
        let n_penalized = self.a.cols();
        let (d1, b1) = (self.d.clone(), self.b.clone());
        let (d2, b2) = (self.d.clone(), self.b.clone());
        let lambda = self.lambda;
        CompositeObjective::new(
            dim,
            moduli,
            Box::new(move |x| {
                let z = linalg::mat_vec(&d1, x).expect("dimension fixed at construction");
                z.iter().zip(&b1).map(|(&zi, &bi)| softplus(-bi * zi)).sum()
            }),
            Box::new(move |x| {
                let z = linalg::mat_vec(&d2, x).expect("dimension fixed at construction");
                let w: Vec<f64> = z
                    .iter()
                    .zip(&b2)
                    .map(|(&zi, &bi)| -bi * sigmoid_neg(bi * zi))
                    .collect();
                linalg::mat_t_vec(&d2, &w).expect("dimension fixed at construction")
            }),
            Box::new(move |x| lambda * x[..n_penalized].iter().map(|v| v.abs()).sum::<f64>()),
            Box::new(move |v, step| {
                let mut out = proxops::soft_threshold(&v[..n_penalized], lambda * step)?;
                out.push(v[n_penalized]); // intercept is unpenalized
                Ok(out)
            }),
        )
    }

    /// Duality certificate at `x`. The loss gradient `∇p(Dx)` is rescaled
    /// into `{u : ‖Aᵀu‖∞ <= λ}` and evaluated on the entropy-like dual
    /// objective; the equality constraint `eᵀu = 0` of the dual is reported
    /// as the weighted violation `50|eᵀu| / max(‖u‖, 1)`.
    pub fn duality_gap(&self, x: &[f64]) -> Result<DualCertificate> {
        let z = linalg::mat_vec(&self.d, x).expect("dimension fixed at construction");
        let gp: Vec<f64> = z
            .iter()
            .zip(&self.b)
            .map(|(&zi, &bi)| -bi * sigmoid_neg(bi * zi))
            .collect();
        let at_g = linalg::mat_t_vec(&self.a, &gp).expect("dimension fixed at construction");
        let inf_norm = at_g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let scale = (self.lambda / inf_norm).min(1.0);
        let u: Vec<f64> = gp.iter().map(|v| v * scale).collect();

        let mut dual = 0.0;
        for (&ui, &bi) in u.iter().zip(&self.b) {
            let w = bi * ui;
            if !(-1.0 - 1e-12..=1e-12).contains(&w) {
                return Err(Error::Numerical(format!(
                    "dual point left the domain: b_i u_i = {w}"
                )));
            }
            let w = w.clamp(-1.0, 0.0);
            dual -= xlnx(-w) + xlnx(1.0 + w);
        }

        let primal = z
            .iter()
            .zip(&self.b)
            .map(|(&zi, &bi)| softplus(-bi * zi))
            .sum::<f64>()
            + self.lambda * x[..self.a.cols()].iter().map(|v| v.abs()).sum::<f64>();

        let e_u: f64 = u.iter().sum();
        let u_norm = linalg::norm(&u);
        Ok(DualCertificate {
            gap: (primal - dual).abs() / primal.max(1.0),
            feas_violation: 50.0 * e_u.abs() / u_norm.max(1.0),
            primal,
            dual,
            u,
        })
    }
}

/// `log(1 + exp(t))` without overflow for large `t`.
#[inline]
fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

/// `1 / (1 + exp(t))` evaluated on the non-overflowing branch.
#[inline]
fn sigmoid_neg(t: f64) -> f64 {
    if t > 0.0 {
        let e = (-t).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + t.exp())
    }
}

/// `x ln x` with the `0 ln 0 = 0` convention.
#[inline]
fn xlnx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}
