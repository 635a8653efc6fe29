//! Quadratic programming over a scaled simplex:
//!
//! ```text
//! minimize ½ xᵀAx - bᵀx   subject to  eᵀx = s, x ≥ 0
//! ```
//!
//! with `A` symmetric but not necessarily positive semidefinite. The
//! nonsmooth part is the indicator of the simplex, whose prox is the
//! Euclidean projection regardless of the step size.

use crate::error::{Error, Result};
use crate::linalg::{self, DenseMatrix};
use crate::objective::{CompositeObjective, Moduli};
use crate::proxops;

use super::{MODULI_INFLATION, MODULI_MAX_ITER, MODULI_TOL};

/// One simplex-constrained QP instance with its derived gradient moduli
/// `lipschitz = max(λ_max(A), |λ_min(A)|)` and `concavity = |λ_min(A)|`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexQpInstance {
    a: DenseMatrix,
    b: Vec<f64>,
    s: f64,
    seed: u64,
    moduli: Moduli,
}

impl SimplexQpInstance {
    /// Validates symmetry and computes the moduli from the extreme
    /// eigenvalues of `A`.
    pub fn new(a: DenseMatrix, b: Vec<f64>, s: f64, seed: u64) -> Result<Self> {
        if b.len() != a.rows() {
            return Err(Error::DimensionMismatch {
                expected: a.rows(),
                got: b.len(),
            });
        }
        if !s.is_finite() || s <= 0.0 {
            return Err(Error::InvalidArgument("s must be positive".into()));
        }
        let (hi, lo) = linalg::sym_extreme_eigs(&a, MODULI_TOL, MODULI_MAX_ITER)?;
        let lipschitz = hi.value.max(lo.value.abs()) * MODULI_INFLATION;
        let concavity = lo.value.abs() * MODULI_INFLATION;
        // lipschitz >= concavity holds by construction; equality when the
        // spectrum is dominated by its negative end.
        let moduli = Moduli::new(lipschitz, concavity.min(lipschitz))?;
        Ok(Self {
            a,
            b,
            s,
            seed,
            moduli,
        })
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.a
    }

    pub fn linear_term(&self) -> &[f64] {
        &self.b
    }

    pub fn simplex_sum(&self) -> f64 {
        self.s
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn moduli(&self) -> Moduli {
        self.moduli
    }

    pub fn objective(&self) -> Result<CompositeObjective> {
        let dim = self.a.rows();
        let (a1, b1) = (self.a.clone(), self.b.clone());
        let (a2, b2) = (self.a.clone(), self.b.clone());
        let s = self.s;
        CompositeObjective::new(
            dim,
            self.moduli,
            Box::new(move |x| {
                let ax = linalg::mat_vec(&a1, x).expect("dimension fixed at construction");
                0.5 * linalg::dot(x, &ax) - linalg::dot(&b1, x)
            }),
            Box::new(move |x| {
                let ax = linalg::mat_vec(&a2, x).expect("dimension fixed at construction");
                ax.iter().zip(&b2).map(|(p, q)| p - q).collect()
            }),
            Box::new(move |x| {
                let sum: f64 = x.iter().sum();
                if x.iter().all(|&v| v >= 0.0) && (sum - s).abs() <= 1e-12 * s {
                    0.0
                } else {
                    f64::INFINITY
                }
            }),
            Box::new(move |v, _step| proxops::project_simplex(v, s)),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gradient_at_origin_is_minus_b() {
        let a = DenseMatrix::new(2, 2, vec![2.0, 0.0, 0.0, -1.0]).unwrap();
        let inst = SimplexQpInstance::new(a, vec![0.3, -0.4], 1.0, 0).unwrap();
        let obj = inst.objective().unwrap();
        assert_eq!(obj.smooth_grad(&[0.0, 0.0]), vec![-0.3, 0.4]);
    }

    #[test]
    fn moduli_from_eigenvalues_by_inspection() {
        // A = diag(2, -1): lipschitz 2, concavity 1, threshold sqrt(2/3).
        let a = DenseMatrix::new(2, 2, vec![2.0, 0.0, 0.0, -1.0]).unwrap();
        let inst = SimplexQpInstance::new(a, vec![0.0, 0.0], 1.0, 0).unwrap();
        let m = inst.moduli();
        assert_relative_eq!(m.lipschitz, 2.0, max_relative = 1e-6);
        assert_relative_eq!(m.concavity, 1.0, max_relative = 1e-6);
        assert_relative_eq!(
            m.beta_threshold(),
            (2.0f64 / 3.0).sqrt(),
            max_relative = 1e-6
        );
    }

    #[test]
    fn prox_output_is_always_feasible() {
        let a = DenseMatrix::new(3, 3, vec![1.0, 0.2, 0.0, 0.2, -0.5, 0.1, 0.0, 0.1, 0.3]).unwrap();
        let inst = SimplexQpInstance::new(a, vec![1.0, -1.0, 0.5], 2.0, 0).unwrap();
        let obj = inst.objective().unwrap();
        for v in [
            vec![5.0, -3.0, 0.1],
            vec![-1.0, -1.0, -1.0],
            vec![0.0, 0.0, 0.0],
        ] {
            let p = obj.prox(&v, 0.37).unwrap();
            assert!(p.iter().all(|&x| x >= 0.0));
            assert!((p.iter().sum::<f64>() - 2.0).abs() <= 1e-12 * 2.0);
            assert_eq!(obj.nonsmooth_value(&p), 0.0);
        }
    }

    #[test]
    fn gradient_matches_central_differences() {
        let inst = super::super::gen_qp(9, 3).unwrap();
        let obj = inst.objective().unwrap();
        let x: Vec<f64> = (0..9).map(|i| 0.1 * i as f64).collect();
        let g = obj.smooth_grad(&x);
        let h = 1e-6;
        for i in 0..9 {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[i] += h;
            xm[i] -= h;
            let fd = (obj.smooth_value(&xp) - obj.smooth_value(&xm)) / (2.0 * h);
            let tol = 1e-5f64.max(1e-5 * g[i].abs());
            assert!((g[i] - fd).abs() <= tol);
        }
    }
}
