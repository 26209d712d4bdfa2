//! Core data types: datasets, joint parameters, sparsity budgets, solver
//! configuration, theory constants, and ground truth for synthetic runs.
//!
//! The model is `y = W^T x + e` with `e ~ N(0, Sigma)` and precision matrix
//! `Omega = Sigma^{-1}`; an estimate is the pair `(W, Omega)` with `W` of
//! shape d x m and `Omega` of shape m x m.

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// A supervised sample: predictors `X` (n x d) and responses `Y` (n x m),
/// rows paired by index.
#[derive(Debug, Clone)]
pub struct Dataset {
    x: DenseMatrix,
    y: DenseMatrix,
}

impl Dataset {
    /// # Errors
    ///
    /// `DimensionMismatch` if `X` and `Y` disagree on the number of rows.
    pub fn new(x: DenseMatrix, y: DenseMatrix) -> Result<Self> {
        if x.rows() != y.rows() {
            return Err(Error::dim(format!(
                "X has {} rows but Y has {}",
                x.rows(),
                y.rows()
            )));
        }
        Ok(Dataset { x, y })
    }

    pub fn n(&self) -> usize {
        self.x.rows()
    }

    pub fn d(&self) -> usize {
        self.x.cols()
    }

    pub fn m(&self) -> usize {
        self.y.cols()
    }

    pub fn x(&self) -> &DenseMatrix {
        &self.x
    }

    pub fn y(&self) -> &DenseMatrix {
        &self.y
    }

    /// New dataset holding the given rows, in the given order.
    pub fn row_subset(&self, rows: &[usize]) -> Result<Dataset> {
        if rows.is_empty() {
            return Err(Error::invalid("row subset is empty"));
        }
        for &r in rows {
            if r >= self.n() {
                return Err(Error::invalid(format!(
                    "row index {r} out of bounds for {} rows",
                    self.n()
                )));
            }
        }
        let x = DenseMatrix::from_fn(rows.len(), self.d(), |i, j| self.x.get(rows[i], j))?;
        let y = DenseMatrix::from_fn(rows.len(), self.m(), |i, j| self.y.get(rows[i], j))?;
        Dataset::new(x, y)
    }
}

/// A regression/precision estimate pair `(W, Omega)`.
#[derive(Debug, Clone)]
pub struct JointParams {
    w: DenseMatrix,
    omega: DenseMatrix,
}

impl JointParams {
    /// # Errors
    ///
    /// `DimensionMismatch` if `W` has a different column count than `Omega`'s
    /// order; `NotSquare`/`NotSymmetric` if `Omega` is not symmetric.
    pub fn new(w: DenseMatrix, omega: DenseMatrix) -> Result<Self> {
        omega.check_symmetric()?;
        if w.cols() != omega.rows() {
            return Err(Error::dim(format!(
                "W is {}x{} but Omega has order {}",
                w.rows(),
                w.cols(),
                omega.rows()
            )));
        }
        Ok(JointParams { w, omega })
    }

    pub fn w(&self) -> &DenseMatrix {
        &self.w
    }

    pub fn omega(&self) -> &DenseMatrix {
        &self.omega
    }

    pub fn into_parts(self) -> (DenseMatrix, DenseMatrix) {
        (self.w, self.omega)
    }
}

/// Checks that a parameter pair is shaped for a dataset: `W` is d x m and
/// `Omega` is m x m.
pub fn validate(data: &Dataset, params: &JointParams) -> Result<()> {
    if params.w().rows() != data.d() || params.w().cols() != data.m() {
        return Err(Error::dim(format!(
            "W is {}x{} but the dataset has d = {}, m = {}",
            params.w().rows(),
            params.w().cols(),
            data.d(),
            data.m()
        )));
    }
    Ok(())
}

/// Hard-thresholding budgets: keep at most `s1` entries of `W` and `s2`
/// entries of `Omega` (diagonal always included, so `s2 >= m`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SparsityBudget {
    s1: usize,
    s2: usize,
}

impl SparsityBudget {
    /// # Errors
    ///
    /// `BudgetOutOfRange` if either budget is zero.
    pub fn new(s1: usize, s2: usize) -> Result<Self> {
        if s1 == 0 || s2 == 0 {
            return Err(Error::budget(format!("budgets must be positive, got ({s1}, {s2})")));
        }
        Ok(SparsityBudget { s1, s2 })
    }

    pub fn s1(&self) -> usize {
        self.s1
    }

    pub fn s2(&self) -> usize {
        self.s2
    }

    /// Checks the budgets against problem dimensions: `1 <= s1 <= d*m` and
    /// `m <= s2 <= m*m`.
    pub fn validate_for(&self, d: usize, m: usize) -> Result<()> {
        if self.s1 > d * m {
            return Err(Error::budget(format!(
                "s1 = {} exceeds the {}x{} coefficient grid",
                self.s1, d, m
            )));
        }
        if self.s2 < m {
            return Err(Error::budget(format!(
                "s2 = {} cannot cover the {m} diagonal entries of Omega",
                self.s2
            )));
        }
        if self.s2 > m * m {
            return Err(Error::budget(format!("s2 = {} exceeds {m}x{m}", self.s2)));
        }
        Ok(())
    }

    /// Clamps both budgets into the ranges accepted by
    /// [`SparsityBudget::validate_for`].
    pub fn clamped_to(&self, d: usize, m: usize) -> SparsityBudget {
        SparsityBudget {
            s1: self.s1.min(d * m).max(1),
            s2: self.s2.clamp(m, m * m),
        }
    }
}

/// Gradient-descent solver settings.
#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    /// Iteration count `T` (also the number of data slices when resampling).
    pub iterations: usize,
    pub budget: SparsityBudget,
    /// Step size for the `W` update.
    pub eta1: f64,
    /// Step size for the `Omega` update (before any halving).
    pub eta2: f64,
    /// Use disjoint data slices per iteration instead of the full sample.
    pub resample: bool,
    /// Early-stop threshold on the relative iterate change; `0` disables
    /// early stopping.
    pub rel_tol: f64,
    /// Maximum number of `eta2` halvings per iteration while the `Omega`
    /// iterate fails its positive-definiteness check.
    pub backtrack_max: usize,
}

impl SolverConfig {
    pub const DEFAULT_BACKTRACK_MAX: usize = 30;

    /// # Errors
    ///
    /// `InvalidValue` for a zero iteration count, non-positive or non-finite
    /// step sizes, or a negative/non-finite `rel_tol`.
    pub fn new(
        iterations: usize,
        budget: SparsityBudget,
        eta1: f64,
        eta2: f64,
        resample: bool,
        rel_tol: f64,
        backtrack_max: usize,
    ) -> Result<Self> {
        if iterations == 0 {
            return Err(Error::invalid("iterations must be at least 1"));
        }
        if !(eta1.is_finite() && eta1 > 0.0) {
            return Err(Error::invalid(format!("eta1 must be positive and finite, got {eta1}")));
        }
        if !(eta2.is_finite() && eta2 > 0.0) {
            return Err(Error::invalid(format!("eta2 must be positive and finite, got {eta2}")));
        }
        if !(rel_tol.is_finite() && rel_tol >= 0.0) {
            return Err(Error::invalid(format!("rel_tol must be nonnegative, got {rel_tol}")));
        }
        Ok(SolverConfig { iterations, budget, eta1, eta2, resample, rel_tol, backtrack_max })
    }
}

/// Population constants used by the step-size helper: `nu` bounds the
/// covariance spectrum from above, `tau` its inverse from above, and
/// `r_norm` bounds the Frobenius norms of the targets.
#[derive(Debug, Clone, Copy)]
pub struct TheoryConstants {
    pub nu: f64,
    pub tau: f64,
    pub r_norm: f64,
}

impl TheoryConstants {
    /// # Errors
    ///
    /// `InvalidValue` unless `nu >= 1`, `tau >= 1`, and `r_norm > 0`.
    pub fn new(nu: f64, tau: f64, r_norm: f64) -> Result<Self> {
        if !(nu.is_finite() && nu >= 1.0) {
            return Err(Error::invalid(format!("nu must be at least 1, got {nu}")));
        }
        if !(tau.is_finite() && tau >= 1.0) {
            return Err(Error::invalid(format!("tau must be at least 1, got {tau}")));
        }
        if !(r_norm.is_finite() && r_norm > 0.0) {
            return Err(Error::invalid(format!("r_norm must be positive, got {r_norm}")));
        }
        Ok(TheoryConstants { nu, tau, r_norm })
    }
}

/// The data-generating parameters of a synthetic instance.
#[derive(Debug, Clone)]
pub struct GroundTruth {
    w_star: DenseMatrix,
    omega_star: DenseMatrix,
    sigma_star: DenseMatrix,
    sigma_x: DenseMatrix,
    s1_star: usize,
    s2_star: usize,
}

impl GroundTruth {
    /// # Errors
    ///
    /// `DimensionMismatch` on inconsistent shapes, `InvalidValue` if the
    /// recorded sparsity levels disagree with the exact nonzero counts or if
    /// `Omega* Sigma*` is not the identity within `1e-6`.
    pub fn new(
        w_star: DenseMatrix,
        omega_star: DenseMatrix,
        sigma_star: DenseMatrix,
        sigma_x: DenseMatrix,
        s1_star: usize,
        s2_star: usize,
    ) -> Result<Self> {
        let m = w_star.cols();
        omega_star.check_symmetric()?;
        sigma_star.check_symmetric()?;
        sigma_x.check_symmetric()?;
        if omega_star.rows() != m || sigma_star.rows() != m {
            return Err(Error::dim(format!(
                "W* has {m} columns but Omega* has order {} and Sigma* has order {}",
                omega_star.rows(),
                sigma_star.rows()
            )));
        }
        if sigma_x.rows() != w_star.rows() {
            return Err(Error::dim(format!(
                "W* has {} rows but Sigma_X has order {}",
                w_star.rows(),
                sigma_x.rows()
            )));
        }
        let prod = omega_star.matmul(&sigma_star)?;
        let resid = prod.sub(&DenseMatrix::identity(m))?.max_abs();
        if resid > 1e-6 {
            return Err(Error::invalid(format!(
                "Omega* Sigma* deviates from the identity by {resid:e}"
            )));
        }
        if w_star.count_nonzero() != s1_star {
            return Err(Error::invalid(format!(
                "recorded s1* = {s1_star} but W* has {} nonzeros",
                w_star.count_nonzero()
            )));
        }
        if omega_star.count_nonzero() != s2_star {
            return Err(Error::invalid(format!(
                "recorded s2* = {s2_star} but Omega* has {} nonzeros",
                omega_star.count_nonzero()
            )));
        }
        Ok(GroundTruth { w_star, omega_star, sigma_star, sigma_x, s1_star, s2_star })
    }

    pub fn w_star(&self) -> &DenseMatrix {
        &self.w_star
    }

    pub fn omega_star(&self) -> &DenseMatrix {
        &self.omega_star
    }

    pub fn sigma_star(&self) -> &DenseMatrix {
        &self.sigma_star
    }

    pub fn sigma_x(&self) -> &DenseMatrix {
        &self.sigma_x
    }

    pub fn s1_star(&self) -> usize {
        self.s1_star
    }

    pub fn s2_star(&self) -> usize {
        self.s2_star
    }

    pub fn d(&self) -> usize {
        self.w_star.rows()
    }

    pub fn m(&self) -> usize {
        self.w_star.cols()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::spd_inverse;

    #[test]
    fn dataset_rejects_row_mismatch() {
        let x = DenseMatrix::zeros(3, 2);
        let y = DenseMatrix::zeros(4, 1);
        assert!(matches!(Dataset::new(x, y).unwrap_err(), Error::DimensionMismatch { .. }));
    }

    #[test]
    fn row_subset_copies_selected_rows_in_order() {
        let x = DenseMatrix::from_fn(4, 2, |i, j| (10 * i + j) as f64).unwrap();
        let y = DenseMatrix::from_fn(4, 1, |i, _| i as f64).unwrap();
        let d = Dataset::new(x, y).unwrap();
        let sub = d.row_subset(&[2, 0]).unwrap();
        assert_eq!(sub.x().row(0), &[20.0, 21.0]);
        assert_eq!(sub.x().row(1), &[0.0, 1.0]);
        assert_eq!(sub.y().get(0, 0), 2.0);
    }

    #[test]
    fn joint_params_checks_omega() {
        let w = DenseMatrix::zeros(3, 2);
        let bad = DenseMatrix::new(2, 2, vec![1.0, 0.5, 0.3, 1.0]).unwrap();
        assert!(JointParams::new(w.clone(), bad).is_err());
        let wrong_order = DenseMatrix::identity(3);
        assert!(JointParams::new(w, wrong_order).is_err());
    }

    #[test]
    fn budget_ranges() {
        assert!(SparsityBudget::new(0, 5).is_err());
        let b = SparsityBudget::new(6, 3).unwrap();
        assert!(b.validate_for(2, 3).is_ok());
        assert!(b.validate_for(1, 3).is_err());
        assert!(SparsityBudget::new(1, 2).unwrap().validate_for(2, 3).is_err());
        assert!(SparsityBudget::new(1, 10).unwrap().validate_for(2, 3).is_err());
        let clamped = SparsityBudget::new(100, 100).unwrap().clamped_to(2, 3);
        assert_eq!((clamped.s1(), clamped.s2()), (6, 9));
    }

    #[test]
    fn solver_config_validation() {
        let b = SparsityBudget::new(1, 1).unwrap();
        assert!(SolverConfig::new(0, b, 0.1, 0.1, false, 0.0, 30).is_err());
        assert!(SolverConfig::new(1, b, 0.0, 0.1, false, 0.0, 30).is_err());
        assert!(SolverConfig::new(1, b, 0.1, -1.0, false, 0.0, 30).is_err());
        assert!(SolverConfig::new(1, b, 0.1, 0.1, false, -0.1, 30).is_err());
        assert!(SolverConfig::new(5, b, 0.1, 0.1, true, 1e-8, 30).is_ok());
    }

    #[test]
    fn theory_constants_validation() {
        assert!(TheoryConstants::new(0.9, 1.0, 1.0).is_err());
        assert!(TheoryConstants::new(1.0, 0.5, 1.0).is_err());
        assert!(TheoryConstants::new(1.0, 1.0, 0.0).is_err());
        assert!(TheoryConstants::new(1.0, 1.0, 2.5).is_ok());
    }

    #[test]
    fn ground_truth_checks_inverse_pair_and_counts() {
        let omega = DenseMatrix::new(2, 2, vec![1.0, 0.4, 0.4, 1.0]).unwrap();
        let sigma = spd_inverse(&omega).unwrap();
        let w = DenseMatrix::new(3, 2, vec![1.0, 0.0, 0.0, 0.0, 0.0, -0.7]).unwrap();
        let sigma_x = DenseMatrix::identity(3);
        assert!(GroundTruth::new(w.clone(), omega.clone(), sigma.clone(), sigma_x.clone(), 2, 4).is_ok());
        assert!(GroundTruth::new(w.clone(), omega.clone(), sigma.clone(), sigma_x.clone(), 3, 4).is_err());
        let not_inverse = DenseMatrix::identity(2);
        assert!(GroundTruth::new(w, omega, not_inverse, sigma_x, 2, 4).is_err());
    }
}
