//! The negative log-likelihood objective and its gradients.
//!
//! For residuals `R = Y - X W` the sample loss is
//!
//! ```text
//! f(W, Omega) = -log det(Omega) + (1/n) tr(R Omega R^T)
//! ```
//!
//! with gradients
//!
//! ```text
//! grad_W     = -(2/n) X^T R Omega
//! grad_Omega = -Omega^{-1} + (1/n) R^T R
//! ```
//!
//! Both gradients are evaluated from the data only; no ground truth enters.
//! `grad_Omega` is exactly symmetric entrywise: `R^T R` is symmetric by
//! construction and the inverse is symmetrized by the matrix kernel.

use crate::error::Result;
use crate::matrix::{cholesky, spd_inverse, DenseMatrix};
use crate::model::{validate, Dataset, JointParams};

/// Residual covariance `(1/n) R^T R` together with the sample count that
/// produced it.
#[derive(Debug, Clone)]
pub struct ResidualCovariance {
    matrix: DenseMatrix,
    n: usize,
}

impl ResidualCovariance {
    /// Wraps an externally computed covariance matrix, validating that it is
    /// square and symmetric.
    pub fn from_matrix(matrix: DenseMatrix, n: usize) -> Result<Self> {
        matrix.require_square()?;
        matrix.check_symmetric()?;
        Ok(Self { matrix, n })
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

fn residuals(data: &Dataset, w: &DenseMatrix) -> Result<DenseMatrix> {
    data.y().sub(&data.x().matmul(w)?)
}

/// Sample loss `-log det(Omega) + (1/n) tr(R Omega R^T)`.
///
/// # Errors
///
/// `DimensionMismatch` on shape violations and `NotPositiveDefinite` when
/// `Omega` has no Cholesky factor.
///
/// # Examples
///
/// ```
/// use gdht::matrix::DenseMatrix;
/// use gdht::model::{Dataset, JointParams};
/// use gdht::objective::loss;
///
/// let data = Dataset::new(
///     DenseMatrix::new(1, 1, vec![1.0]).unwrap(),
///     DenseMatrix::new(1, 1, vec![2.0]).unwrap(),
/// )
/// .unwrap();
/// let params = JointParams::new(
///     DenseMatrix::new(1, 1, vec![0.0]).unwrap(),
///     DenseMatrix::new(1, 1, vec![1.0]).unwrap(),
/// )
/// .unwrap();
/// assert_eq!(loss(&data, &params).unwrap(), 4.0);
/// ```
pub fn loss(data: &Dataset, params: &JointParams) -> Result<f64> {
    validate(data, params)?;
    let log_det = cholesky(params.omega())?.log_det();
    let r = residuals(data, params.w())?;
    let r_omega = r.matmul(params.omega())?;
    let quad: f64 = r_omega
        .data()
        .iter()
        .zip(r.data().iter())
        .map(|(&a, &b)| a * b)
        .sum();
    Ok(-log_det + quad / data.n() as f64)
}

/// Gradient of the loss in `W`: `-(2/n) X^T R Omega`.
pub fn grad_w(data: &Dataset, params: &JointParams) -> Result<DenseMatrix> {
    validate(data, params)?;
    let r = residuals(data, params.w())?;
    let xtr = data.x().t_mul(&r)?;
    xtr.matmul(params.omega())?.scale(-2.0 / data.n() as f64)
}

/// Gradient of the loss in `Omega`: `-Omega^{-1} + (1/n) R^T R`. The result
/// is exactly symmetric entrywise.
pub fn grad_omega(data: &Dataset, params: &JointParams) -> Result<DenseMatrix> {
    validate(data, params)?;
    let inv = spd_inverse(params.omega())?;
    let r = residuals(data, params.w())?;
    let rtr = r.t_mul(&r)?;
    rtr.scale(1.0 / data.n() as f64)?.sub(&inv)
}

/// Residual covariance `(1/n) (Y - X W)^T (Y - X W)`, exactly symmetric and
/// positive semidefinite.
pub fn residual_covariance(data: &Dataset, w: &DenseMatrix) -> Result<ResidualCovariance> {
    if w.rows() != data.d() || w.cols() != data.m() {
        return Err(crate::error::Error::dim(format!(
            "W is {}x{} but the dataset has d = {}, m = {}",
            w.rows(),
            w.cols(),
            data.d(),
            data.m()
        )));
    }
    let r = residuals(data, w)?;
    let s = r.t_mul(&r)?.scale(1.0 / data.n() as f64)?;
    Ok(ResidualCovariance { matrix: s, n: data.n() })
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;
    use crate::rng::Rng;

    /// A dense random problem with an SPD precision matrix, for smoke tests
    /// that only need plausible shapes and finite values.
    pub fn random_instance(n: usize, d: usize, m: usize, rng: &mut Rng) -> (Dataset, JointParams) {
        let x = DenseMatrix::from_fn(n, d, |_, _| rng.normal()).unwrap();
        let y = DenseMatrix::from_fn(n, m, |_, _| rng.normal()).unwrap();
        let w = DenseMatrix::from_fn(d, m, |_, _| 0.5 * rng.normal()).unwrap();
        let b = DenseMatrix::from_fn(m, m, |_, _| 0.4 * rng.normal()).unwrap();
        let mut omega = b.t_mul(&b).unwrap();
        for i in 0..m {
            omega.set(i, i, omega.get(i, i) + 1.0);
        }
        let omega = omega.symmetrized().unwrap();
        (Dataset::new(x, y).unwrap(), JointParams::new(w, omega).unwrap())
    }

    /// Central finite difference of the loss against an analytic gradient,
    /// returning the largest relative deviation over all coordinates.
    pub fn max_grad_rel_error(
        data: &Dataset,
        params: &JointParams,
        h: f64,
    ) -> (f64, f64) {
        let gw = grad_w(data, params).unwrap();
        let gom = grad_omega(data, params).unwrap();
        let scale_w = gw.max_abs().max(1.0);
        let scale_om = gom.max_abs().max(1.0);

        let mut worst_w = 0.0f64;
        for i in 0..gw.rows() {
            for j in 0..gw.cols() {
                let mut wp = params.w().clone();
                wp.set(i, j, wp.get(i, j) + h);
                let mut wm = params.w().clone();
                wm.set(i, j, wm.get(i, j) - h);
                let fp = loss(data, &JointParams::new(wp, params.omega().clone()).unwrap()).unwrap();
                let fm = loss(data, &JointParams::new(wm, params.omega().clone()).unwrap()).unwrap();
                let fd = (fp - fm) / (2.0 * h);
                worst_w = worst_w.max((fd - gw.get(i, j)).abs() / scale_w);
            }
        }

        let mut worst_om = 0.0f64;
        for i in 0..gom.rows() {
            for j in 0..gom.cols() {
                // Perturb symmetrically so the iterate stays in the symmetric
                // domain; off-diagonal coordinates then carry twice the
                // directional sensitivity.
                let mut op = params.omega().clone();
                let mut om = params.omega().clone();
                op.set(i, j, op.get(i, j) + h);
                om.set(i, j, om.get(i, j) - h);
                if i != j {
                    op.set(j, i, op.get(j, i) + h);
                    om.set(j, i, om.get(j, i) - h);
                }
                let fp = loss(data, &JointParams::new(params.w().clone(), op).unwrap()).unwrap();
                let fm = loss(data, &JointParams::new(params.w().clone(), om).unwrap()).unwrap();
                let fd = (fp - fm) / (2.0 * h);
                let analytic = if i == j {
                    gom.get(i, j)
                } else {
                    gom.get(i, j) + gom.get(j, i)
                };
                worst_om = worst_om.max((fd - analytic).abs() / scale_om);
            }
        }
        (worst_w, worst_om)
    }
}
