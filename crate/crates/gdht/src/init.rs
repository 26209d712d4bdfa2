//! Convex initial estimators for the coefficient and precision matrices.
//!
//! The solver needs a starting pair inside the basin of attraction. Two
//! classical penalized programs provide it:
//!
//! ```text
//! W_init     = argmin_W  (1/2n) ||Y - X W||_F^2 + lambda1 ||W||_1,1
//! Omega_init = argmin_O  -log det(O) + tr(S O) + lambda2 ||O||_1,off
//! ```
//!
//! where `S` is the residual covariance at `W_init`. The first objective
//! separates across the columns of `W`, so [`lasso_init`] runs one cyclic
//! coordinate-descent Lasso per response column. [`glasso_init`] is a
//! graphical Lasso with an unpenalized diagonal, solved by block coordinate
//! descent directly on the precision matrix: each column update exactly
//! minimizes the penalized objective over that row/column pair, which keeps
//! every iterate positive definite and the objective non-increasing.

use crate::error::{Error, Result};
use crate::matrix::{cholesky, min_eigenvalue_sym, spd_inverse, DenseMatrix};
use crate::model::{Dataset, JointParams};
use crate::objective::{residual_covariance, ResidualCovariance};

/// Settings for the coordinate-descent Lasso.
#[derive(Debug, Clone)]
pub struct LassoConfig {
    /// Entrywise penalty level; 0 gives plain least squares.
    pub lambda1: f64,
    /// Sweep cap over the `d` coordinates of each column.
    pub max_sweeps: usize,
    /// A column is converged when no coefficient moves by `tol` in a sweep.
    pub tol: f64,
}

impl LassoConfig {
    pub fn new(lambda1: f64, max_sweeps: usize, tol: f64) -> Result<Self> {
        if !(lambda1.is_finite() && lambda1 >= 0.0) {
            return Err(Error::invalid(format!("lambda1 must be finite and >= 0, got {lambda1}")));
        }
        if max_sweeps == 0 {
            return Err(Error::invalid("max_sweeps must be at least 1"));
        }
        if !(tol.is_finite() && tol > 0.0) {
            return Err(Error::invalid(format!("tol must be finite and > 0, got {tol}")));
        }
        Ok(Self { lambda1, max_sweeps, tol })
    }
}

/// Settings for the graphical Lasso.
#[derive(Debug, Clone)]
pub struct GlassoConfig {
    /// Off-diagonal penalty level; 0 gives the unpenalized inverse.
    pub lambda2: f64,
    /// Cap on full block-coordinate sweeps.
    pub max_sweeps: usize,
    /// Converged when the mean absolute off-diagonal change of the fitted
    /// covariance over a sweep drops below `tol` times the mean absolute
    /// off-diagonal entry of the input.
    pub tol: f64,
    /// Diagonal shift applied when the input covariance is near singular;
    /// `None` selects `1e-8 * tr(S) / m`.
    pub ridge_floor: Option<f64>,
}

impl GlassoConfig {
    pub fn new(lambda2: f64, max_sweeps: usize, tol: f64, ridge_floor: Option<f64>) -> Result<Self> {
        if !(lambda2.is_finite() && lambda2 >= 0.0) {
            return Err(Error::invalid(format!("lambda2 must be finite and >= 0, got {lambda2}")));
        }
        if max_sweeps == 0 {
            return Err(Error::invalid("max_sweeps must be at least 1"));
        }
        if !(tol.is_finite() && tol > 0.0) {
            return Err(Error::invalid(format!("tol must be finite and > 0, got {tol}")));
        }
        if let Some(f) = ridge_floor {
            if !(f.is_finite() && f >= 0.0) {
                return Err(Error::invalid(format!("ridge_floor must be finite and >= 0, got {f}")));
            }
        }
        Ok(Self { lambda2, max_sweeps, tol, ridge_floor })
    }
}

/// Result of [`lasso_init`].
#[derive(Debug, Clone)]
pub struct LassoFit {
    /// The `d x m` coefficient estimate.
    pub w: DenseMatrix,
    /// Largest sweep count used by any column.
    pub sweeps: usize,
    /// True when every column met the `tol` criterion before its sweep cap.
    pub converged: bool,
    /// Largest stationarity violation over all coordinates: on active
    /// coordinates the gap between the residual correlation and
    /// `lambda1 * sign(w)`, on inactive ones the excess over `lambda1`.
    pub kkt_residual: f64,
    /// Set when the sweep cap was exhausted and the KKT residual still
    /// exceeds `10 * tol`.
    pub warning: bool,
}

/// Result of [`glasso_init`].
#[derive(Debug, Clone)]
pub struct GlassoFit {
    /// The `m x m` symmetric positive definite precision estimate.
    pub omega: DenseMatrix,
    /// Sweeps executed.
    pub sweeps: usize,
    /// True when the covariance-change criterion was met before the cap.
    pub converged: bool,
    /// Set when the sweep cap was exhausted first.
    pub warning: bool,
    /// Diagonal shift that was added to the input, 0 when none was needed.
    pub ridge_applied: f64,
    /// Penalized objective after the start and after each sweep; it is
    /// non-increasing.
    pub objective_history: Vec<f64>,
}

fn soft_threshold(z: f64, t: f64) -> f64 {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

struct ColumnSolve {
    w: Vec<f64>,
    sweeps: usize,
    converged: bool,
    kkt: f64,
}

fn solve_column(xcols: &[Vec<f64>], a: &[f64], y: &[f64], cfg: &LassoConfig) -> Result<ColumnSolve> {
    let d = xcols.len();
    let n = y.len() as f64;
    let mut w = vec![0.0; d];
    let mut r = y.to_vec();
    let mut sweeps = 0;
    let mut converged = false;
    while sweeps < cfg.max_sweeps {
        sweeps += 1;
        let mut max_delta = 0.0f64;
        for j in 0..d {
            let corr = dot(&xcols[j], &r) / n;
            if a[j] == 0.0 {
                if corr != 0.0 {
                    return Err(Error::ZeroColumn { col: j });
                }
                continue;
            }
            let updated = soft_threshold(corr + a[j] * w[j], cfg.lambda1) / a[j];
            let delta = updated - w[j];
            if delta != 0.0 {
                for (ri, xij) in r.iter_mut().zip(&xcols[j]) {
                    *ri -= xij * delta;
                }
                w[j] = updated;
                max_delta = max_delta.max(delta.abs());
            }
        }
        if max_delta < cfg.tol {
            converged = true;
            break;
        }
    }
    let mut kkt = 0.0f64;
    for j in 0..d {
        let corr = dot(&xcols[j], &r) / n;
        let violation = if w[j] != 0.0 {
            (corr - cfg.lambda1 * w[j].signum()).abs()
        } else {
            (corr.abs() - cfg.lambda1).max(0.0)
        };
        kkt = kkt.max(violation);
    }
    Ok(ColumnSolve { w, sweeps, converged, kkt })
}

/// Entrywise L1-penalized least squares, one cyclic coordinate-descent
/// Lasso per response column. Columns are solved independently in a fixed
/// order, so the result for a column is identical whether it is fit alone
/// or as part of the full matrix.
///
/// Each coordinate update is the exact minimizer
/// `w_j <- soft(w_j + corr_j / a_j, lambda1 / a_j)` with
/// `a_j = ||x_j||^2 / n` and `corr_j = x_j^T r / n` on the current residual.
/// An all-zero predictor column keeps its coefficient at 0.
///
/// # Errors
///
/// `ZeroColumn` if a zero predictor column somehow carries a nonzero
/// residual correlation; `InvalidValue` for bad settings. A fit that
/// exhausts its sweeps only sets [`LassoFit::warning`].
pub fn lasso_init(data: &Dataset, cfg: &LassoConfig) -> Result<LassoFit> {
    let d = data.d();
    let n = data.n();
    let mut xcols = vec![vec![0.0; n]; d];
    for i in 0..n {
        for j in 0..d {
            xcols[j][i] = data.x().get(i, j);
        }
    }
    let a: Vec<f64> = xcols.iter().map(|c| dot(c, c) / n as f64).collect();

    let m = data.m();
    let mut w = DenseMatrix::zeros(d, m);
    let mut sweeps = 0;
    let mut converged = true;
    let mut kkt_residual = 0.0f64;
    for c in 0..m {
        let y: Vec<f64> = (0..n).map(|i| data.y().get(i, c)).collect();
        let col = solve_column(&xcols, &a, &y, cfg)?;
        for j in 0..d {
            w.set(j, c, col.w[j]);
        }
        sweeps = sweeps.max(col.sweeps);
        converged &= col.converged;
        kkt_residual = kkt_residual.max(col.kkt);
    }
    let warning = !converged && kkt_residual > 10.0 * cfg.tol;
    Ok(LassoFit { w, sweeps, converged, kkt_residual, warning })
}

fn glasso_objective(s: &DenseMatrix, omega: &DenseMatrix, lambda: f64) -> Result<f64> {
    let log_det = cholesky(omega)?.log_det();
    let m = s.rows();
    let mut trace = 0.0;
    let mut off = 0.0;
    for i in 0..m {
        for j in 0..m {
            trace += s.get(i, j) * omega.get(j, i);
            if i != j {
                off += omega.get(i, j).abs();
            }
        }
    }
    Ok(-log_det + trace + lambda * off)
}

fn mean_abs_off_diagonal(m: &DenseMatrix) -> f64 {
    let order = m.rows();
    if order < 2 {
        return 0.0;
    }
    let mut sum = 0.0;
    for i in 0..order {
        for j in 0..order {
            if i != j {
                sum += m.get(i, j).abs();
            }
        }
    }
    sum / (order * (order - 1)) as f64
}

/// One block update of column `j`: exact minimization of the penalized
/// objective over row/column `j` of `omega` with the rest held fixed.
fn glasso_column_update(
    omega: &mut DenseMatrix,
    s: &DenseMatrix,
    j: usize,
    lambda: f64,
    inner_tol: f64,
) -> Result<()> {
    let m = omega.rows();
    let others: Vec<usize> = (0..m).filter(|&k| k != j).collect();
    let p = others.len();
    let sub = DenseMatrix::from_fn(p, p, |r, c| omega.get(others[r], others[c]))?;
    let v = spd_inverse(&sub)?;
    let s12: Vec<f64> = others.iter().map(|&k| s.get(k, j)).collect();
    let s22 = s.get(j, j);

    let mut beta: Vec<f64> = others.iter().map(|&k| omega.get(k, j)).collect();
    let mut vbeta = vec![0.0; p];
    for r in 0..p {
        vbeta[r] = (0..p).map(|c| v.get(r, c) * beta[c]).sum();
    }

    // Convex subproblem min (1/2) s22 b^T V b + s12^T b + lambda ||b||_1 by
    // cyclic coordinate descent, warm started at the current column.
    for _ in 0..500 {
        let mut max_delta = 0.0f64;
        for k in 0..p {
            let h = s22 * v.get(k, k);
            let partial = s22 * (vbeta[k] - v.get(k, k) * beta[k]) + s12[k];
            let updated = soft_threshold(-partial, lambda) / h;
            let delta = updated - beta[k];
            if delta != 0.0 {
                for r in 0..p {
                    vbeta[r] += v.get(r, k) * delta;
                }
                beta[k] = updated;
                max_delta = max_delta.max(delta.abs());
            }
        }
        if max_delta < inner_tol {
            break;
        }
    }

    let omega_jj = 1.0 / s22 + dot(&beta, &vbeta);
    for (idx, &k) in others.iter().enumerate() {
        omega.set(k, j, beta[idx]);
        omega.set(j, k, beta[idx]);
    }
    omega.set(j, j, omega_jj);
    Ok(())
}

/// Graphical Lasso with penalty on off-diagonal entries only, by block
/// coordinate descent on the precision matrix. Starts at
/// `(S + lambda2 I)^{-1}`; if the input covariance has an eigenvalue below
/// the ridge floor it is first shifted to `S + floor * I` and the shift is
/// reported in the result. The update for each row/column pair is an exact
/// block minimization, so every iterate is symmetric positive definite and
/// the objective history is non-increasing.
///
/// # Errors
///
/// `NotPositiveDefinite` when a diagonal covariance entry is not positive
/// after the ridge shift, or if the final Cholesky check fails;
/// `InvalidValue` for bad settings. Exhausted sweeps only set
/// [`GlassoFit::warning`].
pub fn glasso_init(s: &ResidualCovariance, cfg: &GlassoConfig) -> Result<GlassoFit> {
    let m = s.matrix().rows();
    s.matrix().check_symmetric()?;
    let trace = s.matrix().trace()?;
    let floor = cfg.ridge_floor.unwrap_or(1e-8 * trace / m as f64);
    let lambda_min = min_eigenvalue_sym(s.matrix())?;
    let (smat, ridge_applied) = if lambda_min < floor {
        let shifted = s.matrix().add(&DenseMatrix::identity(m).scale(floor)?)?;
        (shifted, floor)
    } else {
        (s.matrix().clone(), 0.0)
    };
    for i in 0..m {
        let sii = smat.get(i, i);
        if sii <= 0.0 {
            return Err(Error::NotPositiveDefinite { col: i, pivot: sii, threshold: 0.0 });
        }
    }

    if m == 1 {
        let omega = DenseMatrix::new(1, 1, vec![1.0 / smat.get(0, 0)])?;
        let objective = glasso_objective(&smat, &omega, cfg.lambda2)?;
        return Ok(GlassoFit {
            omega,
            sweeps: 0,
            converged: true,
            warning: false,
            ridge_applied,
            objective_history: vec![objective],
        });
    }

    let lambda = cfg.lambda2;
    let start = smat.add(&DenseMatrix::identity(m).scale(lambda)?)?;
    let mut omega = spd_inverse(&start)?;
    let mut objective_history = vec![glasso_objective(&smat, &omega, lambda)?];
    let change_threshold = cfg.tol * mean_abs_off_diagonal(&smat);
    let inner_tol = cfg.tol * 1e-2;

    let mut w_prev = spd_inverse(&omega)?;
    let mut sweeps = 0;
    let mut converged = false;
    while sweeps < cfg.max_sweeps {
        sweeps += 1;
        for j in 0..m {
            glasso_column_update(&mut omega, &smat, j, lambda, inner_tol)?;
        }
        objective_history.push(glasso_objective(&smat, &omega, lambda)?);
        let w_now = spd_inverse(&omega)?;
        let mut change = 0.0;
        for i in 0..m {
            for j in 0..m {
                if i != j {
                    change += (w_now.get(i, j) - w_prev.get(i, j)).abs();
                }
            }
        }
        let avg_change = change / (m * (m - 1)) as f64;
        w_prev = w_now;
        if avg_change < change_threshold || change == 0.0 {
            converged = true;
            break;
        }
    }

    let omega = omega.symmetrized()?;
    cholesky(&omega)?;
    Ok(GlassoFit {
        omega,
        sweeps,
        converged,
        warning: !converged,
        ridge_applied,
        objective_history,
    })
}

/// The two-stage pipeline: Lasso for `W`, residual covariance at that `W`,
/// graphical Lasso for `Omega`.
pub fn initialize(data: &Dataset, lcfg: &LassoConfig, gcfg: &GlassoConfig) -> Result<JointParams> {
    let lasso = lasso_init(data, lcfg)?;
    let s = residual_covariance(data, &lasso.w)?;
    let glasso = glasso_init(&s, gcfg)?;
    JointParams::new(lasso.w, glasso.omega)
}

/// Default coefficient penalty `0.5 * nu_hat * sqrt(log(d m) / n)`.
pub fn default_lambda1(n: usize, d: usize, m: usize, nu_hat: f64) -> f64 {
    0.5 * nu_hat * (((d * m) as f64).ln() / n as f64).sqrt()
}

/// Default precision penalty `0.5 * nu_hat * sqrt(log(m) / n)`.
pub fn default_lambda2(n: usize, m: usize, nu_hat: f64) -> f64 {
    0.5 * nu_hat * ((m as f64).ln() / n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    fn lasso_cfg(lambda1: f64) -> LassoConfig {
        LassoConfig::new(lambda1, 10_000, 1e-12).unwrap()
    }

    fn glasso_cfg(lambda2: f64) -> GlassoConfig {
        GlassoConfig::new(lambda2, 500, 1e-9, None).unwrap()
    }

    fn random_data(n: usize, d: usize, m: usize, seed: u64) -> Dataset {
        let mut rng = Rng::new(seed);
        let x = DenseMatrix::from_fn(n, d, |_, _| rng.normal()).unwrap();
        let y = DenseMatrix::from_fn(n, m, |_, _| rng.normal()).unwrap();
        Dataset::new(x, y).unwrap()
    }

    fn lasso_objective(data: &Dataset, w: &DenseMatrix, lambda: f64) -> f64 {
        let r = data.y().sub(&data.x().matmul(w).unwrap()).unwrap();
        let fit = r.data().iter().map(|v| v * v).sum::<f64>() / (2.0 * data.n() as f64);
        let penalty = lambda * w.data().iter().map(|v| v.abs()).sum::<f64>();
        fit + penalty
    }

    #[test]
    fn dominant_penalty_yields_zero() {
        let data = random_data(20, 4, 2, 1);
        let xty = data.x().t_mul(data.y()).unwrap().scale(1.0 / 20.0).unwrap();
        let fit = lasso_init(&data, &lasso_cfg(xty.max_abs())).unwrap();
        assert!(fit.w.data().iter().all(|&v| v == 0.0));
        assert!(fit.converged);
        assert_eq!(fit.kkt_residual, 0.0);
    }

    #[test]
    fn orthonormal_design_soft_thresholds_exactly() {
        // Columns [1, 1] and [1, -1] give (1/n) X^T X = I exactly, so the
        // solution is the entrywise soft threshold of (1/n) X^T Y.
        let x = DenseMatrix::new(2, 2, vec![1.0, 1.0, 1.0, -1.0]).unwrap();
        let y = DenseMatrix::new(2, 1, vec![3.0, 1.0]).unwrap();
        let data = Dataset::new(x, y).unwrap();
        let fit = lasso_init(&data, &lasso_cfg(0.5)).unwrap();
        assert_eq!(fit.w.get(0, 0), 1.5);
        assert_eq!(fit.w.get(1, 0), 0.5);
    }

    #[test]
    fn unpenalized_fit_matches_least_squares() {
        let data = random_data(40, 3, 1, 2);
        let fit = lasso_init(&data, &lasso_cfg(0.0)).unwrap();
        let xtx = data.x().t_mul(data.x()).unwrap();
        let xty = data.x().t_mul(data.y()).unwrap();
        let chol = cholesky(&xtx.symmetrized().unwrap()).unwrap();
        let ols = chol.solve_vec(&(0..3).map(|j| xty.get(j, 0)).collect::<Vec<_>>()).unwrap();
        for j in 0..3 {
            assert!((fit.w.get(j, 0) - ols[j]).abs() < 1e-8, "coef {j}");
        }
    }

    #[test]
    fn solution_beats_a_local_grid() {
        let mut rng = Rng::new(5);
        let x = DenseMatrix::from_fn(6, 2, |i, j| {
            let base = rng.normal();
            if j == 1 {
                base + 0.5 * (i as f64 / 6.0)
            } else {
                base
            }
        })
        .unwrap();
        let y = DenseMatrix::from_fn(6, 1, |_, _| rng.normal()).unwrap();
        let data = Dataset::new(x, y).unwrap();
        let lambda = 0.3;
        let fit = lasso_init(&data, &lasso_cfg(lambda)).unwrap();
        let best = lasso_objective(&data, &fit.w, lambda);
        for a in -100..=100 {
            for b in -100..=100 {
                let w = DenseMatrix::new(
                    2,
                    1,
                    vec![
                        fit.w.get(0, 0) + a as f64 * 0.005,
                        fit.w.get(1, 0) + b as f64 * 0.005,
                    ],
                )
                .unwrap();
                assert!(best <= lasso_objective(&data, &w, lambda) + 1e-12);
            }
        }
    }

    #[test]
    fn kkt_certificate_holds_on_random_problems() {
        for seed in 10..15 {
            let data = random_data(40, 10, 3, seed);
            let cfg = LassoConfig::new(0.1, 10_000, 1e-9).unwrap();
            let fit = lasso_init(&data, &cfg).unwrap();
            assert!(
                fit.kkt_residual <= 10.0 * cfg.tol,
                "seed {seed}: kkt {}",
                fit.kkt_residual
            );
            assert!(!fit.warning);
        }
    }

    #[test]
    fn zero_predictor_column_is_pinned_at_zero() {
        let mut rng = Rng::new(7);
        let x = DenseMatrix::from_fn(10, 3, |_, j| if j == 1 { 0.0 } else { rng.normal() }).unwrap();
        let y = DenseMatrix::from_fn(10, 2, |_, _| rng.normal()).unwrap();
        let data = Dataset::new(x, y).unwrap();
        let fit = lasso_init(&data, &lasso_cfg(0.05)).unwrap();
        assert_eq!(fit.w.get(1, 0), 0.0);
        assert_eq!(fit.w.get(1, 1), 0.0);
    }

    #[test]
    fn columns_separate_bitwise() {
        let data = random_data(15, 4, 3, 9);
        let cfg = lasso_cfg(0.08);
        let full = lasso_init(&data, &cfg).unwrap();
        for c in 0..3 {
            let yc = DenseMatrix::from_fn(15, 1, |i, _| data.y().get(i, c)).unwrap();
            let single = lasso_init(&Dataset::new(data.x().clone(), yc).unwrap(), &cfg).unwrap();
            for j in 0..4 {
                assert_eq!(full.w.get(j, c).to_bits(), single.w.get(j, 0).to_bits());
            }
        }
    }

    fn band_covariance() -> DenseMatrix {
        let omega = DenseMatrix::new(
            3,
            3,
            vec![1.0, 0.4, 0.0, 0.4, 1.0, 0.4, 0.0, 0.4, 1.0],
        )
        .unwrap();
        spd_inverse(&omega).unwrap()
    }

    #[test]
    fn zero_penalty_recovers_the_inverse() {
        let sigma = band_covariance();
        let s = ResidualCovariance::from_matrix(sigma.clone(), 100).unwrap();
        let fit = glasso_init(&s, &glasso_cfg(0.0)).unwrap();
        let exact = spd_inverse(&sigma).unwrap();
        assert!(fit.omega.sub(&exact).unwrap().max_abs() < 1e-6);
        assert_eq!(fit.ridge_applied, 0.0);
    }

    #[test]
    fn large_penalty_gives_the_diagonal_estimate() {
        let sigma = band_covariance();
        let mut max_off = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    max_off = max_off.max(sigma.get(i, j).abs());
                }
            }
        }
        let s = ResidualCovariance::from_matrix(sigma.clone(), 100).unwrap();
        let fit = glasso_init(&s, &glasso_cfg(1.1 * max_off)).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j { 1.0 / sigma.get(i, i) } else { 0.0 };
                assert!(
                    (fit.omega.get(i, j) - expected).abs() < 1e-9,
                    "entry ({i},{j}) = {}",
                    fit.omega.get(i, j)
                );
            }
        }
    }

    #[test]
    fn stationarity_certificate_and_monotone_objective() {
        let sigma = band_covariance();
        let s = ResidualCovariance::from_matrix(sigma.clone(), 100).unwrap();
        let cfg = GlassoConfig::new(0.05, 500, 1e-8, None).unwrap();
        let fit = glasso_init(&s, &cfg).unwrap();
        let inv = spd_inverse(&fit.omega).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let gap = (sigma.get(i, j) - inv.get(i, j)).abs();
                if i == j {
                    assert!(gap <= 1e-6, "diagonal {i}: {gap}");
                } else {
                    assert!((gap - cfg.lambda2).max(0.0) <= 1e-4, "off ({i},{j}): {gap}");
                }
            }
        }
        for pair in fit.objective_history.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-10, "objective rose: {pair:?}");
        }
        assert!(fit.converged);
    }

    #[test]
    fn singular_covariance_gets_the_ridge_shift() {
        let v = [1.0, 2.0, -1.0];
        let singular = DenseMatrix::from_fn(3, 3, |i, j| v[i] * v[j]).unwrap();
        let s = ResidualCovariance::from_matrix(singular, 50).unwrap();
        let fit = glasso_init(&s, &glasso_cfg(0.1)).unwrap();
        assert!(fit.ridge_applied > 0.0);
        assert!((fit.ridge_applied - 1e-8 * 6.0 / 3.0).abs() < 1e-20);
        cholesky(&fit.omega).unwrap();
    }

    #[test]
    fn single_variable_inverts_the_scalar() {
        let s = ResidualCovariance::from_matrix(DenseMatrix::new(1, 1, vec![4.0]).unwrap(), 10).unwrap();
        let fit = glasso_init(&s, &glasso_cfg(0.3)).unwrap();
        assert_eq!(fit.omega.get(0, 0), 0.25);
    }

    #[test]
    fn pipeline_zero_coefficients_leave_the_raw_covariance() {
        let data = random_data(25, 4, 3, 13);
        let xty = data.x().t_mul(data.y()).unwrap().scale(1.0 / 25.0).unwrap();
        let lcfg = lasso_cfg(xty.max_abs() * 1.01);
        let fit = lasso_init(&data, &lcfg).unwrap();
        let s = residual_covariance(&data, &fit.w).unwrap();
        let raw = data.y().t_mul(data.y()).unwrap().scale(1.0 / 25.0).unwrap();
        assert_eq!(s.matrix().data(), raw.data());
        let params = initialize(&data, &lcfg, &glasso_cfg(0.1)).unwrap();
        assert!(params.w().data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn noiseless_orthonormal_recovery_bound() {
        // +-1 design with orthogonal columns: soft thresholding biases each
        // active coefficient by exactly lambda1, so the error is
        // lambda1 * sqrt(s) <= 2 lambda1 sqrt(s).
        let x = DenseMatrix::new(4, 2, vec![1.0, 1.0, 1.0, -1.0, -1.0, 1.0, -1.0, -1.0]).unwrap();
        let w_star = DenseMatrix::new(2, 2, vec![1.0, 0.0, 0.0, -0.8]).unwrap();
        let y = x.matmul(&w_star).unwrap();
        let data = Dataset::new(x, y).unwrap();
        let lambda = 0.01;
        let fit = lasso_init(&data, &lasso_cfg(lambda)).unwrap();
        let err = fit.w.sub(&w_star).unwrap().frobenius_norm();
        assert!(err <= 2.0 * lambda * 2.0f64.sqrt() + 1e-15, "err {err}");
        assert!((err - lambda * 2.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn config_validation() {
        assert!(LassoConfig::new(-0.1, 10, 1e-6).is_err());
        assert!(LassoConfig::new(0.1, 0, 1e-6).is_err());
        assert!(LassoConfig::new(0.1, 10, 0.0).is_err());
        assert!(GlassoConfig::new(f64::NAN, 10, 1e-6, None).is_err());
        assert!(GlassoConfig::new(0.1, 10, 1e-6, Some(-1.0)).is_err());
        assert!(GlassoConfig::new(0.1, 10, -1e-6, None).is_err());
    }

    #[test]
    fn default_penalty_levels() {
        let l1 = default_lambda1(1000, 100, 10, 1.0);
        assert!((l1 - 0.5 * (1000.0f64.ln() / 1000.0).sqrt()).abs() < 1e-15);
        let l2 = default_lambda2(1000, 10, 2.0);
        assert!((l2 - (10.0f64.ln() / 1000.0).sqrt()).abs() < 1e-15);
        assert_eq!(default_lambda2(100, 1, 1.0), 0.0);
    }
}
