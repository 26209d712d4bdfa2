//! Gradient descent with per-iteration hard thresholding.
//!
//! Starting from an initializer `(W_init, Omega_init)`, both matrices are
//! first projected onto their sparsity budgets. Each iteration then evaluates
//! both gradients at the current pair (a Jacobi-style simultaneous update),
//! takes a gradient step, and re-projects:
//!
//! ```text
//! W^{t+1}     = HT(W^t     - eta1 * grad_W,     s1)        largest |entries|
//! Omega^{t+1} = HT(Omega^t - eta2 * grad_Omega, s2)        diagonal + pairs
//! ```
//!
//! If the thresholded `Omega^{t+1}` fails its Cholesky check, the `Omega`
//! step is retried with `eta2` halved, up to `backtrack_max` times; the `W`
//! step is unaffected. Every iterate is recorded in a [`SolverTrace`] along
//! with the loss, errors against an optional ground truth, optimization
//! errors against the final iterate, and the step size that produced it.
//!
//! [`gdht_fit_resampled`] is the sample-splitting variant: rows are dealt
//! into `T` disjoint slices by a seeded shuffle and iteration `t` computes
//! its gradients on slice `t` only.

use crate::error::{Error, Result};
use crate::matrix::{cholesky, DenseMatrix};
use crate::model::{validate, Dataset, JointParams, SolverConfig, SparsityBudget, TheoryConstants};
use crate::objective::{grad_omega, grad_w, loss};
use crate::rng::Rng;
use crate::threshold::{ht, supp, supp_sym};

/// One recorded iterate.
#[derive(Debug, Clone)]
pub struct TraceRecord {
    /// Iteration index; 0 is the thresholded initializer.
    pub iter: usize,
    /// Sample loss at this iterate, always on the full dataset.
    pub loss: f64,
    /// `||W^t - W*||_F` when a ground truth was supplied.
    pub err_w: Option<f64>,
    /// `||Omega^t - Omega*||_F` when a ground truth was supplied.
    pub err_omega: Option<f64>,
    /// `||W^t - W^final||_F`, filled in after the run; 0 at the final iterate.
    pub opt_err_w: f64,
    /// `||Omega^t - Omega^final||_F`, filled in after the run.
    pub opt_err_omega: f64,
    /// Step size that produced this `Omega` iterate (after any halving).
    /// Record 0 reports the configured `eta2`.
    pub eta2_used: f64,
}

/// Per-iteration history of a fit.
#[derive(Debug, Clone, Default)]
pub struct SolverTrace {
    records: Vec<TraceRecord>,
}

impl SolverTrace {
    pub fn records(&self) -> &[TraceRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> &TraceRecord {
        self.records.last().expect("trace always holds the initial record")
    }
}

/// A fitted pair with its trace.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub params: JointParams,
    pub trace: SolverTrace,
    /// Number of gradient iterations actually run (equals `cfg.iterations`
    /// unless `rel_tol` stopped the loop early).
    pub iterations_run: usize,
}

/// Optional ground truth for error columns: `(W*, Omega*)`.
pub type TruthRef<'a> = (&'a DenseMatrix, &'a DenseMatrix);

struct LoopState {
    w: DenseMatrix,
    omega: DenseMatrix,
    iterates: Vec<(DenseMatrix, DenseMatrix)>,
    eta2_history: Vec<f64>,
}

fn check_setup(data: &Dataset, init: &JointParams, cfg: &SolverConfig) -> Result<()> {
    validate(data, init)?;
    cfg.budget.validate_for(data.d(), data.m())?;
    Ok(())
}

fn threshold_initializer(init: &JointParams, budget: &SparsityBudget) -> Result<(DenseMatrix, DenseMatrix)> {
    let w = ht(init.w(), &supp(init.w(), budget.s1())?)?;
    let omega = ht(init.omega(), &supp_sym(init.omega(), budget.s2())?)?;
    Ok((w, omega))
}

fn relative_change(prev: &DenseMatrix, next: &DenseMatrix) -> f64 {
    let diff = next.sub(prev).expect("iterates share a shape").frobenius_norm();
    diff / prev.frobenius_norm().max(1e-12)
}

/// One simultaneous update on `slice`, with the SPD safeguard on `Omega`.
/// Returns the step size the accepted `Omega` iterate used.
fn step(
    state: &mut LoopState,
    slice: &Dataset,
    cfg: &SolverConfig,
    iteration: usize,
) -> Result<f64> {
    let params = JointParams::new(state.w.clone(), state.omega.clone())?;
    let gw = grad_w(slice, &params)?;
    let gom = grad_omega(slice, &params)?;

    let w_half = state.w.add_scaled(-cfg.eta1, &gw)?;
    let w_next = ht(&w_half, &supp(&w_half, cfg.budget.s1())?)?;

    let mut eta2 = cfg.eta2;
    let mut attempts = 0;
    let omega_next = loop {
        let omega_half = state.omega.add_scaled(-eta2, &gom)?;
        let candidate = ht(&omega_half, &supp_sym(&omega_half, cfg.budget.s2())?)?;
        match cholesky(&candidate) {
            Ok(_) => break candidate,
            Err(Error::NotPositiveDefinite { .. }) if attempts < cfg.backtrack_max => {
                attempts += 1;
                eta2 *= 0.5;
            }
            Err(Error::NotPositiveDefinite { .. }) => {
                return Err(Error::PositiveDefiniteRecoveryFailed { iteration, attempts });
            }
            Err(other) => return Err(other),
        }
    };

    state.w = w_next;
    state.omega = omega_next;
    state.iterates.push((state.w.clone(), state.omega.clone()));
    state.eta2_history.push(eta2);
    Ok(eta2)
}

fn build_trace(
    full_data: &Dataset,
    state: &LoopState,
    truth: Option<TruthRef<'_>>,
) -> Result<SolverTrace> {
    let (w_final, omega_final) = state.iterates.last().expect("at least the initial iterate");
    let mut records = Vec::with_capacity(state.iterates.len());
    for (t, (w, omega)) in state.iterates.iter().enumerate() {
        let params = JointParams::new(w.clone(), omega.clone())?;
        let (err_w, err_omega) = match truth {
            Some((w_star, omega_star)) => (
                Some(w.sub(w_star)?.frobenius_norm()),
                Some(omega.sub(omega_star)?.frobenius_norm()),
            ),
            None => (None, None),
        };
        records.push(TraceRecord {
            iter: t,
            loss: loss(full_data, &params)?,
            err_w,
            err_omega,
            opt_err_w: w.sub(w_final)?.frobenius_norm(),
            opt_err_omega: omega.sub(omega_final)?.frobenius_norm(),
            eta2_used: state.eta2_history[t],
        });
    }
    Ok(SolverTrace { records })
}

fn run_loop(
    full_data: &Dataset,
    slices: Option<Vec<Dataset>>,
    init: &JointParams,
    cfg: &SolverConfig,
    truth: Option<TruthRef<'_>>,
) -> Result<FitResult> {
    let (w0, omega0) = threshold_initializer(init, &cfg.budget)?;
    cholesky(&omega0)?;
    let mut state = LoopState {
        w: w0.clone(),
        omega: omega0.clone(),
        iterates: vec![(w0, omega0)],
        eta2_history: vec![cfg.eta2],
    };

    let mut iterations_run = 0;
    for t in 0..cfg.iterations {
        let slice = match &slices {
            Some(s) => &s[t],
            None => full_data,
        };
        let prev_w = state.w.clone();
        let prev_omega = state.omega.clone();
        step(&mut state, slice, cfg, t)?;
        iterations_run += 1;
        if cfg.rel_tol > 0.0 {
            let change = relative_change(&prev_w, &state.w)
                .max(relative_change(&prev_omega, &state.omega));
            if change < cfg.rel_tol {
                break;
            }
        }
    }

    let trace = build_trace(full_data, &state, truth)?;
    Ok(FitResult {
        params: JointParams::new(state.w, state.omega)?,
        trace,
        iterations_run,
    })
}

/// Fits `(W, Omega)` by full-sample gradient descent with hard thresholding.
///
/// The trace holds `iterations_run + 1` records: index 0 is the thresholded
/// initializer, index `t` the iterate after step `t`. When `truth` is given,
/// the `err_w`/`err_omega` columns are populated.
///
/// # Errors
///
/// Set-up violations surface as `DimensionMismatch`/`BudgetOutOfRange`;
/// `InvalidValue` if `cfg.resample` is set (use [`gdht_fit_resampled`]);
/// `NotPositiveDefinite` if the thresholded initializer is not SPD;
/// `PositiveDefiniteRecoveryFailed` if halving `eta2` cannot keep an
/// iterate SPD.
pub fn gdht_fit(
    data: &Dataset,
    init: &JointParams,
    cfg: &SolverConfig,
    truth: Option<TruthRef<'_>>,
) -> Result<FitResult> {
    check_setup(data, init, cfg)?;
    if cfg.resample {
        return Err(Error::invalid(
            "cfg.resample is set; call gdht_fit_resampled with a shuffle seed",
        ));
    }
    run_loop(data, None, init, cfg, truth)
}

/// Sample-splitting variant: a seeded shuffle deals the rows into
/// `cfg.iterations` disjoint slices of `floor(n / T)` rows (the remainder is
/// discarded) and iteration `t` computes its gradients on slice `t` only.
/// Within each slice rows keep their original order, so `T = 1` reproduces
/// [`gdht_fit`] with one full-data iteration bit for bit. Trace losses are
/// evaluated on the full dataset.
///
/// # Errors
///
/// As [`gdht_fit`], plus `SliceTooSmall` when `floor(n / T) = 0` and
/// `InvalidValue` when `cfg.resample` is not set.
pub fn gdht_fit_resampled(
    data: &Dataset,
    init: &JointParams,
    cfg: &SolverConfig,
    truth: Option<TruthRef<'_>>,
    shuffle_seed: u64,
) -> Result<FitResult> {
    check_setup(data, init, cfg)?;
    if !cfg.resample {
        return Err(Error::invalid("cfg.resample is not set; call gdht_fit instead"));
    }
    let n = data.n();
    let t_slices = cfg.iterations;
    let per_slice = n / t_slices;
    if per_slice == 0 {
        return Err(Error::SliceTooSmall { n, t: t_slices });
    }
    let mut order: Vec<usize> = (0..n).collect();
    Rng::new(shuffle_seed).shuffle(&mut order);
    let mut slices = Vec::with_capacity(t_slices);
    for t in 0..t_slices {
        let mut rows = order[t * per_slice..(t + 1) * per_slice].to_vec();
        rows.sort_unstable();
        slices.push(data.row_subset(&rows)?);
    }
    run_loop(data, Some(slices), init, cfg, truth)
}

/// Step sizes from the population constants:
/// `eta1 = 2 nu tau / (2 nu^2 tau + 1)` and
/// `eta2 = 1568 R^2 / (2401 R^4 + 256)`.
///
/// # Examples
///
/// ```
/// use gdht::model::TheoryConstants;
/// use gdht::solver::suggest_step_sizes;
///
/// let tc = TheoryConstants::new(1.0, 1.0, 1.0).unwrap();
/// let (eta1, eta2) = suggest_step_sizes(&tc);
/// assert!((eta1 - 2.0 / 3.0).abs() < 1e-15);
/// assert!((eta2 - 1568.0 / 2657.0).abs() < 1e-15);
/// ```
pub fn suggest_step_sizes(tc: &TheoryConstants) -> (f64, f64) {
    let eta1 = 2.0 * tc.nu * tc.tau / (2.0 * tc.nu * tc.nu * tc.tau + 1.0);
    let r2 = tc.r_norm * tc.r_norm;
    let eta2 = 1568.0 * r2 / (2401.0 * r2 * r2 + 256.0);
    (eta1, eta2)
}

/// Budgets from true sparsity levels: each `s_i` is the ceiling of
/// `max(100/9, 16 / (1/rho - 1)^2) * s_i_star`, clamped to the valid ranges
/// for a `d x m` problem. The `100/9` branch is evaluated in integer
/// arithmetic so it is exact.
///
/// # Errors
///
/// `RhoOutOfRange` unless `0 < rho < 1`; `BudgetOutOfRange` when a zero
/// starred sparsity makes the budget zero.
pub fn suggest_sparsity(
    s1_star: usize,
    s2_star: usize,
    rho: f64,
    d: usize,
    m: usize,
) -> Result<SparsityBudget> {
    if !(rho.is_finite() && rho > 0.0 && rho < 1.0) {
        return Err(Error::RhoOutOfRange { rho });
    }
    let blow_up = |s_star: usize| -> usize {
        let exact = (100 * s_star).div_ceil(9);
        let gap = 1.0 / rho - 1.0;
        let float = (16.0 / (gap * gap) * s_star as f64).ceil() as usize;
        exact.max(float)
    };
    let budget = SparsityBudget::new(blow_up(s1_star), blow_up(s2_star))?;
    Ok(budget.clamped_to(d, m))
}
