//! Simulation harnesses: error curves over iterations, error scaling over
//! sample sizes, and initializer-versus-refinement comparisons.
//!
//! Every harness follows the same per-replication recipe. Replication `r`
//! derives its seed as `master_seed + r`, generates a fresh ground truth
//! and dataset, splits the rows into train and test halves with a seeded
//! permutation, runs the convex initializers on the training half, and
//! refines with the gradient-descent solver. Penalties, step sizes, and
//! sparsity budgets resolve per scenario: `None` penalties fall back to the
//! rate-shaped defaults, `None` step sizes use the suggested formulas with
//! the constants set to the initializer magnitude
//! `R = max(||W_init||_F, ||Omega_init||_F, 1)`, and budgets are
//! `ceil(budget_mult * s_star)` clamped to the valid ranges.
//!
//! Replications run in parallel and are joined by index, so results do not
//! depend on scheduling.

use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::init::{
    default_lambda1, default_lambda2, glasso_init, lasso_init, GlassoConfig, LassoConfig,
};
use crate::matrix::DenseMatrix;
use crate::model::{
    Dataset, GroundTruth, JointParams, SolverConfig, SparsityBudget, TheoryConstants,
};
use crate::objective::residual_covariance;
use crate::rng::Rng;
use crate::solver::{gdht_fit, suggest_step_sizes, FitResult, SolverTrace};
use crate::synthetic::{sample_dataset, sample_dataset_noiseless, GraphSpec, SyntheticInstance};

/// One problem size in an experiment: rows, predictors, responses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScenarioSize {
    pub n: usize,
    pub d: usize,
    pub m: usize,
}

/// Solver settings with per-scenario resolution: `eta = None` selects the
/// suggested step sizes from the initializer magnitude.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverSettings {
    pub iterations: usize,
    pub budget_mult: f64,
    pub eta: Option<(f64, f64)>,
    pub rel_tol: f64,
    pub backtrack_max: usize,
}

/// Lasso settings; `lambda1 = None` selects the rate-shaped default for the
/// training size.
#[derive(Debug, Clone, PartialEq)]
pub struct LassoSettings {
    pub lambda1: Option<f64>,
    pub max_sweeps: usize,
    pub tol: f64,
}

/// Graphical-Lasso settings; `lambda2 = None` selects the rate-shaped
/// default, `ridge_floor = None` the trace-scaled floor.
#[derive(Debug, Clone, PartialEq)]
pub struct GlassoSettings {
    pub lambda2: Option<f64>,
    pub max_sweeps: usize,
    pub tol: f64,
    pub ridge_floor: Option<f64>,
}

/// Full description of a simulation study.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub sizes: Vec<ScenarioSize>,
    pub graph: GraphSpec,
    pub s1_star: usize,
    pub replications: usize,
    pub master_seed: u64,
    pub train_fraction: f64,
    pub noiseless: bool,
    pub solver: SolverSettings,
    pub lasso: LassoSettings,
    pub glasso: GlassoSettings,
}

impl ExperimentConfig {
    /// The desk-scale reference configuration: `n = 2000`, `d = 100`,
    /// `m = 10`, band graph, `s1_star = 20`, 10 replications, an even
    /// train/test split, 100 iterations, and automatic penalties, step
    /// sizes, and budgets.
    pub fn standard() -> Self {
        ExperimentConfig {
            sizes: vec![ScenarioSize { n: 2000, d: 100, m: 10 }],
            graph: GraphSpec::band(10).expect("band spec is valid"),
            s1_star: 20,
            replications: 10,
            master_seed: 1,
            train_fraction: 0.5,
            noiseless: false,
            solver: SolverSettings {
                iterations: 100,
                budget_mult: 1.0,
                eta: None,
                rel_tol: 0.0,
                backtrack_max: SolverConfig::DEFAULT_BACKTRACK_MAX,
            },
            lasso: LassoSettings { lambda1: None, max_sweeps: 1000, tol: 1e-7 },
            glasso: GlassoSettings {
                lambda2: None,
                max_sweeps: 300,
                tol: 1e-8,
                ridge_floor: None,
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() {
            return Err(Error::invalid("at least one scenario size is required"));
        }
        for size in &self.sizes {
            if size.n < 2 || size.d == 0 || size.m == 0 {
                return Err(Error::invalid(format!(
                    "scenario sizes must have n >= 2, d >= 1, m >= 1, got ({}, {}, {})",
                    size.n, size.d, size.m
                )));
            }
            if self.s1_star == 0 || self.s1_star > size.d * size.m {
                return Err(Error::budget(format!(
                    "s1_star = {} is outside 1..={} for scenario ({}, {}, {})",
                    self.s1_star,
                    size.d * size.m,
                    size.n,
                    size.d,
                    size.m
                )));
            }
        }
        if self.replications == 0 {
            return Err(Error::invalid("replications must be at least 1"));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::invalid(format!(
                "train_fraction must lie in (0, 1), got {}",
                self.train_fraction
            )));
        }
        if self.solver.iterations == 0 {
            return Err(Error::invalid("iterations must be at least 1"));
        }
        if !(self.solver.budget_mult.is_finite() && self.solver.budget_mult >= 1.0) {
            return Err(Error::invalid(format!(
                "budget_mult must be finite and >= 1, got {}",
                self.solver.budget_mult
            )));
        }
        Ok(())
    }

    fn single_size(&self) -> Result<ScenarioSize> {
        if self.sizes.len() != 1 {
            return Err(Error::invalid(format!(
                "this harness takes exactly one scenario size, got {}",
                self.sizes.len()
            )));
        }
        Ok(self.sizes[0])
    }
}

/// `(||W_hat - W*||_F, ||Omega_hat - Omega*||_F)`.
pub fn estimation_error(est: &JointParams, truth: &GroundTruth) -> Result<(f64, f64)> {
    let err_w = est.w().sub(truth.w_star())?.frobenius_norm();
    let err_omega = est.omega().sub(truth.omega_star())?.frobenius_norm();
    Ok((err_w, err_omega))
}

/// Per-entry mean squared prediction error
/// `||Y - X W||_F^2 / (n m)` on a held-out dataset.
pub fn prediction_error(test: &Dataset, w: &DenseMatrix) -> Result<f64> {
    let residual = test.y().sub(&test.x().matmul(w)?)?;
    let sq = residual.frobenius_norm().powi(2);
    Ok(sq / (test.n() * test.m()) as f64)
}

/// Seeded train/test split: a permutation of `0..n` is dealt into a
/// training block of `floor(n * fraction)` rows and a test block holding
/// the rest; both index lists are returned sorted ascending.
fn split_indices(n: usize, fraction: f64, rng: &mut Rng) -> (Vec<usize>, Vec<usize>) {
    let mut order: Vec<usize> = (0..n).collect();
    rng.shuffle(&mut order);
    let cut = ((n as f64 * fraction).floor() as usize).clamp(1, n - 1);
    let mut train = order[..cut].to_vec();
    let mut test = order[cut..].to_vec();
    train.sort_unstable();
    test.sort_unstable();
    (train, test)
}

/// Everything produced by one replication.
#[derive(Debug, Clone)]
pub struct ReplicationOutcome {
    pub replication: usize,
    pub trace: SolverTrace,
    pub init_err_w: f64,
    pub init_err_omega: f64,
    pub final_err_w: f64,
    pub final_err_omega: f64,
    pub init_pred_err: f64,
    pub final_pred_err: f64,
    pub lasso_seconds: f64,
    pub glasso_seconds: f64,
    pub fit_seconds: f64,
}

fn run_single(cfg: &ExperimentConfig, size: ScenarioSize, rep: usize) -> Result<ReplicationOutcome> {
    let mut rng = Rng::new(cfg.master_seed.wrapping_add(rep as u64));
    let graph = cfg.graph.with_order(size.m)?;
    let truth = crate::synthetic::make_truth(&graph, size.d, cfg.s1_star, &mut rng)?;
    let data_seed = rng.next_u64();
    let instance: SyntheticInstance = if cfg.noiseless {
        sample_dataset_noiseless(&truth, size.n, data_seed)?
    } else {
        sample_dataset(&truth, size.n, data_seed)?
    };
    let (train_rows, test_rows) = split_indices(size.n, cfg.train_fraction, &mut rng);
    let train = instance.data.row_subset(&train_rows)?;
    let test = instance.data.row_subset(&test_rows)?;

    let lambda1 = cfg
        .lasso
        .lambda1
        .unwrap_or_else(|| default_lambda1(train.n(), size.d, size.m, 1.0));
    let lcfg = LassoConfig::new(lambda1, cfg.lasso.max_sweeps, cfg.lasso.tol)?;
    let started = Instant::now();
    let lasso = lasso_init(&train, &lcfg)?;
    let lasso_seconds = started.elapsed().as_secs_f64();

    let lambda2 = cfg
        .glasso
        .lambda2
        .unwrap_or_else(|| default_lambda2(train.n(), size.m, 1.0));
    let gcfg = GlassoConfig::new(lambda2, cfg.glasso.max_sweeps, cfg.glasso.tol, cfg.glasso.ridge_floor)?;
    let s = residual_covariance(&train, &lasso.w)?;
    let started = Instant::now();
    let glasso = glasso_init(&s, &gcfg)?;
    let glasso_seconds = started.elapsed().as_secs_f64();

    let init = JointParams::new(lasso.w, glasso.omega)?;
    let (eta1, eta2) = match cfg.solver.eta {
        Some(pair) => pair,
        None => auto_step_sizes(&init)?,
    };
    let s1 = ((cfg.solver.budget_mult * cfg.s1_star as f64).ceil() as usize).max(1);
    let s2 = ((cfg.solver.budget_mult * truth.s2_star() as f64).ceil() as usize).max(size.m);
    let budget = SparsityBudget::new(s1, s2)?.clamped_to(size.d, size.m);
    let solver_cfg = SolverConfig::new(
        cfg.solver.iterations,
        budget,
        eta1,
        eta2,
        false,
        cfg.solver.rel_tol,
        cfg.solver.backtrack_max,
    )?;

    let started = Instant::now();
    let fit: FitResult = gdht_fit(
        &train,
        &init,
        &solver_cfg,
        Some((truth.w_star(), truth.omega_star())),
    )?;
    let fit_seconds = started.elapsed().as_secs_f64();

    let (init_err_w, init_err_omega) = estimation_error(&init, &truth)?;
    let (final_err_w, final_err_omega) = estimation_error(&fit.params, &truth)?;
    let init_pred_err = prediction_error(&test, init.w())?;
    let final_pred_err = prediction_error(&test, fit.params.w())?;

    Ok(ReplicationOutcome {
        replication: rep,
        trace: fit.trace,
        init_err_w,
        init_err_omega,
        final_err_w,
        final_err_omega,
        init_pred_err,
        final_pred_err,
        lasso_seconds,
        glasso_seconds,
        fit_seconds,
    })
}

/// The step-size pair used when none is configured. The curvature and
/// radius constants both take the initializer magnitude
/// `max(|W0|_F, |Omega0|_F, 1)`, so larger starting points get smaller,
/// safer steps.
pub fn auto_step_sizes(init: &JointParams) -> Result<(f64, f64)> {
    let r_hat = init
        .w()
        .frobenius_norm()
        .max(init.omega().frobenius_norm())
        .max(1.0);
    Ok(suggest_step_sizes(&TheoryConstants::new(r_hat, 1.0, r_hat)?))
}

fn run_replications(cfg: &ExperimentConfig, size: ScenarioSize) -> Result<Vec<ReplicationOutcome>> {
    (0..cfg.replications)
        .into_par_iter()
        .map(|rep| run_single(cfg, size, rep))
        .collect()
}

/// Mean and unbiased standard deviation; the deviation is 0 for fewer than
/// two values.
pub fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

/// One averaged trace record.
#[derive(Debug, Clone)]
pub struct MeanTraceRecord {
    pub iter: usize,
    pub loss: f64,
    pub err_w: f64,
    pub err_omega: f64,
    pub opt_err_w: f64,
    pub opt_err_omega: f64,
}

/// Per-replication traces plus their average, from [`run_error_curve`].
#[derive(Debug, Clone)]
pub struct ErrorCurve {
    pub replications: Vec<ReplicationOutcome>,
    pub mean: Vec<MeanTraceRecord>,
}

fn average_traces(outcomes: &[ReplicationOutcome]) -> Vec<MeanTraceRecord> {
    let longest = outcomes.iter().map(|o| o.trace.len()).max().unwrap_or(0);
    let mut mean = Vec::with_capacity(longest);
    for t in 0..longest {
        let records: Vec<_> = outcomes
            .iter()
            .filter_map(|o| o.trace.records().get(t))
            .collect();
        let k = records.len() as f64;
        mean.push(MeanTraceRecord {
            iter: t,
            loss: records.iter().map(|r| r.loss).sum::<f64>() / k,
            err_w: records.iter().filter_map(|r| r.err_w).sum::<f64>() / k,
            err_omega: records.iter().filter_map(|r| r.err_omega).sum::<f64>() / k,
            opt_err_w: records.iter().map(|r| r.opt_err_w).sum::<f64>() / k,
            opt_err_omega: records.iter().map(|r| r.opt_err_omega).sum::<f64>() / k,
        });
    }
    mean
}

/// Runs the per-iteration error study on a single scenario: every
/// replication records overall errors against the truth and optimization
/// errors against its own final iterate, and the averaged curves are
/// attached.
pub fn run_error_curve(cfg: &ExperimentConfig) -> Result<ErrorCurve> {
    cfg.validate()?;
    let size = cfg.single_size()?;
    let replications = run_replications(cfg, size)?;
    let mean = average_traces(&replications);
    Ok(ErrorCurve { replications, mean })
}

/// One row of the sample-size scaling study.
#[derive(Debug, Clone)]
pub struct ScalingRow {
    pub d: usize,
    pub m: usize,
    pub s1_star: usize,
    pub s2_star: usize,
    pub n: usize,
    /// `n / (s1_star * ln(d m))`.
    pub rescaled_w: f64,
    pub err_w_mean: f64,
    /// `n / (s2_star * ln m)`; infinite when `m = 1`.
    pub rescaled_omega: f64,
    pub err_omega_mean: f64,
}

/// Result of [`run_scaling`]: rows ordered by setting then by `n`.
#[derive(Debug, Clone)]
pub struct ScalingTable {
    pub rows: Vec<ScalingRow>,
}

impl ScalingTable {
    /// Groups rows by `(d, s1_star)` setting, in first-seen order.
    fn settings(&self) -> Vec<Vec<&ScalingRow>> {
        let mut keys: Vec<(usize, usize)> = Vec::new();
        let mut groups: Vec<Vec<&ScalingRow>> = Vec::new();
        for row in &self.rows {
            let key = (row.d, row.s1_star);
            match keys.iter().position(|&k| k == key) {
                Some(i) => groups[i].push(row),
                None => {
                    keys.push(key);
                    groups.push(vec![row]);
                }
            }
        }
        groups
    }

    /// Relative spread of `err_w * sqrt(rescaled_w)` within each setting:
    /// the largest `(max - min) / mean` over settings. Near-zero when the
    /// error follows the `1 / sqrt(rescaled n)` shape.
    pub fn rate_shape_spread(&self) -> f64 {
        let mut worst = 0.0f64;
        for group in self.settings() {
            let values: Vec<f64> = group
                .iter()
                .map(|r| r.err_w_mean * r.rescaled_w.sqrt())
                .collect();
            let (mean, _) = mean_sd(&values);
            let max = values.iter().cloned().fold(f64::MIN, f64::max);
            let min = values.iter().cloned().fold(f64::MAX, f64::min);
            if mean > 0.0 {
                worst = worst.max((max - min) / mean);
            }
        }
        worst
    }

    /// Curve-collapse statistic: for every pair of settings, each curve is
    /// linearly interpolated in `rescaled_w` at the other's points inside
    /// the shared range, and the largest relative gap
    /// `|a - b| / ((a + b) / 2)` is returned. 0 when there is no overlap.
    pub fn collapse_spread(&self) -> f64 {
        let groups = self.settings();
        let mut worst = 0.0f64;
        for i in 0..groups.len() {
            for j in i + 1..groups.len() {
                worst = worst.max(pairwise_collapse(&groups[i], &groups[j]));
            }
        }
        worst
    }
}

fn interpolate(points: &[(f64, f64)], x: f64) -> Option<f64> {
    let first = points.first()?;
    let last = points.last()?;
    if x < first.0 || x > last.0 {
        return None;
    }
    for pair in points.windows(2) {
        let (x0, y0) = pair[0];
        let (x1, y1) = pair[1];
        if x >= x0 && x <= x1 {
            if x1 == x0 {
                return Some(y0);
            }
            return Some(y0 + (y1 - y0) * (x - x0) / (x1 - x0));
        }
    }
    Some(last.1)
}

fn pairwise_collapse(a: &[&ScalingRow], b: &[&ScalingRow]) -> f64 {
    let mut curve_a: Vec<(f64, f64)> = a.iter().map(|r| (r.rescaled_w, r.err_w_mean)).collect();
    let mut curve_b: Vec<(f64, f64)> = b.iter().map(|r| (r.rescaled_w, r.err_w_mean)).collect();
    curve_a.sort_by(|p, q| p.0.total_cmp(&q.0));
    curve_b.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut worst = 0.0f64;
    let mut compare = |xs: &[(f64, f64)], other: &[(f64, f64)]| {
        for &(x, y) in xs {
            if let Some(yo) = interpolate(other, x) {
                let mid = 0.5 * (y + yo);
                if mid > 0.0 {
                    worst = worst.max((y - yo).abs() / mid);
                }
            }
        }
    };
    compare(&curve_a, &curve_b);
    compare(&curve_b, &curve_a);
    worst
}

/// Runs the scaling study over a grid of configurations, one setting per
/// configuration. Each configuration must hold at least four distinct
/// sample sizes at a fixed `(d, m)`, and the grid must span at least two
/// distinct `(d, s1_star)` settings.
///
/// # Errors
///
/// `GridTooSmall` when the grid does not meet those minimums.
pub fn run_scaling(grid: &[ExperimentConfig]) -> Result<ScalingTable> {
    let mut settings: Vec<(usize, usize)> = Vec::new();
    for cfg in grid {
        cfg.validate()?;
        let (d, m) = (cfg.sizes[0].d, cfg.sizes[0].m);
        if cfg.sizes.iter().any(|s| s.d != d || s.m != m) {
            return Err(Error::GridTooSmall {
                context: "every size in one configuration must share (d, m)".into(),
            });
        }
        let mut ns: Vec<usize> = cfg.sizes.iter().map(|s| s.n).collect();
        ns.sort_unstable();
        ns.dedup();
        if ns.len() < 4 {
            return Err(Error::GridTooSmall {
                context: format!("need at least 4 distinct n per setting, got {}", ns.len()),
            });
        }
        if !settings.contains(&(d, cfg.s1_star)) {
            settings.push((d, cfg.s1_star));
        }
    }
    if settings.len() < 2 {
        return Err(Error::GridTooSmall {
            context: format!("need at least 2 distinct (d, s1_star) settings, got {}", settings.len()),
        });
    }

    let mut rows = Vec::new();
    for cfg in grid {
        for &size in &cfg.sizes {
            let outcomes = run_replications(cfg, size)?;
            let err_w: Vec<f64> = outcomes.iter().map(|o| o.final_err_w).collect();
            let err_omega: Vec<f64> = outcomes.iter().map(|o| o.final_err_omega).collect();
            let s2_star = {
                let graph = cfg.graph.with_order(size.m)?;
                let mut rng = Rng::new(cfg.master_seed);
                crate::synthetic::make_precision(&graph, &mut rng)?.1
            };
            let log_dm = ((size.d * size.m) as f64).ln();
            let log_m = (size.m as f64).ln();
            rows.push(ScalingRow {
                d: size.d,
                m: size.m,
                s1_star: cfg.s1_star,
                s2_star,
                n: size.n,
                rescaled_w: size.n as f64 / (cfg.s1_star as f64 * log_dm),
                err_w_mean: mean_sd(&err_w).0,
                rescaled_omega: size.n as f64 / (s2_star as f64 * log_m),
                err_omega_mean: mean_sd(&err_omega).0,
            });
        }
    }
    Ok(ScalingTable { rows })
}

/// One line of the method-comparison table.
#[derive(Debug, Clone)]
pub struct ComparisonRow {
    pub method: String,
    pub est_err_mean: f64,
    pub est_err_sd: f64,
    pub pred_err_mean: f64,
    pub pred_err_sd: f64,
    pub wall_seconds: f64,
}

/// Comparison rows plus the raw per-replication outcomes they aggregate.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub rows: Vec<ComparisonRow>,
    pub replications: Vec<ReplicationOutcome>,
}

/// Compares the convex initializer against the refined estimate on one
/// scenario. The `lasso-init` row is charged the Lasso time only; the
/// `gdht` row is charged the full pipeline, initializers included.
pub fn run_comparison(cfg: &ExperimentConfig) -> Result<Comparison> {
    cfg.validate()?;
    let size = cfg.single_size()?;
    let outcomes = run_replications(cfg, size)?;

    let init_est: Vec<f64> = outcomes.iter().map(|o| o.init_err_w).collect();
    let init_pred: Vec<f64> = outcomes.iter().map(|o| o.init_pred_err).collect();
    let final_est: Vec<f64> = outcomes.iter().map(|o| o.final_err_w).collect();
    let final_pred: Vec<f64> = outcomes.iter().map(|o| o.final_pred_err).collect();
    let lasso_wall: Vec<f64> = outcomes.iter().map(|o| o.lasso_seconds).collect();
    let full_wall: Vec<f64> = outcomes
        .iter()
        .map(|o| o.lasso_seconds + o.glasso_seconds + o.fit_seconds)
        .collect();

    let (ie_mean, ie_sd) = mean_sd(&init_est);
    let (ip_mean, ip_sd) = mean_sd(&init_pred);
    let (fe_mean, fe_sd) = mean_sd(&final_est);
    let (fp_mean, fp_sd) = mean_sd(&final_pred);
    let rows = vec![
        ComparisonRow {
            method: "lasso-init".into(),
            est_err_mean: ie_mean,
            est_err_sd: ie_sd,
            pred_err_mean: ip_mean,
            pred_err_sd: ip_sd,
            wall_seconds: mean_sd(&lasso_wall).0,
        },
        ComparisonRow {
            method: "gdht".into(),
            est_err_mean: fe_mean,
            est_err_sd: fe_sd,
            pred_err_mean: fp_mean,
            pred_err_sd: fp_sd,
            wall_seconds: mean_sd(&full_wall).0,
        },
    ];
    Ok(Comparison { rows, replications: outcomes })
}
