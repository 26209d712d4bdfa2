//! Command dispatch for the `gdht` binary.
//!
//! Every command reads one config file, applies `--set` overrides, writes
//! the resolved config echo to `config.ini` in the output directory, and
//! then produces its artifacts there. Running a command again from its own
//! echo reproduces every output byte for byte.

use std::path::{Path, PathBuf};

use crate::config::{parse_config, write_config_echo, Command, RunConfig};
use crate::error::{Error, Result};
use crate::experiments::{
    auto_step_sizes, prediction_error, run_comparison, run_error_curve, run_scaling,
};
use crate::init::{
    default_lambda1, default_lambda2, glasso_init, lasso_init, GlassoConfig, LassoConfig,
};
use crate::ingest::{build_ar1_dataset, load_price_csv, log_ratio_transform, temporal_split};
use crate::io;
use crate::io::PredictionRow;
use crate::matrix::DenseMatrix;
use crate::model::{Dataset, JointParams, SolverConfig, SparsityBudget};
use crate::objective::residual_covariance;
use crate::rng::Rng;
use crate::solver::{gdht_fit, gdht_fit_resampled, FitResult};
use crate::synthetic::{make_truth, sample_dataset, sample_dataset_noiseless};

/// A parsed command line.
#[derive(Debug, Clone)]
pub struct Invocation {
    pub command: Command,
    pub config: PathBuf,
    pub overrides: Vec<String>,
    pub out: PathBuf,
}

/// Loads the config, echoes it, and runs the requested command.
///
/// # Errors
///
/// Config errors surface unchanged; a `run.command` in the file that
/// contradicts the command-line subcommand is rejected.
pub fn run(inv: &Invocation) -> Result<()> {
    let mut cfg = parse_config(&inv.config, &inv.overrides)?;
    if let Some(file_command) = cfg.command {
        if file_command != inv.command {
            return Err(Error::invalid(format!(
                "run.command is '{file_command}' but the command line says '{}'",
                inv.command
            )));
        }
    }
    cfg.command = Some(inv.command);
    std::fs::create_dir_all(&inv.out)?;
    write_config_echo(&cfg, inv.out.join("config.ini"))?;
    match inv.command {
        Command::Generate => generate(&cfg, &inv.out),
        Command::Init => init(&cfg, &inv.out),
        Command::Fit => fit(&cfg, &inv.out),
        Command::ErrorCurve => error_curve(&cfg, &inv.out),
        Command::Scaling => scaling(&cfg, &inv.out),
        Command::Compare => compare(&cfg, &inv.out),
        Command::Ar1Fit => ar1_fit(&cfg, &inv.out),
    }
}

fn require<'a>(slot: &'a Option<PathBuf>, key: &str) -> Result<&'a Path> {
    slot.as_deref().ok_or_else(|| Error::MissingKey { key: format!("paths.{key}") })
}

fn load_dataset(cfg: &RunConfig) -> Result<Dataset> {
    let x = io::read_matrix_csv(require(&cfg.paths.x, "x")?)?;
    let y = io::read_matrix_csv(require(&cfg.paths.y, "y")?)?;
    Dataset::new(x, y)
}

fn resolved_penalties(cfg: &RunConfig, data: &Dataset) -> (f64, f64) {
    let lambda1 = cfg
        .lasso
        .lambda1
        .unwrap_or_else(|| default_lambda1(data.n(), data.d(), data.m(), 1.0));
    let lambda2 =
        cfg.glasso.lambda2.unwrap_or_else(|| default_lambda2(data.n(), data.m(), 1.0));
    (lambda1, lambda2)
}

fn initialize(cfg: &RunConfig, data: &Dataset) -> Result<(DenseMatrix, DenseMatrix, f64, f64)> {
    let (lambda1, lambda2) = resolved_penalties(cfg, data);
    let lcfg = LassoConfig::new(lambda1, cfg.lasso.max_sweeps, cfg.lasso.tol)?;
    let lasso = lasso_init(data, &lcfg)?;
    let s = residual_covariance(data, &lasso.w)?;
    let gcfg =
        GlassoConfig::new(lambda2, cfg.glasso.max_sweeps, cfg.glasso.tol, cfg.glasso.ridge_floor)?;
    let glasso = glasso_init(&s, &gcfg)?;
    Ok((lasso.w, glasso.omega, lambda1, lambda2))
}

fn nonzeros(matrix: &DenseMatrix) -> usize {
    matrix.data().iter().filter(|v| **v != 0.0).count()
}

/// Explicit `solver.s1`/`s2` win; otherwise the budgets come from the truth
/// support sizes scaled by `budget_mult`, and without truth the keys are
/// required.
fn resolve_budget(
    cfg: &RunConfig,
    truth: Option<&(DenseMatrix, DenseMatrix)>,
    d: usize,
    m: usize,
) -> Result<SparsityBudget> {
    let mult = cfg.solver.budget_mult;
    let derive = |stars: usize, floor: usize| ((mult * stars as f64).ceil() as usize).max(floor);
    let s1 = match cfg.solver.s1 {
        Some(s) => s,
        None => {
            let (w_star, _) =
                truth.ok_or_else(|| Error::MissingKey { key: "solver.s1".into() })?;
            derive(nonzeros(w_star), 1)
        }
    };
    let s2 = match cfg.solver.s2 {
        Some(s) => s,
        None => {
            let (_, omega_star) =
                truth.ok_or_else(|| Error::MissingKey { key: "solver.s2".into() })?;
            derive(nonzeros(omega_star), m)
        }
    };
    Ok(SparsityBudget::new(s1, s2)?.clamped_to(d, m))
}

fn load_truth(cfg: &RunConfig) -> Result<Option<(DenseMatrix, DenseMatrix)>> {
    match (&cfg.paths.w_star, &cfg.paths.omega_star) {
        (None, None) => Ok(None),
        (Some(w), Some(o)) => Ok(Some((io::read_matrix_csv(w)?, io::read_matrix_csv(o)?))),
        _ => Err(Error::invalid("paths.w_star and paths.omega_star must be given together")),
    }
}

fn run_solver(
    cfg: &RunConfig,
    data: &Dataset,
    init: &JointParams,
    budget: SparsityBudget,
    truth: Option<(&DenseMatrix, &DenseMatrix)>,
) -> Result<(FitResult, f64, f64)> {
    let (eta1, eta2) = match cfg.eta_pair()? {
        Some(pair) => pair,
        None => auto_step_sizes(init)?,
    };
    let solver_cfg = SolverConfig::new(
        cfg.solver.iterations,
        budget,
        eta1,
        eta2,
        cfg.solver.resample,
        cfg.solver.rel_tol,
        cfg.solver.backtrack_max,
    )?;
    let result = if cfg.solver.resample {
        gdht_fit_resampled(data, init, &solver_cfg, truth, cfg.seed)?
    } else {
        gdht_fit(data, init, &solver_cfg, truth)?
    };
    for r in result.trace.records() {
        eprintln!(
            "iter={} loss={:.6e} opt_err_w={:.3e} opt_err_omega={:.3e} eta2={:.3e}",
            r.iter, r.loss, r.opt_err_w, r.opt_err_omega, r.eta2_used
        );
    }
    Ok((result, eta1, eta2))
}

fn write_fit_outputs(result: &FitResult, out: &Path) -> Result<()> {
    io::write_matrix_csv(result.params.w(), out.join("w_hat.csv"))?;
    io::write_matrix_csv(result.params.omega(), out.join("omega_hat.csv"))?;
    io::write_trace_csv(&result.trace, out.join("trace.csv"))
}

fn generate(cfg: &RunConfig, out: &Path) -> Result<()> {
    let e = &cfg.experiment;
    let graph = cfg.graph_spec()?;
    let mut rng = Rng::new(cfg.seed);
    let truth = make_truth(&graph, e.d, e.s1_star, &mut rng)?;
    let data_seed = rng.next_u64();
    let instance = if e.noiseless {
        sample_dataset_noiseless(&truth, e.n, data_seed)?
    } else {
        sample_dataset(&truth, e.n, data_seed)?
    };
    io::write_matrix_csv(instance.data.x(), out.join("x.csv"))?;
    io::write_matrix_csv(instance.data.y(), out.join("y.csv"))?;
    io::write_matrix_csv(truth.w_star(), out.join("w_star.csv"))?;
    io::write_matrix_csv(truth.omega_star(), out.join("omega_star.csv"))?;
    println!(
        "generate: n={} d={} m={} s1_star={} s2_star={} out={}",
        e.n,
        e.d,
        e.m,
        truth.s1_star(),
        truth.s2_star(),
        out.display()
    );
    Ok(())
}

fn init(cfg: &RunConfig, out: &Path) -> Result<()> {
    let data = load_dataset(cfg)?;
    let (w0, omega0, lambda1, lambda2) = initialize(cfg, &data)?;
    io::write_matrix_csv(&w0, out.join("w0.csv"))?;
    io::write_matrix_csv(&omega0, out.join("omega0.csv"))?;
    println!(
        "init: n={} d={} m={} lambda1={lambda1:.6e} lambda2={lambda2:.6e} out={}",
        data.n(),
        data.d(),
        data.m(),
        out.display()
    );
    Ok(())
}

fn fit(cfg: &RunConfig, out: &Path) -> Result<()> {
    let data = load_dataset(cfg)?;
    let w0 = io::read_matrix_csv(require(&cfg.paths.w0, "w0")?)?;
    let omega0 = io::read_matrix_csv(require(&cfg.paths.omega0, "omega0")?)?;
    let init = JointParams::new(w0, omega0)?;
    let truth = load_truth(cfg)?;
    let budget = resolve_budget(cfg, truth.as_ref(), data.d(), data.m())?;
    let truth_ref = truth.as_ref().map(|(w, o)| (w, o));
    let (result, eta1, eta2) = run_solver(cfg, &data, &init, budget, truth_ref)?;
    write_fit_outputs(&result, out)?;
    println!(
        "fit: iterations={} loss={:.6e} eta1={eta1:.6e} eta2={eta2:.6e} s1={} s2={} out={}",
        result.iterations_run,
        result.trace.last().loss,
        budget.s1(),
        budget.s2(),
        out.display()
    );
    Ok(())
}

fn error_curve(cfg: &RunConfig, out: &Path) -> Result<()> {
    let curve = run_error_curve(&cfg.experiment_config()?)?;
    io::write_mean_trace_csv(&curve.mean, out.join("mean_trace.csv"))?;
    let last = curve.mean.last().expect("a run produces at least the initial record");
    println!(
        "error-curve: iterations={} err_w={:.6e} err_omega={:.6e} out={}",
        last.iter,
        last.err_w,
        last.err_omega,
        out.display()
    );
    Ok(())
}

fn scaling(cfg: &RunConfig, out: &Path) -> Result<()> {
    let table = run_scaling(&cfg.scaling_grid()?)?;
    io::write_scaling_csv(&table, out.join("scaling.csv"))?;
    println!(
        "scaling: rows={} rate_shape_spread={:.4} collapse_spread={:.4} out={}",
        table.rows.len(),
        table.rate_shape_spread(),
        table.collapse_spread(),
        out.display()
    );
    Ok(())
}

fn compare(cfg: &RunConfig, out: &Path) -> Result<()> {
    let comparison = run_comparison(&cfg.experiment_config()?)?;
    io::write_comparison_csv(&comparison.rows, out.join("comparison.csv"))?;
    io::write_replication_csv(&comparison.replications, out.join("replications.csv"))?;
    for r in &comparison.rows {
        println!(
            "compare: method={} est_err_mean={:.6e} est_err_sd={:.2e} pred_err_mean={:.6e} \
pred_err_sd={:.2e} wall_seconds={:.3}",
            r.method, r.est_err_mean, r.est_err_sd, r.pred_err_mean, r.pred_err_sd, r.wall_seconds
        );
    }
    Ok(())
}

fn ar1_fit(cfg: &RunConfig, out: &Path) -> Result<()> {
    let panel = load_price_csv(require(&cfg.paths.prices, "prices")?)?;
    let returns = log_ratio_transform(&panel);
    let dataset = build_ar1_dataset(&returns)?;
    let (train, test) = temporal_split(&dataset, cfg.experiment.train_fraction)?;
    let (w0, omega0, lambda1, lambda2) = initialize(cfg, &train)?;
    let init = JointParams::new(w0, omega0)?;
    let budget = resolve_budget(cfg, None, train.d(), train.m())?;
    let (result, _, _) = run_solver(cfg, &train, &init, budget, None)?;
    write_fit_outputs(&result, out)?;
    let rows = vec![
        PredictionRow {
            method: "lasso-init".into(),
            train_pred_err: prediction_error(&train, init.w())?,
            test_pred_err: prediction_error(&test, init.w())?,
        },
        PredictionRow {
            method: "gdht".into(),
            train_pred_err: prediction_error(&train, result.params.w())?,
            test_pred_err: prediction_error(&test, result.params.w())?,
        },
    ];
    io::write_prediction_csv(&rows, out.join("prediction.csv"))?;
    for r in &rows {
        println!(
            "ar1-fit: method={} train_pred_err={:.6e} test_pred_err={:.6e} \
lambda1={lambda1:.6e} lambda2={lambda2:.6e} out={}",
            r.method,
            r.train_pred_err,
            r.test_pred_err,
            out.display()
        );
    }
    Ok(())
}
