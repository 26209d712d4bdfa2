//! CSV persistence with bit-exact float round-trips.
//!
//! Every float is written with 17 significant digits (`{:.16e}`), which is
//! enough to reconstruct the exact 64-bit value on read. Matrix files are
//! headerless; table files carry a fixed header line that readers verify.

use std::path::Path;

use crate::error::{Error, Result};
use crate::experiments::{ComparisonRow, MeanTraceRecord, ReplicationOutcome, ScalingTable};
use crate::matrix::DenseMatrix;
use crate::solver::{SolverTrace, TraceRecord};

/// Header of the per-iteration trace table.
pub const TRACE_HEADER: &str = "iter,loss,err_w,err_omega,opt_err_w,opt_err_omega,eta2_used";

/// Header of the replication-averaged trace table.
pub const MEAN_TRACE_HEADER: &str = "iter,loss,err_w,err_omega,opt_err_w,opt_err_omega";

/// Header of the method-comparison table.
pub const COMPARISON_HEADER: &str =
    "method,est_err_mean,est_err_sd,pred_err_mean,pred_err_sd,wall_seconds";

/// Header of the per-replication comparison samples.
pub const REPLICATION_HEADER: &str = "replication,init_est_err,final_est_err,init_pred_err,\
final_pred_err,lasso_seconds,glasso_seconds,fit_seconds";

/// Header of the rescaled-sample-size table.
pub const SCALING_HEADER: &str =
    "d,m,s1_star,s2_star,n,rescaled_w,err_w_mean,rescaled_omega,err_omega_mean";

/// Header of the held-out prediction table written by real-data fits.
pub const PREDICTION_HEADER: &str = "method,train_pred_err,test_pred_err";

fn fmt(value: f64) -> String {
    format!("{value:.16e}")
}

fn fmt_opt(value: Option<f64>) -> String {
    value.map(fmt).unwrap_or_default()
}

fn parse_field(field: &str, line: usize) -> Result<f64> {
    field.trim().parse().map_err(|_| Error::ParseError {
        line,
        context: format!("'{field}' is not a number"),
    })
}

fn parse_opt_field(field: &str, line: usize) -> Result<Option<f64>> {
    if field.trim().is_empty() {
        Ok(None)
    } else {
        parse_field(field, line).map(Some)
    }
}

fn parse_count(field: &str, line: usize) -> Result<usize> {
    field.trim().parse().map_err(|_| Error::ParseError {
        line,
        context: format!("'{field}' is not a nonnegative integer"),
    })
}

fn check_header(actual: &str, expected: &'static str) -> Result<()> {
    if actual.trim_end() != expected {
        return Err(Error::ParseError {
            line: 1,
            context: format!("expected header '{expected}', got '{actual}'"),
        });
    }
    Ok(())
}

fn split_line(line: &str, expected: usize, number: usize) -> Result<Vec<&str>> {
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != expected {
        return Err(Error::ParseError {
            line: number,
            context: format!("expected {expected} fields, got {}", fields.len()),
        });
    }
    Ok(fields)
}

/// Writes a headerless comma-separated matrix, one row per line.
pub fn write_matrix_csv(matrix: &DenseMatrix, path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::new();
    for i in 0..matrix.rows() {
        let row: Vec<String> = matrix.row(i).iter().map(|&v| fmt(v)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Reads a headerless comma-separated matrix, requiring every row to have
/// the same field count as the first.
///
/// # Errors
///
/// `TooFewRows` for an empty file, `RaggedRows` for inconsistent field
/// counts, `ParseError` for unparseable values.
pub fn read_matrix_csv(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    let text = std::fs::read_to_string(path)?;
    let mut values = Vec::new();
    let mut cols = 0usize;
    let mut rows = 0usize;
    for (index, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if rows == 0 {
            cols = fields.len();
        } else if fields.len() != cols {
            return Err(Error::RaggedRows { row: index + 1, got: fields.len(), expected: cols });
        }
        for field in fields {
            values.push(parse_field(field, index + 1)?);
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(Error::TooFewRows { context: "matrix file has no rows".into() });
    }
    DenseMatrix::new(rows, cols, values)
}

/// Writes a fit trace with the [`TRACE_HEADER`] schema. The error columns
/// are left empty (not zero) when the fit ran without ground truth.
pub fn write_trace_csv(trace: &SolverTrace, path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    for r in trace.records() {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.iter,
            fmt(r.loss),
            fmt_opt(r.err_w),
            fmt_opt(r.err_omega),
            fmt(r.opt_err_w),
            fmt(r.opt_err_omega),
            fmt(r.eta2_used),
        ));
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Reads a trace table back into records.
pub fn read_trace_csv(path: impl AsRef<Path>) -> Result<Vec<TraceRecord>> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or(Error::TooFewRows { context: "trace file is empty".into() })?;
    check_header(header, TRACE_HEADER)?;
    let mut records = Vec::new();
    for (index, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let f = split_line(line, 7, index + 1)?;
        records.push(TraceRecord {
            iter: parse_count(f[0], index + 1)?,
            loss: parse_field(f[1], index + 1)?,
            err_w: parse_opt_field(f[2], index + 1)?,
            err_omega: parse_opt_field(f[3], index + 1)?,
            opt_err_w: parse_field(f[4], index + 1)?,
            opt_err_omega: parse_field(f[5], index + 1)?,
            eta2_used: parse_field(f[6], index + 1)?,
        });
    }
    Ok(records)
}

/// Writes the replication-averaged error curves with the
/// [`MEAN_TRACE_HEADER`] schema.
pub fn write_mean_trace_csv(mean: &[MeanTraceRecord], path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::from(MEAN_TRACE_HEADER);
    out.push('\n');
    for r in mean {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.iter,
            fmt(r.loss),
            fmt(r.err_w),
            fmt(r.err_omega),
            fmt(r.opt_err_w),
            fmt(r.opt_err_omega),
        ));
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Writes the method-comparison table with the [`COMPARISON_HEADER`] schema.
pub fn write_comparison_csv(rows: &[ComparisonRow], path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::from(COMPARISON_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.method,
            fmt(r.est_err_mean),
            fmt(r.est_err_sd),
            fmt(r.pred_err_mean),
            fmt(r.pred_err_sd),
            fmt(r.wall_seconds),
        ));
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Reads a method-comparison table.
pub fn read_comparison_csv(path: impl AsRef<Path>) -> Result<Vec<ComparisonRow>> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or(Error::TooFewRows { context: "comparison file is empty".into() })?;
    check_header(header, COMPARISON_HEADER)?;
    let mut rows = Vec::new();
    for (index, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let f = split_line(line, 6, index + 1)?;
        rows.push(ComparisonRow {
            method: f[0].trim().to_string(),
            est_err_mean: parse_field(f[1], index + 1)?,
            est_err_sd: parse_field(f[2], index + 1)?,
            pred_err_mean: parse_field(f[3], index + 1)?,
            pred_err_sd: parse_field(f[4], index + 1)?,
            wall_seconds: parse_field(f[5], index + 1)?,
        });
    }
    Ok(rows)
}

/// One parsed line of the per-replication comparison samples.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationRow {
    pub replication: usize,
    pub init_est_err: f64,
    pub final_est_err: f64,
    pub init_pred_err: f64,
    pub final_pred_err: f64,
    pub lasso_seconds: f64,
    pub glasso_seconds: f64,
    pub fit_seconds: f64,
}

/// Writes per-replication comparison samples with the
/// [`REPLICATION_HEADER`] schema, so the aggregated table can be recomputed
/// from disk.
pub fn write_replication_csv(
    outcomes: &[ReplicationOutcome],
    path: impl AsRef<Path>,
) -> Result<()> {
    let mut out = String::from(REPLICATION_HEADER);
    out.push('\n');
    for o in outcomes {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            o.replication,
            fmt(o.init_err_w),
            fmt(o.final_err_w),
            fmt(o.init_pred_err),
            fmt(o.final_pred_err),
            fmt(o.lasso_seconds),
            fmt(o.glasso_seconds),
            fmt(o.fit_seconds),
        ));
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Reads per-replication comparison samples.
pub fn read_replication_csv(path: impl AsRef<Path>) -> Result<Vec<ReplicationRow>> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or(Error::TooFewRows { context: "replication file is empty".into() })?;
    check_header(header, REPLICATION_HEADER)?;
    let mut rows = Vec::new();
    for (index, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let f = split_line(line, 8, index + 1)?;
        rows.push(ReplicationRow {
            replication: parse_count(f[0], index + 1)?,
            init_est_err: parse_field(f[1], index + 1)?,
            final_est_err: parse_field(f[2], index + 1)?,
            init_pred_err: parse_field(f[3], index + 1)?,
            final_pred_err: parse_field(f[4], index + 1)?,
            lasso_seconds: parse_field(f[5], index + 1)?,
            glasso_seconds: parse_field(f[6], index + 1)?,
            fit_seconds: parse_field(f[7], index + 1)?,
        });
    }
    Ok(rows)
}

/// In- and out-of-sample prediction error of one method on a real dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionRow {
    pub method: String,
    pub train_pred_err: f64,
    pub test_pred_err: f64,
}

/// Writes the held-out prediction table with the [`PREDICTION_HEADER`]
/// schema.
pub fn write_prediction_csv(rows: &[PredictionRow], path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::from(PREDICTION_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{}\n",
            r.method,
            fmt(r.train_pred_err),
            fmt(r.test_pred_err),
        ));
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Writes the rescaled-sample-size table with the [`SCALING_HEADER`] schema.
pub fn write_scaling_csv(table: &ScalingTable, path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::from(SCALING_HEADER);
    out.push('\n');
    for r in &table.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.d,
            r.m,
            r.s1_star,
            r.s2_star,
            r.n,
            fmt(r.rescaled_w),
            fmt(r.err_w_mean),
            fmt(r.rescaled_omega),
            fmt(r.err_omega_mean),
        ));
    }
    std::fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::mean_sd;
    use crate::rng::Rng;
    use proptest::prelude::*;

    fn temp_path(name: &str) -> (tempfile::TempDir, std::path::PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(name);
        (dir, path)
    }

    #[test]
    fn matrix_round_trip_is_bit_exact() {
        let mut rng = Rng::new(5);
        let matrix = DenseMatrix::from_fn(5, 3, |_, _| rng.normal() * 10f64.powi(rng.next_below(20) as i32 - 10)).unwrap();
        let (_dir, path) = temp_path("m.csv");
        write_matrix_csv(&matrix, &path).unwrap();
        let back = read_matrix_csv(&path).unwrap();
        assert_eq!(matrix.rows(), back.rows());
        for i in 0..5 {
            for j in 0..3 {
                assert_eq!(matrix.get(i, j).to_bits(), back.get(i, j).to_bits());
            }
        }
    }

    #[test]
    fn matrix_reader_rejects_bad_files() {
        let (_dir, path) = temp_path("m.csv");
        std::fs::write(&path, "1,2\n3\n").unwrap();
        assert!(matches!(
            read_matrix_csv(&path).unwrap_err(),
            Error::RaggedRows { row: 2, got: 1, expected: 2 }
        ));
        std::fs::write(&path, "").unwrap();
        assert!(matches!(read_matrix_csv(&path).unwrap_err(), Error::TooFewRows { .. }));
        std::fs::write(&path, "1,x\n").unwrap();
        assert!(matches!(read_matrix_csv(&path).unwrap_err(), Error::ParseError { line: 1, .. }));
    }

    #[test]
    fn trace_headers_are_pinned() {
        assert_eq!(TRACE_HEADER, "iter,loss,err_w,err_omega,opt_err_w,opt_err_omega,eta2_used");
        assert_eq!(
            COMPARISON_HEADER,
            "method,est_err_mean,est_err_sd,pred_err_mean,pred_err_sd,wall_seconds"
        );
    }

    fn tiny_trace(with_truth: bool) -> SolverTrace {
        use crate::model::{JointParams, SolverConfig, SparsityBudget};
        use crate::synthetic::{make_truth, sample_dataset, GraphSpec};

        let mut rng = Rng::new(9);
        let spec = GraphSpec::band(2).unwrap();
        let truth = make_truth(&spec, 4, 3, &mut rng).unwrap();
        let inst = sample_dataset(&truth, 40, 7).unwrap();
        let init = JointParams::new(
            DenseMatrix::zeros(4, 2),
            DenseMatrix::identity(2),
        )
        .unwrap();
        let budget = SparsityBudget::new(3, 4).unwrap();
        let cfg = SolverConfig::new(3, budget, 0.1, 0.05, false, 0.0, 30).unwrap();
        let truth_ref = with_truth.then(|| (truth.w_star(), truth.omega_star()));
        crate::solver::gdht_fit(&inst.data, &init, &cfg, truth_ref).unwrap().trace
    }

    #[test]
    fn trace_round_trip_preserves_empty_error_columns() {
        for with_truth in [false, true] {
            let trace = tiny_trace(with_truth);
            let (_dir, path) = temp_path("t.csv");
            write_trace_csv(&trace, &path).unwrap();
            let text = std::fs::read_to_string(&path).unwrap();
            assert!(text.starts_with(TRACE_HEADER));
            if !with_truth {
                assert!(text.lines().nth(1).unwrap().contains(",,"));
            }
            let back = read_trace_csv(&path).unwrap();
            assert_eq!(back.len(), trace.len());
            for (a, b) in trace.records().iter().zip(&back) {
                assert_eq!(a.iter, b.iter);
                assert_eq!(a.loss.to_bits(), b.loss.to_bits());
                assert_eq!(a.err_w.map(f64::to_bits), b.err_w.map(f64::to_bits));
                assert_eq!(a.err_omega.map(f64::to_bits), b.err_omega.map(f64::to_bits));
                assert_eq!(a.opt_err_w.to_bits(), b.opt_err_w.to_bits());
                assert_eq!(a.eta2_used.to_bits(), b.eta2_used.to_bits());
            }
        }
    }

    #[test]
    fn comparison_round_trip_and_recomputation() {
        let rows = vec![
            ComparisonRow {
                method: "lasso-init".into(),
                est_err_mean: 0.5,
                est_err_sd: 0.01,
                pred_err_mean: 1.2,
                pred_err_sd: 0.02,
                wall_seconds: 0.3,
            },
            ComparisonRow {
                method: "gdht".into(),
                est_err_mean: 0.15,
                est_err_sd: 0.005,
                pred_err_mean: 1.1,
                pred_err_sd: 0.015,
                wall_seconds: 0.9,
            },
        ];
        let (_dir, path) = temp_path("c.csv");
        write_comparison_csv(&rows, &path).unwrap();
        let back = read_comparison_csv(&path).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[0].method, "lasso-init");
        assert_eq!(back[1].est_err_mean.to_bits(), rows[1].est_err_mean.to_bits());

        std::fs::write(&path, "wrong,header\n").unwrap();
        assert!(matches!(read_comparison_csv(&path).unwrap_err(), Error::ParseError { line: 1, .. }));
    }

    #[test]
    fn replication_samples_recompute_the_aggregates() {
        let mut cfg = crate::experiments::ExperimentConfig::standard();
        cfg.sizes = vec![crate::experiments::ScenarioSize { n: 60, d: 5, m: 3 }];
        cfg.graph = crate::synthetic::GraphSpec::band(3).unwrap();
        cfg.s1_star = 4;
        cfg.replications = 3;
        cfg.solver.iterations = 4;
        let cmp = crate::experiments::run_comparison(&cfg).unwrap();
        let (_dir, path) = temp_path("r.csv");
        write_replication_csv(&cmp.replications, &path).unwrap();
        let back = read_replication_csv(&path).unwrap();
        assert_eq!(back.len(), 3);

        let est: Vec<f64> = back.iter().map(|r| r.final_est_err).collect();
        let (mean, sd) = mean_sd(&est);
        assert_eq!(mean.to_bits(), cmp.rows[1].est_err_mean.to_bits());
        assert_eq!(sd.to_bits(), cmp.rows[1].est_err_sd.to_bits());
        let wall: Vec<f64> = back
            .iter()
            .map(|r| r.lasso_seconds + r.glasso_seconds + r.fit_seconds)
            .collect();
        assert_eq!(mean_sd(&wall).0.to_bits(), cmp.rows[1].wall_seconds.to_bits());
    }

    proptest! {
        #[test]
        fn arbitrary_finite_matrices_round_trip(values in proptest::collection::vec(
            prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO,
            6,
        )) {
            let matrix = DenseMatrix::new(2, 3, values.clone()).unwrap();
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("p.csv");
            write_matrix_csv(&matrix, &path).unwrap();
            let back = read_matrix_csv(&path).unwrap();
            for (i, v) in values.iter().enumerate() {
                prop_assert_eq!(v.to_bits(), back.get(i / 3, i % 3).to_bits());
            }
        }
    }
}
