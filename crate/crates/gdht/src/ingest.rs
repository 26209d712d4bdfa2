//! Price-panel ingestion: CSV parsing, the log-ratio return transform, and
//! the lag-one autoregressive dataset used to fit returns on the previous
//! day's returns.
//!
//! The expected file layout is a header line of ticker names followed by one
//! line per day of strictly positive prices, oldest day first. Returns are
//! `ln(P[t+1][j] / P[t][j])`, and the autoregressive dataset pairs each
//! return row with the next one, so a temporal train/test split keeps all
//! training days strictly before the test days.

use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::model::Dataset;

/// A parsed price table: one column per ticker, one row per day, oldest
/// first, all prices strictly positive.
#[derive(Debug, Clone)]
pub struct PricePanel {
    tickers: Vec<String>,
    prices: DenseMatrix,
}

impl PricePanel {
    /// Line numbers in errors refer to the canonical CSV layout: the header
    /// on line 1, day `t` (0-based) on line `t + 2`.
    ///
    /// # Errors
    ///
    /// `DimensionMismatch` if the column count differs from the ticker
    /// count, `TooFewRows` for fewer than two days, `NonPositivePrice` for
    /// any entry that is not strictly positive.
    pub fn new(tickers: Vec<String>, prices: DenseMatrix) -> Result<Self> {
        if tickers.is_empty() || tickers.len() != prices.cols() {
            return Err(Error::dim(format!(
                "{} tickers but {} price columns",
                tickers.len(),
                prices.cols()
            )));
        }
        if prices.rows() < 2 {
            return Err(Error::TooFewRows {
                context: format!("a price panel needs at least 2 days, got {}", prices.rows()),
            });
        }
        for t in 0..prices.rows() {
            for j in 0..prices.cols() {
                let value = prices.get(t, j);
                if value <= 0.0 {
                    return Err(Error::NonPositivePrice { line: t + 2, value });
                }
            }
        }
        Ok(PricePanel { tickers, prices })
    }

    pub fn tickers(&self) -> &[String] {
        &self.tickers
    }

    pub fn prices(&self) -> &DenseMatrix {
        &self.prices
    }

    /// Number of days (rows).
    pub fn days(&self) -> usize {
        self.prices.rows()
    }
}

/// Loads a price panel from a CSV file: a header of ticker names, then one
/// comma-separated row of positive decimal prices per day, oldest first.
/// Blank lines are skipped; decimals use `.` regardless of locale.
///
/// # Errors
///
/// `ParseError` (with the 1-based line number) for an empty header, a row
/// with the wrong field count, or an unparseable or non-finite value;
/// `NonPositivePrice` for a zero or negative price; `TooFewRows` for fewer
/// than two data rows.
pub fn load_price_csv(path: impl AsRef<Path>) -> Result<PricePanel> {
    let text = std::fs::read_to_string(path)?;
    let mut tickers: Option<Vec<String>> = None;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        let Some(names) = &tickers else {
            if fields.iter().any(|f| f.is_empty()) {
                return Err(Error::ParseError {
                    line,
                    context: "header contains an empty ticker name".into(),
                });
            }
            tickers = Some(fields.iter().map(|f| f.to_string()).collect());
            continue;
        };
        if fields.len() != names.len() {
            return Err(Error::ParseError {
                line,
                context: format!("expected {} fields, got {}", names.len(), fields.len()),
            });
        }
        let mut row = Vec::with_capacity(fields.len());
        for field in fields {
            let value: f64 = field.parse().map_err(|_| Error::ParseError {
                line,
                context: format!("'{field}' is not a number"),
            })?;
            if !value.is_finite() {
                return Err(Error::ParseError {
                    line,
                    context: format!("price '{field}' is not finite"),
                });
            }
            if value <= 0.0 {
                return Err(Error::NonPositivePrice { line, value });
            }
            row.push(value);
        }
        rows.push(row);
    }
    let Some(tickers) = tickers else {
        return Err(Error::TooFewRows { context: "price file is empty".into() });
    };
    if rows.len() < 2 {
        return Err(Error::TooFewRows {
            context: format!("a price panel needs at least 2 data rows, got {}", rows.len()),
        });
    }
    let m = tickers.len();
    let prices = DenseMatrix::new(rows.len(), m, rows.into_iter().flatten().collect())?;
    PricePanel::new(tickers, prices)
}

/// Day-over-day log returns: entry `(t, j)` is
/// `ln(P[t+1][j]) - ln(P[t][j])`, one row fewer than the panel.
///
/// # Examples
///
/// ```
/// use gdht::ingest::{log_ratio_transform, PricePanel};
/// use gdht::matrix::DenseMatrix;
///
/// let prices = DenseMatrix::new(3, 1, vec![1.0, 1.0_f64.exp(), 2.0_f64.exp()]).unwrap();
/// let panel = PricePanel::new(vec!["A".into()], prices).unwrap();
/// let returns = log_ratio_transform(&panel);
/// assert!((returns.get(0, 0) - 1.0).abs() < 1e-12);
/// assert!((returns.get(1, 0) - 1.0).abs() < 1e-12);
/// ```
pub fn log_ratio_transform(panel: &PricePanel) -> DenseMatrix {
    let p = panel.prices();
    DenseMatrix::from_fn(p.rows() - 1, p.cols(), |t, j| {
        p.get(t + 1, j).ln() - p.get(t, j).ln()
    })
    .expect("logs of positive finite prices are finite")
}

/// Builds the lag-one autoregressive dataset from a return matrix: `X` is
/// rows `0..T-2` and `Y` is rows `1..T-1`, so each sample predicts a day's
/// returns from the previous day's. The result has `n = T-1` and
/// `d = m = ` column count.
///
/// # Errors
///
/// `TooFewRows` when the return matrix has fewer than two rows.
pub fn build_ar1_dataset(returns: &DenseMatrix) -> Result<Dataset> {
    if returns.rows() < 2 {
        return Err(Error::TooFewRows {
            context: format!(
                "an autoregressive dataset needs at least 2 return rows, got {}",
                returns.rows()
            ),
        });
    }
    let n = returns.rows() - 1;
    let x = DenseMatrix::from_fn(n, returns.cols(), |i, j| returns.get(i, j))?;
    let y = DenseMatrix::from_fn(n, returns.cols(), |i, j| returns.get(i + 1, j))?;
    Dataset::new(x, y)
}

/// Splits a time-ordered dataset so every training row is strictly earlier
/// than every test row: the first `floor(n * train_fraction)` rows train
/// (clamped so both halves are nonempty).
///
/// # Errors
///
/// `InvalidValue` unless `train_fraction` lies in `(0, 1)` and the dataset
/// has at least two rows.
pub fn temporal_split(data: &Dataset, train_fraction: f64) -> Result<(Dataset, Dataset)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::invalid(format!(
            "train_fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    if data.n() < 2 {
        return Err(Error::invalid(format!(
            "a temporal split needs at least 2 rows, got {}",
            data.n()
        )));
    }
    let cut = ((data.n() as f64 * train_fraction).floor() as usize).clamp(1, data.n() - 1);
    let train: Vec<usize> = (0..cut).collect();
    let test: Vec<usize> = (cut..data.n()).collect();
    Ok((data.row_subset(&train)?, data.row_subset(&test)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate;
    use crate::model::JointParams;
    use proptest::prelude::*;
    use std::io::Write;

    fn panel_from(rows: usize, cols: usize, values: Vec<f64>) -> PricePanel {
        let tickers = (0..cols).map(|j| format!("T{j}")).collect();
        PricePanel::new(tickers, DenseMatrix::new(rows, cols, values).unwrap()).unwrap()
    }

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        file.write_all(content.as_bytes()).unwrap();
        file
    }

    #[test]
    fn loads_a_two_by_two_panel() {
        let file = write_temp("A,B\n1,2\n2,4\n");
        let panel = load_price_csv(file.path()).unwrap();
        assert_eq!(panel.tickers(), &["A".to_string(), "B".to_string()]);
        assert_eq!(panel.days(), 2);
        assert_eq!(panel.prices().get(0, 1), 2.0);
        assert_eq!(panel.prices().get(1, 0), 2.0);
    }

    #[test]
    fn tolerates_whitespace_and_blank_lines() {
        let file = write_temp("A, B\n 1 , 2\n\n2,4\n");
        let panel = load_price_csv(file.path()).unwrap();
        assert_eq!(panel.days(), 2);
        assert_eq!(panel.prices().get(0, 0), 1.0);
    }

    #[test]
    fn rejects_nonpositive_price_with_its_line() {
        let file = write_temp("A,B\n1,2\n1,-3\n");
        match load_price_csv(file.path()).unwrap_err() {
            Error::NonPositivePrice { line, value } => {
                assert_eq!(line, 3);
                assert_eq!(value, -3.0);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn rejects_malformed_rows_with_their_line() {
        let file = write_temp("A,B\n1,2\n1,abc\n");
        assert!(matches!(
            load_price_csv(file.path()).unwrap_err(),
            Error::ParseError { line: 3, .. }
        ));
        let file = write_temp("A,B\n1,2,3\n");
        assert!(matches!(
            load_price_csv(file.path()).unwrap_err(),
            Error::ParseError { line: 2, .. }
        ));
        let file = write_temp("A,B\n1,inf\n");
        assert!(matches!(
            load_price_csv(file.path()).unwrap_err(),
            Error::ParseError { line: 2, .. }
        ));
    }

    #[test]
    fn rejects_short_files() {
        let file = write_temp("A,B\n1,2\n");
        assert!(matches!(load_price_csv(file.path()).unwrap_err(), Error::TooFewRows { .. }));
        let file = write_temp("");
        assert!(matches!(load_price_csv(file.path()).unwrap_err(), Error::TooFewRows { .. }));
    }

    #[test]
    fn log_ratio_of_e_powers_is_ones() {
        let e = std::f64::consts::E;
        let panel = panel_from(3, 1, vec![1.0, e, e * e]);
        let returns = log_ratio_transform(&panel);
        assert_eq!(returns.rows(), 2);
        assert!((returns.get(0, 0) - 1.0).abs() < 1e-12);
        assert!((returns.get(1, 0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn log_ratio_matches_direct_evaluation() {
        let panel = panel_from(2, 1, vec![100.0, 110.0]);
        let returns = log_ratio_transform(&panel);
        assert!((returns.get(0, 0) - 0.0953102).abs() < 1e-7);
        assert_eq!(returns.get(0, 0), 110.0f64.ln() - 100.0f64.ln());

        let flat = panel_from(3, 2, vec![5.0, 7.0, 5.0, 7.0, 5.0, 7.0]);
        let zeros = log_ratio_transform(&flat);
        assert_eq!(zeros.max_abs(), 0.0);
    }

    #[test]
    fn ar1_dataset_shifts_rows_by_one() {
        let returns = DenseMatrix::from_fn(3, 2, |i, j| (10 * i + j) as f64).unwrap();
        let data = build_ar1_dataset(&returns).unwrap();
        assert_eq!((data.n(), data.d(), data.m()), (2, 2, 2));
        assert_eq!(data.x().row(0), returns.row(0));
        assert_eq!(data.x().row(1), returns.row(1));
        assert_eq!(data.y().row(0), returns.row(1));
        assert_eq!(data.y().row(1), returns.row(2));

        let two = DenseMatrix::from_fn(2, 3, |i, j| (i + j) as f64).unwrap();
        assert_eq!(build_ar1_dataset(&two).unwrap().n(), 1);
        let one = DenseMatrix::zeros(1, 3);
        assert!(matches!(build_ar1_dataset(&one).unwrap_err(), Error::TooFewRows { .. }));
    }

    #[test]
    fn ar1_dataset_fits_square_parameter_shapes() {
        let returns = DenseMatrix::from_fn(6, 3, |i, j| ((i * 7 + j) % 5) as f64 * 0.1 + 0.1).unwrap();
        let data = build_ar1_dataset(&returns).unwrap();
        let params =
            JointParams::new(DenseMatrix::zeros(3, 3), DenseMatrix::identity(3)).unwrap();
        assert!(validate(&data, &params).is_ok());
    }

    #[test]
    fn temporal_split_keeps_training_strictly_earlier() {
        let returns = DenseMatrix::from_fn(11, 2, |i, j| (i * 2 + j) as f64 + 1.0).unwrap();
        let data = build_ar1_dataset(&returns).unwrap();
        let (train, test) = temporal_split(&data, 0.5).unwrap();
        assert_eq!(train.n(), 5);
        assert_eq!(test.n(), 5);
        assert_eq!(train.x().row(0), data.x().row(0));
        assert_eq!(test.x().row(0), data.x().row(5));
        let last_train = train.x().get(train.n() - 1, 0);
        let first_test = test.x().get(0, 0);
        assert!(last_train < first_test);

        assert!(temporal_split(&data, 0.0).is_err());
        assert!(temporal_split(&data, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn log_ratio_inverts_exponential_cumsum(
            start in proptest::collection::vec(0.1f64..10.0, 1..4),
            steps in proptest::collection::vec(-0.5f64..0.5, 2..10),
        ) {
            let m = start.len();
            let t = steps.len() / m + 2;
            let returns = DenseMatrix::from_fn(t - 1, m, |i, j| {
                steps[(i * m + j) % steps.len()]
            }).unwrap();
            let mut prices = vec![0.0; t * m];
            for j in 0..m {
                prices[j] = start[j];
                for i in 1..t {
                    prices[i * m + j] = prices[(i - 1) * m + j] * returns.get(i - 1, j).exp();
                }
            }
            let panel = panel_from(t, m, prices);
            let recovered = log_ratio_transform(&panel);
            for i in 0..t - 1 {
                for j in 0..m {
                    prop_assert!((recovered.get(i, j) - returns.get(i, j)).abs() <= 1e-12);
                }
            }
        }
    }
}
