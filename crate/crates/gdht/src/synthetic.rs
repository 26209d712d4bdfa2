//! Seeded generators for ground truths and Gaussian datasets.
//!
//! A ground truth consists of a design covariance with entries
//! `0.6^|i-j|`, a sparse precision matrix drawn from one of three graph
//! families, and a sparse coefficient matrix with entries bounded away from
//! zero. Datasets are sampled by applying Cholesky factors to standard
//! normal vectors from the crate's own generator, so every instance is
//! reproducible bit for bit from its seed on any platform.
//!
//! Graph families:
//!
//! - `Band`: tridiagonal, diagonal 1 and neighbors 0.4; positive definite
//!   for every order without adjustment.
//! - `Hub`: indices split into consecutive groups, the lowest index of each
//!   group acting as its center; the center couples to every member.
//! - `ScaleFree`: identity plus a weighted preferential-attachment
//!   adjacency.
//!
//! Hub and scale-free candidates may be indefinite, so their spectra are
//! shifted: when the smallest eigenvalue is at most `pd_margin`, the matrix
//! gets `(|lambda_min| + pd_margin) I` added.

use crate::error::{Error, Result};
use crate::matrix::{cholesky, min_eigenvalue_sym, spd_inverse, DenseMatrix};
use crate::model::{Dataset, GroundTruth};
use crate::rng::Rng;

/// Default off-diagonal magnitude for hub and scale-free graphs.
pub const DEFAULT_HUB_VALUE: f64 = 0.3;
/// Default eigenvalue margin for the positive-definiteness shift.
pub const DEFAULT_PD_MARGIN: f64 = 0.1;

/// The three precision-graph families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphKind {
    Band,
    Hub,
    ScaleFree,
}

/// A validated description of the precision matrix to generate.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSpec {
    kind: GraphKind,
    m: usize,
    hub_groups: usize,
    hub_value: f64,
    pd_margin: f64,
}

impl GraphSpec {
    /// Tridiagonal precision of order `m`.
    pub fn band(m: usize) -> Result<Self> {
        Self::new(GraphKind::Band, m, 1, DEFAULT_HUB_VALUE, DEFAULT_PD_MARGIN)
    }

    /// Hub precision with `groups` consecutive groups.
    pub fn hub(m: usize, groups: usize, hub_value: f64, pd_margin: f64) -> Result<Self> {
        Self::new(GraphKind::Hub, m, groups, hub_value, pd_margin)
    }

    /// Scale-free precision from a preferential-attachment graph.
    pub fn scale_free(m: usize, hub_value: f64, pd_margin: f64) -> Result<Self> {
        Self::new(GraphKind::ScaleFree, m, 1, hub_value, pd_margin)
    }

    pub fn new(
        kind: GraphKind,
        m: usize,
        hub_groups: usize,
        hub_value: f64,
        pd_margin: f64,
    ) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("graph order m must be at least 1"));
        }
        if kind == GraphKind::ScaleFree && m < 2 {
            return Err(Error::invalid("a scale-free graph needs m >= 2"));
        }
        if kind == GraphKind::Hub && !(1..=m).contains(&hub_groups) {
            return Err(Error::invalid(format!(
                "hub_groups must lie in 1..={m}, got {hub_groups}"
            )));
        }
        if !hub_value.is_finite() {
            return Err(Error::invalid(format!("hub_value must be finite, got {hub_value}")));
        }
        if !(pd_margin.is_finite() && pd_margin > 0.0) {
            return Err(Error::invalid(format!(
                "pd_margin must be finite and > 0, got {pd_margin}"
            )));
        }
        Ok(Self { kind, m, hub_groups, hub_value, pd_margin })
    }

    /// The same family and parameters at a different order, revalidated.
    pub fn with_order(&self, m: usize) -> Result<Self> {
        Self::new(self.kind, m, self.hub_groups, self.hub_value, self.pd_margin)
    }

    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn hub_groups(&self) -> usize {
        self.hub_groups
    }

    pub fn hub_value(&self) -> f64 {
        self.hub_value
    }

    pub fn pd_margin(&self) -> f64 {
        self.pd_margin
    }
}

/// A sampled dataset together with the truth that generated it.
///
/// The stored noise is defined as `Y - X W*` with the crate's own matrix
/// product, so recomputing that difference reproduces it bit for bit.
#[derive(Debug, Clone)]
pub struct SyntheticInstance {
    pub truth: GroundTruth,
    pub data: Dataset,
    pub noise: DenseMatrix,
    pub seed: u64,
}

/// Design covariance with entries `0.6^|i-j|`.
///
/// # Examples
///
/// ```
/// let sigma = gdht::synthetic::make_sigma_x(3).unwrap();
/// assert_eq!(sigma.get(0, 2), 0.36);
/// assert_eq!(sigma.get(1, 1), 1.0);
/// ```
pub fn make_sigma_x(d: usize) -> Result<DenseMatrix> {
    if d == 0 {
        return Err(Error::invalid("d must be at least 1"));
    }
    DenseMatrix::from_fn(d, d, |i, j| 0.6f64.powi((i as i64 - j as i64).unsigned_abs() as i32))
}

/// Preferential-attachment adjacency matrix: starts from the edge `(0, 1)`,
/// then each new node attaches one edge to an existing node chosen with
/// probability proportional to its current degree. The result is a 0/1
/// symmetric matrix with zero diagonal and exactly `m - 1` edges, hence a
/// connected tree.
pub fn barabasi_albert(m: usize, rng: &mut Rng) -> Result<DenseMatrix> {
    if m < 2 {
        return Err(Error::invalid("barabasi_albert needs m >= 2"));
    }
    let mut adj = DenseMatrix::zeros(m, m);
    let mut degree = vec![0usize; m];
    adj.set(0, 1, 1.0);
    adj.set(1, 0, 1.0);
    degree[0] = 1;
    degree[1] = 1;
    for node in 2..m {
        let total: usize = degree[..node].iter().sum();
        let mut ticket = rng.next_below(total);
        let mut target = 0;
        for (candidate, &deg) in degree[..node].iter().enumerate() {
            if ticket < deg {
                target = candidate;
                break;
            }
            ticket -= deg;
        }
        adj.set(node, target, 1.0);
        adj.set(target, node, 1.0);
        degree[node] += 1;
        degree[target] += 1;
    }
    Ok(adj)
}

fn spd_shift(candidate: DenseMatrix, pd_margin: f64) -> Result<DenseMatrix> {
    let lambda_min = min_eigenvalue_sym(&candidate)?;
    if lambda_min > pd_margin {
        return Ok(candidate);
    }
    let shift = lambda_min.abs() + pd_margin;
    let m = candidate.rows();
    candidate.add(&DenseMatrix::identity(m).scale(shift)?)
}

/// Generates the precision matrix for `spec` and returns it with its exact
/// nonzero count. Only the scale-free family consumes randomness.
pub fn make_precision(spec: &GraphSpec, rng: &mut Rng) -> Result<(DenseMatrix, usize)> {
    let m = spec.m;
    let omega = match spec.kind {
        GraphKind::Band => DenseMatrix::from_fn(m, m, |i, j| {
            if i == j {
                1.0
            } else if i.abs_diff(j) == 1 {
                0.4
            } else {
                0.0
            }
        })?,
        GraphKind::Hub => {
            let mut omega = DenseMatrix::identity(m);
            let group_size = m.div_ceil(spec.hub_groups);
            let mut start = 0;
            while start < m {
                let end = (start + group_size).min(m);
                for member in start + 1..end {
                    omega.set(start, member, spec.hub_value);
                    omega.set(member, start, spec.hub_value);
                }
                start = end;
            }
            spd_shift(omega, spec.pd_margin)?
        }
        GraphKind::ScaleFree => {
            let adj = barabasi_albert(m, rng)?;
            let candidate = DenseMatrix::identity(m).add(&adj.scale(spec.hub_value)?)?;
            spd_shift(candidate, spec.pd_margin)?
        }
    };
    let count = omega.count_nonzero();
    Ok((omega, count))
}

/// Sparse coefficient matrix: `s1_star` distinct positions chosen uniformly
/// at random, each value uniform on `[-1, -0.5] U [0.5, 1]`.
///
/// # Errors
///
/// `BudgetOutOfRange` unless `1 <= s1_star <= d * m`.
pub fn make_coefficients(d: usize, m: usize, s1_star: usize, rng: &mut Rng) -> Result<DenseMatrix> {
    if s1_star == 0 || s1_star > d * m {
        return Err(Error::budget(format!(
            "s1_star must lie in 1..={}, got {s1_star}",
            d * m
        )));
    }
    let mut w = DenseMatrix::zeros(d, m);
    for pos in rng.sample_distinct(d * m, s1_star) {
        let u = rng.next_f64();
        let value = if u < 0.5 { -0.5 - u } else { u };
        w.set(pos / m, pos % m, value);
    }
    Ok(w)
}

/// Builds a complete ground truth: design covariance, precision graph, its
/// inverse, and a sparse coefficient matrix. The generator is consumed in a
/// fixed order, precision graph first and coefficients second, so a given
/// state always produces the same truth.
pub fn make_truth(spec: &GraphSpec, d: usize, s1_star: usize, rng: &mut Rng) -> Result<GroundTruth> {
    let sigma_x = make_sigma_x(d)?;
    let (omega_star, s2_star) = make_precision(spec, rng)?;
    let sigma_star = spd_inverse(&omega_star)?;
    let w_star = make_coefficients(d, spec.m, s1_star, rng)?;
    GroundTruth::new(w_star, omega_star, sigma_star, sigma_x, s1_star, s2_star)
}

fn sample_rows(n: usize, sigma: &DenseMatrix, rng: &mut Rng) -> Result<DenseMatrix> {
    let p = sigma.rows();
    let factor = cholesky(sigma)?;
    let mut out = DenseMatrix::zeros(n, p);
    let mut z = vec![0.0; p];
    for i in 0..n {
        for zj in z.iter_mut() {
            *zj = rng.normal();
        }
        let row = factor.apply_lower(&z)?;
        for (j, value) in row.into_iter().enumerate() {
            out.set(i, j, value);
        }
    }
    Ok(out)
}

fn build_instance(
    truth: &GroundTruth,
    n: usize,
    seed: u64,
    with_noise: bool,
) -> Result<SyntheticInstance> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    let mut rng = Rng::new(seed);
    let x = sample_rows(n, truth.sigma_x(), &mut rng)?;
    let fitted = x.matmul(truth.w_star())?;
    let y = if with_noise {
        let e = sample_rows(n, truth.sigma_star(), &mut rng)?;
        fitted.add(&e)?
    } else {
        fitted.clone()
    };
    let noise = y.sub(&fitted)?;
    Ok(SyntheticInstance {
        truth: truth.clone(),
        data: Dataset::new(x, y)?,
        noise,
        seed,
    })
}

/// Samples `n` rows: `X` with rows from `N(0, Sigma_X)`, noise rows from
/// `N(0, Sigma*)`, and `Y = X W* + E`. The design is drawn first, then the
/// noise, each via the Cholesky factor of its covariance applied to
/// standard normal vectors.
pub fn sample_dataset(truth: &GroundTruth, n: usize, seed: u64) -> Result<SyntheticInstance> {
    build_instance(truth, n, seed, true)
}

/// As [`sample_dataset`] but with `Y = X W*` exactly and a zero noise
/// matrix. The design draw matches the noisy variant bit for bit.
pub fn sample_dataset_noiseless(truth: &GroundTruth, n: usize, seed: u64) -> Result<SyntheticInstance> {
    build_instance(truth, n, seed, false)
}
