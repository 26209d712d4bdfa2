//! Hard thresholding: support selection by largest magnitude and projection
//! onto a support.
//!
//! [`supp`] picks the `s` largest-magnitude entries (row-major order breaks
//! ties, earlier positions win), [`ht`] zeroes everything outside a support
//! while copying kept entries bit for bit, and [`supp_sym`] is the symmetric
//! variant used for precision matrices: it always keeps the whole diagonal
//! and then adds off-diagonal entries in mirrored pairs, so the projected
//! matrix stays symmetric.

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// An explicit set of matrix positions, stored sorted in row-major order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportSet {
    rows: usize,
    cols: usize,
    positions: Vec<(usize, usize)>,
}

impl SupportSet {
    fn from_sorted(rows: usize, cols: usize, positions: Vec<(usize, usize)>) -> Self {
        debug_assert!(positions.windows(2).all(|w| w[0] < w[1]));
        SupportSet { rows, cols, positions }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Positions in row-major order.
    pub fn positions(&self) -> &[(usize, usize)] {
        &self.positions
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.positions.binary_search(&(i, j)).is_ok()
    }

    /// True when `(i, j)` membership always implies `(j, i)` membership.
    pub fn is_closed_under_transpose(&self) -> bool {
        self.positions.iter().all(|&(i, j)| self.contains(j, i))
    }
}

/// Support of the `s` largest-magnitude entries of `m`.
///
/// Ties are broken toward the earlier row-major position, so the result is a
/// deterministic function of the input.
///
/// # Errors
///
/// `BudgetOutOfRange` unless `1 <= s <= rows * cols`.
///
/// # Examples
///
/// ```
/// use gdht::matrix::DenseMatrix;
/// use gdht::threshold::supp;
///
/// let m = DenseMatrix::new(2, 2, vec![3.0, -1.0, 0.5, 2.0]).unwrap();
/// let set = supp(&m, 2).unwrap();
/// assert_eq!(set.positions(), &[(0, 0), (1, 1)]);
/// ```
pub fn supp(m: &DenseMatrix, s: usize) -> Result<SupportSet> {
    let total = m.rows() * m.cols();
    if s == 0 || s > total {
        return Err(Error::budget(format!(
            "support size {s} is outside 1..={total} for a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let mut order: Vec<usize> = (0..total).collect();
    order.sort_by(|&a, &b| {
        let va = m.data()[a].abs();
        let vb = m.data()[b].abs();
        vb.partial_cmp(&va).expect("finite entries").then(a.cmp(&b))
    });
    let mut kept: Vec<(usize, usize)> = order[..s]
        .iter()
        .map(|&k| (k / m.cols(), k % m.cols()))
        .collect();
    kept.sort_unstable();
    Ok(SupportSet::from_sorted(m.rows(), m.cols(), kept))
}

/// Projection onto a support: entries inside `set` are copied bit for bit,
/// everything else becomes exactly zero.
///
/// # Errors
///
/// `DimensionMismatch` if the set was built for a different shape.
pub fn ht(m: &DenseMatrix, set: &SupportSet) -> Result<DenseMatrix> {
    if set.rows() != m.rows() || set.cols() != m.cols() {
        return Err(Error::dim(format!(
            "support is for a {}x{} matrix, input is {}x{}",
            set.rows(),
            set.cols(),
            m.rows(),
            m.cols()
        )));
    }
    let mut out = DenseMatrix::zeros(m.rows(), m.cols());
    for &(i, j) in set.positions() {
        out.set(i, j, m.get(i, j));
    }
    Ok(out)
}

/// Symmetric support selection for a precision iterate.
///
/// The whole diagonal is always kept. Off-diagonal entries join in mirrored
/// pairs `{(i,j),(j,i)}`, ordered by descending magnitude with row-major
/// tie-breaking, while two positions still fit in the budget `s`. The result
/// is closed under transposition and has between `rows` and `s` positions
/// (one short of `s` when `s - rows` is odd).
///
/// # Errors
///
/// `NotSquare`/`NotSymmetric` for an unsuitable input, `BudgetOutOfRange`
/// unless `rows <= s <= rows^2`.
pub fn supp_sym(m: &DenseMatrix, s: usize) -> Result<SupportSet> {
    m.check_symmetric()?;
    let n = m.rows();
    if s < n {
        return Err(Error::budget(format!(
            "symmetric support size {s} cannot cover the {n} diagonal entries"
        )));
    }
    if s > n * n {
        return Err(Error::budget(format!("symmetric support size {s} exceeds {n}x{n}")));
    }
    let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            pairs.push((i, j));
        }
    }
    pairs.sort_by(|&a, &b| {
        let va = m.get(a.0, a.1).abs();
        let vb = m.get(b.0, b.1).abs();
        vb.partial_cmp(&va).expect("finite entries").then(a.cmp(&b))
    });
    let budget_pairs = ((s - n) / 2).min(pairs.len());
    let mut kept: Vec<(usize, usize)> = (0..n).map(|i| (i, i)).collect();
    for &(i, j) in &pairs[..budget_pairs] {
        kept.push((i, j));
        kept.push((j, i));
    }
    kept.sort_unstable();
    Ok(SupportSet::from_sorted(n, n, kept))
}
