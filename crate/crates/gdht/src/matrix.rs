//! Dense row-major matrices and the small set of symmetric-matrix kernels the
//! estimator needs: Cholesky factorization, log-determinant, SPD inverse, and
//! a Jacobi eigensolver for symmetric matrices.
//!
//! Everything here is deterministic: no blocking, no threading, fixed loop
//! orders. The numerical contracts (pivot thresholds, symmetry tolerances)
//! live in the constants below.

use crate::error::{Error, Result};

/// Entrywise tolerance for symmetry checks.
pub const SYMMETRY_TOL: f64 = 1e-9;

/// A Cholesky pivot must exceed `PIVOT_RELATIVE_FLOOR * max_diagonal` for the
/// matrix to count as positive definite.
pub const PIVOT_RELATIVE_FLOOR: f64 = 1e-12;

/// Jacobi sweeps stop once the off-diagonal Frobenius norm drops below
/// `JACOBI_OFF_TOL * max(1, ||A||_F)`.
pub const JACOBI_OFF_TOL: f64 = 1e-12;

const JACOBI_MAX_SWEEPS: usize = 100;

/// Dense row-major matrix of `f64` entries, all finite by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    /// Builds a matrix from row-major data.
    ///
    /// # Errors
    ///
    /// `InvalidValue` if either dimension is zero or the data length does not
    /// equal `rows * cols`; `NonFiniteEntry` if any entry is NaN or infinite.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid(format!(
                "matrix dimensions must be at least 1x1, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::invalid(format!(
                "matrix data length {} does not match {rows}x{cols}",
                data.len()
            )));
        }
        for (k, &v) in data.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFiniteEntry { i: k / cols, j: k % cols, value: v });
            }
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    /// Builds a matrix by evaluating `f(i, j)` at every position.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        DenseMatrix::new(rows, cols, data)
    }

    /// All-zero matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "zero-sized matrix");
        DenseMatrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    /// Identity matrix of order `n`.
    pub fn identity(n: usize) -> Self {
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major backing slice.
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        self.data[i * self.cols + j]
    }

    /// Writes a single entry. Bounds are checked; finiteness is re-validated
    /// whenever the matrix next passes through [`DenseMatrix::new`]-based ops.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        self.data[i * self.cols + j] = v;
    }

    /// Borrows row `i` as a slice.
    pub fn row(&self, i: usize) -> &[f64] {
        assert!(i < self.rows, "row {i} out of bounds");
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut out = DenseMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    /// Matrix product `self * rhs`.
    pub fn matmul(&self, rhs: &DenseMatrix) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::dim(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = DenseMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                let lhs_row = i * rhs.cols;
                let rhs_row = k * rhs.cols;
                for j in 0..rhs.cols {
                    out.data[lhs_row + j] += a * rhs.data[rhs_row + j];
                }
            }
        }
        DenseMatrix::new(out.rows, out.cols, out.data)
    }

    /// Product `self^T * rhs` without materializing the transpose.
    pub fn t_mul(&self, rhs: &DenseMatrix) -> Result<Self> {
        if self.rows != rhs.rows {
            return Err(Error::dim(format!(
                "cannot multiply transpose of {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = DenseMatrix::zeros(self.cols, rhs.cols);
        for k in 0..self.rows {
            for i in 0..self.cols {
                let a = self.get(k, i);
                if a == 0.0 {
                    continue;
                }
                let out_row = i * rhs.cols;
                let rhs_row = k * rhs.cols;
                for j in 0..rhs.cols {
                    out.data[out_row + j] += a * rhs.data[rhs_row + j];
                }
            }
        }
        DenseMatrix::new(out.rows, out.cols, out.data)
    }

    pub fn add(&self, rhs: &DenseMatrix) -> Result<Self> {
        self.add_scaled(1.0, rhs)
    }

    pub fn sub(&self, rhs: &DenseMatrix) -> Result<Self> {
        self.add_scaled(-1.0, rhs)
    }

    /// Entrywise `self + c * rhs`.
    pub fn add_scaled(&self, c: f64, rhs: &DenseMatrix) -> Result<Self> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::dim(format!(
                "cannot combine {}x{} with {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let data = self
            .data
            .iter()
            .zip(rhs.data.iter())
            .map(|(&a, &b)| a + c * b)
            .collect();
        DenseMatrix::new(self.rows, self.cols, data)
    }

    /// Entrywise scaling by `c`.
    pub fn scale(&self, c: f64) -> Result<Self> {
        let data = self.data.iter().map(|&a| c * a).collect();
        DenseMatrix::new(self.rows, self.cols, data)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
    }

    /// Number of entries that are exactly nonzero.
    pub fn count_nonzero(&self) -> usize {
        self.data.iter().filter(|&&v| v != 0.0).count()
    }

    pub fn trace(&self) -> Result<f64> {
        self.require_square()?;
        Ok((0..self.rows).map(|i| self.get(i, i)).sum())
    }

    pub(crate) fn require_square(&self) -> Result<()> {
        if !self.is_square() {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        Ok(())
    }

    /// Checks entrywise symmetry within [`SYMMETRY_TOL`].
    pub fn check_symmetric(&self) -> Result<()> {
        self.require_square()?;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                let diff = (self.get(i, j) - self.get(j, i)).abs();
                if diff > SYMMETRY_TOL {
                    return Err(Error::NotSymmetric { i, j, diff, tol: SYMMETRY_TOL });
                }
            }
        }
        Ok(())
    }

    /// Returns `(self + self^T) / 2`, which is exactly symmetric entrywise.
    pub fn symmetrized(&self) -> Result<Self> {
        self.require_square()?;
        let mut out = self.clone();
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                let v = 0.5 * (self.get(i, j) + self.get(j, i));
                out.set(i, j, v);
                out.set(j, i, v);
            }
        }
        Ok(out)
    }
}

/// Lower-triangular Cholesky factor `L` of an SPD matrix, `A = L L^T`.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    l: DenseMatrix,
}

impl CholeskyFactor {
    /// The lower-triangular factor.
    pub fn lower(&self) -> &DenseMatrix {
        &self.l
    }

    pub fn order(&self) -> usize {
        self.l.rows()
    }

    /// `log det A = 2 * sum_i log L_ii`.
    pub fn log_det(&self) -> f64 {
        2.0 * (0..self.l.rows()).map(|i| self.l.get(i, i).ln()).sum::<f64>()
    }

    /// Solves `A x = b` by forward then backward substitution.
    pub fn solve_vec(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.order();
        if b.len() != n {
            return Err(Error::dim(format!(
                "right-hand side has length {}, factor has order {n}",
                b.len()
            )));
        }
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut s = b[i];
            for k in 0..i {
                s -= self.l.get(i, k) * y[k];
            }
            y[i] = s / self.l.get(i, i);
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s -= self.l.get(k, i) * x[k];
            }
            x[i] = s / self.l.get(i, i);
        }
        Ok(x)
    }

    /// Applies `L z` to a vector, giving a sample with covariance `A` when
    /// `z` has independent standard-normal entries.
    pub fn apply_lower(&self, z: &[f64]) -> Result<Vec<f64>> {
        let n = self.order();
        if z.len() != n {
            return Err(Error::dim(format!(
                "vector has length {}, factor has order {n}",
                z.len()
            )));
        }
        let mut out = vec![0.0; n];
        for i in 0..n {
            let mut s = 0.0;
            for k in 0..=i {
                s += self.l.get(i, k) * z[k];
            }
            out[i] = s;
        }
        Ok(out)
    }
}

/// Cholesky factorization of a symmetric positive-definite matrix.
///
/// The input must be square and symmetric within [`SYMMETRY_TOL`]; only the
/// lower triangle is read. A pivot at column `j` counts as positive only if
/// it exceeds [`PIVOT_RELATIVE_FLOOR`] times the largest diagonal entry of
/// the input, so nearly-singular matrices are rejected rather than factored
/// into garbage.
///
/// # Examples
///
/// ```
/// use gdht::matrix::{cholesky, DenseMatrix};
///
/// let a = DenseMatrix::new(2, 2, vec![4.0, 2.0, 2.0, 3.0]).unwrap();
/// let f = cholesky(&a).unwrap();
/// let l = f.lower();
/// assert!((l.get(0, 0) - 2.0).abs() < 1e-15);
/// assert!((l.get(1, 0) - 1.0).abs() < 1e-15);
/// assert!((l.get(1, 1) - 2.0_f64.sqrt()).abs() < 1e-15);
/// ```
pub fn cholesky(m: &DenseMatrix) -> Result<CholeskyFactor> {
    m.check_symmetric()?;
    let n = m.rows();
    let max_diag = (0..n).fold(f64::NEG_INFINITY, |acc, i| acc.max(m.get(i, i)));
    let threshold = PIVOT_RELATIVE_FLOOR * max_diag;
    let mut l = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let mut pivot = m.get(j, j);
        for k in 0..j {
            pivot -= l.get(j, k) * l.get(j, k);
        }
        if pivot <= threshold {
            return Err(Error::NotPositiveDefinite { col: j, pivot, threshold });
        }
        let ljj = pivot.sqrt();
        l.set(j, j, ljj);
        for i in (j + 1)..n {
            let mut s = m.get(i, j);
            for k in 0..j {
                s -= l.get(i, k) * l.get(j, k);
            }
            l.set(i, j, s / ljj);
        }
    }
    Ok(CholeskyFactor { l })
}

/// Log-determinant of an SPD matrix via its Cholesky factor.
///
/// Identity matrices give exactly `0.0` because `ln(1) == 0`.
pub fn log_det_spd(m: &DenseMatrix) -> Result<f64> {
    Ok(cholesky(m)?.log_det())
}

/// Inverse of an SPD matrix. The result is symmetrized as `(X + X^T) / 2`
/// after the triangular solves, so it is exactly symmetric entrywise.
pub fn spd_inverse(m: &DenseMatrix) -> Result<DenseMatrix> {
    let f = cholesky(m)?;
    let n = f.order();
    let mut inv = DenseMatrix::zeros(n, n);
    let mut e = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        let col = f.solve_vec(&e)?;
        e[j] = 0.0;
        for i in 0..n {
            inv.set(i, j, col[i]);
        }
    }
    inv.symmetrized()
}

/// All eigenvalues of a symmetric matrix, ascending, by cyclic Jacobi
/// rotations. Sweeps run until the off-diagonal Frobenius norm falls below
/// [`JACOBI_OFF_TOL`] relative to the input scale.
pub fn sym_eigenvalues(m: &DenseMatrix) -> Result<Vec<f64>> {
    m.check_symmetric()?;
    let n = m.rows();
    if n == 1 {
        return Ok(vec![m.get(0, 0)]);
    }
    let mut a = m.symmetrized()?;
    let stop = JACOBI_OFF_TOL * m.frobenius_norm().max(1.0);
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += 2.0 * a.get(i, j) * a.get(i, j);
            }
        }
        if off.sqrt() < stop {
            break;
        }
        for p in 0..(n - 1) {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
            }
        }
    }
    let mut eigs: Vec<f64> = (0..n).map(|i| a.get(i, i)).collect();
    eigs.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    Ok(eigs)
}

/// Smallest eigenvalue of a symmetric matrix, to about 1e-8 relative accuracy.
///
/// # Examples
///
/// ```
/// use gdht::matrix::{min_eigenvalue_sym, DenseMatrix};
///
/// let band = DenseMatrix::new(
///     3,
///     3,
///     vec![1.0, 0.4, 0.0, 0.4, 1.0, 0.4, 0.0, 0.4, 1.0],
/// )
/// .unwrap();
/// let lam = min_eigenvalue_sym(&band).unwrap();
/// assert!((lam - (1.0 - 0.4 * 2.0_f64.sqrt())).abs() < 1e-8);
/// ```
pub fn min_eigenvalue_sym(m: &DenseMatrix) -> Result<f64> {
    Ok(sym_eigenvalues(m)?[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;
    use proptest::prelude::*;

    fn random_symmetric(n: usize, rng: &mut Rng) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v = 2.0 * rng.next_f64() - 1.0;
                m.set(i, j, v);
                m.set(j, i, v);
            }
        }
        m
    }

    fn random_spd(n: usize, rng: &mut Rng) -> DenseMatrix {
        let b = DenseMatrix::from_fn(n, n, |_, _| 2.0 * rng.next_f64() - 1.0).unwrap();
        let mut m = b.t_mul(&b).unwrap();
        for i in 0..n {
            m.set(i, i, m.get(i, i) + 0.5);
        }
        m.symmetrized().unwrap()
    }

    #[test]
    fn new_rejects_non_finite() {
        let err = DenseMatrix::new(1, 2, vec![1.0, f64::NAN]).unwrap_err();
        assert!(matches!(err, Error::NonFiniteEntry { i: 0, j: 1, .. }));
    }

    #[test]
    fn new_rejects_zero_dims_and_bad_length() {
        assert!(DenseMatrix::new(0, 3, vec![]).is_err());
        assert!(DenseMatrix::new(2, 2, vec![1.0; 3]).is_err());
    }

    #[test]
    fn matmul_and_t_mul_agree_with_transpose() {
        let mut rng = Rng::new(11);
        let a = DenseMatrix::from_fn(4, 3, |_, _| rng.next_f64()).unwrap();
        let b = DenseMatrix::from_fn(4, 2, |_, _| rng.next_f64()).unwrap();
        let fast = a.t_mul(&b).unwrap();
        let slow = a.transpose().matmul(&b).unwrap();
        assert!(fast.sub(&slow).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn cholesky_of_two_by_two_matches_hand_factorization() {
        let a = DenseMatrix::new(2, 2, vec![4.0, 2.0, 2.0, 3.0]).unwrap();
        let l = cholesky(&a).unwrap().l;
        assert_eq!(l.get(0, 0), 2.0);
        assert_eq!(l.get(0, 1), 0.0);
        assert_eq!(l.get(1, 0), 1.0);
        assert!((l.get(1, 1) - 2.0_f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn cholesky_of_identity_is_identity() {
        let f = cholesky(&DenseMatrix::identity(4)).unwrap();
        assert_eq!(f.l, DenseMatrix::identity(4));
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = DenseMatrix::new(2, 2, vec![1.0, 2.0, 2.0, 1.0]).unwrap();
        let err = cholesky(&a).unwrap_err();
        assert!(matches!(err, Error::NotPositiveDefinite { col: 1, .. }));
    }

    #[test]
    fn cholesky_rejects_asymmetric() {
        let a = DenseMatrix::new(2, 2, vec![1.0, 0.5, 0.4, 1.0]).unwrap();
        assert!(matches!(cholesky(&a).unwrap_err(), Error::NotSymmetric { .. }));
    }

    #[test]
    fn cholesky_reconstructs_random_spd() {
        let mut rng = Rng::new(3);
        for n in [1, 2, 5, 8] {
            let a = random_spd(n, &mut rng);
            let l = cholesky(&a).unwrap().l;
            let back = l.matmul(&l.transpose()).unwrap();
            assert!(back.sub(&a).unwrap().max_abs() < 1e-10 * a.max_abs().max(1.0));
        }
    }

    #[test]
    fn log_det_matches_closed_form() {
        let a = DenseMatrix::new(2, 2, vec![1.0, 0.4, 0.4, 1.0]).unwrap();
        let ld = log_det_spd(&a).unwrap();
        assert!((ld - 0.84_f64.ln()).abs() < 1e-12);
        assert!((ld - (-0.174353)).abs() < 1e-6);
    }

    #[test]
    fn log_det_of_identity_is_exactly_zero() {
        assert_eq!(log_det_spd(&DenseMatrix::identity(6)).unwrap(), 0.0);
    }

    #[test]
    fn spd_inverse_of_diagonal() {
        let a = DenseMatrix::new(2, 2, vec![2.0, 0.0, 0.0, 4.0]).unwrap();
        let inv = spd_inverse(&a).unwrap();
        assert!((inv.get(0, 0) - 0.5).abs() < 1e-15);
        assert!((inv.get(1, 1) - 0.25).abs() < 1e-15);
        assert_eq!(inv.get(0, 1), 0.0);
    }

    #[test]
    fn spd_inverse_is_exactly_symmetric_and_accurate() {
        let mut rng = Rng::new(7);
        for n in [2, 4, 7] {
            let a = random_spd(n, &mut rng);
            let inv = spd_inverse(&a).unwrap();
            for i in 0..n {
                for j in 0..n {
                    assert_eq!(inv.get(i, j).to_bits(), inv.get(j, i).to_bits());
                }
            }
            let prod = a.matmul(&inv).unwrap();
            let err = prod.sub(&DenseMatrix::identity(n)).unwrap().frobenius_norm();
            assert!(err < 1e-10, "inverse residual {err}");
        }
    }

    #[test]
    fn min_eigenvalue_of_band_matches_cosine_formula() {
        let band = DenseMatrix::new(
            3,
            3,
            vec![1.0, 0.4, 0.0, 0.4, 1.0, 0.4, 0.0, 0.4, 1.0],
        )
        .unwrap();
        let lam = min_eigenvalue_sym(&band).unwrap();
        assert!((lam - (1.0 - 0.4 * 2.0_f64.sqrt())).abs() < 1e-10);
    }

    #[test]
    fn min_eigenvalue_trivial_cases() {
        assert_eq!(min_eigenvalue_sym(&DenseMatrix::identity(5)).unwrap(), 1.0);
        let one = DenseMatrix::new(1, 1, vec![5.0]).unwrap();
        assert_eq!(min_eigenvalue_sym(&one).unwrap(), 5.0);
        let d = DenseMatrix::new(3, 3, vec![3.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 2.0]).unwrap();
        assert_eq!(min_eigenvalue_sym(&d).unwrap(), 1.0);
    }

    #[test]
    fn eigenvalues_match_trace_norm_and_log_det() {
        let mut rng = Rng::new(19);
        for n in [2, 3, 6] {
            let a = random_symmetric(n, &mut rng);
            let eigs = sym_eigenvalues(&a).unwrap();
            let sum: f64 = eigs.iter().sum();
            assert!((sum - a.trace().unwrap()).abs() < 1e-9);
            let sq: f64 = eigs.iter().map(|e| e * e).sum();
            let fro = a.frobenius_norm();
            assert!((sq - fro * fro).abs() < 1e-9);

            let spd = random_spd(n, &mut rng);
            let eigs = sym_eigenvalues(&spd).unwrap();
            let sum_log: f64 = eigs.iter().map(|e| e.ln()).sum();
            assert!((sum_log - log_det_spd(&spd).unwrap()).abs() < 1e-8);
        }
    }

    proptest! {
        #[test]
        fn prop_cholesky_round_trips(seed in 0u64..500) {
            let mut rng = Rng::new(seed);
            let n = 1 + (rng.next_u64() % 6) as usize;
            let a = random_spd(n, &mut rng);
            let l = cholesky(&a).unwrap().l;
            let back = l.matmul(&l.transpose()).unwrap();
            prop_assert!(back.sub(&a).unwrap().max_abs() < 1e-9 * a.max_abs().max(1.0));
        }

        #[test]
        fn prop_eigen_sum_is_trace(seed in 0u64..500) {
            let mut rng = Rng::new(seed);
            let n = 1 + (rng.next_u64() % 6) as usize;
            let a = random_symmetric(n, &mut rng);
            let eigs = sym_eigenvalues(&a).unwrap();
            let sum: f64 = eigs.iter().sum();
            prop_assert!((sum - a.trace().unwrap()).abs() < 1e-8);
        }
    }
}
