//! Dense real linear algebra for small problems: Householder least squares,
//! Jacobi eigenvalues of Gram matrices, and magnitude ranking.
//!
//! Everything here is sized for compressive-sensing experiments (a few hundred
//! rows, at most a few hundred selected columns), so clarity wins over blocking
//! or BLAS dispatch.

use std::cmp::Ordering;
use std::ops::{Deref, DerefMut};

use crate::error::{Error, Result};

/// Relative threshold on the diagonal of the triangular factor below which a
/// column subset is treated as rank deficient.
pub const RANK_TOLERANCE: f64 = 1e-10;

const JACOBI_MAX_SWEEPS: usize = 100;

/// Row-major dense matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "matrix entries",
                expected: rows * cols,
                found: data.len(),
            });
        }
        check_finite(&data)?;
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from equally long column vectors.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        if let Some(bad) = columns.iter().find(|c| c.len() != rows) {
            return Err(Error::DimensionMismatch {
                context: "column length",
                expected: rows,
                found: bad.len(),
            });
        }
        let mut data = vec![0.0; rows * cols];
        for (j, col) in columns.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                data[i * cols + j] = v;
            }
        }
        Self::new(rows, cols, data)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    /// Entries in row-major order.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn column_norm(&self, j: usize) -> f64 {
        (0..self.rows)
            .map(|i| self.get(i, j).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Sub-matrix made of the given columns, in the given order.
    pub fn select_columns(&self, indices: &[usize]) -> DenseMatrix {
        assert!(!indices.is_empty(), "cannot select an empty column set");
        let k = indices.len();
        let mut data = Vec::with_capacity(self.rows * k);
        for i in 0..self.rows {
            let row = self.row(i);
            data.extend(indices.iter().map(|&j| row[j]));
        }
        DenseMatrix {
            rows: self.rows,
            cols: k,
            data,
        }
    }

    pub fn transpose(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn scale(&mut self, factor: f64) {
        self.data.iter_mut().for_each(|v| *v *= factor);
    }

    /// `A x`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "matvec dimension mismatch");
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `A x` restricted to the columns in `support`, with `coeffs[k]` multiplying
    /// column `support[k]`.
    pub fn matvec_sparse(&self, support: &[usize], coeffs: &[f64]) -> Vec<f64> {
        assert_eq!(support.len(), coeffs.len());
        (0..self.rows)
            .map(|i| {
                let row = self.row(i);
                support.iter().zip(coeffs).map(|(&j, &c)| row[j] * c).sum()
            })
            .collect()
    }

    /// `Aᵀ v`.
    pub fn tr_matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.rows, "transposed matvec dimension mismatch");
        let mut out = vec![0.0; self.cols];
        for (i, &vi) in v.iter().enumerate() {
            if vi == 0.0 {
                continue;
            }
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o += a * vi;
            }
        }
        out
    }

    /// `AᵀA`.
    pub fn gram(&self) -> DenseMatrix {
        let k = self.cols;
        let mut g = DenseMatrix::zeros(k, k);
        for i in 0..self.rows {
            let row = self.row(i);
            for a in 0..k {
                let ra = row[a];
                if ra == 0.0 {
                    continue;
                }
                for b in a..k {
                    g.data[a * k + b] += ra * row[b];
                }
            }
        }
        for a in 0..k {
            for b in 0..a {
                g.data[a * k + b] = g.data[b * k + a];
            }
        }
        g
    }
}

/// A real vector with finite entries.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DenseVector(Vec<f64>);

impl DenseVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_finite(&values)?;
        Ok(Self(values))
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0.0; len])
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn norm2(&self) -> f64 {
        norm2(&self.0)
    }
}

impl Deref for DenseVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for DenseVector {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl From<DenseVector> for Vec<f64> {
    fn from(v: DenseVector) -> Self {
        v.0
    }
}

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite { index }),
        None => Ok(()),
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn norm1(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

/// Euclidean distance between two equally long slices.
pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Coefficients `c` minimising `‖A c − y‖₂`, computed from a Householder QR
/// factorisation of `A`.
///
/// Fails with [`Error::SingularProjection`] when `A` has more columns than
/// rows or a diagonal entry of `R` falls below [`RANK_TOLERANCE`] times the
/// largest one.
pub fn least_squares(a: &DenseMatrix, y: &[f64]) -> Result<DenseVector> {
    let (m, k) = (a.rows(), a.cols());
    if y.len() != m {
        return Err(Error::DimensionMismatch {
            context: "least-squares right-hand side",
            expected: m,
            found: y.len(),
        });
    }
    if k > m {
        return Err(Error::SingularProjection {
            columns: k,
            iteration: None,
        });
    }

    // Column-major working copy; column j lives in qr[j*m..(j+1)*m].
    let mut qr = vec![0.0; m * k];
    for i in 0..m {
        for j in 0..k {
            qr[j * m + i] = a.get(i, j);
        }
    }
    let mut rhs = y.to_vec();
    let mut diag = vec![0.0; k];

    for j in 0..k {
        let (head, tail) = qr.split_at_mut((j + 1) * m);
        let col = &mut head[j * m..];
        let sigma = norm2(&col[j..]);
        if sigma == 0.0 {
            diag[j] = 0.0;
            continue;
        }
        let alpha = if col[j] > 0.0 { -sigma } else { sigma };
        // v = x - alpha e1, stored in place of x; H = I - 2 v vᵀ / vᵀv.
        col[j] -= alpha;
        let vtv = norm2(&col[j..]).powi(2);
        diag[j] = alpha;
        let v = &col[j..];
        for c in 0..(k - j - 1) {
            let other = &mut tail[c * m + j..(c + 1) * m];
            let s = 2.0 * dot(v, other) / vtv;
            for (o, vi) in other.iter_mut().zip(v) {
                *o -= s * vi;
            }
        }
        let s = 2.0 * dot(v, &rhs[j..]) / vtv;
        for (o, vi) in rhs[j..].iter_mut().zip(v) {
            *o -= s * vi;
        }
    }

    let largest = diag.iter().fold(0.0f64, |acc, d| acc.max(d.abs()));
    let smallest = diag.iter().fold(f64::INFINITY, |acc, d| acc.min(d.abs()));
    if largest == 0.0 || smallest <= RANK_TOLERANCE * largest {
        return Err(Error::SingularProjection {
            columns: k,
            iteration: None,
        });
    }

    // Back substitution on R c = (Qᵀ y)[..k]. R[i][j] (i < j) sits at qr[j*m + i].
    let mut c = vec![0.0; k];
    for i in (0..k).rev() {
        let mut acc = rhs[i];
        for j in (i + 1)..k {
            acc -= qr[j * m + i] * c[j];
        }
        c[i] = acc / diag[i];
    }
    DenseVector::new(c)
}

/// All eigenvalues of a symmetric matrix, ascending, by cyclic Jacobi rotations.
pub fn symmetric_eigenvalues(g: &DenseMatrix) -> Vec<f64> {
    let n = g.rows();
    assert_eq!(n, g.cols(), "symmetric_eigenvalues needs a square matrix");
    let mut a = g.as_slice().to_vec();
    if n == 1 {
        return a;
    }
    let total: f64 = a.iter().map(|v| v * v).sum();
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p * n + q].powi(2);
            }
        }
        if off <= f64::EPSILON * f64::EPSILON * total || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for r in 0..n {
                    let arp = a[r * n + p];
                    let arq = a[r * n + q];
                    a[r * n + p] = c * arp - s * arq;
                    a[r * n + q] = s * arp + c * arq;
                }
                for r in 0..n {
                    let apr = a[p * n + r];
                    let aqr = a[q * n + r];
                    a[p * n + r] = c * apr - s * aqr;
                    a[q * n + r] = s * apr + c * aqr;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    eig.sort_by(f64::total_cmp);
    eig
}

/// Smallest and largest eigenvalue of a symmetric positive semi-definite
/// matrix; a slightly negative minimum from rounding is clamped to zero.
pub fn psd_extreme_eigenvalues(g: &DenseMatrix) -> (f64, f64) {
    let eig = symmetric_eigenvalues(g);
    let lo = eig[0].max(0.0);
    let hi = eig[eig.len() - 1];
    (lo, hi)
}

/// Extreme eigenvalues of `AᵀA`.
pub fn gram_extreme_eigenvalues(a: &DenseMatrix) -> Result<(f64, f64)> {
    if a.cols() > a.rows() {
        return Err(Error::InvalidArgument(format!(
            "Gram spectrum requested for {} columns of a {}-row matrix",
            a.cols(),
            a.rows()
        )));
    }
    Ok(psd_extreme_eigenvalues(&a.gram()))
}

/// Indices of the `k` largest-magnitude entries, by decreasing magnitude with
/// ties resolved towards the lower index.
pub fn top_k_indices(v: &[f64], k: usize) -> Vec<usize> {
    assert!(k <= v.len(), "top_k_indices: k={k} exceeds length {}", v.len());
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| magnitude_order(v, a, b));
    idx.truncate(k);
    idx
}

/// Like [`top_k_indices`] but never returns an index for which `excluded`
/// is true. Returns fewer than `k` indices when the eligible set is smaller.
pub fn top_k_indices_excluding(v: &[f64], k: usize, excluded: &[bool]) -> Vec<usize> {
    debug_assert_eq!(v.len(), excluded.len());
    let mut idx: Vec<usize> = (0..v.len()).filter(|&i| !excluded[i]).collect();
    if k == 1 {
        // Single argmax without sorting; this is the OMP hot path.
        let best = idx
            .iter()
            .copied()
            .min_by(|&a, &b| magnitude_order(v, a, b));
        return best.into_iter().collect();
    }
    idx.sort_by(|&a, &b| magnitude_order(v, a, b));
    idx.truncate(k);
    idx
}

fn magnitude_order(v: &[f64], a: usize, b: usize) -> Ordering {
    v[b].abs().total_cmp(&v[a].abs()).then(a.cmp(&b))
}

/// Largest singular value of `A` estimated with `iterations` power steps on `AᵀA`.
pub fn spectral_norm_estimate(a: &DenseMatrix, iterations: usize) -> f64 {
    let n = a.cols();
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    for _ in 0..iterations.max(1) {
        let av = a.matvec(&v);
        let w = a.tr_matvec(&av);
        let nw = norm2(&w);
        if nw == 0.0 {
            return 0.0;
        }
        v = w.into_iter().map(|x| x / nw).collect();
    }
    // ‖A v‖ for unit v never exceeds the true norm.
    norm2(&a.matvec(&v))
}
