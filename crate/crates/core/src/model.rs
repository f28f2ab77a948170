//! Signals, measurement matrices and the measurement operator.
//!
//! Every generator is a pure function of its dimensions and seed. Random
//! streams come from ChaCha8 ([`PRNG_NAME`]) seeded with `seed_from_u64`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::ops::Deref;
use std::path::Path;

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{self, DenseMatrix, DenseVector};

/// Generator identification written into resolved configs.
pub const PRNG_NAME: &str = "chacha8 (rand_chacha 0.9, seed_from_u64)";

/// Ratio between consecutive magnitudes of a decaying signal.
pub const DECAY_RATE: f64 = 0.9;

pub(crate) fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Formats a real with 17 significant digits, enough to round-trip any `f64`.
pub fn format_real(v: f64) -> String {
    format!("{v:.16e}")
}

/// A real signal of length N.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal(DenseVector);

impl Signal {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("signal length must be positive".into()));
        }
        Ok(Self(DenseVector::new(values)?))
    }

    pub fn zeros(len: usize) -> Self {
        Self(DenseVector::zeros(len))
    }

    pub(crate) fn from_vec_unchecked(values: Vec<f64>) -> Self {
        Self(DenseVector::new(values).expect("finite signal"))
    }

    pub fn as_vector(&self) -> &DenseVector {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0.into_inner()
    }

    /// Number of nonzero entries.
    pub fn l0(&self) -> usize {
        self.iter().filter(|v| **v != 0.0).count()
    }

    pub fn support(&self) -> SupportSet {
        SupportSet(
            self.iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(i, _)| i)
                .collect(),
        )
    }
}

impl Deref for Signal {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Strictly increasing set of (0-based) positions.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SupportSet(Vec<usize>);

impl SupportSet {
    /// Sorts and deduplicates `indices`.
    pub fn new(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        Self(indices)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn is_subset_of(&self, other: &SupportSet) -> bool {
        self.0.iter().all(|&i| other.contains(i))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ensemble {
    Gaussian,
    /// Loaded from a file or built by hand.
    External,
}

/// An M×N measurement matrix plus how it was generated.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementMatrix {
    pub matrix: DenseMatrix,
    pub ensemble: Ensemble,
    pub seed: Option<u64>,
    pub column_normalized: bool,
}

impl MeasurementMatrix {
    pub fn from_matrix(matrix: DenseMatrix) -> Self {
        if matrix.rows() >= matrix.cols() {
            log::warn!(
                "measurement matrix is {}x{}: not a compressive regime",
                matrix.rows(),
                matrix.cols()
            );
        }
        Self {
            matrix,
            ensemble: Ensemble::External,
            seed: None,
            column_normalized: false,
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.matrix.cols()
    }
}

impl Deref for MeasurementMatrix {
    type Target = DenseMatrix;
    fn deref(&self) -> &DenseMatrix {
        &self.matrix
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseKind {
    None,
    Gaussian,
}

/// Additive measurement noise `w`, i.i.d. normal with standard deviation `sigma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    kind: NoiseKind,
    sigma: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn none() -> Self {
        Self {
            kind: NoiseKind::None,
            sigma: 0.0,
            seed: 0,
        }
    }

    /// `sigma = 0` yields [`NoiseKind::None`].
    pub fn gaussian(sigma: f64, seed: u64) -> Result<Self> {
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "noise sigma must be finite and non-negative, got {sigma}"
            )));
        }
        let kind = if sigma == 0.0 {
            NoiseKind::None
        } else {
            NoiseKind::Gaussian
        };
        Ok(Self { kind, sigma, seed })
    }

    pub fn kind(&self) -> NoiseKind {
        self.kind
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    /// The noise vector of length `m` this spec produces.
    pub fn sample(&self, m: usize) -> Vec<f64> {
        match self.kind {
            NoiseKind::None => vec![0.0; m],
            NoiseKind::Gaussian => {
                let mut rng = rng_from_seed(self.seed);
                (0..m)
                    .map(|_| self.sigma * rng.sample::<f64, _>(StandardNormal))
                    .collect()
            }
        }
    }
}

/// M×N matrix with i.i.d. N(0, 1/M) entries, filled row by row. With
/// `column_normalized` every column is rescaled to unit norm afterwards.
pub fn gen_gaussian_matrix(
    m: usize,
    n: usize,
    seed: u64,
    column_normalized: bool,
) -> Result<MeasurementMatrix> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidArgument(format!(
            "matrix dimensions must be positive, got {m}x{n}"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let std = 1.0 / (m as f64).sqrt();
    let mut matrix =
        DenseMatrix::from_fn(m, n, |_, _| std * rng.sample::<f64, _>(StandardNormal));
    if column_normalized {
        for j in 0..n {
            let norm = matrix.column_norm(j);
            if norm > 0.0 {
                for i in 0..m {
                    matrix.set(i, j, matrix.get(i, j) / norm);
                }
            }
        }
    }
    if m >= n {
        log::warn!("gaussian matrix is {m}x{n}: not a compressive regime");
    }
    Ok(MeasurementMatrix {
        matrix,
        ensemble: Ensemble::Gaussian,
        seed: Some(seed),
        column_normalized,
    })
}

/// T-sparse signal: a uniformly random support of size T carrying i.i.d.
/// standard normal values (drawn in increasing position order).
pub fn gen_sparse_gaussian_signal(n: usize, t: usize, seed: u64) -> Result<(Signal, SupportSet)> {
    if t == 0 || t > n {
        return Err(Error::InvalidArgument(format!(
            "sparsity {t} must lie in 1..={n}"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let support = SupportSet::new(index::sample(&mut rng, n, t).into_vec());
    let mut values = vec![0.0; n];
    for &i in support.as_slice() {
        let mut v: f64 = rng.sample(StandardNormal);
        // A draw of exactly zero would shrink the support.
        while v == 0.0 {
            v = rng.sample(StandardNormal);
        }
        values[i] = v;
    }
    Ok((Signal::from_vec_unchecked(values), support))
}

/// Signal whose sorted magnitudes are exactly 0.9, 0.9², …, 0.9ᴺ, with random
/// signs, scattered over a uniformly random permutation of positions.
pub fn gen_decaying_signal(n: usize, seed: u64) -> Result<Signal> {
    if n == 0 {
        return Err(Error::InvalidArgument("signal length must be positive".into()));
    }
    let mut rng = rng_from_seed(seed);
    let mut positions: Vec<usize> = (0..n).collect();
    positions.shuffle(&mut rng);
    let mut values = vec![0.0; n];
    let mut magnitude = 1.0;
    for &p in &positions {
        magnitude *= DECAY_RATE;
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        values[p] = sign * magnitude;
    }
    Ok(Signal::from_vec_unchecked(values))
}

/// ‖x − x_T‖₂ for a decaying signal of length `n`: sqrt(Σ_{k=T+1..n} 0.81ᵏ).
pub fn decaying_tail_norm(n: usize, t: usize) -> f64 {
    let r2 = DECAY_RATE * DECAY_RATE;
    ((t + 1)..=n).map(|k| r2.powi(k as i32)).sum::<f64>().sqrt()
}

/// Keeps the `t` largest-magnitude entries (ties towards lower positions).
pub fn best_t_term(x: &Signal, t: usize) -> Signal {
    let t = t.min(x.len());
    let mut out = vec![0.0; x.len()];
    for i in linalg::top_k_indices(x, t) {
        out[i] = x[i];
    }
    Signal::from_vec_unchecked(out)
}

/// ℓ₂ norm of the `k` largest-magnitude entries.
pub fn top_k_norm(x: &[f64], k: usize) -> Result<f64> {
    if k == 0 || k > x.len() {
        return Err(Error::InvalidArgument(format!(
            "top-K norm needs 1 <= K <= {}, got {k}",
            x.len()
        )));
    }
    Ok(linalg::top_k_indices(x, k)
        .into_iter()
        .map(|i| x[i] * x[i])
        .sum::<f64>()
        .sqrt())
}

/// `y = Φx + w`.
pub fn measure(phi: &MeasurementMatrix, x: &[f64], noise: &NoiseSpec) -> Result<DenseVector> {
    if x.len() != phi.cols() {
        return Err(Error::DimensionMismatch {
            context: "signal length",
            expected: phi.cols(),
            found: x.len(),
        });
    }
    let mut y = phi.matvec(x);
    for (yi, wi) in y.iter_mut().zip(noise.sample(phi.rows())) {
        *yi += wi;
    }
    DenseVector::new(y)
}

/// Writes a matrix as CSV: a `rows=M,cols=N` header, then one line per row.
pub fn write_matrix_csv(path: &Path, matrix: &DenseMatrix) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let mut write = || -> std::io::Result<()> {
        writeln!(w, "rows={},cols={}", matrix.rows(), matrix.cols())?;
        for i in 0..matrix.rows() {
            let line: Vec<String> = matrix.row(i).iter().map(|&v| format_real(v)).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        w.flush()
    };
    write().map_err(|e| Error::io(path, e))
}

/// Reads the format produced by [`write_matrix_csv`].
pub fn read_matrix_csv(path: &Path) -> Result<DenseMatrix> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(file);
    let mut records = reader.records();
    let header = records
        .next()
        .ok_or_else(|| Error::parse(path, "empty file"))?
        .map_err(|e| Error::parse(path, e.to_string()))?;
    let (rows, cols) = parse_dims(&header).ok_or_else(|| {
        Error::parse(path, "header must read `rows=<M>,cols=<N>`")
    })?;
    let mut data = Vec::with_capacity(rows * cols);
    for (line, rec) in records.enumerate() {
        let rec = rec.map_err(|e| Error::parse(path, e.to_string()))?;
        if rec.len() != cols {
            return Err(Error::parse(
                path,
                format!("row {} has {} fields, expected {cols}", line + 1, rec.len()),
            ));
        }
        for field in rec.iter() {
            let v: f64 = field
                .parse()
                .map_err(|_| Error::parse(path, format!("bad number `{field}` in row {}", line + 1)))?;
            data.push(v);
        }
    }
    if data.len() != rows * cols {
        return Err(Error::parse(
            path,
            format!("expected {rows} rows, found {}", data.len() / cols.max(1)),
        ));
    }
    DenseMatrix::new(rows, cols, data)
}

fn parse_dims(header: &csv::StringRecord) -> Option<(usize, usize)> {
    if header.len() != 2 {
        return None;
    }
    let rows = header.get(0)?.strip_prefix("rows=")?.parse().ok()?;
    let cols = header.get(1)?.strip_prefix("cols=")?.parse().ok()?;
    Some((rows, cols))
}

/// Vectors are stored as N×1 matrices.
pub fn write_vector_csv(path: &Path, v: &[f64]) -> Result<()> {
    let m = DenseMatrix::new(v.len(), 1, v.to_vec())?;
    write_matrix_csv(path, &m)
}

pub fn read_vector_csv(path: &Path) -> Result<DenseVector> {
    let m = read_matrix_csv(path)?;
    if m.cols() != 1 {
        return Err(Error::parse(
            path,
            format!("expected a single column, found {}", m.cols()),
        ));
    }
    DenseVector::new(m.as_slice().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::norm2;

    #[test]
    fn gaussian_matrix_is_deterministic() {
        let a = gen_gaussian_matrix(100, 256, 42, false).unwrap();
        let b = gen_gaussian_matrix(100, 256, 42, false).unwrap();
        assert_eq!(a.as_slice(), b.as_slice());
        let c = gen_gaussian_matrix(100, 256, 43, false).unwrap();
        assert_ne!(a.as_slice(), c.as_slice());
    }

    #[test]
    fn normalized_columns_have_unit_norm() {
        let a = gen_gaussian_matrix(100, 256, 9, true).unwrap();
        for j in 0..256 {
            assert!((a.column_norm(j) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn unnormalized_column_norms_concentrate_near_one() {
        let mut total = 0.0;
        for seed in 0..100 {
            let a = gen_gaussian_matrix(100, 256, seed, false).unwrap();
            total += (0..256).map(|j| a.column_norm(j)).sum::<f64>() / 256.0;
        }
        let mean = total / 100.0;
        assert!((0.95..=1.05).contains(&mean), "mean column norm {mean}");
    }

    #[test]
    fn sparse_signal_shapes() {
        let (x, s) = gen_sparse_gaussian_signal(256, 4, 3).unwrap();
        assert_eq!(x.l0(), 4);
        assert_eq!(x.support(), s);
        let (full, s) = gen_sparse_gaussian_signal(5, 5, 3).unwrap();
        assert_eq!(s.as_slice(), &[0, 1, 2, 3, 4]);
        assert_eq!(full.l0(), 5);
        assert!(gen_sparse_gaussian_signal(5, 0, 1).is_err());
        assert!(gen_sparse_gaussian_signal(5, 6, 1).is_err());
    }

    #[test]
    fn sparse_support_location_is_uniform() {
        // Chi-square goodness of fit over 1000 single-spike draws, 256 cells.
        // 1% critical value for 255 degrees of freedom is about 310.5.
        let n = 256;
        let mut counts = vec![0usize; n];
        for seed in 0..1000 {
            let (_, s) = gen_sparse_gaussian_signal(n, 1, seed).unwrap();
            counts[s.as_slice()[0]] += 1;
        }
        let expected = 1000.0 / n as f64;
        let chi2: f64 = counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        assert!(chi2 < 310.5, "chi-square statistic {chi2}");
    }

    #[test]
    fn decaying_signal_magnitudes() {
        let x = gen_decaying_signal(256, 5).unwrap();
        let mut mags: Vec<f64> = x.iter().map(|v| v.abs()).collect();
        mags.sort_by(|a, b| b.total_cmp(a));
        let mut expected = 1.0;
        for m in mags {
            expected *= 0.9;
            assert!((m - expected).abs() <= 1e-15);
        }
        let energy: f64 = x.iter().map(|v| v * v).sum();
        let series: f64 = (1..=256).map(|n| 0.81f64.powi(n)).sum();
        assert!((energy - series).abs() < 1e-12);
        let signs_positive = x.iter().filter(|v| **v > 0.0).count();
        assert!(signs_positive > 0 && signs_positive < 256);
    }

    #[test]
    fn decaying_tail_matches_truncation() {
        // sqrt(sum_{n=26..256} 0.81^n), summed directly.
        let oracle = (26..=256).map(|n| 0.81f64.powi(n)).sum::<f64>().sqrt();
        assert!((oracle - 0.148227).abs() < 1e-6);
        let x = gen_decaying_signal(256, 11).unwrap();
        let xt = best_t_term(&x, 25);
        let err = linalg::distance(&x, &xt);
        assert!((err - oracle).abs() < 1e-12, "{err} vs {oracle}");
        assert!((decaying_tail_norm(256, 25) - oracle).abs() < 1e-15);
    }

    #[test]
    fn best_t_term_examples() {
        let x = Signal::new(vec![3.0, 1.0, -2.0]).unwrap();
        assert_eq!(best_t_term(&x, 1).as_vector().to_vec(), vec![3.0, 0.0, 0.0]);
        assert_eq!(best_t_term(&x, 3), x);
        assert_eq!(best_t_term(&x, 5), x);
        assert_eq!(best_t_term(&x, 0).l0(), 0);
        let sparse = Signal::new(vec![0.0, 4.0, 0.0, -1.0]).unwrap();
        assert_eq!(best_t_term(&sparse, 2), sparse);
    }

    #[test]
    fn best_t_term_beats_every_pair_support() {
        let mut rng = rng_from_seed(77);
        for _ in 0..20 {
            let n = 8;
            let x = Signal::new((0..n).map(|_| rng.random_range(-3.0..3.0)).collect()).unwrap();
            let best = linalg::distance(&x, &best_t_term(&x, 2));
            for a in 0..n {
                for b in (a + 1)..n {
                    let mut alt = vec![0.0; n];
                    alt[a] = x[a];
                    alt[b] = x[b];
                    assert!(best <= linalg::distance(&x, &alt) + 1e-15);
                }
            }
        }
    }

    #[test]
    fn top_k_norm_examples() {
        assert!((top_k_norm(&[3.0, -4.0, 1.0], 2).unwrap() - 5.0).abs() < 1e-15);
        let v = [1.0, -2.0, 2.0, 0.5];
        assert!((top_k_norm(&v, 4).unwrap() - norm2(&v)).abs() < 1e-15);
        assert_eq!(top_k_norm(&v, 1).unwrap(), 2.0);
        assert!(top_k_norm(&v, 0).is_err());
        assert!(top_k_norm(&v, 5).is_err());
    }

    #[test]
    fn top_k_norm_triangle_inequality() {
        let mut rng = rng_from_seed(3);
        for _ in 0..1000 {
            let n = rng.random_range(1..12);
            let k = rng.random_range(1..=n);
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
            let y: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
            let s: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
            let lhs = top_k_norm(&s, k).unwrap();
            let rhs = top_k_norm(&x, k).unwrap() + top_k_norm(&y, k).unwrap();
            assert!(lhs <= rhs + 1e-12);
        }
    }

    #[test]
    fn measure_examples() {
        let phi = gen_gaussian_matrix(10, 20, 1, false).unwrap();
        let y = measure(&phi, &vec![0.0; 20], &NoiseSpec::none()).unwrap();
        assert!(y.iter().all(|v| *v == 0.0));

        let eye = MeasurementMatrix::from_matrix(DenseMatrix::identity(4));
        let x = [1.0, -2.0, 0.0, 3.5];
        assert_eq!(&*measure(&eye, &x, &NoiseSpec::none()).unwrap(), &x);

        assert!(measure(&eye, &[1.0], &NoiseSpec::none()).is_err());
    }

    #[test]
    fn noise_norm_concentrates() {
        // ‖w‖₂ for sigma = 0.01 and 100 entries is 0.01·χ₁₀₀ ≈ 0.1.
        let zero = vec![0.0; 256];
        let phi = gen_gaussian_matrix(100, 256, 0, false).unwrap();
        let inside = (0..1000)
            .filter(|&seed| {
                let noise = NoiseSpec::gaussian(0.01, seed).unwrap();
                let w = measure(&phi, &zero, &noise).unwrap().norm2();
                (0.05..=0.15).contains(&w)
            })
            .count();
        assert!(inside >= 950, "{inside} of 1000 inside [0.05, 0.15]");
    }

    #[test]
    fn noise_spec_kinds() {
        assert_eq!(NoiseSpec::gaussian(0.0, 1).unwrap().kind(), NoiseKind::None);
        assert_eq!(NoiseSpec::gaussian(0.1, 1).unwrap().kind(), NoiseKind::Gaussian);
        assert!(NoiseSpec::gaussian(-1.0, 1).is_err());
        let a = NoiseSpec::gaussian(0.1, 5).unwrap().sample(10);
        let b = NoiseSpec::gaussian(0.1, 5).unwrap().sample(10);
        assert_eq!(a, b);
    }

    #[test]
    fn matrix_csv_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("phi.csv");
        let phi = gen_gaussian_matrix(4, 7, 2, false).unwrap();
        write_matrix_csv(&path, &phi).unwrap();
        let back = read_matrix_csv(&path).unwrap();
        assert_eq!(back, phi.matrix);

        let vpath = dir.path().join("y.csv");
        write_vector_csv(&vpath, &[1.5, -0.1, 1e-300]).unwrap();
        assert_eq!(&*read_vector_csv(&vpath).unwrap(), &[1.5, -0.1, 1e-300]);
        assert!(read_vector_csv(&path).is_err());
    }

    #[test]
    fn matrix_csv_rejects_bad_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "3,3\n1,2,3\n").unwrap();
        assert!(matches!(read_matrix_csv(&path), Err(Error::Parse { .. })));
        std::fs::write(&path, "rows=2,cols=2\n1,2\n3\n").unwrap();
        assert!(matches!(read_matrix_csv(&path), Err(Error::Parse { .. })));
        assert!(matches!(read_matrix_csv(&dir.path().join("absent.csv")), Err(Error::Io { .. })));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn signal() -> impl Strategy<Value = Signal> {
            proptest::collection::vec(-10.0f64..10.0, 1..24)
                .prop_map(|v| Signal::new(v).unwrap())
        }

        proptest! {
            #[test]
            fn best_t_term_is_idempotent(x in signal(), t in 0usize..30) {
                let once = best_t_term(&x, t);
                prop_assert_eq!(best_t_term(&once, t), once);
            }

            #[test]
            fn truncation_error_non_increasing(x in signal()) {
                let mut prev = f64::INFINITY;
                for t in 0..=x.len() {
                    let e = linalg::distance(&x, &best_t_term(&x, t));
                    prop_assert!(e <= prev + 1e-15);
                    prev = e;
                }
            }

            #[test]
            fn top_k_norm_monotone_and_consistent(x in signal()) {
                let mut prev = 0.0;
                for k in 1..=x.len() {
                    let v = top_k_norm(&x, k).unwrap();
                    prop_assert!(v >= prev - 1e-15);
                    prop_assert!((v - best_t_term(&x, k).as_vector().norm2()).abs() < 1e-12);
                    prev = v;
                }
                let inf = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                prop_assert_eq!(top_k_norm(&x, 1).unwrap(), inf);
            }

            #[test]
            fn generators_are_referentially_transparent(seed in any::<u64>()) {
                prop_assert_eq!(gen_decaying_signal(16, seed).unwrap(), gen_decaying_signal(16, seed).unwrap());
                prop_assert_eq!(
                    gen_sparse_gaussian_signal(16, 3, seed).unwrap(),
                    gen_sparse_gaussian_signal(16, 3, seed).unwrap()
                );
            }
        }
    }
}
