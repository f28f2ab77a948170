//! Measurement designs with certified restricted isometry constants, used by
//! the acceptance suite.

use sparsekit::model::{gen_gaussian_matrix, MeasurementMatrix};
use sparsekit::rip::rip_constant_exact;
use sparsekit::DenseMatrix;

/// Number of columns of the frame designs.
pub const FRAME_N: usize = 12;

/// Rows `f_j = (cos θ_j, sin θ_j)/√6` with `θ_j = phase + πj/12`: a tight
/// frame of the plane, `Σ f_j f_jᵀ = I`.
pub fn harmonic_frame(phase: f64) -> Vec<[f64; 2]> {
    let c = (2.0 / FRAME_N as f64).sqrt();
    (0..FRAME_N)
        .map(|j| {
            let theta = phase + std::f64::consts::PI * j as f64 / FRAME_N as f64;
            [c * theta.cos(), c * theta.sin()]
        })
        .collect()
}

/// Rows of a random 12×2 matrix with orthonormal columns.
pub fn random_frame(seed: u64) -> Vec<[f64; 2]> {
    let g = gen_gaussian_matrix(FRAME_N, 2, seed, false).unwrap();
    let mut a: Vec<f64> = (0..FRAME_N).map(|i| g.get(i, 0)).collect();
    let mut b: Vec<f64> = (0..FRAME_N).map(|i| g.get(i, 1)).collect();
    normalize(&mut a);
    let p = dot(&a, &b);
    b.iter_mut().zip(&a).for_each(|(bi, ai)| *bi -= p * ai);
    normalize(&mut b);
    (0..FRAME_N).map(|i| [a[i], b[i]]).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) {
    let n = dot(v, v).sqrt();
    v.iter_mut().for_each(|x| *x /= n);
}

/// 10×12 matrix `Φ` with `ΦᵀΦ = s²(I − FFᵀ)` for the 12×2 frame `F`, where the
/// scale `s` centres the eigenvalues of every 3-column Gram matrix around one.
///
/// `I − FFᵀ` is a rank-10 projection, so `Φ` is `s` times an orthonormal basis
/// of its range, transposed. Every 3-column submatrix of a rank-2 projection
/// is singular, which pins the unscaled largest eigenvalue at one; the
/// unscaled `δ₃` then gives the smallest and `s² = 2/(2 − δ₃)`.
pub fn frame_design(frame: &[[f64; 2]]) -> MeasurementMatrix {
    let n = frame.len();
    let projector = |i: usize, j: usize| {
        let p = frame[i][0] * frame[j][0] + frame[i][1] * frame[j][1];
        if i == j {
            1.0 - p
        } else {
            -p
        }
    };
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for j in 0..n {
        let mut v: Vec<f64> = (0..n).map(|i| projector(i, j)).collect();
        for _ in 0..2 {
            for q in &basis {
                let p = dot(q, &v);
                v.iter_mut().zip(q).for_each(|(vi, qi)| *vi -= p * qi);
            }
        }
        if dot(&v, &v).sqrt() > 1e-8 {
            normalize(&mut v);
            basis.push(v);
        }
    }
    assert_eq!(basis.len(), n - 2, "frame must have rank 2");
    let unscaled =
        MeasurementMatrix::from_matrix(DenseMatrix::from_fn(n - 2, n, |i, j| basis[i][j]));
    let d = rip_constant_exact(&unscaled, 3).unwrap();
    let mut matrix = unscaled.matrix;
    matrix.scale((2.0 / (2.0 - d)).sqrt());
    MeasurementMatrix::from_matrix(matrix)
}
