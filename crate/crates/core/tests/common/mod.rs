#![allow(dead_code)]

use simcone::linalg::Matrix;
use simcone::rng::SplitMix64;

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
pub fn symmetric_eigenvalues(s: &Matrix) -> Vec<f64> {
    let n = s.nrows();
    let mut a: Vec<Vec<f64>> = (0..n).map(|i| s.row(i).to_vec()).collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - sn * akq;
                    a[k][q] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - sn * aqk;
                    a[q][k] = sn * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(|x, y| y.partial_cmp(x).unwrap());
    ev
}

/// Singular values of `m`, largest first, as square roots of the
/// eigenvalues of `mᵀm`.
pub fn singular_values(m: &Matrix) -> Vec<f64> {
    symmetric_eigenvalues(&m.transpose().matmul(m))
        .into_iter()
        .map(|l| l.max(0.0).sqrt())
        .collect()
}

pub fn random_matrix(rng: &mut SplitMix64, rows: usize, cols: usize, lo: f64, hi: f64) -> Matrix {
    Matrix::new(rows, cols, rng.uniform_vec(rows * cols, lo, hi)).unwrap()
}

/// `I + 0.3/√m · E` with `E` uniform in `[−1, 1]`: comfortably nonsingular.
pub fn well_conditioned(rng: &mut SplitMix64, m: usize) -> Matrix {
    let e = random_matrix(rng, m, m, -1.0, 1.0).scale(0.3 / (m as f64).sqrt());
    let mut a = e;
    for i in 0..m {
        a[(i, i)] += 1.0;
    }
    a
}
