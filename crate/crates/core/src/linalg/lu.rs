use super::{check_len, Matrix};
use crate::error::{Error, Result};

/// Pivots smaller than this fraction of `max |a_ij|` are treated as zero.
pub const PIVOT_THRESHOLD: f64 = 1e-14;

/// `P·A = L·U` with `L` unit lower triangular and `U` upper triangular.
///
/// `perm[i]` is the row of `A` that ends up in row `i` of `P·A`.
#[derive(Debug, Clone, PartialEq)]
pub struct LuFactors {
    pub lower: Matrix,
    pub upper: Matrix,
    pub perm: Vec<usize>,
    /// Determinant of the permutation, `±1`.
    pub sign: f64,
}

impl LuFactors {
    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn permutation_matrix(&self) -> Matrix {
        let n = self.dim();
        let mut p = Matrix::zeros(n, n);
        for (i, &src) in self.perm.iter().enumerate() {
            p[(i, src)] = 1.0;
        }
        p
    }

    pub fn determinant(&self) -> f64 {
        (0..self.dim()).fold(self.sign, |acc, i| acc * self.upper[(i, i)])
    }

    /// Ratio of the largest to the smallest pivot magnitude, a cheap
    /// conditioning indicator.
    pub fn pivot_ratio(&self) -> f64 {
        let (lo, hi) = (0..self.dim()).fold((f64::INFINITY, 0.0f64), |(lo, hi), i| {
            let p = self.upper[(i, i)].abs();
            (lo.min(p), hi.max(p))
        });
        hi / lo
    }

    /// Solves `A·x = rhs`.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        lu_solve(self, rhs)
    }

    /// Solves `A·X = B` column by column.
    pub fn solve_matrix(&self, rhs: &Matrix) -> Result<Matrix> {
        if rhs.nrows() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: rhs.nrows(),
            });
        }
        let columns = (0..rhs.ncols())
            .map(|j| lu_solve(self, &rhs.column(j)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Matrix::from_columns(&columns))
    }

    /// `A⁻¹`
    pub fn inverse(&self) -> Matrix {
        self.solve_matrix(&Matrix::identity(self.dim()))
            .expect("identity has matching dimension")
    }
}

/// Gaussian elimination with partial pivoting.
pub fn lu_factor(a: &Matrix) -> Result<LuFactors> {
    if !a.is_square() {
        return Err(Error::NonSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    let n = a.nrows();
    let threshold = PIVOT_THRESHOLD * a.max_abs();
    let mut work = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut sign = 1.0;

    for k in 0..n {
        let (p, pivot) = (k..n)
            .map(|i| (i, work[(i, k)].abs()))
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if !(pivot >= threshold) || pivot == 0.0 {
            return Err(Error::SingularMatrix {
                column: k,
                pivot,
                threshold,
            });
        }
        if p != k {
            for j in 0..n {
                let tmp = work[(k, j)];
                work[(k, j)] = work[(p, j)];
                work[(p, j)] = tmp;
            }
            perm.swap(k, p);
            sign = -sign;
        }
        let diag = work[(k, k)];
        for i in k + 1..n {
            let factor = work[(i, k)] / diag;
            work[(i, k)] = factor;
            if factor != 0.0 {
                for j in k + 1..n {
                    work[(i, j)] -= factor * work[(k, j)];
                }
            }
        }
    }

    let mut lower = Matrix::identity(n);
    let mut upper = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if j < i {
                lower[(i, j)] = work[(i, j)];
            } else {
                upper[(i, j)] = work[(i, j)];
            }
        }
    }
    Ok(LuFactors {
        lower,
        upper,
        perm,
        sign,
    })
}

/// Forward then back substitution against the stored factors.
pub fn lu_solve(f: &LuFactors, rhs: &[f64]) -> Result<Vec<f64>> {
    let n = f.dim();
    check_len(rhs, n)?;
    let mut y: Vec<f64> = f.perm.iter().map(|&src| rhs[src]).collect();
    for i in 0..n {
        let mut s = y[i];
        for j in 0..i {
            s -= f.lower[(i, j)] * y[j];
        }
        y[i] = s;
    }
    for i in (0..n).rev() {
        let mut s = y[i];
        for j in i + 1..n {
            s -= f.upper[(i, j)] * y[j];
        }
        y[i] = s / f.upper[(i, i)];
    }
    Ok(y)
}
