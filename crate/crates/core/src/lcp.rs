//! The projection problem as a linear complementarity problem, solved by
//! Lemke's complementary pivoting.
//!
//! Writing `u = x⁺` and `v = x⁻`, the equation `AᵀA·x⁺ − x⁻ = Aᵀz` becomes
//!
//! ```text
//! v = M·u + q,   u ≥ 0,   v ≥ 0,   ⟨u, v⟩ = 0
//! ```
//!
//! with `M = AᵀA` and `q = −Aᵀz`. Since `M` is positive definite the LCP
//! has exactly one solution and the projection is `A·u`.
//!
//! The tableau is dense `f64` with covering vector `e = (1, …, 1)` and
//! lexicographic tie-breaking on the leaving variable.

use std::fmt;

use crate::cone::SimplicialCone;
use crate::error::{Error, Result};
use crate::linalg::{check_len, lu_factor, Matrix};

#[derive(Debug, Clone, PartialEq)]
pub struct LcpProblem {
    pub m_matrix: Matrix,
    pub q: Vec<f64>,
}

impl LcpProblem {
    pub fn new(m_matrix: Matrix, q: Vec<f64>) -> Result<Self> {
        if !m_matrix.is_square() {
            return Err(Error::NonSquare {
                rows: m_matrix.nrows(),
                cols: m_matrix.ncols(),
            });
        }
        check_len(&q, m_matrix.nrows())?;
        Ok(LcpProblem { m_matrix, q })
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }
}

/// `(M, q) = (AᵀA, −Aᵀz)`
pub fn from_projection(c: &SimplicialCone, z: &[f64]) -> Result<LcpProblem> {
    check_len(z, c.dim())?;
    let q = c.gram_rhs(z).into_iter().map(|v| -v).collect();
    Ok(LcpProblem {
        m_matrix: c.gram().clone(),
        q,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LcpStatus {
    Solved,
    RayTermination,
    PivotLimit,
}

impl LcpStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            LcpStatus::Solved => "Solved",
            LcpStatus::RayTermination => "RayTermination",
            LcpStatus::PivotLimit => "PivotLimit",
        }
    }
}

impl fmt::Display for LcpStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Tableau variable labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LcpVar {
    W(usize),
    Z(usize),
    Z0,
}

impl fmt::Display for LcpVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LcpVar::W(i) => write!(f, "w{}", i + 1),
            LcpVar::Z(i) => write!(f, "z{}", i + 1),
            LcpVar::Z0 => f.write_str("z0"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LcpSolution {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub pivots: usize,
    pub status: LcpStatus,
    /// Tableau state when the run did not end in `Solved`.
    pub diagnostics: Option<String>,
}

/// Solution of the projection problem recovered from an LCP solution.
#[derive(Debug, Clone, PartialEq)]
pub struct LcpProjection {
    /// `x = u − v`
    pub x: Vec<f64>,
    /// `A·u`
    pub projection: Vec<f64>,
}

/// Default pivot budget for an `n`-dimensional problem.
pub fn default_pivot_limit(n: usize) -> usize {
    (10 * n * n).max(1000)
}

struct Tableau {
    n: usize,
    // n rows of [w-columns (n) | z-columns (n) | z0 column]
    cols: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<LcpVar>,
}

impl Tableau {
    fn new(p: &LcpProblem) -> Self {
        let n = p.dim();
        let width = 2 * n + 1;
        let cols = (0..n)
            .map(|i| {
                let mut row = vec![0.0; width];
                row[i] = 1.0;
                for j in 0..n {
                    row[n + j] = -p.m_matrix[(i, j)];
                }
                row[2 * n] = -1.0;
                row
            })
            .collect();
        Tableau {
            n,
            cols,
            rhs: p.q.clone(),
            basis: (0..n).map(LcpVar::W).collect(),
        }
    }

    fn column_of(&self, var: LcpVar) -> usize {
        match var {
            LcpVar::W(i) => i,
            LcpVar::Z(i) => self.n + i,
            LcpVar::Z0 => 2 * self.n,
        }
    }

    fn pivot(&mut self, row: usize, var: LcpVar) -> LcpVar {
        let col = self.column_of(var);
        let piv = self.cols[row][col];
        self.cols[row].iter_mut().for_each(|v| *v /= piv);
        self.rhs[row] /= piv;
        let pivot_row = self.cols[row].clone();
        let pivot_rhs = self.rhs[row];
        for i in (0..self.n).filter(|&i| i != row) {
            let factor = self.cols[i][col];
            if factor == 0.0 {
                continue;
            }
            for (t, p) in self.cols[i].iter_mut().zip(&pivot_row) {
                *t -= factor * p;
            }
            self.cols[i][col] = 0.0;
            self.rhs[i] -= factor * pivot_rhs;
        }
        std::mem::replace(&mut self.basis[row], var)
    }

    /// Leaving row for `entering` by the lexicographic minimum ratio test,
    /// preferring `z0` when it ties for the minimum. `None` means a ray.
    fn leaving_row(&self, entering: LcpVar) -> Option<usize> {
        let col = self.column_of(entering);
        let scale = self.cols.iter().fold(1.0f64, |acc, r| acc.max(r[col].abs()));
        let eps = 1e-11 * scale;
        let mut rows: Vec<usize> = (0..self.n).filter(|&i| self.cols[i][col] > eps).collect();
        if rows.is_empty() {
            return None;
        }

        let ratio = |i: usize| self.rhs[i] / self.cols[i][col];
        let theta = rows.iter().map(|&i| ratio(i)).fold(f64::INFINITY, f64::min);
        let tie = 1e-12 * (1.0 + theta.abs());
        rows.retain(|&i| ratio(i) <= theta + tie);
        if let Some(&r) = rows.iter().find(|&&i| self.basis[i] == LcpVar::Z0) {
            return Some(r);
        }

        // Break remaining ties on the columns of the current basis inverse,
        // which are the w-columns of the tableau.
        for j in 0..self.n {
            if rows.len() == 1 {
                break;
            }
            let lex = |i: usize| self.cols[i][j] / self.cols[i][col];
            let best = rows.iter().map(|&i| lex(i)).fold(f64::INFINITY, f64::min);
            let tie = 1e-12 * (1.0 + best.abs());
            rows.retain(|&i| lex(i) <= best + tie);
        }
        rows.first().copied()
    }

    fn values(&self) -> (Vec<f64>, Vec<f64>) {
        let mut u = vec![0.0; self.n];
        let mut v = vec![0.0; self.n];
        for (i, var) in self.basis.iter().enumerate() {
            match *var {
                LcpVar::W(k) => v[k] = self.rhs[i],
                LcpVar::Z(k) => u[k] = self.rhs[i],
                LcpVar::Z0 => {}
            }
        }
        (u, v)
    }

    fn describe(&self, entering: LcpVar) -> String {
        let z0 = self
            .basis
            .iter()
            .position(|&b| b == LcpVar::Z0)
            .map_or(0.0, |r| self.rhs[r]);
        let basis: Vec<String> = self.basis.iter().map(ToString::to_string).collect();
        format!("entering {entering}, z0 = {z0:e}, basis [{}]", basis.join(", "))
    }
}

/// Lemke's method with covering vector `e` and at most `pivot_limit` pivots.
pub fn lemke_solve(p: &LcpProblem, pivot_limit: usize) -> Result<LcpSolution> {
    if pivot_limit == 0 {
        return Err(Error::BadParam("pivot_limit must be at least 1".into()));
    }
    let n = p.dim();
    if p.q.iter().all(|&qi| qi >= 0.0) {
        return Ok(LcpSolution {
            u: vec![0.0; n],
            v: p.q.clone(),
            pivots: 0,
            status: LcpStatus::Solved,
            diagnostics: None,
        });
    }

    let mut tab = Tableau::new(p);
    // z0 enters at the most negative q_i; among equal values the last index
    // keeps the tableau lexicographically positive.
    let first = (0..n)
        .fold(0, |best, i| if p.q[i] <= p.q[best] { i } else { best });
    let mut leaving = tab.pivot(first, LcpVar::Z0);
    let mut pivots = 1;

    loop {
        let entering = match leaving {
            LcpVar::W(i) => LcpVar::Z(i),
            LcpVar::Z(i) => LcpVar::W(i),
            LcpVar::Z0 => break,
        };
        if pivots >= pivot_limit {
            let (u, v) = tab.values();
            return Ok(LcpSolution {
                u,
                v,
                pivots,
                status: LcpStatus::PivotLimit,
                diagnostics: Some(tab.describe(entering)),
            });
        }
        let Some(row) = tab.leaving_row(entering) else {
            let (u, v) = tab.values();
            return Ok(LcpSolution {
                u,
                v,
                pivots,
                status: LcpStatus::RayTermination,
                diagnostics: Some(tab.describe(entering)),
            });
        };
        leaving = tab.pivot(row, entering);
        pivots += 1;
    }

    let (u, v) = tab.values();
    let (u, v) = polish(p, u, v);
    Ok(LcpSolution {
        u,
        v,
        pivots,
        status: LcpStatus::Solved,
        diagnostics: None,
    })
}

/// Re-solves the final principal system `M_αα·u_α = −q_α` directly, where
/// `α` is the support of `u`, and recomputes `v = M·u + q`. Keeps the
/// tableau values if the refined point leaves the nonnegative orthant.
fn polish(p: &LcpProblem, u: Vec<f64>, v: Vec<f64>) -> (Vec<f64>, Vec<f64>) {
    let n = p.dim();
    let support: Vec<usize> = (0..n).filter(|&i| u[i] > 0.0).collect();
    let mut refined = vec![0.0; n];
    if !support.is_empty() {
        let k = support.len();
        let mut sub = Matrix::zeros(k, k);
        for (a, &i) in support.iter().enumerate() {
            for (b, &j) in support.iter().enumerate() {
                sub[(a, b)] = p.m_matrix[(i, j)];
            }
        }
        let rhs: Vec<f64> = support.iter().map(|&i| -p.q[i]).collect();
        let Ok(sol) = lu_factor(&sub).and_then(|f| f.solve(&rhs)) else {
            return (u, v);
        };
        for (a, &i) in support.iter().enumerate() {
            refined[i] = sol[a];
        }
    }
    let mut w = p.m_matrix.mul_vec(&refined);
    w.iter_mut().zip(&p.q).for_each(|(wi, qi)| *wi += qi);
    for &i in &support {
        w[i] = 0.0;
    }
    let scale = 1.0 + crate::linalg::norm2(&p.q);
    let ok = refined.iter().all(|&x| x >= 0.0) && w.iter().all(|&x| x >= -1e-12 * scale);
    if ok {
        (refined, w.into_iter().map(|x| x.max(0.0)).collect())
    } else {
        (u, v)
    }
}

/// `x = u − v` and the projection `A·u`.
pub fn to_solution(sol: &LcpSolution, c: &SimplicialCone) -> Result<LcpProjection> {
    if sol.status != LcpStatus::Solved {
        return Err(Error::NotSolved {
            status: sol.status.to_string(),
        });
    }
    check_len(&sol.u, c.dim())?;
    check_len(&sol.v, c.dim())?;
    let x = sol.u.iter().zip(&sol.v).map(|(u, v)| u - v).collect();
    Ok(LcpProjection {
        x,
        projection: c.generator().mul_vec(&sol.u),
    })
}
