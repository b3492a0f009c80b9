//! Ground truth for small cones by trying every sign pattern.
//!
//! For each `S ∈ {0,1}^m` the oracle solves `((B − I)·diag(S) + I)·x = Aᵀz`
//! and keeps `x` if its signs agree with `S`. A consistent candidate solves
//! `F(x) = 0`, and the root is unique, so all consistent candidates coincide
//! up to boundary degeneracy.

use crate::cone::{membership_violation, polar_violation, SimplicialCone};
use crate::error::{Error, Result};
use crate::linalg::{check_finite, check_len, dot, norm2, sub, SignPattern};
use crate::newton::{factor_iteration_matrix, residual};
use crate::par::{map_range, Execution};

/// Largest dimension [`enumerate_project`] accepts (4096 patterns).
pub const ORACLE_MAX_DIM: usize = 12;

/// Relative one-sided band used by the consistency test.
pub const CONSISTENCY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub solution: Vec<f64>,
    pub projection: Vec<f64>,
    pub pattern: SignPattern,
    pub candidates_tested: usize,
    pub consistent_count: usize,
    /// `‖F(solution)‖`
    pub residual_norm: f64,
}

struct Candidate {
    x: Vec<f64>,
    residual: f64,
}

fn consistent(pattern: &SignPattern, x: &[f64]) -> bool {
    let band = CONSISTENCY_TOL * (1.0 + norm2(x));
    x.iter().enumerate().all(|(i, &xi)| {
        if pattern.get(i) {
            xi >= -band
        } else {
            xi <= band
        }
    })
}

/// Projects `z` by exhaustive enumeration of sign patterns.
pub fn enumerate_project(c: &SimplicialCone, z: &[f64]) -> Result<OracleResult> {
    enumerate_project_with(c, z, Execution::default())
}

/// [`enumerate_project`] with an explicit execution mode. The result does
/// not depend on `exec`: ties are broken by smallest residual, then by
/// lexicographic pattern order.
pub fn enumerate_project_with(c: &SimplicialCone, z: &[f64], exec: Execution) -> Result<OracleResult> {
    let m = c.dim();
    if m > ORACLE_MAX_DIM {
        return Err(Error::DimensionTooLarge { m, max: ORACLE_MAX_DIM });
    }
    check_len(z, m)?;
    check_finite(z)?;
    let rhs = c.gram_rhs(z);
    let total = 1usize << m;

    let candidates: Vec<Result<Option<Candidate>>> = map_range(total, exec, |idx| {
        let pattern = SignPattern::from_index(idx as u64, m);
        let x = factor_iteration_matrix(c, &pattern)?.solve(&rhs)?;
        if !consistent(&pattern, &x) {
            return Ok(None);
        }
        let residual = norm2(&residual(c, z, &x)?);
        Ok(Some(Candidate { x, residual }))
    });

    let mut best: Option<(usize, Candidate)> = None;
    let mut consistent_count = 0;
    for (idx, cand) in candidates.into_iter().enumerate() {
        let Some(cand) = cand? else { continue };
        consistent_count += 1;
        // Strict comparison keeps the lexicographically first on ties.
        if best.as_ref().is_none_or(|(_, b)| cand.residual < b.residual) {
            best = Some((idx, cand));
        }
    }
    let (idx, best) = best.ok_or(Error::NoConsistentPattern)?;
    Ok(OracleResult {
        projection: c.primal_part(&best.x),
        pattern: SignPattern::from_index(idx as u64, m),
        residual_norm: best.residual,
        solution: best.x,
        candidates_tested: total,
        consistent_count,
    })
}

/// Checks a claimed projection `p` directly against the Moreau
/// characterization: `p ∈ K`, `z − p ∈ K°`, and `|⟨p, z − p⟩| ≤ tol·(1 + ‖p‖‖z − p‖)`.
pub fn verify_kkt(c: &SimplicialCone, z: &[f64], p: &[f64], tol: f64) -> bool {
    let m = c.dim();
    if check_len(z, m).is_err() || check_len(p, m).is_err() {
        return false;
    }
    if check_finite(z).is_err() || check_finite(p).is_err() {
        return false;
    }
    let r = sub(z, p);
    let orth = dot(p, &r).abs() <= tol * (1.0 + norm2(p) * norm2(&r));
    orth && membership_violation(c, p) <= tol && polar_violation(c, &r) <= tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::make_cone;
    use crate::linalg::Matrix;

    fn shear() -> SimplicialCone {
        make_cone(Matrix::from_rows(&[[1.0, 1.0], [0.0, 1.0]]).unwrap()).unwrap()
    }

    #[test]
    fn orthant_example() {
        let c = make_cone(Matrix::identity(2)).unwrap();
        let r = enumerate_project(&c, &[1.0, -1.0]).unwrap();
        assert_eq!(r.pattern.to_vec_u8(), vec![1, 0]);
        assert_eq!(r.solution, vec![1.0, -1.0]);
        assert_eq!(r.projection, vec![1.0, 0.0]);
        assert_eq!(r.candidates_tested, 4);
        assert_eq!(r.consistent_count, 1);
    }

    #[test]
    fn shear_boundary_example() {
        // Patterns for z = (0, 1), Aᵀz = (0, 1):
        //   00: x = (0, 1)        inconsistent (x_2 > 0)
        //   01: x = (−0.5, 0.5)   consistent
        //   10: x = (0, 1)        inconsistent
        //   11: x = (−1, 1)       inconsistent (x_1 < 0)
        let r = enumerate_project(&shear(), &[0.0, 1.0]).unwrap();
        assert_eq!(r.pattern.to_vec_u8(), vec![0, 1]);
        assert_eq!(r.solution, vec![-0.5, 0.5]);
        assert_eq!(r.projection, vec![0.5, 0.5]);
        assert_eq!(r.consistent_count, 1);
    }

    #[test]
    fn shear_polar_example() {
        let r = enumerate_project(&shear(), &[-1.0, 1.0]).unwrap();
        assert_eq!(r.pattern.to_vec_u8(), vec![0, 0]);
        assert_eq!(r.solution, vec![-1.0, 0.0]);
        assert_eq!(r.projection, vec![0.0, 0.0]);
        // u_2 = 0 is a boundary value, so pattern 01 is consistent as well.
        assert_eq!(r.consistent_count, 2);
    }

    #[test]
    fn dimension_cap() {
        let c = make_cone(Matrix::identity(13)).unwrap();
        assert_eq!(
            enumerate_project(&c, &[1.0; 13]).unwrap_err(),
            Error::DimensionTooLarge { m: 13, max: 12 }
        );
    }

    #[test]
    fn kkt_examples() {
        let id = make_cone(Matrix::identity(2)).unwrap();
        assert!(verify_kkt(&id, &[1.0, -1.0], &[1.0, 0.0], 1e-12));
        assert!(verify_kkt(&shear(), &[0.0, 1.0], &[0.5, 0.5], 1e-12));
        assert!(!verify_kkt(&id, &[1.0, 1.0], &[0.0, 0.0], 1e-8));
        // Inside K but not the nearest point.
        assert!(!verify_kkt(&shear(), &[0.0, 1.0], &[1.0, 1.0], 1e-8));
        assert!(!verify_kkt(&id, &[1.0, 1.0], &[1.0], 1e-8));
    }

    #[test]
    fn execution_mode_does_not_change_result() {
        let a = Matrix::from_rows(&[
            [1.0, 0.4, -0.3, 0.2],
            [0.1, 0.9, 0.5, 0.0],
            [-0.2, 0.3, 1.2, 0.4],
            [0.0, -0.6, 0.1, 1.0],
        ])
        .unwrap();
        let c = make_cone(a).unwrap();
        let z = [0.3, -1.1, 0.8, -0.4];
        let s = enumerate_project_with(&c, &z, Execution::Sequential).unwrap();
        let p = enumerate_project_with(&c, &z, Execution::Parallel).unwrap();
        assert_eq!(s, p);
        assert!(verify_kkt(&c, &z, &s.projection, 1e-10));
    }
}
