//! Simplicial cones `K = A·R^m₊`, their polars, and the Moreau
//! decomposition certificate.
//!
//! For nonsingular `A` the polar cone is `K° = −(Aᵀ)⁻¹·R^m₊`, and every
//! `z` splits uniquely as `z = A·x⁺ − (Aᵀ)⁻¹·x⁻` with the two pieces being
//! the projections onto `K` and `K°`. [`moreau_verify`] checks a claimed
//! `x` against that characterization using only membership and inner
//! product tests.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{
    check_finite, check_len, dot, lu_factor, negative_part, norm2, positive_part, spectral_norm,
    LuFactors, Matrix,
};

/// A nonsingular generator matrix `A` together with the factorizations and
/// Gram data the solvers reuse.
#[derive(Debug, Clone)]
pub struct SimplicialCone {
    generator: Matrix,
    lu_a: LuFactors,
    lu_at: LuFactors,
    gram: Matrix,
    gram_defect: f64,
    column_norms: Vec<f64>,
}

impl SimplicialCone {
    /// Builds the cone generated by the columns of `a`.
    pub fn new(a: Matrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::NonSquare {
                rows: a.nrows(),
                cols: a.ncols(),
            });
        }
        let singular = |err: Error| match err {
            Error::SingularMatrix { column, pivot, .. } => Error::SingularGenerator { column, pivot },
            other => other,
        };
        let lu_a = lu_factor(&a).map_err(singular)?;
        let lu_at = lu_factor(&a.transpose()).map_err(singular)?;
        let gram = a.gram();
        let gram_defect = spectral_norm(&gram.minus_identity());
        let column_norms = (0..a.ncols()).map(|j| norm2(&a.column(j))).collect();
        Ok(SimplicialCone {
            generator: a,
            lu_a,
            lu_at,
            gram,
            gram_defect,
            column_norms,
        })
    }

    pub fn dim(&self) -> usize {
        self.generator.nrows()
    }

    /// The generator matrix `A`.
    pub fn generator(&self) -> &Matrix {
        &self.generator
    }

    /// `B = AᵀA`
    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    /// `‖AᵀA − I‖`
    pub fn gram_defect(&self) -> f64 {
        self.gram_defect
    }

    pub fn lu_generator(&self) -> &LuFactors {
        &self.lu_a
    }

    pub fn lu_generator_transpose(&self) -> &LuFactors {
        &self.lu_at
    }

    /// `Aᵀz`
    pub fn gram_rhs(&self, z: &[f64]) -> Vec<f64> {
        self.generator.tr_mul_vec(z)
    }

    /// `A·x⁺`, the projection encoded by a solution `x`.
    pub fn primal_part(&self, x: &[f64]) -> Vec<f64> {
        self.generator.mul_vec(&positive_part(x))
    }

    /// `−(Aᵀ)⁻¹·x⁻`, the polar component encoded by `x`.
    pub fn polar_part(&self, x: &[f64]) -> Vec<f64> {
        let mut q = self
            .lu_at
            .solve(&negative_part(x))
            .expect("length checked by caller");
        q.iter_mut().for_each(|v| *v = -*v);
        q
    }

    fn validate(&self, v: &[f64]) -> Result<()> {
        check_len(v, self.dim())?;
        check_finite(v)
    }
}

/// Convenience wrapper for [`SimplicialCone::new`].
pub fn make_cone(a: Matrix) -> Result<SimplicialCone> {
    SimplicialCone::new(a)
}

/// Generators of the polar cone, `−(Aᵀ)⁻¹`, one column per generator.
pub fn polar_generators(c: &SimplicialCone) -> Matrix {
    let m = c.dim();
    let columns: Vec<Vec<f64>> = (0..m)
        .map(|j| {
            let mut e = vec![0.0; m];
            e[j] = -1.0;
            c.lu_at.solve(&e).expect("unit vector has cone dimension")
        })
        .collect();
    Matrix::from_columns(&columns)
}

/// How far `y` is outside `K`: `max(0, −min_i w_i) / (1 + ‖y‖)` where
/// `A·w = y`.
pub fn membership_violation(c: &SimplicialCone, y: &[f64]) -> f64 {
    let w = c.lu_a.solve(y).expect("length checked by caller");
    let worst = w.iter().fold(0.0f64, |acc, &wi| acc.max(-wi));
    worst / (1.0 + norm2(y))
}

/// How far `y` is outside `K°`: the largest normalized
/// `⟨y, a_i⟩ / (1 + ‖y‖‖a_i‖)` over generator columns, floored at 0.
pub fn polar_violation(c: &SimplicialCone, y: &[f64]) -> f64 {
    let ny = norm2(y);
    let inner = c.generator.tr_mul_vec(y);
    inner
        .iter()
        .zip(&c.column_norms)
        .fold(0.0f64, |acc, (&ip, &na)| acc.max(ip / (1.0 + ny * na)))
}

/// `y ∈ K` up to a relative tolerance: `A⁻¹y ≥ −tol·(1 + ‖y‖)`.
pub fn contains(c: &SimplicialCone, y: &[f64], tol: f64) -> Result<bool> {
    c.validate(y)?;
    Ok(membership_violation(c, y) <= tol)
}

/// `y ∈ K°` by the definition of the polar: `⟨y, a_i⟩ ≤ tol·(1 + ‖y‖‖a_i‖)`
/// for every generator column `a_i`.
pub fn polar_contains(c: &SimplicialCone, y: &[f64], tol: f64) -> Result<bool> {
    c.validate(y)?;
    Ok(polar_violation(c, y) <= tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MoreauCheck {
    Decomposition,
    Orthogonality,
    PrimalMembership,
    PolarMembership,
}

impl fmt::Display for MoreauCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MoreauCheck::Decomposition => "decomposition",
            MoreauCheck::Orthogonality => "orthogonality",
            MoreauCheck::PrimalMembership => "primal membership",
            MoreauCheck::PolarMembership => "polar membership",
        })
    }
}

/// The split `z = p + q` with `p = A·x⁺ ∈ K`, `q = −(Aᵀ)⁻¹x⁻ ∈ K°`,
/// together with the measured violation of each condition.
///
/// All violations are relative:
/// - decomposition: `‖z − p − q‖ / (1 + ‖z‖)`
/// - orthogonality: `|⟨p, q⟩| / (1 + ‖p‖‖q‖)`
/// - memberships: see [`membership_violation`] and [`polar_violation`]
#[derive(Debug, Clone, PartialEq)]
pub struct MoreauCertificate {
    pub point: Vec<f64>,
    pub primal: Vec<f64>,
    pub polar: Vec<f64>,
    pub decomposition: f64,
    pub orthogonality: f64,
    pub primal_membership: f64,
    pub polar_membership: f64,
    pub max_violation: f64,
}

impl MoreauCertificate {
    pub fn violations(&self) -> [(MoreauCheck, f64); 4] {
        [
            (MoreauCheck::Decomposition, self.decomposition),
            (MoreauCheck::Orthogonality, self.orthogonality),
            (MoreauCheck::PrimalMembership, self.primal_membership),
            (MoreauCheck::PolarMembership, self.polar_membership),
        ]
    }

    /// The check with the largest violation.
    pub fn worst(&self) -> (MoreauCheck, f64) {
        self.violations()
            .into_iter()
            .fold((MoreauCheck::Decomposition, f64::NEG_INFINITY), |best, cur| {
                if cur.1 > best.1 {
                    cur
                } else {
                    best
                }
            })
    }

    pub fn accepts(&self, tol: f64) -> bool {
        self.max_violation <= tol
    }
}

/// Measures the Moreau conditions for the candidate `x` without judging
/// them.
pub fn moreau_certificate(c: &SimplicialCone, z: &[f64], x: &[f64]) -> Result<MoreauCertificate> {
    c.validate(z)?;
    c.validate(x)?;
    let primal = c.primal_part(x);
    let polar = c.polar_part(x);

    let gap: Vec<f64> = z
        .iter()
        .zip(primal.iter().zip(&polar))
        .map(|(zi, (pi, qi))| zi - pi - qi)
        .collect();
    let decomposition = norm2(&gap) / (1.0 + norm2(z));
    let orthogonality = dot(&primal, &polar).abs() / (1.0 + norm2(&primal) * norm2(&polar));
    let primal_membership = membership_violation(c, &primal);
    let polar_membership = polar_violation(c, &polar);
    let max_violation = decomposition
        .max(orthogonality)
        .max(primal_membership)
        .max(polar_membership);

    Ok(MoreauCertificate {
        point: z.to_vec(),
        primal,
        polar,
        decomposition,
        orthogonality,
        primal_membership,
        polar_membership,
        max_violation,
    })
}

/// Accepts `x` iff every Moreau condition holds within `tol`; otherwise
/// reports the worst check.
pub fn moreau_verify(c: &SimplicialCone, z: &[f64], x: &[f64], tol: f64) -> Result<MoreauCertificate> {
    let cert = moreau_certificate(c, z, x)?;
    if cert.max_violation.is_nan() || !cert.accepts(tol) {
        let (check, violation) = cert.worst();
        return Err(Error::CertificateRejected { check, violation, tol });
    }
    Ok(cert)
}
