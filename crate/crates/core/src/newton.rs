//! Semi-smooth Newton iteration for `F(x) = (AᵀA − I)·x⁺ + x − Aᵀz = 0`.
//!
//! Each step uses the generalized-Jacobian element
//! `C_k = (B − I)·diag(sgn(x_k⁺)) + I` and, because `C_k·x_k = (B − I)·x_k⁺ + x_k`,
//! reduces to the linear solve `C_k·x_{k+1} = Aᵀz`. `C_k` keeps the columns
//! of `B` where the pattern bit is set and identity columns elsewhere, so
//! its determinant is a principal minor of the positive definite `B` and the
//! step is always defined.
//!
//! If two consecutive iterates share a sign pattern, the later one is an
//! exact root. The solver stops on that condition first, then on a small
//! residual, then on a repeated (non-adjacent) pattern, then on the
//! iteration cap.

use std::collections::HashSet;
use std::fmt;

use crate::cone::{moreau_certificate, MoreauCertificate, SimplicialCone};
use crate::error::{Error, Result};
use crate::linalg::{
    check_finite, check_len, distance, lu_factor, norm2, positive_part, sign_pattern, spectral_norm,
    LuFactors, Matrix, SignPattern,
};
use crate::par::{map_range, Execution};

/// Starting point of the iteration.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Start {
    /// `x₀ = Aᵀz`
    #[default]
    GramRhs,
    Zero,
    Custom(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Residual stop, relative to `1 + ‖Aᵀz‖`.
    pub residual_tol: f64,
    pub max_iters: usize,
    pub start: Start,
    pub detect_cycles: bool,
    /// Tolerance for the Moreau certificate attached to converged reports.
    pub certificate_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            residual_tol: 1e-10,
            max_iters: 200,
            start: Start::GramRhs,
            detect_cycles: true,
            certificate_tol: 1e-8,
        }
    }
}

impl SolverConfig {
    fn validate(&self) -> Result<()> {
        if !(self.residual_tol > 0.0) {
            return Err(Error::BadParam(format!("residual_tol must be positive, got {}", self.residual_tol)));
        }
        if self.max_iters == 0 {
            return Err(Error::BadParam("max_iters must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    SignStable,
    ResidualConverged,
    CycleDetected,
    MaxIters,
}

impl Status {
    pub fn is_converged(self) -> bool {
        matches!(self, Status::SignStable | Status::ResidualConverged)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::SignStable => "SignStable",
            Status::ResidualConverged => "ResidualConverged",
            Status::CycleDetected => "CycleDetected",
            Status::MaxIters => "MaxIters",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One Newton step taken from `iterate`.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep {
    pub iterate: Vec<f64>,
    pub pattern: SignPattern,
    /// `‖F(x_k)‖`
    pub residual_norm: f64,
    /// `‖x_{k+1} − x_k‖`
    pub step_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct NewtonTrace {
    pub steps: Vec<TraceStep>,
}

impl NewtonTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn patterns(&self) -> impl Iterator<Item = &SignPattern> {
        self.steps.iter().map(|s| &s.pattern)
    }

    pub fn iterates(&self) -> impl Iterator<Item = &[f64]> {
        self.steps.iter().map(|s| s.iterate.as_slice())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    /// Final iterate `u`.
    pub solution: Vec<f64>,
    /// `A·u⁺`
    pub projection: Vec<f64>,
    /// `−(Aᵀ)⁻¹·u⁻`
    pub polar_part: Vec<f64>,
    pub status: Status,
    pub iterations: usize,
    /// `‖F(u)‖`
    pub residual_norm: f64,
    pub trace: NewtonTrace,
    /// Present when the run converged.
    pub certificate: Option<MoreauCertificate>,
    /// Whether the certificate met `SolverConfig::certificate_tol`.
    pub certified: bool,
}

/// `F(x) = (B − I)·x⁺ + x − Aᵀz`
pub fn residual(c: &SimplicialCone, z: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    check_len(z, c.dim())?;
    check_len(x, c.dim())?;
    Ok(residual_with_rhs(c, &c.gram_rhs(z), x))
}

fn residual_with_rhs(c: &SimplicialCone, rhs: &[f64], x: &[f64]) -> Vec<f64> {
    let plus = positive_part(x);
    let b_plus = c.gram().mul_vec(&plus);
    (0..x.len())
        .map(|i| (b_plus[i] - plus[i]) + x[i] - rhs[i])
        .collect()
}

/// `C = (B − I)·diag(pattern) + I`: column `j` is column `j` of `B` when the
/// bit is set and `e_j` otherwise.
pub fn iteration_matrix(gram: &Matrix, pattern: &SignPattern) -> Matrix {
    let m = gram.nrows();
    let mut c = Matrix::identity(m);
    for j in (0..m).filter(|&j| pattern.get(j)) {
        for i in 0..m {
            c[(i, j)] = gram[(i, j)];
        }
    }
    c
}

/// Factors the iteration matrix for `pattern`; failure here means the
/// matrix is numerically singular even though it is nonsingular in exact
/// arithmetic.
pub fn factor_iteration_matrix(c: &SimplicialCone, pattern: &SignPattern) -> Result<LuFactors> {
    let mat = iteration_matrix(c.gram(), pattern);
    lu_factor(&mat).map_err(|err| match err {
        Error::SingularMatrix { pivot, .. } => Error::NumericalSingularity {
            pattern: pattern.clone(),
            condition_estimate: mat.max_abs() / pivot,
        },
        other => other,
    })
}

fn step_with_rhs(c: &SimplicialCone, rhs: &[f64], pattern: &SignPattern) -> Result<Vec<f64>> {
    factor_iteration_matrix(c, pattern)?.solve(rhs)
}

/// One semi-smooth Newton step: solves `C_k·x_{k+1} = Aᵀz` with the pattern
/// of `x_k`.
pub fn newton_step(c: &SimplicialCone, z: &[f64], x_k: &[f64]) -> Result<Vec<f64>> {
    check_len(z, c.dim())?;
    check_len(x_k, c.dim())?;
    step_with_rhs(c, &c.gram_rhs(z), &sign_pattern(x_k))
}

/// Runs the iteration from `cfg.start` until one of the stop rules fires.
pub fn solve(c: &SimplicialCone, z: &[f64], cfg: &SolverConfig) -> Result<SolveReport> {
    cfg.validate()?;
    let m = c.dim();
    check_len(z, m)?;
    check_finite(z)?;

    let rhs = c.gram_rhs(z);
    let tol = cfg.residual_tol * (1.0 + norm2(&rhs));
    let mut x = match &cfg.start {
        Start::GramRhs => rhs.clone(),
        Start::Zero => vec![0.0; m],
        Start::Custom(x0) => {
            check_len(x0, m)?;
            check_finite(x0)?;
            x0.clone()
        }
    };
    let mut pattern = sign_pattern(&x);
    let mut res_norm = norm2(&residual_with_rhs(c, &rhs, &x));
    let mut seen: HashSet<SignPattern> = HashSet::new();
    seen.insert(pattern.clone());

    let mut trace = NewtonTrace::default();
    let mut status = Status::MaxIters;

    for k in 0..cfg.max_iters {
        let next = step_with_rhs(c, &rhs, &pattern)?;
        let next_pattern = sign_pattern(&next);
        let next_res = norm2(&residual_with_rhs(c, &rhs, &next));
        let step_norm = distance(&x, &next);
        let prev = std::mem::replace(&mut x, next);
        let prev_pattern = std::mem::replace(&mut pattern, next_pattern);
        trace.steps.push(TraceStep {
            iterate: prev,
            pattern: prev_pattern,
            residual_norm: res_norm,
            step_norm,
        });
        res_norm = next_res;

        if trace.steps[k].pattern == pattern {
            if !(res_norm <= tol) {
                return Err(Error::ResidualCheckFailed {
                    residual: res_norm,
                    bound: tol,
                });
            }
            status = Status::SignStable;
            break;
        }
        if res_norm <= tol {
            status = Status::ResidualConverged;
            break;
        }
        // The previous pattern differs (checked above), so any hit here is a
        // non-adjacent repeat.
        if cfg.detect_cycles && !seen.insert(pattern.clone()) {
            status = Status::CycleDetected;
            break;
        }
    }

    let projection = c.primal_part(&x);
    let polar_part = c.polar_part(&x);
    let certificate = if status.is_converged() {
        Some(moreau_certificate(c, z, &x)?)
    } else {
        None
    };
    Ok(SolveReport {
        iterations: trace.len(),
        solution: x,
        projection,
        polar_part,
        status,
        residual_norm: res_norm,
        trace,
        certified: certificate.as_ref().is_some_and(|cert| cert.accepts(cfg.certificate_tol)),
        certificate,
    })
}

/// Projection of `z` onto the cone with the default configuration.
pub fn project(c: &SimplicialCone, z: &[f64]) -> Result<Vec<f64>> {
    Ok(solve(c, z, &SolverConfig::default())?.projection)
}

/// Outcome of testing `‖AᵀA − I‖ < 1/3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SufficientCondition {
    pub defect: f64,
    pub guaranteed: bool,
    /// Linear contraction factor `2·b/(1 − b)` with `b` the defect; `None`
    /// when the condition fails.
    pub rate_bound: Option<f64>,
}

pub fn check_sufficient_condition(c: &SimplicialCone) -> SufficientCondition {
    let defect = c.gram_defect();
    let guaranteed = defect < 1.0 / 3.0;
    SufficientCondition {
        defect,
        guaranteed,
        rate_bound: guaranteed.then(|| 2.0 * defect / (1.0 - defect)),
    }
}

/// Largest pattern count accepted by [`check_cc_condition`].
pub const CC_MAX_DIM: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct CcCheck {
    pub holds: bool,
    pub worst_pattern: SignPattern,
    pub worst_norm: f64,
}

/// `‖((B − I)·G + I)⁻¹·(B − I)‖` for the diagonal 0/1 matrix `G = diag(pattern)`.
pub fn cc_norm(c: &SimplicialCone, pattern: &SignPattern) -> Result<f64> {
    let lu = factor_iteration_matrix(c, pattern)?;
    let b_minus_i = c.gram().minus_identity();
    Ok(spectral_norm(&lu.solve_matrix(&b_minus_i)?))
}

/// Checks `‖((B − I)·G + I)⁻¹·(B − I)‖ < a` over all `2^m` diagonal 0/1
/// matrices `G`, reporting the worst one.
pub fn check_cc_condition(c: &SimplicialCone, a: f64) -> Result<CcCheck> {
    check_cc_condition_with(c, a, Execution::default())
}

pub fn check_cc_condition_with(c: &SimplicialCone, a: f64, exec: Execution) -> Result<CcCheck> {
    if !(a > 0.0 && a < 0.5) {
        return Err(Error::BadParam(format!("a must lie in (0, 1/2), got {a}")));
    }
    let m = c.dim();
    if m > CC_MAX_DIM {
        return Err(Error::DimensionTooLarge { m, max: CC_MAX_DIM });
    }
    let norms = map_range(1usize << m, exec, |idx| {
        cc_norm(c, &SignPattern::from_index(idx as u64, m))
    });
    let mut worst = (0usize, f64::NEG_INFINITY);
    for (idx, norm) in norms.into_iter().enumerate() {
        let norm = norm?;
        if norm > worst.1 {
            worst = (idx, norm);
        }
    }
    Ok(CcCheck {
        holds: worst.1 < a,
        worst_pattern: SignPattern::from_index(worst.0 as u64, m),
        worst_norm: worst.1,
    })
}
