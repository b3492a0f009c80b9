//! Cross-method benchmark runs: every instance of a suite is projected by
//! each requested method and summarized as one CSV row per method.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use crate::cone::{moreau_certificate, MoreauCertificate, SimplicialCone};
use crate::error::{Error, Result};
use crate::instance::{generate, GeneratorKind, ProblemInstance};
use crate::lcp::{default_pivot_limit, from_projection, lemke_solve, to_solution, LcpStatus};
use crate::linalg::{distance, norm2};
use crate::newton::{residual, solve, SolverConfig};
use crate::oracle::{enumerate_project, ORACLE_MAX_DIM};
use crate::par::{map_slice, Execution};
use crate::rng::derive_seed;

/// Relative tolerance `1e-6·(1 + ‖z‖)` for cross-method agreement.
pub const AGREEMENT_TOL: f64 = 1e-6;

/// Instances processed between flushes of the output.
const CHUNK: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Newton,
    Lemke,
    Oracle,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Newton, Method::Lemke, Method::Oracle];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Newton => "newton",
            Method::Lemke => "lemke",
            Method::Oracle => "oracle",
        }
    }

    pub fn supports(self, m: usize) -> bool {
        self != Method::Oracle || m <= ORACLE_MAX_DIM
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::BadParam(format!("unknown method '{s}'")))
    }
}

/// What one method produced on one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodOutcome {
    pub method: Method,
    pub status: String,
    pub converged: bool,
    /// Newton iterations, Lemke pivots, or oracle candidates.
    pub iterations: usize,
    pub solution: Vec<f64>,
    pub projection: Vec<f64>,
    /// `‖F(solution)‖`
    pub residual_norm: f64,
    pub certificate: MoreauCertificate,
    pub wall_time_ns: u128,
}

/// Runs `method` on `(c, z)`. Solver failures that still leave an iterate
/// (cycles, iteration or pivot limits) are reported through `status` and
/// `converged`; numerical errors are returned as `Err`.
pub fn run_method(c: &SimplicialCone, z: &[f64], method: Method, cfg: &SolverConfig) -> Result<MethodOutcome> {
    let start = Instant::now();
    let (status, converged, iterations, solution, projection) = match method {
        Method::Newton => {
            let r = solve(c, z, cfg)?;
            (r.status.to_string(), r.status.is_converged(), r.iterations, r.solution, r.projection)
        }
        Method::Lemke => {
            let p = from_projection(c, z)?;
            let s = lemke_solve(&p, default_pivot_limit(c.dim()))?;
            let solved = s.status == LcpStatus::Solved;
            let (x, proj) = if solved {
                let r = to_solution(&s, c)?;
                (r.x, r.projection)
            } else {
                let x: Vec<f64> = s.u.iter().zip(&s.v).map(|(u, v)| u - v).collect();
                let proj = c.generator().mul_vec(&s.u);
                (x, proj)
            };
            (s.status.to_string(), solved, s.pivots, x, proj)
        }
        Method::Oracle => {
            let r = enumerate_project(c, z)?;
            ("Enumerated".to_string(), true, r.candidates_tested, r.solution, r.projection)
        }
    };
    let wall_time_ns = start.elapsed().as_nanos();
    let residual_norm = norm2(&residual(c, z, &solution)?);
    let certificate = moreau_certificate(c, z, &solution)?;
    Ok(MethodOutcome {
        method,
        status,
        converged,
        iterations,
        solution,
        projection,
        residual_norm,
        certificate,
        wall_time_ns,
    })
}

/// One CSV row. Column order is fixed:
/// `label,method,m,status,iters,residual,distance,wall_time_ns,disagreement`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub label: String,
    pub method: String,
    pub m: usize,
    pub status: String,
    pub iters: usize,
    pub residual: f64,
    /// `‖z − P‖`
    pub distance: f64,
    pub wall_time_ns: u128,
    pub disagreement: u8,
}

/// Runs `methods` on one instance and cross-checks their projections.
/// Methods that do not apply at this dimension are skipped.
pub fn bench_instance(inst: &ProblemInstance, methods: &[Method], cfg: &SolverConfig) -> Vec<BenchRecord> {
    let m = inst.dimension;
    let z = &inst.point;
    let cone = inst.cone();
    let outcomes: Vec<(Method, std::result::Result<MethodOutcome, Error>)> = methods
        .iter()
        .copied()
        .filter(|meth| meth.supports(m))
        .map(|meth| {
            let out = cone.as_ref().map_err(Clone::clone).and_then(|c| run_method(c, z, meth, cfg));
            (meth, out)
        })
        .collect();

    let tol = AGREEMENT_TOL * (1.0 + norm2(z));
    outcomes
        .iter()
        .map(|(meth, out)| match out {
            Ok(o) => {
                let disagrees = outcomes.iter().any(|(_, other)| match other {
                    Ok(p) => distance(&o.projection, &p.projection) > tol,
                    Err(_) => true,
                });
                BenchRecord {
                    label: inst.label.clone(),
                    method: meth.to_string(),
                    m,
                    status: o.status.clone(),
                    iters: o.iterations,
                    residual: o.residual_norm,
                    distance: distance(z, &o.projection),
                    wall_time_ns: o.wall_time_ns,
                    disagreement: u8::from(disagrees || !o.converged),
                }
            }
            Err(e) => BenchRecord {
                label: inst.label.clone(),
                method: meth.to_string(),
                m,
                status: format!("Error({})", error_kind(e)),
                iters: 0,
                residual: f64::NAN,
                distance: f64::NAN,
                wall_time_ns: 0,
                disagreement: 1,
            },
        })
        .collect()
}

fn error_kind(e: &Error) -> String {
    let text = e.to_string();
    text.split(':').next().unwrap_or("Error").to_string()
}

/// A family of generated instances.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchSuite {
    pub kinds: Vec<GeneratorKind>,
    pub dims: Vec<usize>,
    /// Instances per `(dimension, kind)` pair.
    pub count: usize,
    pub seed: u64,
    /// Generator parameter; each kind's default when `None`.
    pub param: Option<f64>,
    pub methods: Vec<Method>,
}

impl Default for BenchSuite {
    fn default() -> Self {
        BenchSuite {
            kinds: GeneratorKind::ALL.to_vec(),
            dims: vec![4],
            count: 10,
            seed: 0,
            param: None,
            methods: Method::ALL.to_vec(),
        }
    }
}

impl BenchSuite {
    /// Instances in order: dimension, then kind, then index. The `k`-th
    /// instance uses seed `derive_seed(seed, k)`.
    pub fn instances(&self) -> Result<Vec<ProblemInstance>> {
        let mut out = Vec::new();
        for &m in &self.dims {
            for &kind in &self.kinds {
                let param = self.param.unwrap_or_else(|| kind.default_param());
                for _ in 0..self.count {
                    let seed = derive_seed(self.seed, out.len() as u64);
                    out.push(generate(kind, m, param, seed)?);
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BenchSummary {
    pub instances: usize,
    pub rows: usize,
    pub disagreements: usize,
}

/// Runs the suite and streams CSV rows to `out` in instance order. Rows
/// are flushed after every chunk of instances, so a later failure leaves
/// the earlier rows in place.
pub fn run_suite<W: Write>(suite: &BenchSuite, cfg: &SolverConfig, exec: Execution, out: W) -> Result<BenchSummary> {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    writer.write_record(["label", "method", "m", "status", "iters", "residual", "distance", "wall_time_ns", "disagreement"])?;
    writer.flush()?;

    let instances = suite.instances()?;
    let mut summary = BenchSummary {
        instances: instances.len(),
        ..BenchSummary::default()
    };
    for chunk in instances.chunks(CHUNK) {
        let rows = map_slice(chunk, exec, |inst| bench_instance(inst, &suite.methods, cfg));
        for rec in rows.iter().flatten() {
            writer.serialize(rec)?;
            summary.rows += 1;
            summary.disagreements += usize::from(rec.disagreement);
        }
        writer.flush()?;
    }
    Ok(summary)
}
