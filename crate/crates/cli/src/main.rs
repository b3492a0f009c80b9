use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use simcone::bench::{run_suite, BenchSuite, Method};
use simcone::cone::{moreau_certificate, MoreauCertificate};
use simcone::instance::{generate, GeneratorKind, ProblemInstance};
use simcone::lcp::{default_pivot_limit, from_projection, lemke_solve, to_solution, LcpStatus};
use simcone::linalg::norm2;
use simcone::newton::{
    check_cc_condition, check_sufficient_condition, residual, solve, SolverConfig, Start, CC_MAX_DIM,
};
use simcone::oracle::enumerate_project;
use simcone::par::Execution;

/// Projection onto simplicial cones.
#[derive(Parser)]
#[command(name = "simcone", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random instance as JSON.
    Generate {
        #[arg(long, default_value = "identity-perturbed")]
        kind: GeneratorKind,
        #[arg(long)]
        m: usize,
        /// Generator parameter; the kind's default when omitted.
        #[arg(long)]
        param: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Project the point of an instance file and print a JSON report.
    Solve {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Newton)]
        method: MethodArg,
        /// Newton residual tolerance, relative to 1 + ‖Aᵀz‖.
        #[arg(long)]
        tol: Option<f64>,
        /// Newton iteration limit, or Lemke pivot limit.
        #[arg(long)]
        max_iters: Option<usize>,
        #[arg(long, value_enum, default_value_t = StartArg::GramRhs)]
        start: StartArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every method on a generated suite and write CSV rows.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "4")]
        dims: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "identity-perturbed,random-nonsingular,gram-defect-targeted")]
        kinds: Vec<GeneratorKind>,
        /// Instances per (dimension, kind).
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        param: Option<f64>,
        #[arg(long, value_delimiter = ',', default_value = "newton,lemke,oracle")]
        methods: Vec<MethodArg>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        max_iters: Option<usize>,
        #[arg(long)]
        sequential: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report the convergence conditions of an instance.
    Check {
        input: PathBuf,
        /// Bound for the pattern sweep, in (0, 1/2).
        #[arg(long, default_value_t = 0.49)]
        a: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Newton,
    Lemke,
    Oracle,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Newton => Method::Newton,
            MethodArg::Lemke => Method::Lemke,
            MethodArg::Oracle => Method::Oracle,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum StartArg {
    GramRhs,
    Zero,
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_json(path: Option<&Path>, doc: &Value) -> Result<()> {
    let mut out = output(path)?;
    serde_json::to_writer_pretty(&mut out, doc)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn solver_config(tol: Option<f64>, max_iters: Option<usize>, start: StartArg) -> SolverConfig {
    let defaults = SolverConfig::default();
    SolverConfig {
        residual_tol: tol.unwrap_or(defaults.residual_tol),
        max_iters: max_iters.unwrap_or(defaults.max_iters),
        start: match start {
            StartArg::GramRhs => Start::GramRhs,
            StartArg::Zero => Start::Zero,
        },
        ..defaults
    }
}

fn certificate_json(c: &MoreauCertificate) -> Value {
    json!({
        "decomposition": c.decomposition,
        "orthogonality": c.orthogonality,
        "primal_membership": c.primal_membership,
        "polar_membership": c.polar_membership,
        "max_violation": c.max_violation,
    })
}

struct Solved {
    status: String,
    converged: bool,
    iterations: usize,
    solution: Vec<f64>,
    projection: Vec<f64>,
}

/// Returns the report document and whether the method reached a definite answer.
fn solve_instance(inst: &ProblemInstance, method: MethodArg, cfg: &SolverConfig, max_iters: Option<usize>) -> Result<(Value, bool)> {
    let cone = inst.cone()?;
    let z = &inst.point;
    let s = match method {
        MethodArg::Newton => {
            let r = solve(&cone, z, cfg)?;
            Solved {
                status: r.status.to_string(),
                converged: r.status.is_converged(),
                iterations: r.iterations,
                solution: r.solution,
                projection: r.projection,
            }
        }
        MethodArg::Lemke => {
            let p = from_projection(&cone, z)?;
            let sol = lemke_solve(&p, max_iters.unwrap_or_else(|| default_pivot_limit(cone.dim())))?;
            let converged = sol.status == LcpStatus::Solved;
            let (solution, projection) = if converged {
                let r = to_solution(&sol, &cone)?;
                (r.x, r.projection)
            } else {
                let x = sol.u.iter().zip(&sol.v).map(|(u, v)| u - v).collect();
                (x, cone.generator().mul_vec(&sol.u))
            };
            Solved {
                status: sol.status.to_string(),
                converged,
                iterations: sol.pivots,
                solution,
                projection,
            }
        }
        MethodArg::Oracle => {
            let r = enumerate_project(&cone, z)?;
            Solved {
                status: "Enumerated".into(),
                converged: true,
                iterations: r.candidates_tested,
                solution: r.solution,
                projection: r.projection,
            }
        }
    };
    let res = norm2(&residual(&cone, z, &s.solution)?);
    let cert = moreau_certificate(&cone, z, &s.solution)?;
    let doc = json!({
        "label": inst.label,
        "m": inst.dimension,
        "method": Method::from(method).as_str(),
        "status": s.status,
        "iterations": s.iterations,
        "residual": res,
        "solution": s.solution,
        "projection": s.projection,
        "polar_part": cone.polar_part(&s.solution),
        "certificate": certificate_json(&cert),
    });
    Ok((doc, s.converged))
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Generate { kind, m, param, seed, out } => {
            let inst = generate(kind, m, param.unwrap_or_else(|| kind.default_param()), seed)?;
            let mut w = output(out.as_deref())?;
            w.write_all(inst.to_json().as_bytes())?;
            w.flush()?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Solve { input, method, tol, max_iters, start, out } => {
            let inst = ProblemInstance::read(&input).with_context(|| format!("reading {}", input.display()))?;
            let cfg = solver_config(tol, max_iters, start);
            let (doc, converged) = solve_instance(&inst, method, &cfg, max_iters)?;
            write_json(out.as_deref(), &doc)?;
            Ok(if converged { ExitCode::SUCCESS } else { ExitCode::from(2) })
        }
        Command::Bench {
            dims,
            kinds,
            count,
            seed,
            param,
            methods,
            tol,
            max_iters,
            sequential,
            out,
        } => {
            if methods.is_empty() {
                bail!("no methods selected");
            }
            let suite = BenchSuite {
                kinds,
                dims,
                count,
                seed,
                param,
                methods: methods.into_iter().map(Method::from).collect(),
            };
            let cfg = solver_config(tol, max_iters, StartArg::GramRhs);
            let exec = if sequential { Execution::Sequential } else { Execution::Parallel };
            let summary = run_suite(&suite, &cfg, exec, output(out.as_deref())?)?;
            eprintln!(
                "{} instances, {} rows, {} disagreements",
                summary.instances, summary.rows, summary.disagreements
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Check { input, a, out } => {
            let inst = ProblemInstance::read(&input).with_context(|| format!("reading {}", input.display()))?;
            let cone = inst.cone()?;
            let cond = check_sufficient_condition(&cone);
            let cc = if cone.dim() <= CC_MAX_DIM {
                let cc = check_cc_condition(&cone, a)?;
                json!({
                    "a": a,
                    "holds": cc.holds,
                    "worst_pattern": cc.worst_pattern.to_string(),
                    "worst_norm": cc.worst_norm,
                })
            } else {
                Value::Null
            };
            let doc = json!({
                "label": inst.label,
                "m": inst.dimension,
                "gram_defect": cond.defect,
                "sufficient_condition": cond.guaranteed,
                "rate_bound": cond.rate_bound,
                "cc": cc,
            });
            write_json(out.as_deref(), &doc)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
