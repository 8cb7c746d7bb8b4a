//! Parameter sweeps: one CSV per combination, a rescaled overlay for
//! logistic residual sweeps, and `index.csv` written once everything
//! succeeded. A failing member leaves `MANIFEST.partial` instead.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use fracspec::abm::{IntegratorConfig, TWO_PHASE_COARSE_STEP, TWO_PHASE_SWITCH};
use fracspec::io::{residual_table, Table};
use fracspec::problem::{Equation, EquationKind, ProblemSpec};
use fracspec::residual::residual_trajectory;
use fracspec::spectral::build_spectrum;

use crate::args::{build_spec, default_x0, GridDefaults, GridKind, SweepArgs, SweepCommand, RESIDUAL_GRID, SOLVE_GRID};
use crate::commands::{compare_table, emit, residual_report, solve_table, CmdResult};
use crate::failure::Failure;

pub const WORKERS_ENV: &str = "FRACSPEC_WORKERS";
pub const INDEX_FILE: &str = "index.csv";
pub const PARTIAL_MANIFEST: &str = "MANIFEST.partial";

#[derive(Debug, Clone)]
struct Member {
    spec: ProblemSpec,
    file: String,
}

#[derive(Debug, Clone)]
enum Job {
    Member(Member),
    /// λ^{−α} Δ_λ(t/λ) for every λ, on the shared grid.
    Overlay { alpha: f64, x0: f64, lambdas: Vec<f64>, file: String },
}

impl Job {
    fn file(&self) -> &str {
        match self {
            Job::Member(m) => &m.file,
            Job::Overlay { file, .. } => file,
        }
    }
}

struct Done {
    file: String,
    row: String,
}

fn lambda_of(spec: &ProblemSpec) -> Option<f64> {
    match spec.equation {
        Equation::Logistic { rate } => Some(rate),
        _ => None,
    }
}

/// `kind_alpha_x0_lambda.csv`; lambda is `na` outside the logistic equation.
pub fn member_file(spec: &ProblemSpec) -> String {
    let lambda = lambda_of(spec).map_or_else(|| "na".to_string(), |l| l.to_string());
    format!("{}_{}_{}_{}.csv", spec.kind(), spec.alpha, spec.x0, lambda)
}

fn workers(jobs: Option<usize>) -> CmdResult<usize> {
    let n = match jobs {
        Some(n) => n,
        None => match std::env::var(WORKERS_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| Failure::usage(format!("{WORKERS_ENV}={v:?} is not a worker count")))?,
            Err(_) => std::thread::available_parallelism().map_or(1, |n| n.get()),
        },
    };
    if n == 0 {
        return Err(Failure::usage("worker budget must be at least 1"));
    }
    Ok(n)
}

fn plan(a: &SweepArgs) -> CmdResult<Vec<Job>> {
    let kind: EquationKind = a.equation.into();
    let x0s = a.x0.clone().unwrap_or_else(|| vec![default_x0(kind)]);
    if a.alpha.is_empty() || x0s.is_empty() || a.lambda.as_ref().is_some_and(Vec::is_empty) {
        return Err(Failure::usage("sweep lists must not be empty"));
    }
    let lambdas: Vec<Option<f64>> = match &a.lambda {
        Some(l) => l.iter().copied().map(Some).collect(),
        None => vec![None],
    };
    let mut jobs = Vec::new();
    for &alpha in &a.alpha {
        for &x0 in &x0s {
            for &lambda in &lambdas {
                let spec = build_spec(kind, alpha, Some(x0), lambda, a.a, a.b)?;
                jobs.push(Job::Member(Member {
                    file: member_file(&spec),
                    spec,
                }));
            }
            let overlay = kind == EquationKind::Logistic && a.command == SweepCommand::Residual;
            if overlay {
                let lambdas: Vec<f64> = lambdas.iter().map(|l| l.unwrap_or(1.0)).collect();
                jobs.push(Job::Overlay {
                    alpha,
                    x0,
                    file: format!("logistic_{alpha}_{x0}_rescaled.csv"),
                    lambdas,
                });
            }
        }
    }
    let mut names: Vec<&str> = jobs.iter().map(Job::file).collect();
    names.sort_unstable();
    if names.windows(2).any(|w| w[0] == w[1]) {
        return Err(Failure::usage("sweep lists contain duplicate values"));
    }
    Ok(jobs)
}

fn grid_defaults(cmd: SweepCommand) -> GridDefaults {
    match cmd {
        SweepCommand::Residual => RESIDUAL_GRID,
        SweepCommand::Solve | SweepCommand::Compare => SOLVE_GRID,
    }
}

fn integrator(a: &SweepArgs, alpha: f64) -> CmdResult<IntegratorConfig> {
    let mut cfg = IntegratorConfig::new(alpha, a.grid.t_max.unwrap_or(10.0)).with_h(a.integrator.h);
    if a.integrator.two_phase {
        cfg = cfg.with_coarse_phase(TWO_PHASE_SWITCH, TWO_PHASE_COARSE_STEP);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run_job(a: &SweepArgs, grid: &[f64], dir: &Path, job: &Job) -> CmdResult<Done> {
    let path = dir.join(job.file());
    let (table, summary): (Table, String) = match job {
        Job::Member(m) => match a.command {
            SweepCommand::Solve => (solve_table(&m.spec, a.terms, grid)?, String::new()),
            SweepCommand::Residual => {
                let r = residual_report(&m.spec, a.terms, grid, None)?;
                (residual_table(&r), format!("{:.17e}", r.max_abs_delta))
            }
            SweepCommand::Compare => {
                let c = compare_table(&m.spec, a.terms, &integrator(a, m.spec.alpha)?)?;
                (c.table, format!("{:.17e}", c.max_abs))
            }
        },
        Job::Overlay { alpha, x0, lambdas, .. } => {
            let mut header = vec!["t".to_string()];
            let mut columns = vec![grid.to_vec()];
            for &lambda in lambdas {
                let spec = ProblemSpec::logistic(*alpha, *x0, lambda)?;
                let sol = build_spectrum(&spec, a.terms)?;
                let scaled: Vec<f64> = grid.iter().map(|t| t / lambda).collect();
                let (d, _) = residual_trajectory(&sol, &scaled)?;
                let factor = lambda.powf(-alpha);
                header.push(format!("lambda_{lambda}"));
                columns.push(d.values().iter().map(|v| v * factor).collect());
            }
            let spread = (0..grid.len())
                .map(|i| {
                    let (lo, hi) = columns[1..].iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), c| (lo.min(c[i]), hi.max(c[i])));
                    hi - lo
                })
                .fold(0.0, f64::max);
            let names: Vec<&str> = header.iter().map(String::as_str).collect();
            (Table::new(&names, columns)?, format!("{spread:.17e}"))
        }
    };
    emit(&table, Some(&path))?;
    let row = match job {
        Job::Member(m) => format!(
            "{},{},{},{},{},{}",
            m.file,
            m.spec.kind(),
            m.spec.alpha,
            m.spec.x0,
            lambda_of(&m.spec).map_or_else(|| "na".to_string(), |l| l.to_string()),
            summary
        ),
        Job::Overlay { alpha, x0, file, .. } => format!("{file},rescaled,{alpha},{x0},all,{summary}"),
    };
    Ok(Done {
        file: job.file().to_string(),
        row,
    })
}

pub fn run(a: &SweepArgs) -> CmdResult {
    let jobs = plan(a)?;
    let defaults = grid_defaults(a.command);
    let grid = match a.command {
        // the comparison runs on the integrator grid
        SweepCommand::Compare => {
            for j in &jobs {
                if let Job::Member(m) = j {
                    integrator(a, m.spec.alpha)?;
                }
            }
            Vec::new()
        }
        _ => a.grid.build(defaults)?,
    };
    if a.command == SweepCommand::Residual && a.grid.grid == Some(GridKind::Linear) && grid.first() == Some(&0.0) {
        return Err(Failure::usage("residual sweeps need t-min > 0"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers(a.jobs)?)
        .build()
        .map_err(|e| Failure::numerical(e.to_string()))?;
    fs::create_dir_all(&a.out)?;
    let results: Vec<CmdResult<Done>> = pool.install(|| jobs.par_iter().map(|j| run_job(a, &grid, &a.out, j)).collect());

    let failed = results.iter().any(Result::is_err);
    if failed {
        let mut manifest = String::from("# sweep aborted; completed files:\n");
        let mut first: Option<Failure> = None;
        for (job, r) in jobs.iter().zip(results) {
            match r {
                Ok(d) => writeln!(manifest, "ok {}", d.file).unwrap(),
                Err(e) => {
                    writeln!(manifest, "failed {}: {e}", job.file()).unwrap();
                    first.get_or_insert(e);
                }
            }
        }
        fs::write(a.out.join(PARTIAL_MANIFEST), manifest)?;
        return Err(first.expect("at least one failure"));
    }
    let summary_name = match a.command {
        SweepCommand::Solve => "summary",
        SweepCommand::Residual => "max_abs_delta",
        SweepCommand::Compare => "max_abs_difference",
    };
    let mut index = format!("file,kind,alpha,x0,lambda,{summary_name}\n");
    for r in results.into_iter().flatten() {
        index.push_str(&r.row);
        index.push('\n');
    }
    let index_path: PathBuf = a.out.join(INDEX_FILE);
    fs::write(&index_path, index)?;
    println!("wrote {} files and {}", jobs.len(), index_path.display());
    Ok(())
}
