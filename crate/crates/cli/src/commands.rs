use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use fracspec::abm::{abm_solve, compare_solutions, IntegratorConfig};
use fracspec::io::{format_float, residual_table, trajectory_table, write_metadata, write_table, Metadata, Table};
use fracspec::mittag_leffler::{MittagLeffler, MlParams};
use fracspec::problem::ProblemSpec;
use fracspec::residual::{analyze_solution, FitWindows, ResidualReport};
use fracspec::spectral::{build_spectrum, closed_form_integer};

use crate::args::{CompareArgs, IntegrateArgs, MlTableArgs, OutArgs, ResidualArgs, SolveArgs, RESIDUAL_GRID, SOLVE_GRID};
use crate::failure::Failure;

pub type CmdResult<T = ()> = Result<T, Failure>;

/// Writes `table` to `path`, or to standard output.
pub fn emit(table: &Table, path: Option<&PathBuf>) -> CmdResult {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p).map_err(|e| Failure::numerical(format!("{}: {e}", p.display())))?);
            write_table(&mut w, table)?;
            w.flush()?;
        }
        None => write_table(io::stdout().lock(), table)?,
    }
    Ok(())
}

/// Summary lines go to stdout when the table went to a file.
fn report(out: &OutArgs, line: &str) {
    if out.path().is_some() {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
}

fn optional(v: Option<f64>) -> String {
    v.map_or_else(|| "NaN".to_string(), |x| format!("{x:.6}"))
}

pub fn solve_table(spec: &ProblemSpec, terms: usize, grid: &[f64]) -> CmdResult<Table> {
    let sol = build_spectrum(spec, terms)?;
    let traj = sol.trajectory(grid)?;
    let mut table = trajectory_table(&traj, "x_spectral");
    if spec.alpha == 1.0 {
        let closed = grid.iter().map(|&t| closed_form_integer(spec, t)).collect::<Result<Vec<_>, _>>()?;
        table.header.push("x_closed_form".into());
        table.columns.push(closed);
    }
    Ok(table)
}

pub fn solve(a: &SolveArgs) -> CmdResult {
    let spec = a.spec.spec()?;
    let grid = a.grid.build(SOLVE_GRID)?;
    emit(&solve_table(&spec, a.terms, &grid)?, a.out.path())
}

pub fn residual_report(spec: &ProblemSpec, terms: usize, grid: &[f64], windows: Option<FitWindows>) -> CmdResult<ResidualReport> {
    let sol = build_spectrum(spec, terms)?;
    let windows = windows.unwrap_or_else(|| FitWindows::default_for(grid));
    Ok(analyze_solution(&sol, grid, windows)?)
}

pub fn residual_summary(r: &ResidualReport) -> String {
    format!(
        "max|delta|={:.6e} t_at_max={:.6e} fitted_short_exponent={} fitted_long_exponent={} accuracy={:?}",
        r.max_abs_delta,
        r.t_at_max,
        optional(r.fitted_short_exponent()),
        optional(r.fitted_long_exponent()),
        r.accuracy
    )
}

pub fn residual(a: &ResidualArgs) -> CmdResult {
    let spec = a.spec.spec()?;
    let grid = a.grid.build(RESIDUAL_GRID)?;
    let r = residual_report(&spec, a.terms, &grid, a.windows)?;
    emit(&residual_table(&r), a.out.path())?;
    report(&a.out, &residual_summary(&r));
    Ok(())
}

pub fn integrator_metadata(spec: &ProblemSpec, cfg: &IntegratorConfig) -> Metadata {
    let mut m = Metadata::new();
    m.insert("alpha".into(), spec.alpha.to_string());
    m.insert("h".into(), cfg.h.to_string());
    m.insert("t_max".into(), cfg.t_max.to_string());
    m.insert("kind".into(), spec.kind().to_string());
    m.insert("params".into(), spec.param_string());
    m.insert("corrector_iters".into(), cfg.corrector_iters.to_string());
    m.insert("two_phase".into(), cfg.is_two_phase().to_string());
    if let (true, Some(c)) = (cfg.is_two_phase(), cfg.coarse) {
        m.insert("coarse_from".into(), c.from.to_string());
        m.insert("coarse_h".into(), c.h.to_string());
    }
    let now = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    m.insert("created_unix".into(), now.to_string());
    m
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".meta");
    PathBuf::from(s)
}

pub fn integrate(a: &IntegrateArgs) -> CmdResult {
    let spec = a.spec.spec()?;
    let cfg = a.integrator.config(spec.alpha)?;
    let traj = abm_solve(&spec, &cfg)?;
    emit(&trajectory_table(&traj, "x"), a.out.path())?;
    if let Some(p) = a.out.path() {
        let meta = integrator_metadata(&spec, &cfg);
        write_metadata(File::create(sidecar_path(p))?, &meta)?;
    }
    Ok(())
}

pub struct Comparison {
    pub table: Table,
    pub max_abs: f64,
    pub t_at_max: f64,
}

pub fn compare_table(spec: &ProblemSpec, terms: usize, cfg: &IntegratorConfig) -> CmdResult<Comparison> {
    let num = abm_solve(spec, cfg)?;
    let sp = build_spectrum(spec, terms)?.trajectory(num.times())?;
    let delta = compare_solutions(&num, &sp)?;
    let (max_abs, t_at_max) = delta.max_abs().expect("grid is non-empty");
    let table = Table::new(
        &["t", "x_num", "x_spectral", "delta"],
        vec![num.times().to_vec(), num.values().to_vec(), sp.values().to_vec(), delta.values().to_vec()],
    )?;
    Ok(Comparison { table, max_abs, t_at_max })
}

pub fn compare(a: &CompareArgs) -> CmdResult {
    let spec = a.spec.spec()?;
    let cfg = a.integrator.config(spec.alpha)?;
    let c = compare_table(&spec, a.terms, &cfg)?;
    emit(&c.table, a.out.path())?;
    report(&a.out, &format!("max|delta|={:.6e} t_at_max={:.6e}", c.max_abs, c.t_at_max));
    Ok(())
}

pub fn ml_table(a: &MlTableArgs) -> CmdResult {
    let ml = MittagLeffler::new(MlParams::new(a.alpha)?)?;
    let mut out = io::stdout().lock();
    writeln!(out, "z,value,accuracy")?;
    for &z in &a.z {
        let v = ml.eval(z)?;
        writeln!(out, "{},{},{:?}", format_float(z), format_float(v.value), v.accuracy)?;
    }
    Ok(())
}
