use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fracspec::abm::{IntegratorConfig, DEFAULT_STEP, TWO_PHASE_COARSE_STEP, TWO_PHASE_SWITCH};
use fracspec::grid;
use fracspec::problem::{Equation, EquationKind, ProblemSpec};
use fracspec::residual::FitWindows;
use fracspec::spectral::DEFAULT_TERMS;

use crate::failure::Failure;

#[derive(Debug, Parser)]
#[command(name = "fracspec", version, about = "Spectral and numerical solutions of fractional rate equations, as CSV")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Spectral solution X(t); adds the closed form when alpha = 1.
    Solve(SolveArgs),
    /// Residual Δ(t) = RHS − LHS with its asymptotes and fitted exponents.
    Residual(ResidualArgs),
    /// Adams-Bashforth-Moulton solution with a key=value metadata sidecar.
    Integrate(IntegrateArgs),
    /// δ(t) = X_num − X_spectral on the integrator grid.
    Compare(CompareArgs),
    /// Runs one command over every combination of list-valued flags.
    Sweep(SweepArgs),
    /// Table of E_α(z) with the branch accuracy flag.
    #[command(name = "ml-table", hide = true)]
    MlTable(MlTableArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EquationArg {
    Riccati,
    Logistic,
    Cubic,
}

impl From<EquationArg> for EquationKind {
    fn from(e: EquationArg) -> Self {
        match e {
            EquationArg::Riccati => EquationKind::Riccati,
            EquationArg::Logistic => EquationKind::Logistic,
            EquationArg::Cubic => EquationKind::Cubic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GridKind {
    Linear,
    Log,
}

#[derive(Debug, Clone, Args)]
pub struct SpecArgs {
    #[arg(long, value_enum, default_value = "riccati")]
    pub equation: EquationArg,
    /// Fractional order in (0, 1].
    #[arg(long, default_value_t = 0.75)]
    pub alpha: f64,
    /// Initial condition [default: 0 riccati, 0.75 logistic, 1 cubic].
    #[arg(long)]
    pub x0: Option<f64>,
    /// Logistic growth rate [default: 1].
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Cubic linear coefficient [default: 1].
    #[arg(long)]
    pub a: Option<f64>,
    /// Cubic cubic coefficient [default: 1].
    #[arg(long)]
    pub b: Option<f64>,
}

pub fn default_x0(kind: EquationKind) -> f64 {
    match kind {
        EquationKind::Riccati => 0.0,
        EquationKind::Logistic => 0.75,
        EquationKind::Cubic => 1.0,
    }
}

/// Rejects parameters that do not belong to `kind`.
pub fn check_parameter_flags(kind: EquationKind, lambda: bool, a: bool, b: bool) -> Result<(), Failure> {
    if lambda && kind != EquationKind::Logistic {
        return Err(Failure::usage(format!("--lambda applies only to the logistic equation, not {kind}")));
    }
    if (a || b) && kind != EquationKind::Cubic {
        return Err(Failure::usage(format!("--a/--b apply only to the cubic equation, not {kind}")));
    }
    Ok(())
}

pub fn build_spec(kind: EquationKind, alpha: f64, x0: Option<f64>, lambda: Option<f64>, a: Option<f64>, b: Option<f64>) -> Result<ProblemSpec, Failure> {
    check_parameter_flags(kind, lambda.is_some(), a.is_some(), b.is_some())?;
    let equation = match kind {
        EquationKind::Riccati => Equation::Riccati,
        EquationKind::Logistic => Equation::Logistic { rate: lambda.unwrap_or(1.0) },
        EquationKind::Cubic => Equation::Cubic {
            a: a.unwrap_or(1.0),
            b: b.unwrap_or(1.0),
        },
    };
    Ok(ProblemSpec::new(equation, alpha, x0.unwrap_or_else(|| default_x0(kind)))?)
}

impl SpecArgs {
    pub fn spec(&self) -> Result<ProblemSpec, Failure> {
        build_spec(self.equation.into(), self.alpha, self.x0, self.lambda, self.a, self.b)
    }
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    #[arg(long, value_enum)]
    pub grid: Option<GridKind>,
    /// First grid time [default: 0 linear, 1e-4 log].
    #[arg(long)]
    pub t_min: Option<f64>,
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
}

/// Defaults of one command's sampling grid.
pub struct GridDefaults {
    pub kind: GridKind,
    pub t_max: f64,
    pub points: usize,
}

impl GridArgs {
    pub fn build(&self, d: GridDefaults) -> Result<Vec<f64>, Failure> {
        let kind = self.grid.unwrap_or(d.kind);
        let t_max = self.t_max.unwrap_or(d.t_max);
        let points = self.points.unwrap_or(d.points);
        let g = match kind {
            GridKind::Linear => grid::linear(self.t_min.unwrap_or(0.0), t_max, points),
            GridKind::Log => grid::log(self.t_min.unwrap_or(1e-4), t_max, points),
        };
        Ok(g?)
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutArgs {
    /// Output file; standard output when absent or "-".
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl OutArgs {
    pub fn path(&self) -> Option<&PathBuf> {
        self.out.as_ref().filter(|p| p.as_os_str() != "-")
    }
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Number of retained modes K.
    #[arg(long, default_value_t = DEFAULT_TERMS)]
    pub terms: usize,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

pub const SOLVE_GRID: GridDefaults = GridDefaults {
    kind: GridKind::Linear,
    t_max: 10.0,
    points: 1001,
};

#[derive(Debug, Clone, Args)]
pub struct ResidualArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long, default_value_t = DEFAULT_TERMS)]
    pub terms: usize,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Fit windows "lo:hi,lo:hi" for the short- and long-time exponents.
    #[arg(long, value_parser = parse_windows)]
    pub windows: Option<FitWindows>,
    #[command(flatten)]
    pub out: OutArgs,
}

pub const RESIDUAL_GRID: GridDefaults = GridDefaults {
    kind: GridKind::Log,
    t_max: 1e3,
    points: 400,
};

pub fn parse_windows(s: &str) -> Result<FitWindows, String> {
    let parse_pair = |p: &str| -> Result<(f64, f64), String> {
        let (lo, hi) = p.split_once(':').ok_or_else(|| format!("window {p:?} is not lo:hi"))?;
        let lo: f64 = lo.trim().parse().map_err(|e| format!("{lo:?}: {e}"))?;
        let hi: f64 = hi.trim().parse().map_err(|e| format!("{hi:?}: {e}"))?;
        if !(lo > 0.0 && lo < hi && hi.is_finite()) {
            return Err(format!("window {p:?} needs 0 < lo < hi"));
        }
        Ok((lo, hi))
    };
    let (short, long) = s.split_once(',').ok_or_else(|| "expected two windows \"lo:hi,lo:hi\"".to_string())?;
    Ok(FitWindows {
        short: parse_pair(short)?,
        long: parse_pair(long)?,
    })
}

#[derive(Debug, Clone, Args)]
pub struct IntegratorArgs {
    /// Step size.
    #[arg(long, default_value_t = DEFAULT_STEP)]
    pub h: f64,
    #[arg(long, default_value_t = 10.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 1)]
    pub corrector_iters: usize,
    /// Continue from t = 10 with step 0.1 (full memory kept).
    #[arg(long)]
    pub two_phase: bool,
}

impl IntegratorArgs {
    pub fn config(&self, alpha: f64) -> Result<IntegratorConfig, Failure> {
        let mut cfg = IntegratorConfig::new(alpha, self.t_max)
            .with_h(self.h)
            .with_corrector_iters(self.corrector_iters);
        if self.two_phase {
            cfg = cfg.with_coarse_phase(TWO_PHASE_SWITCH, TWO_PHASE_COARSE_STEP);
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args)]
pub struct IntegrateArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[command(flatten)]
    pub integrator: IntegratorArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long, default_value_t = DEFAULT_TERMS)]
    pub terms: usize,
    #[command(flatten)]
    pub integrator: IntegratorArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepCommand {
    Solve,
    Residual,
    Compare,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// Which dataset each combination produces.
    #[arg(long, value_enum, default_value = "residual")]
    pub command: SweepCommand,
    #[arg(long, value_enum, default_value = "riccati")]
    pub equation: EquationArg,
    #[arg(long, value_delimiter = ',', num_args = 1.., default_value = "0.75")]
    pub alpha: Vec<f64>,
    /// [default: per-equation single value]
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub x0: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub lambda: Option<Vec<f64>>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_TERMS)]
    pub terms: usize,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub integrator: SweepIntegratorArgs,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Worker threads; overrides FRACSPEC_WORKERS.
    #[arg(long)]
    pub jobs: Option<usize>,
}

/// Integrator flags for `sweep --command compare` (named apart from the grid flags).
#[derive(Debug, Clone, Args)]
pub struct SweepIntegratorArgs {
    #[arg(long, default_value_t = DEFAULT_STEP)]
    pub h: f64,
    #[arg(long)]
    pub two_phase: bool,
}

#[derive(Debug, Clone, Args)]
pub struct MlTableArgs {
    #[arg(long, default_value_t = 0.75)]
    pub alpha: f64,
    /// Arguments z (comma separated).
    #[arg(long, value_delimiter = ',', num_args = 1.., allow_hyphen_values = true, default_value = "0,-0.5,-1,-2,-5,-10,-20,-50,-100")]
    pub z: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn windows_parse() {
        let w = parse_windows("1e-4:1e-2,100:1000").unwrap();
        assert_eq!(w.short, (1e-4, 1e-2));
        assert_eq!(w.long, (100.0, 1000.0));
        assert!(parse_windows("1e-4:1e-2").is_err());
        assert!(parse_windows("1:0.5,1:2").is_err());
    }

    #[test]
    fn foreign_parameters_rejected() {
        assert!(build_spec(EquationKind::Riccati, 0.75, None, Some(2.0), None, None).is_err());
        assert!(build_spec(EquationKind::Logistic, 0.75, None, None, Some(1.0), None).is_err());
        let s = build_spec(EquationKind::Cubic, 0.5, None, None, None, Some(2.0)).unwrap();
        assert_eq!(s.equation, Equation::Cubic { a: 1.0, b: 2.0 });
        assert_eq!(s.x0, 1.0);
    }
}
