//! Residual Δ(t) = f(X(t)) − d^αX/dt^α of a spectral solution, its
//! small- and large-t asymptotes, the logistic rescaling collapse, and the
//! aggregate [`ResidualReport`].
//!
//! The Caputo derivative of the truncated expansion is taken termwise,
//! d^α/dt^α E_α(λt^α) = λ E_α(λt^α), so no quadrature error enters Δ.

use crate::error::{Error, Result};
use crate::fit::{fit_power_law, least_squares, PowerLaw};
use crate::grid;
use crate::mittag_leffler::Accuracy;
use crate::problem::{Equation, ProblemSpec};
use crate::special::gamma;
use crate::spectral::{build_spectrum, SpectralSolution};
use crate::trajectory::{check_grid, Provenance, Trajectory};

/// Upper edge of the default small-t fit window.
pub const SHORT_WINDOW_END: f64 = 1e-2;
/// Lower edge of the default large-t fit window.
pub const LONG_WINDOW_START: f64 = 1e2;
/// Window used to fit the cubic tail coefficients.
pub const CUBIC_TAIL_WINDOW: (f64, f64) = (1e2, 1e4);
const CUBIC_TAIL_POINTS: usize = 60;

fn check_positive_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("residual needs finite t > 0, got {t}")))
    }
}

/// Σ_k c_k λ_k E_α(λ_k t^α).
pub fn lhs_caputo(sol: &SpectralSolution, t: f64) -> Result<f64> {
    check_positive_time(t)?;
    Ok(sol.sample(t)?.caputo)
}

/// f(x) for the problem's equation.
pub fn rhs_nonlinear(spec: &ProblemSpec, x: f64) -> f64 {
    spec.rhs(x)
}

/// Δ(t) = f(X(t)) − d^αX/dt^α.
pub fn residual(sol: &SpectralSolution, t: f64) -> Result<f64> {
    residual_with_accuracy(sol, t).map(|(d, _)| d)
}

fn residual_with_accuracy(sol: &SpectralSolution, t: f64) -> Result<(f64, Accuracy)> {
    check_positive_time(t)?;
    let s = sol.sample(t)?;
    Ok((sol.spec().rhs(s.value) - s.caputo, s.accuracy))
}

/// Δ over a grid of positive times.
pub fn residual_trajectory(sol: &SpectralSolution, grid: &[f64]) -> Result<(Trajectory, Accuracy)> {
    check_grid(grid)?;
    let mut accuracy = Accuracy::Full;
    let mut values = Vec::with_capacity(grid.len());
    for &t in grid {
        let (d, a) = residual_with_accuracy(sol, t)?;
        accuracy = accuracy.worst(a);
        values.push(d);
    }
    Ok((Trajectory::new(grid.to_vec(), values, Provenance::Residual)?, accuracy))
}

/// Small-t law of Δ(t):
///
/// * Riccati: t^{2α}/Γ²(1+α) · (1 − x₀²)²
/// * logistic (λ = 1): t^{2α}/Γ²(1+α) · x₀²(x₀ − 1)², carried to other λ by
///   Δ_λ(t) = λ^α Δ₁(λt)
/// * cubic (a = b = 1): t^{2α}/Γ²(1+α) · x₀³(x₀ − 1)² [3 − t^α/Γ(1+α) (x₀ − 1)³],
///   carried to other (a, b) by X = √(a/b) Y, s = a^{1/α} t, which maps
///   the problem onto the unit cubic with y₀ = x₀√(b/a).
pub fn residual_short_asymptote(spec: &ProblemSpec, t: f64) -> Result<f64> {
    check_positive_time(t)?;
    let a = spec.alpha;
    let g = gamma(1.0 + a);
    let law = |tau: f64| tau.powf(2.0 * a) / (g * g);
    let x0 = spec.x0;
    Ok(match spec.equation {
        Equation::Riccati => law(t) * (1.0 - x0 * x0).powi(2),
        Equation::Logistic { rate } => rate.powf(a) * law(rate * t) * (x0 * (x0 - 1.0)).powi(2),
        Equation::Cubic { a: lin, b: cub } => {
            if cub == 0.0 {
                return Ok(0.0);
            }
            let y0 = x0 * (cub / lin).sqrt();
            let s = lin.powf(1.0 / a) * t;
            let unit = law(s) * y0.powi(3) * (y0 - 1.0).powi(2) * (3.0 - s.powf(a) / g * (y0 - 1.0).powi(3));
            lin * (lin / cub).sqrt() * unit
        }
    })
}

/// Large-t law of Δ(t), with s = t^{−α}/Γ(1−α):
///
/// * Riccati: s [2 ln((x₀+1)/2) + x₀ + 1 − ln²((x₀+1)/2) s]
/// * logistic (λ = 1): s [(x₀ − 1 − ln x₀) − ln²x₀ s], other λ by rescaling
///
/// The cubic tail has no closed form here; see [`CubicTail`].
pub fn residual_long_asymptote(spec: &ProblemSpec, t: f64) -> Result<f64> {
    check_positive_time(t)?;
    let a = spec.alpha;
    if a >= 1.0 {
        return Err(Error::Unsupported("large-t residual law needs alpha < 1 (Γ(1 − α) pole)".into()));
    }
    let g = gamma(1.0 - a);
    let x0 = spec.x0;
    match spec.equation {
        Equation::Riccati => {
            let s = t.powf(-a) / g;
            let l = ((x0 + 1.0) / 2.0).ln();
            Ok(s * (2.0 * l + x0 + 1.0 - l * l * s))
        }
        Equation::Logistic { rate } => {
            let s = (rate * t).powf(-a) / g;
            let l = x0.ln();
            Ok(rate.powf(a) * s * ((x0 - 1.0 - l) - l * l * s))
        }
        Equation::Cubic { .. } => Err(Error::Unsupported(
            "cubic large-t residual has fitted coefficients; use CubicTail".into(),
        )),
    }
}

/// Exact t^{2α} term of Δ for any of the three equations,
///
/// Δ(t) ≈ f''(x₀) f(x₀)² [1/(2Γ²(1+α)) − 1/Γ(1+2α)] t^{2α},
///
/// read off from X = Σ_n (t^{nα}/Γ(1+nα)) (𝓛ⁿx)(x₀) with 𝓛 = f ∂ₓ.
/// [`residual_short_asymptote`] keeps only the 1/Γ²(1+α) part of this
/// bracket (with a different weight), so the two differ by a factor
/// 2Γ²(1+α)/Γ(1+2α) − 1 for Riccati and logistic.
pub fn residual_short_leading(spec: &ProblemSpec, t: f64) -> Result<f64> {
    check_positive_time(t)?;
    let a = spec.alpha;
    let g = gamma(1.0 + a);
    let x = spec.x0;
    let f2 = match spec.equation {
        Equation::Riccati => -2.0,
        Equation::Logistic { rate } => -2.0 * rate.powf(a),
        Equation::Cubic { b, .. } => -6.0 * b * x,
    };
    let f = spec.rhs(x);
    Ok(f2 * f * f * (0.5 / (g * g) - 1.0 / gamma(1.0 + 2.0 * a)) * t.powf(2.0 * a))
}

/// Large-t Riccati law obtained from the logistic one through
/// X = 2Y − 1, which maps the Riccati problem onto a logistic problem with
/// λ^α = 2 and y₀ = (x₀+1)/2. With s = t^{−α}/Γ(1−α), L = ln((x₀+1)/2):
///
/// Δ(t) ≈ s (x₀ − 1 − 2L) − s² L².
///
/// The second-order term agrees with [`residual_long_asymptote`]; the
/// first-order bracket there reads 2L + x₀ + 1, which does not vanish at
/// the fixed point x₀ = 1.
pub fn riccati_long_via_logistic(x0: f64, alpha: f64, t: f64) -> Result<f64> {
    check_positive_time(t)?;
    if alpha >= 1.0 {
        return Err(Error::Unsupported("large-t residual law needs alpha < 1 (Γ(1 − α) pole)".into()));
    }
    let s = t.powf(-alpha) / gamma(1.0 - alpha);
    let l = ((x0 + 1.0) / 2.0).ln();
    Ok(s * (x0 - 1.0 - 2.0 * l) - s * s * l * l)
}

/// Δ(t) ≈ C₁ s + C₂ s² + C₃ s³ with s = t^{−α}/Γ(1−α), coefficients fitted
/// by least squares.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicTail {
    pub alpha: f64,
    pub coeffs: [f64; 3],
    /// max |Δ − fit| / |Δ| over the fitted samples.
    pub max_rel_misfit: f64,
}

impl CubicTail {
    /// Fits the tail of `sol`'s residual on `points` log-spaced times in `window`.
    pub fn fit(sol: &SpectralSolution, window: (f64, f64), points: usize) -> Result<Self> {
        let g = grid::log(window.0, window.1, points)?;
        let (traj, _) = residual_trajectory(sol, &g)?;
        Self::fit_samples(sol.spec().alpha, &traj)
    }

    pub fn fit_samples(alpha: f64, traj: &Trajectory) -> Result<Self> {
        if alpha >= 1.0 {
            return Err(Error::Unsupported("cubic tail needs alpha < 1".into()));
        }
        let g = gamma(1.0 - alpha);
        let s: Vec<f64> = traj.times().iter().map(|t| t.powf(-alpha) / g).collect();
        let cols: Vec<Vec<f64>> = (1..=3).map(|j| s.iter().map(|v| v.powi(j)).collect()).collect();
        let c = least_squares(&cols, traj.values())?;
        let mut tail = Self {
            alpha,
            coeffs: [c[0], c[1], c[2]],
            max_rel_misfit: 0.0,
        };
        tail.max_rel_misfit = traj
            .iter()
            .map(|(t, d)| ((tail.eval(t) - d) / d).abs())
            .fold(0.0, f64::max);
        Ok(tail)
    }

    pub fn eval(&self, t: f64) -> f64 {
        let s = t.powf(-self.alpha) / gamma(1.0 - self.alpha);
        s * (self.coeffs[0] + s * (self.coeffs[1] + s * self.coeffs[2]))
    }
}

/// Maps (t, Δ) to (λt, λ^{−α}Δ), under which logistic residuals for
/// different growth rates coincide.
pub fn rescale_residual(traj: &Trajectory, lambda: f64, alpha: f64) -> Result<Trajectory> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Domain(format!("rescaling rate must be > 0, got {lambda}")));
    }
    let scale = lambda.powf(-alpha);
    let times = traj.times().iter().map(|t| t * lambda).collect();
    let values = traj.values().iter().map(|d| d * scale).collect();
    Trajectory::new(times, values, traj.provenance())
}

/// Everything the residual figures need for one problem.
#[derive(Debug, Clone)]
pub struct ResidualReport {
    pub spec: ProblemSpec,
    pub terms: usize,
    pub residual: Trajectory,
    pub short_asymptote: Option<Trajectory>,
    pub long_asymptote: Option<Trajectory>,
    pub short_fit: Option<PowerLaw>,
    pub long_fit: Option<PowerLaw>,
    pub cubic_tail: Option<CubicTail>,
    pub max_abs_delta: f64,
    pub t_at_max: f64,
    pub accuracy: Accuracy,
}

impl ResidualReport {
    pub fn fitted_short_exponent(&self) -> Option<f64> {
        self.short_fit.map(|f| f.exponent)
    }

    pub fn fitted_long_exponent(&self) -> Option<f64> {
        self.long_fit.map(|f| f.exponent)
    }
}

/// Time ranges for the two power-law fits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitWindows {
    pub short: (f64, f64),
    pub long: (f64, f64),
}

impl FitWindows {
    /// [min(grid), 10⁻²] and [10², max(grid)].
    pub fn default_for(grid: &[f64]) -> Self {
        let lo = grid.first().copied().unwrap_or(0.0);
        let hi = grid.last().copied().unwrap_or(0.0);
        Self {
            short: (lo, SHORT_WINDOW_END),
            long: (LONG_WINDOW_START, hi),
        }
    }
}

/// Residual, asymptotes and power-law fits over `grid`.
///
/// A fit is `None` when its window holds too few points or the residual
/// vanishes or changes sign there (e.g. α = 1, where Δ is rounding noise).
/// Asymptote curves are `None` at α = 1.
pub fn analyze(spec: &ProblemSpec, terms: usize, grid: &[f64]) -> Result<ResidualReport> {
    let sol = build_spectrum(spec, terms)?;
    analyze_solution(&sol, grid, FitWindows::default_for(grid))
}

pub fn analyze_solution(sol: &SpectralSolution, grid: &[f64], windows: FitWindows) -> Result<ResidualReport> {
    let spec = *sol.spec();
    let (residual, accuracy) = residual_trajectory(sol, grid)?;
    let (max_abs_delta, t_at_max) = residual.max_abs().expect("grid is non-empty");

    let fractional = spec.alpha < 1.0;
    let mut cubic_tail = None;
    let (short_asymptote, long_asymptote) = if fractional {
        let short = asymptote_curve(grid, |t| residual_short_asymptote(&spec, t))?;
        let long = match spec.equation {
            Equation::Cubic { .. } => match CubicTail::fit(sol, CUBIC_TAIL_WINDOW, CUBIC_TAIL_POINTS) {
                Ok(tail) => {
                    cubic_tail = Some(tail);
                    Some(asymptote_curve(grid, |t| Ok(tail.eval(t)))?)
                }
                Err(Error::Fit(_)) => None,
                Err(e) => return Err(e),
            },
            _ => Some(asymptote_curve(grid, |t| residual_long_asymptote(&spec, t))?),
        };
        (Some(short), long)
    } else {
        (None, None)
    };

    let fit = |(lo, hi): (f64, f64)| {
        if fractional && lo < hi {
            fit_power_law(&residual, lo, hi).ok()
        } else {
            None
        }
    };
    let short_fit = fit(windows.short);
    let long_fit = fit(windows.long);

    Ok(ResidualReport {
        spec,
        terms: sol.terms(),
        residual,
        short_asymptote,
        long_asymptote,
        short_fit,
        long_fit,
        cubic_tail,
        max_abs_delta,
        t_at_max,
        accuracy,
    })
}

fn asymptote_curve<F: Fn(f64) -> Result<f64>>(grid: &[f64], f: F) -> Result<Trajectory> {
    let values = grid.iter().map(|&t| f(t)).collect::<Result<Vec<_>>>()?;
    Trajectory::new(grid.to_vec(), values, Provenance::Asymptote)
}
