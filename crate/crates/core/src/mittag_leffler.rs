//! One-parameter Mittag-Leffler function E_α(z) for real z and 0 < α ≤ 1.
//!
//! E_α(z) = Σ_k z^k / Γ(kα + 1) reduces to exp(z) at α = 1 and, on the
//! negative axis, interpolates between a stretched exponential at small
//! |z| and the inverse power law 1/(|z| Γ(1 − α)) at large |z|.
//!
//! Evaluation on the negative axis uses three branches:
//!
//! | range of x = −z                     | method                               |
//! |-------------------------------------|--------------------------------------|
//! | `x <= series_switch`                | power series, log-Γ term recurrence  |
//! | `series_switch < x <= asymptote_switch` | integral representation, adaptive Gauss–Kronrod |
//! | `x > asymptote_switch`              | inverse-power asymptotic expansion   |
//!
//! The series is alternating on the negative axis and its largest term
//! grows like exp(x^{1/α}), so beyond a few units it loses every digit in
//! double precision. The middle branch integrates the completely monotone
//! representation
//!
//! E_α(−x) = sin(απ)/(απ) ∫₀^∞ exp(−(xy)^{1/α}) / (y² + 2y cos(απ) + 1) dy,
//!
//! whose integrand is positive and bounded, so it carries no cancellation.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quad;
use crate::special::{gamma, ln_gamma, recip_gamma};

/// Evaluation settings for E_α.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlParams {
    pub alpha: f64,
    /// Absolute size of the first series term that is no longer added.
    pub series_tol: f64,
    pub series_max_terms: usize,
    /// |z| up to which the power series is used for z < 0.
    pub series_switch: f64,
    /// |z| beyond which the asymptotic expansion is used for z < 0.
    pub asymptote_switch: f64,
    pub asymptotic_terms: usize,
}

impl MlParams {
    pub const DEFAULT_SERIES_TOL: f64 = 1e-15;
    pub const DEFAULT_SERIES_MAX_TERMS: usize = 500;
    pub const DEFAULT_SERIES_SWITCH: f64 = 1.0;
    pub const DEFAULT_ASYMPTOTE_SWITCH: f64 = 50.0;
    pub const DEFAULT_ASYMPTOTIC_TERMS: usize = 5;

    pub fn new(alpha: f64) -> Result<Self> {
        let p = Self {
            alpha,
            series_tol: Self::DEFAULT_SERIES_TOL,
            series_max_terms: Self::DEFAULT_SERIES_MAX_TERMS,
            series_switch: Self::DEFAULT_SERIES_SWITCH,
            asymptote_switch: Self::DEFAULT_ASYMPTOTE_SWITCH,
            asymptotic_terms: Self::DEFAULT_ASYMPTOTIC_TERMS,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        if !(self.series_tol > 0.0) {
            return Err(Error::InvalidConfig(format!("series_tol must be > 0, got {}", self.series_tol)));
        }
        if self.series_max_terms < 1 {
            return Err(Error::InvalidConfig("series_max_terms must be >= 1".into()));
        }
        if !(self.asymptote_switch > 0.0) || !(self.series_switch > 0.0) {
            return Err(Error::InvalidConfig("branch switches must be > 0".into()));
        }
        if self.series_switch > self.asymptote_switch {
            return Err(Error::InvalidConfig(format!(
                "series_switch {} exceeds asymptote_switch {}",
                self.series_switch, self.asymptote_switch
            )));
        }
        if self.asymptotic_terms < 1 {
            return Err(Error::InvalidConfig("asymptotic_terms must be >= 1".into()));
        }
        Ok(())
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("alpha must lie in (0, 1], got {alpha}")))
    }
}

/// Quality flag attached to an evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default)]
pub enum Accuracy {
    #[default]
    Full,
    /// The series partial sums exceeded 10⁸ × the result.
    Cancellation,
    /// The series hit `series_max_terms` before meeting `series_tol`.
    Truncated,
    /// The quadrature error estimate did not reach its target.
    Unconverged,
}

impl Accuracy {
    pub fn worst(self, other: Accuracy) -> Accuracy {
        self.max(other)
    }

    pub fn is_full(self) -> bool {
        self == Accuracy::Full
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlValue {
    pub value: f64,
    pub accuracy: Accuracy,
}

impl MlValue {
    fn full(value: f64) -> Self {
        Self { value, accuracy: Accuracy::Full }
    }
}

const CANCELLATION_RATIO: f64 = 1e8;
const QUAD_REL_TOL: f64 = 1e-14;
const QUAD_MAX_PANELS: usize = 400;
// exp(-45) is below double resolution relative to the integrand near y = 0
const QUAD_EXPONENT_CUTOFF: f64 = 45.0;

/// Reusable evaluator: caches the log-Γ table of the series and the
/// coefficients of the asymptotic expansion for one α.
#[derive(Debug, Clone)]
pub struct MittagLeffler {
    params: MlParams,
    ln_gamma_series: Vec<f64>,
    asym_coeffs: Vec<f64>,
    sin_pi_alpha: f64,
    cos_pi_alpha: f64,
}

impl MittagLeffler {
    pub fn new(params: MlParams) -> Result<Self> {
        params.validate()?;
        let a = params.alpha;
        let ln_gamma_series = (0..=params.series_max_terms).map(|k| ln_gamma(k as f64 * a + 1.0)).collect();
        let asym_coeffs = (1..=params.asymptotic_terms)
            .map(|k| {
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                sign * recip_gamma(1.0 - k as f64 * a)
            })
            .collect();
        Ok(Self {
            params,
            ln_gamma_series,
            asym_coeffs,
            sin_pi_alpha: (PI * a).sin(),
            cos_pi_alpha: (PI * a).cos(),
        })
    }

    pub fn with_alpha(alpha: f64) -> Result<Self> {
        Self::new(MlParams::new(alpha)?)
    }

    pub fn params(&self) -> &MlParams {
        &self.params
    }

    pub fn alpha(&self) -> f64 {
        self.params.alpha
    }

    /// Truncated power series.
    pub fn series(&self, z: f64) -> Result<MlValue> {
        if !z.is_finite() {
            return Err(Error::Domain(format!("Mittag-Leffler argument must be finite, got {z}")));
        }
        if z == 0.0 {
            return Ok(MlValue::full(1.0));
        }
        let ln_abs_z = z.abs().ln();
        let negative = z < 0.0;
        let mut sum = 1.0;
        let mut peak = 1.0_f64;
        let mut converged = false;
        for k in 1..=self.params.series_max_terms {
            let magnitude = (k as f64 * ln_abs_z - self.ln_gamma_series[k]).exp();
            if magnitude < self.params.series_tol {
                converged = true;
                break;
            }
            let term = if negative && k % 2 == 1 { -magnitude } else { magnitude };
            sum += term;
            peak = peak.max(sum.abs());
        }
        let accuracy = if !converged {
            Accuracy::Truncated
        } else if peak > CANCELLATION_RATIO * sum.abs() {
            Accuracy::Cancellation
        } else {
            Accuracy::Full
        };
        Ok(MlValue { value: sum, accuracy })
    }

    /// N-term inverse-power expansion of E_α(−x), N = `asymptotic_terms`.
    pub fn asymptotic(&self, x: f64) -> Result<f64> {
        asymptotic_with(&self.asym_coeffs, x, self.params.alpha)
    }

    /// E_α(−x) from the integral representation; requires α < 1 and x > 0.
    pub fn integral(&self, x: f64) -> Result<MlValue> {
        let a = self.params.alpha;
        if a >= 1.0 {
            return Err(Error::Unsupported("integral representation needs alpha < 1".into()));
        }
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::Domain(format!("integral branch needs finite x > 0, got {x}")));
        }
        let inv_a = 1.0 / a;
        let (s, c) = (self.sin_pi_alpha, self.cos_pi_alpha);
        let integrand = |y: f64| {
            let damp = (-(x * y).powf(inv_a)).exp();
            damp / (y * y + 2.0 * y * c + 1.0)
        };
        let upper = QUAD_EXPONENT_CUTOFF.powf(a) / x;
        let mut breaks = vec![1.0 / x];
        if c < 0.0 {
            // Lorentzian peak of the denominator at y = -cos(απ), width sin(απ)
            breaks.extend([-c - s, -c, -c + s]);
        }
        let r = quad::integrate(integrand, 0.0, upper, &breaks, 0.0, QUAD_REL_TOL, QUAD_MAX_PANELS);
        Ok(MlValue {
            value: s / (a * PI) * r.value,
            accuracy: if r.converged { Accuracy::Full } else { Accuracy::Unconverged },
        })
    }

    /// Branch dispatcher; see the module docs for the ranges.
    pub fn eval(&self, z: f64) -> Result<MlValue> {
        if !z.is_finite() {
            return Err(Error::Domain(format!("Mittag-Leffler argument must be finite, got {z}")));
        }
        if self.params.alpha == 1.0 {
            return Ok(MlValue::full(z.exp()));
        }
        if z >= -self.params.series_switch {
            return self.series(z);
        }
        let x = -z;
        if x <= self.params.asymptote_switch {
            self.integral(x)
        } else {
            Ok(MlValue::full(self.asymptotic(x)?))
        }
    }

    /// Value-only shorthand for [`MittagLeffler::eval`].
    pub fn value(&self, z: f64) -> Result<f64> {
        self.eval(z).map(|v| v.value)
    }
}

fn asymptotic_with(coeffs: &[f64], x: f64, alpha: f64) -> Result<f64> {
    if alpha >= 1.0 {
        return Err(Error::Unsupported(
            "inverse-power asymptote has no alpha = 1 form (Γ(1 − α) has a pole); use exp".into(),
        ));
    }
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("asymptotic branch needs finite x > 0, got {x}")));
    }
    let inv_x = 1.0 / x;
    // Horner in 1/x: Σ_k coeff_k x^{-k}
    let poly = coeffs.iter().rev().fold(0.0, |acc, &c| (acc + c) * inv_x);
    Ok(poly)
}

/// Σ_{k=0}^{K} z^k / Γ(kα + 1), stopping at the first term below
/// `p.series_tol` or after `p.series_max_terms` terms.
pub fn ml_series(z: f64, p: &MlParams) -> Result<MlValue> {
    MittagLeffler::new(*p)?.series(z)
}

/// Short-time approximation exp(−λ t^α / Γ(1 + α)) of E_α(−λ t^α).
pub fn ml_stretched_exp(lambda: f64, t: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("time must be >= 0, got {t}")));
    }
    if !(lambda >= 0.0) {
        return Err(Error::Domain(format!("rate must be >= 0, got {lambda}")));
    }
    Ok((-lambda * t.powf(alpha) / gamma(1.0 + alpha)).exp())
}

/// Σ_{k=1}^{N} (−1)^{k+1} x^{−k} / Γ(1 − kα), the large-x expansion of
/// E_α(−x). With `n_terms = 1` this is the leading law 1/(x Γ(1 − α)).
pub fn ml_asymptotic(x: f64, alpha: f64, n_terms: usize) -> Result<f64> {
    check_alpha(alpha)?;
    if n_terms < 1 {
        return Err(Error::InvalidConfig("n_terms must be >= 1".into()));
    }
    let coeffs: Vec<f64> = (1..=n_terms)
        .map(|k| {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            sign * recip_gamma(1.0 - k as f64 * alpha)
        })
        .collect();
    asymptotic_with(&coeffs, x, alpha)
}

/// E_α(z) with the default branch layout for `p`.
pub fn ml_eval(z: f64, p: &MlParams) -> Result<MlValue> {
    MittagLeffler::new(*p)?.eval(z)
}
