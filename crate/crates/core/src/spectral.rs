//! Truncated eigen-expansions X(t) = offset + Σ_k c_k E_α(λ_k t^α).
//!
//! | equation | λ_k          | c_k                                            | offset |
//! |----------|--------------|------------------------------------------------|--------|
//! | Riccati  | −2k          | 2 r^k, r = (x₀−1)/(x₀+1)                        | −1     |
//! | logistic | −k λ^α       | r^k, r = (x₀−1)/x₀                              | 0      |
//! | cubic    | −(2k+1) a    | (2k−1)!!/(2k)!! · q^k · x₀/√(β+1), q = β/(β+1)  | 0      |
//!
//! with β = (b/a) x₀². At α = 1 every Mittag-Leffler factor is an
//! exponential and the sums collapse to the classical closed forms.

use crate::error::{Error, Result};
use crate::mittag_leffler::{Accuracy, MittagLeffler, MlParams};
use crate::problem::{Equation, ProblemSpec};
use crate::sum::{euler_mean, NeumaierSum};
use crate::trajectory::{check_grid, Provenance, Trajectory};

/// Number of retained modes unless told otherwise.
pub const DEFAULT_TERMS: usize = 100;

/// Alternating expansions whose plain truncation error |r|^K exceeds this
/// are summed with Euler means instead.
const RESUM_THRESHOLD: f64 = 1e-17;

/// Plainly summed modes whose coefficient and rate are both below this,
/// relative to the largest ones, are not evaluated.
const NEGLIGIBLE: f64 = 1e-20;

#[derive(Debug, Clone)]
pub struct SpectralSolution {
    spec: ProblemSpec,
    eigenvalues: Vec<f64>,
    coeffs: Vec<f64>,
    offset: f64,
    ratio: f64,
    /// modes actually evaluated
    active: usize,
    ml: MittagLeffler,
}

/// Solution value and its termwise Caputo derivative at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSample {
    pub value: f64,
    /// Σ c_k λ_k E_α(λ_k t^α)
    pub caputo: f64,
    pub accuracy: Accuracy,
}

/// Builds the first `terms` modes of the expansion for `spec`.
pub fn build_spectrum(spec: &ProblemSpec, terms: usize) -> Result<SpectralSolution> {
    SpectralSolution::with_params(spec, terms, MlParams::new(spec.alpha)?)
}

impl SpectralSolution {
    pub fn new(spec: &ProblemSpec) -> Result<Self> {
        build_spectrum(spec, DEFAULT_TERMS)
    }

    /// As [`build_spectrum`] with explicit Mittag-Leffler settings.
    pub fn with_params(spec: &ProblemSpec, terms: usize, ml_params: MlParams) -> Result<Self> {
        spec.validate()?;
        if terms < 1 {
            return Err(Error::InvalidConfig("need at least one mode".into()));
        }
        if ml_params.alpha != spec.alpha {
            return Err(Error::InvalidConfig(format!(
                "Mittag-Leffler order {} differs from problem order {}",
                ml_params.alpha, spec.alpha
            )));
        }
        let x0 = spec.x0;
        let mut eigenvalues = Vec::with_capacity(terms);
        let mut coeffs = Vec::with_capacity(terms);
        let (offset, ratio) = match spec.equation {
            Equation::Riccati => {
                let r = (x0 - 1.0) / (x0 + 1.0);
                let mut c = 2.0;
                for k in 0..terms {
                    eigenvalues.push(-2.0 * k as f64);
                    coeffs.push(c);
                    c *= r;
                }
                (-1.0, r)
            }
            Equation::Logistic { rate } => {
                let r = (x0 - 1.0) / x0;
                let gap = rate.powf(spec.alpha);
                let mut c = 1.0;
                for k in 0..terms {
                    eigenvalues.push(-(k as f64) * gap);
                    coeffs.push(c);
                    c *= r;
                }
                (0.0, r)
            }
            Equation::Cubic { a, b } => {
                let beta = b / a * x0 * x0;
                let q = beta / (beta + 1.0);
                let lead = x0 / (beta + 1.0).sqrt();
                // (2k−1)!!/(2k)!! by its multiplicative recurrence
                let mut dfact = 1.0;
                let mut qk = 1.0;
                for k in 0..terms {
                    if k > 0 {
                        dfact *= (2 * k - 1) as f64 / (2 * k) as f64;
                        qk *= q;
                    }
                    eigenvalues.push(-((2 * k + 1) as f64) * a);
                    coeffs.push(dfact * qk * lead);
                }
                (0.0, q)
            }
        };
        let mut sol = Self {
            spec: *spec,
            eigenvalues,
            coeffs,
            offset,
            ratio,
            active: terms,
            ml: MittagLeffler::new(ml_params)?,
        };
        if !sol.resummed() {
            let c_max = sol.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
            let rate = |k: usize| (sol.coeffs[k] * sol.eigenvalues[k]).abs();
            let r_max = (0..terms).map(rate).fold(0.0f64, f64::max);
            sol.active = (0..terms)
                .rposition(|k| sol.coeffs[k].abs() >= NEGLIGIBLE * c_max || rate(k) >= NEGLIGIBLE * r_max)
                .map_or(0, |k| k + 1);
        }
        Ok(sol)
    }

    pub fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    pub fn terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Geometric ratio of the coefficients.
    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    /// Bound on Σ_{k≥K} |c_k|, the initial-condition error of the truncation.
    /// Infinite when |ratio| ≥ 1.
    pub fn tail_bound(&self) -> f64 {
        let r = self.ratio.abs();
        let k = self.terms() as i32;
        if self.resummed() {
            // Euler terms of a moment sequence are bounded by a_0 2^{−n−1}
            return self.coeffs[0].abs() * 0.5f64.powi(k);
        }
        if r >= 1.0 {
            return f64::INFINITY;
        }
        match self.spec.equation {
            Equation::Riccati => 2.0 * r.powi(k) / (1.0 - r),
            Equation::Logistic { .. } => r.powi(k) / (1.0 - r),
            // the double-factorial ratio never exceeds 1
            Equation::Cubic { a, b } => {
                let beta = b / a * self.spec.x0 * self.spec.x0;
                self.spec.x0.abs() / (beta + 1.0).sqrt() * r.powi(k) / (1.0 - r)
            }
        }
    }

    /// Whether the mode sums are Euler means rather than plain partial sums.
    ///
    /// Riccati and logistic coefficients alternate in sign when x₀ < 1. Near
    /// the boundary ratio r = −1 (Riccati x₀ → 0) the plain truncation is
    /// useless at fractional order: E_α(−s) decays only like 1/s, so the
    /// Caputo series Σ c_k λ_k E_α(λ_k t^α) oscillates with O(1) amplitude
    /// for every K. Each Mittag-Leffler factor is a Laplace transform of a
    /// positive density, which makes the mode magnitudes moment sequences
    /// and the Euler mean converge like 2^{−K}.
    pub fn resummed(&self) -> bool {
        self.ratio < 0.0 && self.ratio.abs().powi(self.terms() as i32) > RESUM_THRESHOLD
    }

    /// X(t) and its termwise Caputo derivative, sharing one pass of
    /// Mittag-Leffler evaluations. Modes are accumulated in increasing k
    /// with compensated summation, or through [`euler_mean`] when
    /// [`resummed`](Self::resummed).
    pub fn sample(&self, t: f64) -> Result<ModeSample> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::Domain(format!("time must be finite and >= 0, got {t}")));
        }
        let t_alpha = t.powf(self.spec.alpha);
        let mut accuracy = Accuracy::Full;
        let mut values = Vec::with_capacity(self.terms());
        let mut rates = Vec::with_capacity(self.terms());
        for (&c, &lambda) in self.coeffs.iter().zip(&self.eigenvalues).take(self.active) {
            if c == 0.0 && !self.resummed() {
                continue;
            }
            let e = self.ml.eval(lambda * t_alpha)?;
            accuracy = accuracy.worst(e.accuracy);
            values.push(c * e.value);
            rates.push(c * lambda * e.value);
        }
        let (mut value, caputo) = if self.resummed() {
            (self.offset + euler_mean(&values), euler_mean(&rates))
        } else {
            let mut v = NeumaierSum::new();
            v.add(self.offset);
            v.extend(values.iter().copied());
            (v.value(), rates.iter().copied().collect::<NeumaierSum>().value())
        };
        if t == 0.0 && self.ratio.abs() >= 1.0 {
            // the boundary-ratio series only sums to x0 in the Abel sense
            value = self.spec.x0;
        }
        Ok(ModeSample {
            value,
            caputo,
            accuracy,
        })
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        self.sample(t).map(|s| s.value)
    }

    pub fn trajectory(&self, grid: &[f64]) -> Result<Trajectory> {
        check_grid(grid)?;
        let values = grid.iter().map(|&t| self.eval(t)).collect::<Result<Vec<_>>>()?;
        Trajectory::new(grid.to_vec(), values, Provenance::Spectral)
    }
}

/// offset + Σ_{k<K} c_k E_α(λ_k t^α).
pub fn eval_solution(sol: &SpectralSolution, t: f64) -> Result<f64> {
    sol.eval(t)
}

/// [`eval_solution`] over a strictly increasing grid.
pub fn eval_trajectory(sol: &SpectralSolution, grid: &[f64]) -> Result<Trajectory> {
    sol.trajectory(grid)
}

/// Classical α = 1 solutions.
pub fn closed_form_integer(spec: &ProblemSpec, t: f64) -> Result<f64> {
    if spec.alpha != 1.0 {
        return Err(Error::Unsupported(format!(
            "closed forms exist only for alpha = 1, got {}",
            spec.alpha
        )));
    }
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("time must be >= 0, got {t}")));
    }
    let x0 = spec.x0;
    Ok(match spec.equation {
        Equation::Riccati => {
            let th = t.tanh();
            (th + x0) / (x0 * th + 1.0)
        }
        Equation::Logistic { rate } => x0 / (x0 + (1.0 - x0) * (-rate * t).exp()),
        Equation::Cubic { a, b } => {
            let decay = (-a * t).exp();
            // 1 − e^{−2at} via expm1 to keep small-t precision
            let grow = -(-2.0 * a * t).exp_m1();
            x0 * decay / (1.0 + b / a * x0 * x0 * grow).sqrt()
        }
    })
}

/// 2 Σ_{k<K} ((x₀−1)/(x₀+1))^k e^{−2kt} − 1, the α = 1 Riccati expansion.
pub fn riccati_integer_series(x0: f64, terms: usize, t: f64) -> Result<f64> {
    if !(x0 >= 0.0) {
        return Err(Error::Domain(format!("riccati requires x0 >= 0, got {x0}")));
    }
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("time must be >= 0, got {t}")));
    }
    let r = (x0 - 1.0) / (x0 + 1.0);
    let decay = (-2.0 * t).exp();
    let mut sum = NeumaierSum::new();
    sum.add(-1.0);
    let mut term = 2.0;
    for _ in 0..terms {
        sum.add(term);
        term *= r * decay;
    }
    Ok(sum.value())
}
