//! The three fractional rate equations d^αX/dt^α = f(X), X(0) = x₀.

use std::fmt;

use crate::error::{Error, Result};
use crate::mittag_leffler::check_alpha;

/// Right-hand side of the rate equation, with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Equation {
    /// f(X) = 1 − X²
    Riccati,
    /// f(X) = λ^α X (1 − X)
    Logistic { rate: f64 },
    /// f(X) = −aX − bX³
    Cubic { a: f64, b: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EquationKind {
    Riccati,
    Logistic,
    Cubic,
}

impl EquationKind {
    pub fn name(self) -> &'static str {
        match self {
            EquationKind::Riccati => "riccati",
            EquationKind::Logistic => "logistic",
            EquationKind::Cubic => "cubic",
        }
    }
}

impl fmt::Display for EquationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for EquationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "riccati" => Ok(EquationKind::Riccati),
            "logistic" => Ok(EquationKind::Logistic),
            "cubic" => Ok(EquationKind::Cubic),
            other => Err(Error::InvalidConfig(format!("unknown equation '{other}'"))),
        }
    }
}

/// A validated initial-value problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemSpec {
    pub equation: Equation,
    pub alpha: f64,
    pub x0: f64,
}

impl ProblemSpec {
    pub fn new(equation: Equation, alpha: f64, x0: f64) -> Result<Self> {
        let spec = Self { equation, alpha, x0 };
        spec.validate()?;
        Ok(spec)
    }

    pub fn riccati(alpha: f64, x0: f64) -> Result<Self> {
        Self::new(Equation::Riccati, alpha, x0)
    }

    pub fn logistic(alpha: f64, x0: f64, rate: f64) -> Result<Self> {
        Self::new(Equation::Logistic { rate }, alpha, x0)
    }

    pub fn cubic(alpha: f64, x0: f64, a: f64, b: f64) -> Result<Self> {
        Self::new(Equation::Cubic { a, b }, alpha, x0)
    }

    pub fn kind(&self) -> EquationKind {
        match self.equation {
            Equation::Riccati => EquationKind::Riccati,
            Equation::Logistic { .. } => EquationKind::Logistic,
            Equation::Cubic { .. } => EquationKind::Cubic,
        }
    }

    /// Same problem at a different fractional order.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(self.equation, alpha, self.x0)
    }

    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        if !self.x0.is_finite() {
            return Err(Error::Domain(format!("x0 must be finite, got {}", self.x0)));
        }
        match self.equation {
            Equation::Riccati => {
                if self.x0 < 0.0 {
                    return Err(Error::Domain(format!("riccati requires x0 >= 0, got {}", self.x0)));
                }
            }
            Equation::Logistic { rate } => {
                if !(rate > 0.0) || !rate.is_finite() {
                    return Err(Error::Domain(format!("logistic requires lambda > 0, got {rate}")));
                }
                if !(self.x0 > 0.0 && self.x0 <= 1.0) {
                    return Err(Error::Domain(format!("logistic requires 0 < x0 <= 1, got {}", self.x0)));
                }
                if self.x0 <= 0.5 {
                    return Err(Error::DivergentSeries {
                        ratio: ((self.x0 - 1.0) / self.x0).abs(),
                        reason: format!("logistic expansion needs x0 > 1/2, got {}", self.x0),
                    });
                }
            }
            Equation::Cubic { a, b } => {
                if !(a > 0.0) || !a.is_finite() {
                    return Err(Error::Domain(format!("cubic requires a > 0, got {a}")));
                }
                if !(b >= 0.0) || !b.is_finite() {
                    return Err(Error::Domain(format!("cubic requires b >= 0, got {b}")));
                }
            }
        }
        Ok(())
    }

    /// f(x), the nonlinear right-hand side.
    pub fn rhs(&self, x: f64) -> f64 {
        match self.equation {
            Equation::Riccati => 1.0 - x * x,
            Equation::Logistic { rate } => rate.powf(self.alpha) * x * (1.0 - x),
            Equation::Cubic { a, b } => -a * x - b * x * x * x,
        }
    }

    /// Long-time limit of the solution.
    pub fn equilibrium(&self) -> f64 {
        match self.equation {
            Equation::Riccati | Equation::Logistic { .. } => 1.0,
            Equation::Cubic { .. } => 0.0,
        }
    }

    /// `key=value` pairs describing the equation parameters.
    pub fn param_string(&self) -> String {
        match self.equation {
            Equation::Riccati => format!("x0={}", self.x0),
            Equation::Logistic { rate } => format!("x0={};lambda={rate}", self.x0),
            Equation::Cubic { a, b } => format!("x0={};a={a};b={b}", self.x0),
        }
    }
}
