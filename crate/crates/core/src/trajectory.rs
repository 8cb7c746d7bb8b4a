use std::fmt;

use crate::error::{Error, Result};

/// Where the values of a trajectory came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Spectral,
    ClosedForm,
    Numerical,
    Residual,
    Difference,
    Asymptote,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Provenance::Spectral => "spectral",
            Provenance::ClosedForm => "closed-form",
            Provenance::Numerical => "numerical",
            Provenance::Residual => "residual",
            Provenance::Difference => "difference",
            Provenance::Asymptote => "asymptote",
        };
        f.write_str(s)
    }
}

/// Samples of a scalar function on a strictly increasing, non-negative grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    values: Vec<f64>,
    provenance: Provenance,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, values: Vec<f64>, provenance: Provenance) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::GridMismatch(format!(
                "{} times but {} values",
                times.len(),
                values.len()
            )));
        }
        check_grid(&times)?;
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite value {} at t = {}", values[i], times[i])));
        }
        Ok(Self { times, values, provenance })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.times.iter().copied().zip(self.values.iter().copied())
    }

    /// Largest |value| and the first time at which it occurs.
    pub fn max_abs(&self) -> Option<(f64, f64)> {
        let mut best: Option<(f64, f64)> = None;
        for (t, v) in self.iter() {
            if best.map_or(true, |(b, _)| v.abs() > b) {
                best = Some((v.abs(), t));
            }
        }
        best
    }

    pub fn into_parts(self) -> (Vec<f64>, Vec<f64>, Provenance) {
        (self.times, self.values, self.provenance)
    }
}

/// Checks that a grid is non-empty, finite, non-negative and strictly increasing.
pub fn check_grid(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::Domain("empty time grid".into()));
    }
    if let Some(&t) = times.iter().find(|t| !t.is_finite() || **t < 0.0) {
        return Err(Error::Domain(format!("grid times must be finite and >= 0, got {t}")));
    }
    if let Some(w) = times.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::Domain(format!("grid not strictly increasing at {} -> {}", w[0], w[1])));
    }
    Ok(())
}
