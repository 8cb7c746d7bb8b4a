//! Log-log power-law fits and small linear least-squares problems.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::trajectory::Trajectory;

/// |y| ≈ prefactor · t^exponent. The prefactor is a magnitude; `sign`
/// records the common sign of the fitted samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLaw {
    pub exponent: f64,
    pub prefactor: f64,
    pub sign: f64,
    pub points: usize,
}

impl PowerLaw {
    pub fn eval(&self, t: f64) -> f64 {
        self.sign * self.prefactor * t.powf(self.exponent)
    }
}

pub const MIN_FIT_POINTS: usize = 5;

/// Least-squares line through (ln t, ln |y|) for samples with
/// `t_lo <= t <= t_hi`. Fails on fewer than five points, on zeros, or when
/// the samples change sign inside the window.
pub fn fit_power_law(traj: &Trajectory, t_lo: f64, t_hi: f64) -> Result<PowerLaw> {
    if !(t_lo > 0.0) || !(t_hi > t_lo) {
        return Err(Error::Fit(format!("bad window [{t_lo}, {t_hi}]")));
    }
    let window: Vec<(f64, f64)> = traj.iter().filter(|&(t, _)| t >= t_lo && t <= t_hi).collect();
    if window.len() < MIN_FIT_POINTS {
        return Err(Error::Fit(format!(
            "{} points in [{t_lo:e}, {t_hi:e}], need {MIN_FIT_POINTS}",
            window.len()
        )));
    }
    let sign = window[0].1.signum();
    if window.iter().any(|&(_, y)| y == 0.0 || y.signum() != sign) {
        return Err(Error::Fit(format!("zero or sign change in [{t_lo:e}, {t_hi:e}]")));
    }
    let n = window.len() as f64;
    let (sx, sy) = window.iter().fold((0.0, 0.0), |(sx, sy), &(t, y)| (sx + t.ln(), sy + y.abs().ln()));
    let (mx, my) = (sx / n, sy / n);
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for &(t, y) in &window {
        let dx = t.ln() - mx;
        sxx += dx * dx;
        sxy += dx * (y.abs().ln() - my);
    }
    if sxx == 0.0 {
        return Err(Error::Fit("degenerate abscissae".into()));
    }
    let slope = sxy / sxx;
    Ok(PowerLaw {
        exponent: slope,
        prefactor: (my - slope * mx).exp(),
        sign,
        points: window.len(),
    })
}

/// Minimises ‖A c − y‖₂ where column j of A is `basis[j]` sampled at the rows.
/// Columns are normalised before the SVD solve to tame disparate scales.
pub fn least_squares(columns: &[Vec<f64>], y: &[f64]) -> Result<Vec<f64>> {
    let rows = y.len();
    let cols = columns.len();
    if cols == 0 || rows < cols || columns.iter().any(|c| c.len() != rows) {
        return Err(Error::Fit(format!("need rows >= columns, got {rows} x {cols}")));
    }
    let norms: Vec<f64> = columns
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    if norms.iter().any(|&n| !(n > 0.0) || !n.is_finite()) {
        return Err(Error::Fit("zero or non-finite basis column".into()));
    }
    let a = DMatrix::from_fn(rows, cols, |i, j| columns[j][i] / norms[j]);
    let b = DVector::from_column_slice(y);
    let svd = a.svd(true, true);
    let sol = svd.solve(&b, 1e-14).map_err(|e| Error::Fit(e.to_string()))?;
    Ok(sol.iter().zip(&norms).map(|(c, n)| c / n).collect())
}
