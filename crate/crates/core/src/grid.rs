//! Time grids.

use crate::error::{Error, Result};

/// `n` evenly spaced points on `[start, end]`, both ends included.
pub fn linear(start: f64, end: f64, n: usize) -> Result<Vec<f64>> {
    check(start, end, n)?;
    if n == 1 {
        return Ok(vec![start]);
    }
    let step = (end - start) / (n - 1) as f64;
    let mut g: Vec<f64> = (0..n).map(|i| start + step * i as f64).collect();
    g[n - 1] = end;
    Ok(g)
}

/// `n` logarithmically spaced points on `[start, end]`, `start > 0`.
pub fn log(start: f64, end: f64, n: usize) -> Result<Vec<f64>> {
    check(start, end, n)?;
    if !(start > 0.0) {
        return Err(Error::Domain(format!("log grid needs start > 0, got {start}")));
    }
    if n == 1 {
        return Ok(vec![start]);
    }
    let (l0, l1) = (start.ln(), end.ln());
    let step = (l1 - l0) / (n - 1) as f64;
    let mut g: Vec<f64> = (0..n).map(|i| (l0 + step * i as f64).exp()).collect();
    g[0] = start;
    g[n - 1] = end;
    Ok(g)
}

/// Uniform grid t_n = n h for n = 0..=ceil(t_max / h), as used by the integrator.
pub fn uniform_steps(h: f64, t_max: f64) -> Result<Vec<f64>> {
    if !(h > 0.0) || !(t_max >= h) {
        return Err(Error::InvalidConfig(format!("need 0 < h <= t_max, got h={h}, t_max={t_max}")));
    }
    let n = (t_max / h - 1e-9).ceil() as usize;
    Ok((0..=n).map(|i| i as f64 * h).collect())
}

fn check(start: f64, end: f64, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidConfig("grid needs at least one point".into()));
    }
    if !start.is_finite() || !end.is_finite() || start < 0.0 {
        return Err(Error::Domain(format!("bad grid bounds [{start}, {end}]")));
    }
    if n > 1 && !(end > start) {
        return Err(Error::Domain(format!("grid end {end} must exceed start {start}")));
    }
    Ok(())
}
