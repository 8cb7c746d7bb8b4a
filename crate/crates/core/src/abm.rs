//! Fractional Adams-Bashforth-Moulton predictor-corrector for
//! d^αX/dt^α = f(X), X(0) = x₀, written as the Volterra equation
//!
//! X(t) = x₀ + (1/Γ(α)) ∫₀ᵗ (t − s)^{α−1} f(X(s)) ds.
//!
//! The predictor integrates f as a step function, the corrector as the
//! piecewise linear interpolant (product rectangle and trapezoid rules).
//! On a uniform grid these are the classical weights of
//! [`abm_weights_b`] and [`abm_weights_a`]. An optional coarse phase
//! continues the run with a larger step; the full memory is kept and the
//! panel integrals are evaluated exactly on the mixed grid.

use crate::error::{Error, Result};
use crate::mittag_leffler::check_alpha;
use crate::problem::ProblemSpec;
use crate::special::gamma;
use crate::sum::NeumaierSum;
use crate::trajectory::{Provenance, Trajectory};

pub const DEFAULT_STEP: f64 = 1e-3;
/// Upper bound on Σ_n (memory length at step n) unless configured otherwise.
pub const DEFAULT_WORK_BUDGET: f64 = 2e9;
/// Where the two-phase grid switches to the coarse step, and that step.
pub const TWO_PHASE_SWITCH: f64 = 10.0;
pub const TWO_PHASE_COARSE_STEP: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoarsePhase {
    /// Time at which the coarse step takes over; a multiple of the fine step.
    pub from: f64,
    /// Coarse step; a multiple of the fine step.
    pub h: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub alpha: f64,
    pub h: f64,
    pub t_max: f64,
    pub corrector_iters: usize,
    pub coarse: Option<CoarsePhase>,
    pub work_budget: f64,
}

impl IntegratorConfig {
    pub fn new(alpha: f64, t_max: f64) -> Self {
        Self {
            alpha,
            h: DEFAULT_STEP,
            t_max,
            corrector_iters: 1,
            coarse: None,
            work_budget: DEFAULT_WORK_BUDGET,
        }
    }

    /// Step h up to t = 10, then 0.1 up to `t_max`.
    pub fn two_phase(alpha: f64, t_max: f64) -> Self {
        Self::new(alpha, t_max).with_coarse_phase(TWO_PHASE_SWITCH, TWO_PHASE_COARSE_STEP)
    }

    pub fn with_h(mut self, h: f64) -> Self {
        self.h = h;
        self
    }

    pub fn with_corrector_iters(mut self, iters: usize) -> Self {
        self.corrector_iters = iters;
        self
    }

    pub fn with_coarse_phase(mut self, from: f64, h: f64) -> Self {
        self.coarse = Some(CoarsePhase { from, h });
        self
    }

    pub fn with_work_budget(mut self, budget: f64) -> Self {
        self.work_budget = budget;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.layout().map(|_| ())
    }

    /// Node times of the integration grid.
    pub fn grid(&self) -> Result<Vec<f64>> {
        let l = self.layout()?;
        Ok(l.units.iter().map(|&u| u as f64 * self.h).collect())
    }

    /// Whether the coarse phase is actually used.
    pub fn is_two_phase(&self) -> bool {
        self.layout().map(|l| l.coarse_width > 1 && l.units.len() > l.fine_steps + 1).unwrap_or(false)
    }

    fn layout(&self) -> Result<Layout> {
        check_alpha(self.alpha)?;
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.h > 0.0) || !self.h.is_finite() {
            return bad(format!("step h must be > 0, got {}", self.h));
        }
        if !(self.t_max >= self.h) || !self.t_max.is_finite() {
            return bad(format!("t_max must be >= h = {}, got {}", self.h, self.t_max));
        }
        if self.corrector_iters == 0 {
            return bad("corrector_iters must be >= 1".into());
        }
        let steps_to = |t: f64, h: f64| (t / h - 1e-9).ceil() as u64;
        let (fine_steps, coarse_width, coarse_steps) = match self.coarse {
            Some(c) if c.from < self.t_max => {
                let n_f = (c.from / self.h).round();
                let width = (c.h / self.h).round();
                if !(c.from > 0.0) || (n_f * self.h - c.from).abs() > 1e-9 * c.from {
                    return bad(format!("coarse phase start {} is not a multiple of h = {}", c.from, self.h));
                }
                if !(c.h >= self.h) || (width * self.h - c.h).abs() > 1e-9 * c.h {
                    return bad(format!("coarse step {} is not a multiple of h = {}", c.h, self.h));
                }
                (n_f as u64, width as u64, steps_to(self.t_max - c.from, c.h))
            }
            _ => (steps_to(self.t_max, self.h), 1, 0),
        };
        let nodes = (fine_steps + coarse_steps + 1) as f64;
        let work = 0.5 * nodes * nodes;
        if work > self.work_budget {
            return bad(format!(
                "{nodes} nodes need ~{work:.1e} history operations, above the budget {:.1e}; \
                 use a larger step or a coarse phase",
                self.work_budget
            ));
        }
        let mut units: Vec<u64> = (0..=fine_steps).collect();
        units.extend((1..=coarse_steps).map(|k| fine_steps + k * coarse_width));
        Ok(Layout {
            units,
            fine_steps: fine_steps as usize,
            coarse_width,
        })
    }
}

/// Node times as integer multiples of the fine step.
struct Layout {
    units: Vec<u64>,
    fine_steps: usize,
    coarse_width: u64,
}

/// Predictor weight b_{j,n+1} = (h^α/α)((n+1−j)^α − (n−j)^α).
pub fn abm_weights_b(n: usize, j: usize, alpha: f64, h: f64) -> f64 {
    assert!(j <= n, "abm_weights_b needs j <= n");
    let m = (n - j) as f64;
    h.powf(alpha) / alpha * ((m + 1.0).powf(alpha) - m.powf(alpha))
}

/// Corrector weight a_{j,n+1} without the common factor h^α/Γ(α+2).
///
/// a_{0,n+1} = n^{α+1} − (n−α)(n+1)^α and, for 1 ≤ j ≤ n,
/// a_{j,n+1} = (n−j+2)^{α+1} + (n−j)^{α+1} − 2(n−j+1)^{α+1}. The weight of
/// the predicted point (j = n+1) is 1.
pub fn abm_weights_a(n: usize, j: usize, alpha: f64) -> f64 {
    assert!(j <= n + 1, "abm_weights_a needs j <= n + 1");
    let p = alpha + 1.0;
    let nf = n as f64;
    if j == n + 1 {
        1.0
    } else if j == 0 {
        nf.powf(p) - (nf - alpha) * (nf + 1.0).powf(alpha)
    } else {
        let m = (n - j) as f64;
        (m + 2.0).powf(p) + m.powf(p) - 2.0 * (m + 1.0).powf(p)
    }
}

/// ∫ (A − v)^{α−1} dv and ∫ v (A − v)^{α−1} dv over v ∈ [0, w], 0 < w ≤ A.
fn panel_moments(a: f64, w: f64, alpha: f64) -> (f64, f64) {
    let rho = w / a;
    let i0 = -a.powf(alpha) * (alpha * (-rho).ln_1p()).exp_m1() / alpha;
    let i1 = if rho < 0.1 {
        // A^{α−1} w² Σ_n ((1−α)_n/n!) ρ^n/(n+2)
        let mut coef = 1.0;
        let mut pow = 1.0;
        let mut s = 0.5;
        for n in 1..64 {
            coef *= (n as f64 - alpha) / n as f64;
            pow *= rho;
            let term = coef * pow / (n as f64 + 2.0);
            s += term;
            if term.abs() < 1e-17 * s {
                break;
            }
        }
        a.powf(alpha - 1.0) * w * w * s
    } else {
        let p = alpha + 1.0;
        a * i0 + a.powf(p) * (p * (-rho).ln_1p()).exp_m1() / p
    };
    (i0, i1)
}

/// Product-rule weights of one panel: predictor, left node, right node.
#[derive(Debug, Clone, Copy, Default)]
struct PanelWeights {
    pred: f64,
    left: f64,
    right: f64,
}

fn panel_weights(a: f64, w: f64, alpha: f64, scale: f64) -> PanelWeights {
    let (i0, i1) = panel_moments(a, w, alpha);
    PanelWeights {
        pred: scale * i0,
        left: scale * (i0 - i1 / w),
        right: scale * i1 / w,
    }
}

/// Panel weights indexed by distance (in panel widths) from the panel's
/// left node to the new node.
struct WeightTable {
    width: u64,
    entries: Vec<PanelWeights>,
}

impl WeightTable {
    fn new(width: u64, count: usize, alpha: f64, scale: f64) -> Self {
        let w = width as f64;
        let mut entries = vec![PanelWeights::default(); count + 1];
        for (m, e) in entries.iter_mut().enumerate().skip(1) {
            *e = panel_weights(m as f64 * w, w, alpha, scale);
        }
        Self { width, entries }
    }

    fn get(&self, distance: u64) -> PanelWeights {
        self.entries[(distance / self.width) as usize]
    }
}

/// Integrates d^αX/dt^α = f(X), X(0) = x₀ on `cfg`'s grid.
pub fn abm_solve_with<F: Fn(f64) -> f64>(f: F, x0: f64, cfg: &IntegratorConfig) -> Result<Trajectory> {
    if !x0.is_finite() {
        return Err(Error::Domain(format!("x0 must be finite, got {x0}")));
    }
    let layout = cfg.layout()?;
    let alpha = cfg.alpha;
    let units = &layout.units;
    let last = *units.last().expect("grid has at least two nodes");
    // h^α/Γ(α) times the unit-step moments
    let scale = cfg.h.powf(alpha) / gamma(alpha);
    let fine = WeightTable::new(1, last as usize, alpha, scale);
    let coarse = (units.len() > layout.fine_steps + 1).then(|| {
        let count = ((last - layout.fine_steps as u64) / layout.coarse_width) as usize;
        WeightTable::new(layout.coarse_width, count, alpha, scale)
    });
    let weights = |distance: u64, width: u64| match (&coarse, width) {
        (Some(c), w) if w == c.width && w > 1 => c.get(distance),
        _ => fine.get(distance),
    };

    let n_nodes = units.len();
    let mut xs = Vec::with_capacity(n_nodes);
    let mut fs = Vec::with_capacity(n_nodes);
    xs.push(x0);
    fs.push(f(x0));
    for i in 0..n_nodes - 1 {
        let target = units[i + 1];
        let mut pred = NeumaierSum::new();
        let mut hist = NeumaierSum::new();
        let mut last_right = 0.0;
        for j in 0..=i {
            let w = weights(target - units[j], units[j + 1] - units[j]);
            pred.add(w.pred * fs[j]);
            hist.add(w.left * fs[j]);
            if j < i {
                hist.add(w.right * fs[j + 1]);
            } else {
                last_right = w.right;
            }
        }
        let history = hist.value();
        let mut x = x0 + pred.value();
        for _ in 0..cfg.corrector_iters {
            x = x0 + history + last_right * f(x);
        }
        let fx = f(x);
        if !x.is_finite() || !fx.is_finite() {
            return Err(Error::Divergence {
                step: i + 1,
                t: target as f64 * cfg.h,
            });
        }
        xs.push(x);
        fs.push(fx);
    }
    let times = units.iter().map(|&u| u as f64 * cfg.h).collect();
    Trajectory::new(times, xs, Provenance::Numerical)
}

/// Numerical solution of `spec`'s initial-value problem.
pub fn abm_solve(spec: &ProblemSpec, cfg: &IntegratorConfig) -> Result<Trajectory> {
    spec.validate()?;
    if spec.alpha != cfg.alpha {
        return Err(Error::InvalidConfig(format!(
            "integrator alpha {} differs from the problem's {}",
            cfg.alpha, spec.alpha
        )));
    }
    abm_solve_with(|x| spec.rhs(x), spec.x0, cfg)
}

/// δ(t) = X_num(t) − X_sp(t) on a shared grid.
pub fn compare_solutions(numerical: &Trajectory, spectral: &Trajectory) -> Result<Trajectory> {
    if numerical.times() != spectral.times() {
        return Err(Error::GridMismatch(format!(
            "numerical grid has {} points, spectral {}; resample the spectral solution onto the numerical grid",
            numerical.len(),
            spectral.len()
        )));
    }
    let values = numerical.values().iter().zip(spectral.values()).map(|(a, b)| a - b).collect();
    Trajectory::new(numerical.times().to_vec(), values, Provenance::Difference)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mittag_leffler::{MittagLeffler, MlParams};
    use approx::assert_relative_eq;

    #[test]
    fn weight_examples() {
        for (n, j) in [(0, 0), (5, 2), (40, 40)] {
            assert_relative_eq!(abm_weights_b(n, j, 1.0, 0.01), 0.01, max_relative = 1e-14);
        }
        assert_eq!(abm_weights_b(0, 0, 0.5, 1.0), 2.0);
        assert_eq!(abm_weights_a(7, 3, 1.0) / gamma(3.0), 1.0);
        assert_eq!(abm_weights_a(0, 0, 0.5), 0.5);
        assert_eq!(abm_weights_a(4, 5, 0.75), 1.0);
    }

    #[test]
    fn predictor_weights_positive_and_decreasing_with_age() {
        for alpha in [0.5, 0.75, 0.9] {
            for n in 0..=100 {
                for j in 1..=n {
                    let older = abm_weights_b(n, j - 1, alpha, 1.0);
                    let newer = abm_weights_b(n, j, alpha, 1.0);
                    assert!(older > 0.0 && older < newer, "alpha={alpha} n={n} j={j}");
                }
            }
        }
    }

    #[test]
    fn corrector_weights_nonnegative() {
        for alpha in [0.1, 0.5, 0.75, 0.9, 1.0] {
            for n in (0..=10_000usize).step_by(97).chain([1, 2, 3, 10_000]) {
                for j in [0, 1, n / 2, n.saturating_sub(1), n, n + 1] {
                    assert!(abm_weights_a(n, j.min(n + 1), alpha) >= -1e-9, "alpha={alpha} n={n} j={j}");
                }
            }
        }
    }

    #[test]
    fn panel_weights_reproduce_uniform_formulas() {
        let h: f64 = 0.01;
        for alpha in [0.3, 0.75, 1.0] {
            let scale = h.powf(alpha) / gamma(alpha);
            let corr = h.powf(alpha) / gamma(alpha + 2.0);
            let n = 30;
            for j in 0..=n {
                let w = panel_weights((n + 1 - j) as f64, 1.0, alpha, scale);
                assert_relative_eq!(w.pred, abm_weights_b(n, j, alpha, h) / gamma(alpha), max_relative = 1e-12);
                // node weight = left of its own panel + right of the previous
                let mut node = w.left;
                if j > 0 {
                    node += panel_weights((n + 2 - j) as f64, 1.0, alpha, scale).right;
                }
                assert_relative_eq!(node, corr * abm_weights_a(n, j, alpha), max_relative = 1e-11);
            }
            let newest = panel_weights(1.0, 1.0, alpha, scale).right;
            assert_relative_eq!(newest, corr, max_relative = 1e-13);
        }
    }

    #[test]
    fn moment_series_and_closed_form_agree_at_switch() {
        for alpha in [0.2, 0.75, 0.95] {
            let below = panel_moments(1.0 / 0.0999999, 1.0, alpha).1;
            let above = panel_moments(1.0 / 0.1000001, 1.0, alpha).1;
            assert_relative_eq!(below, above, max_relative = 1e-5);
        }
    }

    #[test]
    fn fixed_point_is_constant() {
        let spec = ProblemSpec::riccati(0.6, 1.0).unwrap();
        let tr = abm_solve(&spec, &IntegratorConfig::new(0.6, 1.0).with_h(0.01)).unwrap();
        assert!(tr.values().iter().all(|&x| x == 1.0));
    }

    #[test]
    fn linear_problem_follows_mittag_leffler() {
        let cfg = IntegratorConfig::new(0.75, 1.0).with_h(1e-3);
        let tr = abm_solve_with(|x| -x, 1.0, &cfg).unwrap();
        let ml = MittagLeffler::new(MlParams::new(0.75).unwrap()).unwrap();
        let err = tr
            .iter()
            .map(|(t, x)| (x - ml.value(-t.powf(0.75)).unwrap()).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-4, "{err}");
    }

    #[test]
    fn two_phase_grid_layout() {
        let cfg = IntegratorConfig::new(0.75, 2.0).with_h(0.01).with_coarse_phase(1.0, 0.1);
        let g = cfg.grid().unwrap();
        assert_eq!(g.len(), 101 + 10);
        assert_relative_eq!(g[100], 1.0, max_relative = 1e-15);
        assert_relative_eq!(g[101], 1.1, max_relative = 1e-15);
        assert_relative_eq!(*g.last().unwrap(), 2.0, max_relative = 1e-15);
        assert!(cfg.is_two_phase());
        assert!(!IntegratorConfig::new(0.75, 2.0).is_two_phase());
        let misaligned = IntegratorConfig::new(0.75, 2.0).with_h(0.03).with_coarse_phase(1.0, 0.1);
        assert!(matches!(misaligned.validate(), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn coarse_phase_tracks_fine_run() {
        let spec = ProblemSpec::logistic(0.75, 0.75, 1.0).unwrap();
        let fine = abm_solve(&spec, &IntegratorConfig::new(0.75, 3.0).with_h(0.005)).unwrap();
        let mixed = abm_solve(&spec, &IntegratorConfig::new(0.75, 3.0).with_h(0.005).with_coarse_phase(1.0, 0.05)).unwrap();
        let x_fine = *fine.values().last().unwrap();
        let x_mixed = *mixed.values().last().unwrap();
        assert!((x_fine - x_mixed).abs() < 1e-4, "{x_fine} {x_mixed}");
    }

    #[test]
    fn config_errors() {
        let bad = [
            IntegratorConfig::new(0.75, 1.0).with_h(0.0),
            IntegratorConfig::new(0.75, 1e-4),
            IntegratorConfig::new(0.75, 1.0).with_corrector_iters(0),
            IntegratorConfig::new(0.75, 1e3),
        ];
        for cfg in bad {
            assert!(matches!(cfg.validate(), Err(Error::InvalidConfig(_))), "{cfg:?}");
        }
        assert!(IntegratorConfig::new(1.5, 1.0).validate().is_err());
        let spec = ProblemSpec::riccati(0.5, 0.0).unwrap();
        assert!(matches!(abm_solve(&spec, &IntegratorConfig::new(0.75, 1.0)), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn blow_up_reports_step() {
        let cfg = IntegratorConfig::new(1.0, 2.0).with_h(0.01);
        match abm_solve_with(|x| x * x * x, 5.0, &cfg) {
            Err(Error::Divergence { step, t }) => {
                assert!(step > 0);
                assert_relative_eq!(t, step as f64 * 0.01, max_relative = 1e-12);
            }
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn compare_checks_grids() {
        let a = Trajectory::new(vec![0.0, 1.0], vec![1.0, 2.0], Provenance::Numerical).unwrap();
        let b = Trajectory::new(vec![0.0, 1.0], vec![0.5, 2.0], Provenance::Spectral).unwrap();
        let d = compare_solutions(&a, &b).unwrap();
        assert_eq!(d.values(), &[0.5, 0.0]);
        assert_eq!(d.provenance(), Provenance::Difference);
        assert!(compare_solutions(&a, &a).unwrap().values().iter().all(|&v| v == 0.0));
        let c = Trajectory::new(vec![0.0, 2.0], vec![1.0, 2.0], Provenance::Spectral).unwrap();
        assert!(matches!(compare_solutions(&a, &c), Err(Error::GridMismatch(_))));
    }
}
