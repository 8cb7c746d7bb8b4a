use fracspec::grid;
use fracspec::mittag_leffler::MittagLeffler;
use fracspec::problem::ProblemSpec;
use fracspec::residual::residual;
use fracspec::spectral::{closed_form_integer, SpectralSolution};
use proptest::prelude::*;

fn integer_cases() -> Vec<ProblemSpec> {
    let mut v = Vec::new();
    for x0 in [0.0, 0.25, 0.5] {
        v.push(ProblemSpec::riccati(1.0, x0).unwrap());
    }
    for x0 in [0.6, 0.75, 0.9] {
        for rate in [0.5, 1.0, 2.0] {
            v.push(ProblemSpec::logistic(1.0, x0, rate).unwrap());
        }
    }
    for x0 in [0.5, 1.0] {
        v.push(ProblemSpec::cubic(1.0, x0, 1.0, 1.0).unwrap());
    }
    v
}

#[test]
fn integer_order_collapses_to_closed_forms() {
    let g = grid::linear(0.0, 5.0, 101).unwrap();
    for spec in integer_cases() {
        let sol = SpectralSolution::new(&spec).unwrap();
        let tol = 1e-10 + sol.tail_bound();
        for &t in &g {
            let gap = (sol.eval(t).unwrap() - closed_form_integer(&spec, t).unwrap()).abs();
            assert!(gap <= tol, "{spec:?} t={t} gap={gap}");
        }
    }
}

#[test]
fn long_time_limits() {
    let cases = [
        ProblemSpec::riccati(0.75, 0.0).unwrap(),
        ProblemSpec::riccati(0.75, 0.5).unwrap(),
        ProblemSpec::logistic(0.75, 0.75, 1.0).unwrap(),
        ProblemSpec::cubic(0.75, 1.0, 1.0, 1.0).unwrap(),
    ];
    for spec in cases {
        let x = SpectralSolution::new(&spec).unwrap().eval(1e3).unwrap();
        assert!((x - spec.equilibrium()).abs() < 0.05, "{spec:?} {x}");
    }
}

#[test]
fn riccati_approaches_one_monotonically() {
    let g = grid::log(1e-4, 1e3, 200).unwrap();
    for alpha in [0.3, 0.5, 0.75, 0.9, 1.0] {
        for x0 in [0.0, 0.1, 0.5, 0.9] {
            let tr = SpectralSolution::new(&ProblemSpec::riccati(alpha, x0).unwrap()).unwrap().trajectory(&g).unwrap();
            for w in tr.values().windows(2) {
                assert!(w[1] >= w[0] - 1e-13, "alpha={alpha} x0={x0}: {} -> {}", w[0], w[1]);
            }
        }
    }
}

#[test]
fn spectrum_gaps() {
    let r = SpectralSolution::new(&ProblemSpec::riccati(0.5, 0.3).unwrap()).unwrap();
    assert!(r.eigenvalues().windows(2).all(|w| w[0] - w[1] == 2.0));
    let rate: f64 = 2.0;
    let l = SpectralSolution::new(&ProblemSpec::logistic(0.5, 0.8, rate).unwrap()).unwrap();
    for w in l.eigenvalues().windows(2) {
        assert!((w[0] - w[1] - rate.powf(0.5)).abs() < 1e-12);
    }
}

#[test]
fn boundary_ratio_sum_converges_in_k() {
    // Riccati x0 = 0 sits on |r| = 1; the summed modes must not depend on K
    let spec = ProblemSpec::riccati(0.75, 0.0).unwrap();
    let a = fracspec::spectral::build_spectrum(&spec, 100).unwrap();
    let b = fracspec::spectral::build_spectrum(&spec, 160).unwrap();
    assert!(a.resummed());
    for t in [1e-4, 1e-2, 0.5, 3.0, 100.0] {
        let (sa, sb) = (a.sample(t).unwrap(), b.sample(t).unwrap());
        // limited by the large-|z| Mittag-Leffler branch, not by the summation
        assert!((sa.value - sb.value).abs() < 1e-10, "t={t}");
        assert!((sa.caputo - sb.caputo).abs() < 1e-8, "t={t}");
    }
}

#[test]
fn fixed_points_give_constant_solutions() {
    for alpha in [0.4, 0.75, 1.0] {
        for spec in [
            ProblemSpec::riccati(alpha, 1.0).unwrap(),
            ProblemSpec::logistic(alpha, 1.0, 1.5).unwrap(),
            ProblemSpec::cubic(alpha, 0.0, 1.0, 1.0).unwrap(),
        ] {
            let sol = SpectralSolution::new(&spec).unwrap();
            for t in [1e-3, 1.0, 50.0] {
                assert_eq!(sol.eval(t).unwrap(), spec.x0, "{spec:?}");
                assert_eq!(residual(&sol, t).unwrap(), 0.0, "{spec:?}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn initial_condition_recovered(alpha in 0.1f64..=1.0, x0r in 0.0f64..3.0, x0l in 0.51f64..=1.0, x0c in 0.0f64..2.0) {
        let cases = [
            (ProblemSpec::riccati(alpha, x0r).unwrap(), (1.0 + x0r).abs()),
            (ProblemSpec::logistic(alpha, x0l, 1.0).unwrap(), 1.0),
            (ProblemSpec::cubic(alpha, x0c, 1.0, 1.0).unwrap(), x0c),
        ];
        for (spec, b) in cases {
            let sol = SpectralSolution::new(&spec).unwrap();
            let bound = sol.ratio().abs().powi(sol.terms() as i32) * b;
            let gap = (sol.eval(0.0).unwrap() - spec.x0).abs();
            prop_assert!(gap <= bound + 8.0 * f64::EPSILON * (1.0 + spec.x0), "{:?}: {} > {}", spec, gap, bound);
        }
    }

    #[test]
    fn mittag_leffler_positive_and_decreasing(alpha in 0.05f64..=1.0, x in 0.0f64..200.0, dx in 1e-3f64..10.0) {
        let ml = MittagLeffler::with_alpha(alpha).unwrap();
        let a = ml.value(-x).unwrap();
        let b = ml.value(-(x + dx)).unwrap();
        prop_assert!(a > 0.0 && b > 0.0);
        prop_assert!(b <= a * (1.0 + 1e-12), "E({}) = {} < E({}) = {}", -x, a, -(x + dx), b);
    }

    #[test]
    fn solutions_stay_between_start_and_limit(alpha in 0.2f64..=1.0, x0 in 0.0f64..1.0, t in 1e-4f64..1e3) {
        let x = SpectralSolution::new(&ProblemSpec::riccati(alpha, x0).unwrap()).unwrap().eval(t).unwrap();
        prop_assert!(x >= x0 - 1e-12 && x <= 1.0 + 1e-12, "{}", x);
    }
}
