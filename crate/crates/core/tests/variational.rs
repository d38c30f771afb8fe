mod common;

use common::{polynomial_roots, reference, reference_alpha};
use quadpencil_core::random::{random_pencil, RandomPencilSpec};
use quadpencil_core::variational::{
    bracket_eigenvalues, example_two_by_two, generic_engine_fixture_2x2, inertia, locate_real_eigenvalues, verify_minmax,
    MinMaxOptions, Reflected, RootCase,
};
use quadpencil_core::{AlphaSearch, IntervalDelta, LinearizedSystem, QuadraticPencil};

#[test]
fn reference_eigenvalue_and_interval_rules() {
    let p = reference();
    let r = locate_real_eigenvalues(&p, &IntervalDelta::new(-2.14, reference_alpha()).unwrap(), 1e-12).unwrap();
    assert_eq!(r.n_found, 1);
    assert!((r.eigenvalues[0] - (-3.0 + 7f64.sqrt())).abs() <= 1e-8);
    assert_eq!(r.kappa, 0);
    assert!(IntervalDelta::new(-5.64, reference_alpha()).is_err());
    assert!(IntervalDelta::new(0.0, reference_alpha()).is_err());
}

#[test]
fn agrees_with_linearization_on_random_pencils() {
    let mut checked = 0;
    for dim in 1..=8 {
        for seed in 0..12 {
            let p = random_pencil(&RandomPencilSpec { dim, seed: 1000 + seed, damping_scale: 1.0 }).unwrap();
            let alpha = p.compute_alpha(&AlphaSearch::default(), seed);
            let interval = IntervalDelta::from_alpha(&p, &alpha);
            let r = locate_real_eigenvalues(&p, &interval, 1e-11).unwrap();
            let s = LinearizedSystem::new(&p).full_spectrum().unwrap();
            let tol = 1e-7 * s.norm.max(1.0);
            let real = s.real_eigenvalues_in(interval.lower() - 1e-6, 0.0);
            if real.iter().any(|&v| (v - interval.lower()).abs() < 1e-6) {
                continue;
            }
            let mut expected = s.real_eigenvalues_in(interval.lower(), 0.0);
            expected.sort_by(|a, b| b.total_cmp(a));
            assert_eq!(r.n_found, expected.len(), "dim {dim} seed {seed}: {:?} vs {expected:?}", r.eigenvalues);
            for (a, b) in r.eigenvalues.iter().zip(&expected) {
                assert!((a - b).abs() <= tol, "dim {dim} seed {seed}: {a} vs {b}");
            }
            for d in &r.per_eigenvalue {
                assert!(d.semisimple);
                assert!(d.derivative > 0.0);
                assert!(d.residual <= 1e-10 * p.scale_at(d.value));
            }
            checked += 1;
        }
    }
    assert!(checked >= 80, "{checked}");
}

#[test]
fn counting_function_is_non_increasing() {
    for seed in 0..10 {
        let p = random_pencil(&RandomPencilSpec { dim: 6, seed, damping_scale: 2.0 }).unwrap();
        let alpha = p.compute_alpha(&AlphaSearch::default(), seed).value;
        let lower = alpha + 1e-6 * alpha.abs();
        let mut last = usize::MAX;
        for k in 0..=400 {
            let lambda = lower * (1.0 - k as f64 / 400.0);
            let nu = inertia(&p, lambda).strictly_negative;
            assert!(nu <= last, "seed {seed}: ν rose at {lambda}");
            last = nu;
        }
    }
}

#[test]
fn minmax_holds_on_random_pencils() {
    for seed in 0..4 {
        let p = random_pencil(&RandomPencilSpec { dim: 4, seed: 50 + seed, damping_scale: 3.0 }).unwrap();
        let alpha = p.compute_alpha(&AlphaSearch::default(), seed);
        let interval = IntervalDelta::from_alpha(&p, &alpha);
        let r = locate_real_eigenvalues(&p, &interval, 1e-11).unwrap();
        let report = verify_minmax(&p, &r, &MinMaxOptions { random_subspaces: 40, seed, ..MinMaxOptions::default() });
        assert!(report.passed, "seed {seed}: {report:?}");
    }
}

#[test]
fn double_eigenvalues_are_semisimple_and_counted_twice() {
    let p = QuadraticPencil::from_diagonals(&[2.0, 2.0, 8.0], &[6.0, 6.0, 2.0]).unwrap();
    let alpha = p.compute_alpha(&AlphaSearch::default(), 0);
    let r = locate_real_eigenvalues(&p, &IntervalDelta::from_alpha(&p, &alpha), 1e-12).unwrap();
    assert_eq!(r.n_found, 2);
    assert_eq!(r.per_eigenvalue.len(), 1);
    assert_eq!(r.per_eigenvalue[0].multiplicity, 2);
    assert!(r.per_eigenvalue[0].semisimple);
    assert!((r.eigenvalues[0] - (-3.0 + 7f64.sqrt())).abs() <= 1e-10);
}

#[test]
fn two_by_two_family_against_quartic_roots() {
    let report = generic_engine_fixture_2x2();
    // det of the displayed family as a quartic in λ
    let quartic = [-3.0, -2.0, 2.0, -2.0, 1.0];
    let mut negative: Vec<f64> = polynomial_roots(&quartic)
        .into_iter()
        .filter(|z| z.im.abs() < 1e-9 && z.re < 0.0)
        .map(|z| z.re)
        .collect();
    negative.sort_by(|a, b| b.total_cmp(a));
    assert_eq!(report.engine_eigenvalues.len(), negative.len());
    for (v, r) in report.engine_eigenvalues.iter().zip(&negative) {
        assert!((r - v).abs() < 1e-9, "{v} vs {r}");
    }
    let x = &report.cases[1];
    assert_eq!(x.case, RootCase::NoRealZeros);
    assert!(report.two_positive_example.matches);
    assert_eq!(report.sign_equivalence_failures, 0);
}

#[test]
fn reflected_engine_brackets_every_negative_root() {
    let family = example_two_by_two();
    let brackets = bracket_eigenvalues(&Reflected(&family), 1e-3, 10.0, 1e-10).unwrap();
    let total: usize = brackets.iter().map(|b| b.count).sum();
    assert_eq!(total, 1);
    let root = -0.5 * (brackets[0].lower + brackets[0].upper);
    let det = root.powi(4) - 2.0 * root.powi(3) + 2.0 * root * root - 2.0 * root - 3.0;
    assert!(det.abs() < 1e-8);
}
