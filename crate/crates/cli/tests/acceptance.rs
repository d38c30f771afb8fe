//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use nalgebra::DVector;
use quadpencil_core::beam::{beam_bounds, discretize_beam, BeamConfig, DampingProfile};
use quadpencil_core::evolution::{simulate, spectral_abscissa_consistency, SLOPE_TOL};
use quadpencil_core::interlacing::{compare_eigenvalues_with_alphas, shared_lower};
use quadpencil_core::linalg;
use quadpencil_core::linearization::{resolvent_region_check, RANK_TOL};
use quadpencil_core::random::{random_ordered_pair, random_pencil, RandomPencilSpec};
use quadpencil_core::variational::{generic_engine_fixture_2x2, locate_real_eigenvalues, verify_minmax, MinMaxOptions, RootCase};
use quadpencil_core::{AlphaSearch, DstarCertificate, IntervalDelta, LinearizedSystem, QuadraticPencil};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEEDED_PENCILS: u64 = 50;

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: String) -> Verdict {
    Verdict { passed, detail }
}

fn seeded_pencil(seed: u64) -> QuadraticPencil {
    let spec = RandomPencilSpec { dim: 1 + (seed as usize % 6), seed, damping_scale: 1.0 + (seed % 3) as f64 };
    random_pencil(&spec).expect("seeded pencil")
}

fn beam(damping: DampingProfile, modes: usize) -> BeamConfig {
    BeamConfig::new(1.0, damping, modes)
}

fn beam_interval(cfg: &BeamConfig) -> IntervalDelta {
    let lower = beam_bounds(cfg).expect("d_min^2 >= 4 a0").interval_lower;
    IntervalDelta::new(lower, lower).expect("valid interval")
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let cfg = beam(DampingProfile::Constant { value: 4.0 }, 12);
    let p = discretize_beam(&cfg).unwrap();
    let interval = beam_interval(&cfg);
    let r = locate_real_eigenvalues(&p, &interval, 1e-11 * interval.lower().abs()).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let exact: Vec<f64> = (1..=2).map(|n| (-2.0 + 3f64.sqrt()) * (n as f64 * PI).powi(2)).collect();
    let err = if r.n_found == 2 {
        r.eigenvalues.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    let n_min = beam_bounds(&cfg).unwrap().n_min_count;
    verdict(
        err <= 1e-8 && n_min == 2 && elapsed < 5.0,
        format!("N = {}, max |λ_n − exact| = {err:.2e}, N_min = {n_min}, {elapsed:.2} s", r.n_found),
    )
}

fn criterion_2() -> Verdict {
    let profile = DampingProfile::SineBump { base: 4.0, amplitude: 1.0 };
    let cfg = beam(profile.clone(), 12);
    let bounds = beam_bounds(&cfg).unwrap();
    let interval = beam_interval(&cfg);
    let tol = 1e-11 * interval.lower().abs();
    let coarse = locate_real_eigenvalues(&discretize_beam(&cfg).unwrap(), &interval, tol).unwrap();
    let fine = locate_real_eigenvalues(&discretize_beam(&beam(profile, 24)).unwrap(), &interval, tol).unwrap();
    let mut in_bounds = coarse.n_found >= 1;
    for (i, &lambda) in coarse.eigenvalues.iter().enumerate() {
        let upper = bounds.upper_n[i];
        let lower = bounds.lower_n.get(i).copied().unwrap_or(f64::NEG_INFINITY);
        in_bounds &= lambda <= upper + 1e-7 && lambda >= lower - 1e-7;
    }
    let same_count = coarse.n_found == fine.n_found;
    let drift = coarse
        .eigenvalues
        .iter()
        .zip(&fine.eigenvalues)
        .map(|(a, b)| (a - b).abs() / b.abs())
        .fold(0.0, f64::max);
    verdict(
        in_bounds && same_count && drift < 1e-6,
        format!("N = {} (24 modes: {}), bounds hold: {in_bounds}, max relative drift {drift:.2e}", coarse.n_found, fine.n_found),
    )
}

fn criterion_3() -> Verdict {
    let mut worst_dev = 0.0f64;
    let mut count_mismatch = 0;
    let mut minmax_failures = 0;
    let mut eigenvalues = 0;
    let mut checked = 0;
    for seed in 0..SEEDED_PENCILS {
        let p = seeded_pencil(seed);
        if !matches!(p.dstar_empty_certificate(), DstarCertificate::NonemptyCertified { .. }) {
            continue;
        }
        checked += 1;
        let alpha = p.compute_alpha(&AlphaSearch::default(), seed);
        let interval = IntervalDelta::from_alpha(&p, &alpha);
        let r = locate_real_eigenvalues(&p, &interval, 1e-11).unwrap();
        let s = LinearizedSystem::new(&p).full_spectrum().unwrap();
        let expected = s.real_eigenvalues_in(interval.lower(), 0.0);
        if expected.len() != r.n_found {
            count_mismatch += 1;
        } else {
            for (a, b) in expected.iter().zip(&r.eigenvalues) {
                worst_dev = worst_dev.max((a - b).abs());
            }
        }
        eigenvalues += r.n_found;
        let report = verify_minmax(&p, &r, &MinMaxOptions { random_subspaces: 200, seed, tol: 1e-6, random_starts: 1 });
        if !report.passed {
            minmax_failures += 1;
        }
    }
    verdict(
        checked == SEEDED_PENCILS && count_mismatch == 0 && worst_dev <= 1e-7 && minmax_failures == 0,
        format!(
            "{checked} pencils, {eigenvalues} eigenvalues, count mismatches {count_mismatch}, max deviation {worst_dev:.2e}, min-max failures {minmax_failures}"
        ),
    )
}

fn structure_ok(p: &QuadraticPencil) -> (bool, String) {
    let sys = LinearizedSystem::new(p);
    let norm = sys.norm();
    let j = sys.j_symmetry_defect();
    let inv = sys.inverse_identity_defect().unwrap();
    let s = sys.full_spectrum().unwrap();
    let ok = j <= 1e-12 * norm
        && inv <= 1e-10
        && s.max_real_part() <= 1e-12 * norm
        && s.conjugate_pairing_defect() <= 1e-8 * norm
        && s.min_modulus() > 0.0;
    (ok, format!("J-defect {:.1e}·‖𝒜‖, inverse defect {inv:.1e}", j / norm))
}

fn criterion_4() -> Verdict {
    let mut failures = Vec::new();
    let mut pencils: Vec<QuadraticPencil> = (0..SEEDED_PENCILS).map(seeded_pencil).collect();
    pencils.push(discretize_beam(&beam(DampingProfile::Constant { value: 4.0 }, 12)).unwrap());
    pencils.push(discretize_beam(&beam(DampingProfile::SineBump { base: 4.0, amplitude: 1.0 }, 12)).unwrap());
    for (i, p) in pencils.iter().enumerate() {
        let (ok, detail) = structure_ok(p);
        if !ok {
            failures.push(format!("#{i}: {detail}"));
        }
    }
    verdict(failures.is_empty(), format!("{} pencils, failures {:?}", pencils.len(), failures))
}

fn criterion_5() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut residual_worst = 0.0f64;
    let mut scale_failures = 0;
    let mut lemma_points = 0;
    let mut lemma_failures = 0;
    let mut sign_pairs = 0;
    let mut sign_failures = 0;
    let per_pencil = 200;
    for seed in 0..SEEDED_PENCILS {
        let p = seeded_pencil(seed);
        let n = p.dim();
        let (_, gamma) = p.delta_gamma();
        let alpha = p.compute_alpha(&AlphaSearch::default(), seed).value;
        let (_, vecs) = linalg::sym_eigen(p.whitened_damping());
        let top = (p.a0_inv_sqrt() * vecs.column(n - 1)).normalize();
        let mut found = 0;
        let mut attempts = 0;
        while found < per_pencil && attempts < 100 * per_pencil {
            attempts += 1;
            let x = &top + rng.random::<f64>() * linalg::random_vector(n, &mut rng);
            let pair = p.rayleigh_pair(&x).unwrap();
            if !pair.in_dstar {
                continue;
            }
            found += 1;
            lemma_points += 1;
            for root in [pair.p_minus, pair.p_plus] {
                let scale = x.norm_squared() * root * root + p.damping().quad_form(&x) * root.abs() + p.stiffness().quad_form(&x);
                residual_worst = residual_worst.max(p.form(root, &x).abs() / scale);
                if !(root < -1.0 / gamma) {
                    lemma_failures += 1;
                }
            }
        }
        for k in 0..per_pencil {
            let x = if k % 2 == 0 {
                &top + 0.5 * rng.random::<f64>() * linalg::random_vector(n, &mut rng)
            } else {
                linalg::random_vector(n, &mut rng)
            };
            let pair = p.rayleigh_pair(&x).unwrap();
            let power = rng.random_range(-30..30);
            if p.rayleigh_pair(&(&x * 2f64.powi(power))).unwrap() != pair || p.rayleigh_pair(&(-&x)).unwrap() != pair {
                scale_failures += 1;
            }
            // sign equivalences at a random λ in (α_est, 0]
            let lambda = alpha * (1.0 - rng.random::<f64>());
            let value = p.form(lambda, &x);
            let scale = x.norm_squared() * lambda * lambda + p.damping().quad_form(&x) * lambda.abs() + p.stiffness().quad_form(&x);
            sign_pairs += 1;
            let ok = if value.abs() <= 1e-12 * scale {
                (pair.p_plus - lambda).abs() <= 1e-6 * lambda.abs().max(1.0)
            } else if value > 0.0 {
                pair.p_plus < lambda
            } else {
                pair.p_plus > lambda
            };
            if !ok {
                sign_failures += 1;
            }
        }
    }
    let passed = residual_worst <= 1e-10
        && scale_failures == 0
        && lemma_points >= 10_000
        && lemma_failures == 0
        && sign_pairs >= 10_000
        && sign_failures == 0;
    verdict(
        passed,
        format!(
            "residual {residual_worst:.1e}·scale, scale failures {scale_failures}, p₊ bound on {lemma_points} points ({lemma_failures} failures), sign checks {sign_pairs} ({sign_failures} failures)"
        ),
    )
}

fn criterion_6() -> Verdict {
    let mut pencils: Vec<QuadraticPencil> = (0..SEEDED_PENCILS).map(seeded_pencil).collect();
    pencils.push(discretize_beam(&beam(DampingProfile::Constant { value: 4.0 }, 12)).unwrap());
    pencils.push(discretize_beam(&beam(DampingProfile::SineBump { base: 4.0, amplitude: 1.0 }, 12)).unwrap());
    let mut violations = 0;
    let mut excused = 0;
    for p in &pencils {
        let s = LinearizedSystem::new(p).full_spectrum().unwrap();
        let r = resolvent_region_check(p, &s).unwrap();
        violations += r.violations.len();
        excused += r.excused.len();
    }
    verdict(violations == 0, format!("{} pencils, {violations} eigenvalues in the excluded regions, {excused} at exceptional points", pencils.len()))
}

fn criterion_7() -> Verdict {
    let mut failures = 0;
    let mut compared = 0;
    for seed in 0..SEEDED_PENCILS {
        let spec = RandomPencilSpec { dim: 1 + (seed as usize % 6), seed: 500 + seed, damping_scale: 1.5 };
        let (p, q) = random_ordered_pair(&spec, 0.2).unwrap();
        let (lower, a, a_hat) = shared_lower(&p, &q, &AlphaSearch::default(), seed);
        match compare_eigenvalues_with_alphas(&p, &q, lower, (a, a_hat), 1e-7) {
            Ok(r) if r.passed => compared += r.n_common,
            _ => failures += 1,
        }
    }
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let status = Command::new(env!("CARGO_BIN_EXE_quadpencil"))
        .env_remove("QUADPENCIL_SEED")
        .arg("interlace")
        .arg(fixtures.join("order_violated_a.json"))
        .arg(fixtures.join("order_violated_b.json"))
        .output()
        .expect("binary runs")
        .status
        .code();
    verdict(
        failures == 0 && status == Some(1),
        format!("{SEEDED_PENCILS} pairs, {compared} eigenvalue pairs, {failures} failures, violation fixture exit {status:?}"),
    )
}

fn criterion_8() -> Verdict {
    let mut interior = 0;
    let mut defective = 0;
    for seed in 0..SEEDED_PENCILS {
        let p = seeded_pencil(seed);
        let alpha = p.compute_alpha(&AlphaSearch::default(), seed);
        let interval = IntervalDelta::from_alpha(&p, &alpha);
        let r = locate_real_eigenvalues(&p, &interval, 1e-11).unwrap();
        let sys = LinearizedSystem::new(&p);
        for d in r.per_eigenvalue.iter().filter(|d| d.value < 0.0) {
            interior += 1;
            let (k1, k2) = sys.kernel_dims(d.value, RANK_TOL);
            if k1 != k2 || !d.semisimple {
                defective += 1;
            }
        }
    }
    let critical = QuadraticPencil::from_diagonals(&[1.0], &[2.0]).unwrap();
    let sys = LinearizedSystem::new(&critical);
    let s = sys.full_spectrum_with_tolerance(1e-6 * sys.norm()).unwrap();
    let root = s.clusters.iter().find(|c| c.is_real()).map(|c| c.value.re).unwrap_or(f64::NAN);
    let (k1, k2) = sys.kernel_dims(root, RANK_TOL);
    let alpha = critical.compute_alpha(&AlphaSearch::default(), 0).value;
    let at_boundary = (root - alpha).abs() <= 1e-6;
    verdict(
        interior > 0 && defective == 0 && k1 != k2 && at_boundary,
        format!(
            "{interior} interior eigenvalues, {defective} defective; critical 1×1 root {root:.6} (α {alpha:.6}) kernel dims ({k1}, {k2})"
        ),
    )
}

fn criterion_9() -> Verdict {
    let mut worst_increase = f64::NEG_INFINITY;
    for seed in 0..10 {
        let p = seeded_pencil(seed);
        let n = p.dim();
        let z0 = DVector::from_fn(n, |i, _| (i as f64 + 1.0).sin());
        let w0 = DVector::from_fn(n, |i, _| (i as f64 + 0.5).cos());
        let tr = simulate(&p, &z0, &w0, 5.0, 1e-3).unwrap();
        worst_increase = worst_increase.max(tr.max_energy_increase());
    }
    let undamped = QuadraticPencil::from_diagonals(&[2.0, 8.0, 3.0], &[0.0; 3]).unwrap();
    let tr = simulate(&undamped, &DVector::from_vec(vec![1.0, -0.5, 0.2]), &DVector::from_vec(vec![0.1, 0.4, -0.3]), 10.0, 1e-3).unwrap();
    let e0 = tr.energies[0];
    let drift = tr.energies.iter().map(|e| (e - e0).abs() / e0).fold(0.0, f64::max);
    let steps = tr.energies.len() - 1;

    let reference = QuadraticPencil::from_diagonals(&[2.0, 8.0], &[6.0, 2.0]).unwrap();
    let e1 = DVector::from_vec(vec![1.0, 0.0]);
    let tr_ref = simulate(&reference, &e1, &DVector::zeros(2), 30.0, 1e-3).unwrap();
    worst_increase = worst_increase.max(tr_ref.max_energy_increase());
    let slope_ref = spectral_abscissa_consistency(&reference, &tr_ref).unwrap();

    let beam_pencil = discretize_beam(&beam(DampingProfile::Constant { value: 4.0 }, 12)).unwrap();
    let mut z0 = DVector::zeros(12);
    z0[0] = 1.0;
    let tr_beam = simulate(&beam_pencil, &z0, &DVector::zeros(12), 4.0, 1e-3).unwrap();
    worst_increase = worst_increase.max(tr_beam.max_energy_increase());
    let slope_beam = spectral_abscissa_consistency(&beam_pencil, &tr_beam).unwrap();

    verdict(
        worst_increase <= 1e-10 && drift <= 1e-12 && steps >= 10_000 && slope_ref.passed && slope_beam.passed,
        format!(
            "max step increase {worst_increase:.1e}·E(0), undamped drift {drift:.1e} over {steps} steps, relative slope error {:.1e} / {:.1e} (limit {SLOPE_TOL})",
            slope_ref.relative_error,
            slope_beam.relative_error
        ),
    )
}

fn case_name(c: RootCase) -> &'static str {
    match c {
        RootCase::OneNegative => "one negative root",
        RootCase::TwoPositive => "two positive roots",
        RootCase::NoRealZeros => "no real roots",
        RootCase::Other => "other",
    }
}

fn criterion_10() -> Verdict {
    let report = generic_engine_fixture_2x2();
    let classical_ok = report.classical.iter().all(|c| (c.rayleigh_quotient - c.functional_root).abs() <= 1e-14)
        && report.classical_engine_eigenvalues.len() == 2
        && [1.0, 2.0].iter().all(|v| report.classical_engine_eigenvalues.iter().any(|e| (e - v).abs() <= 1e-10));
    let cases: Vec<String> = report
        .cases
        .iter()
        .map(|c| {
            format!(
                "({}, {}): {} [{}]",
                c.x[0],
                c.x[1],
                case_name(c.case),
                if c.matches { "as expected" } else { "expected: two positive roots" }
            )
        })
        .collect();
    verdict(
        classical_ok && report.classification_ok && report.sign_equivalence_failures == 0,
        format!("classical A − λI ok: {classical_ok}; 2×2 family {}", cases.join(", ")),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 10] = [
        ("beam closed form", criterion_1),
        ("beam bounds and truncation", criterion_2),
        ("min-max equality", criterion_3),
        ("structural identities", criterion_4),
        ("Rayleigh functional laws", criterion_5),
        ("resolvent exclusion", criterion_6),
        ("interlacing", criterion_7),
        ("semi-simplicity", criterion_8),
        ("energy decay", criterion_9),
        ("two-by-two fixtures", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = check();
        if !v.passed {
            failed += 1;
        }
        println!(
            "acceptance {:>2} {:<28} {}  {} ({:.1} s)",
            i + 1,
            name,
            if v.passed { "PASS" } else { "FAIL" },
            v.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
