//! One function per subcommand. Each returns the serialized output and
//! whether every checked property held.

use nalgebra::DVector;
use quadpencil_core::beam::{beam_closed_form, verify_beam_theorem, BeamReport};
use quadpencil_core::evolution::{simulate, SimulationTrace};
use quadpencil_core::interlacing::{compare_eigenvalues_with_alphas, p_plus_monotonicity, shared_lower, ComparisonReport, MonotonicityReport};
use quadpencil_core::linearization::{check_pencil_equivalence, resolvent_region_check, EquivalenceReport, ResolventReport};
use quadpencil_core::variational::{locate_real_eigenvalues, verify_minmax, EigenvalueDiagnostics, MinMaxOptions, MinMaxReport};
use quadpencil_core::{AlphaSearch, Complex64, DstarCertificate, IntervalDelta, LinearizedSystem, PencilError, QuadraticPencil};
use serde::Serialize;

use crate::config::{ProblemConfig, Source, SCHEMA_VERSION};
use crate::error::CliError;

pub struct Outcome {
    pub text: String,
    pub passed: bool,
    pub summary: String,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Cx {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for Cx {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

/// Largest distance in a greedy nearest matching, each pair measured
/// relative to `max(1, |b|)`.
fn relative_matching_error(a: &[Complex64], b: &[Complex64]) -> f64 {
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for x in a {
        let best = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (x - y).norm() / y.norm().max(1.0)))
            .min_by(|p, q| p.1.total_cmp(&q.1));
        match best {
            Some((j, d)) => {
                used[j] = true;
                worst = worst.max(d);
            }
            None => return f64::INFINITY,
        }
    }
    worst
}

#[derive(Serialize)]
struct ClusterOut {
    value: Cx,
    algebraic: usize,
    geometric: usize,
    residual: f64,
}

#[derive(Serialize)]
struct StructureOut {
    norm: f64,
    j_symmetry_defect: f64,
    inverse_identity_defect: f64,
    conjugate_pairing_defect: f64,
    spectral_abscissa: f64,
    min_modulus: f64,
    ok: bool,
}

#[derive(Serialize)]
struct ClosedFormOut {
    max_relative_deviation: f64,
    tol: f64,
    ok: bool,
}

#[derive(Serialize)]
struct SpectrumOutput {
    schema: u32,
    command: &'static str,
    dim: usize,
    eigenvalues: Vec<Cx>,
    residuals: Vec<f64>,
    clusters: Vec<ClusterOut>,
    structure: StructureOut,
    equivalence: EquivalenceReport,
    resolvent: Option<ResolventReport>,
    closed_form: Option<ClosedFormOut>,
    passed: bool,
}

pub fn spectrum(cfg: &ProblemConfig) -> Result<Outcome, CliError> {
    let pencil = cfg.pencil()?;
    let system = LinearizedSystem::new(&pencil);
    let s = system.full_spectrum()?;
    let norm = s.norm;
    let structure = StructureOut {
        norm,
        j_symmetry_defect: system.j_symmetry_defect(),
        inverse_identity_defect: system.inverse_identity_defect()?,
        conjugate_pairing_defect: s.conjugate_pairing_defect(),
        spectral_abscissa: s.max_real_part(),
        min_modulus: s.min_modulus(),
        ok: false,
    };
    let structure = StructureOut {
        ok: structure.j_symmetry_defect <= 1e-12 * norm
            && structure.inverse_identity_defect <= 1e-10
            && structure.conjugate_pairing_defect <= cfg.tolerances.verify * norm.max(1.0)
            && structure.spectral_abscissa <= 1e-12 * norm
            && structure.min_modulus > 0.0,
        ..structure
    };
    let equivalence = check_pencil_equivalence(&pencil, &s);
    let resolvent = if pencil.damping().is_zero() { None } else { Some(resolvent_region_check(&pencil, &s)?) };
    let closed_form = match (&cfg.source, &cfg.beam) {
        (Source::Beam, Some(beam)) if beam.damping.is_constant().is_some() => {
            let exact = beam_closed_form(beam)?;
            let err = relative_matching_error(&s.eigenvalues, &exact);
            Some(ClosedFormOut { max_relative_deviation: err, tol: cfg.tolerances.eigen, ok: err <= cfg.tolerances.eigen })
        }
        _ => None,
    };
    let passed = structure.ok
        && equivalence.passed
        && resolvent.as_ref().map_or(true, |r| r.passed)
        && closed_form.as_ref().map_or(true, |c| c.ok);
    let summary = format!("spectrum: {} eigenvalues, abscissa {:.6e}", s.eigenvalues.len(), structure.spectral_abscissa);
    let out = SpectrumOutput {
        schema: SCHEMA_VERSION,
        command: "spectrum",
        dim: pencil.dim(),
        eigenvalues: s.eigenvalues.iter().copied().map(Cx::from).collect(),
        residuals: s.residuals.clone(),
        clusters: s
            .clusters
            .iter()
            .map(|c| ClusterOut { value: c.value.into(), algebraic: c.algebraic, geometric: c.geometric, residual: c.residual })
            .collect(),
        structure,
        equivalence,
        resolvent,
        closed_form,
        passed,
    };
    Ok(Outcome { text: to_json(&out), passed, summary })
}

#[derive(Serialize)]
struct AlphaOut {
    /// `null` when 𝒟* is empty (α = −∞).
    value: f64,
    estimate: bool,
    certificate: DstarCertificate,
    witness: Option<Vec<f64>>,
}

#[derive(Serialize)]
struct AgreementOut {
    linearization_eigenvalues: Vec<f64>,
    max_deviation: f64,
    tol: f64,
    ok: bool,
}

#[derive(Serialize)]
struct SemisimplicityOut {
    lambda: f64,
    kernel_dim: usize,
    kernel_dim_squared: usize,
    semisimple: bool,
    in_open_interval: bool,
}

#[derive(Serialize)]
struct VariationalOutput {
    schema: u32,
    command: &'static str,
    dim: usize,
    alpha: AlphaOut,
    delta: IntervalDelta,
    kappa: usize,
    n_found: usize,
    eigenvalues: Vec<f64>,
    table: Vec<EigenvalueDiagnostics>,
    linearization: AgreementOut,
    semisimplicity: Vec<SemisimplicityOut>,
    minmax: MinMaxReport,
    passed: bool,
}

pub fn variational(cfg: &ProblemConfig, delta_lower: Option<f64>) -> Result<Outcome, CliError> {
    let pencil = cfg.pencil()?;
    let alpha = pencil.compute_alpha(&AlphaSearch::default(), cfg.seed);
    let interval = match delta_lower {
        Some(lower) => IntervalDelta::new(lower, alpha.value)?,
        None => IntervalDelta::from_alpha(&pencil, &alpha),
    };
    let bracket_tol = (0.01 * cfg.tolerances.eigen * interval.lower().abs().max(1.0)).max(1e-13);
    let result = locate_real_eigenvalues(&pencil, &interval, bracket_tol)?;

    let system = LinearizedSystem::new(&pencil);
    let s = system.full_spectrum()?;
    let expected = s.real_eigenvalues_in(interval.lower(), interval.upper());
    let max_deviation = if expected.len() == result.eigenvalues.len() {
        expected.iter().zip(&result.eigenvalues).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    let agreement_tol = cfg.tolerances.verify * s.norm.max(1.0);
    let linearization = AgreementOut {
        linearization_eigenvalues: expected,
        max_deviation,
        tol: agreement_tol,
        ok: max_deviation <= agreement_tol,
    };

    // coarser clustering so that a defective root split by rounding is seen as one
    let coarse = system.full_spectrum_with_tolerance(1e-6 * s.norm.max(1.0))?;
    let reach = interval.alpha_estimate().max(interval.lower() - 1e-6 * interval.lower().abs().max(1.0));
    let reach = if reach.is_finite() { reach - 1e-6 * reach.abs().max(1.0) } else { interval.lower() };
    let mut semisimplicity: Vec<SemisimplicityOut> = coarse
        .clusters
        .iter()
        .filter(|c| c.is_real() && c.value.re >= reach && c.value.re <= 0.0)
        .map(|c| {
            let lambda = c.value.re;
            let (k1, k2) = system.kernel_dims(lambda, quadpencil_core::linearization::RANK_TOL);
            SemisimplicityOut {
                lambda,
                kernel_dim: k1,
                kernel_dim_squared: k2,
                semisimple: k1 == k2,
                in_open_interval: lambda > interval.lower() && lambda < 0.0,
            }
        })
        .collect();
    semisimplicity.sort_by(|a, b| b.lambda.total_cmp(&a.lambda));

    let minmax = verify_minmax(&pencil, &result, &MinMaxOptions { seed: cfg.seed, ..MinMaxOptions::default() });
    let passed = minmax.passed
        && linearization.ok
        && semisimplicity.iter().filter(|e| e.in_open_interval).all(|e| e.semisimple)
        && result.per_eigenvalue.iter().all(|d| d.semisimple && d.derivative > 0.0);
    let summary = format!(
        "variational: {} eigenvalue(s) in ({:.6e}, 0], alpha {:.6e}",
        result.n_found,
        interval.lower(),
        alpha.value
    );
    let out = VariationalOutput {
        schema: SCHEMA_VERSION,
        command: "variational",
        dim: pencil.dim(),
        alpha: AlphaOut {
            value: alpha.value,
            estimate: alpha.estimate,
            certificate: alpha.certificate.clone(),
            witness: alpha.witness.as_ref().map(|w| w.iter().copied().collect()),
        },
        delta: interval,
        kappa: result.kappa,
        n_found: result.n_found,
        eigenvalues: result.eigenvalues.clone(),
        table: result.per_eigenvalue.clone(),
        linearization,
        semisimplicity,
        minmax,
        passed,
    };
    Ok(Outcome { text: to_json(&out), passed, summary })
}

#[derive(Serialize)]
struct InterlaceOutput {
    schema: u32,
    command: &'static str,
    alpha: f64,
    alpha_hat: f64,
    report: ComparisonReport,
    monotonicity: Option<MonotonicityReport>,
    passed: bool,
}

fn beam_lower(cfg: &ProblemConfig) -> Option<f64> {
    cfg.beam.as_ref().and_then(quadpencil_core::beam::beam_bounds).map(|b| b.interval_lower)
}

pub fn interlace(cfg: &ProblemConfig, cfg_hat: &ProblemConfig) -> Result<Outcome, CliError> {
    let p = cfg.pencil()?;
    let p_hat = cfg_hat.pencil()?;
    if p.dim() != p_hat.dim() {
        return Err(CliError::Input(format!("dimensions differ: {} and {}", p.dim(), p_hat.dim())));
    }
    let (mut lower, alpha, alpha_hat) = shared_lower(&p, &p_hat, &AlphaSearch::default(), cfg.seed);
    for b in [beam_lower(cfg), beam_lower(cfg_hat)].into_iter().flatten() {
        lower = lower.max(b);
    }
    let tol = cfg.tolerances.verify;
    let (report, monotonicity) = match compare_eigenvalues_with_alphas(&p, &p_hat, lower, (alpha, alpha_hat), tol) {
        Ok(r) => (r, Some(p_plus_monotonicity(&p, &p_hat, 2000, cfg.seed)?)),
        Err(PencilError::InvalidArgument(msg)) if msg.starts_with("pencils are not ordered") => (ComparisonReport::order_violated(), None),
        Err(e) => return Err(e.into()),
    };
    let passed = report.passed && monotonicity.as_ref().map_or(true, |m| m.violations == 0);
    let summary = if report.form_order_ok {
        format!("interlace: N = {}, N_hat = {}, lower {:.6e}", report.n, report.n_hat, report.lower)
    } else {
        "interlace: forms are not ordered (need A0 >= A0_hat and D <= D_hat)".to_string()
    };
    let out = InterlaceOutput { schema: SCHEMA_VERSION, command: "interlace", alpha, alpha_hat, report, monotonicity, passed };
    Ok(Outcome { text: to_json(&out), passed, summary })
}

#[derive(Serialize)]
struct TraceRow {
    time: f64,
    energy: f64,
    dissipation: f64,
}

fn trace_csv(trace: &SimulationTrace) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for ((&time, &energy), &dissipation) in trace.times.iter().zip(&trace.energies).zip(&trace.dissipation) {
        w.serialize(TraceRow { time, energy, dissipation }).map_err(|e| CliError::Numerical(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Numerical(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Relative per-step energy increase allowed before the run counts as a violation.
pub const MONOTONE_TOL: f64 = 1e-10;

pub fn simulate_trace(cfg: &ProblemConfig, t_final: f64, dt: f64) -> Result<Outcome, CliError> {
    let pencil: QuadraticPencil = cfg.pencil()?;
    let (z0, w0): (DVector<f64>, DVector<f64>) = cfg.initial_state(pencil.dim())?;
    let trace = simulate(&pencil, &z0, &w0, t_final, dt)?;
    let passed = trace.is_monotone(MONOTONE_TOL);
    let summary = format!(
        "simulate: {} steps, E(T)/E(0) = {:.6e}, max step increase {:.3e}, identity defect {:.3e}",
        trace.times.len() - 1,
        trace.energies.last().expect("initial record") / trace.energies[0],
        trace.max_energy_increase(),
        trace.energy_identity_defect()
    );
    Ok(Outcome { text: trace_csv(&trace)?, passed, summary })
}

#[derive(Serialize)]
struct BeamOutput {
    schema: u32,
    command: &'static str,
    report: BeamReport,
    passed: bool,
}

pub fn beam_report(cfg: &ProblemConfig) -> Result<Outcome, CliError> {
    let beam = match (&cfg.source, &cfg.beam) {
        (Source::Beam, Some(b)) => b,
        _ => return Err(CliError::Input("beam-report needs a beam source".into())),
    };
    let report = verify_beam_theorem(beam, cfg.tolerances.eigen)?;
    let passed = report.passed;
    let summary = format!(
        "beam-report: {} eigenvalue(s) in ({:.6e}, 0], N_min = {}",
        report.n_found, report.bounds.interval_lower, report.bounds.n_min_count
    );
    Ok(Outcome { text: to_json(&BeamOutput { schema: SCHEMA_VERSION, command: "beam-report", report, passed }), passed, summary })
}
