//! Eigenvalue comparison for two pencils ordered by their forms:
//! `𝔞₀ ≥ 𝔞̂₀` and `𝔡 ≤ 𝔡̂` give `λ_n ≤ λ̂_n` on a common interval.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{PencilError, Result};
use crate::linalg;
use crate::pencil::{AlphaSearch, QuadraticPencil, DEFINITENESS_TOL};
use crate::variational::{locate_real_eigenvalues, IntervalDelta, ALPHA_MARGIN};

fn is_psd(m: &DMatrix<f64>, scale: f64) -> bool {
    let values = linalg::sym_eigenvalues(&linalg::symmetrize(m));
    values.iter().all(|&v| v >= -DEFINITENESS_TOL * scale)
}

fn check_dims(p: &QuadraticPencil, p_hat: &QuadraticPencil) -> Result<()> {
    if p.dim() != p_hat.dim() {
        return Err(PencilError::DimensionMismatch { expected: p.dim(), actual: p_hat.dim() });
    }
    Ok(())
}

/// `A₀ − Â₀ ⪰ 0` and `D̂ − D ⪰ 0`.
pub fn check_form_order(p: &QuadraticPencil, p_hat: &QuadraticPencil) -> Result<bool> {
    check_dims(p, p_hat)?;
    let a_scale = p.stiffness().norm().max(p_hat.stiffness().norm());
    let d_scale = p.damping().norm().max(p_hat.damping().norm()).max(f64::MIN_POSITIVE);
    let a_ok = is_psd(&(p.stiffness().matrix() - p_hat.stiffness().matrix()), a_scale);
    let d_ok = is_psd(&(p_hat.damping().matrix() - p.damping().matrix()), d_scale);
    Ok(a_ok && d_ok)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ScalarOrder {
    pub gamma: f64,
    pub gamma_hat: f64,
    pub delta: f64,
    pub delta_hat: f64,
    pub gamma_ok: bool,
    pub delta_ok: bool,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ComparisonEntry {
    pub n: usize,
    pub lambda: f64,
    pub lambda_hat: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub form_order_ok: bool,
    pub scalar_order: Option<ScalarOrder>,
    pub lower: f64,
    pub n: usize,
    pub n_hat: usize,
    pub count_ok: bool,
    pub n_common: usize,
    pub per_n: Vec<ComparisonEntry>,
    pub tol: f64,
    pub passed: bool,
}

impl ComparisonReport {
    /// Report for a pair whose forms are not ordered; nothing else is compared.
    pub fn order_violated() -> Self {
        Self {
            form_order_ok: false,
            scalar_order: None,
            lower: f64::NAN,
            n: 0,
            n_hat: 0,
            count_ok: false,
            n_common: 0,
            per_n: Vec::new(),
            tol: 0.0,
            passed: false,
        }
    }
}

fn scalar_order(p: &QuadraticPencil, p_hat: &QuadraticPencil) -> ScalarOrder {
    let (delta, gamma) = p.delta_gamma();
    let (delta_hat, gamma_hat) = p_hat.delta_gamma();
    let slack = 1e-12 * gamma.max(gamma_hat).max(1.0);
    ScalarOrder {
        gamma,
        gamma_hat,
        delta,
        delta_hat,
        gamma_ok: gamma <= gamma_hat + slack,
        delta_ok: delta <= delta_hat + slack,
    }
}

/// Shared left endpoint `max(α, α̂) + margin` from the two `α` estimates.
pub fn shared_lower(p: &QuadraticPencil, p_hat: &QuadraticPencil, search: &AlphaSearch, seed: u64) -> (f64, f64, f64) {
    let alpha = p.compute_alpha(search, seed).value;
    let alpha_hat = p_hat.compute_alpha(search, seed).value;
    let a = alpha.max(alpha_hat);
    let lower = if a.is_finite() {
        a + ALPHA_MARGIN * a.abs()
    } else {
        -(p.real_eigenvalue_bound().max(p_hat.real_eigenvalue_bound()) + 1.0)
    };
    (lower, alpha, alpha_hat)
}

/// Compares the eigenvalues of both pencils on `(a, 0]`, where `a` must not
/// lie left of either `α` estimate.
pub fn compare_eigenvalues_with_alphas(
    p: &QuadraticPencil,
    p_hat: &QuadraticPencil,
    a: f64,
    alphas: (f64, f64),
    tol: f64,
) -> Result<ComparisonReport> {
    if !check_form_order(p, p_hat)? {
        return Err(PencilError::InvalidArgument("pencils are not ordered: need A0 >= A0_hat and D <= D_hat".into()));
    }
    let interval = IntervalDelta::new(a, alphas.0)?;
    let interval_hat = IntervalDelta::new(a, alphas.1)?;
    let bracket_tol = 1e-10 * a.abs().max(1.0);
    let r = locate_real_eigenvalues(p, &interval, bracket_tol)?;
    let r_hat = locate_real_eigenvalues(p_hat, &interval_hat, bracket_tol)?;
    let per_n: Vec<ComparisonEntry> = r
        .eigenvalues
        .iter()
        .zip(&r_hat.eigenvalues)
        .enumerate()
        .map(|(i, (&lambda, &lambda_hat))| ComparisonEntry { n: i + 1, lambda, lambda_hat, ok: lambda <= lambda_hat + tol })
        .collect();
    let scalar = scalar_order(p, p_hat);
    let count_ok = r.n_found <= r_hat.n_found;
    let passed = count_ok && per_n.iter().all(|e| e.ok) && scalar.gamma_ok && scalar.delta_ok;
    Ok(ComparisonReport {
        form_order_ok: true,
        scalar_order: Some(scalar),
        lower: a,
        n: r.n_found,
        n_hat: r_hat.n_found,
        count_ok,
        n_common: per_n.len(),
        per_n,
        tol,
        passed,
    })
}

/// As [`compare_eigenvalues_with_alphas`], estimating both `α` with the
/// default search.
pub fn compare_eigenvalues(p: &QuadraticPencil, p_hat: &QuadraticPencil, a: f64, tol: f64) -> Result<ComparisonReport> {
    check_dims(p, p_hat)?;
    let search = AlphaSearch::default();
    let alpha = p.compute_alpha(&search, 0).value;
    let alpha_hat = p_hat.compute_alpha(&search, 0).value;
    compare_eigenvalues_with_alphas(p, p_hat, a, (alpha, alpha_hat), tol)
}

#[derive(Debug, Clone, Serialize)]
pub struct MonotonicityReport {
    pub samples: usize,
    pub in_dstar: usize,
    pub violations: usize,
    /// Largest `p₊(x) − p̂₊(x)` seen (non-positive when the order holds).
    pub worst_gap: f64,
}

/// Samples `x` and checks `p₊(x) ≤ p̂₊(x)` wherever `x ∈ 𝒟*` of `p`.
pub fn p_plus_monotonicity(p: &QuadraticPencil, p_hat: &QuadraticPencil, samples: usize, seed: u64) -> Result<MonotonicityReport> {
    check_dims(p, p_hat)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (_, vecs) = linalg::sym_eigen(p.whitened_damping());
    let top = p.a0_inv_sqrt() * vecs.column(p.dim() - 1);
    let mut in_dstar = 0;
    let mut violations = 0;
    let mut worst_gap = f64::NEG_INFINITY;
    for i in 0..samples {
        // bias half the samples towards the strongly damped direction so 𝒟* is hit
        let x = if i % 2 == 0 {
            linalg::random_vector(p.dim(), &mut rng)
        } else {
            &top + 0.3 * top.norm() * linalg::random_vector(p.dim(), &mut rng)
        };
        let plus = p.p_plus(&x);
        if plus == f64::NEG_INFINITY {
            continue;
        }
        in_dstar += 1;
        let plus_hat = p_hat.p_plus(&x);
        let gap = plus - plus_hat;
        worst_gap = worst_gap.max(gap);
        if gap > 1e-12 * plus.abs().max(1.0) {
            violations += 1;
        }
    }
    Ok(MonotonicityReport { samples, in_dstar, violations, worst_gap })
}
