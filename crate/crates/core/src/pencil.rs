//! The quadratic pencil `T(λ) = λ²I + λD + A₀`, its quadratic forms and the
//! Rayleigh functionals `p±` built from them.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{PencilError, Result};
use crate::linalg;
use crate::optimize::{nelder_mead, NelderMeadOptions};

/// Relative eigenvalue threshold for the definiteness checks.
pub const DEFINITENESS_TOL: f64 = 1e-12;
/// Largest relative asymmetry accepted (and then removed) at construction.
pub const SYMMETRY_TOL: f64 = 1e-10;
/// Relative width of the discriminant band that is clamped to a double root.
pub const DISCRIMINANT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Definiteness {
    PositiveDefinite,
    PositiveSemidefinite,
}

/// A real symmetric matrix with a checked definiteness class.
#[derive(Debug, Clone)]
pub struct SymmetricOperator {
    entries: DMatrix<f64>,
    kind: Definiteness,
    eigenvalues: DVector<f64>,
}

impl SymmetricOperator {
    pub fn new(entries: DMatrix<f64>, kind: Definiteness) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(PencilError::InvalidArgument(format!(
                "matrix must be square, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if entries.nrows() == 0 {
            return Err(PencilError::InvalidArgument("matrix must be non-empty".into()));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(PencilError::InvalidArgument("matrix has non-finite entries".into()));
        }
        let max_abs = entries.amax();
        let asym = (&entries - entries.transpose()).amax();
        if asym > SYMMETRY_TOL * max_abs.max(f64::MIN_POSITIVE) {
            return Err(PencilError::InvalidArgument(format!(
                "matrix is not symmetric (max |m_ij - m_ji| = {asym:e})"
            )));
        }
        let entries = linalg::symmetrize(&entries);
        let eigenvalues = linalg::sym_eigenvalues(&entries);
        let norm = eigenvalues.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        let min = eigenvalues[0];
        let threshold = DEFINITENESS_TOL * norm;
        match kind {
            Definiteness::PositiveDefinite if !(min > threshold) => Err(PencilError::Definiteness {
                expected: "positive definite",
                min_eigenvalue: min,
                threshold,
            }),
            Definiteness::PositiveSemidefinite if min < -threshold => Err(PencilError::Definiteness {
                expected: "positive semidefinite",
                min_eigenvalue: min,
                threshold: -threshold,
            }),
            _ => Ok(Self { entries, kind, eigenvalues }),
        }
    }

    pub fn positive_definite(entries: DMatrix<f64>) -> Result<Self> {
        Self::new(entries, Definiteness::PositiveDefinite)
    }

    pub fn positive_semidefinite(entries: DMatrix<f64>) -> Result<Self> {
        Self::new(entries, Definiteness::PositiveSemidefinite)
    }

    pub fn from_diagonal(diag: &[f64], kind: Definiteness) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(diag)), kind)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn kind(&self) -> Definiteness {
        self.kind
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    pub fn norm(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
    }

    /// `xᵀ M x`.
    pub fn quad_form(&self, x: &DVector<f64>) -> f64 {
        x.dot(&(&self.entries * x))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&v| v == 0.0)
    }
}

/// The pair `(A₀, D)` with identity mass. Whitening data derived from `A₀` is
/// computed once at construction.
#[derive(Debug, Clone)]
pub struct QuadraticPencil {
    a0: SymmetricOperator,
    d: SymmetricOperator,
    a0_sqrt: DMatrix<f64>,
    a0_inv_sqrt: DMatrix<f64>,
    whitened_damping: DMatrix<f64>,
    whitened_eigenvalues: DVector<f64>,
    whitened_eigenvectors: DMatrix<f64>,
}

impl QuadraticPencil {
    pub fn new(a0: SymmetricOperator, d: SymmetricOperator) -> Result<Self> {
        if a0.kind() != Definiteness::PositiveDefinite {
            return Err(PencilError::InvalidArgument(
                "stiffness operator A0 must be positive definite".into(),
            ));
        }
        if a0.dim() != d.dim() {
            return Err(PencilError::DimensionMismatch { expected: a0.dim(), actual: d.dim() });
        }
        let a0_sqrt = linalg::sym_function(a0.matrix(), f64::sqrt);
        let a0_inv_sqrt = linalg::sym_function(a0.matrix(), |v| 1.0 / v.sqrt());
        let whitened_damping = linalg::symmetrize(&(&a0_inv_sqrt * d.matrix() * &a0_inv_sqrt));
        let (whitened_eigenvalues, whitened_eigenvectors) = linalg::sym_eigen(&whitened_damping);
        Ok(Self {
            a0,
            d,
            a0_sqrt,
            a0_inv_sqrt,
            whitened_damping,
            whitened_eigenvalues,
            whitened_eigenvectors,
        })
    }

    /// Builds a pencil from raw matrices, checking `A₀ ≻ 0` and `D ⪰ 0`.
    pub fn from_matrices(a0: DMatrix<f64>, d: DMatrix<f64>) -> Result<Self> {
        Self::new(
            SymmetricOperator::positive_definite(a0)?,
            SymmetricOperator::positive_semidefinite(d)?,
        )
    }

    pub fn from_diagonals(a0: &[f64], d: &[f64]) -> Result<Self> {
        Self::new(
            SymmetricOperator::from_diagonal(a0, Definiteness::PositiveDefinite)?,
            SymmetricOperator::from_diagonal(d, Definiteness::PositiveSemidefinite)?,
        )
    }

    pub fn dim(&self) -> usize {
        self.a0.dim()
    }

    pub fn stiffness(&self) -> &SymmetricOperator {
        &self.a0
    }

    pub fn damping(&self) -> &SymmetricOperator {
        &self.d
    }

    pub fn a0_sqrt(&self) -> &DMatrix<f64> {
        &self.a0_sqrt
    }

    pub fn a0_inv_sqrt(&self) -> &DMatrix<f64> {
        &self.a0_inv_sqrt
    }

    /// `A₀^{-1/2} D A₀^{-1/2}`.
    pub fn whitened_damping(&self) -> &DMatrix<f64> {
        &self.whitened_damping
    }

    /// `‖A₀⁻¹‖ = 1 / λ_min(A₀)`.
    pub fn a0_inv_norm(&self) -> f64 {
        1.0 / self.a0.eigenvalues()[0]
    }

    /// `‖A₀^{-1/2}‖`.
    pub fn a0_inv_sqrt_norm(&self) -> f64 {
        1.0 / self.a0.eigenvalues()[0].sqrt()
    }

    /// Magnitude scale of `T(λ)`, used to make thresholds relative.
    pub fn scale_at(&self, lambda: f64) -> f64 {
        lambda * lambda + lambda.abs() * self.d.norm() + self.a0.norm()
    }

    /// Bound on the modulus of any real eigenvalue: `|λ| ≤ ‖D‖ + √‖A₀‖`.
    pub fn real_eigenvalue_bound(&self) -> f64 {
        self.d.norm() + self.a0.norm().sqrt()
    }

    pub fn matrix_at(&self, lambda: f64) -> DMatrix<f64> {
        let n = self.dim();
        let mut t = self.a0.matrix() + self.d.matrix() * lambda;
        for i in 0..n {
            t[(i, i)] += lambda * lambda;
        }
        t
    }

    pub fn matrix_at_complex(&self, lambda: Complex64) -> DMatrix<Complex64> {
        let n = self.dim();
        let a0 = self.a0.matrix();
        let d = self.d.matrix();
        DMatrix::from_fn(n, n, |i, j| {
            let diag = if i == j { lambda * lambda } else { Complex64::new(0.0, 0.0) };
            diag + lambda * d[(i, j)] + a0[(i, j)]
        })
    }

    fn check_len(&self, x: &DVector<f64>) -> Result<()> {
        if x.len() != self.dim() {
            Err(PencilError::DimensionMismatch { expected: self.dim(), actual: x.len() })
        } else {
            Ok(())
        }
    }

    /// `𝔱(λ)[x, y] = λ²⟨x, y⟩ + λ yᵀDx + yᵀA₀x`.
    pub fn evaluate_form(
        &self,
        lambda: Complex64,
        x: &DVector<f64>,
        y: &DVector<f64>,
    ) -> Result<Complex64> {
        self.check_len(x)?;
        self.check_len(y)?;
        let gram = y.dot(x);
        let damp = y.dot(&(self.d.matrix() * x));
        let stiff = y.dot(&(self.a0.matrix() * x));
        Ok(lambda * lambda * gram + lambda * damp + stiff)
    }

    /// `𝔱(λ)[x]` for real `λ`.
    pub fn form(&self, lambda: f64, x: &DVector<f64>) -> f64 {
        lambda * lambda * x.norm_squared() + lambda * self.d.quad_form(x) + self.a0.quad_form(x)
    }

    /// `𝔱'(λ)[x] = 2λ‖x‖² + 𝔡[x]`.
    pub fn form_derivative(&self, lambda: f64, x: &DVector<f64>) -> f64 {
        2.0 * lambda * x.norm_squared() + self.d.quad_form(x)
    }

    /// Real roots of `𝔱(·)[x] = 0`.
    pub fn rayleigh_pair(&self, x: &DVector<f64>) -> Result<RayleighPair> {
        self.check_len(x)?;
        let norm2 = x.norm_squared();
        if norm2 == 0.0 {
            return Err(PencilError::InvalidArgument("Rayleigh functional of the zero vector".into()));
        }
        Ok(RayleighPair::from_coefficients(norm2, self.d.quad_form(x), self.a0.quad_form(x)))
    }

    pub fn p_plus(&self, x: &DVector<f64>) -> f64 {
        RayleighPair::from_coefficients(x.norm_squared(), self.d.quad_form(x), self.a0.quad_form(x))
            .p_plus
    }

    pub fn p_minus(&self, x: &DVector<f64>) -> f64 {
        RayleighPair::from_coefficients(x.norm_squared(), self.d.quad_form(x), self.a0.quad_form(x))
            .p_minus
    }

    /// Extreme eigenvalues `(δ, γ)` of `A₀^{-1/2} D A₀^{-1/2}`.
    pub fn delta_gamma(&self) -> (f64, f64) {
        let n = self.dim();
        let delta = self.whitened_eigenvalues[0].max(0.0);
        let gamma = self.whitened_eigenvalues[n - 1].max(0.0);
        (delta, gamma)
    }

    /// Extremal vectors for `𝔡[x]/𝔞₀[x]`: `A₀^{-1/2}` applied to the bottom and
    /// top eigenvectors of the whitened damping. Returned as `(argmin, argmax)`.
    pub fn form_ratio_extremizers(&self) -> (DVector<f64>, DVector<f64>) {
        let n = self.dim();
        let low = &self.a0_inv_sqrt * self.whitened_eigenvectors.column(0);
        let high = &self.a0_inv_sqrt * self.whitened_eigenvectors.column(n - 1);
        (low, high)
    }

    pub fn disc_radius(&self) -> f64 {
        let (_, gamma) = self.delta_gamma();
        2.0 / (gamma + (gamma * gamma + 4.0 * self.a0_inv_norm()).sqrt())
    }

    /// Sufficient tests for `𝒟* = ∅` and `𝒟* ≠ ∅`.
    pub fn dstar_empty_certificate(&self) -> DstarCertificate {
        let b = &self.a0_inv_sqrt;
        let two_b = b * 2.0;
        let w_norm = self.whitened_eigenvalues.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let b_norm = self.a0_inv_sqrt_norm();
        let scale = w_norm.max(2.0 * b_norm);
        let gap = linalg::sym_eigenvalues(&linalg::symmetrize(&(&self.whitened_damping - &two_b)));
        let top_gap = gap[gap.len() - 1];
        if top_gap < -DEFINITENESS_TOL * scale {
            return DstarCertificate::EmptyCertified { margin: -top_gap };
        }
        if w_norm > 2.0 * b_norm * (1.0 + DEFINITENESS_TOL) {
            let n = self.dim();
            let witness = b * self.whitened_eigenvectors.column(n - 1);
            return DstarCertificate::NonemptyCertified {
                witness: witness.iter().copied().collect(),
            };
        }
        DstarCertificate::Inconclusive
    }

    /// Samples `δ ≤ 𝔡[y]/𝔞₀[y] ≤ γ` and checks the bounds are attained.
    pub fn verify_gamma_as_form_ratio(&self, samples: usize, seed: u64) -> Result<GammaRatioReport> {
        if samples == 0 {
            return Err(PencilError::InvalidArgument("samples must be >= 1".into()));
        }
        let (delta, gamma) = self.delta_gamma();
        let slack = 1e-12 * gamma.max(1e-300) + 1e-15;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut min_ratio = f64::INFINITY;
        let mut max_ratio = f64::NEG_INFINITY;
        let mut violations = Vec::new();
        for _ in 0..samples {
            let y = loop {
                let v = linalg::random_vector(self.dim(), &mut rng);
                if v.norm() > 0.0 {
                    break v;
                }
            };
            let ratio = self.d.quad_form(&y) / self.a0.quad_form(&y);
            min_ratio = min_ratio.min(ratio);
            max_ratio = max_ratio.max(ratio);
            if ratio < delta - slack || ratio > gamma + slack {
                violations.push(RatioWitness { vector: y.iter().copied().collect(), ratio });
            }
        }
        let (low, high) = self.form_ratio_extremizers();
        let inf_error = (self.d.quad_form(&low) / self.a0.quad_form(&low) - delta).abs();
        let sup_error = (self.d.quad_form(&high) / self.a0.quad_form(&high) - gamma).abs();
        let attain_tol = 1e-10 * gamma.max(1.0);
        let passed = violations.is_empty() && inf_error <= attain_tol && sup_error <= attain_tol;
        Ok(GammaRatioReport {
            delta,
            gamma,
            samples,
            min_ratio,
            max_ratio,
            inf_attainment_error: inf_error,
            sup_attainment_error: sup_error,
            violations,
            passed,
        })
    }

    /// Multistart lower estimate of `α = sup_{x∈𝒟*} p₋(x)`.
    pub fn compute_alpha(&self, search: &AlphaSearch, seed: u64) -> AlphaEstimate {
        let certificate = self.dstar_empty_certificate();
        if matches!(certificate, DstarCertificate::EmptyCertified { .. }) {
            return AlphaEstimate {
                value: f64::NEG_INFINITY,
                witness: None,
                estimate: false,
                certificate,
                feasible_starts: 0,
            };
        }

        let n = self.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut starts: Vec<DVector<f64>> = Vec::new();
        for j in 0..n {
            starts.push(&self.a0_inv_sqrt * self.whitened_eigenvectors.column(j));
        }
        if let DstarCertificate::NonemptyCertified { witness } = &certificate {
            starts.push(DVector::from_column_slice(witness));
        }
        let (_, d_vectors) = linalg::sym_eigen(self.d.matrix());
        let (_, a_vectors) = linalg::sym_eigen(self.a0.matrix());
        for j in 0..n {
            starts.push(d_vectors.column(j).into_owned());
            starts.push(a_vectors.column(j).into_owned());
        }
        for _ in 0..search.starts {
            starts.push(linalg::random_vector(n, &mut rng));
        }

        let objective = |y: &DVector<f64>| {
            let v = self.p_minus(y);
            if v.is_finite() {
                -v
            } else {
                f64::INFINITY
            }
        };

        let mut feasible: Vec<(f64, DVector<f64>)> = starts
            .into_iter()
            .filter(|x| x.norm() > 0.0)
            .map(|x| {
                let x = x.normalize();
                (self.p_minus(&x), x)
            })
            .filter(|(v, _)| v.is_finite())
            .collect();
        let feasible_starts = feasible.len();
        if feasible.is_empty() {
            return AlphaEstimate {
                value: f64::NEG_INFINITY,
                witness: None,
                estimate: true,
                certificate,
                feasible_starts,
            };
        }
        feasible.sort_by(|a, b| b.0.total_cmp(&a.0));
        feasible.truncate(search.max_local_searches.max(1));

        let opts = NelderMeadOptions {
            initial_step: 0.2,
            max_evals: 600 * (n + 1),
            f_tol: search.refine_tol,
            x_tol: 1e-11,
            restarts: 3,
        };
        let mut best_value = f64::NEG_INFINITY;
        let mut best_point = feasible[0].1.clone();
        for (value, start) in &feasible {
            if *value > best_value {
                best_value = *value;
                best_point = start.clone();
            }
            let m = nelder_mead(objective, start, &opts);
            let v = -m.value;
            if v.is_finite() && v > best_value {
                best_value = v;
                best_point = m.point.normalize();
            }
        }
        let polish = NelderMeadOptions { initial_step: 0.02, restarts: 4, ..opts };
        let m = nelder_mead(objective, &best_point, &polish);
        if -m.value > best_value {
            best_value = -m.value;
            best_point = m.point.normalize();
        }
        AlphaEstimate {
            value: best_value,
            witness: Some(best_point),
            estimate: true,
            certificate,
            feasible_starts,
        }
    }

    /// `δ`, `γ`, the finite-dimensional conventions and `α`.
    pub fn scalars(&self, search: &AlphaSearch, seed: u64) -> PencilScalars {
        let (delta, gamma) = self.delta_gamma();
        let alpha = self.compute_alpha(search, seed);
        PencilScalars {
            delta,
            gamma,
            delta0: f64::INFINITY,
            gamma0: 0.0,
            delta1: None,
            alpha: alpha.value,
            alpha_is_estimate: alpha.estimate,
            disc_radius: self.disc_radius(),
        }
    }
}

/// The real roots `p₋ ≤ p₊` of `𝔱(·)[x]`, or `(+∞, −∞)` when there are none.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RayleighPair {
    pub p_minus: f64,
    pub p_plus: f64,
    pub in_dstar: bool,
}

impl RayleighPair {
    pub const OUTSIDE: RayleighPair =
        RayleighPair { p_minus: f64::INFINITY, p_plus: f64::NEG_INFINITY, in_dstar: false };

    /// Roots of `a λ² + b λ + c` with `a > 0`, `b ≥ 0`, `c > 0`, computed
    /// without cancellation.
    pub fn from_coefficients(a: f64, b: f64, c: f64) -> Self {
        let disc = b * b - 4.0 * a * c;
        let band = DISCRIMINANT_TOL * (b * b + 4.0 * a * c);
        if disc < -band || a <= 0.0 {
            return Self::OUTSIDE;
        }
        let root = disc.max(0.0).sqrt();
        let q = -0.5 * (b + root.copysign(b));
        if q == 0.0 {
            return Self::OUTSIDE;
        }
        let r1 = q / a;
        let r2 = c / q;
        Self { p_minus: r1.min(r2), p_plus: r1.max(r2), in_dstar: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum DstarCertificate {
    EmptyCertified { margin: f64 },
    NonemptyCertified { witness: Vec<f64> },
    Inconclusive,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct AlphaSearch {
    /// Random starting directions on top of the structured ones.
    pub starts: usize,
    /// Value stagnation tolerance of the local refinement.
    pub refine_tol: f64,
    /// Local searches are run from this many of the best feasible starts.
    pub max_local_searches: usize,
}

impl Default for AlphaSearch {
    fn default() -> Self {
        Self { starts: 64, refine_tol: 1e-14, max_local_searches: 12 }
    }
}

#[derive(Debug, Clone)]
pub struct AlphaEstimate {
    /// `−∞` when no point of `𝒟*` was found.
    pub value: f64,
    pub witness: Option<DVector<f64>>,
    /// False only when `𝒟* = ∅` is certified.
    pub estimate: bool,
    pub certificate: DstarCertificate,
    pub feasible_starts: usize,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PencilScalars {
    pub delta: f64,
    pub gamma: f64,
    /// `+∞` in finite dimensions (no essential spectrum).
    pub delta0: f64,
    /// `0` in finite dimensions.
    pub gamma0: f64,
    /// Only defined for infinite-dimensional spaces.
    pub delta1: Option<f64>,
    pub alpha: f64,
    pub alpha_is_estimate: bool,
    pub disc_radius: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RatioWitness {
    pub vector: Vec<f64>,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GammaRatioReport {
    pub delta: f64,
    pub gamma: f64,
    pub samples: usize,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub inf_attainment_error: f64,
    pub sup_attainment_error: f64,
    pub violations: Vec<RatioWitness>,
    pub passed: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn reference() -> QuadraticPencil {
        QuadraticPencil::from_diagonals(&[2.0, 8.0], &[6.0, 2.0]).unwrap()
    }

    fn e(i: usize, n: usize) -> DVector<f64> {
        let mut v = DVector::zeros(n);
        v[i] = 1.0;
        v
    }

    #[test]
    fn form_values() {
        let p = reference();
        let x = e(0, 2);
        let v = p.evaluate_form(Complex64::new(0.0, 0.0), &x, &x).unwrap();
        assert_eq!(v, Complex64::new(2.0, 0.0));
        let v = p.evaluate_form(Complex64::new(-1.0, 0.0), &x, &x).unwrap();
        assert_eq!(v, Complex64::new(-3.0, 0.0));
        assert_eq!(p.form(-1.0, &x), -3.0);
    }

    #[test]
    fn form_rejects_bad_lengths() {
        let p = reference();
        let err = p.evaluate_form(Complex64::new(0.0, 0.0), &e(0, 3), &e(0, 2)).unwrap_err();
        assert_eq!(err, PencilError::DimensionMismatch { expected: 2, actual: 3 });
    }

    #[test]
    fn rayleigh_pair_examples() {
        let p = reference();
        let r = p.rayleigh_pair(&e(0, 2)).unwrap();
        assert!(r.in_dstar);
        assert_relative_eq!(r.p_minus, -3.0 - 7f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(r.p_plus, -3.0 + 7f64.sqrt(), max_relative = 1e-14);

        let q = QuadraticPencil::from_diagonals(&[2.0, 8.0], &[2.0, 2.0]).unwrap();
        assert_eq!(q.rayleigh_pair(&e(0, 2)).unwrap(), RayleighPair::OUTSIDE);

        let undamped = QuadraticPencil::from_diagonals(&[2.0, 8.0], &[0.0, 0.0]).unwrap();
        let r = undamped.rayleigh_pair(&DVector::from_vec(vec![0.3, -1.0])).unwrap();
        assert_eq!((r.p_minus, r.p_plus, r.in_dstar), (f64::INFINITY, f64::NEG_INFINITY, false));
    }

    #[test]
    fn rayleigh_pair_of_zero_vector_is_an_error() {
        let err = reference().rayleigh_pair(&DVector::zeros(2)).unwrap_err();
        assert!(matches!(err, PencilError::InvalidArgument(_)));
    }

    #[test]
    fn double_root_is_admitted() {
        // a₀ = 1, d = 2: (λ + 1)²
        let p = QuadraticPencil::from_diagonals(&[1.0], &[2.0]).unwrap();
        let r = p.rayleigh_pair(&e(0, 1)).unwrap();
        assert!(r.in_dstar);
        assert_eq!(r.p_minus, -1.0);
        assert_eq!(r.p_plus, -1.0);
    }

    #[test]
    fn no_cancellation_in_small_root() {
        // λ² + 1e8 λ + 1: small root ≈ -1e-8 to full relative precision
        let r = RayleighPair::from_coefficients(1.0, 1e8, 1.0);
        assert_relative_eq!(r.p_plus, -1e-8, max_relative = 1e-15);
        assert_relative_eq!(r.p_minus, -1e8, max_relative = 1e-15);
    }

    #[test]
    fn delta_gamma_examples() {
        let (d, g) = reference().delta_gamma();
        assert_relative_eq!(d, 0.25, max_relative = 1e-15);
        assert_relative_eq!(g, 3.0, max_relative = 1e-15);
        let undamped = QuadraticPencil::from_diagonals(&[2.0, 8.0], &[0.0, 0.0]).unwrap();
        assert_eq!(undamped.delta_gamma(), (0.0, 0.0));
        let a0 = DMatrix::from_row_slice(2, 2, &[3.0, 1.0, 1.0, 2.0]);
        let same = QuadraticPencil::from_matrices(a0.clone(), a0).unwrap();
        let (d, g) = same.delta_gamma();
        assert_relative_eq!(d, 1.0, epsilon = 1e-14);
        assert_relative_eq!(g, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn form_ratio_examples() {
        let p = reference();
        let ratio = |x: &DVector<f64>| p.damping().quad_form(x) / p.stiffness().quad_form(x);
        assert_eq!(ratio(&e(0, 2)), 3.0);
        assert_eq!(ratio(&e(1, 2)), 0.25);
        let report = p.verify_gamma_as_form_ratio(500, 11).unwrap();
        assert!(report.passed, "{report:?}");
        let undamped = QuadraticPencil::from_diagonals(&[2.0, 8.0], &[0.0, 0.0]).unwrap();
        let report = undamped.verify_gamma_as_form_ratio(50, 1).unwrap();
        assert!(report.passed);
        assert_eq!(report.max_ratio, 0.0);
        assert!(p.verify_gamma_as_form_ratio(0, 1).is_err());
    }

    #[test]
    fn certificates() {
        let undamped = QuadraticPencil::from_diagonals(&[2.0, 8.0], &[0.0, 0.0]).unwrap();
        assert!(matches!(undamped.dstar_empty_certificate(), DstarCertificate::EmptyCertified { .. }));
        match reference().dstar_empty_certificate() {
            DstarCertificate::NonemptyCertified { witness } => {
                let x = DVector::from_vec(witness);
                assert!(reference().rayleigh_pair(&x).unwrap().in_dstar);
            }
            other => panic!("unexpected {other:?}"),
        }
        let critical = QuadraticPencil::from_diagonals(&[1.0], &[2.0]).unwrap();
        assert_eq!(critical.dstar_empty_certificate(), DstarCertificate::Inconclusive);
    }

    #[test]
    fn alpha_examples() {
        let search = AlphaSearch::default();
        let undamped = QuadraticPencil::from_diagonals(&[2.0, 8.0], &[0.0, 0.0]).unwrap();
        let a = undamped.compute_alpha(&search, 0);
        assert_eq!(a.value, f64::NEG_INFINITY);
        assert!(!a.estimate && a.witness.is_none());

        let scalar = QuadraticPencil::from_diagonals(&[2.0], &[6.0]).unwrap();
        assert_relative_eq!(scalar.compute_alpha(&search, 0).value, -3.0 - 7f64.sqrt(), max_relative = 1e-15);

        // the supremum sits on the boundary of D*, where p₋ = −𝔡[x]/2 and
        // cos²θ solves 4u² + 10u − 7 = 0
        let a = reference().compute_alpha(&search, 5);
        assert!(a.estimate);
        assert_relative_eq!(a.value, (3.0 - 53f64.sqrt()) / 2.0, max_relative = 1e-9);
        let grid = (0..200_000)
            .map(|k| {
                let t = PI * k as f64 / 200_000.0;
                reference().p_minus(&DVector::from_vec(vec![t.cos(), t.sin()]))
            })
            .filter(|v| v.is_finite())
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(a.value >= grid - 1e-9 && a.value <= (3.0 - 53f64.sqrt()) / 2.0 + 1e-12);
    }

    #[test]
    fn operator_construction_checks() {
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(matches!(
            SymmetricOperator::positive_definite(asym),
            Err(PencilError::InvalidArgument(_))
        ));
        let indefinite = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(matches!(
            SymmetricOperator::positive_semidefinite(indefinite),
            Err(PencilError::Definiteness { .. })
        ));
        let singular = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        assert!(SymmetricOperator::positive_definite(singular.clone()).is_err());
        assert!(SymmetricOperator::positive_semidefinite(singular).is_ok());
        let nearly = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0 + 1e-13, 2.0]);
        let op = SymmetricOperator::positive_definite(nearly).unwrap();
        assert_eq!(op.matrix()[(0, 1)], op.matrix()[(1, 0)]);
        assert!(QuadraticPencil::from_diagonals(&[1.0, 2.0], &[1.0]).is_err());
    }

    #[test]
    fn scalars_and_disc() {
        let s = reference().scalars(&AlphaSearch::default(), 1);
        assert_eq!(s.gamma0, 0.0);
        assert_eq!(s.delta0, f64::INFINITY);
        assert!(s.delta1.is_none());
        assert!(s.delta <= s.gamma);
        assert!(s.alpha <= -1.0 / s.gamma);
        let expected = 2.0 / (3.0 + (9.0f64 + 4.0 / 2.0).sqrt());
        assert_relative_eq!(s.disc_radius, expected, max_relative = 1e-15);
        assert!(s.disc_radius < 1.0 / s.gamma);
    }
}
