//! First-order linearization of the pencil on the energy space.
//!
//! The block operator `[[0, I], [−A₀, −D]]` acts on pairs `(z, w)` with the
//! energy norm `‖A₀^{1/2} z‖² + ‖w‖²`. Conjugating with `diag(A₀^{1/2}, I)`
//! turns that norm into the Euclidean one, so the matrix stored here is
//!
//! ```text
//!     [  0        A₀^{1/2} ]
//!     [ −A₀^{1/2}   −D     ]
//! ```
//!
//! and `J = diag(I, −I)` makes `J·𝒜` an ordinary symmetric matrix.

use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{PencilError, Result};
use crate::linalg;
use crate::pencil::QuadraticPencil;

/// Singular values below this fraction of `σ_max` count as zero.
pub const RANK_TOL: f64 = 1e-8;
/// Default eigenvalue clustering tolerance, relative to `‖𝒜‖`.
pub const CLUSTER_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct LinearizedSystem {
    a_matrix: DMatrix<f64>,
    j_signature: DVector<f64>,
    dim: usize,
    pencil: QuadraticPencil,
}

pub fn build_linearization(pencil: &QuadraticPencil) -> LinearizedSystem {
    LinearizedSystem::new(pencil)
}

impl LinearizedSystem {
    pub fn new(pencil: &QuadraticPencil) -> Self {
        let n = pencil.dim();
        let s = pencil.a0_sqrt();
        let d = pencil.damping().matrix();
        let mut a = DMatrix::zeros(2 * n, 2 * n);
        a.view_mut((0, n), (n, n)).copy_from(s);
        a.view_mut((n, 0), (n, n)).copy_from(&(-s));
        a.view_mut((n, n), (n, n)).copy_from(&(-d));
        let j_signature = DVector::from_fn(2 * n, |i, _| if i < n { 1.0 } else { -1.0 });
        Self { a_matrix: a, j_signature, dim: n, pencil: pencil.clone() }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a_matrix
    }

    pub fn j_signature(&self) -> &DVector<f64> {
        &self.j_signature
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pencil(&self) -> &QuadraticPencil {
        &self.pencil
    }

    pub fn norm(&self) -> f64 {
        linalg::spectral_norm(&self.a_matrix)
    }

    /// The block matrix `[[0, I], [−A₀, −D]]` in the original coordinates.
    pub fn original_matrix(&self) -> DMatrix<f64> {
        let n = self.dim;
        let mut a = DMatrix::zeros(2 * n, 2 * n);
        a.view_mut((0, n), (n, n)).fill_with_identity();
        a.view_mut((n, 0), (n, n)).copy_from(&(-self.pencil.stiffness().matrix()));
        a.view_mut((n, n), (n, n)).copy_from(&(-self.pencil.damping().matrix()));
        a
    }

    pub fn j_times_a(&self) -> DMatrix<f64> {
        let mut ja = self.a_matrix.clone();
        for (i, &s) in self.j_signature.iter().enumerate() {
            ja.row_mut(i).scale_mut(s);
        }
        ja
    }

    /// `‖J𝒜 − (J𝒜)ᵀ‖ / ‖𝒜‖`.
    pub fn j_symmetry_defect(&self) -> f64 {
        let ja = self.j_times_a();
        linalg::spectral_norm(&(&ja - ja.transpose())) / self.norm()
    }

    /// The inverse assembled from the closed-form blocks
    /// `[[−A₀⁻¹D, −A₀⁻¹], [I, 0]]`, carried into the whitened coordinates.
    pub fn inverse_formula(&self) -> Result<DMatrix<f64>> {
        let n = self.dim;
        let a0 = self.pencil.stiffness().matrix();
        let a0_inv = a0
            .clone()
            .cholesky()
            .ok_or_else(|| PencilError::Computation("Cholesky factorization of A0 failed".into()))?
            .inverse();
        let d = self.pencil.damping().matrix();
        let mut inv = DMatrix::zeros(2 * n, 2 * n);
        inv.view_mut((0, 0), (n, n)).copy_from(&(-(&a0_inv * d)));
        inv.view_mut((0, n), (n, n)).copy_from(&(-&a0_inv));
        inv.view_mut((n, 0), (n, n)).fill_with_identity();
        // P 𝒜⁻¹ P⁻¹ with P = diag(A₀^{1/2}, I)
        let s = self.pencil.a0_sqrt();
        let s_inv = self.pencil.a0_inv_sqrt();
        let mut p = DMatrix::identity(2 * n, 2 * n);
        p.view_mut((0, 0), (n, n)).copy_from(s);
        let mut p_inv = DMatrix::identity(2 * n, 2 * n);
        p_inv.view_mut((0, 0), (n, n)).copy_from(s_inv);
        Ok(p * inv * p_inv)
    }

    /// `‖𝒜 · inverse_formula − I‖`.
    pub fn inverse_identity_defect(&self) -> Result<f64> {
        let product = &self.a_matrix * self.inverse_formula()?;
        Ok(linalg::spectral_norm(&(product - DMatrix::identity(2 * self.dim, 2 * self.dim))))
    }

    pub fn full_spectrum(&self) -> Result<SpectrumResult> {
        self.full_spectrum_with_tolerance(CLUSTER_TOL * self.norm())
    }

    pub fn full_spectrum_with_tolerance(&self, cluster_tolerance: f64) -> Result<SpectrumResult> {
        let m = 2 * self.dim;
        let schur = Schur::try_new(self.a_matrix.clone(), f64::EPSILON, 1000 * m).ok_or_else(|| {
            PencilError::Computation(format!(
                "Schur iteration did not converge (dim {m}, ‖A‖ = {:e})",
                self.norm()
            ))
        })?;
        let mut eigenvalues: Vec<Complex64> = schur.complex_eigenvalues().iter().copied().collect();
        if eigenvalues.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(PencilError::Computation("non-finite eigenvalue".into()));
        }
        eigenvalues.sort_by(|a, b| b.re.total_cmp(&a.re).then(a.im.total_cmp(&b.im)));

        let ac = linalg::to_complex(&self.a_matrix);
        let shifted = |mu: Complex64| {
            let mut s = ac.clone();
            for i in 0..m {
                s[(i, i)] -= mu;
            }
            s
        };
        let residuals: Vec<f64> = eigenvalues
            .iter()
            .map(|&z| linalg::min_singular_pair(&shifted(z)).0)
            .collect();

        let clusters = cluster_indices(&eigenvalues, cluster_tolerance)
            .into_iter()
            .map(|members| {
                let sum: Complex64 = members.iter().map(|&i| eigenvalues[i]).sum();
                let mut value = sum / members.len() as f64;
                if value.im.abs() <= cluster_tolerance {
                    value.im = 0.0;
                }
                let algebraic = members.len();
                let geometric = linalg::kernel_dim_complex(&shifted(value), RANK_TOL).clamp(1, algebraic);
                let residual = members.iter().map(|&i| residuals[i]).fold(0.0, f64::max);
                SpectralCluster { value, algebraic, geometric, residual, members }
            })
            .collect();

        Ok(SpectrumResult { eigenvalues, residuals, clusters, cluster_tolerance, norm: self.norm() })
    }

    /// True when `(𝒜 − λ)` and `(𝒜 − λ)²` have the same numerical kernel
    /// dimension, i.e. there is no Jordan chain at `λ`.
    pub fn semisimplicity_check(&self, lambda: f64, tol: f64) -> bool {
        let (k1, k2) = self.kernel_dims(lambda, tol);
        k1 == k2
    }

    /// Numerical kernel dimensions of `(𝒜 − λ)` and `(𝒜 − λ)²`, with singular
    /// values counted as zero below `tol·(‖𝒜‖ + |λ|)` and its square.
    pub fn kernel_dims(&self, lambda: f64, tol: f64) -> (usize, usize) {
        let m = 2 * self.dim;
        let shifted = &self.a_matrix - DMatrix::identity(m, m) * lambda;
        let squared = &shifted * &shifted;
        let scale = self.norm() + lambda.abs();
        (
            linalg::kernel_dim_below(&linalg::to_complex(&shifted), tol * scale),
            linalg::kernel_dim_below(&linalg::to_complex(&squared), tol * scale * scale),
        )
    }
}

fn cluster_indices(values: &[Complex64], tol: f64) -> Vec<Vec<usize>> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        let mut c = i;
        while parent[c] != r {
            let next = parent[c];
            parent[c] = r;
            c = next;
        }
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (values[i] - values[j]).norm() <= tol {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[rj] = ri;
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_index: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        match root_index[r] {
            Some(g) => groups[g].push(i),
            None => {
                root_index[r] = Some(groups.len());
                groups.push(vec![i]);
            }
        }
    }
    groups
}

/// A group of computed eigenvalues treated as one multiple eigenvalue.
#[derive(Debug, Clone)]
pub struct SpectralCluster {
    pub value: Complex64,
    pub algebraic: usize,
    pub geometric: usize,
    /// Largest `σ_min(𝒜 − λ)` over the members.
    pub residual: f64,
    pub members: Vec<usize>,
}

impl SpectralCluster {
    pub fn is_real(&self) -> bool {
        self.value.im == 0.0
    }
}

#[derive(Debug, Clone)]
pub struct SpectrumResult {
    /// All `2n` eigenvalues, by decreasing real part.
    pub eigenvalues: Vec<Complex64>,
    /// `σ_min(𝒜 − λ)` per eigenvalue, i.e. `min ‖𝒜v − λv‖` over unit `v`.
    pub residuals: Vec<f64>,
    pub clusters: Vec<SpectralCluster>,
    pub cluster_tolerance: f64,
    pub norm: f64,
}

impl SpectrumResult {
    /// Spectral abscissa `max Re λ`.
    pub fn max_real_part(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_modulus(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min)
    }

    /// Real eigenvalues in `(lower, upper]`, repeated by algebraic
    /// multiplicity, non-increasing.
    pub fn real_eigenvalues_in(&self, lower: f64, upper: f64) -> Vec<f64> {
        let mut out: Vec<f64> = self
            .clusters
            .iter()
            .filter(|c| c.is_real() && c.value.re > lower && c.value.re <= upper)
            .flat_map(|c| std::iter::repeat(c.value.re).take(c.algebraic))
            .collect();
        out.sort_by(|a, b| b.total_cmp(a));
        out
    }

    /// Largest distance from a nonreal eigenvalue to the nearest conjugate of
    /// another computed eigenvalue.
    pub fn conjugate_pairing_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, z) in self.eigenvalues.iter().enumerate() {
            let target = z.conj();
            let best = self
                .eigenvalues
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i || z.im == 0.0)
                .map(|(_, w)| (w - target).norm())
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(best);
        }
        worst
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceEntry {
    pub re: f64,
    pub im: f64,
    pub sigma_min: f64,
    pub threshold: f64,
    pub kernel_dim_t: usize,
    pub geometric_multiplicity: usize,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    pub entries: Vec<EquivalenceEntry>,
    /// `σ_min(T(0)) = λ_min(A₀)`; positive means 0 is not an eigenvalue.
    pub sigma_min_at_zero: f64,
    pub passed: bool,
}

/// Checks that every eigenvalue of the linearization makes `T(λ)` singular
/// with `dim ker T(λ) = dim ker(𝒜 − λ)`.
pub fn check_pencil_equivalence(pencil: &QuadraticPencil, spectrum: &SpectrumResult) -> EquivalenceReport {
    let entries: Vec<EquivalenceEntry> = spectrum
        .clusters
        .iter()
        .map(|c| {
            let t = pencil.matrix_at_complex(c.value);
            let s = linalg::singular_values_complex(&t);
            let sigma_min = *s.last().expect("non-empty");
            let lam = c.value.norm();
            let threshold = RANK_TOL * (lam * lam + lam * pencil.damping().norm() + pencil.stiffness().norm());
            let kernel_dim_t = s.iter().filter(|&&v| v <= threshold).count();
            let ok = sigma_min <= threshold && kernel_dim_t == c.geometric;
            EquivalenceEntry {
                re: c.value.re,
                im: c.value.im,
                sigma_min,
                threshold,
                kernel_dim_t,
                geometric_multiplicity: c.geometric,
                ok,
            }
        })
        .collect();
    let sigma_min_at_zero = pencil.stiffness().eigenvalues()[0];
    let passed = entries.iter().all(|e| e.ok) && sigma_min_at_zero > 0.0;
    EquivalenceReport { entries, sigma_min_at_zero, passed }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Disc,
    Triangle,
}

#[derive(Debug, Clone, Serialize)]
pub struct RegionHit {
    pub re: f64,
    pub im: f64,
    pub region: Region,
    /// How far inside the region the eigenvalue sits (positive = inside).
    pub depth: f64,
    /// Distance to the nearest exceptional point `−1/γ`, `−1/γ ± i/γ`.
    pub exceptional_distance: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResolventReport {
    pub gamma: f64,
    pub disc_radius: f64,
    pub min_modulus: f64,
    pub violations: Vec<RegionHit>,
    pub excused: Vec<RegionHit>,
    pub passed: bool,
}

/// Checks that no eigenvalue lies in the disc `|z| < r` or in the closed
/// triangle `{−1/γ ≤ Re z < 0, arg z ∈ [3π/4, 5π/4]}` (exceptional corners
/// excused).
pub fn resolvent_region_check(pencil: &QuadraticPencil, spectrum: &SpectrumResult) -> Result<ResolventReport> {
    if pencil.damping().is_zero() {
        return Err(PencilError::InvalidArgument(
            "resolvent triangle requires a nonzero damping operator".into(),
        ));
    }
    let (_, gamma) = pencil.delta_gamma();
    let r = pencil.disc_radius();
    let edge = 1.0 / gamma;
    let edge_tol = 1e-12 * edge;
    let excuse_tol = 1e-9 * edge.max(1.0);
    let exceptional = [
        Complex64::new(-edge, 0.0),
        Complex64::new(-edge, edge),
        Complex64::new(-edge, -edge),
    ];

    let mut violations = Vec::new();
    let mut excused = Vec::new();
    for &z in &spectrum.eigenvalues {
        let exceptional_distance = exceptional.iter().map(|e| (z - e).norm()).fold(f64::INFINITY, f64::min);
        let modulus = z.norm();
        if modulus < r * (1.0 - 1e-12) {
            violations.push(RegionHit { re: z.re, im: z.im, region: Region::Disc, depth: r - modulus, exceptional_distance });
        }
        if z.re < 0.0 {
            let depth = (z.re + edge).min(-z.re).min(-z.re - z.im.abs());
            if depth > -edge_tol {
                let hit = RegionHit { re: z.re, im: z.im, region: Region::Triangle, depth, exceptional_distance };
                if exceptional_distance <= excuse_tol {
                    excused.push(hit);
                } else {
                    violations.push(hit);
                }
            }
        }
    }
    Ok(ResolventReport {
        gamma,
        disc_radius: r,
        min_modulus: spectrum.min_modulus(),
        passed: violations.is_empty(),
        violations,
        excused,
    })
}
