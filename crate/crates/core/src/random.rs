//! Seeded random pencils for property checks.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{PencilError, Result};
use crate::linalg;
use crate::pencil::{DstarCertificate, QuadraticPencil};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomPencilSpec {
    pub dim: usize,
    pub seed: u64,
    /// Multiplies the damping before the nonempty-𝒟* adjustment.
    #[serde(default = "default_damping_scale")]
    pub damping_scale: f64,
}

fn default_damping_scale() -> f64 {
    1.0
}

fn random_orthogonal<R: Rng>(n: usize, rng: &mut R) -> DMatrix<f64> {
    linalg::orthonormalize(&linalg::random_matrix(n, n, rng))
}

/// Random symmetric positive semidefinite matrix, rank `rank`, unit-order entries.
pub fn random_psd<R: Rng>(n: usize, rank: usize, rng: &mut R) -> DMatrix<f64> {
    let b = linalg::random_matrix(n, rank, rng);
    linalg::symmetrize(&(&b * b.transpose() / rank.max(1) as f64))
}

/// `A₀` with spectrum in `[0.5, 4]` and `D ⪰ 0` (possibly singular), with the
/// damping grown until `𝒟*` is certified nonempty.
pub fn random_pencil(spec: &RandomPencilSpec) -> Result<QuadraticPencil> {
    if spec.dim == 0 {
        return Err(PencilError::InvalidArgument("dim must be positive".into()));
    }
    if !(spec.damping_scale > 0.0 && spec.damping_scale.is_finite()) {
        return Err(PencilError::InvalidArgument(format!("damping_scale must be positive, got {}", spec.damping_scale)));
    }
    let n = spec.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let q = random_orthogonal(n, &mut rng);
    let spectrum = DVector::from_fn(n, |_, _| 0.5 + 3.5 * rng.random::<f64>());
    let a0 = linalg::symmetrize(&(&q * DMatrix::from_diagonal(&spectrum) * q.transpose()));
    let rank = rng.random_range(1..=n);
    let mut d = random_psd(n, rank, &mut rng) * spec.damping_scale;
    for _ in 0..200 {
        let pencil = QuadraticPencil::from_matrices(a0.clone(), d.clone())?;
        if matches!(pencil.dstar_empty_certificate(), DstarCertificate::NonemptyCertified { .. }) {
            return Ok(pencil);
        }
        d *= 1.5;
    }
    Err(PencilError::Computation("could not reach a nonempty D* by scaling the damping".into()))
}

/// A pair with `Â₀ = A₀ − εP` and `D̂ = D + εQ`, `P, Q ⪰ 0`, so the forms are ordered.
pub fn random_ordered_pair(spec: &RandomPencilSpec, epsilon: f64) -> Result<(QuadraticPencil, QuadraticPencil)> {
    let p = random_pencil(spec)?;
    let n = spec.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed ^ 0x9e37_79b9_7f4a_7c15);
    let pm = random_psd(n, rng.random_range(1..=n), &mut rng);
    let qm = random_psd(n, rng.random_range(1..=n), &mut rng);
    let a_min = p.stiffness().eigenvalues()[0];
    // keep Â₀ comfortably positive definite
    let eps_p = epsilon.min(0.5 * a_min / linalg::spectral_norm(&pm).max(f64::MIN_POSITIVE));
    let a_hat = p.stiffness().matrix() - pm * eps_p;
    let d_hat = p.damping().matrix() + qm * epsilon;
    let p_hat = QuadraticPencil::from_matrices(a_hat, d_hat)?;
    Ok((p, p_hat))
}
