#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use quadpencil_core::QuadraticPencil;

/// Coefficients (ascending) of `det(λ²I + λD + A₀)`, recovered by sampling the
/// determinant on a circle and inverting the discrete Fourier transform.
pub fn determinant_polynomial(pencil: &QuadraticPencil) -> Vec<f64> {
    let n = pencil.dim();
    let degree = 2 * n;
    let samples = degree + 1;
    let radius = pencil.stiffness().eigenvalues().iter().map(|v| v.ln()).sum::<f64>().exp().powf(1.0 / degree as f64);
    let values: Vec<Complex64> = (0..samples)
        .map(|k| {
            let z = Complex64::from_polar(radius, 2.0 * PI * k as f64 / samples as f64);
            pencil.matrix_at_complex(z).lu().determinant()
        })
        .collect();
    (0..=degree)
        .map(|j| {
            let sum: Complex64 = values
                .iter()
                .enumerate()
                .map(|(k, v)| v * Complex64::from_polar(1.0, -2.0 * PI * (j * k) as f64 / samples as f64))
                .sum();
            sum.re / (samples as f64 * radius.powi(j as i32))
        })
        .collect()
}

/// Roots of a polynomial with ascending coefficients via its companion matrix.
pub fn polynomial_roots(coefficients: &[f64]) -> Vec<Complex64> {
    let degree = coefficients.len() - 1;
    let lead = coefficients[degree];
    let mut companion = DMatrix::zeros(degree, degree);
    for i in 1..degree {
        companion[(i, i - 1)] = 1.0;
    }
    for i in 0..degree {
        companion[(i, degree - 1)] = -coefficients[i] / lead;
    }
    companion.complex_eigenvalues().iter().copied().collect()
}

/// Largest distance in a greedy nearest matching of two equally long multisets.
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .expect("same length");
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn refine(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64, m: f64, fm: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        refine(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) + refine(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1)
    }
    // split first so the oscillating integrand cannot fool the initial estimate
    let pieces = 64;
    let h = (b - a) / pieces as f64;
    (0..pieces)
        .map(|i| {
            let (lo, hi) = (a + i as f64 * h, a + (i + 1) as f64 * h);
            let (flo, fhi) = (f(lo), f(hi));
            let (m, fm, whole) = simpson(f, lo, flo, hi, fhi);
            refine(f, lo, flo, hi, fhi, m, fm, whole, tol / pieces as f64, 40)
        })
        .sum()
}

/// Energy `‖A₀^{1/2}z‖² + ‖ż‖²` of the exact solution of a diagonal system,
/// summed mode by mode from the two characteristic roots of each mode.
pub fn modal_energy(a0: &[f64], d: &[f64], z0: &[f64], w0: &[f64], t: f64) -> f64 {
    a0.iter()
        .zip(d)
        .zip(z0.iter().zip(w0))
        .map(|((&a, &d), (&z, &w))| {
            let disc = Complex64::new(d * d - 4.0 * a, 0.0).sqrt();
            let r1 = (-d + disc) / 2.0;
            let r2 = (-d - disc) / 2.0;
            // z(t) = c1 e^{r1 t} + c2 e^{r2 t}
            let c1 = (w - r2 * z) / (r1 - r2);
            let c2 = (r1 * z - w) / (r1 - r2);
            let zt = c1 * (r1 * t).exp() + c2 * (r2 * t).exp();
            let wt = c1 * r1 * (r1 * t).exp() + c2 * r2 * (r2 * t).exp();
            a * zt.re * zt.re + wt.re * wt.re
        })
        .sum()
}

pub fn vector(values: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(values)
}

pub fn reference() -> QuadraticPencil {
    QuadraticPencil::from_diagonals(&[2.0, 8.0], &[6.0, 2.0]).unwrap()
}

/// `α` of the reference pencil: on the boundary of 𝒟*, with `cos²θ` solving
/// `4u² + 10u − 7 = 0`.
pub fn reference_alpha() -> f64 {
    (3.0 - 53f64.sqrt()) / 2.0
}
