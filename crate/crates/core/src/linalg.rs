//! Dense linear-algebra helpers shared by the pencil modules.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

/// Symmetric eigendecomposition with eigenvalues sorted ascending and the
/// eigenvectors permuted to match (column `i` belongs to eigenvalue `i`).
pub fn sym_eigen(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(m.clone());
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

pub fn sym_eigenvalues(m: &DMatrix<f64>) -> DVector<f64> {
    let mut values: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    DVector::from_vec(values)
}

/// `(M + Mᵀ)/2`, exactly symmetric entry by entry.
pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    DMatrix::from_fn(n, n, |i, j| {
        if i <= j {
            0.5 * (m[(i, j)] + m[(j, i)])
        } else {
            0.5 * (m[(j, i)] + m[(i, j)])
        }
    })
}

/// Applies `f` to the eigenvalues of a symmetric matrix.
pub fn sym_function(m: &DMatrix<f64>, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let (values, vectors) = sym_eigen(m);
    let scaled = DMatrix::from_fn(vectors.nrows(), vectors.ncols(), |i, j| {
        vectors[(i, j)] * f(values[j])
    });
    symmetrize(&(scaled * vectors.transpose()))
}

pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(0.0, |acc, &s| acc.max(s))
}

pub fn to_complex(m: &DMatrix<f64>) -> DMatrix<Complex64> {
    m.map(|v| Complex64::new(v, 0.0))
}

/// Singular values sorted descending.
pub fn singular_values_complex(m: &DMatrix<Complex64>) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Number of singular values at or below `threshold`.
pub fn kernel_dim_below(m: &DMatrix<Complex64>, threshold: f64) -> usize {
    singular_values_complex(m).iter().filter(|&&v| v <= threshold).count()
}

/// Number of singular values below `rel_tol · σ_max`.
pub fn kernel_dim_complex(m: &DMatrix<Complex64>, rel_tol: f64) -> usize {
    let s = singular_values_complex(m);
    let Some(&smax) = s.first() else {
        return 0;
    };
    if smax == 0.0 {
        return s.len();
    }
    s.iter().filter(|&&v| v <= rel_tol * smax).count()
}

/// Smallest singular value together with its right singular vector.
pub fn min_singular_pair(m: &DMatrix<Complex64>) -> (f64, DVector<Complex64>) {
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let (idx, &smin) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty matrix");
    let v = v_t.row(idx).transpose().map(|c| c.conj());
    (smin, v)
}

/// Orthonormal basis of the column span (thin QR; columns assumed independent).
pub fn orthonormalize(m: &DMatrix<f64>) -> DMatrix<f64> {
    m.clone().qr().q()
}

pub fn random_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DVector<f64> {
    DVector::from_iterator(n, (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)))
}

pub fn random_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<f64> {
    DMatrix::from_iterator(
        rows,
        cols,
        (0..rows * cols).map(|_| rng.sample::<f64, _>(StandardNormal)),
    )
}

/// Orthonormal basis of a Haar-distributed random `k`-dimensional subspace of ℝⁿ.
pub fn random_subspace<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> DMatrix<f64> {
    orthonormalize(&random_matrix(n, k, rng))
}

/// Orthonormal basis of the orthogonal complement of the column span of `basis`
/// (whose columns must already be orthonormal).
pub fn orthogonal_complement(basis: &DMatrix<f64>) -> DMatrix<f64> {
    let n = basis.nrows();
    let k = basis.ncols();
    if k == 0 {
        return DMatrix::identity(n, n);
    }
    let projector = DMatrix::identity(n, n) - basis * basis.transpose();
    let (values, vectors) = sym_eigen(&symmetrize(&projector));
    // eigenvalues are ~0 (k of them) then ~1 (n - k of them)
    let cols: Vec<DVector<f64>> = (0..n)
        .filter(|&j| values[j] > 0.5)
        .map(|j| vectors.column(j).into_owned())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}
