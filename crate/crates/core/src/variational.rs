//! Real eigenvalues to the right of `α` via inertia counting, polished by the
//! safeguarded `p₊` iteration, plus executable checks of the max-min and
//! min-max characterizations.
//!
//! On `(α, 0]` every zero of `λ ↦ 𝔱(λ)[x]` is a crossing from below, so the
//! number of negative eigenvalues of `T(λ)` equals the number of pencil
//! eigenvalues in `(λ, 0]`. Bisection on that count is the ground truth; the
//! subspace checks only verify the variational formulas.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{PencilError, Result};
use crate::linalg;
use crate::linearization::{LinearizedSystem, RANK_TOL};
use crate::optimize::{nelder_mead, NelderMeadOptions};
use crate::pencil::{AlphaEstimate, QuadraticPencil, RayleighPair};

/// Relative width of the band in which an eigenvalue of `T(λ)` counts as zero.
pub const INERTIA_TOL: f64 = 1e-12;
/// Margin added to the `α` estimate when it is used as a left endpoint.
pub const ALPHA_MARGIN: f64 = 1e-6;
pub const MAX_POLISH_ITERATIONS: usize = 200;

/// A real symmetric matrix family `λ ↦ T(λ)`.
pub trait SymmetricFamily {
    fn dim(&self) -> usize;
    fn matrix_at(&self, lambda: f64) -> DMatrix<f64>;
    fn scale_at(&self, lambda: f64) -> f64;
}

impl SymmetricFamily for QuadraticPencil {
    fn dim(&self) -> usize {
        QuadraticPencil::dim(self)
    }

    fn matrix_at(&self, lambda: f64) -> DMatrix<f64> {
        QuadraticPencil::matrix_at(self, lambda)
    }

    fn scale_at(&self, lambda: f64) -> f64 {
        QuadraticPencil::scale_at(self, lambda)
    }
}

/// `T(λ) = Σ_k λ^k C_k` with symmetric coefficients.
#[derive(Debug, Clone)]
pub struct MatrixPolynomial {
    coefficients: Vec<DMatrix<f64>>,
}

impl MatrixPolynomial {
    pub fn new(coefficients: Vec<DMatrix<f64>>) -> Result<Self> {
        let Some(first) = coefficients.first() else {
            return Err(PencilError::InvalidArgument("empty matrix polynomial".into()));
        };
        let n = first.nrows();
        for c in &coefficients {
            if c.nrows() != n || c.ncols() != n {
                return Err(PencilError::DimensionMismatch { expected: n, actual: c.nrows() });
            }
        }
        Ok(Self { coefficients: coefficients.iter().map(linalg::symmetrize).collect() })
    }

    /// Coefficients of the scalar polynomial `𝔱(λ)[x] = Σ_k λ^k xᵀC_k x`.
    pub fn form_coefficients(&self, x: &DVector<f64>) -> Vec<f64> {
        self.coefficients.iter().map(|c| x.dot(&(c * x))).collect()
    }

    pub fn form(&self, lambda: f64, x: &DVector<f64>) -> f64 {
        self.form_coefficients(x).iter().rev().fold(0.0, |acc, c| acc * lambda + c)
    }

    pub fn form_derivative(&self, lambda: f64, x: &DVector<f64>) -> f64 {
        let c = self.form_coefficients(x);
        c.iter().enumerate().skip(1).rev().fold(0.0, |acc, (k, ck)| acc * lambda + k as f64 * ck)
    }
}

impl SymmetricFamily for MatrixPolynomial {
    fn dim(&self) -> usize {
        self.coefficients[0].nrows()
    }

    fn matrix_at(&self, lambda: f64) -> DMatrix<f64> {
        let n = self.dim();
        self.coefficients.iter().rev().fold(DMatrix::zeros(n, n), |acc, c| acc * lambda + c)
    }

    fn scale_at(&self, lambda: f64) -> f64 {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(k, c)| lambda.abs().powi(k as i32) * linalg::spectral_norm(c))
            .sum::<f64>()
            .max(f64::MIN_POSITIVE)
    }
}

/// `λ ↦ T(−λ)`. Turns a family whose forms decrease through their zeros into
/// one whose forms increase through them, so one counting engine serves both.
pub struct Reflected<'a, F: SymmetricFamily>(pub &'a F);

impl<F: SymmetricFamily> SymmetricFamily for Reflected<'_, F> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn matrix_at(&self, lambda: f64) -> DMatrix<f64> {
        self.0.matrix_at(-lambda)
    }

    fn scale_at(&self, lambda: f64) -> f64 {
        self.0.scale_at(-lambda)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Inertia {
    pub negative: usize,
    /// Eigenvalues inside `[−tol·scale, tol·scale]`; nonzero means `λ` is
    /// numerically an eigenvalue of the family.
    pub boundary: usize,
    pub positive: usize,
    /// Eigenvalues that are negative at all, band ignored.
    pub strictly_negative: usize,
}

pub fn inertia<F: SymmetricFamily>(family: &F, lambda: f64) -> Inertia {
    let values = linalg::sym_eigenvalues(&linalg::symmetrize(&family.matrix_at(lambda)));
    let thr = INERTIA_TOL * family.scale_at(lambda);
    let negative = values.iter().filter(|&&v| v < -thr).count();
    let boundary = values.iter().filter(|&&v| v.abs() <= thr).count();
    let strictly_negative = values.iter().filter(|&&v| v < 0.0).count();
    Inertia { negative, boundary, positive: values.len() - negative - boundary, strictly_negative }
}

/// Inertia of the symmetric matrix `T(λ) = λ²I + λD + A₀`.
pub fn inertia_negative(pencil: &QuadraticPencil, lambda: f64) -> Inertia {
    inertia(pencil, lambda)
}

/// Half-open interval `(lower, upper]` searched for eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntervalDelta {
    lower: f64,
    upper: f64,
    alpha_estimate: f64,
}

impl IntervalDelta {
    /// `(lower, 0]`, rejected when `lower` lies left of the `α` estimate.
    pub fn new(lower: f64, alpha_estimate: f64) -> Result<Self> {
        if !lower.is_finite() {
            return Err(PencilError::InvalidArgument(format!("interval lower end {lower} must be finite")));
        }
        if lower >= 0.0 {
            return Err(PencilError::InvalidArgument(format!("interval lower end {lower} must be negative")));
        }
        if lower < alpha_estimate {
            return Err(PencilError::InvalidArgument(format!(
                "interval lower end {lower} lies below the alpha estimate {alpha_estimate}"
            )));
        }
        Ok(Self { lower, upper: 0.0, alpha_estimate })
    }

    /// `(α + margin, 0]`; when `α = −∞` the lower end is placed beyond every
    /// possible real eigenvalue.
    pub fn from_alpha(pencil: &QuadraticPencil, alpha: &AlphaEstimate) -> Self {
        let lower = if alpha.value.is_finite() {
            alpha.value + ALPHA_MARGIN * alpha.value.abs()
        } else {
            -(pencil.real_eigenvalue_bound() + 1.0)
        };
        Self { lower, upper: 0.0, alpha_estimate: alpha.value }
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn alpha_estimate(&self) -> f64 {
        self.alpha_estimate
    }

    pub fn contains(&self, lambda: f64) -> bool {
        lambda > self.lower && lambda <= self.upper
    }
}

/// `(lower, upper]` containing `count` eigenvalues of the family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bracket {
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
    pub count_lower: usize,
    pub count_upper: usize,
}

/// `ν` at `λ`, nudged right up to four times while `λ` sits on an eigenvalue.
/// The count itself uses signs only: the band is far wider than rounding
/// noise when `‖T(λ)‖` is dominated by stiff modes, and counting by band would
/// shift brackets off their roots.
fn counted_inertia<F: SymmetricFamily>(family: &F, lambda: f64, nudge: f64) -> (f64, usize) {
    let mut at = lambda;
    let mut i = inertia(family, at);
    for _ in 0..4 {
        if i.boundary == 0 {
            break;
        }
        at += nudge;
        i = inertia(family, at);
    }
    (at, i.strictly_negative)
}

/// Brackets every jump of `ν(λ) = #negative eigenvalues of T(λ)` on
/// `(lower, upper]` to width `tol`, assuming `ν` is non-increasing there.
pub fn bracket_eigenvalues<F: SymmetricFamily>(family: &F, lower: f64, upper: f64, tol: f64) -> Result<Vec<Bracket>> {
    if !(lower < upper) || !(tol > 0.0) {
        return Err(PencilError::InvalidArgument(format!("bad bracket request ({lower}, {upper}], tol {tol}")));
    }
    let nudge = 0.5 * tol;
    let (lo, nu_lo) = counted_inertia(family, lower, nudge);
    // at the right end a boundary hit belongs inside the half-open interval
    let (hi, nu_hi) = counted_inertia(family, upper, nudge);
    if nu_lo < nu_hi {
        return Err(PencilError::Computation(format!(
            "inertia increases from {nu_lo} at {lo} to {nu_hi} at {hi}; counting is not monotone"
        )));
    }
    let mut out = Vec::new();
    let mut stack = vec![(lo, hi, nu_lo, nu_hi)];
    while let Some((a, b, na, nb)) = stack.pop() {
        if na == nb {
            continue;
        }
        if b - a <= tol {
            out.push(Bracket { lower: a, upper: b, count: na - nb, count_lower: na, count_upper: nb });
            continue;
        }
        let mid = 0.5 * (a + b);
        let (m, nm) = counted_inertia(family, mid, nudge.min(0.125 * (b - mid)));
        if nm > na || nm < nb {
            return Err(PencilError::Computation(format!(
                "inertia is not monotone on ({a}, {b}]: {na} / {nm} / {nb}"
            )));
        }
        stack.push((a, m, na, nm));
        stack.push((m, b, nm, nb));
    }
    out.sort_by(|x, y| y.upper.total_cmp(&x.upper));
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenvalueDiagnostics {
    pub value: f64,
    pub multiplicity: usize,
    pub bracket_width: f64,
    pub iterations: usize,
    /// `σ_min(T(λ))`.
    pub residual: f64,
    /// `𝔱'(λ)[x] = 2λ + 𝔡[x]` for the unit kernel vector `x`.
    pub derivative: f64,
    pub semisimple: bool,
    #[serde(skip)]
    pub eigenvector: DVector<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VariationalResult {
    /// Non-increasing, repeated by multiplicity.
    pub eigenvalues: Vec<f64>,
    pub kappa: usize,
    pub n_found: usize,
    pub per_eigenvalue: Vec<EigenvalueDiagnostics>,
    pub interval: IntervalDelta,
}

struct Polished {
    value: f64,
    iterations: usize,
    width: f64,
    residual: f64,
    eigenvector: DVector<f64>,
}

/// Safeguarded iteration `λ ← p₊(x(λ))` inside a bracket from the counting
/// stage, where `x(λ)` is the eigenvector of `T(λ)` whose eigenvalue crosses
/// zero in the bracket.
fn polish(pencil: &QuadraticPencil, bracket: &Bracket) -> Result<Polished> {
    let (mut lo, mut hi) = (bracket.lower, bracket.upper);
    let idx = bracket.count_upper;
    let m = bracket.count;
    let pick = |lam: f64| {
        let (vals, vecs) = linalg::sym_eigen(&pencil.matrix_at(lam));
        let j = (idx..idx + m).min_by(|&a, &b| vals[a].abs().total_cmp(&vals[b].abs())).expect("m >= 1");
        let crossing = vals[j];
        (vals, vecs.column(j).into_owned(), crossing)
    };
    let mut lam = 0.5 * (lo + hi);
    for it in 1..=MAX_POLISH_ITERATIONS {
        let (vals, x, crossing) = pick(lam);
        let scale = pencil.scale_at(lam);
        if crossing.abs() <= 4.0 * f64::EPSILON * scale {
            return Ok(Polished { value: lam, iterations: it, width: hi - lo, residual: crossing.abs(), eigenvector: x });
        }
        // the crossing eigenvalues of T(λ) are negative left of the root and positive right of it
        let crossing_vals = vals.rows(idx, m);
        if crossing_vals.iter().all(|&v| v < 0.0) {
            lo = lam;
        } else if crossing_vals.iter().all(|&v| v > 0.0) {
            hi = lam;
        } else {
            // a cluster that split inside the bracket; its members agree to the bracket width
            return Ok(Polished { value: lam, iterations: it, width: hi - lo, residual: crossing.abs(), eigenvector: x });
        }
        let candidate = RayleighPair::from_coefficients(1.0, pencil.damping().quad_form(&x), pencil.stiffness().quad_form(&x)).p_plus;
        let next = if candidate.is_finite() && candidate > lo && candidate < hi { candidate } else { 0.5 * (lo + hi) };
        if (next - lam).abs() <= 2.0 * f64::EPSILON * lam.abs().max(f64::MIN_POSITIVE) || hi - lo <= 2.0 * f64::EPSILON * lam.abs() {
            let (_, x, crossing) = pick(next);
            return Ok(Polished { value: next, iterations: it, width: hi - lo, residual: crossing.abs(), eigenvector: x });
        }
        lam = next;
    }
    Err(PencilError::NoConvergence { iterations: MAX_POLISH_ITERATIONS, lower: lo, upper: hi })
}

/// All eigenvalues of the pencil in `interval`, with multiplicities.
pub fn locate_real_eigenvalues(pencil: &QuadraticPencil, interval: &IntervalDelta, tol: f64) -> Result<VariationalResult> {
    if !(tol > 0.0) {
        return Err(PencilError::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let kappa = inertia_negative(pencil, interval.upper()).negative;
    let brackets = bracket_eigenvalues(pencil, interval.lower(), interval.upper(), tol)?;
    let system = LinearizedSystem::new(pencil);
    let mut eigenvalues = Vec::new();
    let mut per_eigenvalue = Vec::new();
    for b in &brackets {
        let p = polish(pencil, b)?;
        let derivative = pencil.form_derivative(p.value, &p.eigenvector);
        let semisimple = system.semisimplicity_check(p.value, RANK_TOL);
        eigenvalues.extend(std::iter::repeat(p.value).take(b.count));
        per_eigenvalue.push(EigenvalueDiagnostics {
            value: p.value,
            multiplicity: b.count,
            bracket_width: p.width,
            iterations: p.iterations,
            residual: p.residual,
            derivative,
            semisimple,
            eigenvector: p.eigenvector,
        });
    }
    Ok(VariationalResult { n_found: eigenvalues.len(), eigenvalues, kappa, per_eigenvalue, interval: *interval })
}

/// Options for [`verify_minmax`].
#[derive(Debug, Clone, Copy)]
pub struct MinMaxOptions {
    pub random_subspaces: usize,
    pub seed: u64,
    pub tol: f64,
    /// Random restarts for each inner optimization on top of the structured start.
    pub random_starts: usize,
}

impl Default for MinMaxOptions {
    fn default() -> Self {
        Self { random_subspaces: 200, seed: 0, tol: 1e-6, random_starts: 1 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MinMaxEntry {
    pub n: usize,
    pub lambda: f64,
    /// `min p₊` over the achieving subspace (should be ≥ λ − tol).
    pub achievement_min: f64,
    /// `λ_max` of `T(λ)` compressed to the achieving subspace (≤ 0 exactly when
    /// `p₊ ≥ λ` there).
    pub achievement_compressed_max: f64,
    pub achievement_ok: bool,
    /// Largest `min p₊` over the random subspaces (should be ≤ λ + tol).
    pub random_worst: f64,
    pub random_ok: bool,
    /// `sup p₊` over the complement of the `n − 1` leading directions.
    pub dual_sup: f64,
    /// `p₊` at the eigenvector, which lies in that complement.
    pub dual_attained: f64,
    pub dual_ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_subspace: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BeyondCountEntry {
    pub n: usize,
    pub lower: f64,
    /// Largest `min p₊` over the sampled `n`-dimensional subspaces.
    pub worst_min: f64,
    /// `sup p₊` over the complement of the negative eigenspace of `T(lower)`.
    pub dual_sup: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct MinMaxReport {
    pub entries: Vec<MinMaxEntry>,
    pub beyond: Option<BeyondCountEntry>,
    pub subspaces_per_n: usize,
    pub tol: f64,
    pub passed: bool,
}

fn p_plus_on(pencil: &QuadraticPencil, basis: &DMatrix<f64>, c: &DVector<f64>) -> f64 {
    if c.norm() < 1e-8 {
        return f64::NAN;
    }
    pencil.p_plus(&(basis * c))
}

fn inner_opts(k: usize) -> NelderMeadOptions {
    NelderMeadOptions { initial_step: 0.2, max_evals: 150 * (k + 1), f_tol: 1e-12, x_tol: 1e-9, restarts: 1 }
}

/// `min p₊` over the unit sphere of `span(basis)`, starting from `seeds`
/// (coefficient vectors) and `random_starts` random directions.
fn minimize_p_plus<R: Rng>(
    pencil: &QuadraticPencil,
    basis: &DMatrix<f64>,
    seeds: &[DVector<f64>],
    random_starts: usize,
    rng: &mut R,
) -> (f64, DVector<f64>) {
    let k = basis.ncols();
    let f = |c: &DVector<f64>| {
        let v = p_plus_on(pencil, basis, c);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut best = (f64::INFINITY, DVector::zeros(k));
    let starts = seeds.iter().cloned().chain((0..random_starts).map(|_| linalg::random_vector(k, rng)));
    for s in starts {
        if s.norm() == 0.0 {
            continue;
        }
        let s = s.normalize();
        let m = nelder_mead(f, &s, &inner_opts(k));
        if m.value < best.0 {
            best = (m.value, basis * m.point.normalize());
        }
        if best.0 == f64::NEG_INFINITY {
            break;
        }
    }
    best
}

/// `sup p₊` over the unit sphere of `span(basis)`.
fn maximize_p_plus<R: Rng>(
    pencil: &QuadraticPencil,
    basis: &DMatrix<f64>,
    seeds: &[DVector<f64>],
    random_starts: usize,
    rng: &mut R,
) -> f64 {
    let k = basis.ncols();
    if k == 0 {
        return f64::NEG_INFINITY;
    }
    let f = |c: &DVector<f64>| {
        let v = p_plus_on(pencil, basis, c);
        if v.is_nan() || v == f64::NEG_INFINITY {
            f64::INFINITY
        } else {
            -v
        }
    };
    let mut best = f64::NEG_INFINITY;
    let starts = seeds.iter().cloned().chain((0..random_starts).map(|_| linalg::random_vector(k, rng)));
    for s in starts {
        if s.norm() == 0.0 {
            continue;
        }
        let s = s.normalize();
        let start_value = pencil.p_plus(&(basis * &s));
        best = best.max(start_value);
        if start_value == f64::NEG_INFINITY {
            continue;
        }
        let m = nelder_mead(f, &s, &inner_opts(k));
        if m.value.is_finite() {
            best = best.max(-m.value);
        }
    }
    best
}

fn columns(m: &DMatrix<f64>, range: std::ops::Range<usize>) -> DMatrix<f64> {
    let n = m.nrows();
    if range.is_empty() {
        return DMatrix::zeros(n, 0);
    }
    m.columns(range.start, range.len()).into_owned()
}

/// Checks the max-min and min-max formulas for every eigenvalue found, and the
/// bound for `n = N + 1`, by sampling subspaces.
///
/// For `λ_n` the achieving `n`-dimensional subspace is spanned by the
/// eigenvectors of `T(λ_n)` belonging to its `n` smallest eigenvalues, and the
/// optimal `(n−1)`-dimensional constraint space by the first `n − 1` of them.
pub fn verify_minmax(pencil: &QuadraticPencil, result: &VariationalResult, opts: &MinMaxOptions) -> MinMaxReport {
    let dim = pencil.dim();
    let tol = opts.tol;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut entries = Vec::new();

    for (idx, &lambda) in result.eigenvalues.iter().enumerate() {
        let n = idx + 1;
        let (vals, vecs) = linalg::sym_eigen(&pencil.matrix_at(lambda));
        let scale = pencil.scale_at(lambda);

        // (a) achievement
        let achieving = columns(&vecs, 0..n);
        let achievement_compressed_max = vals[n - 1];
        let seeds: Vec<DVector<f64>> = (0..n).map(|i| DVector::from_fn(n, |j, _| if i == j { 1.0 } else { 0.0 })).collect();
        let (achievement_min, _) = minimize_p_plus(pencil, &achieving, &seeds, opts.random_starts + 2, &mut rng);
        let achievement_ok = achievement_min >= lambda - tol && achievement_compressed_max <= 1e-10 * scale;

        // (b) random subspaces never beat λ_n
        let t = pencil.matrix_at(lambda);
        let mut random_worst = f64::NEG_INFINITY;
        let mut witness_subspace = None;
        for _ in 0..opts.random_subspaces {
            let q = linalg::random_subspace(dim, n, &mut rng);
            let compressed = linalg::symmetrize(&(q.transpose() * &t * &q));
            let (_, cv) = linalg::sym_eigen(&compressed);
            let seed = cv.column(n - 1).into_owned();
            let (m, _) = minimize_p_plus(pencil, &q, &[seed], opts.random_starts, &mut rng);
            if m > random_worst {
                random_worst = m;
            }
            if m > lambda + tol && witness_subspace.is_none() {
                witness_subspace = Some((0..n).map(|j| q.column(j).iter().copied().collect()).collect());
            }
        }
        let random_ok = random_worst <= lambda + tol;

        // (c) dual form
        let leading = columns(&vecs, 0..n - 1);
        let complement = linalg::orthogonal_complement(&leading);
        let eigvec = vecs.column(n - 1).into_owned();
        let seed = complement.transpose() * &eigvec;
        let dual_sup = maximize_p_plus(pencil, &complement, &[seed], opts.random_starts + 2, &mut rng);
        let dual_attained = pencil.p_plus(&eigvec);
        let dual_ok = dual_sup <= lambda + tol && dual_attained >= lambda - tol;

        entries.push(MinMaxEntry {
            n,
            lambda,
            achievement_min,
            achievement_compressed_max,
            achievement_ok,
            random_worst,
            random_ok,
            dual_sup,
            dual_attained,
            dual_ok,
            witness_subspace,
        });
    }

    let count = result.eigenvalues.len();
    let beyond = (count < dim).then(|| {
        let n = count + 1;
        let lower = result.interval.lower();
        let t = pencil.matrix_at(lower);
        let mut worst_min = f64::NEG_INFINITY;
        for _ in 0..opts.random_subspaces.max(1) {
            let q = linalg::random_subspace(dim, n, &mut rng);
            let compressed = linalg::symmetrize(&(q.transpose() * &t * &q));
            let (_, cv) = linalg::sym_eigen(&compressed);
            let seed = cv.column(n - 1).into_owned();
            let (m, _) = minimize_p_plus(pencil, &q, &[seed], opts.random_starts, &mut rng);
            worst_min = worst_min.max(m);
        }
        let (vals, vecs) = linalg::sym_eigen(&t);
        let negative = vals.iter().filter(|&&v| v < 0.0).count();
        let complement = linalg::orthogonal_complement(&columns(&vecs, 0..negative));
        let seed = complement.transpose() * vecs.column(negative.min(dim - 1));
        let dual_sup = maximize_p_plus(pencil, &complement, &[seed], opts.random_starts + 2, &mut rng);
        let ok = worst_min <= lower + tol && dual_sup <= lower + tol;
        BeyondCountEntry { n, lower, worst_min, dual_sup, ok }
    });

    let passed = entries.iter().all(|e| e.achievement_ok && e.random_ok && e.dual_ok)
        && beyond.as_ref().map_or(true, |b| b.ok);
    MinMaxReport { entries, beyond, subspaces_per_n: opts.random_subspaces, tol, passed }
}

/// Root structure of a scalar form `𝔱(·)[x]` relative to `Δ = (−∞, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RootCase {
    /// One negative and one non-negative zero.
    OneNegative,
    /// Two positive zeros.
    TwoPositive,
    /// No real zeros.
    NoRealZeros,
    /// Anything else (two negative zeros, zero at the origin).
    Other,
}

/// Real roots (ascending) of `c₀ + c₁λ + c₂λ²`, using the cancellation-free
/// quadratic formula.
pub fn real_quadratic_roots(c0: f64, c1: f64, c2: f64) -> Vec<f64> {
    if c2 == 0.0 {
        return if c1 == 0.0 { Vec::new() } else { vec![-c0 / c1] };
    }
    let disc = c1 * c1 - 4.0 * c2 * c0;
    if disc < 0.0 {
        return Vec::new();
    }
    let q = -0.5 * (c1 + disc.sqrt().copysign(c1));
    let mut r = if q == 0.0 { vec![0.0, 0.0] } else { vec![q / c2, c0 / q] };
    r.sort_by(f64::total_cmp);
    r
}

fn classify(roots: &[f64]) -> RootCase {
    match roots {
        [] => RootCase::NoRealZeros,
        [a, b] if *a < 0.0 && *b >= 0.0 => RootCase::OneNegative,
        [a, _] if *a > 0.0 => RootCase::TwoPositive,
        _ => RootCase::Other,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseEntry {
    pub x: Vec<f64>,
    /// `[c₀, c₁, c₂]` of `𝔱(λ)[x] = c₀ + c₁λ + c₂λ²`.
    pub coefficients: Vec<f64>,
    pub roots: Vec<f64>,
    pub case: RootCase,
    pub expected: RootCase,
    /// Rayleigh functional value: the negative zero, the smaller positive
    /// zero, or `+∞`.
    pub p: f64,
    /// `𝔱'(p)[x]`, negative at a zero inside `Δ`.
    pub derivative_at_p: Option<f64>,
    pub matches: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassicalEntry {
    pub x: Vec<f64>,
    pub rayleigh_quotient: f64,
    pub functional_root: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FixtureReport {
    pub cases: Vec<CaseEntry>,
    /// A vector exhibiting two positive zeros under the displayed matrix.
    pub two_positive_example: CaseEntry,
    /// Eigenvalues of the 2×2 family in `(−∞, 0)` found by inertia bisection.
    pub engine_eigenvalues: Vec<f64>,
    pub sign_equivalence_samples: usize,
    pub sign_equivalence_failures: usize,
    pub classical: Vec<ClassicalEntry>,
    /// Eigenvalues of `A` recovered by the engine on the reflected family.
    pub classical_engine_eigenvalues: Vec<f64>,
    pub classification_ok: bool,
    pub passed: bool,
}

/// The 2×2 family `[[λ²−2λ+1, −2], [−2, λ²+1]]`.
pub fn example_two_by_two() -> MatrixPolynomial {
    MatrixPolynomial::new(vec![
        DMatrix::from_row_slice(2, 2, &[1.0, -2.0, -2.0, 1.0]),
        DMatrix::from_row_slice(2, 2, &[-2.0, 0.0, 0.0, 0.0]),
        DMatrix::identity(2, 2),
    ])
    .expect("well-formed coefficients")
}

fn case_entry(family: &MatrixPolynomial, x: &[f64], expected: RootCase) -> CaseEntry {
    let xv = DVector::from_column_slice(x);
    let c = family.form_coefficients(&xv);
    let roots = real_quadratic_roots(c[0], c[1], c[2]);
    let case = classify(&roots);
    let p = match case {
        RootCase::OneNegative => roots[0],
        RootCase::TwoPositive => roots[0],
        RootCase::NoRealZeros => f64::INFINITY,
        RootCase::Other => roots.iter().copied().filter(|r| *r < 0.0).fold(f64::NEG_INFINITY, f64::max),
    };
    let derivative_at_p = p.is_finite().then(|| family.form_derivative(p, &xv));
    CaseEntry { x: x.to_vec(), coefficients: c, roots, case, expected, p, derivative_at_p, matches: case == expected }
}

/// Runs the counting engine on the two small worked families: the 2×2
/// quadratic family on `Δ = (−∞, 0)` and the classical `A − λI`.
pub fn generic_engine_fixture_2x2() -> FixtureReport {
    let family = example_two_by_two();
    let cases = vec![
        case_entry(&family, &[1.0, 1.0], RootCase::OneNegative),
        case_entry(&family, &[2.0, -1.0], RootCase::TwoPositive),
        case_entry(&family, &[1.0, -1.0], RootCase::NoRealZeros),
    ];
    let two_positive_example = case_entry(&family, &[5.0, 1.0], RootCase::TwoPositive);

    // forms decrease through their zeros on Δ, so count on λ ↦ T(−λ) over (0, M]
    let bound = 2.0 + 3f64.sqrt() + 1.0;
    let engine_eigenvalues = bracket_eigenvalues(&Reflected(&family), 0.0, bound, 1e-13)
        .map(|brackets| brackets.iter().rev().flat_map(|b| std::iter::repeat(-0.5 * (b.lower + b.upper)).take(b.count)).collect())
        .unwrap_or_default();

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let samples = 2000;
    let mut failures = 0;
    for _ in 0..samples {
        let x = linalg::random_vector(2, &mut rng);
        let lambda = -10.0 * rng.random::<f64>() - 1e-9;
        let entry = case_entry(&family, &[x[0], x[1]], RootCase::Other);
        // Rayleigh functional on Δ: the zero in Δ if any, else a value ≥ sup Δ
        let p = match entry.case {
            RootCase::OneNegative => entry.p,
            RootCase::TwoPositive | RootCase::NoRealZeros => f64::INFINITY,
            RootCase::Other => continue,
        };
        let value = family.form(lambda, &x);
        let consistent = if value > 0.0 { p > lambda } else if value < 0.0 { p < lambda } else { true };
        if !consistent {
            failures += 1;
        }
    }

    let a = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0]));
    let classical_family = MatrixPolynomial::new(vec![a.clone(), -DMatrix::identity(2, 2)]).expect("2x2");
    let classical = [[0.0, 1.0], [1.0, 0.0], [1.0, 1.0], [3.0, -1.0]]
        .iter()
        .map(|x| {
            let xv = DVector::from_column_slice(x);
            let rq = xv.dot(&(&a * &xv)) / xv.norm_squared();
            let c = classical_family.form_coefficients(&xv);
            ClassicalEntry { x: x.to_vec(), rayleigh_quotient: rq, functional_root: real_quadratic_roots(c[0], c[1], 0.0)[0] }
        })
        .collect::<Vec<_>>();
    let classical_engine_eigenvalues: Vec<f64> = bracket_eigenvalues(&Reflected(&classical_family), -10.0, 10.0, 1e-13)
        .map(|brackets| brackets.iter().flat_map(|b| std::iter::repeat(-0.5 * (b.lower + b.upper)).take(b.count)).collect())
        .unwrap_or_default();

    let classification_ok = cases.iter().all(|c| c.matches);
    let classical_ok = classical.iter().all(|c| (c.rayleigh_quotient - c.functional_root).abs() <= 1e-14)
        && (classical[0].rayleigh_quotient - 2.0).abs() == 0.0;
    let passed = classification_ok && classical_ok && failures == 0;
    FixtureReport {
        cases,
        two_positive_example,
        engine_eigenvalues,
        sign_equivalence_samples: samples,
        sign_equivalence_failures: failures,
        classical,
        classical_engine_eigenvalues,
        classification_ok,
        passed,
    }
}
