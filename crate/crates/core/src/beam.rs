//! Pinned-pinned damped beam `∂²u/∂t² − ∂/∂r(d(r)∂²u/∂r∂t) + a₀∂⁴u/∂r⁴ = 0`
//! projected onto the sine modes `√2 sin(nπr)`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{PencilError, Result};
use crate::linalg;
use crate::pencil::{AlphaSearch, QuadraticPencil};
use crate::variational::{locate_real_eigenvalues, IntervalDelta};

/// Damping coefficient `d(r)` on `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DampingProfile {
    Constant { value: f64 },
    /// `base + amplitude·sin(πr)`.
    SineBump { base: f64, amplitude: f64 },
    /// `intercept + slope·r`.
    Affine { intercept: f64, slope: f64 },
    /// Uniform samples at `r_i = i/(len−1)`, joined by a monotone cubic
    /// Hermite interpolant.
    Sampled { values: Vec<f64> },
}

impl DampingProfile {
    pub fn validate(&self) -> Result<()> {
        let finite = |v: f64| v.is_finite();
        let ok = match self {
            Self::Constant { value } => finite(*value),
            Self::SineBump { base, amplitude } => finite(*base) && finite(*amplitude),
            Self::Affine { intercept, slope } => finite(*intercept) && finite(*slope),
            Self::Sampled { values } => {
                if values.len() < 2 {
                    return Err(PencilError::InvalidArgument("sampled damping needs at least two samples".into()));
                }
                values.iter().all(|v| finite(*v))
            }
        };
        if !ok {
            return Err(PencilError::InvalidArgument("damping parameters must be finite".into()));
        }
        let (d_min, _) = self.range();
        if d_min <= 0.0 {
            return Err(PencilError::InvalidArgument(format!("damping must be positive on [0,1], minimum is {d_min}")));
        }
        Ok(())
    }

    pub fn is_constant(&self) -> Option<f64> {
        match self {
            Self::Constant { value } => Some(*value),
            Self::SineBump { base, amplitude } if *amplitude == 0.0 => Some(*base),
            Self::Affine { intercept, slope } if *slope == 0.0 => Some(*intercept),
            _ => None,
        }
    }

    /// `(min, max)` of `d` over `[0, 1]`.
    pub fn range(&self) -> (f64, f64) {
        match self {
            Self::Constant { value } => (*value, *value),
            // sin(πr) sweeps [0, 1] on [0, 1]
            Self::SineBump { base, amplitude } => (base + amplitude.min(0.0), base + amplitude.max(0.0)),
            Self::Affine { intercept, slope } => {
                let end = intercept + slope;
                (intercept.min(end), intercept.max(end))
            }
            // the monotone interpolant never leaves the range of its data
            Self::Sampled { values } => values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v))),
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        match self {
            Self::Constant { value } => *value,
            Self::SineBump { base, amplitude } => base + amplitude * (PI * r).sin(),
            Self::Affine { intercept, slope } => intercept + slope * r,
            Self::Sampled { values } => pchip(values, r),
        }
    }
}

/// Fritsch–Carlson slopes on a uniform grid over `[0, 1]`.
fn pchip_slopes(y: &[f64]) -> Vec<f64> {
    let n = y.len();
    let h = 1.0 / (n - 1) as f64;
    let delta: Vec<f64> = y.windows(2).map(|w| (w[1] - w[0]) / h).collect();
    if n == 2 {
        return vec![delta[0]; 2];
    }
    let mut m = vec![0.0; n];
    for i in 1..n - 1 {
        let (a, b) = (delta[i - 1], delta[i]);
        m[i] = if a * b <= 0.0 { 0.0 } else { 2.0 / (1.0 / a + 1.0 / b) };
    }
    let end = |d0: f64, d1: f64| {
        let s = 0.5 * (3.0 * d0 - d1);
        if s * d0 <= 0.0 {
            0.0
        } else if d0 * d1 <= 0.0 && s.abs() > 3.0 * d0.abs() {
            3.0 * d0
        } else {
            s
        }
    };
    m[0] = end(delta[0], delta[1]);
    m[n - 1] = end(delta[n - 2], delta[n - 3]);
    m
}

fn pchip(y: &[f64], r: f64) -> f64 {
    let n = y.len();
    let h = 1.0 / (n - 1) as f64;
    let r = r.clamp(0.0, 1.0);
    let i = ((r / h).floor() as usize).min(n - 2);
    let m = pchip_slopes(y);
    let t = (r - i as f64 * h) / h;
    let (t2, t3) = (t * t, t * t * t);
    (2.0 * t3 - 3.0 * t2 + 1.0) * y[i] + (t3 - 2.0 * t2 + t) * h * m[i] + (-2.0 * t3 + 3.0 * t2) * y[i + 1] + (t3 - t2) * h * m[i + 1]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureRule {
    /// Composite Gauss–Legendre on `m + n + 2` equal panels.
    GaussLegendre,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quadrature {
    pub rule: QuadratureRule,
    /// Nodes per panel.
    pub order: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self { rule: QuadratureRule::GaussLegendre, order: 8 }
    }
}

/// Gauss–Legendre nodes and weights on `[−1, 1]` from the Jacobi matrix.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut jacobi = DMatrix::zeros(order, order);
    for k in 1..order {
        let b = k as f64 / ((4 * k * k - 1) as f64).sqrt();
        jacobi[(k - 1, k)] = b;
        jacobi[(k, k - 1)] = b;
    }
    let (nodes, vecs) = linalg::sym_eigen(&jacobi);
    let weights = (0..order).map(|i| 2.0 * vecs[(0, i)] * vecs[(0, i)]).collect();
    (nodes.iter().copied().collect(), weights)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamConfig {
    pub a0: f64,
    pub damping: DampingProfile,
    pub n_modes: usize,
    #[serde(default)]
    pub quadrature: Quadrature,
}

impl BeamConfig {
    pub fn new(a0: f64, damping: DampingProfile, n_modes: usize) -> Self {
        Self { a0, damping, n_modes, quadrature: Quadrature::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a0 > 0.0 && self.a0.is_finite()) {
            return Err(PencilError::InvalidArgument(format!("a0 must be positive, got {}", self.a0)));
        }
        if self.n_modes == 0 {
            return Err(PencilError::InvalidArgument("n_modes must be at least 1".into()));
        }
        if self.quadrature.order == 0 {
            return Err(PencilError::InvalidArgument("quadrature order must be at least 1".into()));
        }
        self.damping.validate()
    }
}

/// `2mnπ² ∫₀¹ d(r) cos(mπr) cos(nπr) dr`.
pub fn damping_entry(profile: &DampingProfile, m: usize, n: usize, quadrature: &Quadrature) -> f64 {
    let (nodes, weights) = gauss_legendre(quadrature.order);
    damping_entry_with(profile, m, n, &nodes, &weights)
}

fn damping_entry_with(profile: &DampingProfile, m: usize, n: usize, nodes: &[f64], weights: &[f64]) -> f64 {
    let panels = m + n + 2;
    let (fm, fn_) = (m as f64 * PI, n as f64 * PI);
    let mut edges: Vec<f64> = (0..=panels).map(|p| p as f64 / panels as f64).collect();
    if let DampingProfile::Sampled { values } = profile {
        let knots = values.len() - 1;
        edges.extend((1..knots).map(|i| i as f64 / knots as f64));
        edges.sort_by(f64::total_cmp);
        edges.dedup_by(|a, b| (*a - *b).abs() <= 1e-15);
    }
    let mut sum = 0.0;
    for e in edges.windows(2) {
        let (mid, half) = (0.5 * (e[0] + e[1]), 0.5 * (e[1] - e[0]));
        for (x, w) in nodes.iter().zip(weights) {
            let r = mid + half * x;
            sum += half * w * profile.eval(r) * (fm * r).cos() * (fn_ * r).cos();
        }
    }
    2.0 * fm * fn_ * sum
}

/// Galerkin pencil of the beam in the first `n_modes` sine modes.
pub fn discretize_beam(cfg: &BeamConfig) -> Result<QuadraticPencil> {
    cfg.validate()?;
    let k = cfg.n_modes;
    let a0: Vec<f64> = (1..=k).map(|n| cfg.a0 * (n as f64 * PI).powi(4)).collect();
    let d = if let Some(c) = cfg.damping.is_constant() {
        DMatrix::from_diagonal(&DVector::from_iterator(k, (1..=k).map(|n| c * (n as f64 * PI).powi(2))))
    } else {
        let (nodes, weights) = gauss_legendre(cfg.quadrature.order);
        let mut d = DMatrix::zeros(k, k);
        for m in 1..=k {
            for n in m..=k {
                let v = damping_entry_with(&cfg.damping, m, n, &nodes, &weights);
                d[(m - 1, n - 1)] = v;
                d[(n - 1, m - 1)] = v;
            }
        }
        d
    };
    QuadraticPencil::from_matrices(DMatrix::from_diagonal(&DVector::from_vec(a0)), d)
}

/// `(−d ± √(d² − 4a₀))/2 · n²π²` for `n = 1..=n_modes`, larger root first.
pub fn beam_closed_form(cfg: &BeamConfig) -> Result<Vec<Complex64>> {
    let d = cfg
        .damping
        .is_constant()
        .ok_or_else(|| PencilError::InvalidArgument("closed form needs constant damping".into()))?;
    let disc = Complex64::new(d * d - 4.0 * cfg.a0, 0.0).sqrt();
    let mut out = Vec::with_capacity(2 * cfg.n_modes);
    for n in 1..=cfg.n_modes {
        let s = (n as f64 * PI).powi(2);
        out.push((-d + disc) / 2.0 * s);
        out.push((-d - disc) / 2.0 * s);
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct BeamBounds {
    pub d_min: f64,
    pub d_max: f64,
    /// `1/(1 − √(1 − 4a₀/d_min²))`.
    pub count_bound: f64,
    pub n_min_count: usize,
    /// Upper bounds for `n = 1..=n_modes`.
    pub upper_n: Vec<f64>,
    /// Lower bounds for `n = 1..=n_min_count`.
    pub lower_n: Vec<f64>,
    /// Left end `−d_min π²/2` of the interval on which the bounds hold.
    pub interval_lower: f64,
}

fn p_plus_branch(d: f64, a0: f64, n: usize) -> f64 {
    (-d + (d * d - 4.0 * a0).sqrt()) / 2.0 * (n as f64 * PI).powi(2)
}

/// Eigenvalue bounds from the constant-damping comparison pencils; `None`
/// when `d_min² < 4a₀`.
pub fn beam_bounds(cfg: &BeamConfig) -> Option<BeamBounds> {
    let (d_min, d_max) = cfg.damping.range();
    if d_min * d_min < 4.0 * cfg.a0 {
        return None;
    }
    let count_bound = 1.0 / (1.0 - (1.0 - 4.0 * cfg.a0 / (d_min * d_min)).sqrt());
    let mut n_min_count = 1;
    while ((n_min_count + 1) * (n_min_count + 1)) as f64 <= count_bound * (1.0 + 1e-12) {
        n_min_count += 1;
    }
    Some(BeamBounds {
        d_min,
        d_max,
        count_bound,
        n_min_count,
        upper_n: (1..=cfg.n_modes).map(|n| p_plus_branch(d_max, cfg.a0, n)).collect(),
        lower_n: (1..=n_min_count).map(|n| p_plus_branch(d_min, cfg.a0, n)).collect(),
        interval_lower: -d_min * PI * PI / 2.0,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BeamEigenvalueCheck {
    pub n: usize,
    pub lambda: f64,
    pub lower: Option<f64>,
    pub upper: f64,
    pub semisimple: bool,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BeamReport {
    pub bounds: BeamBounds,
    pub alpha_estimate: f64,
    /// `α ≤ −d_min π²/2` holds for the estimate.
    pub alpha_ok: bool,
    pub n_found: usize,
    pub eigenvalues: Vec<BeamEigenvalueCheck>,
    /// Constant damping only: largest deviation from the closed form.
    pub closed_form_error: Option<f64>,
    /// Assumption checks `𝔞₀[x] ≥ a₀π⁴‖x‖²` and `𝔞₀[x] ≥ (a₀π²/d_max)𝔡[x]` on random `x`.
    pub form_inequalities_ok: bool,
    pub passed: bool,
}

/// Eigenvalues in `(−d_min π²/2, 0]` against the closed-form bounds.
pub fn verify_beam_theorem(cfg: &BeamConfig, tol: f64) -> Result<BeamReport> {
    let bounds = beam_bounds(cfg)
        .ok_or_else(|| PencilError::InvalidArgument("bounds need d_min^2 >= 4 a0".into()))?;
    let pencil = discretize_beam(cfg)?;
    let alpha = pencil.compute_alpha(&AlphaSearch::default(), 0);
    let alpha_ok = alpha.value <= bounds.interval_lower * (1.0 - 1e-12);
    let interval = IntervalDelta::new(bounds.interval_lower, alpha.value.min(bounds.interval_lower))?;
    let bracket_tol = 1e-11 * bounds.interval_lower.abs();
    let result = locate_real_eigenvalues(&pencil, &interval, bracket_tol)?;

    let mut semisimple = Vec::new();
    for d in &result.per_eigenvalue {
        semisimple.extend(std::iter::repeat(d.semisimple).take(d.multiplicity));
    }
    let eigenvalues: Vec<BeamEigenvalueCheck> = result
        .eigenvalues
        .iter()
        .zip(semisimple)
        .enumerate()
        .map(|(i, (&lambda, semisimple))| {
            let lower = bounds.lower_n.get(i).copied();
            let upper = bounds.upper_n.get(i).copied().unwrap_or(0.0);
            let ok = semisimple && lambda <= upper + tol && lower.map_or(true, |l| lambda >= l - tol);
            BeamEigenvalueCheck { n: i + 1, lambda, lower, upper, semisimple, ok }
        })
        .collect();

    let closed_form_error = cfg.damping.is_constant().map(|d| {
        eigenvalues.iter().map(|e| (e.lambda - p_plus_branch(d, cfg.a0, e.n)).abs()).fold(0.0, f64::max)
    });

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let form_inequalities_ok = (0..200).all(|_| {
        let x = linalg::random_vector(pencil.dim(), &mut rng);
        let a = pencil.stiffness().quad_form(&x);
        let d = pencil.damping().quad_form(&x);
        let slack = 1e-12 * a;
        a >= cfg.a0 * PI.powi(4) * x.norm_squared() - slack && a >= cfg.a0 * PI * PI / bounds.d_max * d - slack
    });

    let n_found = result.n_found;
    let passed = alpha_ok
        && n_found >= 1
        && n_found >= bounds.n_min_count
        && eigenvalues.iter().all(|e| e.ok)
        && form_inequalities_ok
        && closed_form_error.map_or(true, |e| e <= tol);
    Ok(BeamReport { bounds, alpha_estimate: alpha.value, alpha_ok, n_found, eigenvalues, closed_form_error, form_inequalities_ok, passed })
}
