//! Trapezoidal time stepping of `z̈ + Dż + A₀z = 0` in the energy coordinates
//! `(A₀^{1/2}z, ż)`, where the energy is the plain squared norm.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{PencilError, Result};
use crate::linearization::LinearizedSystem;
use crate::pencil::QuadraticPencil;

#[derive(Debug, Clone, Serialize)]
pub struct Snapshot {
    pub time: f64,
    pub z: Vec<f64>,
    pub w: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationTrace {
    pub times: Vec<f64>,
    /// `‖A₀^{1/2}z‖² + ‖w‖²`.
    pub energies: Vec<f64>,
    /// `2𝔡[w]` at each recorded time.
    pub dissipation: Vec<f64>,
    /// `2𝔡[w_{k+1/2}]` at the midpoint of each step.
    pub midpoint_dissipation: Vec<f64>,
    pub states: Vec<Snapshot>,
    pub dt: f64,
}

impl SimulationTrace {
    /// Largest `E_{k+1} − E_k` relative to `E(0)` (≤ 0 for a contraction).
    pub fn max_energy_increase(&self) -> f64 {
        let e0 = self.energies[0].max(f64::MIN_POSITIVE);
        self.energies.windows(2).map(|w| (w[1] - w[0]) / e0).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest `|E_{k+1} − E_k + dt·2𝔡[w_{k+1/2}]|` relative to `E(0)`.
    pub fn energy_identity_defect(&self) -> f64 {
        let e0 = self.energies[0].max(f64::MIN_POSITIVE);
        self.energies
            .windows(2)
            .zip(&self.midpoint_dissipation)
            .map(|(w, q)| (w[1] - w[0] + self.dt * q).abs() / e0)
            .fold(0.0, f64::max)
    }

    pub fn is_monotone(&self, rel_tol: f64) -> bool {
        self.energies.len() < 2 || self.max_energy_increase() <= rel_tol
    }
}

/// Integrates from `(z0, w0)` to `t_final` with `round(t_final/dt)` equal
/// steps, keeping about 100 state snapshots.
pub fn simulate(pencil: &QuadraticPencil, z0: &DVector<f64>, w0: &DVector<f64>, t_final: f64, dt: f64) -> Result<SimulationTrace> {
    let n = pencil.dim();
    for (v, name) in [(z0, "z0"), (w0, "w0")] {
        if v.len() != n {
            return Err(PencilError::InvalidArgument(format!("{name} has length {}, expected {n}", v.len())));
        }
    }
    if !(dt > 0.0 && dt.is_finite()) || !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(PencilError::InvalidArgument(format!("need dt > 0 and t_final >= 0, got dt={dt}, t_final={t_final}")));
    }
    let steps = if t_final == 0.0 { 0 } else { ((t_final / dt).round() as usize).max(1) };
    let h = if steps == 0 { dt } else { t_final / steps as f64 };

    let a = LinearizedSystem::new(pencil).matrix().clone();
    let id = DMatrix::<f64>::identity(2 * n, 2 * n);
    let implicit = (&id - &a * (0.5 * h)).lu();
    let explicit = &id + &a * (0.5 * h);
    let a0_sqrt = pencil.a0_sqrt();
    let a0_inv_sqrt = pencil.a0_inv_sqrt();
    let d = pencil.damping();

    let mut y = DVector::zeros(2 * n);
    y.rows_mut(0, n).copy_from(&(a0_sqrt * z0));
    y.rows_mut(n, n).copy_from(w0);

    let stride = (steps / 100).max(1);
    let record = |y: &DVector<f64>, t: f64| Snapshot {
        time: t,
        z: (a0_inv_sqrt * y.rows(0, n)).iter().copied().collect(),
        w: y.rows(n, n).iter().copied().collect(),
    };
    let mut trace = SimulationTrace {
        times: Vec::with_capacity(steps + 1),
        energies: Vec::with_capacity(steps + 1),
        dissipation: Vec::with_capacity(steps + 1),
        midpoint_dissipation: Vec::with_capacity(steps),
        states: vec![record(&y, 0.0)],
        dt: h,
    };
    trace.times.push(0.0);
    trace.energies.push(y.norm_squared());
    trace.dissipation.push(2.0 * d.quad_form(&y.rows(n, n).into_owned()));

    for k in 1..=steps {
        let next = implicit
            .solve(&(&explicit * &y))
            .ok_or_else(|| PencilError::Computation("singular trapezoidal system".into()))?;
        let mid_w = (y.rows(n, n) + next.rows(n, n)) * 0.5;
        trace.midpoint_dissipation.push(2.0 * d.quad_form(&mid_w));
        y = next;
        let t = k as f64 * h;
        trace.times.push(t);
        trace.energies.push(y.norm_squared());
        trace.dissipation.push(2.0 * d.quad_form(&y.rows(n, n).into_owned()));
        if k % stride == 0 || k == steps {
            trace.states.push(record(&y, t));
        }
    }
    Ok(trace)
}

#[derive(Debug, Clone, Serialize)]
pub struct AbscissaReport {
    pub fitted_slope: f64,
    /// `2·max Re σ(𝒜)`.
    pub expected_slope: f64,
    pub relative_error: f64,
    pub fit_start: f64,
    pub points: usize,
    pub passed: bool,
}

/// Relative tolerance on the fitted decay rate.
pub const SLOPE_TOL: f64 = 0.05;

/// Least-squares slope of `log E(t)` over the second half of the trace,
/// compared with twice the spectral abscissa.
pub fn spectral_abscissa_consistency(pencil: &QuadraticPencil, trace: &SimulationTrace) -> Result<AbscissaReport> {
    let spectrum = LinearizedSystem::new(pencil).full_spectrum()?;
    let expected_slope = 2.0 * spectrum.max_real_part().min(0.0);
    let t_end = *trace.times.last().expect("trace has an initial record");
    let fit_start = 0.5 * t_end;
    let (ts, ls): (Vec<f64>, Vec<f64>) = trace
        .times
        .iter()
        .zip(&trace.energies)
        .filter(|(t, e)| **t >= fit_start && **e > 0.0)
        .map(|(t, e)| (*t, e.ln()))
        .unzip();
    if ts.len() < 2 {
        return Err(PencilError::InvalidArgument("trace too short for a slope fit".into()));
    }
    let m = ts.len() as f64;
    let tm = ts.iter().sum::<f64>() / m;
    let lm = ls.iter().sum::<f64>() / m;
    let sxy: f64 = ts.iter().zip(&ls).map(|(t, l)| (t - tm) * (l - lm)).sum();
    let sxx: f64 = ts.iter().map(|t| (t - tm) * (t - tm)).sum();
    let fitted_slope = sxy / sxx;
    let err = (fitted_slope - expected_slope).abs();
    let relative_error = if expected_slope == 0.0 { err } else { err / expected_slope.abs() };
    let passed = err <= SLOPE_TOL * expected_slope.abs() + 1e-8;
    Ok(AbscissaReport { fitted_slope, expected_slope, relative_error, fit_start, points: ts.len(), passed })
}
