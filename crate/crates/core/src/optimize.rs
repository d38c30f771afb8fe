//! Derivative-free local search used for the extended-valued Rayleigh
//! functionals, which are `±∞` off their natural domain.

use nalgebra::DVector;

#[derive(Debug, Clone, Copy)]
pub struct NelderMeadOptions {
    pub initial_step: f64,
    pub max_evals: usize,
    /// Stop when the spread of simplex values drops below `f_tol · (1 + |f_best|)`.
    pub f_tol: f64,
    /// Also requires the simplex diameter to fall below this.
    pub x_tol: f64,
    /// Fresh simplices built around the current best point.
    pub restarts: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            initial_step: 0.25,
            max_evals: 4000,
            f_tol: 1e-13,
            x_tol: 1e-10,
            restarts: 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub point: DVector<f64>,
    pub value: f64,
    pub evals: usize,
}

/// Nelder–Mead minimization. `f` may return `+∞` (treated as an infeasible
/// point) and `-∞` (which ends the search immediately).
pub fn nelder_mead<F>(f: F, start: &DVector<f64>, opts: &NelderMeadOptions) -> Minimum
where
    F: Fn(&DVector<f64>) -> f64,
{
    let mut best = Minimum {
        point: start.clone(),
        value: f(start),
        evals: 1,
    };
    let mut step = opts.initial_step;
    for _ in 0..=opts.restarts {
        if best.value == f64::NEG_INFINITY || best.evals >= opts.max_evals {
            break;
        }
        let budget = opts.max_evals - best.evals;
        let run = nelder_mead_once(&f, &best.point, step, budget, opts);
        let improved = run.value < best.value;
        let evals = best.evals + run.evals;
        if improved {
            best = Minimum { evals, ..run };
        } else {
            best.evals = evals;
        }
        step *= 0.1;
    }
    best
}

fn nelder_mead_once<F>(
    f: &F,
    start: &DVector<f64>,
    step: f64,
    budget: usize,
    opts: &NelderMeadOptions,
) -> Minimum
where
    F: Fn(&DVector<f64>) -> f64,
{
    const REFLECT: f64 = 1.0;
    const EXPAND: f64 = 2.0;
    const CONTRACT: f64 = 0.5;
    const SHRINK: f64 = 0.5;

    let n = start.len();
    let scale = start.norm().max(1.0);
    let mut simplex: Vec<(DVector<f64>, f64)> = Vec::with_capacity(n + 1);
    let mut evals = 0usize;
    let eval = |x: &DVector<f64>, evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    simplex.push((start.clone(), eval(start, &mut evals)));
    for i in 0..n {
        let mut x = start.clone();
        let h = if start[i].abs() > 1e-12 { step * start[i].abs().max(0.1 * scale) } else { step * scale };
        x[i] += h;
        let v = eval(&x, &mut evals);
        simplex.push((x, v));
    }

    while evals < budget {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let f_best = simplex[0].1;
        let f_worst = simplex[n].1;
        if f_best == f64::NEG_INFINITY {
            break;
        }
        let diameter = simplex
            .iter()
            .skip(1)
            .map(|(x, _)| (x - &simplex[0].0).norm())
            .fold(0.0, f64::max);
        if f_worst.is_finite()
            && (f_worst - f_best) <= opts.f_tol * (1.0 + f_best.abs())
            && diameter <= opts.x_tol * scale
        {
            break;
        }
        if diameter <= 1e-15 * scale {
            break;
        }

        let mut centroid = DVector::zeros(n);
        for (x, _) in simplex.iter().take(n) {
            centroid += x;
        }
        centroid /= n as f64;

        let worst = simplex[n].0.clone();
        let reflected = &centroid + (&centroid - &worst) * REFLECT;
        let f_r = eval(&reflected, &mut evals);

        if f_r < simplex[0].1 {
            let expanded = &centroid + (&reflected - &centroid) * EXPAND;
            let f_e = eval(&expanded, &mut evals);
            simplex[n] = if f_e < f_r { (expanded, f_e) } else { (reflected, f_r) };
            continue;
        }
        if f_r < simplex[n - 1].1 {
            simplex[n] = (reflected, f_r);
            continue;
        }
        let (contracted, f_c) = if f_r < f_worst {
            let c = &centroid + (&reflected - &centroid) * CONTRACT;
            let v = eval(&c, &mut evals);
            (c, v)
        } else {
            let c = &centroid + (&worst - &centroid) * CONTRACT;
            let v = eval(&c, &mut evals);
            (c, v)
        };
        if f_c < f_worst.min(f_r) {
            simplex[n] = (contracted, f_c);
            continue;
        }
        let anchor = simplex[0].0.clone();
        for entry in simplex.iter_mut().skip(1) {
            let x = &anchor + (&entry.0 - &anchor) * SHRINK;
            let v = eval(&x, &mut evals);
            *entry = (x, v);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (point, value) = simplex.swap_remove(0);
    Minimum { point, value, evals }
}
