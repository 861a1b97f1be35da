use serde::{Deserialize, Serialize};

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NelderMeadOptions {
    /// Stop once every vertex lies within this ∞-norm distance of the best one.
    pub tolerance: f64,
    pub max_evals: usize,
    /// Edge length of the initial axis-aligned simplex.
    pub simplex_scale: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self { tolerance: super::DEFAULT_MIN_TOL, max_evals: 20_000, simplex_scale: 0.25 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MinimizeResult {
    pub x: Vec<f64>,
    pub fx: f64,
    pub evals: usize,
    /// False when `max_evals` ran out first; `x` is then the best point seen.
    pub converged: bool,
}

/// Derivative-free local minimization of `f` from `x0`.
///
/// The caller encodes any domain restriction as a large finite penalty; NaN
/// values are treated as `+∞`.
pub fn minimize<F>(mut f: F, x0: &[f64], opts: &NelderMeadOptions) -> MinimizeResult
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    if n == 0 {
        let fx = eval(x0, &mut evals);
        return MinimizeResult { x: Vec::new(), fx, evals, converged: true };
    }

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let f0 = eval(x0, &mut evals);
    simplex.push((x0.to_vec(), f0));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += opts.simplex_scale;
        let fx = eval(&x, &mut evals);
        simplex.push((x, fx));
    }

    let converged = loop {
        // Stable sort keeps earlier vertices first on ties.
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if diameter <= opts.tolerance {
            break true;
        }
        if evals >= opts.max_evals {
            break false;
        }

        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, v) in centroid.iter_mut().zip(x) {
                *c += v;
            }
        }
        centroid.iter_mut().for_each(|c| *c /= n as f64);
        let along =
            |t: f64, from: &[f64]| -> Vec<f64> { centroid.iter().zip(from).map(|(c, w)| c + t * (c - w)).collect() };

        let worst = simplex[n].0.clone();
        let f_best = simplex[0].1;
        let f_second = simplex[n - 1].1;
        let f_worst = simplex[n].1;

        let xr = along(REFLECT, &worst);
        let fr = eval(&xr, &mut evals);
        if fr < f_best {
            let xe = along(EXPAND, &worst);
            let fe = eval(&xe, &mut evals);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < f_second {
            simplex[n] = (xr, fr);
            continue;
        }
        if fr < f_worst {
            let xc = along(CONTRACT * REFLECT, &worst);
            let fc = eval(&xc, &mut evals);
            if fc <= fr {
                simplex[n] = (xc, fc);
                continue;
            }
        } else {
            let xc = along(-CONTRACT, &worst);
            let fc = eval(&xc, &mut evals);
            if fc < f_worst {
                simplex[n] = (xc, fc);
                continue;
            }
        }
        let best = simplex[0].0.clone();
        for (x, fx) in simplex.iter_mut().skip(1) {
            for (xi, bi) in x.iter_mut().zip(&best) {
                *xi = bi + SHRINK * (*xi - bi);
            }
            *fx = eval(x, &mut evals);
        }
    };

    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, fx) = simplex.swap_remove(0);
    MinimizeResult { x, fx, evals, converged }
}
