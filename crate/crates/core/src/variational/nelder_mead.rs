//! Derivative-free simplex descent (Nelder-Mead) for small dimensions.

#[derive(Debug, Clone, Copy)]
pub struct NelderMeadOptions {
    /// Stop when `f_max - f_min <= ftol * |f_min|`
    pub ftol: f64,
    /// and the simplex diameter is at most `xtol`.
    pub xtol: f64,
    pub max_iter: usize,
    /// Reflection, expansion, contraction, shrink.
    pub alpha: f64,
    pub gamma: f64,
    pub beta: f64,
    pub sigma: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions {
            ftol: 1e-10,
            xtol: 1e-9,
            max_iter: 10_000,
            alpha: 1.0,
            gamma: 2.0,
            beta: 0.5,
            sigma: 0.5,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

fn diameter(simplex: &[Vec<f64>]) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..simplex.len() {
        for j in i + 1..simplex.len() {
            let dist = simplex[i]
                .iter()
                .zip(&simplex[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            d = d.max(dist);
        }
    }
    d
}

/// Minimise `f` starting from an axis-aligned simplex of edge `step` at `x0`.
pub fn nelder_mead<F>(f: F, x0: &[f64], step: f64, opts: &NelderMeadOptions) -> NelderMeadResult
where
    F: Fn(&[f64]) -> f64,
{
    let n = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64]| {
        evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step;
        simplex.push(x);
    }
    let mut values: Vec<f64> = simplex.iter().map(|x| eval(x)).collect();

    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        // order best..worst
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let spread = values[n] - values[0];
        if spread <= opts.ftol * values[0].abs().max(1e-300) && diameter(&simplex) <= opts.xtol {
            converged = true;
            break;
        }
        iterations += 1;

        let centroid: Vec<f64> = (0..n)
            .map(|k| simplex[..n].iter().map(|x| x[k]).sum::<f64>() / n as f64)
            .collect();
        let along = |coef: f64| -> Vec<f64> {
            (0..n)
                .map(|k| centroid[k] + coef * (simplex[n][k] - centroid[k]))
                .collect()
        };

        let xr = along(-opts.alpha);
        let fr = eval(&xr);
        if fr < values[0] {
            let xe = along(-opts.alpha * opts.gamma);
            let fe = eval(&xe);
            if fe < fr {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            simplex[n] = xr;
            values[n] = fr;
            continue;
        }
        // contraction: outside if the reflection improved on the worst point
        let (xc, fc) = if fr < values[n] {
            let xc = along(-opts.alpha * opts.beta);
            let fc = eval(&xc);
            (xc, fc)
        } else {
            let xc = along(opts.beta);
            let fc = eval(&xc);
            (xc, fc)
        };
        if fc < values[n].min(fr) {
            simplex[n] = xc;
            values[n] = fc;
            continue;
        }
        // shrink towards the best vertex
        let best = simplex[0].clone();
        for i in 1..=n {
            for k in 0..n {
                simplex[i][k] = best[k] + opts.sigma * (simplex[i][k] - best[k]);
            }
            values[i] = eval(&simplex[i]);
        }
    }

    let (ib, fb) = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, v)| (i, *v))
        .unwrap();
    NelderMeadResult {
        x: simplex[ib].clone(),
        f: fb,
        iterations,
        evaluations: evals,
        converged,
    }
}
