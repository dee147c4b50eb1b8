//! Derivative-free simplex minimization with restarts.

use crate::error::{usage, Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct NelderMeadOptions {
    pub initial_step: f64,
    /// Stop when the spread of simplex values and the simplex diameter both fall below this.
    pub tol: f64,
    pub max_evaluations: usize,
    /// Fresh simplices built around the incumbent after convergence.
    pub restarts: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions {
            initial_step: 0.25,
            tol: 1e-6,
            max_evaluations: 4000,
            restarts: 2,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SimplexMinimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

pub fn nelder_mead<F>(mut f: F, x0: &[f64], opts: &NelderMeadOptions) -> Result<SimplexMinimum>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    if x0.is_empty() {
        return usage("empty starting point");
    }
    let mut evals = 0;
    let mut best = run(&mut f, x0, opts, opts.initial_step, &mut evals)?;
    for r in 0..opts.restarts {
        if evals >= opts.max_evaluations {
            break;
        }
        let step = opts.initial_step * 0.5f64.powi(r as i32 + 1);
        let again = run(&mut f, &best.x.clone(), opts, step, &mut evals)?;
        let improved = again.value < best.value - opts.tol;
        if again.value <= best.value {
            best = SimplexMinimum {
                converged: again.converged,
                ..again
            };
        }
        if !improved {
            break;
        }
    }
    best.evaluations = evals;
    Ok(best)
}

fn value<F: FnMut(&[f64]) -> Result<f64>>(f: &mut F, x: &[f64], evals: &mut usize) -> Result<f64> {
    *evals += 1;
    let v = f(x)?;
    if v.is_nan() {
        return Err(Error::Optimizer(format!("objective is NaN at {x:?}")));
    }
    Ok(v)
}

fn run<F>(f: &mut F, x0: &[f64], opts: &NelderMeadOptions, step: f64, evals: &mut usize) -> Result<SimplexMinimum>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let n = x0.len();
    let mut pts: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += step;
        pts.push(p);
    }
    let mut vals = Vec::with_capacity(n + 1);
    for p in &pts {
        vals.push(value(f, p, evals)?);
    }

    loop {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();

        let spread = vals[n] - vals[0];
        let diameter = pts[1..]
            .iter()
            .map(|p| p.iter().zip(&pts[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if spread <= opts.tol && diameter <= opts.tol {
            return Ok(SimplexMinimum {
                x: pts[0].clone(),
                value: vals[0],
                evaluations: *evals,
                converged: true,
            });
        }
        if *evals >= opts.max_evaluations {
            return Ok(SimplexMinimum {
                x: pts[0].clone(),
                value: vals[0],
                evaluations: *evals,
                converged: false,
            });
        }

        let centroid: Vec<f64> = (0..n)
            .map(|d| pts[..n].iter().map(|p| p[d]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&pts[n])
                .map(|(c, w)| c + t * (w - c))
                .collect()
        };
        let xr = along(-1.0);
        let fr = value(f, &xr, evals)?;
        if fr < vals[0] {
            let xe = along(-2.0);
            let fe = value(f, &xe, evals)?;
            if fe < fr {
                pts[n] = xe;
                vals[n] = fe;
            } else {
                pts[n] = xr;
                vals[n] = fr;
            }
            continue;
        }
        if fr < vals[n - 1] {
            pts[n] = xr;
            vals[n] = fr;
            continue;
        }
        let (xc, fc) = if fr < vals[n] {
            let xc = along(-0.5);
            let fc = value(f, &xc, evals)?;
            (xc, fc)
        } else {
            let xc = along(0.5);
            let fc = value(f, &xc, evals)?;
            (xc, fc)
        };
        if fc < vals[n].min(fr) {
            pts[n] = xc;
            vals[n] = fc;
            continue;
        }
        for i in 1..=n {
            let shrunk: Vec<f64> = pts[i].iter().zip(&pts[0]).map(|(p, b)| b + 0.5 * (p - b)).collect();
            vals[i] = value(f, &shrunk, evals)?;
            pts[i] = shrunk;
        }
    }
}
