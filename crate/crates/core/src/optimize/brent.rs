//! Bounded scalar minimization (golden section with parabolic steps).

use crate::error::{usage, Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct BrentOptions {
    /// Absolute tolerance on the abscissa.
    pub xtol: f64,
    pub max_iterations: usize,
}

impl Default for BrentOptions {
    fn default() -> Self {
        BrentOptions {
            xtol: 1e-5,
            max_iterations: 500,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Minimizes `f` on `[a, b]`. Errors from `f` abort the search.
pub fn minimize_bounded<F>(mut f: F, a: f64, b: f64, opts: &BrentOptions) -> Result<Minimum>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return usage(format!("invalid bracket [{a}, {b}]"));
    }
    let golden = 0.5 * (3.0 - 5f64.sqrt());
    let sqrt_eps = f64::EPSILON.sqrt();
    let (mut lo, mut hi) = (a, b);
    let mut x = lo + golden * (hi - lo);
    let (mut w, mut v) = (x, x);
    let mut fx = eval(&mut f, x)?;
    let (mut fw, mut fv) = (fx, fx);
    let mut evaluations = 1;
    let (mut d, mut e): (f64, f64) = (0.0, 0.0);

    for _ in 0..opts.max_iterations {
        let mid = 0.5 * (lo + hi);
        let tol1 = sqrt_eps * x.abs() + opts.xtol / 3.0;
        let tol2 = 2.0 * tol1;
        if (x - mid).abs() <= tol2 - 0.5 * (hi - lo) {
            return Ok(Minimum {
                x,
                value: fx,
                evaluations,
                converged: true,
            });
        }
        let mut golden_step = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let e_prev = e;
            e = d;
            if p.abs() < (0.5 * q * e_prev).abs() && p > q * (lo - x) && p < q * (hi - x) {
                d = p / q;
                let u = x + d;
                if u - lo < tol2 || hi - u < tol2 {
                    d = if mid >= x { tol1 } else { -tol1 };
                }
                golden_step = false;
            }
        }
        if golden_step {
            e = if x >= mid { lo - x } else { hi - x };
            d = golden * e;
        }
        let u = if d.abs() >= tol1 {
            x + d
        } else if d > 0.0 {
            x + tol1
        } else {
            x - tol1
        };
        let fu = eval(&mut f, u)?;
        evaluations += 1;
        if fu <= fx {
            if u >= x {
                lo = x;
            } else {
                hi = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                lo = u;
            } else {
                hi = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    Ok(Minimum {
        x,
        value: fx,
        evaluations,
        converged: false,
    })
}

fn eval<F: FnMut(f64) -> Result<f64>>(f: &mut F, x: f64) -> Result<f64> {
    let v = f(x)?;
    if v.is_nan() {
        return Err(Error::Optimizer(format!("objective is NaN at {x}")));
    }
    Ok(v)
}

/// Evaluates `f` on `n` equally spaced points of `[a, b]` and refines around
/// the best one with [`minimize_bounded`]. Guards against multimodal objectives.
pub fn scan_then_refine<F>(mut f: F, a: f64, b: f64, n: usize, opts: &BrentOptions) -> Result<Minimum>
where
    F: FnMut(f64) -> Result<f64>,
{
    if n < 3 {
        return usage("scan needs at least three points");
    }
    let step = (b - a) / (n - 1) as f64;
    let mut best = (0, f64::INFINITY);
    for i in 0..n {
        let v = eval(&mut f, a + step * i as f64)?;
        if v < best.1 {
            best = (i, v);
        }
    }
    let lo = a + step * best.0.saturating_sub(1) as f64;
    let hi = (a + step * (best.0 + 1) as f64).min(b);
    let mut m = minimize_bounded(&mut f, lo, hi, opts)?;
    m.evaluations += n;
    if best.1 < m.value {
        m.x = a + step * best.0 as f64;
        m.value = best.1;
    }
    Ok(m)
}
