//! Adaptive Dormand–Prince 5(4) integration of `i ∂ₜψ = H(t) ψ`.
//!
//! Step control is the PI controller of Hairer, Nørsett and Wanner with a
//! mixed absolute/relative RMS error norm. Steps are shortened so that every
//! requested sample time is hit exactly; no interpolation is involved.

use num_complex::Complex64;

use super::state::{norm, CompiledOperator, StateVector};
use crate::error::{usage, Error, Result};
use crate::pauli::PauliSum;

/// A time-dependent Hamiltonian.
pub trait HamiltonianProvider: Sync {
    fn len(&self) -> usize;
    fn hamiltonian_at(&self, t: f64) -> Result<PauliSum>;

    fn compiled_at(&self, t: f64) -> Result<CompiledOperator> {
        Ok(CompiledOperator::new(&self.hamiltonian_at(t)?))
    }
}

/// A time-independent Hamiltonian.
pub struct Static {
    op: CompiledOperator,
    h: PauliSum,
}

impl Static {
    pub fn new(h: PauliSum) -> Self {
        Static {
            op: CompiledOperator::new(&h),
            h,
        }
    }
}

impl HamiltonianProvider for Static {
    fn len(&self) -> usize {
        self.h.len()
    }
    fn hamiltonian_at(&self, _t: f64) -> Result<PauliSum> {
        Ok(self.h.clone())
    }
    fn compiled_at(&self, _t: f64) -> Result<CompiledOperator> {
        Ok(self.op.clone())
    }
}

/// Wraps a closure `t ↦ H(t)`.
pub struct FnHamiltonian<F> {
    len: usize,
    f: F,
}

impl<F> FnHamiltonian<F>
where
    F: Fn(f64) -> Result<PauliSum> + Sync,
{
    pub fn new(len: usize, f: F) -> Self {
        FnHamiltonian { len, f }
    }
}

impl<F> HamiltonianProvider for FnHamiltonian<F>
where
    F: Fn(f64) -> Result<PauliSum> + Sync,
{
    fn len(&self) -> usize {
        self.len
    }
    fn hamiltonian_at(&self, t: f64) -> Result<PauliSum> {
        (self.f)(t)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct EvolveOptions {
    /// Used as both absolute and relative tolerance.
    pub tol: f64,
    pub max_steps: usize,
    /// Steps below `min_step · |t1 − t0|` abort with a stiffness error.
    pub min_step: f64,
    /// Renormalize at a sample when `|‖ψ‖ − 1|` exceeds this.
    pub renorm_threshold: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            tol: 1e-8,
            max_steps: 10_000_000,
            min_step: 1e-14,
            renorm_threshold: 1e-9,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
    /// `‖ψ‖ − 1` at each sample before any renormalization.
    pub norm_drift: Vec<f64>,
    pub max_norm_drift: f64,
    pub steps_accepted: usize,
    pub steps_rejected: usize,
    pub renormalized: usize,
}

impl Trajectory {
    pub fn final_state(&self) -> &StateVector {
        self.states.last().expect("trajectory has at least one sample")
    }
}

/// `n` equally spaced times covering `[t0, t1]` inclusive.
pub fn uniform_times(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![t1],
        _ => (0..n)
            .map(|k| {
                if k == n - 1 {
                    t1
                } else {
                    t0 + (t1 - t0) * k as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

// Dormand–Prince tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const BETA: f64 = 0.04;
const EXPO1: f64 = 0.2 - BETA * 0.75;

struct Rhs<'a, P: HamiltonianProvider + ?Sized> {
    provider: &'a P,
    minus_i: Complex64,
}

impl<P: HamiltonianProvider + ?Sized> Rhs<'_, P> {
    /// `out = −i H(t) ψ`.
    fn eval(&self, t: f64, psi: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        let op = self.provider.compiled_at(t)?;
        op.apply_into(psi, out);
        for o in out.iter_mut() {
            *o *= self.minus_i;
        }
        Ok(())
    }
}

fn combo(y: &[Complex64], h: f64, terms: &[(f64, &[Complex64])], out: &mut [Complex64]) {
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for &(a, k) in terms {
            acc += k[i] * a;
        }
        *o = y[i] + acc * h;
    }
}

/// Integrates from `t0` to `t1`, storing states at `times` (ascending, within
/// `[t0, t1]`). A sample at `t0` stores `psi0` itself; with no samples only
/// `t1` is stored.
pub fn evolve<P: HamiltonianProvider + ?Sized>(
    provider: &P,
    psi0: &StateVector,
    t0: f64,
    t1: f64,
    times: &[f64],
    opts: &EvolveOptions,
) -> Result<Trajectory> {
    if provider.len() != psi0.len() {
        return usage(format!(
            "Hamiltonian on {} sites, state on {}",
            provider.len(),
            psi0.len()
        ));
    }
    if !(t1 >= t0) || !t0.is_finite() || !t1.is_finite() {
        return usage(format!("invalid time window [{t0}, {t1}]"));
    }
    if !(opts.tol > 0.0) {
        return usage("tolerance must be positive");
    }
    let span = t1 - t0;
    let slack = 1e-12 * span.max(1.0);
    for w in times.windows(2) {
        if w[1] < w[0] {
            return usage("sample times must be ascending");
        }
    }
    if times.iter().any(|&t| t < t0 - slack || t > t1 + slack) {
        return usage("sample time outside the integration window");
    }
    let mut samples: Vec<f64> = times.iter().map(|&t| t.clamp(t0, t1)).collect();
    if samples.is_empty() {
        samples.push(t1);
    }

    let dim = psi0.dim();
    let rhs = Rhs {
        provider,
        minus_i: Complex64::new(0.0, -1.0),
    };
    let zero = Complex64::new(0.0, 0.0);
    let mut y: Vec<Complex64> = psi0.amplitudes().to_vec();
    let mut k: Vec<Vec<Complex64>> = (0..7).map(|_| vec![zero; dim]).collect();
    let mut tmp = vec![zero; dim];
    let mut y_new = vec![zero; dim];

    let mut traj = Trajectory {
        times: Vec::with_capacity(samples.len()),
        states: Vec::with_capacity(samples.len()),
        norm_drift: Vec::with_capacity(samples.len()),
        max_norm_drift: 0.0,
        steps_accepted: 0,
        steps_rejected: 0,
        renormalized: 0,
    };

    let mut t = t0;
    let mut next = 0;
    let record = |t: f64, y: &mut Vec<Complex64>, traj: &mut Trajectory| {
        let n = norm(y);
        let drift = n - 1.0;
        if drift.abs() > opts.renorm_threshold {
            y.iter_mut().for_each(|a| *a /= n);
            traj.renormalized += 1;
        }
        traj.max_norm_drift = traj.max_norm_drift.max(drift.abs());
        traj.times.push(t);
        traj.norm_drift.push(drift);
        traj.states.push(StateVector::from_raw(psi0.len(), y.clone()));
    };
    while next < samples.len() && samples[next] <= t0 {
        record(t0, &mut y, &mut traj);
        next += 1;
    }
    if next == samples.len() {
        return Ok(traj);
    }

    rhs.eval(t, &y, &mut k[0])?;
    let scale0 = norm(&k[0]).max(1e-10);
    let mut h = (0.01 / scale0).min(span);
    let mut err_old: f64 = 1e-4;
    let mut reject = false;
    let last_target = samples[samples.len() - 1];

    while t < last_target {
        if traj.steps_accepted + traj.steps_rejected >= opts.max_steps {
            return Err(Error::StiffFailure { t, step: h });
        }
        let target = samples[next];
        let mut step = h;
        let mut lands = false;
        if t + step >= target - 1e-14 * span.max(1.0) {
            step = target - t;
            lands = true;
        }
        if step < opts.min_step * span && !lands {
            return Err(Error::StiffFailure { t, step });
        }

        {
            let (k1, rest) = k.split_at_mut(1);
            combo(&y, step, &[(A21, &k1[0])], &mut tmp);
            rhs.eval(t + C2 * step, &tmp, &mut rest[0])?;
        }
        {
            let (a, b) = k.split_at_mut(2);
            combo(&y, step, &[(A31, &a[0]), (A32, &a[1])], &mut tmp);
            rhs.eval(t + C3 * step, &tmp, &mut b[0])?;
        }
        {
            let (a, b) = k.split_at_mut(3);
            combo(&y, step, &[(A41, &a[0]), (A42, &a[1]), (A43, &a[2])], &mut tmp);
            rhs.eval(t + C4 * step, &tmp, &mut b[0])?;
        }
        {
            let (a, b) = k.split_at_mut(4);
            combo(
                &y,
                step,
                &[(A51, &a[0]), (A52, &a[1]), (A53, &a[2]), (A54, &a[3])],
                &mut tmp,
            );
            rhs.eval(t + C5 * step, &tmp, &mut b[0])?;
        }
        {
            let (a, b) = k.split_at_mut(5);
            combo(
                &y,
                step,
                &[(A61, &a[0]), (A62, &a[1]), (A63, &a[2]), (A64, &a[3]), (A65, &a[4])],
                &mut tmp,
            );
            rhs.eval(t + step, &tmp, &mut b[0])?;
        }
        {
            let (a, b) = k.split_at_mut(6);
            combo(
                &y,
                step,
                &[(A71, &a[0]), (A73, &a[2]), (A74, &a[3]), (A75, &a[4]), (A76, &a[5])],
                &mut y_new,
            );
            rhs.eval(t + step, &y_new, &mut b[0])?;
        }

        let mut sum = 0.0;
        for i in 0..dim {
            let e = (k[0][i] * E1
                + k[2][i] * E3
                + k[3][i] * E4
                + k[4][i] * E5
                + k[5][i] * E6
                + k[6][i] * E7)
                * step;
            let sc = opts.tol + opts.tol * y[i].norm().max(y_new[i].norm());
            sum += (e.norm() / sc).powi(2);
        }
        // Whole-vector 2-norm, so the bound does not loosen with 2^L.
        let err = sum.sqrt();
        if !err.is_finite() {
            return Err(Error::StiffFailure { t, step });
        }

        if err <= 1.0 {
            let fac = if err == 0.0 {
                FAC_MAX
            } else {
                (SAFETY * err.powf(-EXPO1) * err_old.powf(BETA)).clamp(FAC_MIN, FAC_MAX)
            };
            err_old = err.max(1e-4);
            t = if lands { target } else { t + step };
            std::mem::swap(&mut y, &mut y_new);
            k.swap(0, 6);
            traj.steps_accepted += 1;
            let grown = step * if reject { fac.min(1.0) } else { fac };
            // Keep the controller's proposal rather than the truncated landing step.
            h = if lands { h.max(grown) } else { grown };
            reject = false;
            while next < samples.len() && samples[next] <= t {
                let before = traj.renormalized;
                record(t, &mut y, &mut traj);
                if traj.renormalized != before {
                    rhs.eval(t, &y, &mut k[0])?;
                }
                next += 1;
            }
        } else {
            let fac = (SAFETY * err.powf(-EXPO1)).clamp(FAC_MIN, 1.0);
            h = step * fac;
            reject = true;
            traj.steps_rejected += 1;
        }
    }
    Ok(traj)
}
