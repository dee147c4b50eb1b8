use std::f64::consts::PI;

use crate::error::{Error, Result};

/// The smooth sweep `λ(t) = sin²(π/2 · sin²(πt / 2τ))` on `[0, τ]`.
///
/// Both the first and second derivatives vanish at the endpoints.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sweep {
    tau: f64,
}

/// `λ` and its first two time derivatives at one instant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepPoint {
    pub lambda: f64,
    pub rate: f64,
    pub accel: f64,
}

impl Sweep {
    pub fn new(tau: f64) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::Usage(format!("total time must be positive, got {tau}")));
        }
        Ok(Sweep { tau })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    fn check(&self, t: f64) -> Result<()> {
        // Admit rounding noise from callers that compute t = k·dt.
        let slack = 1e-12 * self.tau;
        if !(t >= -slack && t <= self.tau + slack) {
            return Err(Error::Range {
                value: t,
                min: 0.0,
                max: self.tau,
            });
        }
        Ok(())
    }

    pub fn point(&self, t: f64) -> Result<SweepPoint> {
        self.check(t)?;
        let t = t.clamp(0.0, self.tau);
        let w = PI / (2.0 * self.tau);
        let s = (w * t).sin().powi(2);
        let s_dot = w * (2.0 * w * t).sin();
        let s_ddot = 2.0 * w * w * (2.0 * w * t).cos();
        let lambda = (0.5 * PI * s).sin().powi(2);
        let rate = 0.5 * PI * (PI * s).sin() * s_dot;
        let accel = 0.5 * PI * (PI * (PI * s).cos() * s_dot * s_dot + (PI * s).sin() * s_ddot);
        Ok(SweepPoint {
            lambda,
            rate,
            accel,
        })
    }

    /// `(λ(t), dλ/dt)`.
    pub fn lambda_of_t(&self, t: f64) -> Result<(f64, f64)> {
        let p = self.point(t)?;
        Ok((p.lambda, p.rate))
    }
}

/// Convenience form of [`Sweep::lambda_of_t`].
pub fn lambda_of_t(t: f64, tau: f64) -> Result<(f64, f64)> {
    Sweep::new(tau)?.lambda_of_t(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints() {
        let s = Sweep::new(1.0).unwrap();
        let p0 = s.point(0.0).unwrap();
        assert_eq!((p0.lambda, p0.rate, p0.accel), (0.0, 0.0, 0.0));
        let p1 = s.point(1.0).unwrap();
        assert!((p1.lambda - 1.0).abs() < 1e-15);
        assert!(p1.rate.abs() < 1e-15);
        assert!(p1.accel.abs() < 1e-14);
    }

    #[test]
    fn midpoint_is_half() {
        let (l, _) = lambda_of_t(1.5, 3.0).unwrap();
        assert!((l - 0.5).abs() < 1e-15);
    }

    #[test]
    fn derivatives_match_central_differences() {
        let tau = 1.7;
        let s = Sweep::new(tau).unwrap();
        let lam = |t: f64| ((PI / 2.0) * (PI * t / (2.0 * tau)).sin().powi(2)).sin().powi(2);
        for &t in &[tau / 4.0, 0.3 * tau, 0.81 * tau] {
            let h = 1e-6;
            let p = s.point(t).unwrap();
            assert!((p.lambda - lam(t)).abs() < 1e-15);
            let fd1 = (lam(t + h) - lam(t - h)) / (2.0 * h);
            assert!((p.rate - fd1).abs() <= 1e-8 * p.rate.abs().max(1.0), "{} {}", p.rate, fd1);
            let h2 = 1e-4;
            let fd2 = (lam(t + h2) - 2.0 * lam(t) + lam(t - h2)) / (h2 * h2);
            assert!((p.accel - fd2).abs() <= 1e-5 * p.accel.abs().max(1.0));
        }
    }

    #[test]
    fn monotone_non_decreasing() {
        let s = Sweep::new(1.0).unwrap();
        let mut prev = -1.0;
        for k in 0..=1000 {
            let t = k as f64 / 1000.0;
            let p = s.point(t).unwrap();
            assert!(p.lambda >= prev);
            assert!(p.rate >= 0.0);
            prev = p.lambda;
        }
    }

    #[test]
    fn out_of_range() {
        let s = Sweep::new(1.0).unwrap();
        assert!(matches!(s.point(1.1), Err(Error::Range { .. })));
        assert!(matches!(s.point(-0.5), Err(Error::Range { .. })));
        assert!(Sweep::new(0.0).is_err());
    }
}
