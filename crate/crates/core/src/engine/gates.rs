//! Exact one- and two-qubit kernels. Rotations follow `R_P(θ) = exp(−iθP/2)`.

use num_complex::Complex64;

pub type Mat2 = [[Complex64; 2]; 2];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rx(theta: f64) -> Mat2 {
    let (s, co) = (0.5 * theta).sin_cos();
    [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]]
}

pub fn ry(theta: f64) -> Mat2 {
    let (s, co) = (0.5 * theta).sin_cos();
    [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]
}

pub fn rz(theta: f64) -> Mat2 {
    let (s, co) = (0.5 * theta).sin_cos();
    [[c(co, -s), c(0.0, 0.0)], [c(0.0, 0.0), c(co, s)]]
}

pub fn hadamard() -> Mat2 {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]]
}

/// `S†`, used before a Hadamard to measure in the Y basis.
pub fn s_dagger() -> Mat2 {
    [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, -1.0)]]
}

pub fn matmul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[c(0.0, 0.0); 2]; 2];
    for r in 0..2 {
        for k in 0..2 {
            out[r][k] = a[r][0] * b[0][k] + a[r][1] * b[1][k];
        }
    }
    out
}

/// Applies `u` to `site` of an `len`-site register (site 0 is the top bit).
pub fn apply_single(amps: &mut [Complex64], len: usize, site: usize, u: &Mat2) {
    let bit = 1usize << (len - 1 - site);
    for i in 0..amps.len() {
        if i & bit != 0 {
            continue;
        }
        let j = i | bit;
        let (a0, a1) = (amps[i], amps[j]);
        amps[i] = u[0][0] * a0 + u[0][1] * a1;
        amps[j] = u[1][0] * a0 + u[1][1] * a1;
    }
}

/// `exp(−iθ σᶻ_a σᶻ_b / 2)`.
pub fn apply_rzz(amps: &mut [Complex64], len: usize, a: usize, b: usize, theta: f64) {
    let ba = 1usize << (len - 1 - a);
    let bb = 1usize << (len - 1 - b);
    let (s, co) = (0.5 * theta).sin_cos();
    let aligned = c(co, -s);
    let anti = c(co, s);
    for (i, amp) in amps.iter_mut().enumerate() {
        let same = ((i & ba) != 0) == ((i & bb) != 0);
        *amp *= if same { aligned } else { anti };
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rx_pi_flips_with_phase() {
        let mut v = vec![c(1.0, 0.0), c(0.0, 0.0)];
        apply_single(&mut v, 1, 0, &rx(std::f64::consts::PI));
        assert!(v[0].norm() < 1e-15);
        assert!((v[1] - c(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn y_from_conjugated_x() {
        use std::f64::consts::FRAC_PI_2;
        let t = 0.73;
        let m = matmul(&matmul(&rz(FRAC_PI_2), &rx(t)), &rz(-FRAC_PI_2));
        let want = ry(t);
        for r in 0..2 {
            for k in 0..2 {
                assert!((m[r][k] - want[r][k]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn site_ordering() {
        // X on site 0 of |00⟩ gives |10⟩ (index 2).
        let mut v = vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let x = [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]];
        apply_single(&mut v, 2, 0, &x);
        assert_eq!(v[2], c(1.0, 0.0));
    }
}
