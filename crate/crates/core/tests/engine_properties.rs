use lcdrive::engine::{
    evolve, expectation, ground_state_with, low_spectrum_with, uniform_times, CompiledOperator, EigenConfig,
    EvolveOptions, FnHamiltonian, Static, StateVector,
};
use lcdrive::pauli::{commutator, to_dense, PauliSum};
use lcdrive::schedules::{Boundary, Couplings, IsingOperators, ModelSchedules};
use lcdrive::Complex64;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn tfim(len: usize, c: Couplings) -> PauliSum {
    IsingOperators::new(len, Boundary::Auto).unwrap().hamiltonian(&c)
}

fn random_state(len: usize, rng: &mut ChaCha8Rng) -> StateVector {
    let amps = (0..1usize << len)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    StateVector::from_amplitudes(len, amps).unwrap()
}

fn couplings() -> impl Strategy<Value = Couplings> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64).prop_map(|(h_z, h_x, j)| Couplings { h_z, h_x, j })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn apply_is_linear(len in 2usize..=6, c in couplings(), seed in any::<u64>(),
                       a in (-2.0..2.0f64, -2.0..2.0f64), b in (-2.0..2.0f64, -2.0..2.0f64)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let op = CompiledOperator::new(&tfim(len, c));
        let psi = random_state(len, &mut rng);
        let phi = random_state(len, &mut rng);
        let (a, b) = (Complex64::new(a.0, a.1), Complex64::new(b.0, b.1));
        let mix: Vec<Complex64> = psi.amplitudes().iter().zip(phi.amplitudes()).map(|(x, y)| a * x + b * y).collect();
        let lhs = op.apply(&mix);
        let (hp, hf) = (op.apply(psi.amplitudes()), op.apply(phi.amplitudes()));
        for i in 0..lhs.len() {
            prop_assert!((lhs[i] - (a * hp[i] + b * hf[i])).norm() < 1e-12);
        }
    }

    #[test]
    fn static_evolution_conserves_norm_and_energy(len in 2usize..=5, c in couplings(), seed in any::<u64>()) {
        let h = tfim(len, c);
        let psi = random_state(len, &mut ChaCha8Rng::seed_from_u64(seed));
        let opts = EvolveOptions { tol: 1e-8, ..Default::default() };
        let traj = evolve(&Static::new(h.clone()), &psi, 0.0, 1.0, &uniform_times(0.0, 1.0, 11), &opts).unwrap();
        prop_assert!(traj.max_norm_drift <= 1e-6);
        let e0 = expectation(&h, &psi).unwrap();
        let e1 = expectation(&h, traj.final_state()).unwrap();
        prop_assert!((e1 - e0).abs() <= 1e-7, "drift {}", e1 - e0);
    }
}

#[test]
fn driven_evolution_norm_drift() {
    let ops = IsingOperators::new(4, Boundary::Auto).unwrap();
    let model = ModelSchedules::new(1.0, 2.0, 1.0);
    let h = FnHamiltonian::new(4, |t: f64| {
        let mut h = ops.hamiltonian(&model.couplings(t));
        h.add_scaled(&ops.sum_y, 0.7 * (3.0 * t).sin())?;
        Ok(h)
    });
    let psi = StateVector::basis(4, 0).unwrap();
    let opts = EvolveOptions { renorm_threshold: f64::INFINITY, ..Default::default() };
    let traj = evolve(&h, &psi, 0.0, 1.0, &uniform_times(0.0, 1.0, 51), &opts).unwrap();
    assert!(traj.norm_drift.iter().all(|d| d.abs() <= 1e-6));
}

#[test]
fn lanczos_matches_dense_at_eight_sites() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let cfg = EigenConfig { dense_limit: 0, ..Default::default() };
    for _ in 0..10 {
        let c = Couplings {
            h_z: rng.gen_range(-1.5..1.5),
            h_x: rng.gen_range(0.2..2.0),
            j: rng.gen_range(-1.5..1.5),
        };
        let h = tfim(8, c);
        let want = to_dense(&h).unwrap().symmetric_eigen().eigenvalues.min();
        let got = ground_state_with(&h, &cfg).unwrap().energy;
        assert!((got - want).abs() < 1e-9, "{c:?}: {got} vs {want}");
    }
}

/// `V† M V` for the eigenvector matrix `V`.
fn in_basis(m: &PauliSum, v: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    v.adjoint() * to_dense(m).unwrap() * v
}

#[test]
fn nested_commutators_in_eigenbasis() {
    let ops = IsingOperators::new(4, Boundary::Auto).unwrap();
    let model = ModelSchedules::new(1.0, 2.0, 1.0);
    let lambda = 0.37;
    let h = ops.hamiltonian(&model.couplings(lambda));
    let dh = ops.hamiltonian(&model.derivatives(lambda));
    let eig = to_dense(&h).unwrap().symmetric_eigen();
    let (v, e) = (eig.eigenvectors, eig.eigenvalues);
    let dh_mn = in_basis(&dh, &v);

    let i = Complex64::new(0.0, 1.0);
    let (a1, a2) = (0.23, -0.041);
    let c1 = commutator(&h, &dh).unwrap();
    let c3 = commutator(&h, &commutator(&h, &c1).unwrap()).unwrap();
    let first = c1.scaled(i * a1);
    let mut second = first.clone();
    second.add_scaled(&c3, i * a2).unwrap();

    let (m1, m2) = (in_basis(&first, &v), in_basis(&second, &v));
    let dim = e.len();
    let mut worst: f64 = 0.0;
    for m in 0..dim {
        for n in 0..dim {
            let w = e[m] - e[n];
            let want1 = i * a1 * w * dh_mn[(m, n)];
            let want2 = i * (a1 * w + a2 * w.powi(3)) * dh_mn[(m, n)];
            worst = worst.max((m1[(m, n)] - want1).norm()).max((m2[(m, n)] - want2).norm());
        }
    }
    assert!(worst < 1e-10, "max deviation {worst}");
}

#[test]
fn exact_gauge_potential_diagonalizes_g() {
    let ops = IsingOperators::new(4, Boundary::Auto).unwrap();
    let model = ModelSchedules::new(1.0, 0.5, 1.0);
    let lambda = 0.61;
    let h = ops.hamiltonian(&model.couplings(lambda));
    let dh = ops.hamiltonian(&model.derivatives(lambda));
    let eig = to_dense(&h).unwrap().symmetric_eigen();
    let (v, e) = (eig.eigenvectors, eig.eigenvalues);
    let dh_mn = in_basis(&dh, &v);
    let dim = e.len();
    let i = Complex64::new(0.0, 1.0);

    // Exact AGP from its matrix elements; degenerate pairs carry no weight.
    let mut a = DMatrix::<Complex64>::zeros(dim, dim);
    for m in 0..dim {
        for n in 0..dim {
            let w = e[m] - e[n];
            if w.abs() > 1e-8 {
                a[(m, n)] = -i * dh_mn[(m, n)] / w;
            } else {
                assert!(m == n || dh_mn[(m, n)].norm() < 1e-9, "dH couples degenerate levels {m},{n}");
            }
        }
    }
    assert!((&a - a.adjoint()).iter().all(|z| z.norm() < 1e-12));
    let hd = DMatrix::from_diagonal(&e.map(|x| Complex64::new(x, 0.0)));
    let g = &dh_mn + (&a * &hd - &hd * &a) * i;
    for m in 0..dim {
        for n in 0..dim {
            if m != n {
                assert!(g[(m, n)].norm() < 1e-10);
            }
        }
    }

    // The first-order term reproduces the exact one up to the factor −α(ε_m−ε_n)².
    let alpha = 0.3;
    let a1 = in_basis(&commutator(&h, &dh).unwrap().scaled(i * alpha), &v);
    for m in 0..dim {
        for n in 0..dim {
            let w = e[m] - e[n];
            assert!((a1[(m, n)] + alpha * w * w * a[(m, n)]).norm() < 1e-10);
        }
    }
}

#[test]
fn low_spectrum_is_sorted_with_small_residuals() {
    let h = tfim(6, Couplings { h_z: 0.3, h_x: 0.8, j: 1.0 });
    let cfg = EigenConfig { dense_limit: 0, ..Default::default() };
    let s = low_spectrum_with(&h, 4, &cfg).unwrap();
    assert!(s.energies.windows(2).all(|w| w[0] <= w[1]));
    assert!(s.residuals.iter().all(|&r| r < 1e-8));
    let dense = to_dense(&h).unwrap().symmetric_eigen().eigenvalues;
    let mut d: Vec<f64> = dense.iter().cloned().collect();
    d.sort_by(f64::total_cmp);
    for (a, b) in s.energies.iter().zip(&d) {
        assert!((a - b).abs() < 1e-9);
    }
}
