use lcdrive::engine::{evolve, fidelity, EvolveOptions, StateVector};
use lcdrive::protocols::{
    apply_lu, final_state, optimize_lambda_f, optimize_lu, rotating_frame_h, run, EulerTriple, GroundSpace,
    LocalUnitary, LuMode, ProtocolKind, ProtocolSpec, RotatingFrame, Target,
};
use lcdrive::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_state(len: usize, seed: u64) -> StateVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amps = (0..1usize << len)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    StateVector::from_amplitudes(len, amps).unwrap()
}

#[test]
fn zero_lambda_f_is_adiabatic() {
    let lcd = run(&ProtocolSpec::new(4, 0.5, ProtocolKind::Lcd).with_lambda_f(0.0)).unwrap();
    let ad = run(&ProtocolSpec::new(4, 0.5, ProtocolKind::Adiabatic)).unwrap();
    assert_eq!(lcd.times, ad.times);
    for (a, b) in lcd.target_fidelity.iter().zip(&ad.target_fidelity) {
        assert!((a - b).abs() < 1e-12);
    }
    for (a, b) in lcd.energy.iter().zip(&ad.energy) {
        assert!((a - b).abs() < 1e-12);
    }
    for (a, b) in lcd.final_state.amplitudes().iter().zip(ad.final_state.amplitudes()) {
        assert!((a - b).norm() < 1e-12);
    }
}

#[test]
fn rotating_frame_reproduces_lab_frame() {
    for (h_xf, lambda_f) in [(2.0, 1.2), (0.5, 3.0), (4.0, 0.7)] {
        let spec = ProtocolSpec::new(4, h_xf, ProtocolKind::Lcd).with_lambda_f(lambda_f);
        let frame = RotatingFrame::new(&spec).unwrap();
        for k in 0..=20 {
            let h = rotating_frame_h(&spec, k as f64 / 20.0 * spec.tau).unwrap();
            assert!(h.iter().all(|(s, c)| s.y_count() == 0 || c.norm() < 1e-12));
        }
        let opts = EvolveOptions { tol: spec.tol, ..Default::default() };
        let rot = evolve(&frame, &spec.initial_state().unwrap(), 0.0, spec.tau, &[spec.tau], &opts).unwrap();
        let lab = final_state(&spec).unwrap();
        let back = frame.to_lab(rot.final_state(), spec.tau).unwrap();
        let f = fidelity(&back, &lab).unwrap();
        assert!(f >= 1.0 - 1e-8, "h_xf={h_xf}: {f}");
    }
}

fn triple() -> impl Strategy<Value = EulerTriple> {
    (-7.0..7.0f64, -7.0..7.0f64, -7.0..7.0f64).prop_map(|(a, t, b)| EulerTriple::new(a, t, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn local_unitaries_preserve_norm(len in 1usize..=6, seed in any::<u64>(), ts in prop::collection::vec(triple(), 6)) {
        let psi = random_state(len, seed);
        let per_site = apply_lu(&psi, &LocalUnitary::per_site(ts[..len].to_vec())).unwrap();
        let uniform = apply_lu(&psi, &LocalUnitary::uniform(ts[0])).unwrap();
        prop_assert!((per_site.norm() - 1.0).abs() < 1e-12);
        prop_assert!((uniform.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fidelity_ignores_target_phase(phase in -7.0..7.0f64, seed in any::<u64>()) {
        let target = Target::of(&ProtocolSpec::new(4, 2.0, ProtocolKind::Lcd)).unwrap();
        let psi = random_state(4, seed);
        let z = Complex64::from_polar(1.0, phase);
        let rotated = GroundSpace {
            energy: target.ground.energy,
            states: target
                .ground
                .states
                .iter()
                .map(|g| StateVector::from_amplitudes(4, g.amplitudes().iter().map(|a| a * z).collect()).unwrap())
                .collect(),
        };
        prop_assert!((rotated.fidelity(&psi).unwrap() - target.fidelity(&psi).unwrap()).abs() < 1e-12);
    }
}

#[test]
fn lu_adjoint_undoes_lu() {
    let psi = random_state(3, 5);
    let t = EulerTriple::new(0.3, -1.1, 2.0);
    let fwd = apply_lu(&psi, &LocalUnitary::uniform(t)).unwrap();
    // (R_z(α)R_x(θ)R_z(β))† = R_z(−β)R_x(−θ)R_z(−α).
    let inv = EulerTriple::new(-t.beta, -t.theta, -t.alpha);
    let back = apply_lu(&fwd, &LocalUnitary::uniform(inv)).unwrap();
    assert!(fidelity(&back, &psi).unwrap() > 1.0 - 1e-12);
}

#[test]
fn dominance_chain_at_small_field() {
    let base = ProtocolSpec::new(4, 0.5, ProtocolKind::Lcd);
    let opt = optimize_lambda_f(&base, None).unwrap();
    let lcd = ProtocolSpec { lambda_f: opt.lambda_f, ..base.clone() };
    let ad = run(&ProtocolSpec::new(4, 0.5, ProtocolKind::Adiabatic)).unwrap().final_fidelity;
    let f_lcd = run(&lcd).unwrap().final_fidelity;
    let fixed = run(&lcd.clone().with_kind(ProtocolKind::Lcdlu)).unwrap().final_fidelity;
    let general = optimize_lu(&lcd, LuMode::General).unwrap().fidelity;
    assert!(ad <= f_lcd, "{ad} {f_lcd}");
    assert!(f_lcd <= fixed, "{f_lcd} {fixed}");
    assert!(fixed <= general + 1e-9, "{fixed} {general}");
}

#[test]
fn final_and_run_agree() {
    let spec = ProtocolSpec::new(3, 1.3, ProtocolKind::Lcd).with_lambda_f(0.8);
    let a = run(&spec).unwrap();
    let b = final_state(&spec).unwrap();
    assert!(fidelity(&a.pre_lu_state, &b).unwrap() > 1.0 - 1e-9);
    assert!(a.max_norm_drift <= 1e-6);
}
