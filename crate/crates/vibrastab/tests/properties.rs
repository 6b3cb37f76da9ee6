//! Property tests for the structural invariants of the numeric core.

use proptest::prelude::*;

use vibrastab::chrono::{self, TimeMatrixFn};
use vibrastab::excitation::Excitation;
use vibrastab::galerkin::{self, GalerkinSystem};
use vibrastab::mat2::Mat2;
use vibrastab::model::{
    eigenpair, project_initial_data, reconstruct, sobolev_norms, GridFunction, ModalState,
    ModeIndex,
};
use vibrastab::model::{ControlParams, StringParams};
use vibrastab::stability::averaged_eigenvalues;

#[test]
fn gram_matrix_is_identity_at_guard_resolution() {
    // panels = 64 * N for N = 8
    let n_max = 8;
    let panels = 64 * n_max;
    for n in 1..=n_max {
        let pn = eigenpair::<f64>(ModeIndex::new(n).unwrap(), panels).unwrap();
        for m in 1..=n_max {
            let pm = eigenpair::<f64>(ModeIndex::new(m).unwrap(), panels).unwrap();
            let inner = pn.phi.inner(&pm.phi).unwrap();
            let expect = if n == m { 1.0 } else { 0.0 };
            assert!(
                (inner - expect).abs() < 1e-8,
                "<phi_{n}, phi_{m}> = {inner}"
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn projection_inverts_reconstruction(
        amps in proptest::collection::vec(-1.0f64..1.0, 1..6),
        vels in proptest::collection::vec(-1.0f64..1.0, 1..6),
    ) {
        let n = amps.len().min(vels.len());
        let states: Vec<ModalState<f64>> = (0..n)
            .map(|i| ModalState::new(amps[i], vels[i]))
            .collect();
        let panels = 512;
        let amp_only: Vec<ModalState<f64>> =
            states.iter().map(|s| ModalState::new(s.amplitude, 0.0)).collect();
        let vel_as_amp: Vec<ModalState<f64>> =
            states.iter().map(|s| ModalState::new(s.velocity, 0.0)).collect();
        let u = reconstruct(&amp_only, panels).unwrap();
        let v = reconstruct(&vel_as_amp, panels).unwrap();
        let back = project_initial_data(&u, &v, 1.0, n).unwrap();
        for (orig, round) in states.iter().zip(&back) {
            prop_assert!((orig.amplitude - round.amplitude).abs() < 1e-8);
            prop_assert!((orig.velocity - round.velocity).abs() < 1e-8);
        }

        // Parseval at grid level
        let sum_sq: f64 = states.iter().map(|s| s.amplitude * s.amplitude).sum();
        if sum_sq > 1e-12 {
            let rel = (u.norm_sq() - sum_sq).abs() / sum_sq;
            prop_assert!(rel < 1e-6, "Parseval defect {rel}");
        }
    }

    #[test]
    fn sobolev_norms_flip_and_scale(
        amps in proptest::collection::vec(-2.0f64..2.0, 1..8),
        scale in 0.1f64..4.0,
        k in 1.0f64..200.0,
    ) {
        let states: Vec<ModalState<f64>> = amps
            .iter()
            .enumerate()
            .map(|(i, &a)| ModalState::new(a, -a * (i as f64 + 1.0)))
            .collect();
        let flipped: Vec<ModalState<f64>> = states
            .iter()
            .map(|s| ModalState::new(-s.amplitude, -s.velocity))
            .collect();
        let scaled: Vec<ModalState<f64>> = states
            .iter()
            .map(|s| ModalState::new(scale * s.amplitude, scale * s.velocity))
            .collect();
        let (h1, vel) = sobolev_norms(&states, k);
        let (h1f, velf) = sobolev_norms(&flipped, k);
        let (h1s, vels) = sobolev_norms(&scaled, k);
        prop_assert_eq!(h1, h1f);
        prop_assert_eq!(vel, velf);
        prop_assert!((h1s - scale * scale * h1).abs() <= 1e-12 * h1s.max(1.0));
        prop_assert!((vels - scale * scale * vel).abs() <= 1e-12 * vels.max(1.0));
    }

    #[test]
    fn excitation_evaluation_is_exactly_periodic(i in -3_000_000i64..3_000_000) {
        // dyadic abscissae so that t + 1 is itself exactly representable;
        // the periodicity is by mod-reduction, not accumulation
        let t = i as f64 / 1048576.0;
        for e in [Excitation::<f64>::harmonic(), Excitation::square_wave()] {
            prop_assert_eq!(e.g(t), e.g(t + 1.0));
            prop_assert!((e.primitive(t + 1.0) - e.primitive(t)).abs() < 1e-12);
        }
    }

    #[test]
    fn liouville_identity_holds_for_random_flows(
        entries in proptest::collection::vec(-1.0f64..1.0, 8),
        freq in 1.0f64..3.0,
    ) {
        let m0 = Mat2::new(entries[0], entries[1], entries[2], entries[3]);
        let m1 = Mat2::new(entries[4], entries[5], entries[6], entries[7]);
        let a = TimeMatrixFn::continuous(move |t: f64| {
            m0 + m1.scale((freq * std::f64::consts::TAU * t).sin())
        });
        let flow = chrono::chron_exp_left(&a, 1.0, 2048).unwrap();
        prop_assert!(flow.liouville_defect < 1e-8, "defect {:e}", flow.liouville_defect);
    }

    #[test]
    fn volterra_tail_bound_on_small_norm_fields(
        entries in proptest::collection::vec(-1.0f64..1.0, 8),
        target in 0.05f64..0.44,
    ) {
        let m0 = Mat2::new(entries[0], entries[1], entries[2], entries[3]);
        let m1 = Mat2::new(entries[4], entries[5], entries[6], entries[7]);
        let raw = move |t: f64| m0 + m1.scale((std::f64::consts::TAU * t).cos());
        // rescale so the integrated Frobenius norm hits the target
        let quad = 400;
        let mut total = 0.0;
        for i in 0..=quad {
            let w = if i == 0 || i == quad { 0.5 } else { 1.0 };
            total += w * raw(i as f64 / quad as f64).frobenius_norm();
        }
        let int_norm = total / quad as f64;
        prop_assume!(int_norm > 1e-6);
        let c = target / int_norm;
        let a = TimeMatrixFn::continuous(move |t: f64| raw(t).scale(c));
        let v4 = chrono::volterra_truncation(&a, 1.0, 4, 256).unwrap();
        let p = chrono::chron_exp_left(&a, 1.0, 2048).unwrap().matrix;
        let err = (v4 - p).frobenius_norm();
        let bound = target.powi(5) / 120.0 * target.exp();
        prop_assert!(err <= bound, "err {err:e} > bound {bound:e} at norm {target}");
    }

    #[test]
    fn damped_lyapunov_forms_agree_on_random_states(
        amps in proptest::collection::vec(-1.0f64..1.0, 4),
        vels in proptest::collection::vec(-1.0f64..1.0, 4),
        alpha in 0.0f64..0.6,
        k in 1.0f64..200.0,
    ) {
        let params = StringParams::new(1.0, 1.0, alpha).unwrap();
        let states: Vec<ModalState<f64>> = amps
            .iter()
            .zip(&vels)
            .map(|(&a, &v)| ModalState::new(a, v))
            .collect();
        let (defining, sos) = galerkin::lyapunov_damped_forms(&states, 9, &params, k);
        let scale = defining.abs().max(1e-30);
        prop_assert!((defining - sos).abs() / scale < 1e-12);
        prop_assert!(defining >= -1e-15);
    }
}

#[test]
fn damped_tail_dissipation_under_valid_certificate() {
    // beta = 0 configuration: certificate valid from the first split,
    // sampled V must decay monotonically
    let params = StringParams::new(1.0, 0.0, 0.5).unwrap();
    let control = ControlParams::new(0.0, 50.0, Excitation::<f64>::harmonic(), None).unwrap();
    let cert = galerkin::lyapunov_damped_certificate(&params, &control, 1).unwrap();
    assert!(cert.valid);
    let sys = GalerkinSystem::mode_range(params, control, 2, 10).unwrap();
    let init = galerkin::seeded_initial_data::<f64>(11, 2, 9);
    let traj = galerkin::integrate(&sys, &init, 60, 2048).unwrap();
    for w in traj.lyapunov.windows(2) {
        assert!(w[1] <= w[0] * (1.0 + 1e-9), "V increased: {} -> {}", w[0], w[1]);
    }
}

#[test]
fn undamped_tail_conservation_drift() {
    let params = StringParams::new(1.0, 1.0, 0.0).unwrap();
    let control = ControlParams::new(0.1, 100.0, Excitation::<f64>::harmonic(), Some(8)).unwrap();
    let sys = GalerkinSystem::mode_range(params, control, 9, 24).unwrap();
    let init = galerkin::seeded_initial_data::<f64>(11, 9, 16);
    let traj = galerkin::integrate(&sys, &init, 100, 4096).unwrap();
    let v0 = traj.lyapunov[0];
    assert!(v0 > 0.0);
    for &v in &traj.lyapunov {
        assert!(((v - v0) / v0).abs() <= 1e-8, "drift {} over 100 periods", (v - v0) / v0);
    }
}

#[test]
fn averaged_pair_transitions_continuously_through_bifurcation() {
    // sweep the gain through the discriminant root at fixed k and mode
    let params = StringParams::new(1.0, 1.0, 0.1).unwrap();
    let excitation = Excitation::<f64>::harmonic();
    let mut last_trace: Option<f64> = None;
    let mut seen_real_pair = false;
    let mut seen_complex_pair = false;
    for i in 0..=400 {
        let delta = 0.074 + 0.006 * (i as f64 / 400.0);
        let control = ControlParams::new(delta, 100.0, excitation.clone(), None).unwrap();
        let ms = vibrastab::stability::ModeSystem::new(
            ModeIndex::new(1).unwrap(),
            params,
            control,
        );
        let l1 = ms.lambda1_closed_form().unwrap();
        let [e1, e2] = averaged_eigenvalues(&l1);
        let trace = e1.re + e2.re;
        if e1.im == 0.0 {
            seen_real_pair = true;
        } else {
            seen_complex_pair = true;
            assert!(seen_real_pair, "complex pair must appear after the real side");
        }
        if let Some(prev) = last_trace {
            assert!((trace - prev).abs() < 1e-6, "trace jumped {prev} -> {trace}");
        }
        last_trace = Some(trace);
    }
    assert!(seen_real_pair && seen_complex_pair);
}

#[test]
fn grid_function_rejects_nonzero_ends() {
    assert!(GridFunction::new(vec![0.1, 0.0, 0.0, 0.0, 0.0]).is_err());
    assert!(GridFunction::new(vec![0.0, 1.0, 2.0, 1.0, 0.0]).is_ok());
}
