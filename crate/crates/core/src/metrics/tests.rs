use nalgebra::{DMatrix, DVector, Isometry3};

use super::*;
use crate::control::{
    translational_shaped_gains, DesiredInertia, ImpedanceParams, ReferenceSignal,
};
use crate::dynamics::gravity_vector;
use crate::model::{builtin_model, TaskAxis};

fn dv(v: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(v)
}

fn one_axis(k: f64, d: f64, m: f64) -> ImpedanceParams<f64> {
    ImpedanceParams {
        stiffness: dv(&[k]),
        damping: dv(&[d]),
        inertia: DesiredInertia::Fixed(dv(&[m])),
    }
}

#[test]
fn robot_energy_examples() {
    let planar = builtin_model("planar2").unwrap();
    let z = dv(&[0.0, 0.0]);
    assert_eq!(robot_hamiltonian(&planar, &z, &z, &z), 0.0);
    let up = dv(&[std::f64::consts::FRAC_PI_2, 0.0]);
    let lifted = robot_hamiltonian(&planar, &up, &z, &z);
    assert!((lifted - 29.43).abs() < 1e-12);
    // line integral of the gravity torque along the straight joint path
    let steps = 2000;
    let mut work = 0.0;
    for i in 0..steps {
        let s = (i as f64 + 0.5) / steps as f64;
        work += gravity_vector(&planar, &(&up * s)).dot(&(&up / steps as f64));
    }
    assert!((lifted - work).abs() < 1e-5);

    let gantry = builtin_model("gantry3").unwrap();
    let q = dv(&[0.2, 0.1, 0.0]);
    let e = robot_hamiltonian(&gantry, &q, &dv(&[1.0, 0.0, 0.0]), &q);
    assert!((e - 5.0).abs() < 1e-10);
}

#[test]
fn impedance_energy_examples() {
    let k = dv(&[800.0, 800.0, 800.0]);
    let m = DMatrix::from_diagonal_element(3, 3, 10.0);
    let z = DVector::zeros(3);
    assert_eq!(impedance_hamiltonian(&z, &z, &k, &m), 0.0);
    let e = impedance_hamiltonian(&dv(&[0.4, 0.0, 0.0]), &z, &k, &m);
    assert!((e - 64.0).abs() < 1e-12);
    let leg = dv(&[400.0, 400.0, 800.0]);
    let e = impedance_hamiltonian(&dv(&[0.0, 0.0, 1.0]), &z, &leg, &m);
    assert!((e - 400.0).abs() < 1e-12);
}

#[test]
fn causal_equilibrium_is_constant() {
    let params = translational_shaped_gains();
    let x = dv(&[0.1, 0.2, 0.3]);
    let r = TaskReference::constant(x.clone());
    let traj = simulate_causal_impedance(
        &params,
        &|_| r.clone(),
        &|_| DVector::zeros(3),
        x.clone(),
        DVector::zeros(3),
        1e-3,
        1.0,
    )
    .unwrap();
    assert_eq!(traj.len(), 1001);
    assert!(traj
        .iter()
        .all(|s| s.state.x == x && s.state.p.amax() == 0.0));
}

#[test]
fn causal_step_matches_closed_form() {
    let params = one_axis(800.0, 134.2, 10.0);
    let r = TaskReference::constant(dv(&[0.4]));
    let traj = simulate_causal_impedance(
        &params,
        &|_| r.clone(),
        &|_| DVector::zeros(1),
        dv(&[0.0]),
        dv(&[0.0]),
        1e-4,
        2.0,
    )
    .unwrap();
    let sys = SecondOrder::new(800.0, 134.2, 10.0);
    assert!((sys.natural_frequency() - 80f64.sqrt()).abs() < 1e-12);
    assert!((sys.damping_ratio() - 0.7502).abs() < 1e-4);
    for s in &traj {
        let (x, _) = step_response_closed_form(&sys, 0.4, s.t).unwrap();
        assert!((s.state.x[0] - x).abs() < 1e-6);
    }
}

#[test]
fn lossless_target_has_zero_margin() {
    let mut params = one_axis(50.0, 1.0, 2.0);
    params.damping = dv(&[0.0]);
    let reference = |t: f64| TaskReference {
        position: dv(&[0.1 * t.sin()]),
        velocity: dv(&[0.1 * t.cos()]),
        acceleration: dv(&[-0.1 * t.sin()]),
    };
    let f = |t: f64| dv(&[2.0 * (3.0 * t).cos()]);
    let traj =
        simulate_causal_impedance(&params, &reference, &f, dv(&[0.0]), dv(&[0.0]), 1e-4, 3.0)
            .unwrap();
    let m = DVector::from_element(1, 2.0);
    let t: Vec<f64> = traj.iter().map(|s| s.t).collect();
    let mut vel_err = Vec::new();
    let mut rate = Vec::new();
    let mut fs = Vec::new();
    let mut h = Vec::new();
    for s in &traj {
        let r = reference(s.t);
        vel_err.push(s.state.p.component_div(&m) - &r.velocity);
        rate.push(r.acceleration.component_mul(&m));
        fs.push(f(s.t));
        h.push(causal_hamiltonian(&params, &s.state, &r).unwrap());
    }
    let margin = general_passivity_margin(&t, &vel_err, &rate, Some(&fs), &h, h[0]).unwrap();
    // Without damping the only unbalanced term is the desired-inertial power
    // (ẋ − ẋ_d)ᵀ ṗ_d, which the supplied power counts but the stored energy does not.
    let inertial: Vec<f64> = vel_err.iter().zip(&rate).map(|(v, r)| v.dot(r)).collect();
    let expected = cumulative_trapezoid(&t, &inertial);
    let worst = margin
        .iter()
        .zip(&expected)
        .fold(0.0f64, |a, (m, e)| a.max((m - e).abs()));
    assert!(worst < 1e-6, "worst {worst}");
    // with a constant-velocity reference the margin vanishes
    let ramp = |t: f64| TaskReference {
        position: dv(&[0.2 * t]),
        velocity: dv(&[0.2]),
        acceleration: dv(&[0.0]),
    };
    let traj =
        simulate_causal_impedance(&params, &ramp, &f, dv(&[0.0]), dv(&[0.4]), 1e-4, 3.0).unwrap();
    let mut ve = Vec::new();
    let mut hr = Vec::new();
    for s in &traj {
        ve.push(s.state.p.component_div(&m) - ramp(s.t).velocity);
        hr.push(causal_hamiltonian(&params, &s.state, &ramp(s.t)).unwrap());
    }
    let zero = vec![dv(&[0.0]); t.len()];
    let lossless = general_passivity_margin(&t, &ve, &zero, Some(&fs), &hr, hr[0]).unwrap();
    assert!(lossless.iter().all(|v| v.abs() < 1e-6));
    assert!(matches!(
        general_passivity_margin(&t, &vel_err, &rate, None, &h, h[0]),
        Err(crate::Error::MissingInteractionData)
    ));
}

#[test]
fn rms_of_sine_over_full_periods() {
    let n = 20_000;
    let t: Vec<f64> = (0..=n)
        .map(|i| i as f64 * 4.0 * std::f64::consts::PI / n as f64)
        .collect();
    let y: Vec<f64> = t.iter().map(|v| v.sin()).collect();
    let rms = rms_over_window(&t, &y, 0.0, *t.last().unwrap()).unwrap();
    assert!((rms - 0.5f64.sqrt()).abs() < 1e-6);
}

#[test]
fn power_distribution_reductions() {
    let z = DVector::zeros(2);
    let j = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 2.0, 1.0]);
    let d = power_distribution(&z, &z, &j, &z, &z, &z);
    assert_eq!(d.lhs, 0.0);
    assert_eq!(d.rhs_terms(), [0.0; 3]);
    // quasi-static: the impedance port reduces to ẋᵀ f_int
    let qd = dv(&[0.3, -0.7]);
    let tau = dv(&[2.0, 5.0]);
    let f = dv(&[1.5, -4.0]);
    let d = power_distribution(&qd, &tau, &j, &z, &z, &f);
    let x_dot = &j * &qd;
    assert!((d.impedance_port + x_dot.dot(&f)).abs() < 1e-12);
    assert!((-d.impedance_port - (d.robot_port - qd.dot(&tau))).abs() < 1e-12);
    assert!(d.residual.abs() < 1e-12);
}

#[test]
fn robot_at_rest_on_target_has_zero_margin() {
    let leg = builtin_model("leg3").unwrap();
    let q = dv(&[0.1, 0.6, -1.2]);
    let pose = crate::dynamics::forward_kinematics(&leg, &q).pose();
    let g = gravity_vector(&leg, &q);
    let n = 50;
    let log = RunLog {
        t: (0..n).map(|i| i as f64 * 1e-3).collect(),
        q: vec![q.clone(); n],
        qd: vec![DVector::zeros(3); n],
        tau: vec![g; n],
        f_int: Some(vec![DVector::zeros(3); n]),
    };
    let ctx = MetricsContext {
        plant: leg.clone(),
        controller: leg,
        controller_offset: 0,
        params: crate::control::leg_gains(),
        reference: ReferenceSignal::constant(pose),
        step: None,
    };
    let m = evaluate_run(&ctx, &log).unwrap();
    for s in &m.samples {
        assert!(s.passivity_margin.unwrap().abs() < 1e-12);
        assert!(s.general_passivity_margin.unwrap().abs() < 1e-12);
        assert!(s.h_q.abs() < 1e-12 && s.h_omega.abs() < 1e-12);
        assert!(s.p_step_ref.is_none());
    }
}

#[test]
fn gait_with_velocity_is_not_quasi_static() {
    let r = ReferenceSignal::gait(0.4, 0.7, 0.08, Isometry3::identity());
    let t = [0.0, 0.1];
    assert!(matches!(
        quasi_static_passivity_margin(&t, &[0.0, 0.0], &[0.0, 0.0], &r),
        Err(crate::Error::NonQuasiStaticReference { .. })
    ));
    let r = r.into_pose_only();
    assert!(quasi_static_passivity_margin(&t, &[0.0, 1.0], &[0.0, 0.5], &r).is_ok());
}

#[test]
fn step_spec_uses_desired_or_task_inertia() {
    let gantry = builtin_model("gantry3").unwrap();
    let q = dv(&[0.0, 0.0, 0.0]);
    let r = ReferenceSignal::step(TaskAxis::Y, 0.4, Isometry3::identity());
    let s = step_spec_for(&gantry, &translational_shaped_gains(), &r, &q)
        .unwrap()
        .unwrap();
    assert_eq!((s.axis, s.model.mass), (1, 10.0));
    let plain = ImpedanceParams::without_inertia_shaping(dv(&[800.0; 3]), dv(&[134.2; 3])).unwrap();
    let s = step_spec_for(&gantry, &plain, &r, &q).unwrap().unwrap();
    assert!((s.model.mass - 10.0).abs() < 1e-9);
    let c = ReferenceSignal::constant(Isometry3::identity());
    assert!(step_spec_for(&gantry, &plain, &c, &q).unwrap().is_none());
}
