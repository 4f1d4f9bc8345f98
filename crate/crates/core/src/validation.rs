//! Self-check suite: dynamics oracles, energy audits and power-balance residuals.

use nalgebra::{DMatrix, DVector};

use crate::control::{translational_shaped_gains, ImpedanceParams};
use crate::dynamics::{
    coriolis_matrix, geometric_jacobian, gravity_vector, mass_matrix, JointState,
};
use crate::error::Result;
use crate::metrics::{
    causal_balance, general_passivity_margin, power_distribution, rms_over_window,
    robot_hamiltonian, simulate_causal_impedance, step_response_closed_form, SecondOrder,
    TaskReference,
};
use crate::model::{builtin_model, RobotModel};
use crate::sim::{builtin_scenario, run_scenario, simulate_open_loop, ExternalWrench, SimConfig};

const GRAVITY: f64 = 9.81;

/// Fault injection for exercising the suite itself.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ValidationHooks {
    /// Added to the upper off-diagonal entries of every mass matrix the suite checks.
    pub mass_matrix_asymmetry: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// Measured value and its bound.
    pub detail: String,
}

impl Check {
    fn bounded(name: &'static str, value: f64, bound: f64) -> Self {
        Self {
            name,
            passed: value.is_finite() && value <= bound,
            detail: format!("{value:.3e} <= {bound:.1e}"),
        }
    }

    fn from_result(name: &'static str, r: Result<Check>) -> Self {
        r.unwrap_or_else(|e| Check {
            name,
            passed: false,
            detail: e.to_string(),
        })
    }
}

/// Deterministic configurations covering `[-π, π]` on every joint.
fn sample_configurations(n: usize, count: usize) -> Vec<DVector<f64>> {
    (0..count)
        .map(|i| {
            DVector::from_fn(n, |j, _| {
                let phase = (i * 7 + j * 13 + 1) as f64 * 0.618_033_988_75;
                std::f64::consts::PI * (2.0 * phase.fract() - 1.0)
            })
        })
        .collect()
}

fn checked_mass_matrix(
    model: &RobotModel<f64>,
    q: &DVector<f64>,
    hooks: &ValidationHooks,
) -> DMatrix<f64> {
    let mut m = mass_matrix(model, q);
    for i in 0..m.nrows() {
        for j in i + 1..m.ncols() {
            m[(i, j)] += hooks.mass_matrix_asymmetry;
        }
    }
    m
}

fn planar2_oracle(hooks: &ValidationHooks) -> Result<Check> {
    let model = builtin_model("planar2")?;
    let mut worst = 0.0f64;
    for q in sample_configurations(2, 20) {
        let (c1, c2, c12) = (q[0].cos(), q[1].cos(), (q[0] + q[1]).cos());
        let (s1, s12) = (q[0].sin(), (q[0] + q[1]).sin());
        let m = DMatrix::from_row_slice(2, 2, &[3.0 + 2.0 * c2, 1.0 + c2, 1.0 + c2, 1.0]);
        let g = DVector::from_row_slice(&[GRAVITY * (2.0 * c1 + c12), GRAVITY * c12]);
        let j = DMatrix::from_row_slice(2, 2, &[-s1 - s12, -s12, c1 + c12, c12]);
        worst = worst
            .max((checked_mass_matrix(&model, &q, hooks) - m).amax())
            .max((gravity_vector(&model, &q) - g).amax())
            .max((geometric_jacobian(&model, &q) - j).amax());
    }
    Ok(Check::bounded("planar2 M, g, J closed form", worst, 1e-9))
}

fn mass_matrix_symmetry(hooks: &ValidationHooks) -> Result<Check> {
    let model = builtin_model("arm6")?;
    let mut worst = 0.0f64;
    let mut definite = true;
    for q in sample_configurations(6, 50) {
        let m = checked_mass_matrix(&model, &q, hooks);
        worst = worst.max((&m - m.transpose()).amax());
        definite &= m.clone().cholesky().is_some();
    }
    let mut c = Check::bounded("arm6 mass matrix symmetric positive definite", worst, 1e-12);
    c.passed &= definite;
    Ok(c)
}

fn skew_symmetry(hooks: &ValidationHooks) -> Result<Check> {
    let model = builtin_model("arm6")?;
    let h = 1e-3;
    let mut worst = 0.0f64;
    for (q, v) in sample_configurations(6, 100)
        .into_iter()
        .zip(sample_configurations(6, 101).into_iter().skip(1))
    {
        let qd = v / std::f64::consts::PI;
        let m = |s: f64| checked_mass_matrix(&model, &(&q + &qd * s), hooks);
        // five-point central difference along the motion
        let m_dot = (m(-2.0 * h) - m(2.0 * h) + (m(h) - m(-h)) * 8.0) / (12.0 * h);
        let n = m_dot - coriolis_matrix(&model, &q, &qd) * 2.0;
        worst = worst.max((qd.transpose() * n * &qd)[(0, 0)].abs());
    }
    Ok(Check::bounded("arm6 skew symmetry of Ṁ − 2C", worst, 1e-9))
}

fn energy_conservation() -> Result<Check> {
    let model = builtin_model("planar2")?;
    let initial = JointState::at_rest(DVector::from_row_slice(&[0.3, 0.4]));
    let log = simulate_open_loop(&model, &initial, &SimConfig::new(5.0), &|_, _, _| {
        DVector::zeros(2)
    })?;
    let drift = log
        .q
        .iter()
        .zip(&log.qd)
        .map(|(q, qd)| robot_hamiltonian(&model, q, qd, &log.q[0]).abs())
        .fold(0.0, f64::max);
    Ok(Check::bounded(
        "planar2 unforced energy drift (J)",
        drift,
        1e-3,
    ))
}

fn closed_loop_energy_audit() -> Result<Check> {
    let traj = run_scenario(&builtin_scenario("step_arm")?)?;
    let (first, last) = (
        traj.metrics.samples[0],
        *traj.metrics.samples.last().unwrap(),
    );
    let audit = (last.h_q - first.h_q - last.int_p_cmd).abs();
    Ok(Check::bounded("step_arm energy audit (J)", audit, 1e-2))
}

/// Reference moving at constant velocity, under which the desired momentum is constant.
fn ramp_reference(t: f64) -> TaskReference<f64> {
    TaskReference {
        position: DVector::from_row_slice(&[0.1 + 0.2 * t, -0.05 * t, 0.3]),
        velocity: DVector::from_row_slice(&[0.2, -0.05, 0.0]),
        acceleration: DVector::zeros(3),
    }
}

fn interaction(t: f64) -> DVector<f64> {
    DVector::from_row_slice(&[
        5.0 * (3.0 * t).sin(),
        -2.0 + (7.0 * t).cos(),
        4.0 * (2.0 * t).sin() * (5.0 * t).cos(),
    ])
}

fn causal_run(params: &ImpedanceParams<f64>) -> Result<Vec<crate::metrics::CausalSample<f64>>> {
    simulate_causal_impedance(
        params,
        &ramp_reference,
        &interaction,
        DVector::from_row_slice(&[0.0, 0.1, 0.25]),
        DVector::from_row_slice(&[1.0, -0.5, 0.0]),
        1e-4,
        2.0,
    )
}

fn causal_power_balance() -> Result<Check> {
    let params = translational_shaped_gains();
    let mut worst = 0.0f64;
    for s in causal_run(&params)? {
        let b = causal_balance(&params, &s.state, &ramp_reference(s.t), &interaction(s.t))?;
        worst = worst.max(b.residual.abs());
    }
    Ok(Check::bounded(
        "causal impedance power balance (W)",
        worst,
        1e-6,
    ))
}

fn general_margin_equals_dissipation() -> Result<Check> {
    let params = translational_shaped_gains();
    let run = causal_run(&params)?;
    let m = DVector::from_element(3, 10.0);
    let t: Vec<f64> = run.iter().map(|s| s.t).collect();
    let vel_err: Vec<DVector<f64>> = run
        .iter()
        .map(|s| s.state.p.component_div(&m) - ramp_reference(s.t).velocity)
        .collect();
    let h: Vec<f64> = run
        .iter()
        .zip(&vel_err)
        .map(|(s, v)| {
            let e = &s.state.x - ramp_reference(s.t).position;
            0.5 * (e.dot(&params.stiffness.component_mul(&e)) + v.dot(&m.component_mul(v)))
        })
        .collect();
    let zeros = vec![DVector::zeros(3); run.len()];
    let f: Vec<DVector<f64>> = t.iter().map(|t| interaction(*t)).collect();
    let margin = general_passivity_margin(&t, &vel_err, &zeros, Some(&f), &h, h[0])?;
    let rate: Vec<f64> = vel_err
        .iter()
        .map(|v| v.dot(&params.damping.component_mul(v)))
        .collect();
    let dissipated = crate::metrics::cumulative_trapezoid(&t, &rate);
    let worst = margin
        .iter()
        .zip(&dissipated)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(Check::bounded(
        "general margin equals dissipated energy (J)",
        worst,
        1e-6,
    ))
}

fn power_distribution_identity() -> Result<Check> {
    let mut s = builtin_scenario("gantry_step")?;
    s.config.duration = 0.5;
    s.config.external_wrench = Some(ExternalWrench {
        constant: DVector::from_row_slice(&[3.0, -1.0, 2.0]),
        amplitude: DVector::from_row_slice(&[5.0, 4.0, -3.0]),
        frequency_hz: 2.0,
    });
    let traj = run_scenario(&s)?;
    let f = traj.log.f_int.as_ref().expect("simulator logs interaction");
    let mut worst = 0.0f64;
    for i in 0..traj.log.len() {
        let j = geometric_jacobian(&s.plant, &traj.log.q[i]);
        let d = power_distribution(
            &traj.log.qd[i],
            &traj.log.tau[i],
            &j,
            &DVector::zeros(3),
            &DVector::zeros(3),
            &f[i],
        );
        worst = worst.max(d.residual.abs());
    }
    Ok(Check::bounded(
        "gantry3 power distribution residual (W)",
        worst,
        1e-8,
    ))
}

fn step_response_oracle() -> Result<Check> {
    let sys = SecondOrder::new(800.0, 134.2, 10.0);
    let (dt, amplitude) = (1e-5, 0.4);
    let (mut x, mut v, mut worst) = (0.0f64, 0.0f64, 0.0f64);
    let acc = |x: f64, v: f64| (sys.stiffness * (amplitude - x) - sys.damping * v) / sys.mass;
    for i in 1..=200_000 {
        let (k1x, k1v) = (v, acc(x, v));
        let (k2x, k2v) = (
            v + 0.5 * dt * k1v,
            acc(x + 0.5 * dt * k1x, v + 0.5 * dt * k1v),
        );
        let (k3x, k3v) = (
            v + 0.5 * dt * k2v,
            acc(x + 0.5 * dt * k2x, v + 0.5 * dt * k2v),
        );
        let (k4x, k4v) = (v + dt * k3v, acc(x + dt * k3x, v + dt * k3v));
        x += dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        v += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        let (xc, _) = step_response_closed_form(&sys, amplitude, i as f64 * dt)?;
        worst = worst.max((xc - x).abs());
    }
    Ok(Check::bounded(
        "step closed form against RK4 (m)",
        worst,
        1e-8,
    ))
}

fn perfect_rendering() -> Result<Check> {
    let mut s = builtin_scenario("gantry_step")?;
    s.config.duration = 0.3;
    s.config.control_dt = 1e-5;
    s.config.physics_substeps = 1;
    let traj = run_scenario(&s)?;
    let t: Vec<f64> = traj.metrics.samples.iter().map(|m| m.t).collect();
    let e: Vec<f64> = traj
        .metrics
        .samples
        .iter()
        .map(|m| m.e_step.unwrap_or(f64::NAN))
        .collect();
    Ok(Check::bounded(
        "gantry3 rendered step power error RMS (W)",
        rms_over_window(&t, &e, 0.0, 0.25)?,
        0.1,
    ))
}

/// Runs every check; none of them stops the others.
pub fn run_validation(hooks: &ValidationHooks) -> Vec<Check> {
    vec![
        Check::from_result("planar2 M, g, J closed form", planar2_oracle(hooks)),
        Check::from_result(
            "arm6 mass matrix symmetric positive definite",
            mass_matrix_symmetry(hooks),
        ),
        Check::from_result("arm6 skew symmetry of Ṁ − 2C", skew_symmetry(hooks)),
        Check::from_result("planar2 unforced energy drift (J)", energy_conservation()),
        Check::from_result("step_arm energy audit (J)", closed_loop_energy_audit()),
        Check::from_result("causal impedance power balance (W)", causal_power_balance()),
        Check::from_result(
            "general margin equals dissipated energy (J)",
            general_margin_equals_dissipation(),
        ),
        Check::from_result(
            "gantry3 power distribution residual (W)",
            power_distribution_identity(),
        ),
        Check::from_result("step closed form against RK4 (m)", step_response_oracle()),
        Check::from_result(
            "gantry3 rendered step power error RMS (W)",
            perfect_rendering(),
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pristine_build_passes() {
        for c in run_validation(&ValidationHooks::default()) {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }

    #[test]
    fn injected_asymmetry_is_caught() {
        let checks = run_validation(&ValidationHooks {
            mass_matrix_asymmetry: 1e-3,
        });
        let failed: Vec<_> = checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name)
            .collect();
        assert!(failed.contains(&"arm6 mass matrix symmetric positive definite"));
        assert!(failed.contains(&"planar2 M, g, J closed form"));
    }
}
