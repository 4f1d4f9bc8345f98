use nalgebra::{DMatrix, DVector};

use super::energy::{impedance_hamiltonian, robot_hamiltonian};
use super::passivity::{
    cartesian_power, general_passivity_margin, hamiltonian_gap, quasi_static_passivity_margin,
};
use super::series::held_torque_work;
use super::step::{SecondOrder, StepSpec};
use crate::control::{DesiredInertia, ImpedanceParams, ReferenceKind, ReferenceSignal};
use crate::dynamics::{task_coordinates, task_error, task_space_model, ChainFrames};
use crate::error::{Error, Result};
use crate::model::RobotModel;
use crate::scalar::Real;

/// Joint-space record of a closed-loop run on a uniform grid.
///
/// `tau[i]` is the actuator torque held from `t[i]` to `t[i + 1]`; `f_int[i]`
/// is the interaction wrench on the task axes at `t[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunLog<T: Real> {
    pub t: Vec<T>,
    pub q: Vec<DVector<T>>,
    pub qd: Vec<DVector<T>>,
    pub tau: Vec<DVector<T>>,
    pub f_int: Option<Vec<DVector<T>>>,
}

impl<T: Real> RunLog<T> {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
}

/// Everything needed to turn a [`RunLog`] into metrics.
#[derive(Debug, Clone)]
pub struct MetricsContext<T: Real> {
    /// Whole mechanism, used for the robot energy and commanded power.
    pub plant: RobotModel<T>,
    /// Chain seen by the controller, used for the task coordinates and the
    /// impedance energy.
    pub controller: RobotModel<T>,
    /// First plant joint driven by the controller.
    pub controller_offset: usize,
    pub params: ImpedanceParams<T>,
    pub reference: ReferenceSignal<T>,
    pub step: Option<StepSpec<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsSample<T: Real> {
    pub t: T,
    pub h_q: T,
    pub h_omega: T,
    pub p_cmd: T,
    pub int_p_cmd: T,
    pub hamiltonian_gap: T,
    /// Commanded-power margin; `None` when the reference is not pose-only.
    pub passivity_margin: Option<T>,
    /// Exogenous-input margin; `None` without interaction data.
    pub general_passivity_margin: Option<T>,
    pub p_x: T,
    pub p_step_ref: Option<T>,
    pub e_step: Option<T>,
}

#[derive(Debug, Clone)]
pub struct RunMetrics<T: Real> {
    pub samples: Vec<MetricsSample<T>>,
    /// Task coordinates of the tool.
    pub x: Vec<DVector<T>>,
    /// Task coordinates of the reference pose.
    pub x_ref: Vec<DVector<T>>,
    /// Impedance energy just before the first sample, the datum of both margins.
    pub h_omega_datum: T,
}

/// Step description for a single-axis step reference on one of the task axes.
///
/// The model mass is the desired inertia on that axis, or the task inertia at
/// `q0` when no inertia shaping is configured.
pub fn step_spec_for<T: Real>(
    controller: &RobotModel<T>,
    params: &ImpedanceParams<T>,
    reference: &ReferenceSignal<T>,
    q0: &DVector<T>,
) -> Result<Option<StepSpec<T>>> {
    let ReferenceKind::Step {
        axis,
        amplitude,
        time,
        ..
    } = &reference.kind
    else {
        return Ok(None);
    };
    let Some(index) = controller.task.iter().position(|a| a == axis) else {
        return Err(Error::Config(format!(
            "step axis `{}` is not a task axis",
            axis.as_str()
        )));
    };
    let mass = match &params.inertia {
        DesiredInertia::Fixed(m) => m[index],
        DesiredInertia::TaskInertia => {
            task_space_model(controller, q0, &DVector::zeros(q0.len()))?.lambda[(index, index)]
        }
    };
    Ok(Some(StepSpec {
        axis: index,
        amplitude: *amplitude,
        time: *time,
        model: SecondOrder::new(params.stiffness[index], params.damping[index], mass),
    }))
}

struct ImpedanceTerms<T: Real> {
    h: T,
    error: DVector<T>,
    x_dot: DVector<T>,
    velocity_error: DVector<T>,
    momentum_rate: DVector<T>,
}

fn impedance_terms<T: Real>(
    ctx: &MetricsContext<T>,
    q: &DVector<T>,
    qd: &DVector<T>,
    reference: &crate::control::ReferenceSample<T>,
) -> Result<ImpedanceTerms<T>> {
    let model = &ctx.controller;
    let (inertia, jacobian) = match &ctx.params.inertia {
        DesiredInertia::Fixed(m) => (
            DMatrix::from_diagonal(m),
            crate::dynamics::geometric_jacobian(model, q),
        ),
        DesiredInertia::TaskInertia => {
            let ts = task_space_model(model, q, qd)?;
            (ts.lambda, ts.jacobian)
        }
    };
    let frames = ChainFrames::new(model, q);
    let error = task_error(model, &frames.tool_pose, &reference.pose);
    let x_dot = jacobian * qd;
    let velocity_error = &x_dot - reference.task_velocity(model);
    let h = impedance_hamiltonian(&error, &velocity_error, &ctx.params.stiffness, &inertia);
    let momentum_rate = &inertia * reference.task_acceleration(model);
    Ok(ImpedanceTerms {
        h,
        error,
        x_dot,
        velocity_error,
        momentum_rate,
    })
}

/// Computes every per-sample metric of a run from its joint-space log.
pub fn evaluate_run<T: Real>(ctx: &MetricsContext<T>, log: &RunLog<T>) -> Result<RunMetrics<T>> {
    let n = log.len();
    if n == 0 {
        return Err(Error::Config("empty run log".into()));
    }
    if log.q.len() != n || log.qd.len() != n || log.tau.len() != n {
        return Err(Error::Dimension("run log columns differ in length".into()));
    }
    let dof = ctx.plant.dof();
    let c_dof = ctx.controller.dof();
    if ctx.controller_offset + c_dof != dof {
        return Err(Error::Dimension(
            "controller chain does not end the plant chain".into(),
        ));
    }
    if log
        .q
        .iter()
        .chain(&log.qd)
        .chain(&log.tau)
        .any(|v| v.len() != dof)
    {
        return Err(Error::Dimension(format!(
            "log rows must have {dof} joint entries"
        )));
    }
    ctx.params.check_dim(ctx.controller.task_dim())?;
    let sub = |v: &DVector<T>| v.rows(ctx.controller_offset, c_dof).into_owned();

    let q0 = &log.q[0];
    let h_q_datum = robot_hamiltonian(&ctx.plant, q0, &log.qd[0], q0);
    let h_omega_datum = impedance_terms(
        ctx,
        &sub(q0),
        &sub(&log.qd[0]),
        &ctx.reference.evaluate_before(log.t[0]),
    )?
    .h;

    let work = held_torque_work(&log.q, &log.tau);
    let mut samples = Vec::with_capacity(n);
    let mut x = Vec::with_capacity(n);
    let mut x_ref = Vec::with_capacity(n);
    let mut h_omega = Vec::with_capacity(n);
    let mut gaps = Vec::with_capacity(n);
    let mut vel_err = Vec::with_capacity(n);
    let mut momentum_rate = Vec::with_capacity(n);
    for i in 0..n {
        let (q, qd) = (&log.q[i], &log.qd[i]);
        let r = ctx.reference.evaluate(log.t[i]);
        let (qc, qdc) = (sub(q), sub(qd));
        let terms = impedance_terms(ctx, &qc, &qdc, &r)?;
        let h_q = robot_hamiltonian(&ctx.plant, q, qd, q0);
        let gap = hamiltonian_gap(h_q, h_q_datum, terms.h, h_omega_datum);
        let p_x = cartesian_power(
            &terms.x_dot,
            &terms.error,
            &ctx.params.stiffness,
            &ctx.params.damping,
        );
        let p_step_ref = ctx
            .step
            .as_ref()
            .map(|s| s.reference_power(log.t[i]))
            .transpose()?;
        samples.push(MetricsSample {
            t: log.t[i],
            h_q,
            h_omega: terms.h,
            p_cmd: qd.dot(&log.tau[i]),
            int_p_cmd: work[i],
            hamiltonian_gap: gap,
            passivity_margin: None,
            general_passivity_margin: None,
            p_x,
            p_step_ref,
            e_step: p_step_ref.map(|p| p - p_x),
        });
        x.push(task_coordinates(
            &ctx.controller,
            &ChainFrames::new(&ctx.controller, &qc).tool_pose,
        ));
        x_ref.push(task_coordinates(&ctx.controller, &r.pose));
        h_omega.push(terms.h);
        gaps.push(gap);
        vel_err.push(terms.velocity_error);
        momentum_rate.push(terms.momentum_rate);
    }

    match quasi_static_passivity_margin(&log.t, &work, &gaps, &ctx.reference) {
        Ok(m) => samples
            .iter_mut()
            .zip(m)
            .for_each(|(s, v)| s.passivity_margin = Some(v)),
        Err(Error::NonQuasiStaticReference { .. }) => {}
        Err(e) => return Err(e),
    }
    if let Some(f) = &log.f_int {
        let m = general_passivity_margin(
            &log.t,
            &vel_err,
            &momentum_rate,
            Some(f),
            &h_omega,
            h_omega_datum,
        )?;
        samples
            .iter_mut()
            .zip(m)
            .for_each(|(s, v)| s.general_passivity_margin = Some(v));
    }
    Ok(RunMetrics {
        samples,
        x,
        x_ref,
        h_omega_datum,
    })
}
