use nalgebra::{DMatrix, DVector};

use super::params::{DesiredInertia, ImpedanceParams};
use super::reference::ReferenceSample;
use crate::dynamics::{gravity_vector, task_error, task_space_model, ChainFrames, TaskSpaceModel};
use crate::error::{Error, Result};
use crate::model::RobotModel;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct ControlOutput<T: Real> {
    /// Joint torques (N·m) or forces (N).
    pub tau_act: DVector<T>,
    /// Cartesian wrench mapped through `Jᵀ`, before gravity compensation is added.
    pub cartesian_force_cmd: DVector<T>,
}

/// Pose error `e` and twist error `ė` of the tool against a reference sample.
pub fn tracking_error<T: Real>(
    model: &RobotModel<T>,
    q: &DVector<T>,
    twist: &DVector<T>,
    reference: &ReferenceSample<T>,
) -> (DVector<T>, DVector<T>) {
    let frames = ChainFrames::new(model, q);
    let e = task_error(model, &frames.tool_pose, &reference.pose);
    let e_dot = twist - reference.task_velocity(model);
    (e, e_dot)
}

/// Impedance law with inertia shaping: renders the fixed inertia `Λ_d` using
/// feedback of the measured interaction wrench `f_int`.
pub fn control_with_inertia_shaping<T: Real>(
    model: &RobotModel<T>,
    q: &DVector<T>,
    qd: &DVector<T>,
    reference: &ReferenceSample<T>,
    params: &ImpedanceParams<T>,
    f_int: &DVector<T>,
) -> Result<ControlOutput<T>> {
    let ts = task_space_model(model, q, qd)?;
    shaped_law(model, q, qd, &ts, reference, params, f_int)
}

/// Impedance law that keeps the robot's own task inertia; no wrench feedback.
pub fn control_without_inertia_shaping<T: Real>(
    model: &RobotModel<T>,
    q: &DVector<T>,
    qd: &DVector<T>,
    reference: &ReferenceSample<T>,
    params: &ImpedanceParams<T>,
) -> Result<ControlOutput<T>> {
    let ts = task_space_model(model, q, qd)?;
    unshaped_law(model, q, qd, &ts, reference, params)
}

/// Dispatches on `params.inertia`. `f_int` is required only with inertia shaping.
pub fn impedance_control<T: Real>(
    model: &RobotModel<T>,
    q: &DVector<T>,
    qd: &DVector<T>,
    reference: &ReferenceSample<T>,
    params: &ImpedanceParams<T>,
    f_int: Option<&DVector<T>>,
) -> Result<ControlOutput<T>> {
    let ts = task_space_model(model, q, qd)?;
    impedance_control_with(model, q, qd, &ts, reference, params, f_int)
}

/// As [`impedance_control`] with a precomputed task-space model.
pub fn impedance_control_with<T: Real>(
    model: &RobotModel<T>,
    q: &DVector<T>,
    qd: &DVector<T>,
    ts: &TaskSpaceModel<T>,
    reference: &ReferenceSample<T>,
    params: &ImpedanceParams<T>,
    f_int: Option<&DVector<T>>,
) -> Result<ControlOutput<T>> {
    match &params.inertia {
        DesiredInertia::Fixed(_) => {
            let f = f_int.ok_or(Error::MissingInteractionData)?;
            shaped_law(model, q, qd, ts, reference, params, f)
        }
        DesiredInertia::TaskInertia => unshaped_law(model, q, qd, ts, reference, params),
    }
}

fn shaped_law<T: Real>(
    model: &RobotModel<T>,
    q: &DVector<T>,
    qd: &DVector<T>,
    ts: &TaskSpaceModel<T>,
    reference: &ReferenceSample<T>,
    params: &ImpedanceParams<T>,
    f_int: &DVector<T>,
) -> Result<ControlOutput<T>> {
    let inertia = match &params.inertia {
        DesiredInertia::Fixed(m) => m,
        DesiredInertia::TaskInertia => {
            return Err(Error::InvalidParams(
                "inertia shaping needs a fixed desired inertia".into(),
            ))
        }
    };
    let k = model.task_dim();
    params.check_dim(k)?;
    if f_int.len() != k {
        return Err(Error::Dimension(format!(
            "interaction wrench has {} entries, task has {k}",
            f_int.len()
        )));
    }
    let twist = &ts.jacobian * qd;
    let (e, e_dot) = tracking_error(model, q, &twist, reference);
    // Λ Λ_d⁻¹ scales columns of Λ by the inverse desired inertia
    let mut ratio = ts.lambda.clone();
    for (mut col, m) in ratio.column_iter_mut().zip(inertia.iter()) {
        col /= *m;
    }
    let spring_damper = params.damping.component_mul(&e_dot) + params.stiffness.component_mul(&e);
    let force = &ts.lambda * reference.task_acceleration(model) + &ts.gamma * &twist
        - &ratio * spring_damper
        + (ratio - DMatrix::identity(k, k)) * f_int;
    Ok(finish(model, q, ts, force))
}

fn unshaped_law<T: Real>(
    model: &RobotModel<T>,
    q: &DVector<T>,
    qd: &DVector<T>,
    ts: &TaskSpaceModel<T>,
    reference: &ReferenceSample<T>,
    params: &ImpedanceParams<T>,
) -> Result<ControlOutput<T>> {
    if params.inertia_shaping() {
        return Err(Error::InvalidParams(
            "law without inertia shaping takes the task inertia marker".into(),
        ));
    }
    params.check_dim(model.task_dim())?;
    let twist = &ts.jacobian * qd;
    let (e, e_dot) = tracking_error(model, q, &twist, reference);
    let force = &ts.lambda * reference.task_acceleration(model) + &ts.gamma * &twist
        - params.damping.component_mul(&e_dot)
        - params.stiffness.component_mul(&e);
    Ok(finish(model, q, ts, force))
}

fn finish<T: Real>(
    model: &RobotModel<T>,
    q: &DVector<T>,
    ts: &TaskSpaceModel<T>,
    force: DVector<T>,
) -> ControlOutput<T> {
    let tau_act = gravity_vector(model, q) + ts.jacobian.transpose() * &force;
    ControlOutput {
        tau_act,
        cartesian_force_cmd: force,
    }
}
