//! The benchmark experiments: arm step, suspended-leg gait and leg jump.

use nalgebra::{DVector, Isometry3};

use super::config::{ContactParams, LimitSprings, SimConfig};
use super::engine::Scenario;
use crate::control::{
    arm_shaped_gains, arm_unshaped_gains, leg_gains, translational_shaped_gains, ReferenceSignal,
};
use crate::dynamics::{forward_kinematics, inverse_kinematics, JointState};
use crate::error::{Error, Result};
use crate::model::{builtin_model, leg3_floating, TaskAxis};

/// Arm configuration before the step: shoulder pitched back, elbow and wrist
/// bent, well away from singular poses along the whole step.
pub const ARM_INITIAL_Q: [f64; 6] = [0.0, 2.58, 0.56, -0.36, 1.46, -0.06];
pub const STEP_AMPLITUDE: f64 = 0.4;
pub const STEP_DURATION: f64 = 2.0;

/// Foot position relative to the trunk frame when the leg is at rest (m).
pub const LEG_REST_FOOT: [f64; 3] = [0.0, 0.0, -0.5];
pub const GAIT_STEP_LENGTH: f64 = 0.4;
pub const GAIT_PERIOD: f64 = 0.7;
pub const GAIT_STEP_HEIGHT: f64 = 0.08;
pub const GAIT_DURATION: f64 = 10.0;

pub const TRUNK_MASS: f64 = 5.0;
pub const JUMP_DROP: f64 = 1.0;
pub const JUMP_RETURN_DELAY: f64 = 0.2;
/// Time given to the standing leg to settle before the jump command.
pub const JUMP_START: f64 = 0.5;
pub const JUMP_DURATION: f64 = 2.5;

const LEG_IK_SEED: [f64; 3] = [0.0, 0.5, -1.0];

pub fn scenario_names() -> &'static [&'static str] {
    &[
        "step_arm",
        "step_arm_no_is",
        "gantry_step",
        "cpg_leg",
        "jump_leg",
    ]
}

pub fn builtin_scenario(name: &str) -> Result<Scenario<f64>> {
    match name {
        "step_arm" => step_arm(true),
        "step_arm_no_is" => step_arm(false),
        "gantry_step" => gantry_step(),
        "cpg_leg" => cpg_leg(),
        "jump_leg" => jump_leg(),
        other => Err(Error::Config(format!("unknown scenario `{other}`"))),
    }
}

fn rest_foot() -> Isometry3<f64> {
    Isometry3::translation(LEG_REST_FOOT[0], LEG_REST_FOOT[1], LEG_REST_FOOT[2])
}

/// 0.4 m step along x on the 6-axis arm, with or without inertia shaping.
pub fn step_arm(inertia_shaping: bool) -> Result<Scenario<f64>> {
    let plant = builtin_model("arm6")?;
    let q0 = DVector::from_row_slice(&ARM_INITIAL_Q);
    let base = forward_kinematics(&plant, &q0).pose();
    let (name, params) = if inertia_shaping {
        ("step_arm", arm_shaped_gains())
    } else {
        ("step_arm_no_is", arm_unshaped_gains())
    };
    Ok(Scenario {
        name: name.into(),
        plant,
        controller_offset: 0,
        params,
        reference: ReferenceSignal::step(TaskAxis::X, STEP_AMPLITUDE, base),
        initial: JointState::at_rest(q0),
        config: SimConfig::new(STEP_DURATION),
    })
}

/// The same step on the Cartesian gantry, where the rendering can be exact.
pub fn gantry_step() -> Result<Scenario<f64>> {
    let plant = builtin_model("gantry3")?;
    let q0 = DVector::zeros(3);
    let base = forward_kinematics(&plant, &q0).pose();
    Ok(Scenario {
        name: "gantry_step".into(),
        plant,
        controller_offset: 0,
        params: translational_shaped_gains(),
        reference: ReferenceSignal::step(TaskAxis::X, STEP_AMPLITUDE, base),
        initial: JointState::at_rest(q0),
        config: SimConfig::new(STEP_DURATION),
    })
}

/// Suspended leg tracking the gait cycle; the foot starts on the reference.
///
/// The gait is passed to the controller as a pose-only reference.
pub fn cpg_leg() -> Result<Scenario<f64>> {
    let plant = builtin_model("leg3")?;
    let reference =
        ReferenceSignal::gait(GAIT_STEP_LENGTH, GAIT_PERIOD, GAIT_STEP_HEIGHT, rest_foot())
            .into_pose_only();
    let q0 = inverse_kinematics(
        &plant,
        &reference.evaluate(0.0).pose,
        &DVector::from_row_slice(&LEG_IK_SEED),
    )?;
    Ok(Scenario {
        name: "cpg_leg".into(),
        plant,
        controller_offset: 0,
        params: leg_gains(),
        reference,
        initial: JointState::at_rest(q0),
        config: SimConfig::new(GAIT_DURATION),
    })
}

/// Leg under a trunk sliding on a vertical rail, standing on penalty ground.
/// The trunk-relative foot reference drops by 1 m and comes back 0.2 s later.
pub fn jump_leg() -> Result<Scenario<f64>> {
    let plant = leg3_floating(TRUNK_MASS)?;
    let leg = plant.subchain(1)?;
    let q_leg = inverse_kinematics(&leg, &rest_foot(), &DVector::from_row_slice(&LEG_IK_SEED))?;
    let mut q0 = DVector::zeros(plant.dof());
    // trunk height that puts the foot on the ground
    q0[0] = -LEG_REST_FOOT[2];
    q0.rows_mut(1, 3).copy_from(&q_leg);
    let mut config = SimConfig::new(JUMP_DURATION);
    config.contact = Some(ContactParams::default());
    config.joint_limits = Some(LimitSprings {
        stiffness: 1e4,
        damping: 50.0,
    });
    Ok(Scenario {
        name: "jump_leg".into(),
        plant,
        controller_offset: 1,
        params: leg_gains(),
        reference: ReferenceSignal::jump_at(JUMP_DROP, JUMP_RETURN_DELAY, rest_foot(), JUMP_START),
        initial: JointState::at_rest(q0),
        config,
    })
}
