//! Kinematics and rigid-body dynamics of serial chains:
//! `M(q) q̈ + C(q, q̇) q̇ + g(q) = τ + Jᵀ f_ext`.
//!
//! The mass matrix comes from the composite-rigid-body algorithm, gravity and
//! bias torques from recursive Newton-Euler sweeps, and the Coriolis matrix from
//! Christoffel symbols of the composite-rigid-body derivatives.

mod chain;
mod inertia;
mod rnea;
mod task_space;

pub use chain::ChainFrames;
pub use task_space::{
    task_space_model, task_space_model_with, TaskSpaceModel, DEFAULT_SINGULAR_THRESHOLD,
};

use nalgebra::{DMatrix, DVector, Isometry3, Rotation3, Vector3};

use crate::error::{Error, Result};
use crate::model::{RobotModel, TaskAxis};
use crate::scalar::{lit, Real};

/// Joint positions and rates of an `n`-joint chain.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState<T: Real> {
    pub q: DVector<T>,
    pub qd: DVector<T>,
}

impl<T: Real> JointState<T> {
    pub fn new(q: DVector<T>, qd: DVector<T>) -> Self {
        assert_eq!(q.len(), qd.len(), "q and qd dimensions differ");
        Self { q, qd }
    }

    pub fn at_rest(q: DVector<T>) -> Self {
        let n = q.len();
        Self::new(q, DVector::zeros(n))
    }

    pub fn dof(&self) -> usize {
        self.q.len()
    }

    /// Generalized momenta `p = M(q) q̇`.
    pub fn momenta(&self, model: &RobotModel<T>) -> DVector<T> {
        mass_matrix(model, &self.q) * &self.qd
    }
}

/// End-effector pose and task-space twist.
#[derive(Debug, Clone, PartialEq)]
pub struct CartesianState<T: Real> {
    pub position: Vector3<T>,
    pub orientation: Rotation3<T>,
    /// Task-space twist (`k` components, linear before angular).
    pub twist: DVector<T>,
}

impl<T: Real> CartesianState<T> {
    pub fn pose(&self) -> Isometry3<T> {
        Isometry3::from_parts(
            self.position.into(),
            nalgebra::UnitQuaternion::from_rotation_matrix(&self.orientation),
        )
    }
}

fn select_rows<T: Real>(model: &RobotModel<T>, full: &DMatrix<T>) -> DMatrix<T> {
    let rows: Vec<usize> = model.task.iter().map(|a| a.twist_index()).collect();
    full.select_rows(rows.iter())
}

/// Tool pose from chained joint transforms. The twist is left at zero.
pub fn forward_kinematics<T: Real>(model: &RobotModel<T>, q: &DVector<T>) -> CartesianState<T> {
    let frames = ChainFrames::new(model, q);
    CartesianState {
        position: frames.tool_position,
        orientation: frames.tool_pose.rotation.to_rotation_matrix(),
        twist: DVector::zeros(model.task_dim()),
    }
}

/// Tool pose together with the task twist `J(q) q̇`.
pub fn cartesian_state<T: Real>(
    model: &RobotModel<T>,
    q: &DVector<T>,
    qd: &DVector<T>,
) -> CartesianState<T> {
    let frames = ChainFrames::new(model, q);
    let j = select_rows(model, &frames.full_jacobian(model.end_effector_link));
    CartesianState {
        position: frames.tool_position,
        orientation: frames.tool_pose.rotation.to_rotation_matrix(),
        twist: j * qd,
    }
}

pub fn mass_matrix<T: Real>(model: &RobotModel<T>, q: &DVector<T>) -> DMatrix<T> {
    inertia::crba(&ChainFrames::new(model, q))
}

/// Generalized gravity torques `∂U_g/∂q`.
pub fn gravity_vector<T: Real>(model: &RobotModel<T>, q: &DVector<T>) -> DVector<T> {
    let frames = ChainFrames::new(model, q);
    let zero = DVector::zeros(model.dof());
    rnea::inverse_dynamics(model, &frames, &zero, &zero, true)
}

/// Velocity-product torques `C(q, q̇) q̇`.
pub fn coriolis_torques<T: Real>(
    model: &RobotModel<T>,
    q: &DVector<T>,
    qd: &DVector<T>,
) -> DVector<T> {
    let frames = ChainFrames::new(model, q);
    let zero = DVector::zeros(model.dof());
    rnea::inverse_dynamics(model, &frames, qd, &zero, false)
}

pub fn coriolis_matrix<T: Real>(
    model: &RobotModel<T>,
    q: &DVector<T>,
    qd: &DVector<T>,
) -> DMatrix<T> {
    inertia::christoffel_coriolis(&ChainFrames::new(model, q), qd)
}

/// `Ṁ(q, q̇)` from the analytic configuration derivatives of the mass matrix.
pub fn mass_matrix_rate<T: Real>(
    model: &RobotModel<T>,
    q: &DVector<T>,
    qd: &DVector<T>,
) -> DMatrix<T> {
    inertia::mass_matrix_rate(&ChainFrames::new(model, q), qd)
}

/// Inverse dynamics `M q̈ + C q̇ + g`.
pub fn inverse_dynamics<T: Real>(
    model: &RobotModel<T>,
    q: &DVector<T>,
    qd: &DVector<T>,
    qdd: &DVector<T>,
) -> DVector<T> {
    rnea::inverse_dynamics(model, &ChainFrames::new(model, q), qd, qdd, true)
}

/// Gravitational potential energy with the datum at the base origin.
pub fn potential_energy<T: Real>(model: &RobotModel<T>, q: &DVector<T>) -> T {
    rnea::potential_energy(model, &ChainFrames::new(model, q))
}

/// Task Jacobian (`k × n`): rows of the tool twist selected by the model's task.
pub fn geometric_jacobian<T: Real>(model: &RobotModel<T>, q: &DVector<T>) -> DMatrix<T> {
    let frames = ChainFrames::new(model, q);
    select_rows(model, &frames.full_jacobian(model.end_effector_link))
}

pub fn jacobian_dot<T: Real>(model: &RobotModel<T>, q: &DVector<T>, qd: &DVector<T>) -> DMatrix<T> {
    let frames = ChainFrames::new(model, q);
    select_rows(
        model,
        &frames.full_jacobian_dot(model.end_effector_link, qd),
    )
}

/// Joint accelerations `q̈ = M⁻¹(τ + Jᵀ f_ext − C q̇ − g)`.
pub fn forward_dynamics<T: Real>(
    model: &RobotModel<T>,
    q: &DVector<T>,
    qd: &DVector<T>,
    tau: &DVector<T>,
    f_ext: &DVector<T>,
) -> Result<DVector<T>> {
    let frames = ChainFrames::new(model, q);
    forward_dynamics_frames(model, &frames, qd, tau, f_ext)
}

pub(crate) fn forward_dynamics_frames<T: Real>(
    model: &RobotModel<T>,
    frames: &ChainFrames<T>,
    qd: &DVector<T>,
    tau: &DVector<T>,
    f_ext: &DVector<T>,
) -> Result<DVector<T>> {
    let n = model.dof();
    if tau.len() != n || f_ext.len() != model.task_dim() {
        return Err(Error::Dimension(format!(
            "forward dynamics expects τ ∈ R^{n} and f_ext ∈ R^{}",
            model.task_dim()
        )));
    }
    let zero = DVector::zeros(n);
    let bias = rnea::inverse_dynamics(model, frames, qd, &zero, true);
    let m = inertia::crba(frames);
    let mut rhs = tau - bias;
    if f_ext.iter().any(|f| *f != T::zero()) {
        let j = select_rows(model, &frames.full_jacobian(model.end_effector_link));
        rhs += j.transpose() * f_ext;
    }
    m.cholesky()
        .map(|c| c.solve(&rhs))
        .ok_or_else(|| Error::Semantic("mass matrix is not positive definite".into()))
}

/// Task-space error `x ⊖ x_d`: position difference for translational axes and
/// the world-frame rotation vector of `R R_dᵀ` for rotational axes.
pub fn task_error<T: Real>(
    model: &RobotModel<T>,
    actual: &Isometry3<T>,
    desired: &Isometry3<T>,
) -> DVector<T> {
    axis_error(&model.task, actual, desired)
}

/// [`task_error`] on an explicit list of axes.
pub fn axis_error<T: Real>(
    axes: &[TaskAxis],
    actual: &Isometry3<T>,
    desired: &Isometry3<T>,
) -> DVector<T> {
    let dp = actual.translation.vector - desired.translation.vector;
    let dr = (actual.rotation * desired.rotation.inverse()).scaled_axis();
    DVector::from_iterator(
        axes.len(),
        axes.iter().map(|a| {
            let i = a.twist_index();
            if i < 3 {
                dp[i]
            } else {
                dr[i - 3]
            }
        }),
    )
}

/// Task coordinates of a pose: position components and world rotation-vector components.
pub fn task_coordinates<T: Real>(model: &RobotModel<T>, pose: &Isometry3<T>) -> DVector<T> {
    axis_error(&model.task, pose, &Isometry3::identity())
}

/// Pose with the given task coordinates, inverse of [`task_coordinates`] on the
/// selected axes; unselected components are taken from `template`.
pub fn pose_from_task_coordinates<T: Real>(
    model: &RobotModel<T>,
    coords: &DVector<T>,
    template: &Isometry3<T>,
) -> Isometry3<T> {
    let mut p = template.translation.vector;
    let mut r = template.rotation.scaled_axis();
    for (a, &c) in model.task.iter().zip(coords.iter()) {
        let i = a.twist_index();
        if i < 3 {
            p[i] = c;
        } else {
            r[i - 3] = c;
        }
    }
    Isometry3::from_parts(p.into(), nalgebra::UnitQuaternion::from_scaled_axis(r))
}

/// Damped least-squares inverse kinematics on the task axes.
pub fn inverse_kinematics<T: Real>(
    model: &RobotModel<T>,
    target: &Isometry3<T>,
    q0: &DVector<T>,
) -> Result<DVector<T>> {
    let mut q = q0.clone();
    let damping = lit::<T>(1e-6);
    let tol = lit::<T>(1e-10).max(T::epsilon() * lit(64.0));
    for _ in 0..500 {
        let frames = ChainFrames::new(model, &q);
        let err = task_error(model, &frames.tool_pose, target);
        if err.amax() < tol {
            return Ok(q);
        }
        let j = select_rows(model, &frames.full_jacobian(model.end_effector_link));
        let jjt = &j * j.transpose() + DMatrix::identity(j.nrows(), j.nrows()) * damping;
        let step = match jjt.cholesky() {
            Some(c) => j.transpose() * c.solve(&err),
            None => break,
        };
        q -= step;
    }
    Err(Error::Config(format!(
        "inverse kinematics did not converge for `{}`",
        model.name
    )))
}
