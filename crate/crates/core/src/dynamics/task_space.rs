use nalgebra::{DMatrix, DVector};

use super::chain::ChainFrames;
use super::{inertia, select_rows};
use crate::error::{Error, Result};
use crate::model::RobotModel;
use crate::scalar::{lit, Real};

/// Smallest admissible singular value of the task Jacobian.
pub const DEFAULT_SINGULAR_THRESHOLD: f64 = 1e-4;

/// Robot dynamics reflected to the task space at one state.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskSpaceModel<T: Real> {
    /// Task-space inertia `Λ(x)`.
    pub lambda: DMatrix<T>,
    /// Task-space Coriolis matrix `Γ(x, ẋ)`.
    pub gamma: DMatrix<T>,
    pub jacobian: DMatrix<T>,
    pub jacobian_dot: DMatrix<T>,
    /// Joint-space quantities the task model was built from.
    pub mass: DMatrix<T>,
    pub coriolis: DMatrix<T>,
    pub sigma_min: T,
}

pub fn task_space_model<T: Real>(
    model: &RobotModel<T>,
    q: &DVector<T>,
    qd: &DVector<T>,
) -> Result<TaskSpaceModel<T>> {
    task_space_model_with(model, q, qd, lit(DEFAULT_SINGULAR_THRESHOLD))
}

/// `Λ = J⁻ᵀ M J⁻¹` and `Γ = J⁻ᵀ (C − M J⁻¹ J̇) J⁻¹` for square Jacobians.
///
/// For `k < n` the dynamically consistent inverse `J̄ = M⁻¹ Jᵀ Λ` replaces `J⁻¹`,
/// with `Λ = (J M⁻¹ Jᵀ)⁻¹`.
pub fn task_space_model_with<T: Real>(
    model: &RobotModel<T>,
    q: &DVector<T>,
    qd: &DVector<T>,
    singular_threshold: T,
) -> Result<TaskSpaceModel<T>> {
    let frames = ChainFrames::new(model, q);
    let (k, n) = (model.task_dim(), model.dof());
    if k > n {
        return Err(Error::Dimension(format!(
            "task dimension {k} exceeds the {n} joints of `{}`",
            model.name
        )));
    }
    let j = select_rows(model, &frames.full_jacobian(model.end_effector_link));
    let jd = select_rows(
        model,
        &frames.full_jacobian_dot(model.end_effector_link, qd),
    );
    let sigma_min = j
        .singular_values()
        .iter()
        .copied()
        .fold(T::max_value().unwrap(), |a, b| a.min(b));
    if sigma_min < singular_threshold {
        return Err(Error::SingularConfiguration {
            sigma_min: sigma_min.as_f64(),
            threshold: singular_threshold.as_f64(),
        });
    }
    let m = inertia::crba(&frames);
    let c = inertia::christoffel_coriolis(&frames, qd);

    let (lambda, j_inv) = if k == n {
        let j_inv = j
            .clone()
            .try_inverse()
            .ok_or(Error::SingularConfiguration {
                sigma_min: 0.0,
                threshold: singular_threshold.as_f64(),
            })?;
        (j_inv.transpose() * &m * &j_inv, j_inv)
    } else {
        let m_inv = m
            .clone()
            .cholesky()
            .ok_or_else(|| Error::Semantic("mass matrix is not positive definite".into()))?
            .inverse();
        let lambda =
            (&j * &m_inv * j.transpose())
                .try_inverse()
                .ok_or(Error::SingularConfiguration {
                    sigma_min: sigma_min.as_f64(),
                    threshold: singular_threshold.as_f64(),
                })?;
        let j_bar = &m_inv * j.transpose() * &lambda;
        (lambda, j_bar)
    };
    let lambda = (&lambda + lambda.transpose()) * lit::<T>(0.5);
    let gamma = j_inv.transpose() * (&c - &m * &j_inv * &jd) * &j_inv;
    Ok(TaskSpaceModel {
        lambda,
        gamma,
        jacobian: j,
        jacobian_dot: jd,
        mass: m,
        coriolis: c,
        sigma_min,
    })
}
