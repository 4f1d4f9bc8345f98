//! Recursive Newton-Euler inverse dynamics in world coordinates.

use nalgebra::{DVector, Vector6};

use super::chain::ChainFrames;
use crate::model::RobotModel;
use crate::scalar::Real;
use crate::spatial::{self, force_cross, motion_cross};

/// `τ = M(q) q̈ + C(q, q̇) q̇ + g(q)`.
pub fn inverse_dynamics<T: Real>(
    model: &RobotModel<T>,
    frames: &ChainFrames<T>,
    qd: &DVector<T>,
    qdd: &DVector<T>,
    with_gravity: bool,
) -> DVector<T> {
    let n = frames.dof();
    let mut v = Vector6::zeros();
    // gravity enters as an upward acceleration of the base
    let mut a = if with_gravity {
        spatial::stack(&nalgebra::Vector3::zeros(), &(-model.gravity))
    } else {
        Vector6::zeros()
    };
    let mut forces = Vec::with_capacity(n);
    for i in 0..n {
        let s = frames.axis[i];
        v += s * qd[i];
        a += s * qdd[i] + motion_cross(&v, &(s * qd[i]));
        let iv = frames.inertia[i] * v;
        forces.push(frames.inertia[i] * a + force_cross(&v, &iv));
    }
    let mut tau = DVector::zeros(n);
    let mut acc = Vector6::zeros();
    for i in (0..n).rev() {
        acc += forces[i];
        tau[i] = frames.axis[i].dot(&acc);
    }
    tau
}

/// Gravitational potential energy `Σ −mᵢ gᵀ cᵢ` with the datum at the base origin.
pub fn potential_energy<T: Real>(model: &RobotModel<T>, frames: &ChainFrames<T>) -> T {
    model
        .links
        .iter()
        .zip(&frames.link_pose)
        .fold(T::zero(), |acc, (link, pose)| {
            let com = pose * nalgebra::Point3::from(link.com);
            acc - model.gravity.dot(&com.coords) * link.mass
        })
}
