use nalgebra::{DMatrix, DVector};

use super::series::cumulative_trapezoid;
use crate::control::ReferenceSignal;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Running passivity margin of the target impedance with respect to its
/// exogenous inputs:
/// `∫₀ᵗ (ẋ − ẋ_d)ᵀ (ṗ_d + f_int) dt − (H_Ω(t) − H_Ω(0))`.
///
/// The integral uses the trapezoidal rule on the sample grid. `h_datum` is
/// the stored energy the margin is measured from.
pub fn general_passivity_margin<T: Real>(
    t: &[T],
    velocity_error: &[DVector<T>],
    desired_momentum_rate: &[DVector<T>],
    f_int: Option<&[DVector<T>]>,
    h_omega: &[T],
    h_datum: T,
) -> Result<Vec<T>> {
    let f_int = f_int.ok_or(Error::MissingInteractionData)?;
    let n = t.len();
    if [
        velocity_error.len(),
        desired_momentum_rate.len(),
        f_int.len(),
        h_omega.len(),
    ]
    .iter()
    .any(|&l| l != n)
    {
        return Err(Error::Dimension("margin inputs differ in length".into()));
    }
    let supplied: Vec<T> = (0..n)
        .map(|i| velocity_error[i].dot(&(&desired_momentum_rate[i] + &f_int[i])))
        .collect();
    let work = cumulative_trapezoid(t, &supplied);
    Ok(work
        .iter()
        .zip(h_omega)
        .map(|(w, h)| *w - (*h - h_datum))
        .collect())
}

/// Gap between robot energy and impedance energy, each from its own datum.
pub fn hamiltonian_gap<T: Real>(h_q: T, h_q_datum: T, h_omega: T, h_omega_datum: T) -> T {
    (h_q - h_q_datum) - (h_omega - h_omega_datum)
}

/// Running margin of the commanded-power passivity condition:
/// `∫₀ᵗ q̇ᵀτ_act dt − gap(t)`. No interaction data is involved.
///
/// Fails when the reference carries a desired velocity at any sample time,
/// since the condition only holds for pose-only references.
pub fn quasi_static_passivity_margin<T: Real>(
    t: &[T],
    commanded_work: &[T],
    gap: &[T],
    reference: &ReferenceSignal<T>,
) -> Result<Vec<T>> {
    if commanded_work.len() != t.len() || gap.len() != t.len() {
        return Err(Error::Dimension("margin inputs differ in length".into()));
    }
    for &ti in t {
        let s = reference.evaluate(ti);
        let speed = s.velocity.norm();
        if !s.is_at_rest() {
            return Err(Error::NonQuasiStaticReference {
                t: ti.as_f64(),
                speed: speed.as_f64(),
            });
        }
    }
    Ok(commanded_work
        .iter()
        .zip(gap)
        .map(|(w, g)| *w - *g)
        .collect())
}

/// Split of the supplied power `q̇ᵀτ_act + ẋ_dᵀ f_int` into the robot port,
/// the target-impedance port and the desired-acceleration term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerDistribution<T: Real> {
    pub lhs: T,
    /// `q̇ᵀ(τ_act + Jᵀ f_int)`
    pub robot_port: T,
    /// `−(ẋ − ẋ_d)ᵀ(ṗ_d + f_int)`
    pub impedance_port: T,
    /// `−(ẋ_d − ẋ)ᵀ ṗ_d`
    pub desired_inertial: T,
    pub residual: T,
}

impl<T: Real> PowerDistribution<T> {
    pub fn rhs_terms(&self) -> [T; 3] {
        [self.robot_port, self.impedance_port, self.desired_inertial]
    }
}

/// Evaluates the power distribution at one sample. `jacobian` maps joint
/// rates to the task twist; `desired_momentum_rate` is `Λ_d ẍ_d`.
pub fn power_distribution<T: Real>(
    qd: &DVector<T>,
    tau_act: &DVector<T>,
    jacobian: &DMatrix<T>,
    desired_velocity: &DVector<T>,
    desired_momentum_rate: &DVector<T>,
    f_int: &DVector<T>,
) -> PowerDistribution<T> {
    let x_dot = jacobian * qd;
    let lhs = qd.dot(tau_act) + desired_velocity.dot(f_int);
    let robot_port = qd.dot(&(tau_act + jacobian.transpose() * f_int));
    let vel_err = &x_dot - desired_velocity;
    let impedance_port = -vel_err.dot(&(desired_momentum_rate + f_int));
    let desired_inertial = vel_err.dot(desired_momentum_rate);
    let residual = lhs - (robot_port + impedance_port + desired_inertial);
    PowerDistribution {
        lhs,
        robot_port,
        impedance_port,
        desired_inertial,
        residual,
    }
}

/// Cartesian power delivered by the rendered spring and damper,
/// `ẋᵀ[K_d (x_d − x) − D_d ẋ]`, with `x − x_d` given as `error`.
pub fn cartesian_power<T: Real>(
    x_dot: &DVector<T>,
    error: &DVector<T>,
    stiffness: &DVector<T>,
    damping: &DVector<T>,
) -> T {
    let force = -stiffness.component_mul(error) - damping.component_mul(x_dot);
    x_dot.dot(&force)
}
