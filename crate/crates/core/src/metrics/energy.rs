use nalgebra::{DMatrix, DVector};

use crate::dynamics::{mass_matrix, potential_energy};
use crate::model::RobotModel;
use crate::scalar::{lit, Real};

/// Mechanical energy of the robot, `½ q̇ᵀ M q̇ + U(q)`, with the potential
/// measured from the configuration `q_datum`.
pub fn robot_hamiltonian<T: Real>(
    model: &RobotModel<T>,
    q: &DVector<T>,
    qd: &DVector<T>,
    q_datum: &DVector<T>,
) -> T {
    kinetic_energy(model, q, qd) + potential_energy(model, q) - potential_energy(model, q_datum)
}

pub fn kinetic_energy<T: Real>(model: &RobotModel<T>, q: &DVector<T>, qd: &DVector<T>) -> T {
    lit::<T>(0.5) * qd.dot(&(mass_matrix(model, q) * qd))
}

/// Energy stored in the target mass-spring-damper:
/// `½ ėᵀ Λ_d ė + ½ eᵀ K_d e`, where `e = x − x_d` and `ė = ẋ − ẋ_d`.
///
/// In momentum form the kinetic term is `½ (p − p_d)ᵀ Λ_d⁻¹ (p − p_d)` with
/// `p = Λ_d ẋ`; both are the same number.
pub fn impedance_hamiltonian<T: Real>(
    error: &DVector<T>,
    velocity_error: &DVector<T>,
    stiffness: &DVector<T>,
    inertia: &DMatrix<T>,
) -> T {
    let half = lit::<T>(0.5);
    half * velocity_error.dot(&(inertia * velocity_error))
        + half * error.dot(&stiffness.component_mul(error))
}
