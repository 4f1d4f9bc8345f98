use nalgebra::Vector3;

use super::config::ContactParams;
use crate::scalar::Real;

/// Ground reaction on a point at `position` moving with `velocity` (world frame).
///
/// The normal force is `k δ + d δ̇` for a penetration `δ` below the plane,
/// clamped so the ground never pulls; the tangential force is viscous.
pub fn contact_force<T: Real>(
    position: &Vector3<T>,
    velocity: &Vector3<T>,
    params: &ContactParams<T>,
) -> Vector3<T> {
    let depth = params.ground_height - position.z;
    if depth <= T::zero() {
        return Vector3::zeros();
    }
    let normal =
        (params.normal_stiffness * depth - params.normal_damping * velocity.z).max(T::zero());
    Vector3::new(
        -params.tangential_viscous * velocity.x,
        -params.tangential_viscous * velocity.y,
        normal,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contact_examples() {
        let p = ContactParams::<f64>::default();
        let f = contact_force(&Vector3::new(0.0, 0.0, 0.1), &Vector3::zeros(), &p);
        assert_eq!(f, Vector3::zeros());
        let f = contact_force(&Vector3::new(0.0, 0.0, -0.01), &Vector3::zeros(), &p);
        assert!((f - Vector3::new(0.0, 0.0, 1000.0)).norm() < 1e-9);
        // withdrawing fast enough that the damper would pull
        let f = contact_force(
            &Vector3::new(0.0, 0.0, -0.001),
            &Vector3::new(0.0, 0.0, 1.0),
            &p,
        );
        assert_eq!(f.z, 0.0);
        let f = contact_force(
            &Vector3::new(0.0, 0.0, -0.01),
            &Vector3::new(0.5, -0.2, 0.0),
            &p,
        );
        assert!((f.x + 100.0).abs() < 1e-9 && (f.y - 40.0).abs() < 1e-9);
    }
}
