//! Spatial (6-D) vector algebra in a fixed world frame.
//!
//! Motion vectors are `[angular; linear]` with the linear part taken at the
//! world origin; force vectors are `[moment; force]` about the world origin.

use nalgebra::{Matrix3, Matrix6, Vector3, Vector6};

use crate::scalar::Real;

pub fn skew<T: Real>(v: &Vector3<T>) -> Matrix3<T> {
    Matrix3::new(
        T::zero(),
        -v.z,
        v.y,
        v.z,
        T::zero(),
        -v.x,
        -v.y,
        v.x,
        T::zero(),
    )
}

#[inline]
pub fn angular<T: Real>(v: &Vector6<T>) -> Vector3<T> {
    Vector3::new(v[0], v[1], v[2])
}

#[inline]
pub fn linear<T: Real>(v: &Vector6<T>) -> Vector3<T> {
    Vector3::new(v[3], v[4], v[5])
}

#[inline]
pub fn stack<T: Real>(top: &Vector3<T>, bottom: &Vector3<T>) -> Vector6<T> {
    Vector6::new(top.x, top.y, top.z, bottom.x, bottom.y, bottom.z)
}

/// `a ×ₘ b`: derivative of motion vector `b` moving with velocity `a`.
pub fn motion_cross<T: Real>(a: &Vector6<T>, b: &Vector6<T>) -> Vector6<T> {
    let (w, u) = (angular(a), linear(a));
    let (bw, bu) = (angular(b), linear(b));
    stack(&w.cross(&bw), &(w.cross(&bu) + u.cross(&bw)))
}

/// `a ×* f`: derivative of force vector `f` moving with velocity `a`.
pub fn force_cross<T: Real>(a: &Vector6<T>, f: &Vector6<T>) -> Vector6<T> {
    let (w, u) = (angular(a), linear(a));
    let (n, fl) = (angular(f), linear(f));
    stack(&(w.cross(&n) + u.cross(&fl)), &w.cross(&fl))
}

/// Matrix form of `a ×ₘ`.
pub fn crm<T: Real>(a: &Vector6<T>) -> Matrix6<T> {
    let sw = skew(&angular(a));
    let su = skew(&linear(a));
    let mut m = Matrix6::zeros();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(&sw);
    m.fixed_view_mut::<3, 3>(3, 0).copy_from(&su);
    m.fixed_view_mut::<3, 3>(3, 3).copy_from(&sw);
    m
}

/// Matrix form of `a ×*`, equal to `-crm(a)ᵀ`.
pub fn crf<T: Real>(a: &Vector6<T>) -> Matrix6<T> {
    -crm(a).transpose()
}

/// Spatial inertia about the world origin of a body with mass `mass`, centre of
/// mass `com` and rotational inertia `inertia_com` (both in world axes).
pub fn spatial_inertia<T: Real>(mass: T, com: &Vector3<T>, inertia_com: &Matrix3<T>) -> Matrix6<T> {
    let c = skew(com);
    let mut m = Matrix6::zeros();
    m.fixed_view_mut::<3, 3>(0, 0)
        .copy_from(&(inertia_com + c * c.transpose() * mass));
    m.fixed_view_mut::<3, 3>(0, 3).copy_from(&(c * mass));
    m.fixed_view_mut::<3, 3>(3, 0)
        .copy_from(&(c.transpose() * mass));
    m.fixed_view_mut::<3, 3>(3, 3)
        .copy_from(&(Matrix3::identity() * mass));
    m
}
