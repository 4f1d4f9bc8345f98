//! Composite-rigid-body mass matrix, its configuration derivatives and the
//! Christoffel-consistent Coriolis matrix.

use nalgebra::{DMatrix, DVector, Matrix6};

use super::chain::ChainFrames;
use crate::scalar::{lit, Real};
use crate::spatial::{crf, crm, motion_cross};

/// Composite inertia of the subtree rooted at each link (all links beyond `i`).
fn composite_inertia<T: Real>(frames: &ChainFrames<T>) -> Vec<Matrix6<T>> {
    let n = frames.dof();
    let mut out = vec![Matrix6::zeros(); n];
    let mut acc = Matrix6::zeros();
    for i in (0..n).rev() {
        acc += frames.inertia[i];
        out[i] = acc;
    }
    out
}

pub fn crba<T: Real>(frames: &ChainFrames<T>) -> DMatrix<T> {
    let n = frames.dof();
    let ic = composite_inertia(frames);
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        let f = ic[i] * frames.axis[i];
        for j in 0..=i {
            let v = frames.axis[j].dot(&f);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

/// `∂M/∂q_l` for every joint `l`.
pub fn mass_matrix_partials<T: Real>(frames: &ChainFrames<T>) -> Vec<DMatrix<T>> {
    let n = frames.dof();
    let ic = composite_inertia(frames);
    let s = &frames.axis;
    (0..n)
        .map(|l| {
            let (cm, cf) = (crm(&s[l]), crf(&s[l]));
            // joint i's axis moves with every joint before it
            let ds: Vec<_> = (0..n)
                .map(|i| {
                    if l < i {
                        motion_cross(&s[l], &s[i])
                    } else {
                        nalgebra::Vector6::zeros()
                    }
                })
                .collect();
            let mut dm = DMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..=i {
                    // M_ij = S_iᵀ Iᶜ_i S_j for j ≤ i
                    let m = i.max(l);
                    let dic = cf * ic[m] - ic[m] * cm;
                    let v = ds[i].dot(&(ic[i] * s[j]))
                        + s[i].dot(&(dic * s[j]))
                        + s[i].dot(&(ic[i] * ds[j]));
                    dm[(i, j)] = v;
                    dm[(j, i)] = v;
                }
            }
            dm
        })
        .collect()
}

/// Coriolis/centrifugal matrix built from Christoffel symbols of the first kind,
/// so that `Ṁ − 2C` is skew-symmetric.
pub fn christoffel_coriolis<T: Real>(frames: &ChainFrames<T>, qd: &DVector<T>) -> DMatrix<T> {
    let n = frames.dof();
    let partials = mass_matrix_partials(frames);
    let mut m_dot = DMatrix::zeros(n, n);
    let mut a = DMatrix::zeros(n, n);
    for (l, dm) in partials.iter().enumerate() {
        m_dot += dm * qd[l];
        a.set_column(l, &(dm * qd));
    }
    (m_dot + &a - a.transpose()) * lit::<T>(0.5)
}

/// Time derivative of the mass matrix along `qd`.
pub fn mass_matrix_rate<T: Real>(frames: &ChainFrames<T>, qd: &DVector<T>) -> DMatrix<T> {
    let n = frames.dof();
    mass_matrix_partials(frames)
        .iter()
        .enumerate()
        .fold(DMatrix::zeros(n, n), |acc, (l, dm)| acc + dm * qd[l])
}
