use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Running trapezoidal integral of `y` over the grid `t`, starting at zero.
pub fn cumulative_trapezoid<T: Real>(t: &[T], y: &[T]) -> Vec<T> {
    assert_eq!(t.len(), y.len(), "grid and series differ in length");
    let half = lit::<T>(0.5);
    let mut acc = T::zero();
    let mut out = Vec::with_capacity(y.len());
    for i in 0..y.len() {
        if i > 0 {
            acc += (t[i] - t[i - 1]) * (y[i] + y[i - 1]) * half;
        }
        out.push(acc);
    }
    out
}

/// Running work of a torque held constant between samples:
/// `Σ_{j<i} τ_jᵀ (q_{j+1} − q_j)`.
///
/// Under a zero-order hold this is the exact integral of `q̇ᵀτ`, whatever the
/// motion between samples.
pub fn held_torque_work<T: Real>(q: &[DVector<T>], tau: &[DVector<T>]) -> Vec<T> {
    assert_eq!(q.len(), tau.len(), "positions and torques differ in length");
    let mut acc = T::zero();
    let mut out = Vec::with_capacity(q.len());
    for i in 0..q.len() {
        if i > 0 {
            acc += tau[i - 1].dot(&(&q[i] - &q[i - 1]));
        }
        out.push(acc);
    }
    out
}

/// Root mean square of `y` on `[t0, t1]`: trapezoidal mean of `y²`, with the
/// window ends interpolated linearly between samples.
pub fn rms_over_window<T: Real>(t: &[T], y: &[T], t0: T, t1: T) -> Result<T> {
    let out_of_range = || Error::WindowOutOfRange {
        t0: t0.as_f64(),
        t1: t1.as_f64(),
        start: t.first().map_or(f64::NAN, |v| v.as_f64()),
        end: t.last().map_or(f64::NAN, |v| v.as_f64()),
    };
    if t.len() != y.len() || t.len() < 2 || !(t1 > t0) {
        return Err(out_of_range());
    }
    let slack = (t[t.len() - 1] - t[0]) * lit(1e-9);
    if t0 < t[0] - slack || t1 > t[t.len() - 1] + slack {
        return Err(out_of_range());
    }
    let t0 = t0.max(t[0]);
    let t1 = t1.min(t[t.len() - 1]);
    let sq = |i: usize| y[i] * y[i];
    let at = |s: T| {
        let i = t.partition_point(|v| *v <= s).clamp(1, t.len() - 1);
        let w = (s - t[i - 1]) / (t[i] - t[i - 1]);
        let v = y[i - 1] + (y[i] - y[i - 1]) * w;
        v * v
    };
    let mut pts: Vec<(T, T)> = vec![(t0, at(t0))];
    for i in 0..t.len() {
        if t[i] > t0 && t[i] < t1 {
            pts.push((t[i], sq(i)));
        }
    }
    pts.push((t1, at(t1)));
    let half = lit::<T>(0.5);
    let area = pts.windows(2).fold(T::zero(), |a, w| {
        a + (w[1].0 - w[0].0) * (w[1].1 + w[0].1) * half
    });
    Ok((area / (t1 - t0)).sqrt())
}

/// Largest absolute value of a vector series.
pub fn peak_abs<T: Real>(series: &[DVector<T>]) -> T {
    series.iter().fold(T::zero(), |a, v| a.max(v.amax()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rms_of_constant_and_zero() {
        let t: Vec<f64> = (0..=100).map(|i| i as f64 * 0.01).collect();
        let c = vec![3.5; t.len()];
        assert!((rms_over_window(&t, &c, 0.1, 0.9).unwrap() - 3.5).abs() < 1e-12);
        let z = vec![0.0; t.len()];
        assert_eq!(rms_over_window(&t, &z, 0.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn rms_window_outside_log_is_rejected() {
        let t = [0.0, 1.0, 2.0];
        let y = [1.0, 1.0, 1.0];
        assert!(matches!(
            rms_over_window(&t, &y, 0.5, 2.5),
            Err(Error::WindowOutOfRange { .. })
        ));
        assert!(rms_over_window(&t, &y, 1.0, 1.0).is_err());
    }

    #[test]
    fn trapezoid_is_exact_for_lines() {
        let t = [0.0f64, 0.5, 2.0];
        let y = [1.0f64, 2.0, 5.0];
        let c = cumulative_trapezoid(&t, &y);
        // y = 1 + 2t integrates to t + t²
        assert!((c[1] - 0.75).abs() < 1e-12);
        assert!((c[2] - 6.0).abs() < 1e-12);
    }

    #[test]
    fn held_work_sums_increments() {
        let q = vec![
            DVector::from_vec(vec![0.0, 0.0]),
            DVector::from_vec(vec![1.0, 2.0]),
            DVector::from_vec(vec![1.5, 2.0]),
        ];
        let tau = vec![
            DVector::from_vec(vec![2.0, 1.0]),
            DVector::from_vec(vec![4.0, 9.0]),
            DVector::zeros(2),
        ];
        assert_eq!(held_torque_work(&q, &tau), vec![0.0, 4.0, 6.0]);
    }
}
