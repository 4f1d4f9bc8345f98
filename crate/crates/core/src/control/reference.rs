use nalgebra::{DVector, Isometry3, Translation3, UnitQuaternion, Vector3, Vector6};

use crate::model::{RobotModel, TaskAxis};
use crate::scalar::{lit, Real};

/// Desired pose with its twist and twist rate, both ordered `[linear; angular]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSample<T: Real> {
    pub pose: Isometry3<T>,
    pub velocity: Vector6<T>,
    pub acceleration: Vector6<T>,
}

impl<T: Real> ReferenceSample<T> {
    pub fn at_rest(pose: Isometry3<T>) -> Self {
        Self {
            pose,
            velocity: Vector6::zeros(),
            acceleration: Vector6::zeros(),
        }
    }

    /// Velocity restricted to the model's task axes.
    pub fn task_velocity(&self, model: &RobotModel<T>) -> DVector<T> {
        select(&model.task, &self.velocity)
    }

    pub fn task_acceleration(&self, model: &RobotModel<T>) -> DVector<T> {
        select(&model.task, &self.acceleration)
    }

    pub fn is_at_rest(&self) -> bool {
        self.velocity.iter().all(|v| *v == T::zero())
            && self.acceleration.iter().all(|v| *v == T::zero())
    }
}

pub(crate) fn select<T: Real>(axes: &[TaskAxis], full: &Vector6<T>) -> DVector<T> {
    DVector::from_iterator(axes.len(), axes.iter().map(|a| full[a.twist_index()]))
}

#[derive(Debug, Clone, PartialEq)]
pub enum ReferenceKind<T: Real> {
    Constant {
        pose: Isometry3<T>,
    },
    /// Single-axis step of `amplitude` applied at `time`.
    Step {
        base: Isometry3<T>,
        axis: TaskAxis,
        amplitude: T,
        time: T,
    },
    /// Periodic foot path: linear stance sweep backwards along x, then a
    /// cycloidal swing forwards with a vertical lift of `step_height`.
    Gait {
        center: Isometry3<T>,
        step_length: T,
        period: T,
        step_height: T,
    },
    /// Vertical step down by `drop` at `time`, back up `return_delay` later.
    Jump {
        rest: Isometry3<T>,
        drop: T,
        time: T,
        return_delay: T,
    },
}

/// Time-parameterized desired end-effector motion.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSignal<T: Real> {
    pub kind: ReferenceKind<T>,
    /// Report zero velocity and acceleration even when the path moves.
    pub pose_only: bool,
}

impl<T: Real> ReferenceSignal<T> {
    pub fn constant(pose: Isometry3<T>) -> Self {
        Self {
            kind: ReferenceKind::Constant { pose },
            pose_only: false,
        }
    }

    /// Step on `axis` at `t = 0`.
    pub fn step(axis: TaskAxis, amplitude: T, base: Isometry3<T>) -> Self {
        Self::step_at(axis, amplitude, base, T::zero())
    }

    pub fn step_at(axis: TaskAxis, amplitude: T, base: Isometry3<T>, time: T) -> Self {
        Self {
            kind: ReferenceKind::Step {
                base,
                axis,
                amplitude,
                time,
            },
            pose_only: false,
        }
    }

    /// Gait cycle centered on `center` (the mid-stance foot pose).
    pub fn gait(step_length: T, period: T, step_height: T, center: Isometry3<T>) -> Self {
        assert!(period > T::zero(), "gait period must be positive");
        Self {
            kind: ReferenceKind::Gait {
                center,
                step_length,
                period,
                step_height,
            },
            pose_only: false,
        }
    }

    /// Jump sequence starting at `t = 0`.
    pub fn jump(drop: T, return_delay: T, rest: Isometry3<T>) -> Self {
        Self::jump_at(drop, return_delay, rest, T::zero())
    }

    pub fn jump_at(drop: T, return_delay: T, rest: Isometry3<T>, time: T) -> Self {
        assert!(drop >= T::zero(), "jump drop must be non-negative");
        assert!(
            return_delay > T::zero(),
            "jump return delay must be positive"
        );
        Self {
            kind: ReferenceKind::Jump {
                rest,
                drop,
                time,
                return_delay,
            },
            pose_only: false,
        }
    }

    /// Same path with velocity and acceleration reported as zero.
    pub fn into_pose_only(mut self) -> Self {
        self.pose_only = true;
        self
    }

    /// Whether every sample carries zero velocity and acceleration.
    pub fn is_quasi_static(&self) -> bool {
        self.pose_only || !matches!(self.kind, ReferenceKind::Gait { .. })
    }

    /// Instants where the pose jumps.
    pub fn discontinuities(&self) -> Vec<T> {
        match &self.kind {
            ReferenceKind::Step {
                time, amplitude, ..
            } if *amplitude != T::zero() => vec![*time],
            ReferenceKind::Jump {
                time,
                return_delay,
                drop,
                ..
            } if *drop != T::zero() => vec![*time, *time + *return_delay],
            _ => Vec::new(),
        }
    }

    /// Value at `t`; pose steps are right-continuous.
    pub fn evaluate(&self, t: T) -> ReferenceSample<T> {
        self.sample(t, false)
    }

    /// Left limit at `t`, i.e. the value just before any step scheduled at `t`.
    pub fn evaluate_before(&self, t: T) -> ReferenceSample<T> {
        self.sample(t, true)
    }

    fn sample(&self, t: T, left: bool) -> ReferenceSample<T> {
        let reached = |at: T| if left { t > at } else { t >= at };
        let mut s = match &self.kind {
            ReferenceKind::Constant { pose } => ReferenceSample::at_rest(*pose),
            ReferenceKind::Step {
                base,
                axis,
                amplitude,
                time,
            } => {
                if reached(*time) {
                    ReferenceSample::at_rest(displace(base, *axis, *amplitude))
                } else {
                    ReferenceSample::at_rest(*base)
                }
            }
            ReferenceKind::Jump {
                rest,
                drop,
                time,
                return_delay,
            } => {
                if reached(*time) && !reached(*time + *return_delay) {
                    ReferenceSample::at_rest(displace(rest, TaskAxis::Z, -*drop))
                } else {
                    ReferenceSample::at_rest(*rest)
                }
            }
            ReferenceKind::Gait {
                center,
                step_length,
                period,
                step_height,
            } => gait_sample(center, *step_length, *period, *step_height, t),
        };
        if self.pose_only {
            s.velocity = Vector6::zeros();
            s.acceleration = Vector6::zeros();
        }
        s
    }
}

/// Pose moved by `amount` along a world axis (translation) or about it (rotation).
pub fn displace<T: Real>(pose: &Isometry3<T>, axis: TaskAxis, amount: T) -> Isometry3<T> {
    let i = axis.twist_index();
    let mut unit = Vector3::zeros();
    unit[i % 3] = T::one();
    if i < 3 {
        Isometry3::from_parts(
            Translation3::from(pose.translation.vector + unit * amount),
            pose.rotation,
        )
    } else {
        Isometry3::from_parts(
            pose.translation,
            UnitQuaternion::from_scaled_axis(unit * amount) * pose.rotation,
        )
    }
}

fn gait_sample<T: Real>(
    center: &Isometry3<T>,
    length: T,
    period: T,
    height: T,
    t: T,
) -> ReferenceSample<T> {
    let two_pi = T::two_pi();
    let half = lit::<T>(0.5);
    let cycles = (t / period).floor();
    let phase = t / period - cycles;
    // each half of the cycle lasts period / 2
    let rate = lit::<T>(2.0) / period;
    let zero = T::zero();
    let (x, z, vx, vz, ax, az) = if phase < half {
        let s = phase * lit(2.0);
        (
            length * half - length * s,
            zero,
            -length * rate,
            zero,
            zero,
            zero,
        )
    } else {
        let s = (phase - half) * lit(2.0);
        let (sn, cs) = (two_pi * s).sin_cos();
        (
            -length * half + length * (s - sn / two_pi),
            height * half * (T::one() - cs),
            length * (T::one() - cs) * rate,
            height * T::pi() * sn * rate,
            length * two_pi * sn * rate * rate,
            height * two_pi * T::pi() * cs * rate * rate,
        )
    };
    let offset = Vector3::new(x, T::zero(), z);
    ReferenceSample {
        pose: Isometry3::from_parts(
            Translation3::from(center.translation.vector + offset),
            center.rotation,
        ),
        velocity: Vector6::new(vx, T::zero(), vz, T::zero(), T::zero(), T::zero()),
        acceleration: Vector6::new(ax, T::zero(), az, T::zero(), T::zero(), T::zero()),
    }
}
