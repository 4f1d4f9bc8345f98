//! Robot description: serial chains of revolute/prismatic joints and rigid links.
//!
//! Models are read from a small TOML dialect (see [`parse_model`]) or taken from
//! the built-in benchmark set (see [`builtin_model`]).

mod builtin;
mod format;

pub use builtin::{builtin_model, builtin_names, builtin_source, leg3_floating, on_vertical_slide};
pub use format::{parse_model, serialize_model};

use nalgebra::{Isometry3, Matrix3, Translation3, UnitQuaternion, Vector3};

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

const AXIS_NORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum JointKind {
    Revolute,
    Prismatic,
}

impl JointKind {
    pub fn as_str(self) -> &'static str {
        match self {
            JointKind::Revolute => "revolute",
            JointKind::Prismatic => "prismatic",
        }
    }
}

/// One component of the end-effector twist that belongs to the task space.
///
/// Twists are ordered `[vx, vy, vz, wx, wy, wz]` (linear part first).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TaskAxis {
    X,
    Y,
    Z,
    Rx,
    Ry,
    Rz,
}

impl TaskAxis {
    pub const ALL: [TaskAxis; 6] = [
        TaskAxis::X,
        TaskAxis::Y,
        TaskAxis::Z,
        TaskAxis::Rx,
        TaskAxis::Ry,
        TaskAxis::Rz,
    ];

    /// Row of the 6-D twist this axis selects.
    pub fn twist_index(self) -> usize {
        self as usize
    }

    pub fn is_rotational(self) -> bool {
        self.twist_index() >= 3
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TaskAxis::X => "x",
            TaskAxis::Y => "y",
            TaskAxis::Z => "z",
            TaskAxis::Rx => "rx",
            TaskAxis::Ry => "ry",
            TaskAxis::Rz => "rz",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        TaskAxis::ALL.into_iter().find(|a| a.as_str() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointSpec<T: Real> {
    pub kind: JointKind,
    /// Unit axis expressed in the joint frame.
    pub axis: Vector3<T>,
    /// Translation of the joint frame in the parent link frame (m).
    pub origin_xyz: Vector3<T>,
    /// Fixed-axis roll/pitch/yaw of the joint frame in the parent link frame (rad).
    pub origin_rpy: Vector3<T>,
    pub position_limits: Option<(T, T)>,
    /// Unactuated joints (a free trunk slide, for instance) never receive controller torque.
    pub actuated: bool,
}

impl<T: Real> JointSpec<T> {
    pub fn revolute(axis: Vector3<T>, origin_xyz: Vector3<T>) -> Self {
        Self {
            kind: JointKind::Revolute,
            axis,
            origin_xyz,
            origin_rpy: Vector3::zeros(),
            position_limits: None,
            actuated: true,
        }
    }

    pub fn prismatic(axis: Vector3<T>, origin_xyz: Vector3<T>) -> Self {
        Self {
            kind: JointKind::Prismatic,
            ..Self::revolute(axis, origin_xyz)
        }
    }

    /// Rigid transform from the parent link frame to the joint frame.
    pub fn origin(&self) -> Isometry3<T> {
        let r = &self.origin_rpy;
        Isometry3::from_parts(
            Translation3::from(self.origin_xyz),
            UnitQuaternion::from_euler_angles(r.x, r.y, r.z),
        )
    }

    /// Joint frame to child link frame for joint displacement `q`.
    pub fn motion(&self, q: T) -> Isometry3<T> {
        match self.kind {
            JointKind::Revolute => Isometry3::from_parts(
                Translation3::identity(),
                UnitQuaternion::from_scaled_axis(self.axis * q),
            ),
            JointKind::Prismatic => Isometry3::from_parts(
                Translation3::from(self.axis * q),
                UnitQuaternion::identity(),
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkSpec<T: Real> {
    pub mass: T,
    /// Centre of mass in the link frame (m).
    pub com: Vector3<T>,
    /// Rotational inertia about the centre of mass, link axes (kg·m²).
    pub inertia: Matrix3<T>,
}

impl<T: Real> LinkSpec<T> {
    pub fn point_mass(mass: T, com: Vector3<T>) -> Self {
        Self {
            mass,
            com,
            inertia: Matrix3::zeros(),
        }
    }
}

/// Kinematic and inertial description of a serial chain.
///
/// Link `i` is rigidly attached to the output of joint `i`; joint `i` is mounted
/// on link `i - 1` (or on the fixed base for `i = 0`).
#[derive(Debug, Clone, PartialEq)]
pub struct RobotModel<T: Real> {
    pub name: String,
    /// Gravitational acceleration in the base frame (m/s²).
    pub gravity: Vector3<T>,
    pub joints: Vec<JointSpec<T>>,
    pub links: Vec<LinkSpec<T>>,
    pub end_effector_link: usize,
    /// Tool point in the end-effector link frame (m).
    pub tool_offset: Vector3<T>,
    /// Components of the end-effector twist under impedance control.
    pub task: Vec<TaskAxis>,
}

impl<T: Real> RobotModel<T> {
    /// Number of joints.
    pub fn dof(&self) -> usize {
        self.joints.len()
    }

    /// Task-space dimension.
    pub fn task_dim(&self) -> usize {
        self.task.len()
    }

    pub fn has_rotational_task(&self) -> bool {
        self.task.iter().any(|a| a.is_rotational())
    }

    pub fn total_mass(&self) -> T {
        self.links.iter().fold(T::zero(), |acc, l| acc + l.mass)
    }

    /// Checks every structural and physical invariant of the description.
    pub fn validate(&self) -> Result<()> {
        let n = self.joints.len();
        if n == 0 {
            return Err(Error::Semantic("model has no joints".into()));
        }
        if self.links.len() != n {
            return Err(Error::Semantic(format!(
                "serial chain needs one link per joint, got {n} joints and {} links",
                self.links.len()
            )));
        }
        if self.end_effector_link >= n {
            return Err(Error::Semantic(format!(
                "end_effector_link {} out of range for {n} links",
                self.end_effector_link
            )));
        }
        if self.task.is_empty() {
            return Err(Error::Semantic("task must select at least one axis".into()));
        }
        for (i, a) in self.task.iter().enumerate() {
            if self.task[..i].contains(a) {
                return Err(Error::Semantic(format!(
                    "task axis `{}` repeated",
                    a.as_str()
                )));
            }
        }
        if !self.gravity.iter().all(|g| g.is_finite()) {
            return Err(Error::Semantic("gravity must be finite".into()));
        }
        for (i, j) in self.joints.iter().enumerate() {
            let norm = j.axis.norm().as_f64();
            if (norm - 1.0).abs() > AXIS_NORM_TOL {
                return Err(Error::Semantic(format!(
                    "joint {i} axis is not a unit vector (norm {norm})"
                )));
            }
            if let Some((lo, hi)) = j.position_limits {
                if !(lo < hi) {
                    return Err(Error::Semantic(format!("joint {i} limits not ordered")));
                }
            }
        }
        for (i, l) in self.links.iter().enumerate() {
            validate_link(i, l)?;
        }
        Ok(())
    }

    /// Same chain with each link's mass and rotational inertia multiplied by `scale[i]`.
    pub fn with_mass_scale(&self, scale: &[T]) -> Result<Self> {
        if scale.len() != self.links.len() {
            return Err(Error::Dimension(format!(
                "mass scale has {} entries for {} links",
                scale.len(),
                self.links.len()
            )));
        }
        let mut out = self.clone();
        for (l, &s) in out.links.iter_mut().zip(scale) {
            if !(s > T::zero()) {
                return Err(Error::Semantic(
                    "mass scale factors must be positive".into(),
                ));
            }
            l.mass *= s;
            l.inertia *= s;
        }
        Ok(out)
    }

    /// Chain made of joints `first..n`, rooted at the frame of link `first - 1`.
    ///
    /// Used when a controller acts on the limb below a moving trunk. The
    /// resulting base frame must be parallel to the world frame for the
    /// gravity vector to stay meaningful, which holds for prismatic trunks.
    pub fn subchain(&self, first: usize) -> Result<Self> {
        if first >= self.dof() || self.end_effector_link < first {
            return Err(Error::Dimension(format!(
                "cannot split chain of {} joints at {first}",
                self.dof()
            )));
        }
        if self.joints[..first]
            .iter()
            .any(|j| j.kind == JointKind::Revolute)
        {
            return Err(Error::Semantic(
                "subchain root must be reached through prismatic joints only".into(),
            ));
        }
        Ok(Self {
            name: format!("{}[{first}..]", self.name),
            gravity: self.gravity,
            joints: self.joints[first..].to_vec(),
            links: self.links[first..].to_vec(),
            end_effector_link: self.end_effector_link - first,
            tool_offset: self.tool_offset,
            task: self.task.clone(),
        })
    }

    /// Converts the model to another scalar type.
    pub fn cast<U: Real>(&self) -> RobotModel<U> {
        let v = |x: &Vector3<T>| x.map(|c| lit::<U>(c.as_f64()));
        RobotModel {
            name: self.name.clone(),
            gravity: v(&self.gravity),
            joints: self
                .joints
                .iter()
                .map(|j| JointSpec {
                    kind: j.kind,
                    axis: v(&j.axis),
                    origin_xyz: v(&j.origin_xyz),
                    origin_rpy: v(&j.origin_rpy),
                    position_limits: j
                        .position_limits
                        .map(|(a, b)| (lit(a.as_f64()), lit(b.as_f64()))),
                    actuated: j.actuated,
                })
                .collect(),
            links: self
                .links
                .iter()
                .map(|l| LinkSpec {
                    mass: lit(l.mass.as_f64()),
                    com: v(&l.com),
                    inertia: l.inertia.map(|c| lit(c.as_f64())),
                })
                .collect(),
            end_effector_link: self.end_effector_link,
            tool_offset: v(&self.tool_offset),
            task: self.task.clone(),
        }
    }
}

fn validate_link<T: Real>(i: usize, l: &LinkSpec<T>) -> Result<()> {
    if !(l.mass > T::zero()) || !l.mass.is_finite() {
        return Err(Error::Semantic(format!(
            "link {i} mass must be positive, got {}",
            l.mass.as_f64()
        )));
    }
    let inertia = l.inertia.map(|c| c.as_f64());
    let scale = inertia.abs().max().max(1e-12);
    let asym = (inertia - inertia.transpose()).abs().max();
    if asym > 1e-9 * scale {
        return Err(Error::Semantic(format!(
            "link {i} inertia is not symmetric"
        )));
    }
    let sym = (inertia + inertia.transpose()) * 0.5;
    let mut eig: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    let tol = 1e-9 * scale;
    if eig[0] < -tol {
        return Err(Error::Semantic(format!(
            "link {i} inertia has negative principal moment {}",
            eig[0]
        )));
    }
    if eig[0] + eig[1] < eig[2] - tol {
        return Err(Error::Semantic(format!(
            "link {i} principal moments violate the triangle inequality"
        )));
    }
    Ok(())
}
