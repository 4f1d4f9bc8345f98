use nalgebra::{DMatrix, DVector, Isometry3, Matrix6, Point3, Vector3, Vector6};

use crate::model::{JointKind, RobotModel};
use crate::scalar::Real;
use crate::spatial::{self, motion_cross};

/// World-frame kinematic quantities of a chain at one configuration.
///
/// Built once per state and shared by the mass matrix, bias force, Jacobian
/// and their derivatives.
#[derive(Debug, Clone)]
pub struct ChainFrames<T: Real> {
    /// Pose of each link frame.
    pub link_pose: Vec<Isometry3<T>>,
    /// Joint motion subspace in world coordinates, `[angular; linear at origin]`.
    pub axis: Vec<Vector6<T>>,
    /// Spatial inertia of each link about the world origin.
    pub inertia: Vec<Matrix6<T>>,
    /// Tool point in the world frame.
    pub tool_position: Vector3<T>,
    pub tool_pose: Isometry3<T>,
}

impl<T: Real> ChainFrames<T> {
    pub fn new(model: &RobotModel<T>, q: &DVector<T>) -> Self {
        assert_eq!(q.len(), model.dof(), "configuration dimension");
        let n = model.dof();
        let mut link_pose = Vec::with_capacity(n);
        let mut axis = Vec::with_capacity(n);
        let mut inertia = Vec::with_capacity(n);
        let mut parent = Isometry3::identity();
        for (i, (joint, link)) in model.joints.iter().zip(&model.links).enumerate() {
            let joint_frame = parent * joint.origin();
            let a = joint_frame.rotation * joint.axis;
            let s = match joint.kind {
                JointKind::Revolute => {
                    let p = joint_frame.translation.vector;
                    spatial::stack(&a, &p.cross(&a))
                }
                JointKind::Prismatic => spatial::stack(&Vector3::zeros(), &a),
            };
            let pose = joint_frame * joint.motion(q[i]);
            let rot = pose.rotation.to_rotation_matrix();
            let com = pose * Point3::from(link.com);
            let i_world = rot.matrix() * link.inertia * rot.matrix().transpose();
            inertia.push(spatial::spatial_inertia(link.mass, &com.coords, &i_world));
            axis.push(s);
            link_pose.push(pose);
            parent = pose;
        }
        let ee = link_pose[model.end_effector_link];
        let tool_position = (ee * Point3::from(model.tool_offset)).coords;
        let tool_pose = Isometry3::from_parts(tool_position.into(), ee.rotation);
        Self {
            link_pose,
            axis,
            inertia,
            tool_position,
            tool_pose,
        }
    }

    pub fn dof(&self) -> usize {
        self.axis.len()
    }

    /// Spatial velocity of every link.
    pub fn link_velocities(&self, qd: &DVector<T>) -> Vec<Vector6<T>> {
        let mut v = Vector6::zeros();
        self.axis
            .iter()
            .zip(qd.iter())
            .map(|(s, &rate)| {
                v += s * rate;
                v
            })
            .collect()
    }

    /// Time derivative of every joint axis along `qd`.
    pub fn axis_rates(&self, qd: &DVector<T>) -> Vec<Vector6<T>> {
        self.link_velocities(qd)
            .iter()
            .zip(&self.axis)
            .map(|(v, s)| motion_cross(v, s))
            .collect()
    }

    /// 6×n Jacobian of the tool twist `[v; ω]` (linear velocity of the tool point first).
    pub fn full_jacobian(&self, end_effector_link: usize) -> DMatrix<T> {
        let n = self.dof();
        let p = self.tool_position;
        let mut j = DMatrix::zeros(6, n);
        for (c, s) in self.axis.iter().enumerate().take(end_effector_link + 1) {
            let w = spatial::angular(s);
            let v = spatial::linear(s) + w.cross(&p);
            j.fixed_view_mut::<3, 1>(0, c).copy_from(&v);
            j.fixed_view_mut::<3, 1>(3, c).copy_from(&w);
        }
        j
    }

    /// Time derivative of [`Self::full_jacobian`] along `qd`.
    pub fn full_jacobian_dot(&self, end_effector_link: usize, qd: &DVector<T>) -> DMatrix<T> {
        let n = self.dof();
        let p = self.tool_position;
        let vel = self.link_velocities(qd);
        let ee_twist = vel[end_effector_link];
        let p_dot = spatial::linear(&ee_twist) + spatial::angular(&ee_twist).cross(&p);
        let rates = self.axis_rates(qd);
        let mut jd = DMatrix::zeros(6, n);
        for c in 0..=end_effector_link {
            let w = spatial::angular(&self.axis[c]);
            let wd = spatial::angular(&rates[c]);
            let vd = spatial::linear(&rates[c]) + wd.cross(&p) + w.cross(&p_dot);
            jd.fixed_view_mut::<3, 1>(0, c).copy_from(&vd);
            jd.fixed_view_mut::<3, 1>(3, c).copy_from(&wd);
        }
        jd
    }
}
