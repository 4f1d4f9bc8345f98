use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Penalty model of a flat ground under the tool point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactParams<T: Real> {
    /// Height of the ground plane along the world z axis (m).
    pub ground_height: T,
    pub normal_stiffness: T,
    pub normal_damping: T,
    pub tangential_viscous: T,
}

impl<T: Real> Default for ContactParams<T> {
    fn default() -> Self {
        Self {
            ground_height: T::zero(),
            normal_stiffness: lit(1e5),
            normal_damping: lit(1e3),
            tangential_viscous: lit(200.0),
        }
    }
}

impl<T: Real> ContactParams<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.normal_stiffness > T::zero())
            || !(self.normal_damping >= T::zero())
            || !(self.tangential_viscous >= T::zero())
        {
            return Err(Error::Config(
                "contact stiffness must be positive and dampings non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// Unilateral spring-dampers acting on joints outside their position limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitSprings<T: Real> {
    pub stiffness: T,
    pub damping: T,
}

/// Wrench applied at the tool on the task axes: `constant + amplitude·sin(2π f t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExternalWrench<T: Real> {
    pub constant: DVector<T>,
    pub amplitude: DVector<T>,
    pub frequency_hz: T,
}

impl<T: Real> ExternalWrench<T> {
    pub fn at(&self, t: T) -> DVector<T> {
        &self.constant + &self.amplitude * (T::two_pi() * self.frequency_hz * t).sin()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig<T: Real> {
    /// Controller period (s); torques are held between ticks.
    pub control_dt: T,
    /// RK4 steps per control period.
    pub physics_substeps: usize,
    pub duration: T,
    pub contact: Option<ContactParams<T>>,
    pub joint_limits: Option<LimitSprings<T>>,
    pub external_wrench: Option<ExternalWrench<T>>,
    /// Per-link mass multiplier of the model used by the controller and the
    /// metrics; empty means the exact plant.
    pub model_error_scale: Vec<T>,
}

impl<T: Real> SimConfig<T> {
    pub fn new(duration: T) -> Self {
        Self {
            control_dt: lit(1e-3),
            physics_substeps: 10,
            duration,
            contact: None,
            joint_limits: None,
            external_wrench: None,
            model_error_scale: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.control_dt > T::zero()) {
            return Err(Error::Config("control_dt must be positive".into()));
        }
        if !(self.duration > T::zero()) {
            return Err(Error::Config("duration must be positive".into()));
        }
        if self.physics_substeps == 0 {
            return Err(Error::Config("physics_substeps must be at least 1".into()));
        }
        if let Some(c) = &self.contact {
            c.validate()?;
        }
        if let Some(l) = &self.joint_limits {
            if !(l.stiffness >= T::zero()) || !(l.damping >= T::zero()) {
                return Err(Error::Config(
                    "joint limit gains must be non-negative".into(),
                ));
            }
        }
        Ok(())
    }

    /// Number of control ticks; the log holds one more sample.
    pub fn ticks(&self) -> usize {
        (self.duration / self.control_dt)
            .round()
            .to_usize()
            .unwrap_or(0)
    }
}
