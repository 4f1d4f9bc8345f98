use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Desired Cartesian inertia of the rendered impedance.
#[derive(Debug, Clone, PartialEq)]
pub enum DesiredInertia<T: Real> {
    /// Diagonal of a fixed inertia matrix (kg, kg·m²). Requires wrench feedback.
    Fixed(DVector<T>),
    /// Keep the robot's own task-space inertia `Λ(x)`.
    TaskInertia,
}

/// Diagonal mass-spring-damper parameters of the target behavior.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpedanceParams<T: Real> {
    pub stiffness: DVector<T>,
    pub damping: DVector<T>,
    pub inertia: DesiredInertia<T>,
}

impl<T: Real> ImpedanceParams<T> {
    /// Parameters that reshape the apparent inertia to `inertia`.
    pub fn with_inertia_shaping(
        stiffness: DVector<T>,
        damping: DVector<T>,
        inertia: DVector<T>,
    ) -> Result<Self> {
        let p = Self {
            stiffness,
            damping,
            inertia: DesiredInertia::Fixed(inertia),
        };
        p.validate()?;
        Ok(p)
    }

    /// Parameters that keep the natural task inertia.
    pub fn without_inertia_shaping(stiffness: DVector<T>, damping: DVector<T>) -> Result<Self> {
        let p = Self {
            stiffness,
            damping,
            inertia: DesiredInertia::TaskInertia,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.stiffness.len()
    }

    pub fn inertia_shaping(&self) -> bool {
        matches!(self.inertia, DesiredInertia::Fixed(_))
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.stiffness.len();
        if k == 0 {
            return Err(Error::InvalidParams("empty parameter set".into()));
        }
        let check = |name: &str, v: &DVector<T>| {
            if v.len() != k {
                return Err(Error::InvalidParams(format!(
                    "{name} has {} entries, stiffness has {k}",
                    v.len()
                )));
            }
            if v.iter().any(|x| !(*x > T::zero()) || !x.is_finite()) {
                return Err(Error::InvalidParams(format!(
                    "{name} entries must be positive and finite"
                )));
            }
            Ok(())
        };
        check("stiffness", &self.stiffness)?;
        check("damping", &self.damping)?;
        if let DesiredInertia::Fixed(m) = &self.inertia {
            check("inertia", m)?;
        }
        Ok(())
    }

    /// Checks the parameter dimension against a task dimension.
    pub fn check_dim(&self, task_dim: usize) -> Result<()> {
        if self.dim() != task_dim {
            return Err(Error::Dimension(format!(
                "impedance parameters have {} axes, task has {task_dim}",
                self.dim()
            )));
        }
        Ok(())
    }

    pub fn stiffness_matrix(&self) -> DMatrix<T> {
        DMatrix::from_diagonal(&self.stiffness)
    }

    pub fn damping_matrix(&self) -> DMatrix<T> {
        DMatrix::from_diagonal(&self.damping)
    }

    /// Rendered inertia matrix; `task_inertia` is used when no shaping is configured.
    pub fn inertia_matrix(&self, task_inertia: &DMatrix<T>) -> DMatrix<T> {
        match &self.inertia {
            DesiredInertia::Fixed(m) => DMatrix::from_diagonal(m),
            DesiredInertia::TaskInertia => task_inertia.clone(),
        }
    }

    /// Damping ratio on one axis given the effective mass there.
    pub fn damping_ratio(&self, axis: usize, mass: T) -> T {
        self.damping[axis] / (lit::<T>(2.0) * (self.stiffness[axis] * mass).sqrt())
    }

    pub fn cast<U: Real>(&self) -> ImpedanceParams<U> {
        let c = |v: &DVector<T>| v.map(|x| lit::<U>(x.as_f64()));
        ImpedanceParams {
            stiffness: c(&self.stiffness),
            damping: c(&self.damping),
            inertia: match &self.inertia {
                DesiredInertia::Fixed(m) => DesiredInertia::Fixed(c(m)),
                DesiredInertia::TaskInertia => DesiredInertia::TaskInertia,
            },
        }
    }
}

fn v(values: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(values)
}

/// Gains used for the 6-axis arm with inertia shaping.
pub fn arm_shaped_gains() -> ImpedanceParams<f64> {
    ImpedanceParams {
        stiffness: v(&[800.0, 800.0, 800.0, 120.0, 120.0, 120.0]),
        damping: v(&[134.2, 134.2, 134.2, 13.96, 13.96, 13.96]),
        inertia: DesiredInertia::Fixed(v(&[10.0, 10.0, 10.0, 0.722, 0.722, 0.722])),
    }
}

/// Gains used for the 6-axis arm without inertia shaping.
pub fn arm_unshaped_gains() -> ImpedanceParams<f64> {
    ImpedanceParams {
        stiffness: v(&[400.0, 400.0, 400.0, 70.0, 70.0, 40.0]),
        damping: v(&[134.2, 134.2, 134.2, 15.08, 15.08, 15.08]),
        inertia: DesiredInertia::TaskInertia,
    }
}

/// Gains used for the leg (foot position, no inertia shaping).
pub fn leg_gains() -> ImpedanceParams<f64> {
    ImpedanceParams {
        stiffness: v(&[400.0, 400.0, 800.0]),
        damping: v(&[43.0, 43.0, 90.0]),
        inertia: DesiredInertia::TaskInertia,
    }
}

/// Translational part of [`arm_shaped_gains`], for three-axis Cartesian robots.
pub fn translational_shaped_gains() -> ImpedanceParams<f64> {
    ImpedanceParams {
        stiffness: v(&[800.0; 3]),
        damping: v(&[134.2; 3]),
        inertia: DesiredInertia::Fixed(v(&[10.0; 3])),
    }
}
