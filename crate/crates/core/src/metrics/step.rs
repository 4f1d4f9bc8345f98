use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// One-axis mass-spring-damper used as the step-response model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondOrder<T: Real> {
    pub stiffness: T,
    pub damping: T,
    pub mass: T,
}

impl<T: Real> SecondOrder<T> {
    pub fn new(stiffness: T, damping: T, mass: T) -> Self {
        Self {
            stiffness,
            damping,
            mass,
        }
    }

    pub fn natural_frequency(&self) -> T {
        (self.stiffness / self.mass).sqrt()
    }

    pub fn damping_ratio(&self) -> T {
        self.damping / (lit::<T>(2.0) * (self.stiffness * self.mass).sqrt())
    }

    fn underdamped(&self) -> Result<T> {
        let zeta = self.damping_ratio();
        if zeta >= T::one() || !(zeta >= T::zero()) {
            return Err(Error::OverdampedUnsupported {
                zeta: zeta.as_f64(),
            });
        }
        Ok(zeta)
    }
}

/// Underdamped response to a step of `amplitude` applied at `t = 0` from rest:
/// `x = A [1 − e^{−ζω_n t} cos(ω_d t − β) / √(1−ζ²)]`, `tan β = ζ/√(1−ζ²)`.
/// Returns position and velocity.
pub fn step_response_closed_form<T: Real>(
    system: &SecondOrder<T>,
    amplitude: T,
    t: T,
) -> Result<(T, T)> {
    let zeta = system.underdamped()?;
    let wn = system.natural_frequency();
    let root = (T::one() - zeta * zeta).sqrt();
    let wd = wn * root;
    let beta = zeta.atan2(root);
    let decay = (-zeta * wn * t).exp();
    let x = amplitude * (T::one() - decay * (wd * t - beta).cos() / root);
    let v = amplitude * wn / root * decay * (wd * t).sin();
    Ok((x, v))
}

/// Mechanical power of the step model, `ẋ [k (A − x) − d ẋ]`, at `t_star`
/// after the step.
pub fn step_power_reference<T: Real>(
    system: &SecondOrder<T>,
    amplitude: T,
    t_star: T,
) -> Result<T> {
    let (x, v) = step_response_closed_form(system, amplitude, t_star)?;
    Ok(v * (system.stiffness * (amplitude - x) - system.damping * v))
}

/// Step experiment on one task axis, used to evaluate the fidelity error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepSpec<T: Real> {
    /// Index into the task coordinates.
    pub axis: usize,
    pub amplitude: T,
    pub time: T,
    pub model: SecondOrder<T>,
}

impl<T: Real> StepSpec<T> {
    /// Reference power at absolute time `t`; zero before the step.
    pub fn reference_power(&self, t: T) -> Result<T> {
        if t < self.time {
            return Ok(T::zero());
        }
        step_power_reference(&self.model, self.amplitude, t - self.time)
    }
}

/// Fidelity error: reference step power minus the measured Cartesian power.
pub fn step_power_error<T: Real>(step: &StepSpec<T>, t: T, measured_power: T) -> Result<T> {
    Ok(step.reference_power(t)? - measured_power)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn starts_at_rest_and_settles() {
        let s = SecondOrder::new(800.0f64, 134.2, 10.0);
        let (x, v) = step_response_closed_form(&s, 0.4, 0.0).unwrap();
        assert!(x.abs() < 1e-15 && v == 0.0);
        let (x, v) = step_response_closed_form(&s, 0.4, 20.0).unwrap();
        assert!((x - 0.4).abs() < 1e-12 && v.abs() < 1e-12);
        assert_eq!(step_power_reference(&s, 0.4, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn critically_damped_is_rejected() {
        let s = SecondOrder::new(100.0, 20.0, 1.0);
        assert!(matches!(
            step_response_closed_form(&s, 1.0, 0.1),
            Err(Error::OverdampedUnsupported { .. })
        ));
    }
}
