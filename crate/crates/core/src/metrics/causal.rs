use nalgebra::DVector;

use crate::control::{DesiredInertia, ImpedanceParams, ReferenceSignal};
use crate::dynamics::axis_error;
use crate::error::{Error, Result};
use crate::model::TaskAxis;
use crate::scalar::{lit, Real};

/// Reference expressed in task coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskReference<T: Real> {
    pub position: DVector<T>,
    pub velocity: DVector<T>,
    pub acceleration: DVector<T>,
}

impl<T: Real> TaskReference<T> {
    pub fn constant(position: DVector<T>) -> Self {
        let k = position.len();
        Self {
            position,
            velocity: DVector::zeros(k),
            acceleration: DVector::zeros(k),
        }
    }
}

/// Samples `signal` on the given task axes. Rotational coordinates are the
/// components of the world rotation vector.
pub fn task_reference<T: Real>(
    signal: &ReferenceSignal<T>,
    axes: &[TaskAxis],
    t: T,
) -> TaskReference<T> {
    let s = signal.evaluate(t);
    let pick = |v: &nalgebra::Vector6<T>| {
        DVector::from_iterator(axes.len(), axes.iter().map(|a| v[a.twist_index()]))
    };
    let full = axis_error(axes, &s.pose, &nalgebra::Isometry3::identity());
    TaskReference {
        position: full,
        velocity: pick(&s.velocity),
        acceleration: pick(&s.acceleration),
    }
}

/// Position and momentum `p = Λ_d ẋ` of the target impedance.
#[derive(Debug, Clone, PartialEq)]
pub struct CausalState<T: Real> {
    pub x: DVector<T>,
    pub p: DVector<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CausalSample<T: Real> {
    pub t: T,
    pub state: CausalState<T>,
}

/// Terms of the power balance of the target impedance at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CausalBalance<T: Real> {
    /// `(ẋ − ẋ_d)ᵀ (ṗ_d + f_int)`
    pub supplied: T,
    /// `dH/dt`
    pub stored_rate: T,
    /// `(ẋ − ẋ_d)ᵀ D_d (ẋ − ẋ_d)`
    pub dissipated: T,
    pub residual: T,
}

fn fixed_inertia<T: Real>(params: &ImpedanceParams<T>) -> Result<&DVector<T>> {
    match &params.inertia {
        DesiredInertia::Fixed(m) => Ok(m),
        DesiredInertia::TaskInertia => Err(Error::InvalidParams(
            "the target impedance needs a fixed inertia".into(),
        )),
    }
}

/// `H = ½ (p − p_d)ᵀ Λ_d⁻¹ (p − p_d) + ½ (x − x_d)ᵀ K_d (x − x_d)`.
pub fn causal_hamiltonian<T: Real>(
    params: &ImpedanceParams<T>,
    state: &CausalState<T>,
    reference: &TaskReference<T>,
) -> Result<T> {
    let m = fixed_inertia(params)?;
    let dp = &state.p - reference.velocity.component_mul(m);
    let e = &state.x - &reference.position;
    let half = lit::<T>(0.5);
    Ok(half * dp.dot(&dp.component_div(m)) + half * e.dot(&params.stiffness.component_mul(&e)))
}

/// State derivative of the target impedance driven by `p_d`, `ṗ_d` and `f_int`.
pub fn causal_derivative<T: Real>(
    params: &ImpedanceParams<T>,
    state: &CausalState<T>,
    reference: &TaskReference<T>,
    f_int: &DVector<T>,
) -> Result<CausalState<T>> {
    let m = fixed_inertia(params)?;
    let p_d = reference.velocity.component_mul(m);
    let p_d_rate = reference.acceleration.component_mul(m);
    let grad_x = params
        .stiffness
        .component_mul(&(&state.x - &reference.position));
    let grad_p = (&state.p - &p_d).component_div(m);
    Ok(CausalState {
        x: &grad_p + p_d.component_div(m),
        p: -grad_x - params.damping.component_mul(&grad_p) + p_d_rate + f_int,
    })
}

/// Evaluates both sides of the balance `supplied = dH/dt + dissipated`, with
/// `dH/dt` the total time derivative obtained by the chain rule along the
/// vector field (the reference moves too).
///
/// The residual equals `(ẋ − ẋ_d)ᵀ ṗ_d`: the energy of the target mass-spring-damper
/// only changes through `f_int` and the damper, so the desired-inertial power
/// counted on the supply side is unbalanced whenever the reference accelerates
/// away from the current velocity.
pub fn causal_balance<T: Real>(
    params: &ImpedanceParams<T>,
    state: &CausalState<T>,
    reference: &TaskReference<T>,
    f_int: &DVector<T>,
) -> Result<CausalBalance<T>> {
    let m = fixed_inertia(params)?;
    let rate = causal_derivative(params, state, reference, f_int)?;
    let p_d = reference.velocity.component_mul(m);
    let p_d_rate = reference.acceleration.component_mul(m);
    let grad_x = params
        .stiffness
        .component_mul(&(&state.x - &reference.position));
    let grad_p = (&state.p - &p_d).component_div(m);
    let vel_err = &rate.x - &reference.velocity;
    let stored_rate = grad_x.dot(&vel_err) + grad_p.dot(&(&rate.p - &p_d_rate));
    let supplied = vel_err.dot(&(&p_d_rate + f_int));
    let dissipated = vel_err.dot(&params.damping.component_mul(&vel_err));
    Ok(CausalBalance {
        supplied,
        stored_rate,
        dissipated,
        residual: supplied - stored_rate - dissipated,
    })
}

/// Fixed-step RK4 integration of the target impedance over `[0, duration]`.
///
/// Returns `round(duration / dt) + 1` samples, the first one being the initial state.
/// Zero damping is accepted here so that lossless behavior can be checked.
pub fn simulate_causal_impedance<T: Real>(
    params: &ImpedanceParams<T>,
    reference: &dyn Fn(T) -> TaskReference<T>,
    f_int: &dyn Fn(T) -> DVector<T>,
    x0: DVector<T>,
    p0: DVector<T>,
    dt: T,
    duration: T,
) -> Result<Vec<CausalSample<T>>> {
    let m = fixed_inertia(params)?;
    let k = m.len();
    if params.stiffness.len() != k || params.damping.len() != k || x0.len() != k || p0.len() != k {
        return Err(Error::Dimension(
            "causal impedance state and parameters disagree in size".into(),
        ));
    }
    if !(dt > T::zero()) {
        return Err(Error::Config("integration step must be positive".into()));
    }
    let steps = (duration / dt).round().to_usize().unwrap_or(0);
    let mut out = Vec::with_capacity(steps + 1);
    let mut state = CausalState { x: x0, p: p0 };
    let half = lit::<T>(0.5);
    let sixth = lit::<T>(1.0 / 6.0);
    let two = lit::<T>(2.0);
    let f = |t: T, s: &CausalState<T>| causal_derivative(params, s, &reference(t), &f_int(t));
    let shifted = |s: &CausalState<T>, d: &CausalState<T>, h: T| CausalState {
        x: &s.x + &d.x * h,
        p: &s.p + &d.p * h,
    };
    for i in 0..=steps {
        let t = dt * lit(i as f64);
        out.push(CausalSample {
            t,
            state: state.clone(),
        });
        if i == steps {
            break;
        }
        let k1 = f(t, &state)?;
        let k2 = f(t + dt * half, &shifted(&state, &k1, dt * half))?;
        let k3 = f(t + dt * half, &shifted(&state, &k2, dt * half))?;
        let k4 = f(t + dt, &shifted(&state, &k3, dt))?;
        state = CausalState {
            x: &state.x + (&k1.x + &k2.x * two + &k3.x * two + &k4.x) * (dt * sixth),
            p: &state.p + (&k1.p + &k2.p * two + &k3.p * two + &k4.p) * (dt * sixth),
        };
    }
    Ok(out)
}
