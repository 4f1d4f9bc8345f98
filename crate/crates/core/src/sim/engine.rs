use nalgebra::{DVector, Vector3, Vector6};

use super::config::SimConfig;
use super::contact::contact_force;
use crate::control::{impedance_control, ImpedanceParams, ReferenceSignal};
use crate::dynamics::{forward_dynamics_frames, ChainFrames, JointState};
use crate::error::{Error, Result};
use crate::metrics::{evaluate_run, step_spec_for, MetricsContext, RunLog, RunMetrics};
use crate::model::{RobotModel, TaskAxis};
use crate::scalar::{lit, Real};

const DIVERGENCE_LIMIT: f64 = 1e6;

/// A closed-loop experiment: plant, controller, reference and integration settings.
#[derive(Debug, Clone)]
pub struct Scenario<T: Real> {
    pub name: String,
    /// True mechanism being simulated.
    pub plant: RobotModel<T>,
    /// First plant joint driven by the controller; earlier joints are passive.
    pub controller_offset: usize,
    pub params: ImpedanceParams<T>,
    pub reference: ReferenceSignal<T>,
    pub initial: JointState<T>,
    pub config: SimConfig<T>,
}

impl<T: Real> Scenario<T> {
    /// Plant with the configured mass error applied.
    pub fn modelled_plant(&self) -> Result<RobotModel<T>> {
        if self.config.model_error_scale.is_empty() {
            Ok(self.plant.clone())
        } else {
            self.plant.with_mass_scale(&self.config.model_error_scale)
        }
    }

    /// Chain the controller believes it drives.
    pub fn controller_model(&self) -> Result<RobotModel<T>> {
        let m = self.modelled_plant()?;
        if self.controller_offset == 0 {
            Ok(m)
        } else {
            m.subchain(self.controller_offset)
        }
    }

    pub fn controller(&self) -> Result<Controller<T>> {
        Ok(Controller {
            model: self.controller_model()?,
            offset: self.controller_offset,
            params: self.params.clone(),
        })
    }

    pub fn metrics_context(&self) -> Result<MetricsContext<T>> {
        let controller = self.controller_model()?;
        let q0 = self
            .initial
            .q
            .rows(self.controller_offset, controller.dof())
            .into_owned();
        let step = step_spec_for(&controller, &self.params, &self.reference, &q0)?;
        Ok(MetricsContext {
            plant: self.modelled_plant()?,
            controller,
            controller_offset: self.controller_offset,
            params: self.params.clone(),
            reference: self.reference.clone(),
            step,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.plant.validate()?;
        self.config.validate()?;
        self.params.validate()?;
        let c = self.controller_model()?;
        self.params.check_dim(c.task_dim())?;
        let n = self.plant.dof();
        if self.initial.q.len() != n || self.initial.qd.len() != n {
            return Err(Error::Dimension(format!(
                "initial state must have {n} joint entries"
            )));
        }
        if let Some(w) = &self.config.external_wrench {
            let k = self.plant.task_dim();
            if w.constant.len() != k || w.amplitude.len() != k {
                return Err(Error::Dimension(format!(
                    "external wrench must have {k} task entries"
                )));
            }
        }
        Ok(())
    }
}

/// Impedance controller acting on the joints `offset..` of the plant.
#[derive(Debug, Clone)]
pub struct Controller<T: Real> {
    pub model: RobotModel<T>,
    pub offset: usize,
    pub params: ImpedanceParams<T>,
}

impl<T: Real> Controller<T> {
    /// Plant torques for the current state; passive and unactuated joints get zero.
    pub fn plant_torque(
        &self,
        plant: &RobotModel<T>,
        q: &DVector<T>,
        qd: &DVector<T>,
        t: T,
        reference: &ReferenceSignal<T>,
        f_int: &DVector<T>,
    ) -> Result<DVector<T>> {
        let n = self.model.dof();
        let qc = q.rows(self.offset, n).into_owned();
        let qdc = qd.rows(self.offset, n).into_owned();
        let out = impedance_control(
            &self.model,
            &qc,
            &qdc,
            &reference.evaluate(t),
            &self.params,
            Some(f_int),
        )?;
        let mut tau = DVector::zeros(plant.dof());
        tau.rows_mut(self.offset, n).copy_from(&out.tau_act);
        for (i, j) in plant.joints.iter().enumerate() {
            if !j.actuated {
                tau[i] = T::zero();
            }
        }
        if let Some(i) = tau.iter().position(|v| !v.is_finite()) {
            return Err(Error::NumericalDivergence {
                t: t.as_f64(),
                magnitude: tau[i].as_f64(),
            });
        }
        Ok(tau)
    }
}

/// Simulation state at control tick `tick`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState<T: Real> {
    pub tick: usize,
    pub q: DVector<T>,
    pub qd: DVector<T>,
}

impl<T: Real> SimState<T> {
    pub fn new(initial: &JointState<T>) -> Self {
        Self {
            tick: 0,
            q: initial.q.clone(),
            qd: initial.qd.clone(),
        }
    }

    pub fn time(&self, config: &SimConfig<T>) -> T {
        config.control_dt * lit(self.tick as f64)
    }
}

/// One row of the run log.
#[derive(Debug, Clone, PartialEq)]
pub struct LoggedSample<T: Real> {
    pub t: T,
    pub q: DVector<T>,
    pub qd: DVector<T>,
    pub tau: DVector<T>,
    pub f_int: DVector<T>,
}

/// Closed-loop run with its per-sample metrics.
#[derive(Debug, Clone)]
pub struct SimTrajectory<T: Real> {
    pub name: String,
    pub log: RunLog<T>,
    pub metrics: RunMetrics<T>,
}

/// Wrench `[force; moment]` at the tool from contact and the scripted external load.
fn tool_wrench<T: Real>(
    plant: &RobotModel<T>,
    frames: &ChainFrames<T>,
    qd: &DVector<T>,
    t: T,
    config: &SimConfig<T>,
) -> Option<Vector6<T>> {
    if config.contact.is_none() && config.external_wrench.is_none() {
        return None;
    }
    let mut w = Vector6::zeros();
    if let Some(c) = &config.contact {
        let j = frames.full_jacobian(plant.end_effector_link);
        let v = j.rows(0, 3) * qd;
        let f = contact_force(&frames.tool_position, &Vector3::new(v[0], v[1], v[2]), c);
        for i in 0..3 {
            w[i] += f[i];
        }
    }
    if let Some(e) = &config.external_wrench {
        for (a, f) in plant.task.iter().zip(e.at(t).iter()) {
            w[a.twist_index()] += *f;
        }
    }
    Some(w)
}

fn limit_torques<T: Real>(
    plant: &RobotModel<T>,
    q: &DVector<T>,
    qd: &DVector<T>,
    config: &SimConfig<T>,
) -> Option<DVector<T>> {
    let springs = config.joint_limits?;
    let mut tau = DVector::zeros(plant.dof());
    for (i, j) in plant.joints.iter().enumerate() {
        let Some((lo, hi)) = j.position_limits else {
            continue;
        };
        if q[i] > hi {
            tau[i] = (-springs.stiffness * (q[i] - hi) - springs.damping * qd[i]).min(T::zero());
        } else if q[i] < lo {
            tau[i] = (springs.stiffness * (lo - q[i]) - springs.damping * qd[i]).max(T::zero());
        }
    }
    Some(tau)
}

/// Joint accelerations of the plant under held torques plus contact, external
/// load and limit springs.
fn plant_acceleration<T: Real>(
    plant: &RobotModel<T>,
    q: &DVector<T>,
    qd: &DVector<T>,
    tau: &DVector<T>,
    t: T,
    config: &SimConfig<T>,
) -> Result<DVector<T>> {
    let frames = ChainFrames::new(plant, q);
    let mut total = tau.clone();
    if let Some(w) = tool_wrench(plant, &frames, qd, t, config) {
        total += frames.full_jacobian(plant.end_effector_link).transpose() * w;
    }
    if let Some(l) = limit_torques(plant, q, qd, config) {
        total += l;
    }
    forward_dynamics_frames(
        plant,
        &frames,
        qd,
        &total,
        &DVector::zeros(plant.task_dim()),
    )
}

/// Integrates one control period with torques `tau` held constant.
pub fn advance<T: Real>(
    plant: &RobotModel<T>,
    state: &mut SimState<T>,
    tau: &DVector<T>,
    config: &SimConfig<T>,
) -> Result<()> {
    let t0 = state.time(config);
    let h = config.control_dt / lit(config.physics_substeps as f64);
    let half = lit::<T>(0.5);
    let two = lit::<T>(2.0);
    let sixth = lit::<T>(1.0 / 6.0);
    for s in 0..config.physics_substeps {
        let t = t0 + h * lit(s as f64);
        let (q, qd) = (&state.q, &state.qd);
        let a1 = plant_acceleration(plant, q, qd, tau, t, config)?;
        let (q2, v2) = (q + qd * (h * half), qd + &a1 * (h * half));
        let a2 = plant_acceleration(plant, &q2, &v2, tau, t + h * half, config)?;
        let (q3, v3) = (q + &v2 * (h * half), qd + &a2 * (h * half));
        let a3 = plant_acceleration(plant, &q3, &v3, tau, t + h * half, config)?;
        let (q4, v4) = (q + &v3 * h, qd + &a3 * h);
        let a4 = plant_acceleration(plant, &q4, &v4, tau, t + h, config)?;
        let dq = (qd + &v2 * two + &v3 * two + &v4) * (h * sixth);
        let dv = (&a1 + &a2 * two + &a3 * two + &a4) * (h * sixth);
        state.q += dq;
        state.qd += dv;
    }
    state.tick += 1;
    let magnitude = state.q.amax().max(state.qd.amax());
    let finite = state.q.iter().chain(state.qd.iter()).all(|v| v.is_finite());
    if !finite || magnitude > lit(DIVERGENCE_LIMIT) {
        return Err(Error::NumericalDivergence {
            t: state.time(config).as_f64(),
            magnitude: if finite {
                magnitude.as_f64()
            } else {
                f64::INFINITY
            },
        });
    }
    Ok(())
}

/// Evaluates the controller at the current tick without advancing the state.
pub fn control_tick<T: Real>(
    plant: &RobotModel<T>,
    state: &SimState<T>,
    controller: &Controller<T>,
    reference: &ReferenceSignal<T>,
    config: &SimConfig<T>,
) -> Result<LoggedSample<T>> {
    let t = state.time(config);
    let frames = ChainFrames::new(plant, &state.q);
    let wrench = tool_wrench(plant, &frames, &state.qd, t, config).unwrap_or_else(Vector6::zeros);
    let f_int = select_axes(&controller.model.task, &wrench);
    let tau = controller.plant_torque(plant, &state.q, &state.qd, t, reference, &f_int)?;
    Ok(LoggedSample {
        t,
        q: state.q.clone(),
        qd: state.qd.clone(),
        tau,
        f_int,
    })
}

/// Runs the controller once, then integrates the plant over one control period
/// with the resulting torques held. Returns the sample logged at the start.
pub fn step_sim<T: Real>(
    plant: &RobotModel<T>,
    state: &mut SimState<T>,
    controller: &Controller<T>,
    reference: &ReferenceSignal<T>,
    config: &SimConfig<T>,
) -> Result<LoggedSample<T>> {
    let sample = control_tick(plant, state, controller, reference, config)?;
    advance(plant, state, &sample.tau, config)?;
    Ok(sample)
}

fn select_axes<T: Real>(axes: &[TaskAxis], w: &Vector6<T>) -> DVector<T> {
    DVector::from_iterator(axes.len(), axes.iter().map(|a| w[a.twist_index()]))
}

/// Simulates the scenario and evaluates its metrics. Deterministic.
pub fn run_scenario<T: Real>(scenario: &Scenario<T>) -> Result<SimTrajectory<T>> {
    scenario.validate()?;
    let controller = scenario.controller()?;
    let config = &scenario.config;
    let ticks = config.ticks();
    let mut state = SimState::new(&scenario.initial);
    let mut log = RunLog {
        t: Vec::with_capacity(ticks + 1),
        q: Vec::with_capacity(ticks + 1),
        qd: Vec::with_capacity(ticks + 1),
        tau: Vec::with_capacity(ticks + 1),
        f_int: Some(Vec::with_capacity(ticks + 1)),
    };
    for k in 0..=ticks {
        let s = control_tick(
            &scenario.plant,
            &state,
            &controller,
            &scenario.reference,
            config,
        )?;
        if k < ticks {
            advance(&scenario.plant, &mut state, &s.tau, config)?;
        }
        log.t.push(s.t);
        log.q.push(s.q);
        log.qd.push(s.qd);
        log.tau.push(s.tau);
        if let Some(f) = log.f_int.as_mut() {
            f.push(s.f_int);
        }
    }
    let metrics = evaluate_run(&scenario.metrics_context()?, &log)?;
    Ok(SimTrajectory {
        name: scenario.name.clone(),
        log,
        metrics,
    })
}

/// Integrates the plant under a torque law evaluated once per control tick,
/// without contact or metrics. Used for energy audits of the bare mechanism.
pub fn simulate_open_loop<T: Real>(
    plant: &RobotModel<T>,
    initial: &JointState<T>,
    config: &SimConfig<T>,
    torque: &dyn Fn(T, &DVector<T>, &DVector<T>) -> DVector<T>,
) -> Result<RunLog<T>> {
    config.validate()?;
    let ticks = config.ticks();
    let mut state = SimState::new(initial);
    let mut log = RunLog {
        t: Vec::with_capacity(ticks + 1),
        q: Vec::with_capacity(ticks + 1),
        qd: Vec::with_capacity(ticks + 1),
        tau: Vec::with_capacity(ticks + 1),
        f_int: None,
    };
    for k in 0..=ticks {
        let t = state.time(config);
        let tau = torque(t, &state.q, &state.qd);
        log.t.push(t);
        log.q.push(state.q.clone());
        log.qd.push(state.qd.clone());
        log.tau.push(tau.clone());
        if k < ticks {
            advance(plant, &mut state, &tau, config)?;
        }
    }
    Ok(log)
}
