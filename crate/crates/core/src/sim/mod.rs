//! Fixed-step closed-loop simulation with penalty contact and run logging.

mod config;
mod contact;
mod engine;
pub mod scenarios;

pub use config::{ContactParams, ExternalWrench, LimitSprings, SimConfig};
pub use contact::contact_force;
pub use engine::{
    advance, control_tick, run_scenario, simulate_open_loop, step_sim, Controller, LoggedSample,
    Scenario, SimState, SimTrajectory,
};
pub use scenarios::{builtin_scenario, scenario_names};
