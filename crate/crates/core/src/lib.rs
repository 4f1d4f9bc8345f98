//! Cartesian impedance control on serial chains, with Port-Hamiltonian
//! passivity and step-power fidelity metrics.
//!
//! The numeric core is generic over [`Real`] (`f32` or `f64`); the aliases at
//! the crate root fix the scalar to `f64`, which is what the simulator, the
//! benchmarks and the command-line tool use.

pub mod control;
pub mod dynamics;
pub mod error;
pub mod metrics;
pub mod model;
pub mod scalar;
pub mod sim;
pub mod spatial;
pub mod validation;

pub use error::{Error, Result};
pub use scalar::Real;

pub type RobotModelF64 = model::RobotModel<f64>;
pub type RobotModelF32 = model::RobotModel<f32>;
