//! Reference generation and Cartesian impedance control laws.

mod law;
mod params;
mod reference;

pub use law::{
    control_with_inertia_shaping, control_without_inertia_shaping, impedance_control,
    impedance_control_with, tracking_error, ControlOutput,
};
pub use params::{
    arm_shaped_gains, arm_unshaped_gains, leg_gains, translational_shaped_gains, DesiredInertia,
    ImpedanceParams,
};
pub use reference::{displace, ReferenceKind, ReferenceSample, ReferenceSignal};
