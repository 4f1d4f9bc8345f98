//! Energies, power balances, passivity margins and step-power fidelity.

mod causal;
mod energy;
mod passivity;
mod run;
mod series;
mod step;

pub use causal::{
    causal_balance, causal_derivative, causal_hamiltonian, simulate_causal_impedance,
    task_reference, CausalBalance, CausalSample, CausalState, TaskReference,
};
pub use energy::{impedance_hamiltonian, kinetic_energy, robot_hamiltonian};
pub use passivity::{
    cartesian_power, general_passivity_margin, hamiltonian_gap, power_distribution,
    quasi_static_passivity_margin, PowerDistribution,
};
pub use run::{evaluate_run, step_spec_for, MetricsContext, MetricsSample, RunLog, RunMetrics};
pub use series::{cumulative_trapezoid, held_torque_work, peak_abs, rms_over_window};
pub use step::{
    step_power_error, step_power_reference, step_response_closed_form, SecondOrder, StepSpec,
};

#[cfg(test)]
mod tests;
