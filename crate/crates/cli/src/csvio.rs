//! Run logs as CSV: one header row with unit-suffixed column names, then one
//! row per control tick. Missing metrics are written as `NaN`.

use std::io::{Read, Write};

use anyhow::{bail, Context, Result};
use nalgebra::DVector;

use phbench::metrics::{MetricsSample, RunLog, RunMetrics};
use phbench::model::{JointKind, RobotModel, TaskAxis};
use phbench::sim::Scenario;

const METRIC_COLUMNS: [&str; 10] = [
    "H_q_J",
    "H_Omega_J",
    "P_cmd_W",
    "int_P_cmd_J",
    "gap_J",
    "margin_qs_J",
    "margin_gen_J",
    "P_x_W",
    "P_step_ref_W",
    "e_step_W",
];

/// Column layout of a scenario's log.
#[derive(Debug, Clone, PartialEq)]
pub struct Schema {
    pub dof: usize,
    pub task_dim: usize,
    pub header: Vec<String>,
}

impl Schema {
    pub fn for_scenario(scenario: &Scenario<f64>) -> Result<Self> {
        let controller = scenario.controller_model()?;
        Ok(Self::new(&scenario.plant, &controller.task))
    }

    pub fn new(plant: &RobotModel<f64>, task: &[TaskAxis]) -> Self {
        let joint_unit = |k: JointKind, rate: &str, effort: bool| match (k, effort) {
            (JointKind::Revolute, false) => format!("rad{rate}"),
            (JointKind::Prismatic, false) => format!("m{rate}"),
            (JointKind::Revolute, true) => "Nm".to_string(),
            (JointKind::Prismatic, true) => "N".to_string(),
        };
        let mut header = vec!["t_s".to_string()];
        for (prefix, rate, effort) in [("q", "", false), ("qd", "_per_s", false), ("tau", "", true)]
        {
            for (i, j) in plant.joints.iter().enumerate() {
                header.push(format!("{prefix}_{i}_{}", joint_unit(j.kind, rate, effort)));
            }
        }
        for prefix in ["x", "xd_ref"] {
            for (i, a) in task.iter().enumerate() {
                let unit = if a.is_rotational() { "rad" } else { "m" };
                header.push(format!("{prefix}_{i}_{unit}"));
            }
        }
        for (i, a) in task.iter().enumerate() {
            let unit = if a.is_rotational() { "Nm" } else { "N" };
            header.push(format!("fint_{i}_{unit}"));
        }
        header.extend(METRIC_COLUMNS.iter().map(|s| s.to_string()));
        Self {
            dof: plant.dof(),
            task_dim: task.len(),
            header,
        }
    }

    fn fint_start(&self) -> usize {
        1 + 3 * self.dof + 2 * self.task_dim
    }
}

fn cell(v: f64) -> String {
    // shortest decimal that parses back to the same value
    v.to_string()
}

fn metric_cells(m: &MetricsSample<f64>) -> [f64; 10] {
    let nan = f64::NAN;
    [
        m.h_q,
        m.h_omega,
        m.p_cmd,
        m.int_p_cmd,
        m.hamiltonian_gap,
        m.passivity_margin.unwrap_or(nan),
        m.general_passivity_margin.unwrap_or(nan),
        m.p_x,
        m.p_step_ref.unwrap_or(nan),
        m.e_step.unwrap_or(nan),
    ]
}

pub fn write_run<W: Write>(
    out: W,
    schema: &Schema,
    log: &RunLog<f64>,
    metrics: &RunMetrics<f64>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&schema.header)?;
    let nan_fint = DVector::from_element(schema.task_dim, f64::NAN);
    for i in 0..log.len() {
        let fint = log.f_int.as_ref().map(|f| &f[i]).unwrap_or(&nan_fint);
        let row = std::iter::once(log.t[i])
            .chain(log.q[i].iter().copied())
            .chain(log.qd[i].iter().copied())
            .chain(log.tau[i].iter().copied())
            .chain(metrics.x[i].iter().copied())
            .chain(metrics.x_ref[i].iter().copied())
            .chain(fint.iter().copied())
            .chain(metric_cells(&metrics.samples[i]));
        w.write_record(row.map(cell))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads the joint-space log back. Interaction columns that are entirely `NaN`
/// mean the log carries no interaction data.
pub fn read_run<R: Read>(input: R, schema: &Schema) -> Result<RunLog<f64>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != schema.header {
        bail!(
            "log columns do not match the configured robot: expected {} columns starting `{}`, found {}",
            schema.header.len(),
            schema.header.join(","),
            header.len()
        );
    }
    let (n, k) = (schema.dof, schema.task_dim);
    let mut log = RunLog {
        t: Vec::new(),
        q: Vec::new(),
        qd: Vec::new(),
        tau: Vec::new(),
        f_int: Some(Vec::new()),
    };
    let mut any_fint = false;
    for (line, record) in r.records().enumerate() {
        let record = record?;
        let values = record
            .iter()
            .map(|c| c.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .with_context(|| format!("row {}: non-numeric cell", line + 2))?;
        if values.len() != header.len() {
            bail!("row {}: expected {} cells", line + 2, header.len());
        }
        let slice = |start: usize, len: usize| DVector::from_row_slice(&values[start..start + len]);
        log.t.push(values[0]);
        log.q.push(slice(1, n));
        log.qd.push(slice(1 + n, n));
        log.tau.push(slice(1 + 2 * n, n));
        let f = slice(schema.fint_start(), k);
        any_fint |= f.iter().any(|v| !v.is_nan());
        log.f_int.as_mut().unwrap().push(f);
    }
    if log.is_empty() {
        bail!("log has no data rows");
    }
    if !any_fint {
        log.f_int = None;
    }
    Ok(log)
}
