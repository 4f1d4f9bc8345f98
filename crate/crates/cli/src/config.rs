//! Scenario configuration files.
//!
//! A configuration is a TOML document. The robot is either named (`[model]
//! builtin = "arm6"`), read from a model file (`[model] file = "..."`, relative
//! to the configuration), or written inline with the model grammar's
//! `[robot]`, `[[joint]]` and `[[link]]` tables.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use nalgebra::{DVector, Isometry3};
use serde::Deserialize;

use phbench::control::{DesiredInertia, ImpedanceParams, ReferenceSignal};
use phbench::dynamics::{forward_kinematics, inverse_kinematics, JointState};
use phbench::model::{builtin_model, on_vertical_slide, parse_model, RobotModel, TaskAxis};
use phbench::sim::{ContactParams, ExternalWrench, LimitSprings, Scenario, SimConfig};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigDoc {
    name: String,
    #[serde(default)]
    model: ModelSection,
    impedance: ImpedanceSection,
    reference: ReferenceSection,
    sim: SimSection,
    contact: Option<ContactSection>,
    joint_limits: Option<LimitSection>,
    external_wrench: Option<WrenchSection>,
    initial: InitialSection,
    #[serde(default)]
    output: OutputSection,
    // inline model grammar, parsed separately
    robot: Option<toml::Value>,
    joint: Option<toml::Value>,
    link: Option<toml::Value>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelSection {
    builtin: Option<String>,
    file: Option<PathBuf>,
    /// Mounts the chain on a free vertical slide carrying this trunk mass.
    floating_trunk_mass_kg: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ImpedanceSection {
    stiffness: Vec<f64>,
    damping: Vec<f64>,
    /// Desired inertia per axis; absent means the robot's own task inertia.
    inertia: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum ReferenceSection {
    /// Holds the initial tool pose.
    Constant,
    /// Step from the initial tool pose.
    Step {
        axis: String,
        amplitude: f64,
        #[serde(default)]
        time_s: f64,
    },
    Gait {
        center_m: [f64; 3],
        step_length_m: f64,
        period_s: f64,
        step_height_m: f64,
        #[serde(default)]
        pose_only: bool,
    },
    Jump {
        rest_m: [f64; 3],
        drop_m: f64,
        return_delay_s: f64,
        #[serde(default)]
        time_s: f64,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimSection {
    duration_s: f64,
    #[serde(default = "default_control_dt")]
    control_dt_s: f64,
    #[serde(default = "default_substeps")]
    physics_substeps: usize,
    #[serde(default)]
    model_error_scale: Vec<f64>,
}

fn default_control_dt() -> f64 {
    1e-3
}

fn default_substeps() -> usize {
    10
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ContactSection {
    #[serde(default)]
    ground_height_m: f64,
    #[serde(default = "default_contact_stiffness")]
    normal_stiffness: f64,
    #[serde(default = "default_contact_damping")]
    normal_damping: f64,
    #[serde(default = "default_contact_tangential")]
    tangential_viscous: f64,
}

fn default_contact_stiffness() -> f64 {
    ContactParams::<f64>::default().normal_stiffness
}

fn default_contact_damping() -> f64 {
    ContactParams::<f64>::default().normal_damping
}

fn default_contact_tangential() -> f64 {
    ContactParams::<f64>::default().tangential_viscous
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LimitSection {
    stiffness: f64,
    damping: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct WrenchSection {
    constant: Vec<f64>,
    #[serde(default)]
    amplitude: Vec<f64>,
    #[serde(default)]
    frequency_hz: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct InitialSection {
    q: Vec<f64>,
    qd: Option<Vec<f64>>,
    /// Solves the controlled joints so the tool starts on the reference,
    /// starting from `q`.
    #[serde(default)]
    match_reference: bool,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputSection {
    csv: Option<PathBuf>,
    /// RMS window for the step power error, `[t0, t1]` in seconds.
    window_s: Option<[f64; 2]>,
}

/// A fully resolved run description.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub scenario: Scenario<f64>,
    /// CSV destination, relative to the working directory.
    pub output: Option<PathBuf>,
    pub window: Option<(f64, f64)>,
}

fn pose_at(p: [f64; 3]) -> Isometry3<f64> {
    Isometry3::translation(p[0], p[1], p[2])
}

fn load_model(doc: &ConfigDoc, text: &toml::Table, base_dir: &Path) -> Result<RobotModel<f64>> {
    let inline = doc.robot.is_some() || doc.joint.is_some() || doc.link.is_some();
    let sources = doc.model.builtin.is_some() as u8 + doc.model.file.is_some() as u8 + inline as u8;
    if sources != 1 {
        bail!("exactly one of [model] builtin, [model] file or an inline [robot] must be given");
    }
    if let Some(name) = &doc.model.builtin {
        return Ok(builtin_model(name)?);
    }
    if let Some(file) = &doc.model.file {
        let path = base_dir.join(file);
        let src = std::fs::read_to_string(&path)
            .with_context(|| format!("reading model file {}", path.display()))?;
        return parse_model(&src).with_context(|| format!("in model file {}", path.display()));
    }
    let mut model_doc = toml::Table::new();
    for key in ["robot", "joint", "link"] {
        if let Some(v) = text.get(key) {
            model_doc.insert(key.into(), v.clone());
        }
    }
    Ok(parse_model(&toml::to_string(&model_doc)?).context("in inline model")?)
}

fn params_from(s: &ImpedanceSection) -> ImpedanceParams<f64> {
    ImpedanceParams {
        stiffness: DVector::from_vec(s.stiffness.clone()),
        damping: DVector::from_vec(s.damping.clone()),
        inertia: match &s.inertia {
            Some(m) => DesiredInertia::Fixed(DVector::from_vec(m.clone())),
            None => DesiredInertia::TaskInertia,
        },
    }
}

/// Parses a configuration; relative paths are resolved against `base_dir`.
pub fn parse_config(text: &str, base_dir: &Path) -> Result<RunConfig> {
    let doc: ConfigDoc = toml::from_str(text)?;
    let table: toml::Table = toml::from_str(text)?;
    let chain = load_model(&doc, &table, base_dir)?;
    let (plant, offset) = match doc.model.floating_trunk_mass_kg {
        Some(m) => (on_vertical_slide(&chain, m)?, 1),
        None => (chain.clone(), 0),
    };

    let n = plant.dof();
    if doc.initial.q.len() != n {
        bail!("[initial] q needs {n} entries for `{}`", plant.name);
    }
    let mut q0 = DVector::from_vec(doc.initial.q.clone());
    let qd0 = match &doc.initial.qd {
        Some(v) if v.len() == n => DVector::from_vec(v.clone()),
        Some(_) => bail!("[initial] qd needs {n} entries"),
        None => DVector::zeros(n),
    };
    let controlled = |q: &DVector<f64>| q.rows(offset, chain.dof()).into_owned();
    let tool_pose = forward_kinematics(&chain, &controlled(&q0)).pose();

    let reference = match &doc.reference {
        ReferenceSection::Constant => ReferenceSignal::constant(tool_pose),
        ReferenceSection::Step {
            axis,
            amplitude,
            time_s,
        } => {
            let axis =
                TaskAxis::parse(axis).ok_or_else(|| anyhow!("unknown step axis `{axis}`"))?;
            ReferenceSignal::step_at(axis, *amplitude, tool_pose, *time_s)
        }
        ReferenceSection::Gait {
            center_m,
            step_length_m,
            period_s,
            step_height_m,
            pose_only,
        } => {
            let r = ReferenceSignal::gait(
                *step_length_m,
                *period_s,
                *step_height_m,
                pose_at(*center_m),
            );
            if *pose_only {
                r.into_pose_only()
            } else {
                r
            }
        }
        ReferenceSection::Jump {
            rest_m,
            drop_m,
            return_delay_s,
            time_s,
        } => ReferenceSignal::jump_at(*drop_m, *return_delay_s, pose_at(*rest_m), *time_s),
    };

    if doc.initial.match_reference {
        let solved = inverse_kinematics(&chain, &reference.evaluate(0.0).pose, &controlled(&q0))?;
        q0.rows_mut(offset, chain.dof()).copy_from(&solved);
    }

    let mut config = SimConfig::new(doc.sim.duration_s);
    config.control_dt = doc.sim.control_dt_s;
    config.physics_substeps = doc.sim.physics_substeps;
    config.model_error_scale = doc.sim.model_error_scale.clone();
    config.contact = doc.contact.as_ref().map(|c| ContactParams {
        ground_height: c.ground_height_m,
        normal_stiffness: c.normal_stiffness,
        normal_damping: c.normal_damping,
        tangential_viscous: c.tangential_viscous,
    });
    config.joint_limits = doc.joint_limits.as_ref().map(|l| LimitSprings {
        stiffness: l.stiffness,
        damping: l.damping,
    });
    config.external_wrench = doc.external_wrench.as_ref().map(|w| {
        let k = w.constant.len();
        ExternalWrench {
            constant: DVector::from_vec(w.constant.clone()),
            amplitude: if w.amplitude.is_empty() {
                DVector::zeros(k)
            } else {
                DVector::from_vec(w.amplitude.clone())
            },
            frequency_hz: w.frequency_hz,
        }
    });

    let scenario = Scenario {
        name: doc.name.clone(),
        plant,
        controller_offset: offset,
        params: params_from(&doc.impedance),
        reference,
        initial: JointState::new(q0, qd0),
        config,
    };
    scenario.validate()?;
    Ok(RunConfig {
        scenario,
        output: doc.output.csv.clone(),
        window: doc.output.window_s.map(|[a, b]| (a, b)),
    })
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let dir = path.parent().unwrap_or(Path::new("."));
    parse_config(&text, dir).with_context(|| format!("in config {}", path.display()))
}
