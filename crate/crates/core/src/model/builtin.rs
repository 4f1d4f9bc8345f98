use nalgebra::{Matrix3, Vector3};

use super::{parse_model, JointSpec, LinkSpec, RobotModel};
use crate::error::{Error, Result};

const PLANAR2: &str = include_str!("../../models/planar2.toml");
const GANTRY3: &str = include_str!("../../models/gantry3.toml");
const ARM6: &str = include_str!("../../models/arm6.toml");
const LEG3: &str = include_str!("../../models/leg3.toml");

/// Names accepted by [`builtin_model`].
pub fn builtin_names() -> &'static [&'static str] {
    &["planar2", "gantry3", "arm6", "leg3"]
}

/// Model file text of a built-in robot.
pub fn builtin_source(name: &str) -> Result<&'static str> {
    match name {
        "planar2" => Ok(PLANAR2),
        "gantry3" => Ok(GANTRY3),
        "arm6" => Ok(ARM6),
        "leg3" => Ok(LEG3),
        other => Err(Error::UnknownModel(other.to_string())),
    }
}

/// One of the benchmark robots: `planar2`, `gantry3`, `arm6` or `leg3`.
pub fn builtin_model(name: &str) -> Result<RobotModel<f64>> {
    parse_model(builtin_source(name)?)
}

/// `leg3` mounted under a trunk of `trunk_mass` kg that slides freely along the
/// world vertical. Joint 0 is the unactuated trunk height (m, trunk frame above
/// the ground plane z = 0).
pub fn leg3_floating(trunk_mass: f64) -> Result<RobotModel<f64>> {
    let mut model = on_vertical_slide(&builtin_model("leg3")?, trunk_mass)?;
    model.name = "leg3_floating".into();
    Ok(model)
}

/// Mounts `chain` under a trunk of `trunk_mass` kg on an unactuated vertical
/// prismatic joint, which becomes joint 0.
pub fn on_vertical_slide(chain: &RobotModel<f64>, trunk_mass: f64) -> Result<RobotModel<f64>> {
    let mut trunk_joint = JointSpec::prismatic(Vector3::z(), Vector3::zeros());
    trunk_joint.actuated = false;
    let trunk = LinkSpec {
        mass: trunk_mass,
        com: Vector3::zeros(),
        inertia: Matrix3::from_diagonal_element(0.05 * trunk_mass),
    };
    let mut joints = vec![trunk_joint];
    joints.extend(chain.joints.iter().cloned());
    let mut links = vec![trunk];
    links.extend(chain.links.iter().cloned());
    let model = RobotModel {
        name: format!("{}_on_slide", chain.name),
        gravity: chain.gravity,
        joints,
        links,
        end_effector_link: chain.end_effector_link + 1,
        tool_offset: chain.tool_offset,
        task: chain.task.clone(),
    };
    model.validate()?;
    Ok(model)
}
