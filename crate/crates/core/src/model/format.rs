//! Model file reader and writer.
//!
//! The file is TOML with three kinds of sections:
//!
//! ```toml
//! [robot]
//! name = "planar2"
//! gravity_mps2 = [0.0, -9.81, 0.0]
//! end_effector_link = 1
//! tool_offset_m = [1.0, 0.0, 0.0]   # optional, default origin of the link frame
//! task = ["x", "y"]                 # subset of x, y, z, rx, ry, rz
//!
//! [[joint]]                         # one per joint, base to tip
//! kind = "revolute"                 # or "prismatic"
//! axis = [0.0, 0.0, 1.0]            # unit vector in the joint frame
//! origin_xyz_m = [0.0, 0.0, 0.0]    # joint frame in the parent link frame
//! origin_rpy_rad = [0.0, 0.0, 0.0]  # optional
//! parent_link = -1                  # optional; must be the previous link (-1 = base)
//! limits = [-3.0, 3.0]              # optional, rad or m
//! actuated = true                   # optional
//!
//! [[link]]                          # link i is the child of joint i
//! mass_kg = 1.0
//! com_m = [1.0, 0.0, 0.0]
//! inertia_kgm2 = [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]
//! ```

use std::fmt::Write as _;

use nalgebra::{Matrix3, Vector3};
use serde::Deserialize;

use super::{JointKind, JointSpec, LinkSpec, RobotModel, TaskAxis};
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileDoc {
    robot: RobotSection,
    #[serde(default)]
    joint: Vec<JointSection>,
    #[serde(default)]
    link: Vec<LinkSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RobotSection {
    name: String,
    gravity_mps2: [f64; 3],
    end_effector_link: usize,
    #[serde(default)]
    tool_offset_m: [f64; 3],
    task: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct JointSection {
    kind: String,
    axis: [f64; 3],
    origin_xyz_m: [f64; 3],
    #[serde(default)]
    origin_rpy_rad: [f64; 3],
    parent_link: Option<i64>,
    limits: Option<[f64; 2]>,
    #[serde(default = "default_true")]
    actuated: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LinkSection {
    mass_kg: f64,
    com_m: [f64; 3],
    inertia_kgm2: [[f64; 3]; 3],
}

fn default_true() -> bool {
    true
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Parses and validates a model file.
pub fn parse_model(file_text: &str) -> Result<RobotModel<f64>> {
    let doc: FileDoc = toml::from_str(file_text).map_err(|e| Error::Syntax {
        line: e.span().map(|s| line_of(file_text, s.start)).unwrap_or(0),
        message: e.message().to_string(),
    })?;

    let task = doc
        .robot
        .task
        .iter()
        .map(|s| {
            TaskAxis::parse(s).ok_or_else(|| Error::Semantic(format!("unknown task axis `{s}`")))
        })
        .collect::<Result<Vec<_>>>()?;

    let joints = doc
        .joint
        .iter()
        .enumerate()
        .map(|(i, j)| {
            let kind = match j.kind.as_str() {
                "revolute" => JointKind::Revolute,
                "prismatic" => JointKind::Prismatic,
                other => {
                    return Err(Error::Semantic(format!(
                        "joint {i}: unknown kind `{other}`"
                    )))
                }
            };
            if let Some(p) = j.parent_link {
                if p != i as i64 - 1 {
                    return Err(Error::Semantic(format!(
                        "non-serial chain: joint {i} attached to link {p}, expected {}",
                        i as i64 - 1
                    )));
                }
            }
            Ok(JointSpec {
                kind,
                axis: Vector3::from(j.axis),
                origin_xyz: Vector3::from(j.origin_xyz_m),
                origin_rpy: Vector3::from(j.origin_rpy_rad),
                position_limits: j.limits.map(|[a, b]| (a, b)),
                actuated: j.actuated,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let links = doc
        .link
        .iter()
        .map(|l| LinkSpec {
            mass: l.mass_kg,
            com: Vector3::from(l.com_m),
            inertia: Matrix3::from_fn(|r, c| l.inertia_kgm2[r][c]),
        })
        .collect();

    let model = RobotModel {
        name: doc.robot.name,
        gravity: Vector3::from(doc.robot.gravity_mps2),
        joints,
        links,
        end_effector_link: doc.robot.end_effector_link,
        tool_offset: Vector3::from(doc.robot.tool_offset_m),
        task,
    };
    model.validate()?;
    Ok(model)
}

fn vec3<T: Real>(v: &Vector3<T>) -> String {
    format!(
        "[{:?}, {:?}, {:?}]",
        v.x.as_f64(),
        v.y.as_f64(),
        v.z.as_f64()
    )
}

/// Writes a model in the file format read by [`parse_model`].
///
/// Numbers are written in shortest round-trip form, so parsing the output
/// reproduces the model exactly.
pub fn serialize_model<T: Real>(model: &RobotModel<T>) -> String {
    let mut out = String::new();
    let task: Vec<String> = model
        .task
        .iter()
        .map(|a| format!("\"{}\"", a.as_str()))
        .collect();
    let _ = writeln!(out, "[robot]");
    let _ = writeln!(out, "name = {:?}", model.name);
    let _ = writeln!(out, "gravity_mps2 = {}", vec3(&model.gravity));
    let _ = writeln!(out, "end_effector_link = {}", model.end_effector_link);
    let _ = writeln!(out, "tool_offset_m = {}", vec3(&model.tool_offset));
    let _ = writeln!(out, "task = [{}]", task.join(", "));

    for (i, j) in model.joints.iter().enumerate() {
        let _ = writeln!(out, "\n[[joint]]");
        let _ = writeln!(out, "kind = \"{}\"", j.kind.as_str());
        let _ = writeln!(out, "axis = {}", vec3(&j.axis));
        let _ = writeln!(out, "origin_xyz_m = {}", vec3(&j.origin_xyz));
        let _ = writeln!(out, "origin_rpy_rad = {}", vec3(&j.origin_rpy));
        let _ = writeln!(out, "parent_link = {}", i as i64 - 1);
        if let Some((lo, hi)) = j.position_limits {
            let _ = writeln!(out, "limits = [{:?}, {:?}]", lo.as_f64(), hi.as_f64());
        }
        let _ = writeln!(out, "actuated = {}", j.actuated);
    }

    for l in &model.links {
        let rows: Vec<String> = (0..3)
            .map(|r| {
                format!(
                    "[{:?}, {:?}, {:?}]",
                    l.inertia[(r, 0)].as_f64(),
                    l.inertia[(r, 1)].as_f64(),
                    l.inertia[(r, 2)].as_f64()
                )
            })
            .collect();
        let _ = writeln!(out, "\n[[link]]");
        let _ = writeln!(out, "mass_kg = {:?}", l.mass.as_f64());
        let _ = writeln!(out, "com_m = {}", vec3(&l.com));
        let _ = writeln!(out, "inertia_kgm2 = [{}]", rows.join(", "));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::builtin_model;

    const PLANAR: &str = include_str!("../../models/planar2.toml");

    #[test]
    fn planar2_file_parses() {
        let m = parse_model(PLANAR).unwrap();
        assert_eq!(m.dof(), 2);
        assert_eq!(m.links.len(), 2);
        assert!(m.joints.iter().all(|j| j.kind == JointKind::Revolute));
    }

    #[test]
    fn zero_mass_is_semantic_error() {
        let text = PLANAR.replacen("mass_kg = 1.0", "mass_kg = 0.0", 1);
        assert!(matches!(parse_model(&text), Err(Error::Semantic(_))));
    }

    #[test]
    fn non_unit_axis_rejected() {
        let text = PLANAR.replacen("axis = [0.0, 0.0, 1.0]", "axis = [0.0, 0.0, 1.1]", 1);
        let err = parse_model(&text).unwrap_err();
        assert!(
            matches!(err, Error::Semantic(ref m) if m.contains("unit")),
            "{err}"
        );
    }

    #[test]
    fn branching_parent_rejected() {
        let text = PLANAR.replacen("parent_link = 0", "parent_link = -1", 1);
        let err = parse_model(&text).unwrap_err();
        assert!(
            matches!(err, Error::Semantic(ref m) if m.contains("non-serial")),
            "{err}"
        );
    }

    #[test]
    fn link_joint_count_mismatch_rejected() {
        let cut = PLANAR.rfind("[[link]]").unwrap();
        assert!(matches!(
            parse_model(&PLANAR[..cut]),
            Err(Error::Semantic(_))
        ));
    }

    #[test]
    fn syntax_error_reports_line() {
        let text = "[robot]\nname = \"x\"\ngravity_mps2 = [0.0, 0.0\n";
        match parse_model(text) {
            Err(Error::Syntax { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn bad_inertia_rejected() {
        let mut m = builtin_model("arm6").unwrap();
        m.links[2].inertia = Matrix3::from_diagonal(&Vector3::new(0.1, 0.01, 0.01));
        let err = parse_model(&serialize_model(&m)).unwrap_err();
        assert!(
            matches!(err, Error::Semantic(ref s) if s.contains("triangle")),
            "{err}"
        );
        m.links[2].inertia = Matrix3::from_diagonal(&Vector3::new(-0.1, 0.1, 0.1));
        assert!(parse_model(&serialize_model(&m)).is_err());
    }

    #[test]
    fn serialize_preserves_joint_order() {
        let m = builtin_model("arm6").unwrap();
        let back = parse_model(&serialize_model(&m)).unwrap();
        let kinds: Vec<_> = back.joints.iter().map(|j| (j.kind, j.axis)).collect();
        let orig: Vec<_> = m.joints.iter().map(|j| (j.kind, j.axis)).collect();
        assert_eq!(kinds, orig);
    }
}
