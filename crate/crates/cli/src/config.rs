//! Harness configuration: camera intrinsics, mask resolution, and the
//! class table (mesh recipe + symmetry assignment per class).
//!
//! A built-in table covers five primitive test classes. `--config FILE`
//! replaces the whole table with the file's contents; command-line flags
//! override individual runtime knobs on top of that.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use silpose_core::error::{Error, Result};
use silpose_core::geometry::CameraIntrinsics;
use silpose_core::scene::MeshSource;
use silpose_core::symmetry::{SymmetryConfig, SymmetryConfigEntry, SymmetryKind};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarnessConfig {
    pub camera: CameraIntrinsics,
    pub mask_resolution: usize,
    pub classes: BTreeMap<String, MeshSource>,
    pub symmetry: SymmetryConfig,
}

const X: [f64; 3] = [1.0, 0.0, 0.0];
const Y: [f64; 3] = [0.0, 1.0, 0.0];
const Z: [f64; 3] = [0.0, 0.0, 1.0];

impl Default for HarnessConfig {
    fn default() -> HarnessConfig {
        let mut classes = BTreeMap::new();
        let mut symmetry = SymmetryConfig::new();

        classes.insert("cube".to_string(), MeshSource::Cube { size: 0.08 });
        symmetry.insert(
            "cube".to_string(),
            SymmetryConfigEntry::new(SymmetryKind::TwoPlanes, vec![X, Y]),
        );

        classes.insert(
            "cuboid".to_string(),
            MeshSource::Cuboid {
                extent: [0.06, 0.14, 0.10],
            },
        );
        symmetry.insert(
            "cuboid".to_string(),
            SymmetryConfigEntry::new(SymmetryKind::TwoPlanes, vec![X, Y]),
        );

        classes.insert(
            "cylinder".to_string(),
            MeshSource::Cylinder {
                radius: 0.035,
                height: 0.12,
                segments: 48,
            },
        );
        symmetry.insert(
            "cylinder".to_string(),
            SymmetryConfigEntry::new(SymmetryKind::Axis, vec![Z]),
        );

        classes.insert(
            "sphere".to_string(),
            MeshSource::Sphere {
                radius: 0.05,
                level: 2,
            },
        );
        symmetry.insert(
            "sphere".to_string(),
            SymmetryConfigEntry::new(SymmetryKind::AxisPlane, vec![Z, X]),
        );

        classes.insert(
            "wedge".to_string(),
            MeshSource::Wedge {
                extent: [0.08, 0.10, 0.06],
            },
        );
        symmetry.insert(
            "wedge".to_string(),
            SymmetryConfigEntry::new(SymmetryKind::None, Vec::new()),
        );

        HarnessConfig {
            camera: CameraIntrinsics::new(1600.0, 320.0, 240.0, 640.0, 480.0)
                .expect("built-in camera is valid"),
            mask_resolution: 64,
            classes,
            symmetry,
        }
    }
}

impl HarnessConfig {
    /// Built-in config, or the JSON file if one was given.
    pub fn load(path: Option<&Path>) -> Result<HarnessConfig> {
        let cfg = match path {
            None => HarnessConfig::default(),
            Some(p) => {
                let text = fs::read_to_string(p).map_err(|e| Error::io_at(p, e))?;
                serde_json::from_str(&text)?
            }
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        self.camera.validate()?;
        if self.classes.is_empty() {
            return Err(Error::Schema("config has no classes".to_string()));
        }
        for class in self.classes.keys() {
            let entry = self.symmetry.get(class).ok_or_else(|| {
                Error::SymmetryConfig(format!("class '{class}' has no symmetry entry"))
            })?;
            entry.to_group()?;
        }
        Ok(())
    }
}
