//! Viewpoint banks: precomputed silhouette templates over a grid of
//! orientations, all rendered at one class-specific distance.
//!
//! Two grids are provided. The classic coarse grid sweeps azimuth at a
//! fixed step crossed with a short list of elevations (the default being
//! 6 azimuths × 2 elevations = 12 views). The dense grid places viewing
//! directions on a subdivided icosahedron and crosses each direction with
//! evenly spaced in-plane spins, which is what the template matcher wants:
//! level 2 with 24 spins gives 162 × 24 = 3888 templates at roughly 15°
//! angular pitch in both factors.
//!
//! A bank persists as a JSON manifest plus one PGM per entry, all paths
//! relative to the manifest, so a bank directory can be moved wholesale.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::geometry::{CameraIntrinsics, Quaternion, Vec3};
use crate::mask::SilhouetteMask;
use crate::mesh::{icosphere_points, TriangleMesh};
use crate::render;

/// One template: the orientation it was rendered at and the result.
#[derive(Debug, Clone)]
pub struct BankEntry {
    pub orientation: Quaternion,
    pub mask: SilhouetteMask,
}

/// Immutable set of silhouette templates for one object class.
#[derive(Debug, Clone)]
pub struct ViewpointBank {
    class_id: String,
    render_distance: f64,
    resolution: usize,
    entries: Vec<BankEntry>,
}

impl ViewpointBank {
    /// Validating constructor: non-empty, uniform resolution, unit
    /// quaternions (renormalized), positive distance.
    pub fn new(
        class_id: impl Into<String>,
        render_distance: f64,
        resolution: usize,
        entries: Vec<BankEntry>,
    ) -> Result<ViewpointBank> {
        if entries.is_empty() {
            return Err(Error::EmptyBank);
        }
        if !(render_distance > 0.0 && render_distance.is_finite()) {
            return Err(Error::InvalidDistance(render_distance));
        }
        SilhouetteMask::check_resolution(resolution)?;
        let entries = entries
            .into_iter()
            .map(|e| {
                if e.mask.resolution() != resolution {
                    return Err(Error::ResolutionMismatch {
                        a: resolution,
                        b: e.mask.resolution(),
                    });
                }
                // Stored verbatim, not renormalized: renormalization is not
                // bit-stable, and save/load must round-trip exactly.
                if (e.orientation.norm() - 1.0).abs() > 1e-9 {
                    return Err(Error::Schema(format!(
                        "bank orientation is not unit norm: {:?}",
                        e.orientation
                    )));
                }
                Ok(e)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ViewpointBank {
            class_id: class_id.into(),
            render_distance,
            resolution,
            entries,
        })
    }

    pub fn class_id(&self) -> &str {
        &self.class_id
    }

    pub fn render_distance(&self) -> f64 {
        self.render_distance
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn entries(&self) -> &[BankEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Orientations for an azimuth/elevation sweep: `rot_x(elevation) *
/// rot_z(azimuth)`, elevations in the outer loop so the layout is
/// row-major in elevation.
pub fn azimuth_elevation_quats(
    azimuth_step_deg: f64,
    elevations_deg: &[f64],
) -> Result<Vec<Quaternion>> {
    if !(azimuth_step_deg > 0.0) || (360.0 / azimuth_step_deg).fract().abs() > 1e-9 {
        return Err(Error::BankGrid(azimuth_step_deg));
    }
    let n_azimuths = (360.0 / azimuth_step_deg).round() as usize;
    let mut quats = Vec::with_capacity(n_azimuths * elevations_deg.len());
    for &el in elevations_deg {
        let q_el = Quaternion::about_x(el.to_radians());
        for i in 0..n_azimuths {
            let az = (i as f64 * azimuth_step_deg).to_radians();
            quats.push(q_el * Quaternion::about_z(az));
        }
    }
    Ok(quats)
}

/// Orientations for the dense grid: one per (icosphere direction, in-plane
/// spin) pair. Each quaternion maps +z onto its direction; the spin factor
/// sweeps the remaining in-plane freedom.
pub fn icosphere_quats(level: usize, n_spins: usize) -> Vec<Quaternion> {
    assert!(n_spins >= 1, "need at least one spin per direction");
    let directions = icosphere_points(level);
    let mut quats = Vec::with_capacity(directions.len() * n_spins);
    for d in directions {
        let arc = Quaternion::from_shortest_arc(Vec3::Z, d);
        for j in 0..n_spins {
            let spin = 2.0 * std::f64::consts::PI * j as f64 / n_spins as f64;
            quats.push((arc * Quaternion::about_z(spin)).normalized());
        }
    }
    quats
}

/// Render one silhouette template per orientation, all at the distance
/// where the mesh just fits the frame in any orientation.
pub fn bank_from_orientations(
    mesh: &TriangleMesh,
    k: &CameraIntrinsics,
    class_id: &str,
    orientations: &[Quaternion],
    resolution: usize,
) -> Result<ViewpointBank> {
    k.validate()?;
    SilhouetteMask::check_resolution(resolution)?;
    if orientations.is_empty() {
        return Err(Error::EmptyBank);
    }
    let distance = render::render_distance(mesh.extent(), k.min_fov())?;
    let masks = exec::map_indices(orientations.len(), |i| {
        render::rasterize_silhouette(mesh, orientations[i], k, distance, resolution)
    });
    let entries = orientations
        .iter()
        .zip(masks)
        .map(|(&orientation, mask)| Ok(BankEntry { orientation, mask: mask? }))
        .collect::<Result<Vec<_>>>()?;
    ViewpointBank::new(class_id, distance, resolution, entries)
}

/// Azimuth/elevation bank (the 12-view default is `azimuth_step = 60`,
/// `elevations = [-30, 30]`).
pub fn generate_bank(
    mesh: &TriangleMesh,
    k: &CameraIntrinsics,
    class_id: &str,
    azimuth_step_deg: f64,
    elevations_deg: &[f64],
    resolution: usize,
) -> Result<ViewpointBank> {
    let quats = azimuth_elevation_quats(azimuth_step_deg, elevations_deg)?;
    bank_from_orientations(mesh, k, class_id, &quats, resolution)
}

/// Dense icosphere bank for template matching (level 2, 24 spins → 3888
/// entries).
pub fn generate_bank_icosphere(
    mesh: &TriangleMesh,
    k: &CameraIntrinsics,
    class_id: &str,
    level: usize,
    n_spins: usize,
    resolution: usize,
) -> Result<ViewpointBank> {
    let quats = icosphere_quats(level, n_spins);
    bank_from_orientations(mesh, k, class_id, &quats, resolution)
}

#[derive(Serialize, Deserialize)]
struct ManifestEntry {
    orientation: Quaternion,
    mask: String,
}

#[derive(Serialize, Deserialize)]
struct BankManifest {
    class_id: String,
    render_distance: f64,
    resolution: usize,
    entries: Vec<ManifestEntry>,
}

/// Write the bank into `dir` as `<class>_bank.json` plus one
/// `<class>_<index>.pgm` per entry (paths in the manifest are relative to
/// it). Returns the manifest path.
pub fn save_bank(bank: &ViewpointBank, dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io_at(dir, e))?;
    let mut entries = Vec::with_capacity(bank.len());
    for (i, entry) in bank.entries().iter().enumerate() {
        let name = format!("{}_{:04}.pgm", bank.class_id(), i);
        entry.mask.write_pgm(&dir.join(&name))?;
        entries.push(ManifestEntry {
            orientation: entry.orientation,
            mask: name,
        });
    }
    let manifest = BankManifest {
        class_id: bank.class_id().to_string(),
        render_distance: bank.render_distance(),
        resolution: bank.resolution(),
        entries,
    };
    let path = dir.join(format!("{}_bank.json", bank.class_id()));
    let mut json = serde_json::to_string_pretty(&manifest)?;
    json.push('\n');
    fs::write(&path, json).map_err(|e| Error::io_at(&path, e))?;
    Ok(path)
}

/// Load a bank from its manifest; mask paths resolve relative to the
/// manifest's directory.
pub fn load_bank(manifest_path: &Path) -> Result<ViewpointBank> {
    let text =
        fs::read_to_string(manifest_path).map_err(|e| Error::io_at(manifest_path, e))?;
    let manifest: BankManifest = serde_json::from_str(&text)?;
    let dir = manifest_path.parent().unwrap_or_else(|| Path::new("."));
    let entries = manifest
        .entries
        .into_iter()
        .map(|e| {
            let mask = SilhouetteMask::read_pgm(&dir.join(&e.mask))?;
            Ok(BankEntry {
                orientation: e.orientation,
                mask,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    ViewpointBank::new(
        manifest.class_id,
        manifest.render_distance,
        manifest.resolution,
        entries,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh;
    use approx::assert_abs_diff_eq;

    fn camera() -> CameraIntrinsics {
        CameraIntrinsics::new(1600.0, 320.0, 240.0, 640.0, 480.0).unwrap()
    }

    #[test]
    fn default_grid_has_twelve_views() {
        let quats = azimuth_elevation_quats(60.0, &[-30.0, 30.0]).unwrap();
        assert_eq!(quats.len(), 12);
    }

    #[test]
    fn single_and_dense_grid_counts() {
        assert_eq!(azimuth_elevation_quats(360.0, &[0.0]).unwrap().len(), 1);
        assert_eq!(
            azimuth_elevation_quats(30.0, &[-30.0, 0.0, 30.0]).unwrap().len(),
            36
        );
    }

    #[test]
    fn grid_rejects_step_not_dividing_full_turn() {
        assert!(azimuth_elevation_quats(50.0, &[0.0]).is_err());
        assert!(azimuth_elevation_quats(0.0, &[0.0]).is_err());
        assert!(azimuth_elevation_quats(-60.0, &[0.0]).is_err());
    }

    #[test]
    fn grid_first_entry_is_identity() {
        let quats = azimuth_elevation_quats(360.0, &[0.0]).unwrap();
        assert!(quats[0].angle_to(Quaternion::IDENTITY) < 1e-15);
    }

    #[test]
    fn grid_applies_elevation_after_azimuth() {
        // azimuth 90° about z sends x → y; elevation 30° about x then lifts
        // y out of the plane.
        let quats = azimuth_elevation_quats(90.0, &[30.0]).unwrap();
        let q = quats[1]; // azimuth index 1 = 90°
        let v = q.rotate(Vec3::X);
        let el = 30f64.to_radians();
        assert_abs_diff_eq!(v.x, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v.y, el.cos(), epsilon = 1e-15);
        assert_abs_diff_eq!(v.z, el.sin(), epsilon = 1e-15);
    }

    #[test]
    fn icosphere_grid_count_and_direction_property() {
        let quats = icosphere_quats(1, 8);
        assert_eq!(quats.len(), 42 * 8);
        let directions = icosphere_points(1);
        // Every orientation maps +z onto its generating direction, spins
        // notwithstanding.
        for (i, q) in quats.iter().enumerate() {
            let d = directions[i / 8];
            assert!((q.rotate(Vec3::Z) - d).norm() < 1e-12);
        }
    }

    #[test]
    fn dense_bank_size_matches_template_budget() {
        assert_eq!(icosphere_quats(2, 24).len(), 3888);
    }

    #[test]
    fn sphere_bank_views_are_nearly_orientation_invariant() {
        // A fine icosphere still has a polygonal rim, so views differ by a
        // pixel or two along the boundary — but no more than that.
        let ball = mesh::icosphere(0.05, 3).unwrap();
        let bank = generate_bank(&ball, &camera(), "ball", 60.0, &[-30.0, 30.0], 64).unwrap();
        assert_eq!(bank.len(), 12);
        let first = &bank.entries()[0].mask;
        assert!(!first.is_empty());
        for entry in bank.entries() {
            let (inter, union) = entry.mask.overlap_counts(first).unwrap();
            let iou = inter as f64 / union as f64;
            assert!(iou >= 0.97, "sphere views diverged: IoU {iou}");
        }
    }

    #[test]
    fn bank_generation_is_deterministic() {
        let cube = mesh::cube(0.08).unwrap();
        let a = generate_bank(&cube, &camera(), "cube", 120.0, &[0.0, 30.0], 64).unwrap();
        let b = generate_bank(&cube, &camera(), "cube", 120.0, &[0.0, 30.0], 64).unwrap();
        assert_eq!(a.len(), b.len());
        for (ea, eb) in a.entries().iter().zip(b.entries()) {
            assert_eq!(ea.orientation, eb.orientation);
            assert_eq!(ea.mask, eb.mask);
        }
    }

    #[test]
    fn save_load_round_trip_is_bit_exact() {
        let cube = mesh::cube(0.08).unwrap();
        let bank = generate_bank(&cube, &camera(), "cube", 90.0, &[-30.0, 30.0], 64).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let manifest = save_bank(&bank, dir.path()).unwrap();
        assert_eq!(manifest.file_name().unwrap(), "cube_bank.json");
        let back = load_bank(&manifest).unwrap();
        assert_eq!(back.class_id(), "cube");
        assert_eq!(back.resolution(), 64);
        assert_abs_diff_eq!(back.render_distance(), bank.render_distance());
        for (ea, eb) in bank.entries().iter().zip(back.entries()) {
            assert_eq!(ea.orientation, eb.orientation);
            assert_eq!(ea.mask, eb.mask);
        }
    }

    #[test]
    fn load_rejects_missing_masks_and_bad_metadata() {
        let cube = mesh::cube(0.08).unwrap();
        let bank = generate_bank(&cube, &camera(), "cube", 360.0, &[0.0], 64).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let manifest = save_bank(&bank, dir.path()).unwrap();

        // Manifest resolution disagreeing with the stored masks.
        let text = std::fs::read_to_string(&manifest).unwrap();
        std::fs::write(&manifest, text.replace("\"resolution\": 64", "\"resolution\": 32"))
            .unwrap();
        assert!(matches!(
            load_bank(&manifest),
            Err(Error::ResolutionMismatch { .. })
        ));

        // Missing mask file.
        std::fs::write(&manifest, &text).unwrap();
        std::fs::remove_file(dir.path().join("cube_0000.pgm")).unwrap();
        assert!(matches!(load_bank(&manifest), Err(Error::IoAt { .. })));
    }

    #[test]
    fn constructor_rejects_empty_and_mixed_banks() {
        assert!(matches!(
            ViewpointBank::new("x", 1.0, 64, Vec::new()),
            Err(Error::EmptyBank)
        ));
        let entries = vec![
            BankEntry {
                orientation: Quaternion::IDENTITY,
                mask: SilhouetteMask::new(64),
            },
            BankEntry {
                orientation: Quaternion::IDENTITY,
                mask: SilhouetteMask::new(32),
            },
        ];
        assert!(matches!(
            ViewpointBank::new("x", 1.0, 64, entries),
            Err(Error::ResolutionMismatch { .. })
        ));
    }
}
