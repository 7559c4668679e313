//! Synthetic scene/dataset generation: random but reproducible object
//! poses with ground-truth masks, ROIs, and translation codes, persisted
//! as a manifest plus per-scene JSON records and PGM masks.
//!
//! Every random quantity in scene `i` comes from an RNG stream derived
//! from `(seed, i)`, so the dataset is bit-identical across runs and
//! independent of how generation is scheduled across threads.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::codec::{self, TranslationCode};
use crate::error::{Error, Result};
use crate::exec;
use crate::geometry::{CameraIntrinsics, Quaternion, RigidTransform, Roi, Vec3};
use crate::mask::SilhouetteMask;
use crate::mesh::{self, TriangleMesh};
use crate::occlusion;
use crate::render;
use crate::sampling;
use crate::symmetry::{load_symmetry_config, save_symmetry_config, SymmetryConfig};

/// Maximum rejection-sampling attempts before a scene is skipped.
const MAX_ATTEMPTS: usize = 100;

/// Maximum angular offset of the target center from the optical axis,
/// radians. Keeps perspective keystone distortion small enough that the
/// centered-frame silhouette stays representative of the scene crop.
const MAX_ECCENTRICITY: f64 = 0.12;

/// Margin, in pixels, that a tight ROI must keep from the image border.
const ROI_BORDER_MARGIN: f64 = 2.0;

/// Recipe for an object's geometry. Built-in primitives cover the test
/// classes; `Obj` points at a mesh file relative to the dataset root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum MeshSource {
    Cube { size: f64 },
    Cuboid { extent: [f64; 3] },
    Cylinder { radius: f64, height: f64, segments: usize },
    Sphere { radius: f64, level: usize },
    Wedge { extent: [f64; 3] },
    Obj { path: String },
}

/// Instantiate a mesh source; `root` anchors relative OBJ paths.
pub fn build_mesh(source: &MeshSource, root: &Path) -> Result<TriangleMesh> {
    match source {
        MeshSource::Cube { size } => mesh::cube(*size),
        MeshSource::Cuboid { extent } => mesh::cuboid(extent[0], extent[1], extent[2]),
        MeshSource::Cylinder {
            radius,
            height,
            segments,
        } => mesh::cylinder(*radius, *height, *segments),
        MeshSource::Sphere { radius, level } => mesh::icosphere(*radius, *level),
        MeshSource::Wedge { extent } => mesh::wedge(extent[0], extent[1], extent[2]),
        MeshSource::Obj { path } => mesh::read_obj(&root.join(path)),
    }
}

/// One posed object in a scene. The target's `class_id` names a dataset
/// class; occluders use the reserved id `"occluder"` and carry their own
/// geometry either way.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SceneObject {
    pub class_id: String,
    pub mesh: MeshSource,
    pub orientation: Quaternion,
    pub translation: Vec3,
}

impl SceneObject {
    pub fn pose(&self) -> RigidTransform {
        RigidTransform::new(self.orientation, self.translation)
    }
}

/// Ground truth for one synthetic frame. Mask paths are relative to the
/// dataset root.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SceneRecord {
    pub index: usize,
    pub objects: Vec<SceneObject>,
    /// Index of the target in `objects`.
    pub target: usize,
    /// Exact projected bounding box of the target.
    pub roi_tight: Roi,
    /// The tight box with Gaussian corner noise, standing in for an
    /// imperfect detector proposal.
    pub roi_jittered: Roi,
    /// Ground-truth translation code, encoded against `roi_tight`.
    pub code: TranslationCode,
    pub silhouette: String,
    pub occlusion: String,
    pub occluded_fraction: f64,
}

impl SceneRecord {
    pub fn target_object(&self) -> &SceneObject {
        &self.objects[self.target]
    }
}

/// Top-level dataset index: everything an evaluation needs, with all
/// paths relative to the manifest's directory.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub camera: CameraIntrinsics,
    pub mask_resolution: usize,
    pub classes: BTreeMap<String, MeshSource>,
    pub symmetry_config: String,
    /// Per-class viewpoint-bank manifest paths.
    pub banks: BTreeMap<String, String>,
    pub scenes: Vec<String>,
}

/// A manifest loaded together with the files it references, consistency
/// checked.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub root: PathBuf,
    pub manifest: DatasetManifest,
    pub symmetry: SymmetryConfig,
    pub scenes: Vec<SceneRecord>,
}

/// Knobs for [`generate_scenes`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SceneGenParams {
    pub n_scenes: usize,
    /// 0 disables occluders; otherwise roughly the fraction of the target
    /// silhouette an occluder should cover.
    pub occlusion_level: f64,
    pub seed: u64,
    /// Gaussian corner noise for the jittered ROI, pixels.
    pub roi_jitter_sigma: f64,
    pub mask_resolution: usize,
}

impl Default for SceneGenParams {
    fn default() -> SceneGenParams {
        SceneGenParams {
            n_scenes: 20,
            occlusion_level: 0.0,
            seed: 1,
            roi_jitter_sigma: 5.0,
            mask_resolution: 64,
        }
    }
}

/// Rectangle IoU between two ROIs (used to characterize jitter severity).
pub fn roi_iou(a: &Roi, b: &Roi) -> f64 {
    let ix = (a.bx + a.w).min(b.bx + b.w) - a.bx.max(b.bx);
    let iy = (a.by + a.h).min(b.by + b.h) - a.by.max(b.by);
    if ix <= 0.0 || iy <= 0.0 {
        return 0.0;
    }
    let inter = ix * iy;
    inter / (a.w * a.h + b.w * b.h - inter)
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box–Muller; two uniforms per draw keeps the stream layout simple.
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn jitter_roi(roi: &Roi, sigma: f64, rng: &mut ChaCha8Rng, k: &CameraIntrinsics) -> Roi {
    let x1 = roi.bx + sigma * gaussian(rng);
    let y1 = roi.by + sigma * gaussian(rng);
    let x2 = roi.bx + roi.w + sigma * gaussian(rng);
    let y2 = roi.by + roi.h + sigma * gaussian(rng);
    let bx = x1.min(x2).clamp(0.0, k.width - 4.0);
    let by = y1.min(y2).clamp(0.0, k.height - 4.0);
    let w = (x1.max(x2) - bx).clamp(4.0, k.width - bx);
    let h = (y1.max(y2) - by).clamp(4.0, k.height - by);
    Roi { bx, by, w, h }
}

/// A large thin plate whose right edge sits at image column `u_edge`
/// (depth `z`), occluding everything left of it.
fn occluder_plate(u_edge: f64, z: f64, k: &CameraIntrinsics, from_left: bool) -> SceneObject {
    let half = 5.0;
    let x_edge = (u_edge - k.cx) / k.f * z;
    let x_center = if from_left { x_edge - half } else { x_edge + half };
    SceneObject {
        class_id: "occluder".to_string(),
        mesh: MeshSource::Cuboid {
            extent: [2.0 * half, 2.0 * half, 0.001],
        },
        orientation: Quaternion::IDENTITY,
        translation: Vec3::new(x_center, 0.0, z),
    }
}

struct SceneAssets {
    record: SceneRecord,
    silhouette: SilhouetteMask,
    occlusion: SilhouetteMask,
}

fn try_generate_scene(
    index: usize,
    class_id: &str,
    mesh: &TriangleMesh,
    k: &CameraIntrinsics,
    params: &SceneGenParams,
    source: &MeshSource,
) -> Result<Option<SceneAssets>> {
    let r = render::render_distance(mesh.extent(), k.min_fov())?;
    let mut rng = sampling::stream_rng(params.seed, index as u64);

    for _attempt in 0..MAX_ATTEMPTS {
        let orientation = sampling::uniform_quaternion(&mut rng);
        let z = rng.gen_range(1.3..2.1) * r;
        let dx = rng.gen_range(-MAX_ECCENTRICITY..MAX_ECCENTRICITY);
        let dy = rng.gen_range(-MAX_ECCENTRICITY..MAX_ECCENTRICITY);
        let translation = Vec3::new(z * dx.tan(), z * dy.tan(), z);
        let pose = RigidTransform::new(orientation, translation);

        let roi_tight = match render::tight_roi(mesh, &pose, k) {
            Ok(roi) => roi,
            Err(_) => continue,
        };
        if roi_tight.bx < ROI_BORDER_MARGIN
            || roi_tight.by < ROI_BORDER_MARGIN
            || roi_tight.bx + roi_tight.w > k.width - ROI_BORDER_MARGIN
            || roi_tight.by + roi_tight.h > k.height - ROI_BORDER_MARGIN
        {
            continue;
        }

        let mut objects = vec![SceneObject {
            class_id: class_id.to_string(),
            mesh: source.clone(),
            orientation,
            translation,
        }];
        if params.occlusion_level > 0.0 {
            let from_left = rng.gen_bool(0.5);
            let cover = params.occlusion_level.min(0.9);
            let u_edge = if from_left {
                roi_tight.bx + cover * roi_tight.w
            } else {
                roi_tight.bx + (1.0 - cover) * roi_tight.w
            };
            let z_occ = rng.gen_range(0.45..0.75) * z;
            objects.push(occluder_plate(u_edge, z_occ, k, from_left));
        }

        let occluder_meshes = objects[1..]
            .iter()
            .map(|o| build_mesh(&o.mesh, Path::new(".")).map(|m| (m, o.pose())))
            .collect::<Result<Vec<_>>>()?;
        let occluder_refs: Vec<(&TriangleMesh, RigidTransform)> =
            occluder_meshes.iter().map(|(m, p)| (m, *p)).collect();
        let (silhouette, occlusion) =
            occlusion::scene_masks(mesh, &pose, &occluder_refs, k, params.mask_resolution)?;
        if silhouette.is_empty() {
            continue;
        }
        let occluded_fraction = occlusion::occluded_fraction(&silhouette, &occlusion)?;
        if params.occlusion_level > 0.0 {
            // The plate construction is approximate; accept a generous
            // band around the requested level but never total occlusion.
            let lo = 0.3 * params.occlusion_level;
            let hi = (1.7 * params.occlusion_level + 0.05).min(0.95);
            if occluded_fraction < lo || occluded_fraction > hi {
                continue;
            }
        }

        let code = match codec::encode_translation(translation, &roi_tight, k) {
            Ok(code) => code,
            Err(_) => continue,
        };
        let roi_jittered = jitter_roi(&roi_tight, params.roi_jitter_sigma, &mut rng, k);

        let record = SceneRecord {
            index,
            objects,
            target: 0,
            roi_tight,
            roi_jittered,
            code,
            silhouette: format!("scene_{index:04}_sil.pgm"),
            occlusion: format!("scene_{index:04}_occ.pgm"),
            occluded_fraction,
        };
        return Ok(Some(SceneAssets {
            record,
            silhouette,
            occlusion,
        }));
    }
    Ok(None)
}

/// Generate `params.n_scenes` scenes cycling through `classes`, write all
/// artifacts under `out_dir`, and return the manifest (also written as
/// `manifest.json`). Scenes that cannot be placed within the rejection
/// budget are skipped with a warning on stderr.
pub fn generate_scenes(
    classes: &BTreeMap<String, MeshSource>,
    symmetry: &SymmetryConfig,
    banks: &BTreeMap<String, String>,
    k: &CameraIntrinsics,
    params: &SceneGenParams,
    out_dir: &Path,
) -> Result<DatasetManifest> {
    k.validate()?;
    SilhouetteMask::check_resolution(params.mask_resolution)?;
    if classes.is_empty() {
        return Err(Error::Scene("no classes configured".to_string()));
    }
    for class in classes.keys() {
        if !symmetry.contains_key(class) {
            return Err(Error::SymmetryConfig(format!(
                "class '{class}' missing from symmetry config"
            )));
        }
    }
    fs::create_dir_all(out_dir).map_err(|e| Error::io_at(out_dir, e))?;

    let class_list: Vec<(&String, &MeshSource)> = classes.iter().collect();
    let meshes = class_list
        .iter()
        .map(|(_, source)| build_mesh(source, out_dir))
        .collect::<Result<Vec<_>>>()?;

    let results = exec::map_indices(params.n_scenes, |i| {
        let (class_id, source) = class_list[i % class_list.len()];
        try_generate_scene(i, class_id, &meshes[i % class_list.len()], k, params, source)
    });

    let mut scenes = Vec::new();
    for (i, result) in results.into_iter().enumerate() {
        match result? {
            Some(assets) => {
                assets
                    .silhouette
                    .write_pgm(&out_dir.join(&assets.record.silhouette))?;
                assets
                    .occlusion
                    .write_pgm(&out_dir.join(&assets.record.occlusion))?;
                let name = format!("scene_{i:04}.json");
                write_json(&out_dir.join(&name), &assets.record)?;
                scenes.push(name);
            }
            None => {
                eprintln!("warning: scene {i} unplaceable after {MAX_ATTEMPTS} attempts; skipped");
            }
        }
    }
    if scenes.is_empty() {
        return Err(Error::Scene("no scene could be placed".to_string()));
    }

    let symmetry_name = "symmetry.json";
    save_symmetry_config(&out_dir.join(symmetry_name), symmetry)?;

    let manifest = DatasetManifest {
        camera: *k,
        mask_resolution: params.mask_resolution,
        classes: classes.clone(),
        symmetry_config: symmetry_name.to_string(),
        banks: banks.clone(),
        scenes,
    };
    write_json(&out_dir.join("manifest.json"), &manifest)?;
    Ok(manifest)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io_at(path, e))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io_at(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

/// Load a dataset manifest and everything it references, verifying the
/// cross-file invariants: every scene parses, every class has a symmetry
/// entry, and recorded bank paths exist.
pub fn load_dataset(manifest_path: &Path) -> Result<Dataset> {
    let manifest: DatasetManifest = read_json(manifest_path)?;
    let root = manifest_path
        .parent()
        .unwrap_or_else(|| Path::new("."))
        .to_path_buf();
    manifest.camera.validate()?;

    let symmetry = load_symmetry_config(&root.join(&manifest.symmetry_config))?;
    for class in manifest.classes.keys() {
        if !symmetry.contains_key(class) {
            return Err(Error::SymmetryConfig(format!(
                "class '{class}' missing from symmetry config"
            )));
        }
    }
    for (class, bank_path) in &manifest.banks {
        if !manifest.classes.contains_key(class) {
            return Err(Error::UnknownClass(class.clone()));
        }
        let full = root.join(bank_path);
        if !full.exists() {
            return Err(Error::Scene(format!(
                "bank manifest for '{class}' not found at {}",
                full.display()
            )));
        }
    }

    let mut scenes = Vec::with_capacity(manifest.scenes.len());
    for name in &manifest.scenes {
        let record: SceneRecord = read_json(&root.join(name))?;
        let target = record
            .objects
            .get(record.target)
            .ok_or_else(|| Error::Scene(format!("{name}: target index out of range")))?;
        if !manifest.classes.contains_key(&target.class_id) {
            return Err(Error::UnknownClass(target.class_id.clone()));
        }
        for mask in [&record.silhouette, &record.occlusion] {
            if !root.join(mask).exists() {
                return Err(Error::Scene(format!("{name}: missing mask file {mask}")));
            }
        }
        scenes.push(record);
    }

    Ok(Dataset {
        root,
        manifest,
        symmetry,
        scenes,
    })
}
