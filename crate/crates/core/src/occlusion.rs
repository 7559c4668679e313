//! Occluded/unoccluded silhouette pairs for synthetic scenes, and
//! model-vertex visibility classification against the occlusion mask.
//!
//! Both masks live in the *centered frame*: the target rendered on the
//! optical axis at its class render distance with the apparent
//! orientation, exactly like a viewpoint-bank template. The unoccluded
//! silhouette is that render. The occlusion mask keeps only the portion
//! whose surface, re-projected to where the target actually sits in the
//! scene, is in frame and not covered by a nearer occluder — so it is a
//! pixel-wise subset of the silhouette by construction.
//!
//! Occluder depth is compared against an occluders-only z-buffer rather
//! than a full-scene one: the target never competes against its own
//! depth samples, which would otherwise z-fight on slanted surfaces, and
//! self-occlusion is out of scope throughout this module anyway.

use crate::codec;
use crate::error::{Error, Result};
use crate::geometry::{CameraIntrinsics, Quaternion, RigidTransform, Vec3};
use crate::mask::SilhouetteMask;
use crate::mesh::TriangleMesh;
use crate::render::{self, GridSpec, MIN_DEPTH, SUPERSAMPLE};

/// Same shape as a silhouette; semantics: only the visible (unoccluded)
/// part of the object is set.
pub type OcclusionMask = SilhouetteMask;

/// Slack when testing whether an occluder surface is strictly nearer than
/// a re-projected target point, meters. Occluders are distinct bodies, so
/// this only needs to absorb floating-point noise.
const DEPTH_EPS: f64 = 1e-6;

/// Per-vertex visibility against an occlusion mask.
#[derive(Debug, Clone)]
pub struct VisibilityReport {
    pub visible: Vec<bool>,
    /// Mean of `visible`.
    pub fraction: f64,
}

/// Render the centered-frame unoccluded silhouette and occlusion mask of
/// `target` posed inside a scene of occluders.
///
/// A target fully out of frame (or fully covered) simply yields an empty
/// occlusion mask.
pub fn scene_masks(
    target_mesh: &TriangleMesh,
    target_pose: &RigidTransform,
    occluders: &[(&TriangleMesh, RigidTransform)],
    k: &CameraIntrinsics,
    resolution: usize,
) -> Result<(SilhouetteMask, OcclusionMask)> {
    k.validate()?;
    SilhouetteMask::check_resolution(resolution)?;
    if target_pose.translation.z <= 0.0 {
        return Err(Error::BehindCamera {
            z: target_pose.translation.z,
        });
    }
    for (_, pose) in occluders {
        if pose.translation.z <= 0.0 {
            return Err(Error::BehindCamera { z: pose.translation.z });
        }
    }

    let r = render::render_distance(target_mesh.extent(), k.min_fov())?;
    let q_apparent = codec::true_to_apparent(target_pose.rotation, target_pose.translation);
    let centered = RigidTransform::new(q_apparent, Vec3::new(0.0, 0.0, r));

    let grid = GridSpec::central_square(k, resolution * SUPERSAMPLE);
    let depth = render::render_depth_on(k, &[(target_mesh, centered)], &grid);

    // Centered-frame camera point → object frame → scene-frame camera point.
    let to_scene = target_pose.compose(&centered.inverse());
    let occluder_depth = render::render_depth_on(k, occluders, &GridSpec::full_image(k));

    let visible = |ix: usize, iy: usize| -> bool {
        let z = depth.get(ix, iy);
        if !z.is_finite() {
            return false;
        }
        let (u, v) = grid.center_of(ix, iy);
        let p_scene = to_scene.apply(k.ray(u, v) * z);
        if p_scene.z <= MIN_DEPTH {
            return false;
        }
        let (su, sv) = match k.project(p_scene) {
            Ok(uv) => uv,
            Err(_) => return false,
        };
        if !k.contains(su, sv) {
            return false;
        }
        occluder_depth.depth_at_image(su, sv) >= p_scene.z - DEPTH_EPS
    };

    let silhouette =
        render::downsample_occupancy(grid.nx, SUPERSAMPLE, |x, y| depth.is_occupied(x, y))?;
    let occlusion = render::downsample_occupancy(grid.nx, SUPERSAMPLE, visible)?;
    Ok((silhouette, occlusion))
}

/// Fraction of the silhouette that is covered: `1 - |occ| / |sil|`, or 0
/// for an empty silhouette.
pub fn occluded_fraction(silhouette: &SilhouetteMask, occlusion: &OcclusionMask) -> Result<f64> {
    let (inter, _) = silhouette.overlap_counts(occlusion)?;
    let total = silhouette.count_ones();
    if total == 0 {
        return Ok(0.0);
    }
    Ok(1.0 - inter as f64 / total as f64)
}

/// Classify each mesh vertex as visible/occluded by projecting it through
/// `T = (q_apparent, (0, 0, r))` onto the occlusion mask, scaled to the
/// camera's central square. A vertex landing outside the mask counts as
/// occluded; self-occlusion is deliberately ignored (a convex object with
/// a clear view reports every vertex visible).
pub fn vertex_visibility(
    mesh: &TriangleMesh,
    q_apparent: Quaternion,
    occ: &OcclusionMask,
    k: &CameraIntrinsics,
    r: f64,
) -> Result<VisibilityReport> {
    k.validate()?;
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidDistance(r));
    }
    let t = RigidTransform::new(q_apparent, Vec3::new(0.0, 0.0, r));
    let res = occ.resolution();
    let square = GridSpec::central_square(k, res);
    let mut visible = Vec::with_capacity(mesh.vertices().len());
    for &v in mesh.vertices() {
        let p = t.apply(v);
        let vis = p.z > 0.0
            && k.project(p).is_ok_and(|(u, w)| {
                let (gx, gy) = square.grid_coords(u, w);
                let (ix, iy) = (gx.floor(), gy.floor());
                ix >= 0.0
                    && iy >= 0.0
                    && ix < res as f64
                    && iy < res as f64
                    && occ.get(ix as usize, iy as usize)
            });
        visible.push(vis);
    }
    let n_visible = visible.iter().filter(|&&b| b).count();
    let fraction = n_visible as f64 / visible.len() as f64;
    Ok(VisibilityReport { visible, fraction })
}
