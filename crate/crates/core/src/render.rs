//! Perspective mesh rendering: canonical render distance, z-buffer depth
//! maps and binary silhouettes.
//!
//! Rasterization rules, chosen so results are exactly reproducible:
//!
//! * a pixel is covered when its center lies inside the projected triangle;
//! * centers exactly on an edge follow the top-left fill rule, so triangles
//!   sharing an edge claim each boundary pixel exactly once;
//! * triangles with any vertex at depth `z <= MIN_DEPTH` are skipped
//!   (no near-plane clipping — callers keep geometry in front of the
//!   camera);
//! * no backface culling, and depth is perspective-correct (interpolated
//!   `1/z`), so overlapping bodies resolve by true nearest surface.
//!
//! Silhouettes are rasterized at `SUPERSAMPLE` times the mask resolution and
//! reduced by block coverage (a mask cell turns on when at least half of its
//! subpixels are covered).

use crate::error::{Error, Result};
use crate::geometry::{CameraIntrinsics, Quaternion, RigidTransform, Roi, Vec3};
use crate::mask::SilhouetteMask;
use crate::mesh::TriangleMesh;

/// Safety margin applied to the object's bounding sphere when computing the
/// canonical render distance.
pub const FIT_MARGIN: f64 = 1.05;

/// Subpixel factor for silhouette rasterization (64-cell masks are rendered
/// on a 256-pixel grid).
pub const SUPERSAMPLE: usize = 4;

/// Triangles with a vertex closer than this are skipped instead of clipped.
pub const MIN_DEPTH: f64 = 1e-6;

/// Canonical distance at which an object with the given bounding-box extent
/// fills the camera's minimum field of view with a safety margin:
/// `FIT_MARGIN * sqrt(w^2 + h^2 + d^2) / (2 tan(fov / 2))`.
///
/// The margin keeps the bounding sphere of the box inside the view cone for
/// any orientation, assuming the model origin is at the box center (all
/// built-in primitives are). For very wide fields of view (roughly 35
/// degrees and up) the margin no longer compensates the cone's slant and
/// grazing orientations may touch the frame edge; the default cameras in
/// this crate stay well below that.
pub fn render_distance(extent: Vec3, min_fov: f64) -> Result<f64> {
    if !(extent.x > 0.0 && extent.y > 0.0 && extent.z > 0.0) {
        return Err(Error::InvalidExtent);
    }
    if !(min_fov > 0.0 && min_fov < std::f64::consts::PI) {
        return Err(Error::InvalidFov(min_fov));
    }
    let diagonal = extent.norm();
    Ok(FIT_MARGIN * diagonal / (2.0 * (min_fov * 0.5).tan()))
}

// ---------------------------------------------------------------------------
// Grids and depth maps
// ---------------------------------------------------------------------------

/// A uniform pixel grid embedded in image coordinates: cell `(i, j)` covers
/// the square starting at `origin + (i, j) * cell` with side `cell`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub origin_x: f64,
    pub origin_y: f64,
    /// Image pixels per grid cell.
    pub cell: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    /// One grid cell per image pixel.
    pub fn full_image(k: &CameraIntrinsics) -> GridSpec {
        GridSpec {
            origin_x: 0.0,
            origin_y: 0.0,
            cell: 1.0,
            nx: k.width as usize,
            ny: k.height as usize,
        }
    }

    /// The largest centered square of the image (side `min(width, height)`,
    /// centered on the principal point), sampled at `res x res`.
    pub fn central_square(k: &CameraIntrinsics, res: usize) -> GridSpec {
        let side = k.min_dim();
        GridSpec {
            origin_x: k.cx - side * 0.5,
            origin_y: k.cy - side * 0.5,
            cell: side / res as f64,
            nx: res,
            ny: res,
        }
    }

    /// Square window of `side` image pixels centered at `(cu, cv)`.
    pub fn window(cu: f64, cv: f64, side: f64, res: usize) -> GridSpec {
        GridSpec {
            origin_x: cu - side * 0.5,
            origin_y: cv - side * 0.5,
            cell: side / res as f64,
            nx: res,
            ny: res,
        }
    }

    /// Image coordinates of the center of cell `(ix, iy)`.
    pub fn center_of(&self, ix: usize, iy: usize) -> (f64, f64) {
        (
            self.origin_x + (ix as f64 + 0.5) * self.cell,
            self.origin_y + (iy as f64 + 0.5) * self.cell,
        )
    }

    /// Continuous grid coordinates of an image point.
    pub fn grid_coords(&self, u: f64, v: f64) -> (f64, f64) {
        ((u - self.origin_x) / self.cell, (v - self.origin_y) / self.cell)
    }
}

/// Z-buffer over a [`GridSpec`]; `f64::INFINITY` marks background.
#[derive(Debug, Clone)]
pub struct DepthMap {
    grid: GridSpec,
    data: Vec<f64>,
}

impl DepthMap {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    #[inline]
    pub fn get(&self, ix: usize, iy: usize) -> f64 {
        self.data[iy * self.grid.nx + ix]
    }

    #[inline]
    pub fn is_occupied(&self, ix: usize, iy: usize) -> bool {
        self.get(ix, iy).is_finite()
    }

    /// Nearest-cell depth at an image coordinate; `INFINITY` outside the
    /// grid or on background.
    pub fn depth_at_image(&self, u: f64, v: f64) -> f64 {
        let (gx, gy) = self.grid.grid_coords(u, v);
        let ix = gx.floor();
        let iy = gy.floor();
        if ix < 0.0 || iy < 0.0 || ix >= self.grid.nx as f64 || iy >= self.grid.ny as f64 {
            return f64::INFINITY;
        }
        self.get(ix as usize, iy as usize)
    }

    /// Occupancy as a binary mask. The grid must be square.
    pub fn occupancy(&self) -> Result<SilhouetteMask> {
        if self.grid.nx != self.grid.ny {
            return Err(Error::ResolutionMismatch {
                a: self.grid.nx,
                b: self.grid.ny,
            });
        }
        SilhouetteMask::check_resolution(self.grid.nx)?;
        let mut m = SilhouetteMask::new(self.grid.nx);
        for y in 0..self.grid.ny {
            for x in 0..self.grid.nx {
                if self.is_occupied(x, y) {
                    m.set(x, y, true);
                }
            }
        }
        Ok(m)
    }
}

// ---------------------------------------------------------------------------
// Rasterizer
// ---------------------------------------------------------------------------

/// Render one or more posed meshes into a shared z-buffer on `grid`.
pub fn render_depth_on(
    k: &CameraIntrinsics,
    objects: &[(&TriangleMesh, RigidTransform)],
    grid: &GridSpec,
) -> DepthMap {
    let mut depth = DepthMap {
        grid: *grid,
        data: vec![f64::INFINITY; grid.nx * grid.ny],
    };
    for (mesh, pose) in objects {
        rasterize_into(k, mesh, pose, &mut depth);
    }
    depth
}

/// Render a single posed mesh over the full image, one cell per pixel.
pub fn render_depth(
    mesh: &TriangleMesh,
    pose: &RigidTransform,
    k: &CameraIntrinsics,
) -> Result<DepthMap> {
    k.validate()?;
    Ok(render_depth_on(k, &[(mesh, *pose)], &GridSpec::full_image(k)))
}

fn rasterize_into(
    k: &CameraIntrinsics,
    mesh: &TriangleMesh,
    pose: &RigidTransform,
    depth: &mut DepthMap,
) {
    let grid = depth.grid;
    // Project every vertex once. `None` marks vertices at or behind the
    // near threshold; triangles touching them are skipped.
    let projected: Vec<Option<(f64, f64, f64)>> = mesh
        .vertices()
        .iter()
        .map(|&v| {
            let p = pose.apply(v);
            if p.z <= MIN_DEPTH {
                None
            } else {
                let u = k.f * p.x / p.z + k.cx;
                let v_img = k.f * p.y / p.z + k.cy;
                let (gx, gy) = grid.grid_coords(u, v_img);
                Some((gx, gy, p.z))
            }
        })
        .collect();

    for tri in mesh.triangles() {
        let (a, b, c) = match (
            projected[tri[0] as usize],
            projected[tri[1] as usize],
            projected[tri[2] as usize],
        ) {
            (Some(a), Some(b), Some(c)) => (a, b, c),
            _ => continue,
        };
        fill_triangle(a, b, c, depth);
    }
}

#[inline]
fn edge(ax: f64, ay: f64, bx: f64, by: f64, px: f64, py: f64) -> f64 {
    (px - ax) * (by - ay) - (py - ay) * (bx - ax)
}

/// A boundary pixel (edge value exactly zero) belongs to the triangle only
/// for "top" and "left" edges, defined for our orientation as: left = edge
/// pointing down (`dy > 0`), top = horizontal edge pointing left (`dx < 0`).
/// A shared edge appears with opposite direction in the neighbor, so exactly
/// one of the two triangles claims it.
#[inline]
fn edge_accepts(e: f64, dx: f64, dy: f64) -> bool {
    if e > 0.0 {
        return true;
    }
    if e < 0.0 {
        return false;
    }
    dy > 0.0 || (dy == 0.0 && dx < 0.0)
}

fn fill_triangle(
    a: (f64, f64, f64),
    mut b: (f64, f64, f64),
    mut c: (f64, f64, f64),
    depth: &mut DepthMap,
) {
    let grid = depth.grid;
    // Orient so the doubled signed area is positive; degenerate (zero-area)
    // projections contribute nothing.
    let mut area2 = edge(a.0, a.1, b.0, b.1, c.0, c.1);
    if area2 == 0.0 {
        return;
    }
    if area2 < 0.0 {
        std::mem::swap(&mut b, &mut c);
        area2 = -area2;
    }

    let min_x = a.0.min(b.0).min(c.0);
    let max_x = a.0.max(b.0).max(c.0);
    let min_y = a.1.min(b.1).min(c.1);
    let max_y = a.1.max(b.1).max(c.1);
    // Pixel centers sit at integer + 0.5; clamp the covered center range to
    // the grid.
    let x0 = (min_x - 0.5).ceil().max(0.0) as usize;
    let x1 = ((max_x - 0.5).floor().min(grid.nx as f64 - 1.0)) as isize;
    let y0 = (min_y - 0.5).ceil().max(0.0) as usize;
    let y1 = ((max_y - 0.5).floor().min(grid.ny as f64 - 1.0)) as isize;
    if x1 < x0 as isize || y1 < y0 as isize {
        return;
    }
    let (x1, y1) = (x1 as usize, y1 as usize);

    let inv_za = 1.0 / a.2;
    let inv_zb = 1.0 / b.2;
    let inv_zc = 1.0 / c.2;
    let inv_area = 1.0 / area2;

    for iy in y0..=y1 {
        let py = iy as f64 + 0.5;
        for ix in x0..=x1 {
            let px = ix as f64 + 0.5;
            let e_bc = edge(b.0, b.1, c.0, c.1, px, py);
            let e_ca = edge(c.0, c.1, a.0, a.1, px, py);
            let e_ab = edge(a.0, a.1, b.0, b.1, px, py);
            if !edge_accepts(e_bc, c.0 - b.0, c.1 - b.1)
                || !edge_accepts(e_ca, a.0 - c.0, a.1 - c.1)
                || !edge_accepts(e_ab, b.0 - a.0, b.1 - a.1)
            {
                continue;
            }
            // Screen-space barycentric weights interpolate 1/z exactly for
            // a planar triangle.
            let l_a = e_bc * inv_area;
            let l_b = e_ca * inv_area;
            let l_c = e_ab * inv_area;
            let inv_z = l_a * inv_za + l_b * inv_zb + l_c * inv_zc;
            let z = 1.0 / inv_z;
            let idx = iy * grid.nx + ix;
            if z < depth.data[idx] {
                depth.data[idx] = z;
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Silhouettes
// ---------------------------------------------------------------------------

/// Reduce a supersampled square occupancy field of side `n` by `factor`:
/// an output cell is foreground when at least half of its `factor^2`
/// subpixels satisfy `occupied`.
pub(crate) fn downsample_occupancy(
    n: usize,
    factor: usize,
    occupied: impl Fn(usize, usize) -> bool,
) -> Result<SilhouetteMask> {
    if factor == 0 || n % factor != 0 {
        return Err(Error::ResolutionMismatch { a: n, b: factor });
    }
    let res = n / factor;
    SilhouetteMask::check_resolution(res)?;
    let mut mask = SilhouetteMask::new(res);
    let threshold = factor * factor; // compare 2 * count >= factor^2
    for my in 0..res {
        for mx in 0..res {
            let mut count = 0usize;
            for sy in 0..factor {
                for sx in 0..factor {
                    if occupied(mx * factor + sx, my * factor + sy) {
                        count += 1;
                    }
                }
            }
            if 2 * count >= threshold {
                mask.set(mx, my, true);
            }
        }
    }
    Ok(mask)
}

/// [`downsample_occupancy`] over a depth buffer's finite cells.
pub(crate) fn downsample_coverage(depth: &DepthMap, factor: usize) -> Result<SilhouetteMask> {
    let grid = depth.grid();
    if grid.nx != grid.ny {
        return Err(Error::ResolutionMismatch {
            a: grid.nx,
            b: grid.ny,
        });
    }
    downsample_occupancy(grid.nx, factor, |x, y| depth.is_occupied(x, y))
}

/// Binary silhouette of a mesh placed on the optical axis at `distance`,
/// over the camera's central square, supersampled by [`SUPERSAMPLE`] and
/// reduced to `resolution`.
pub fn rasterize_silhouette(
    mesh: &TriangleMesh,
    orientation: Quaternion,
    k: &CameraIntrinsics,
    distance: f64,
    resolution: usize,
) -> Result<SilhouetteMask> {
    let pose = RigidTransform::new(orientation, Vec3::new(0.0, 0.0, distance));
    silhouette_in_square(mesh, &pose, k, resolution)
}

/// Silhouette of an arbitrarily posed mesh over the camera's central square.
pub fn silhouette_in_square(
    mesh: &TriangleMesh,
    pose: &RigidTransform,
    k: &CameraIntrinsics,
    resolution: usize,
) -> Result<SilhouetteMask> {
    k.validate()?;
    SilhouetteMask::check_resolution(resolution)?;
    if pose.translation.z <= 0.0 {
        return Err(Error::InvalidDistance(pose.translation.z));
    }
    let grid = GridSpec::central_square(k, resolution * SUPERSAMPLE);
    let depth = render_depth_on(k, &[(mesh, *pose)], &grid);
    downsample_coverage(&depth, SUPERSAMPLE)
}

/// Silhouette of a posed mesh over an arbitrary square window (same
/// supersampling rules as [`rasterize_silhouette`]).
pub fn silhouette_in_window(
    mesh: &TriangleMesh,
    pose: &RigidTransform,
    k: &CameraIntrinsics,
    window: &GridSpec,
) -> Result<SilhouetteMask> {
    k.validate()?;
    if window.nx != window.ny {
        return Err(Error::ResolutionMismatch {
            a: window.nx,
            b: window.ny,
        });
    }
    SilhouetteMask::check_resolution(window.nx)?;
    let fine = GridSpec {
        origin_x: window.origin_x,
        origin_y: window.origin_y,
        cell: window.cell / SUPERSAMPLE as f64,
        nx: window.nx * SUPERSAMPLE,
        ny: window.ny * SUPERSAMPLE,
    };
    let depth = render_depth_on(k, &[(mesh, *pose)], &fine);
    downsample_coverage(&depth, SUPERSAMPLE)
}

/// Tight ROI: the bounding box of the projected mesh vertices. Exact for
/// perspective projection because the image of a segment is a segment, so
/// extremes occur at vertices. Fails if any vertex is at or behind the
/// camera plane.
pub fn tight_roi(mesh: &TriangleMesh, pose: &RigidTransform, k: &CameraIntrinsics) -> Result<Roi> {
    let mut min_u = f64::INFINITY;
    let mut max_u = f64::NEG_INFINITY;
    let mut min_v = f64::INFINITY;
    let mut max_v = f64::NEG_INFINITY;
    for &v in mesh.vertices() {
        let (u, w) = k.project(pose.apply(v))?;
        min_u = min_u.min(u);
        max_u = max_u.max(u);
        min_v = min_v.min(w);
        max_v = max_v.max(w);
    }
    Roi::new(min_u, min_v, max_u - min_u, max_v - min_v)
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
