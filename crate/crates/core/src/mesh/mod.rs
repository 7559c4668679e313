//! Triangle meshes: storage, OBJ I/O and built-in primitives.

pub mod obj;
pub mod primitives;

pub use obj::read_obj;
pub use primitives::{cube, cuboid, cylinder, icosphere, icosphere_points, wedge};

use crate::error::{Error, Result};
use crate::geometry::{Quaternion, Vec3};

/// Indexed triangle mesh in its own model frame.
///
/// Invariants enforced at construction: at least one vertex and one
/// triangle, all coordinates finite, all indices in range.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh {
    vertices: Vec<Vec3>,
    triangles: Vec<[u32; 3]>,
}

impl TriangleMesh {
    pub fn new(vertices: Vec<Vec3>, triangles: Vec<[u32; 3]>) -> Result<TriangleMesh> {
        if vertices.is_empty() {
            return Err(Error::Mesh("mesh has no vertices".into()));
        }
        if triangles.is_empty() {
            return Err(Error::Mesh("mesh has no triangles".into()));
        }
        for v in &vertices {
            if !(v.x.is_finite() && v.y.is_finite() && v.z.is_finite()) {
                return Err(Error::Mesh("non-finite vertex coordinate".into()));
            }
        }
        let n = vertices.len() as u32;
        for t in &triangles {
            if t.iter().any(|&i| i >= n) {
                return Err(Error::Mesh(format!(
                    "triangle index out of range: {t:?} with {n} vertices"
                )));
            }
        }
        Ok(TriangleMesh {
            vertices,
            triangles,
        })
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    /// Axis-aligned bounding box as `(min, max)` corners.
    pub fn aabb(&self) -> (Vec3, Vec3) {
        let mut lo = self.vertices[0];
        let mut hi = self.vertices[0];
        for v in &self.vertices[1..] {
            lo.x = lo.x.min(v.x);
            lo.y = lo.y.min(v.y);
            lo.z = lo.z.min(v.z);
            hi.x = hi.x.max(v.x);
            hi.y = hi.y.max(v.y);
            hi.z = hi.z.max(v.z);
        }
        (lo, hi)
    }

    /// Bounding-box side lengths `(w, h, d)`.
    pub fn extent(&self) -> Vec3 {
        let (lo, hi) = self.aabb();
        hi - lo
    }

    /// Translate so the bounding-box center sits at the origin.
    pub fn centered(&self) -> TriangleMesh {
        let (lo, hi) = self.aabb();
        let c = (lo + hi) * 0.5;
        TriangleMesh {
            vertices: self.vertices.iter().map(|&v| v - c).collect(),
            triangles: self.triangles.clone(),
        }
    }

    /// Rotate every vertex by `q` (model-frame alignment).
    pub fn rotated(&self, q: Quaternion) -> TriangleMesh {
        TriangleMesh {
            vertices: self.vertices.iter().map(|&v| q.rotate(v)).collect(),
            triangles: self.triangles.clone(),
        }
    }

    /// Largest vertex distance from the model origin.
    pub fn bounding_radius(&self) -> f64 {
        self.vertices
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }
}
