//! Built-in test meshes. All primitives are centered on the origin (their
//! bounding-box center) and closed (every edge shared by exactly two
//! triangles).

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::mesh::TriangleMesh;
use std::collections::BTreeMap;

/// Axis-aligned box with side lengths `w`, `h`, `d` along x, y, z.
pub fn cuboid(w: f64, h: f64, d: f64) -> Result<TriangleMesh> {
    if !(w > 0.0 && h > 0.0 && d > 0.0) {
        return Err(Error::InvalidExtent);
    }
    let (x, y, z) = (w * 0.5, h * 0.5, d * 0.5);
    let vertices = vec![
        Vec3::new(-x, -y, -z),
        Vec3::new(x, -y, -z),
        Vec3::new(x, y, -z),
        Vec3::new(-x, y, -z),
        Vec3::new(-x, -y, z),
        Vec3::new(x, -y, z),
        Vec3::new(x, y, z),
        Vec3::new(-x, y, z),
    ];
    let triangles = vec![
        [0, 2, 1],
        [0, 3, 2], // z = -d/2
        [4, 5, 6],
        [4, 6, 7], // z = +d/2
        [0, 1, 5],
        [0, 5, 4], // y = -h/2
        [3, 7, 6],
        [3, 6, 2], // y = +h/2
        [0, 4, 7],
        [0, 7, 3], // x = -w/2
        [1, 2, 6],
        [1, 6, 5], // x = +w/2
    ];
    TriangleMesh::new(vertices, triangles)
}

/// Cube with side `s`.
pub fn cube(s: f64) -> Result<TriangleMesh> {
    cuboid(s, s, s)
}

/// Cylinder with axis along z.
pub fn cylinder(radius: f64, height: f64, segments: usize) -> Result<TriangleMesh> {
    if !(radius > 0.0 && height > 0.0) {
        return Err(Error::InvalidExtent);
    }
    if segments < 3 {
        return Err(Error::Mesh(format!(
            "cylinder needs at least 3 segments, got {segments}"
        )));
    }
    let n = segments as u32;
    let hz = height * 0.5;
    let mut vertices = Vec::with_capacity(segments * 2 + 2);
    for &ring_z in &[-hz, hz] {
        for i in 0..segments {
            let a = std::f64::consts::TAU * i as f64 / segments as f64;
            vertices.push(Vec3::new(radius * a.cos(), radius * a.sin(), ring_z));
        }
    }
    vertices.push(Vec3::new(0.0, 0.0, -hz)); // bottom center = 2n
    vertices.push(Vec3::new(0.0, 0.0, hz)); // top center = 2n + 1

    let mut triangles = Vec::with_capacity(segments * 4);
    for i in 0..n {
        let j = (i + 1) % n;
        // side quad
        triangles.push([i, j, n + i]);
        triangles.push([j, n + j, n + i]);
        // caps
        triangles.push([2 * n, j, i]);
        triangles.push([2 * n + 1, n + i, n + j]);
    }
    TriangleMesh::new(vertices, triangles)
}

/// Icosphere: icosahedron subdivided `level` times, vertices projected onto
/// the sphere of the given radius. Vertex count is `10 * 4^level + 2`.
pub fn icosphere(radius: f64, level: usize) -> Result<TriangleMesh> {
    if !(radius > 0.0) {
        return Err(Error::InvalidExtent);
    }
    let (points, faces) = icosphere_grid(level);
    let vertices = points.into_iter().map(|p| p * radius).collect();
    TriangleMesh::new(vertices, faces)
}

/// Unit icosphere vertex directions (also used as a viewpoint grid: they are
/// near-uniformly spread over the sphere).
pub fn icosphere_points(level: usize) -> Vec<Vec3> {
    icosphere_grid(level).0
}

fn icosphere_grid(level: usize) -> (Vec<Vec3>, Vec<[u32; 3]>) {
    let phi = (1.0 + 5.0_f64.sqrt()) / 2.0;
    let mut points: Vec<Vec3> = [
        (-1.0, phi, 0.0),
        (1.0, phi, 0.0),
        (-1.0, -phi, 0.0),
        (1.0, -phi, 0.0),
        (0.0, -1.0, phi),
        (0.0, 1.0, phi),
        (0.0, -1.0, -phi),
        (0.0, 1.0, -phi),
        (phi, 0.0, -1.0),
        (phi, 0.0, 1.0),
        (-phi, 0.0, -1.0),
        (-phi, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| Vec3::new(x, y, z).normalized())
    .collect();

    let mut faces: Vec<[u32; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];

    for _ in 0..level {
        let mut midpoint: BTreeMap<(u32, u32), u32> = BTreeMap::new();
        let mut next = Vec::with_capacity(faces.len() * 4);
        for f in &faces {
            let mut mid = [0u32; 3];
            for e in 0..3 {
                let (a, b) = (f[e], f[(e + 1) % 3]);
                let key = (a.min(b), a.max(b));
                mid[e] = *midpoint.entry(key).or_insert_with(|| {
                    let m = ((points[a as usize] + points[b as usize]) * 0.5).normalized();
                    points.push(m);
                    (points.len() - 1) as u32
                });
            }
            next.push([f[0], mid[0], mid[2]]);
            next.push([f[1], mid[1], mid[0]]);
            next.push([f[2], mid[2], mid[1]]);
            next.push([mid[0], mid[1], mid[2]]);
        }
        faces = next;
    }
    (points, faces)
}

/// Right triangular prism ("wedge"): the triangle `(0,0) (w,0) (0,h)` in the
/// xy plane extruded by `d` along z, then centered. Deliberately has no
/// silhouette symmetry.
pub fn wedge(w: f64, h: f64, d: f64) -> Result<TriangleMesh> {
    if !(w > 0.0 && h > 0.0 && d > 0.0) {
        return Err(Error::InvalidExtent);
    }
    let c = Vec3::new(w * 0.5, h * 0.5, 0.0);
    let hz = d * 0.5;
    let base = [
        Vec3::new(0.0, 0.0, -hz),
        Vec3::new(w, 0.0, -hz),
        Vec3::new(0.0, h, -hz),
        Vec3::new(0.0, 0.0, hz),
        Vec3::new(w, 0.0, hz),
        Vec3::new(0.0, h, hz),
    ];
    let vertices = base.iter().map(|&v| v - c).collect();
    let triangles = vec![
        [0, 2, 1], // back cap
        [3, 4, 5], // front cap
        [0, 1, 4],
        [0, 4, 3], // y = 0 side
        [1, 2, 5],
        [1, 5, 4], // hypotenuse side
        [2, 0, 3],
        [2, 3, 5], // x = 0 side
    ];
    TriangleMesh::new(vertices, triangles)
}
