//! Quaternions, rigid transforms, pinhole projection and ROIs.
//!
//! Conventions used throughout the crate:
//!
//! * Camera frame: x right, y down, z forward (into the scene). Only points
//!   with z > 0 are visible.
//! * Image coordinates: u right, v down, origin at the top-left corner;
//!   pixel (i, j) covers `[i, i+1) x [j, j+1)` so its center is
//!   `(i + 0.5, j + 0.5)`.
//! * Quaternions are stored `(w, x, y, z)` and multiply in the Hamilton
//!   convention: `a * b` rotates by `b` first, then `a`, matching
//!   `R(a * b) = R(a) · R(b)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

// ---------------------------------------------------------------------------
// Vec3
// ---------------------------------------------------------------------------

/// 3-vector (meters for positions, unitless for directions).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };
    pub const X: Vec3 = Vec3 {
        x: 1.0,
        y: 0.0,
        z: 0.0,
    };
    pub const Y: Vec3 = Vec3 {
        x: 0.0,
        y: 1.0,
        z: 0.0,
    };
    pub const Z: Vec3 = Vec3 {
        x: 0.0,
        y: 0.0,
        z: 1.0,
    };

    pub fn new(x: f64, y: f64, z: f64) -> Vec3 {
        Vec3 { x, y, z }
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3 {
            x: self.y * o.z - self.z * o.y,
            y: self.z * o.x - self.x * o.z,
            z: self.x * o.y - self.y * o.x,
        }
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// Unit vector in the same direction. Panics on the zero vector.
    pub fn normalized(self) -> Vec3 {
        let n = self.norm();
        assert!(n > 0.0, "cannot normalize the zero vector");
        self * (1.0 / n)
    }

    pub fn try_normalized(self) -> Option<Vec3> {
        let n = self.norm();
        if n > 0.0 {
            Some(self * (1.0 / n))
        } else {
            None
        }
    }

    /// Any unit vector perpendicular to `self` (which must be nonzero).
    /// Deterministic: picks the coordinate axis least aligned with `self`.
    pub fn any_perpendicular(self) -> Vec3 {
        let ax = self.x.abs();
        let ay = self.y.abs();
        let az = self.z.abs();
        let basis = if ax <= ay && ax <= az {
            Vec3::X
        } else if ay <= az {
            Vec3::Y
        } else {
            Vec3::Z
        };
        self.cross(basis).normalized()
    }
}

impl From<[f64; 3]> for Vec3 {
    fn from(a: [f64; 3]) -> Vec3 {
        Vec3::new(a[0], a[1], a[2])
    }
}

impl From<Vec3> for [f64; 3] {
    fn from(v: Vec3) -> [f64; 3] {
        [v.x, v.y, v.z]
    }
}

impl std::ops::Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl std::ops::Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl std::ops::Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl std::ops::Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

// ---------------------------------------------------------------------------
// Mat3
// ---------------------------------------------------------------------------

/// Row-major 3x3 matrix. Mostly an implementation detail of the renderer and
/// of rotation/quaternion conversions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat3(pub [[f64; 3]; 3]);

impl Mat3 {
    pub const IDENTITY: Mat3 = Mat3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    pub fn mul_vec(&self, v: Vec3) -> Vec3 {
        let m = &self.0;
        Vec3::new(
            m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z,
        )
    }

    pub fn mul(&self, o: &Mat3) -> Mat3 {
        let a = &self.0;
        let b = &o.0;
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
            }
        }
        Mat3(out)
    }

    pub fn transpose(&self) -> Mat3 {
        let m = &self.0;
        Mat3([
            [m[0][0], m[1][0], m[2][0]],
            [m[0][1], m[1][1], m[2][1]],
            [m[0][2], m[1][2], m[2][2]],
        ])
    }
}

// ---------------------------------------------------------------------------
// Quaternion
// ---------------------------------------------------------------------------

/// Unit quaternion, stored `(w, x, y, z)`.
///
/// `q` and `-q` encode the same rotation; everything in this crate is
/// invariant to that sign flip. Constructors normalize, so downstream code
/// may assume unit norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const IDENTITY: Quaternion = Quaternion {
        w: 1.0,
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    /// Build and normalize. Panics on the zero quaternion.
    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Quaternion {
        Quaternion { w, x, y, z }.normalized()
    }

    /// Rotation by `angle` radians about a (not necessarily unit) axis.
    pub fn from_axis_angle(axis: Vec3, angle: f64) -> Quaternion {
        let u = axis.normalized();
        let (s, c) = (angle * 0.5).sin_cos();
        Quaternion {
            w: c,
            x: u.x * s,
            y: u.y * s,
            z: u.z * s,
        }
    }

    pub fn about_x(angle: f64) -> Quaternion {
        Quaternion::from_axis_angle(Vec3::X, angle)
    }

    pub fn about_y(angle: f64) -> Quaternion {
        Quaternion::from_axis_angle(Vec3::Y, angle)
    }

    pub fn about_z(angle: f64) -> Quaternion {
        Quaternion::from_axis_angle(Vec3::Z, angle)
    }

    /// Shortest-arc rotation taking unit direction `from` onto unit
    /// direction `to`. For anti-parallel inputs the 180-degree axis is chosen
    /// deterministically (any perpendicular works).
    pub fn from_shortest_arc(from: Vec3, to: Vec3) -> Quaternion {
        let f = from.normalized();
        let t = to.normalized();
        let c = f.dot(t);
        if c <= -1.0 + 1e-14 {
            let axis = f.any_perpendicular();
            return Quaternion {
                w: 0.0,
                x: axis.x,
                y: axis.y,
                z: axis.z,
            };
        }
        // Halfway-vector form: q = (1 + f·t, f x t), normalized.
        let v = f.cross(t);
        Quaternion {
            w: 1.0 + c,
            x: v.x,
            y: v.y,
            z: v.z,
        }
        .normalized()
    }

    pub fn norm(self) -> f64 {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn normalized(self) -> Quaternion {
        let n = self.norm();
        assert!(n > 0.0, "cannot normalize the zero quaternion");
        let s = 1.0 / n;
        Quaternion {
            w: self.w * s,
            x: self.x * s,
            y: self.y * s,
            z: self.z * s,
        }
    }

    pub fn conjugate(self) -> Quaternion {
        Quaternion {
            w: self.w,
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }

    /// Inverse rotation. Equal to the conjugate because quaternions here are
    /// unit length.
    pub fn inverse(self) -> Quaternion {
        self.conjugate()
    }

    pub fn dot(self, o: Quaternion) -> f64 {
        self.w * o.w + self.x * o.x + self.y * o.y + self.z * o.z
    }

    /// Rotate a vector: `R(q) v`.
    pub fn rotate(self, v: Vec3) -> Vec3 {
        // v' = v + 2 u x (u x v + w v), u = (x, y, z)
        let u = Vec3::new(self.x, self.y, self.z);
        let t = u.cross(v) * 2.0;
        v + t * self.w + u.cross(t)
    }

    pub fn to_matrix(self) -> Mat3 {
        let Quaternion { w, x, y, z } = self;
        Mat3([
            [
                1.0 - 2.0 * (y * y + z * z),
                2.0 * (x * y - w * z),
                2.0 * (x * z + w * y),
            ],
            [
                2.0 * (x * y + w * z),
                1.0 - 2.0 * (x * x + z * z),
                2.0 * (y * z - w * x),
            ],
            [
                2.0 * (x * z - w * y),
                2.0 * (y * z + w * x),
                1.0 - 2.0 * (x * x + y * y),
            ],
        ])
    }

    /// Quaternion for a rotation matrix (Shepperd's method: pick the largest
    /// diagonal combination for numerical stability).
    pub fn from_matrix(m: &Mat3) -> Quaternion {
        let a = &m.0;
        let tr = a[0][0] + a[1][1] + a[2][2];
        let q = if tr > 0.0 {
            let s = (tr + 1.0).sqrt() * 2.0;
            Quaternion {
                w: 0.25 * s,
                x: (a[2][1] - a[1][2]) / s,
                y: (a[0][2] - a[2][0]) / s,
                z: (a[1][0] - a[0][1]) / s,
            }
        } else if a[0][0] > a[1][1] && a[0][0] > a[2][2] {
            let s = (1.0 + a[0][0] - a[1][1] - a[2][2]).sqrt() * 2.0;
            Quaternion {
                w: (a[2][1] - a[1][2]) / s,
                x: 0.25 * s,
                y: (a[0][1] + a[1][0]) / s,
                z: (a[0][2] + a[2][0]) / s,
            }
        } else if a[1][1] > a[2][2] {
            let s = (1.0 + a[1][1] - a[0][0] - a[2][2]).sqrt() * 2.0;
            Quaternion {
                w: (a[0][2] - a[2][0]) / s,
                x: (a[0][1] + a[1][0]) / s,
                y: 0.25 * s,
                z: (a[1][2] + a[2][1]) / s,
            }
        } else {
            let s = (1.0 + a[2][2] - a[0][0] - a[1][1]).sqrt() * 2.0;
            Quaternion {
                w: (a[1][0] - a[0][1]) / s,
                x: (a[0][2] + a[2][0]) / s,
                y: (a[1][2] + a[2][1]) / s,
                z: 0.25 * s,
            }
        };
        q.normalized()
    }

    /// Geodesic angle (radians, in `[0, pi]`) between the rotations encoded
    /// by `self` and `other`. Invariant under sign flips of either side.
    ///
    /// Computed as `4 * atan2(|a - b|, |a + b|)` with `b` sign-aligned to
    /// `a`, rather than `2 * acos(|dot|)`: the two agree for unit
    /// quaternions, but the chord form stays fully accurate for tiny
    /// angles, where `acos` near 1 loses half the available precision.
    pub fn angle_to(self, other: Quaternion) -> f64 {
        let s = if self.dot(other) >= 0.0 { 1.0 } else { -1.0 };
        let norm4 = |w: f64, x: f64, y: f64, z: f64| (w * w + x * x + y * y + z * z).sqrt();
        let diff = norm4(
            self.w - s * other.w,
            self.x - s * other.x,
            self.y - s * other.y,
            self.z - s * other.z,
        );
        let sum = norm4(
            self.w + s * other.w,
            self.x + s * other.x,
            self.y + s * other.y,
            self.z + s * other.z,
        );
        4.0 * diff.atan2(sum)
    }

    /// Flip the sign so `w > 0`, breaking ties on the first nonzero
    /// component. Picks one representative of the `{q, -q}` pair.
    pub fn sign_normalized(self) -> Quaternion {
        let lead = if self.w != 0.0 {
            self.w
        } else if self.x != 0.0 {
            self.x
        } else if self.y != 0.0 {
            self.y
        } else {
            self.z
        };
        if lead < 0.0 {
            Quaternion {
                w: -self.w,
                x: -self.x,
                y: -self.y,
                z: -self.z,
            }
        } else {
            self
        }
    }

    /// Total lexicographic order on `(w, x, y, z)`, used to break exact ties
    /// deterministically. Assumes no NaNs (unit quaternions never have any).
    pub fn lex_cmp(self, o: Quaternion) -> std::cmp::Ordering {
        let a = [self.w, self.x, self.y, self.z];
        let b = [o.w, o.x, o.y, o.z];
        for i in 0..4 {
            match a[i].partial_cmp(&b[i]).expect("NaN in quaternion") {
                std::cmp::Ordering::Equal => continue,
                ord => return ord,
            }
        }
        std::cmp::Ordering::Equal
    }
}

impl Default for Quaternion {
    fn default() -> Quaternion {
        Quaternion::IDENTITY
    }
}

impl From<[f64; 4]> for Quaternion {
    /// Verbatim component copy — no normalization, so serialization
    /// round-trips bit-exactly. Sources that may carry non-unit values
    /// (hand-edited files) normalize explicitly at their boundary.
    fn from(a: [f64; 4]) -> Quaternion {
        Quaternion {
            w: a[0],
            x: a[1],
            y: a[2],
            z: a[3],
        }
    }
}

impl From<Quaternion> for [f64; 4] {
    fn from(q: Quaternion) -> [f64; 4] {
        [q.w, q.x, q.y, q.z]
    }
}

impl std::ops::Mul for Quaternion {
    type Output = Quaternion;

    /// Hamilton product; `a * b` applies `b` first, then `a`.
    fn mul(self, o: Quaternion) -> Quaternion {
        Quaternion {
            w: self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            x: self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            y: self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            z: self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        }
    }
}

// ---------------------------------------------------------------------------
// RigidTransform
// ---------------------------------------------------------------------------

/// Rotation followed by translation: `p -> R(q) p + t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RigidTransform {
    pub rotation: Quaternion,
    pub translation: Vec3,
}

impl RigidTransform {
    pub const IDENTITY: RigidTransform = RigidTransform {
        rotation: Quaternion::IDENTITY,
        translation: Vec3::ZERO,
    };

    pub fn new(rotation: Quaternion, translation: Vec3) -> RigidTransform {
        RigidTransform {
            rotation,
            translation,
        }
    }

    pub fn apply(&self, p: Vec3) -> Vec3 {
        self.rotation.rotate(p) + self.translation
    }

    /// `self ∘ inner`: apply `inner` first, then `self`.
    pub fn compose(&self, inner: &RigidTransform) -> RigidTransform {
        RigidTransform {
            rotation: self.rotation * inner.rotation,
            translation: self.rotation.rotate(inner.translation) + self.translation,
        }
    }

    pub fn inverse(&self) -> RigidTransform {
        let inv = self.rotation.inverse();
        RigidTransform {
            rotation: inv,
            translation: -inv.rotate(self.translation),
        }
    }
}

impl Default for RigidTransform {
    fn default() -> RigidTransform {
        RigidTransform::IDENTITY
    }
}

// ---------------------------------------------------------------------------
// CameraIntrinsics
// ---------------------------------------------------------------------------

/// Pinhole camera with square pixels and no distortion.
///
/// `width`/`height` are the sensor size in pixels; they participate in
/// floating-point math everywhere, so they are stored as `f64`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraIntrinsics {
    /// Focal length in pixels.
    pub f: f64,
    /// Principal point, image coordinates.
    pub cx: f64,
    pub cy: f64,
    pub width: f64,
    pub height: f64,
}

impl CameraIntrinsics {
    pub fn new(f: f64, cx: f64, cy: f64, width: f64, height: f64) -> Result<CameraIntrinsics> {
        let k = CameraIntrinsics {
            f,
            cx,
            cy,
            width,
            height,
        };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.f.is_finite() && self.f > 0.0) {
            return Err(Error::InvalidIntrinsics(format!(
                "focal length must be positive, got {}",
                self.f
            )));
        }
        if !(self.width > 0.0 && self.height > 0.0) {
            return Err(Error::InvalidIntrinsics(format!(
                "image size must be positive, got {}x{}",
                self.width, self.height
            )));
        }
        if !(self.cx.is_finite() && self.cy.is_finite()) {
            return Err(Error::InvalidIntrinsics(
                "principal point must be finite".into(),
            ));
        }
        Ok(())
    }

    /// Field of view across the smaller image dimension:
    /// `2 atan(min(width, height) / (2 f))`.
    pub fn min_fov(&self) -> f64 {
        2.0 * (self.width.min(self.height) / (2.0 * self.f)).atan()
    }

    /// Side length of the largest centered square, in pixels.
    pub fn min_dim(&self) -> f64 {
        self.width.min(self.height)
    }

    /// Project a camera-frame point to image coordinates.
    pub fn project(&self, p: Vec3) -> Result<(f64, f64)> {
        if p.z <= 0.0 {
            return Err(Error::BehindCamera { z: p.z });
        }
        Ok((
            self.f * p.x / p.z + self.cx,
            self.f * p.y / p.z + self.cy,
        ))
    }

    /// Unit-depth ray direction through image point `(u, v)`:
    /// `((u - cx)/f, (v - cy)/f, 1)`.
    pub fn ray(&self, u: f64, v: f64) -> Vec3 {
        Vec3::new((u - self.cx) / self.f, (v - self.cy) / self.f, 1.0)
    }

    pub fn contains(&self, u: f64, v: f64) -> bool {
        u >= 0.0 && u < self.width && v >= 0.0 && v < self.height
    }
}

/// Project an object-frame point through pose `t` into the image.
pub fn project_point(k: &CameraIntrinsics, pose: &RigidTransform, v: Vec3) -> Result<(f64, f64)> {
    k.project(pose.apply(v))
}

// ---------------------------------------------------------------------------
// Roi
// ---------------------------------------------------------------------------

/// Axis-aligned region of interest in image coordinates. `bx, by` is the
/// top-left corner; `w, h` must be positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Roi {
    pub bx: f64,
    pub by: f64,
    pub w: f64,
    pub h: f64,
}

impl Roi {
    pub fn new(bx: f64, by: f64, w: f64, h: f64) -> Result<Roi> {
        let r = Roi { bx, by, w, h };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        if self.w > 0.0 && self.h > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidRoi {
                w: self.w,
                h: self.h,
            })
        }
    }

    pub fn center(&self) -> (f64, f64) {
        (self.bx + 0.5 * self.w, self.by + 0.5 * self.h)
    }

    /// Smallest enclosing square with the same center.
    pub fn square(&self) -> Roi {
        let side = self.w.max(self.h);
        let (cx, cy) = self.center();
        Roi {
            bx: cx - 0.5 * side,
            by: cy - 0.5 * side,
            w: side,
            h: side,
        }
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
