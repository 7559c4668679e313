//! Translation code (ROI-anchored center + range) and the apparent/true
//! orientation correction.
//!
//! A detection's translation is stored as two sigmoid-normalized center
//! coordinates relative to its ROI plus the Euclidean range from the camera
//! center. Decoding is exact: the recovered `(X, Y, Z)` always has norm
//! equal to the range, whatever the center pixel — moving the object along
//! the viewing arc changes the components but never the norm.
//!
//! Orientation: an off-center object is seen along the ray through its
//! center rather than along the optical axis, so the orientation evident in
//! a centered crop (the "apparent" orientation) differs from the true one.
//! The correction composes a rotation about the camera y axis by
//! `atan(X/Z)` followed by one about the camera x axis by `-atan(Y/Z)`,
//! applied on the left of the apparent quaternion.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{CameraIntrinsics, Quaternion, Roi, Vec3};

/// Camera-frame object-center translation in meters.
pub type Translation = Vec3;

/// Sigmoid-normalized ROI-relative center plus range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TranslationCode {
    /// Normalized center coordinates, strictly inside (0, 1).
    pub nx: f64,
    pub ny: f64,
    /// Distance from camera center to object center, meters.
    pub range: f64,
}

impl TranslationCode {
    pub fn validate(&self) -> Result<()> {
        for v in [self.nx, self.ny] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::CodeSaturated(v));
            }
        }
        if !(self.range > 0.0) {
            return Err(Error::InvalidDistance(self.range));
        }
        Ok(())
    }
}

fn logit(n: f64) -> f64 {
    -(1.0 / n - 1.0).ln()
}

fn sigmoid(r: f64) -> f64 {
    1.0 / (1.0 + (-r).exp())
}

/// Decode the object-center pixel location, relative to the principal
/// point: `(bx + logit(nx) * w - cx, by + logit(ny) * h - cy)`. The point
/// may fall outside the ROI — the code does not constrain it to the box.
pub fn decode_center(code: &TranslationCode, roi: &Roi, k: &CameraIntrinsics) -> Result<(f64, f64)> {
    code.validate()?;
    roi.validate()?;
    let rx = logit(code.nx);
    let ry = logit(code.ny);
    Ok((
        roi.bx + rx * roi.w - k.cx,
        roi.by + ry * roi.h - k.cy,
    ))
}

/// Recover the camera-frame translation from a center pixel offset and a
/// range: `Z = range * f / sqrt(px^2 + py^2 + f^2)`, `X = Z * px / f`,
/// `Y = Z * py / f`. The output norm equals `range` identically.
pub fn decode_translation(px: f64, py: f64, range: f64, f: f64) -> Translation {
    debug_assert!(range > 0.0 && f > 0.0);
    let z = range * f / (px * px + py * py + f * f).sqrt();
    Vec3::new(z * px / f, z * py / f, z)
}

/// Full decode: center pixel from the code, then translation.
pub fn decode(code: &TranslationCode, roi: &Roi, k: &CameraIntrinsics) -> Result<Translation> {
    let (px, py) = decode_center(code, roi, k)?;
    Ok(decode_translation(px, py, code.range, k.f))
}

/// Exact inverse of [`decode`]: project the center through the intrinsics
/// and renormalize against the ROI.
pub fn encode_translation(t: Translation, roi: &Roi, k: &CameraIntrinsics) -> Result<TranslationCode> {
    roi.validate()?;
    if t.z <= 0.0 {
        return Err(Error::BehindCamera { z: t.z });
    }
    let px = k.f * t.x / t.z;
    let py = k.f * t.y / t.z;
    let rx = (px + k.cx - roi.bx) / roi.w;
    let ry = (py + k.cy - roi.by) / roi.h;
    let code = TranslationCode {
        nx: sigmoid(rx),
        ny: sigmoid(ry),
        range: t.norm(),
    };
    // Far outside the ROI the sigmoid saturates to exactly 0 or 1 in
    // floating point and the code stops being invertible.
    code.validate()?;
    Ok(code)
}

/// Viewing-ray correction angles for an off-center object:
/// `(atan(X/Z), -atan(Y/Z))`.
pub fn orientation_correction(t: Translation) -> (f64, f64) {
    debug_assert!(t.z > 0.0, "correction requires a point in front of the camera");
    ((t.x / t.z).atan(), (-(t.y / t.z)).atan())
}

/// The correction as a rotation: about camera y by `atan(X/Z)`, then about
/// camera x by `-atan(Y/Z)`. Maps the optical axis close to the ray through
/// the object center (exactly, when the center lies on a camera axis
/// plane).
pub fn correction_rotation(t: Translation) -> Quaternion {
    let (d_theta, d_phi) = orientation_correction(t);
    Quaternion::about_x(d_phi) * Quaternion::about_y(d_theta)
}

/// Recover the true orientation from the apparent one seen in a centered
/// crop of an object at translation `t`.
pub fn apparent_to_true(q_apparent: Quaternion, t: Translation) -> Quaternion {
    (correction_rotation(t) * q_apparent).normalized()
}

/// Inverse of [`apparent_to_true`].
pub fn true_to_apparent(q_true: Quaternion, t: Translation) -> Quaternion {
    (correction_rotation(t).inverse() * q_true).normalized()
}

/// Default sharpness constant for [`qloss`], the natural `e^{-4}`.
pub fn qloss_default_epsilon() -> f64 {
    (-4.0f64).exp()
}

/// Log distance between unit quaternions: `ln(eps + 1 - |a . b|)`.
/// Sign-flip invariant; equals `ln(eps)` exactly when `a = ±b`.
pub fn qloss(a: Quaternion, b: Quaternion, eps: f64) -> f64 {
    debug_assert!(eps > 0.0);
    // Grouped so an exact match hits the floor ln(eps) without the
    // round-off that `eps + 1.0` would introduce.
    (eps + (1.0 - a.dot(b).abs())).ln()
}
