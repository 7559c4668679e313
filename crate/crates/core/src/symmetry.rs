//! Object symmetry groups: canonical orientation representatives and
//! symmetry-reduced angular distance.
//!
//! A symmetry group is a set of proper rotations `s` that leave the object's
//! silhouette set invariant, so orientations `q` and `q * s` are
//! indistinguishable to any silhouette-based method. Five kinds are
//! supported: trivial, one symmetry plane (realized as the 180-degree
//! rotation about the in-plane axis), two perpendicular planes (a Klein
//! four-group of 180-degree rotations), a continuous revolution axis, and a
//! revolution axis plus a perpendicular 180-degree flip.
//!
//! Canonicalization picks, within each coset `{q * s}`, the representative
//! closest to the identity (maximum `|w|`), breaking ties lexicographically
//! on `(w, x, y, z)` after flipping signs so `w >= 0`. For continuous axes
//! the free spin angle is removed in closed form by a swing-twist
//! decomposition rather than by search.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{CameraIntrinsics, Quaternion, Vec3};
use crate::mesh::TriangleMesh;

/// Axes of discrete groups must be perpendicular to within this (radian
/// scale) tolerance.
const AXIS_PERP_TOL: f64 = 1e-6;

/// `|w|` differences below this count as a tie during representative
/// selection (genuine ties arise from exactly symmetric inputs).
const TIE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum SymmetryGroup {
    /// No symmetry: every orientation is its own class.
    None,
    /// One symmetry plane, realized as the 180-degree rotation about `axis`
    /// (the in-plane axis perpendicular to the plane's normal pair).
    Plane { axis: Vec3 },
    /// Two perpendicular symmetry planes: the Klein four-group
    /// `{1, R_a1(pi), R_a2(pi), R_a1xa2(pi)}`.
    TwoPlanes { axis1: Vec3, axis2: Vec3 },
    /// Continuous surface-of-revolution symmetry about `axis`.
    Axis { axis: Vec3 },
    /// Revolution symmetry about `axis` plus a 180-degree flip about the
    /// perpendicular `flip` axis.
    AxisPlane { axis: Vec3, flip: Vec3 },
}

impl SymmetryGroup {
    pub fn none() -> SymmetryGroup {
        SymmetryGroup::None
    }

    pub fn plane(axis: Vec3) -> Result<SymmetryGroup> {
        Ok(SymmetryGroup::Plane {
            axis: unit_axis(axis)?,
        })
    }

    pub fn two_planes(axis1: Vec3, axis2: Vec3) -> Result<SymmetryGroup> {
        let a1 = unit_axis(axis1)?;
        let a2 = unit_axis(axis2)?;
        if a1.dot(a2).abs() > AXIS_PERP_TOL {
            return Err(Error::SymmetryConfig(format!(
                "two_planes axes must be perpendicular (dot = {})",
                a1.dot(a2)
            )));
        }
        Ok(SymmetryGroup::TwoPlanes { axis1: a1, axis2: a2 })
    }

    pub fn axis(axis: Vec3) -> Result<SymmetryGroup> {
        Ok(SymmetryGroup::Axis {
            axis: unit_axis(axis)?,
        })
    }

    pub fn axis_plane(axis: Vec3, flip: Vec3) -> Result<SymmetryGroup> {
        let u = unit_axis(axis)?;
        let f = unit_axis(flip)?;
        if u.dot(f).abs() > AXIS_PERP_TOL {
            return Err(Error::SymmetryConfig(format!(
                "axis_plane flip axis must be perpendicular to the revolution axis (dot = {})",
                u.dot(f)
            )));
        }
        Ok(SymmetryGroup::AxisPlane { axis: u, flip: f })
    }

    /// The discrete group elements, or `None` for groups with a continuous
    /// part.
    pub fn discrete_elements(&self) -> Option<Vec<Quaternion>> {
        match self {
            SymmetryGroup::None => Some(vec![Quaternion::IDENTITY]),
            SymmetryGroup::Plane { axis } => Some(vec![
                Quaternion::IDENTITY,
                Quaternion::from_axis_angle(*axis, std::f64::consts::PI),
            ]),
            SymmetryGroup::TwoPlanes { axis1, axis2 } => {
                let a3 = axis1.cross(*axis2).normalized();
                Some(vec![
                    Quaternion::IDENTITY,
                    Quaternion::from_axis_angle(*axis1, std::f64::consts::PI),
                    Quaternion::from_axis_angle(*axis2, std::f64::consts::PI),
                    Quaternion::from_axis_angle(a3, std::f64::consts::PI),
                ])
            }
            SymmetryGroup::Axis { .. } | SymmetryGroup::AxisPlane { .. } => None,
        }
    }

    /// A deterministic sample of group elements (used by
    /// [`validate_group`]); continuous parts are sampled at `n_spins`
    /// angles.
    pub fn sample_elements(&self, n_spins: usize) -> Vec<Quaternion> {
        match self {
            SymmetryGroup::None | SymmetryGroup::Plane { .. } | SymmetryGroup::TwoPlanes { .. } => {
                self.discrete_elements().expect("discrete group")
            }
            SymmetryGroup::Axis { axis } => spin_samples(*axis, n_spins),
            SymmetryGroup::AxisPlane { axis, flip } => {
                let mut out = spin_samples(*axis, n_spins);
                let f = Quaternion::from_axis_angle(*flip, std::f64::consts::PI);
                let spins = spin_samples(*axis, n_spins);
                out.extend(spins.into_iter().map(|s| s * f));
                out
            }
        }
    }

    /// Canonical representative of the coset `{q * s : s in G}`.
    pub fn canonicalize(&self, q: Quaternion) -> Quaternion {
        match self {
            SymmetryGroup::None => q.sign_normalized(),
            SymmetryGroup::Plane { .. } | SymmetryGroup::TwoPlanes { .. } => {
                let candidates: Vec<Quaternion> = self
                    .discrete_elements()
                    .expect("discrete group")
                    .into_iter()
                    .map(|s| (q * s).sign_normalized())
                    .collect();
                pick_representative(&candidates)
            }
            SymmetryGroup::Axis { axis } => remove_twist(q, *axis).sign_normalized(),
            SymmetryGroup::AxisPlane { axis, flip } => {
                let f = Quaternion::from_axis_angle(*flip, std::f64::consts::PI);
                let a = remove_twist(q, *axis).sign_normalized();
                let b = remove_twist(q * f, *axis).sign_normalized();
                pick_representative(&[a, b])
            }
        }
    }

    /// Smallest geodesic angle between `a` and any symmetry-equivalent of
    /// `b`: `min over s of quat_angle(a, b * s)`. Always `<= quat_angle`.
    pub fn sym_angle(&self, a: Quaternion, b: Quaternion) -> f64 {
        let d = a.inverse() * b;
        match self {
            SymmetryGroup::None => a.angle_to(b),
            SymmetryGroup::Plane { .. } | SymmetryGroup::TwoPlanes { .. } => self
                .discrete_elements()
                .expect("discrete group")
                .into_iter()
                .map(|s| a.angle_to(b * s))
                .fold(f64::INFINITY, f64::min),
            SymmetryGroup::Axis { axis } => twisted_angle_to_identity(d, *axis),
            SymmetryGroup::AxisPlane { axis, flip } => {
                let f = Quaternion::from_axis_angle(*flip, std::f64::consts::PI);
                twisted_angle_to_identity(d, *axis).min(twisted_angle_to_identity(d * f, *axis))
            }
        }
    }
}

fn unit_axis(axis: Vec3) -> Result<Vec3> {
    axis.try_normalized()
        .ok_or_else(|| Error::SymmetryConfig("symmetry axis must be nonzero".into()))
}

fn spin_samples(axis: Vec3, n: usize) -> Vec<Quaternion> {
    (0..n.max(1))
        .map(|i| {
            let angle = std::f64::consts::TAU * (i as f64 + 0.5) / n.max(1) as f64;
            Quaternion::from_axis_angle(axis, angle)
        })
        .collect()
}

/// Largest-`|w|` candidate (closest to identity), lexicographic tie-break.
/// Candidates must already be sign-normalized.
fn pick_representative(candidates: &[Quaternion]) -> Quaternion {
    let mut best = candidates[0];
    for &c in &candidates[1..] {
        if c.w > best.w + TIE_TOL {
            best = c;
        } else if (c.w - best.w).abs() <= TIE_TOL
            && c.lex_cmp(best) == std::cmp::Ordering::Greater
        {
            best = c;
        }
    }
    best
}

/// Swing part of `q` relative to `axis`: the unique coset member of
/// `{q * R_axis(theta)}` with zero spin about the axis, which is also the
/// member closest to the identity. Degenerate cosets (pure 180-degree
/// rotations about axes perpendicular to `axis`) collapse to a fixed
/// in-plane axis so the choice stays deterministic.
fn remove_twist(q: Quaternion, axis: Vec3) -> Quaternion {
    let v = Vec3::new(q.x, q.y, q.z);
    let proj = v.dot(axis);
    let norm_sq = q.w * q.w + proj * proj;
    if norm_sq < 1e-18 {
        // Every coset member is a 180-degree rotation about some axis in the
        // plane perpendicular to `axis`; pick a fixed representative axis.
        let e = axis.any_perpendicular();
        return Quaternion {
            w: 0.0,
            x: e.x,
            y: e.y,
            z: e.z,
        };
    }
    let s = 1.0 / norm_sq.sqrt();
    // Twist = normalized (w, proj * axis); result = q * twist^{ -1 }.
    let twist_inv = Quaternion {
        w: q.w * s,
        x: -axis.x * proj * s,
        y: -axis.y * proj * s,
        z: -axis.z * proj * s,
    };
    (q * twist_inv).normalized()
}

/// `min over theta of quat_angle(d * R_axis(theta), identity)`, in closed
/// form. The best spin drives `|w|` up to `sqrt(d.w^2 + (d.v . axis)^2)`,
/// leaving exactly the component of `d`'s vector part perpendicular to the
/// axis; the angle is `2 * atan2(perp, peak)`. The atan2 form (instead of
/// `2 * acos(peak)`) keeps near-zero angles accurate to machine precision,
/// where `acos` near 1 loses half the available digits.
fn twisted_angle_to_identity(d: Quaternion, axis: Vec3) -> f64 {
    let v = Vec3::new(d.x, d.y, d.z);
    let proj = v.dot(axis);
    let perp = v - axis * proj;
    let peak = (d.w * d.w + proj * proj).sqrt();
    2.0 * perp.norm().atan2(peak)
}

// ---------------------------------------------------------------------------
// Rasterizer-backed validation
// ---------------------------------------------------------------------------

/// Outcome of checking a claimed symmetry group against rendered
/// silhouettes.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub pass: bool,
    pub worst_iou: f64,
    /// `(orientation, group element)` achieving the worst IoU.
    pub worst_case: Option<(Quaternion, Quaternion)>,
    pub n_orientations: usize,
    pub n_elements: usize,
}

/// Minimum silhouette IoU for a group element to count as a true symmetry.
pub const VALIDATE_IOU_THRESHOLD: f64 = 0.99;

/// Verify that every sampled group element leaves rendered silhouettes
/// unchanged: for `n_samples` random orientations `q` and sampled `s`,
/// requires `IoU(render(q), render(q * s)) >= 0.99`. The mesh must already
/// be symmetry-aligned (axes of `g` expressed in its frame).
pub fn validate_group(
    mesh: &TriangleMesh,
    g: &SymmetryGroup,
    n_samples: usize,
    k: &CameraIntrinsics,
    resolution: usize,
    seed: u64,
) -> Result<ValidationReport> {
    let distance = crate::render::render_distance(mesh.extent(), k.min_fov())?;
    let elements: Vec<Quaternion> = g
        .sample_elements(4)
        .into_iter()
        .filter(|s| s.angle_to(Quaternion::IDENTITY) > 1e-12)
        .collect();
    let mut rng = crate::sampling::rng(seed);
    let orientations: Vec<Quaternion> = (0..n_samples)
        .map(|_| crate::sampling::uniform_quaternion(&mut rng))
        .collect();

    let per_orientation = crate::exec::map_indices(orientations.len(), |i| {
        let q = orientations[i];
        let base = crate::render::rasterize_silhouette(mesh, q, k, distance, resolution)?;
        let mut worst = (f64::INFINITY, Quaternion::IDENTITY);
        for &s in &elements {
            let turned = crate::render::rasterize_silhouette(mesh, q * s, k, distance, resolution)?;
            let score = crate::metrics::iou(&base, &turned)?;
            if score < worst.0 {
                worst = (score, s);
            }
        }
        Ok::<(f64, Quaternion, Quaternion), Error>((worst.0, q, worst.1))
    });

    let mut report = ValidationReport {
        pass: true,
        worst_iou: 1.0,
        worst_case: None,
        n_orientations: n_samples,
        n_elements: elements.len(),
    };
    for row in per_orientation {
        let (score, q, s) = row?;
        if score < report.worst_iou {
            report.worst_iou = score;
            report.worst_case = Some((q, s));
        }
    }
    report.pass = report.worst_iou >= VALIDATE_IOU_THRESHOLD;
    Ok(report)
}

// ---------------------------------------------------------------------------
// Config file format
// ---------------------------------------------------------------------------

/// One class's symmetry description as stored in the JSON config: a kind
/// tag, its axes, and the alignment rotation applied to the raw model so the
/// axes land on coordinate axes.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SymmetryConfigEntry {
    pub kind: SymmetryKind,
    #[serde(default)]
    pub axes: Vec<[f64; 3]>,
    /// Rotation from raw model coordinates to the symmetry-aligned frame.
    #[serde(default = "identity_quat")]
    pub alignment: [f64; 4],
}

fn identity_quat() -> [f64; 4] {
    [1.0, 0.0, 0.0, 0.0]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymmetryKind {
    None,
    Plane,
    TwoPlanes,
    Axis,
    AxisPlane,
}

/// Map from class id to symmetry entry; `BTreeMap` keeps serialized order
/// stable.
pub type SymmetryConfig = BTreeMap<String, SymmetryConfigEntry>;

impl SymmetryConfigEntry {
    pub fn new(kind: SymmetryKind, axes: Vec<[f64; 3]>) -> SymmetryConfigEntry {
        SymmetryConfigEntry {
            kind,
            axes,
            alignment: identity_quat(),
        }
    }

    pub fn alignment_quat(&self) -> Quaternion {
        // Normalized here because config files are hand-editable.
        let [w, x, y, z] = self.alignment;
        Quaternion::new(w, x, y, z)
    }

    pub fn to_group(&self) -> Result<SymmetryGroup> {
        let need = |n: usize| -> Result<()> {
            if self.axes.len() == n {
                Ok(())
            } else {
                Err(Error::SymmetryConfig(format!(
                    "kind {:?} needs {} axes, got {}",
                    self.kind,
                    n,
                    self.axes.len()
                )))
            }
        };
        match self.kind {
            SymmetryKind::None => {
                need(0)?;
                Ok(SymmetryGroup::None)
            }
            SymmetryKind::Plane => {
                need(1)?;
                SymmetryGroup::plane(self.axes[0].into())
            }
            SymmetryKind::TwoPlanes => {
                need(2)?;
                SymmetryGroup::two_planes(self.axes[0].into(), self.axes[1].into())
            }
            SymmetryKind::Axis => {
                need(1)?;
                SymmetryGroup::axis(self.axes[0].into())
            }
            SymmetryKind::AxisPlane => {
                need(2)?;
                SymmetryGroup::axis_plane(self.axes[0].into(), self.axes[1].into())
            }
        }
    }
}

pub fn load_symmetry_config(path: &Path) -> Result<SymmetryConfig> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::io_at(path.display().to_string(), e))?;
    let cfg: SymmetryConfig = serde_json::from_str(&text)?;
    for entry in cfg.values() {
        entry.to_group()?; // validate axes counts and perpendicularity
    }
    Ok(cfg)
}

pub fn save_symmetry_config(path: &Path, cfg: &SymmetryConfig) -> Result<()> {
    let mut text = serde_json::to_string_pretty(cfg)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io_at(path.display().to_string(), e))
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;
    use rand::Rng;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn groups_under_test() -> Vec<SymmetryGroup> {
        vec![
            SymmetryGroup::none(),
            SymmetryGroup::plane(Vec3::Z).unwrap(),
            SymmetryGroup::two_planes(Vec3::Z, Vec3::X).unwrap(),
            SymmetryGroup::axis(Vec3::Z).unwrap(),
            SymmetryGroup::axis_plane(Vec3::Z, Vec3::X).unwrap(),
        ]
    }

    #[test]
    fn constructors_validate_axes() {
        assert!(SymmetryGroup::two_planes(Vec3::Z, Vec3::Z).is_err());
        assert!(SymmetryGroup::two_planes(Vec3::Z, Vec3::new(0.1, 0.0, 1.0)).is_err());
        assert!(SymmetryGroup::axis_plane(Vec3::Z, Vec3::new(0.0, 0.1, 1.0)).is_err());
        assert!(SymmetryGroup::axis(Vec3::ZERO).is_err());
        // Non-unit axes are normalized.
        let g = SymmetryGroup::plane(Vec3::new(0.0, 0.0, 3.0)).unwrap();
        match g {
            SymmetryGroup::Plane { axis } => assert!((axis.norm() - 1.0).abs() < 1e-15),
            _ => unreachable!(),
        }
    }

    #[test]
    fn trivial_group_returns_sign_normalized_input() {
        let g = SymmetryGroup::none();
        let q = Quaternion::new(-0.5, 0.1, 0.2, 0.3);
        let c = g.canonicalize(q);
        assert!(c.w > 0.0);
        assert!(q.angle_to(c) < 1e-12);
    }

    #[test]
    fn axis_spin_cancels_to_identity() {
        let g = SymmetryGroup::axis(Vec3::Z).unwrap();
        let q = Quaternion::about_z(30.0_f64.to_radians());
        let c = g.canonicalize(q);
        assert!(c.angle_to(Quaternion::IDENTITY) < 1e-12);
    }

    #[test]
    fn plane_cosets_share_one_representative() {
        let g = SymmetryGroup::plane(Vec3::Z).unwrap();
        let a = Quaternion::about_z(170.0_f64.to_radians());
        let b = Quaternion::about_z(-10.0_f64.to_radians());
        let ca = g.canonicalize(a);
        let cb = g.canonicalize(b);
        assert!(ca.angle_to(cb) < 1e-12);
        assert!(g.sym_angle(a, b) < 1e-12);
    }

    #[test]
    fn canonicalize_is_idempotent_and_class_consistent() {
        let mut rng = sampling::rng(17);
        for g in groups_under_test() {
            for _ in 0..300 {
                let q = sampling::uniform_quaternion(&mut rng);
                let c = g.canonicalize(q);
                assert!(
                    g.canonicalize(c).angle_to(c) < 1e-9,
                    "idempotence failed for {g:?}"
                );
                // Multiply by a random group element; class must not change.
                let s = match &g {
                    SymmetryGroup::Axis { axis } => {
                        Quaternion::from_axis_angle(*axis, rng.gen_range(0.0..std::f64::consts::TAU))
                    }
                    SymmetryGroup::AxisPlane { axis, flip } => {
                        let spin = Quaternion::from_axis_angle(
                            *axis,
                            rng.gen_range(0.0..std::f64::consts::TAU),
                        );
                        if rng.gen::<bool>() {
                            spin * Quaternion::from_axis_angle(*flip, PI)
                        } else {
                            spin
                        }
                    }
                    _ => {
                        let els = g.discrete_elements().unwrap();
                        els[rng.gen_range(0..els.len())]
                    }
                };
                let c2 = g.canonicalize(q * s);
                assert!(
                    c.angle_to(c2) < 1e-6,
                    "class consistency failed for {g:?}: {} rad",
                    c.angle_to(c2)
                );
            }
        }
    }

    #[test]
    fn canonical_representative_is_closest_to_identity() {
        let mut rng = sampling::rng(23);
        for g in groups_under_test() {
            for _ in 0..100 {
                let q = sampling::uniform_quaternion(&mut rng);
                let c = g.canonicalize(q);
                let d = c.angle_to(Quaternion::IDENTITY);
                for s in g.sample_elements(32) {
                    let other = (c * s).angle_to(Quaternion::IDENTITY);
                    assert!(
                        d <= other + 1e-9,
                        "{g:?}: representative not minimal ({d} vs {other})"
                    );
                }
            }
        }
    }

    #[test]
    fn degenerate_axis_coset_is_deterministic() {
        // A 180-degree rotation about any axis perpendicular to the
        // revolution axis has zero twist norm; all such rotations form one
        // coset and must share a single representative.
        let g = SymmetryGroup::axis(Vec3::Z).unwrap();
        let qx = Quaternion {
            w: 0.0,
            x: 1.0,
            y: 0.0,
            z: 0.0,
        };
        let qy = Quaternion {
            w: 0.0,
            x: 0.0,
            y: 1.0,
            z: 0.0,
        };
        let cx = g.canonicalize(qx);
        let cy = g.canonicalize(qy);
        assert!(cx.angle_to(cy) < 1e-12);
        assert!(g.canonicalize(cx).angle_to(cx) < 1e-12);
    }

    #[test]
    fn sym_angle_examples() {
        let axis = SymmetryGroup::axis(Vec3::Z).unwrap();
        assert!(axis.sym_angle(Quaternion::IDENTITY, Quaternion::about_z(73f64.to_radians())) < 1e-12);

        let plane = SymmetryGroup::plane(Vec3::Z).unwrap();
        assert!(plane.sym_angle(Quaternion::IDENTITY, Quaternion::about_z(PI)) < 1e-12);
        let quarter = plane.sym_angle(Quaternion::IDENTITY, Quaternion::about_z(FRAC_PI_2));
        assert!((quarter - FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn sym_angle_properties() {
        let mut rng = sampling::rng(31);
        for g in groups_under_test() {
            for _ in 0..200 {
                let a = sampling::uniform_quaternion(&mut rng);
                let b = sampling::uniform_quaternion(&mut rng);
                let plain = a.angle_to(b);
                let sym = g.sym_angle(a, b);
                assert!(sym <= plain + 1e-9, "{g:?}");
                assert!((sym - g.sym_angle(b, a)).abs() < 1e-9, "{g:?}");
                assert!(g.sym_angle(a, a) < 1e-9);
            }
        }
        // Trivial group is exactly the geodesic angle.
        let g = SymmetryGroup::none();
        let mut rng = sampling::rng(37);
        for _ in 0..100 {
            let a = sampling::uniform_quaternion(&mut rng);
            let b = sampling::uniform_quaternion(&mut rng);
            assert_eq!(g.sym_angle(a, b), a.angle_to(b));
        }
    }

    #[test]
    fn sym_angle_zero_on_own_coset() {
        let mut rng = sampling::rng(41);
        for g in groups_under_test() {
            for _ in 0..100 {
                let a = sampling::uniform_quaternion(&mut rng);
                for s in g.sample_elements(8) {
                    assert!(
                        g.sym_angle(a, a * s) < 1e-9,
                        "{g:?}: sym_angle(a, a*s) != 0"
                    );
                }
            }
        }
    }

    #[test]
    fn axis_closed_form_matches_dense_search() {
        let g = SymmetryGroup::axis(Vec3::Z).unwrap();
        let mut rng = sampling::rng(43);
        for _ in 0..50 {
            let a = sampling::uniform_quaternion(&mut rng);
            let b = sampling::uniform_quaternion(&mut rng);
            let closed = g.sym_angle(a, b);
            let mut brute = f64::INFINITY;
            for i in 0..7200 {
                let s = Quaternion::about_z(std::f64::consts::TAU * i as f64 / 7200.0);
                brute = brute.min(a.angle_to(b * s));
            }
            assert!(
                (closed - brute).abs() < 1e-3,
                "closed {closed} vs brute {brute}"
            );
            assert!(closed <= brute + 1e-9);
        }
    }

    #[test]
    fn config_round_trip_and_validation() {
        let mut cfg = SymmetryConfig::new();
        cfg.insert(
            "cuboid".into(),
            SymmetryConfigEntry::new(
                SymmetryKind::TwoPlanes,
                vec![[0.0, 0.0, 1.0], [1.0, 0.0, 0.0]],
            ),
        );
        cfg.insert(
            "cylinder".into(),
            SymmetryConfigEntry::new(SymmetryKind::Axis, vec![[0.0, 0.0, 1.0]]),
        );
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("symmetry.json");
        save_symmetry_config(&path, &cfg).unwrap();
        let back = load_symmetry_config(&path).unwrap();
        assert_eq!(back, cfg);

        // Wrong axis count is rejected at load time.
        let bad = r#"{"x": {"kind": "axis", "axes": []}}"#;
        std::fs::write(&path, bad).unwrap();
        assert!(load_symmetry_config(&path).is_err());
    }
}
