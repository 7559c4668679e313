//! Evaluation metrics: silhouette IoU, symmetry-reduced angular error,
//! translation error, closest-point pose error (ADD-S), and the
//! accuracy-threshold curve summarizing a batch of pose errors.

use crate::error::{Error, Result};
use crate::geometry::{Quaternion, RigidTransform, Vec3};
use crate::mask::SilhouetteMask;
use crate::symmetry::SymmetryGroup;

/// Point count up to which closest-point search stays brute force; larger
/// sets go through the spatial grid (same results, see tests).
const BRUTE_FORCE_LIMIT: usize = 5_000;

/// Default accuracy-curve cap, in meters.
pub const DEFAULT_MAX_THRESHOLD: f64 = 0.10;

/// Default number of thresholds on the accuracy curve.
pub const DEFAULT_CURVE_STEPS: usize = 100;

/// Intersection over union; 1.0 when both masks are empty (nothing to
/// disagree about).
pub fn iou(a: &SilhouetteMask, b: &SilhouetteMask) -> Result<f64> {
    let (inter, union) = a.overlap_counts(b)?;
    if union == 0 {
        return Ok(1.0);
    }
    Ok(inter as f64 / union as f64)
}

/// Geodesic angle between orientations after reducing by the class
/// symmetry, in degrees. With the trivial group this is the plain
/// quaternion angle.
pub fn angular_error_deg(est: Quaternion, gt: Quaternion, g: &SymmetryGroup) -> f64 {
    g.sym_angle(est, gt).to_degrees()
}

/// Euclidean distance between camera-frame translations, in centimeters.
pub fn translation_error_cm(est: Vec3, gt: Vec3) -> f64 {
    (est - gt).norm() * 100.0
}

/// Average distance from each estimated-pose model point to the closest
/// ground-truth-pose model point, in meters. Closest-point matching makes
/// the metric insensitive to exact point-set symmetries.
pub fn add_s(est: &RigidTransform, gt: &RigidTransform, points: &[Vec3]) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let est_pts: Vec<Vec3> = points.iter().map(|&p| est.apply(p)).collect();
    let gt_pts: Vec<Vec3> = points.iter().map(|&p| gt.apply(p)).collect();
    Ok(if points.len() <= BRUTE_FORCE_LIMIT {
        mean_closest_brute(&est_pts, &gt_pts)
    } else {
        mean_closest_grid(&est_pts, &gt_pts)
    })
}

/// Average distance between corresponding model points (no closest-point
/// matching). Always an upper bound on [`add_s`].
pub fn add(est: &RigidTransform, gt: &RigidTransform, points: &[Vec3]) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let sum: f64 = points
        .iter()
        .map(|&p| (est.apply(p) - gt.apply(p)).norm())
        .sum();
    Ok(sum / points.len() as f64)
}

fn nearest_sq_brute(q: Vec3, pts: &[Vec3]) -> f64 {
    let mut best = f64::INFINITY;
    for &p in pts {
        let d2 = (p - q).norm_squared();
        if d2 < best {
            best = d2;
        }
    }
    best
}

fn mean_closest_brute(queries: &[Vec3], targets: &[Vec3]) -> f64 {
    let sum: f64 = queries
        .iter()
        .map(|&q| nearest_sq_brute(q, targets).sqrt())
        .sum();
    sum / queries.len() as f64
}

fn mean_closest_grid(queries: &[Vec3], targets: &[Vec3]) -> f64 {
    let grid = PointGrid::build(targets);
    let sum: f64 = queries
        .iter()
        .map(|&q| grid.nearest_sq(q, targets).sqrt())
        .sum();
    sum / queries.len() as f64
}

/// Uniform spatial hash over a point cloud for exact nearest-neighbor
/// queries. Cells are searched in expanding Chebyshev rings; ring `k + 1`
/// can only hold points at distance ≥ k·h from the query, which gives the
/// exact termination bound.
struct PointGrid {
    origin: Vec3,
    h: f64,
    dims: [usize; 3],
    cells: Vec<Vec<u32>>,
}

impl PointGrid {
    fn build(points: &[Vec3]) -> PointGrid {
        debug_assert!(!points.is_empty());
        let mut lo = points[0];
        let mut hi = points[0];
        for &p in points {
            lo = Vec3::new(lo.x.min(p.x), lo.y.min(p.y), lo.z.min(p.z));
            hi = Vec3::new(hi.x.max(p.x), hi.y.max(p.y), hi.z.max(p.z));
        }
        let extent = hi - lo;
        // Aim for ~1 point per cell; degenerate (flat or single-point)
        // clouds fall back to a unit cell, which only costs speed.
        let volume = (extent.x * extent.y * extent.z).max(0.0);
        let mut h = (volume / points.len() as f64).cbrt();
        if !(h > 0.0) {
            h = extent.x.max(extent.y).max(extent.z).max(1.0);
        }
        let dim = |e: f64| ((e / h).floor() as usize + 1).min(256);
        let dims = [dim(extent.x), dim(extent.y), dim(extent.z)];
        let mut grid = PointGrid {
            origin: lo,
            h,
            dims,
            cells: vec![Vec::new(); dims[0] * dims[1] * dims[2]],
        };
        for (i, &p) in points.iter().enumerate() {
            let idx = grid.cell_index(grid.cell_of(p));
            grid.cells[idx].push(i as u32);
        }
        grid
    }

    fn cell_of(&self, p: Vec3) -> [usize; 3] {
        let clamp = |v: f64, d: usize| ((v / self.h).floor().max(0.0) as usize).min(d - 1);
        let rel = p - self.origin;
        [
            clamp(rel.x, self.dims[0]),
            clamp(rel.y, self.dims[1]),
            clamp(rel.z, self.dims[2]),
        ]
    }

    fn cell_index(&self, c: [usize; 3]) -> usize {
        (c[2] * self.dims[1] + c[1]) * self.dims[0] + c[0]
    }

    fn nearest_sq(&self, q: Vec3, pts: &[Vec3]) -> f64 {
        let c = self.cell_of(q);
        let max_ring = (0..3)
            .map(|i| c[i].max(self.dims[i] - 1 - c[i]))
            .max()
            .unwrap();
        let mut best = f64::INFINITY;
        let mut k = 0usize;
        loop {
            self.scan_ring(c, k, pts, q, &mut best);
            let bound = k as f64 * self.h;
            if best <= bound * bound || k >= max_ring {
                return best;
            }
            k += 1;
        }
    }

    /// Visit every in-bounds cell at exact Chebyshev distance `k`.
    fn scan_ring(&self, c: [usize; 3], k: usize, pts: &[Vec3], q: Vec3, best: &mut f64) {
        let k = k as i64;
        let lo = |i: usize| c[i] as i64 - k;
        let hi = |i: usize| c[i] as i64 + k;
        for z in lo(2)..=hi(2) {
            if z < 0 || z >= self.dims[2] as i64 {
                continue;
            }
            for y in lo(1)..=hi(1) {
                if y < 0 || y >= self.dims[1] as i64 {
                    continue;
                }
                for x in lo(0)..=hi(0) {
                    if x < 0 || x >= self.dims[0] as i64 {
                        continue;
                    }
                    let cheb = (x - c[0] as i64)
                        .abs()
                        .max((y - c[1] as i64).abs())
                        .max((z - c[2] as i64).abs());
                    if cheb != k {
                        continue;
                    }
                    let idx = self.cell_index([x as usize, y as usize, z as usize]);
                    for &pi in &self.cells[idx] {
                        let d2 = (pts[pi as usize] - q).norm_squared();
                        if d2 < *best {
                            *best = d2;
                        }
                    }
                }
            }
        }
    }
}

/// Accuracy as a function of error threshold, plus its normalized area.
#[derive(Debug, Clone, PartialEq)]
pub struct AccuracyCurve {
    /// Ascending thresholds from 0 to the configured maximum, meters.
    pub thresholds: Vec<f64>,
    /// Fraction of errors ≤ each threshold.
    pub accuracy: Vec<f64>,
    /// Trapezoidal area under the curve, normalized to [0, 1].
    pub auc: f64,
}

/// Sample accuracy (fraction of errors within threshold) at `n_steps`
/// evenly spaced thresholds from 0 to `max_threshold`, and integrate.
pub fn accuracy_auc(errors: &[f64], max_threshold: f64, n_steps: usize) -> Result<AccuracyCurve> {
    if errors.is_empty() {
        return Err(Error::EmptyErrors);
    }
    if !(max_threshold > 0.0 && max_threshold.is_finite()) {
        return Err(Error::InvalidThreshold(max_threshold));
    }
    assert!(n_steps >= 2, "curve needs at least two thresholds");
    let n = errors.len() as f64;
    let mut thresholds = Vec::with_capacity(n_steps);
    let mut accuracy = Vec::with_capacity(n_steps);
    for i in 0..n_steps {
        let tau = max_threshold * i as f64 / (n_steps - 1) as f64;
        let within = errors.iter().filter(|&&e| e <= tau).count();
        thresholds.push(tau);
        accuracy.push(within as f64 / n);
    }
    let mut area = 0.0;
    for i in 1..n_steps {
        area += 0.5 * (accuracy[i - 1] + accuracy[i]);
    }
    Ok(AccuracyCurve {
        thresholds,
        accuracy,
        auc: area / (n_steps - 1) as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;
    use crate::symmetry::SymmetryGroup;
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    #[test]
    fn iou_fixtures() {
        let full = SilhouetteMask::from_fn(64, |_, _| true);
        let left = SilhouetteMask::from_fn(64, |x, _| x < 32);
        let right = SilhouetteMask::from_fn(64, |x, _| x >= 32);
        let empty = SilhouetteMask::new(64);
        assert_eq!(iou(&full, &full).unwrap(), 1.0);
        assert_eq!(iou(&left, &right).unwrap(), 0.0);
        assert_eq!(iou(&left, &full).unwrap(), 0.5);
        assert_eq!(iou(&empty, &empty).unwrap(), 1.0);
        assert_eq!(iou(&empty, &full).unwrap(), 0.0);
        assert!(iou(&full, &SilhouetteMask::new(32)).is_err());
    }

    #[test]
    fn angular_error_fixtures() {
        let none = SymmetryGroup::none();
        let mut rng = sampling::rng(3);
        let gt = sampling::uniform_quaternion(&mut rng);
        assert_eq!(angular_error_deg(gt, gt, &none), 0.0);

        let est = Quaternion::about_x(10f64.to_radians()) * gt;
        assert_abs_diff_eq!(angular_error_deg(est, gt, &none), 10.0, epsilon = 1e-9);

        let axial = SymmetryGroup::axis(Vec3::Z).unwrap();
        let spun = gt * Quaternion::about_z(rng.gen_range(0.0..std::f64::consts::TAU));
        assert!(angular_error_deg(spun, gt, &axial) < 1e-6);
    }

    #[test]
    fn translation_error_fixtures() {
        let a = Vec3::new(0.0, 0.0, 1.0);
        assert_eq!(translation_error_cm(a, a), 0.0);
        assert_abs_diff_eq!(
            translation_error_cm(a, Vec3::new(0.0, 0.0, 1.05)),
            5.0,
            epsilon = 1e-12
        );
        let mut rng = sampling::rng(5);
        for _ in 0..200 {
            let p = Vec3::new(rng.gen(), rng.gen(), rng.gen());
            let q = Vec3::new(rng.gen(), rng.gen(), rng.gen());
            assert_abs_diff_eq!(
                translation_error_cm(p, q),
                (p - q).norm() * 100.0,
                epsilon = 1e-15
            );
        }
    }

    fn random_cloud(n: usize, seed: u64) -> Vec<Vec3> {
        let mut rng = sampling::rng(seed);
        (0..n)
            .map(|_| {
                Vec3::new(
                    rng.gen_range(-0.1..0.1),
                    rng.gen_range(-0.1..0.1),
                    rng.gen_range(-0.1..0.1),
                )
            })
            .collect()
    }

    fn random_pose(rng: &mut impl Rng) -> RigidTransform {
        RigidTransform::new(
            sampling::uniform_quaternion(rng),
            Vec3::new(
                rng.gen_range(-0.5..0.5),
                rng.gen_range(-0.5..0.5),
                rng.gen_range(0.5..2.0),
            ),
        )
    }

    #[test]
    fn add_s_zero_at_equality_and_exact_for_single_point() {
        let mut rng = sampling::rng(7);
        let pose = random_pose(&mut rng);
        let cloud = random_cloud(100, 1);
        assert_eq!(add_s(&pose, &pose, &cloud).unwrap(), 0.0);

        let id = RigidTransform::IDENTITY;
        let shifted = RigidTransform::new(Quaternion::IDENTITY, Vec3::new(0.01, 0.0, 0.0));
        let single = [Vec3::new(0.02, -0.01, 0.03)];
        assert_abs_diff_eq!(add_s(&shifted, &id, &single).unwrap(), 0.01, epsilon = 1e-15);
        // Multi-point sets can only do better than the corresponding-point
        // distance.
        let cloud = random_cloud(200, 2);
        assert!(add_s(&shifted, &id, &cloud).unwrap() <= 0.01 + 1e-15);
    }

    #[test]
    fn add_s_ignores_ring_symmetry_within_discretization() {
        let r = 0.05;
        let ring: Vec<Vec3> = (0..360)
            .map(|i| {
                let a = (i as f64).to_radians();
                Vec3::new(r * a.cos(), r * a.sin(), 0.0)
            })
            .collect();
        let gt = RigidTransform::new(Quaternion::IDENTITY, Vec3::new(0.0, 0.0, 1.0));
        // Spin by an exact grid multiple: rotated points coincide with
        // other ring points.
        let aligned = RigidTransform::new(Quaternion::about_z(30f64.to_radians()), gt.translation);
        assert!(add_s(&aligned, &gt, &ring).unwrap() < 1e-12);
        // Arbitrary spin: error bounded by half the chord between samples.
        let skew = RigidTransform::new(Quaternion::about_z(0.2345), gt.translation);
        let half_chord = r * (0.5f64.to_radians() / 2.0).sin() * 2.0;
        assert!(add_s(&skew, &gt, &ring).unwrap() <= half_chord + 1e-12);
    }

    #[test]
    fn add_s_never_exceeds_add() {
        let mut rng = sampling::rng(11);
        let cloud = random_cloud(300, 3);
        for _ in 0..50 {
            let est = random_pose(&mut rng);
            let gt = random_pose(&mut rng);
            let s = add_s(&est, &gt, &cloud).unwrap();
            let a = add(&est, &gt, &cloud).unwrap();
            assert!(s <= a + 1e-15, "add_s {s} > add {a}");
        }
    }

    #[test]
    fn add_s_rejects_empty_point_set() {
        let id = RigidTransform::IDENTITY;
        assert!(matches!(add_s(&id, &id, &[]), Err(Error::EmptyPointSet)));
        assert!(matches!(add(&id, &id, &[]), Err(Error::EmptyPointSet)));
    }

    #[test]
    fn grid_search_matches_brute_force_bit_for_bit() {
        let mut rng = sampling::rng(13);
        for trial in 0..5 {
            let est = random_pose(&mut rng);
            let gt = random_pose(&mut rng);
            let cloud = random_cloud(2000, 100 + trial);
            let est_pts: Vec<Vec3> = cloud.iter().map(|&p| est.apply(p)).collect();
            let gt_pts: Vec<Vec3> = cloud.iter().map(|&p| gt.apply(p)).collect();
            let brute = mean_closest_brute(&est_pts, &gt_pts);
            let grid = mean_closest_grid(&est_pts, &gt_pts);
            assert_eq!(brute.to_bits(), grid.to_bits(), "trial {trial}");
        }
    }

    #[test]
    fn grid_search_handles_degenerate_clouds() {
        // All points identical.
        let same = vec![Vec3::new(0.1, 0.2, 0.3); 50];
        let q = vec![Vec3::new(0.0, 0.0, 0.0); 1];
        let brute = mean_closest_brute(&q, &same);
        let grid = mean_closest_grid(&q, &same);
        assert_eq!(brute.to_bits(), grid.to_bits());

        // Colinear points (zero-volume bounding box).
        let line: Vec<Vec3> = (0..100).map(|i| Vec3::new(i as f64 * 0.01, 0.0, 0.0)).collect();
        let queries: Vec<Vec3> = (0..20).map(|i| Vec3::new(i as f64 * 0.037, 0.01, 0.0)).collect();
        assert_eq!(
            mean_closest_brute(&queries, &line).to_bits(),
            mean_closest_grid(&queries, &line).to_bits()
        );
    }

    #[test]
    fn large_point_sets_dispatch_to_grid_with_identical_results() {
        let mut rng = sampling::rng(17);
        let est = random_pose(&mut rng);
        let gt = random_pose(&mut rng);
        let cloud = random_cloud(6000, 42);
        let est_pts: Vec<Vec3> = cloud.iter().map(|&p| est.apply(p)).collect();
        let gt_pts: Vec<Vec3> = cloud.iter().map(|&p| gt.apply(p)).collect();
        let through_api = add_s(&est, &gt, &cloud).unwrap();
        let brute = mean_closest_brute(&est_pts, &gt_pts);
        assert_eq!(through_api.to_bits(), brute.to_bits());
    }

    #[test]
    fn auc_boundary_cases() {
        let zeros = vec![0.0; 10];
        let curve = accuracy_auc(&zeros, 0.10, 100).unwrap();
        assert_eq!(curve.auc, 1.0);
        assert_eq!(curve.thresholds[0], 0.0);
        assert_eq!(*curve.thresholds.last().unwrap(), 0.10);

        let oversized = vec![0.2; 10];
        assert_eq!(accuracy_auc(&oversized, 0.10, 100).unwrap().auc, 0.0);

        assert!(matches!(accuracy_auc(&[], 0.1, 100), Err(Error::EmptyErrors)));
        assert!(accuracy_auc(&zeros, 0.0, 100).is_err());
        assert!(accuracy_auc(&zeros, -1.0, 100).is_err());
    }

    #[test]
    fn auc_of_uniform_errors_is_one_half() {
        let mut rng = sampling::rng(19);
        let errors: Vec<f64> = (0..10_000).map(|_| rng.gen_range(0.0..0.10)).collect();
        let curve = accuracy_auc(&errors, 0.10, 100).unwrap();
        assert!((curve.auc - 0.5).abs() < 0.02, "auc = {}", curve.auc);
    }

    #[test]
    fn auc_curve_is_monotone_and_larger_errors_never_help() {
        let mut rng = sampling::rng(23);
        for _ in 0..20 {
            let n = rng.gen_range(1..50);
            let mut errors: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..0.2)).collect();
            let curve = accuracy_auc(&errors, 0.10, 50).unwrap();
            for w in curve.accuracy.windows(2) {
                assert!(w[1] >= w[0]);
            }
            let before = curve.auc;
            errors.push(0.3); // worse than every threshold
            let after = accuracy_auc(&errors, 0.10, 50).unwrap().auc;
            assert!(after <= before + 1e-15);
        }
    }
}
