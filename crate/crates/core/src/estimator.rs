//! Orientation estimation by silhouette template matching, plus final 6D
//! pose assembly.
//!
//! The matcher scores a query silhouette against every template in a
//! viewpoint bank by IoU, then (optionally) refines the winner by a local
//! hill-climb that re-rasterizes perturbed orientations at the bank's
//! render distance. The search is exhaustive and deterministic: ties go
//! to the lowest bank index, and the returned orientations are
//! canonicalized under the class's symmetry group, so two silhouettes of
//! symmetry-equivalent orientations yield the same answer.

use serde::{Deserialize, Serialize};

use crate::bank::ViewpointBank;
use crate::codec::{self, TranslationCode};
use crate::error::{Error, Result};
use crate::exec;
use crate::geometry::{CameraIntrinsics, Quaternion, Roi, Vec3};
use crate::mask::SilhouetteMask;
use crate::mesh::TriangleMesh;
use crate::render;
use crate::symmetry::SymmetryGroup;

/// Number of runner-up candidates kept in a [`MatchResult`].
pub const TOP_K: usize = 5;

/// Hill-climb step sizes, degrees: halving from 7.5° to just under 0.5°.
const REFINE_STEPS_DEG: [f64; 5] = [7.5, 3.75, 1.875, 0.9375, 0.46875];

/// Stop climbing at a step size once the best move improves IoU by less
/// than this.
const REFINE_MIN_IMPROVEMENT: f64 = 1e-3;

/// One scored bank candidate; `orientation` is canonical under the class
/// symmetry group.
#[derive(Debug, Clone, Copy)]
pub struct ScoredMatch {
    pub index: usize,
    pub iou: f64,
    pub orientation: Quaternion,
}

/// Outcome of matching one silhouette against a bank.
#[derive(Debug, Clone)]
pub struct MatchResult {
    /// Best orientation (refined if requested), canonicalized.
    pub best: Quaternion,
    /// IoU of the best orientation's silhouette against the query.
    pub best_iou: f64,
    /// Bank index the best orientation descends from.
    pub best_index: usize,
    /// Top bank candidates, scores descending (ties by ascending index).
    pub top_k: Vec<ScoredMatch>,
}

/// Where a pose estimate's translation evidence came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoseProvenance {
    GtRoi,
    PredRoi,
    Synthetic,
}

/// Full 6D pose in the camera frame. The orientation is the *true* one
/// (viewing-ray correction already applied), not the apparent one.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PoseEstimate {
    pub class_id: String,
    pub orientation: Quaternion,
    pub translation: Vec3,
    pub provenance: PoseProvenance,
}

/// Shares the mesh, camera, bank, and symmetry group needed to match
/// silhouettes of one class. Everything borrowed is immutable, so one
/// matcher serves concurrent frame evaluation.
pub struct TemplateMatcher<'a> {
    mesh: &'a TriangleMesh,
    k: &'a CameraIntrinsics,
    bank: &'a ViewpointBank,
    group: &'a SymmetryGroup,
}

impl<'a> TemplateMatcher<'a> {
    pub fn new(
        mesh: &'a TriangleMesh,
        k: &'a CameraIntrinsics,
        bank: &'a ViewpointBank,
        group: &'a SymmetryGroup,
    ) -> TemplateMatcher<'a> {
        TemplateMatcher {
            mesh,
            k,
            bank,
            group,
        }
    }

    pub fn bank(&self) -> &ViewpointBank {
        self.bank
    }

    /// Exhaustive template match, with optional local refinement.
    pub fn match_orientation(&self, sil: &SilhouetteMask, refine: bool) -> Result<MatchResult> {
        if sil.is_empty() {
            return Err(Error::EmptySilhouette);
        }
        if sil.resolution() != self.bank.resolution() {
            return Err(Error::ResolutionMismatch {
                a: sil.resolution(),
                b: self.bank.resolution(),
            });
        }

        let entries = self.bank.entries();
        let scores = exec::map_indices(entries.len(), |i| {
            let (inter, union) = sil
                .overlap_counts(&entries[i].mask)
                .expect("bank resolution checked above");
            // union > 0 because the query is nonempty.
            inter as f64 / union as f64
        });

        // Strict comparison keeps the lowest index on ties.
        let mut best_index = 0usize;
        for (i, &s) in scores.iter().enumerate() {
            if s > scores[best_index] {
                best_index = i;
            }
        }

        let mut order: Vec<usize> = (0..entries.len()).collect();
        order.sort_by(|&a, &b| {
            scores[b]
                .partial_cmp(&scores[a])
                .expect("IoU scores are finite")
                .then(a.cmp(&b))
        });
        let top_k = order
            .iter()
            .take(TOP_K)
            .map(|&i| ScoredMatch {
                index: i,
                iou: scores[i],
                orientation: self.group.canonicalize(entries[i].orientation),
            })
            .collect();

        let (mut best_q, mut best_iou) = (entries[best_index].orientation, scores[best_index]);
        if refine {
            (best_q, best_iou) = self.hill_climb(sil, best_q, best_iou)?;
        }

        Ok(MatchResult {
            best: self.group.canonicalize(best_q),
            best_iou,
            best_index,
            top_k,
        })
    }

    /// Greedy local search over axis nudges with a halving step schedule.
    /// The score never decreases; each step size is abandoned once its
    /// best move gains less than [`REFINE_MIN_IMPROVEMENT`].
    fn hill_climb(
        &self,
        sil: &SilhouetteMask,
        start: Quaternion,
        start_iou: f64,
    ) -> Result<(Quaternion, f64)> {
        let mut q = start;
        let mut iou = start_iou;
        for step_deg in REFINE_STEPS_DEG {
            let delta = step_deg.to_radians();
            loop {
                let mut candidate = q;
                let mut candidate_iou = iou;
                for axis in [Vec3::X, Vec3::Y, Vec3::Z] {
                    for sign in [1.0, -1.0] {
                        let nudged =
                            (q * Quaternion::from_axis_angle(axis, sign * delta)).normalized();
                        let score = self.score(sil, nudged)?;
                        if score > candidate_iou {
                            candidate = nudged;
                            candidate_iou = score;
                        }
                    }
                }
                let improvement = candidate_iou - iou;
                if candidate_iou > iou {
                    q = candidate;
                    iou = candidate_iou;
                }
                if improvement < REFINE_MIN_IMPROVEMENT {
                    break;
                }
            }
        }
        Ok((q, iou))
    }

    /// IoU of the query against a fresh render at `orientation`.
    fn score(&self, sil: &SilhouetteMask, orientation: Quaternion) -> Result<f64> {
        let mask = render::rasterize_silhouette(
            self.mesh,
            orientation,
            self.k,
            self.bank.render_distance(),
            self.bank.resolution(),
        )?;
        let (inter, union) = sil.overlap_counts(&mask)?;
        Ok(if union == 0 {
            1.0
        } else {
            inter as f64 / union as f64
        })
    }
}

/// Combine a matched apparent orientation with a decoded translation into
/// the final camera-frame pose.
pub fn assemble_pose(
    matched: &MatchResult,
    code: &TranslationCode,
    roi: &Roi,
    k: &CameraIntrinsics,
    class_id: &str,
    provenance: PoseProvenance,
) -> Result<PoseEstimate> {
    let translation = codec::decode(code, roi, k)?;
    let orientation = codec::apparent_to_true(matched.best, translation);
    Ok(PoseEstimate {
        class_id: class_id.to_string(),
        orientation,
        translation,
        provenance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bank::{generate_bank, generate_bank_icosphere};
    use crate::mesh;
    use crate::sampling;

    fn camera() -> CameraIntrinsics {
        CameraIntrinsics::new(1600.0, 320.0, 240.0, 640.0, 480.0).unwrap()
    }

    #[test]
    fn self_match_returns_the_entry_with_perfect_score() {
        let k = camera();
        let brick = mesh::cuboid(0.06, 0.14, 0.10).unwrap();
        let bank = generate_bank(&brick, &k, "brick", 45.0, &[-30.0, 30.0], 64).unwrap();
        let group = SymmetryGroup::none();
        let matcher = TemplateMatcher::new(&brick, &k, &bank, &group);
        for probe in [0usize, 5, 11, 15] {
            let entry = &bank.entries()[probe];
            for refine in [false, true] {
                let result = matcher.match_orientation(&entry.mask, refine).unwrap();
                assert_eq!(result.best_iou, 1.0, "refine = {refine}");
                // A cuboid view repeats every 180 degrees of azimuth, so an
                // earlier duplicate may win the tie — but only with an
                // identical mask.
                let won = &bank.entries()[result.best_index];
                assert_eq!(won.mask, entry.mask);
                assert!(result.best.angle_to(won.orientation) < 1e-12);
            }
        }
    }

    #[test]
    fn empty_queries_and_resolution_mismatches_are_rejected() {
        let k = camera();
        let cube = mesh::cube(0.08).unwrap();
        let bank = generate_bank(&cube, &k, "cube", 90.0, &[0.0], 64).unwrap();
        let group = SymmetryGroup::none();
        let matcher = TemplateMatcher::new(&cube, &k, &bank, &group);
        assert!(matches!(
            matcher.match_orientation(&SilhouetteMask::new(64), false),
            Err(Error::EmptySilhouette)
        ));
        let wrong_res = SilhouetteMask::from_fn(32, |_, _| true);
        assert!(matches!(
            matcher.match_orientation(&wrong_res, false),
            Err(Error::ResolutionMismatch { .. })
        ));
    }

    #[test]
    fn top_k_is_sorted_descending_with_index_tiebreak() {
        let k = camera();
        let cube = mesh::cube(0.08).unwrap();
        let bank = generate_bank(&cube, &k, "cube", 30.0, &[-30.0, 0.0, 30.0], 64).unwrap();
        let group = SymmetryGroup::none();
        let matcher = TemplateMatcher::new(&cube, &k, &bank, &group);
        let result = matcher
            .match_orientation(&bank.entries()[7].mask, false)
            .unwrap();
        assert_eq!(result.top_k.len(), TOP_K);
        for pair in result.top_k.windows(2) {
            assert!(
                pair[0].iou > pair[1].iou
                    || (pair[0].iou == pair[1].iou && pair[0].index < pair[1].index)
            );
        }
        assert_eq!(result.top_k[0].index, result.best_index);
    }

    #[test]
    fn symmetric_orientations_match_to_the_same_answer() {
        let k = camera();
        let brick = mesh::cuboid(0.06, 0.14, 0.10).unwrap();
        let group = SymmetryGroup::two_planes(Vec3::X, Vec3::Y).unwrap();
        let bank = generate_bank_icosphere(&brick, &k, "brick", 1, 8, 64).unwrap();
        let matcher = TemplateMatcher::new(&brick, &k, &bank, &group);
        let mut rng = sampling::rng(31);
        let q = sampling::uniform_quaternion(&mut rng);
        let distance = bank.render_distance();
        let base = render::rasterize_silhouette(&brick, q, &k, distance, 64).unwrap();
        let matched_base = matcher.match_orientation(&base, false).unwrap();
        for s in group.discrete_elements().unwrap() {
            let twin = render::rasterize_silhouette(&brick, q * s, &k, distance, 64).unwrap();
            assert_eq!(base, twin, "exact symmetry must rasterize identically");
            let matched_twin = matcher.match_orientation(&twin, false).unwrap();
            assert_eq!(matched_base.best_index, matched_twin.best_index);
            assert!(group.sym_angle(matched_base.best, matched_twin.best) < 1e-12);
        }
    }

    #[test]
    fn refinement_never_hurts_and_recovers_off_grid_orientations() {
        let k = camera();
        let brick = mesh::cuboid(0.06, 0.14, 0.10).unwrap();
        let group = SymmetryGroup::none();
        // 15°-pitch grid in both azimuth and elevation.
        let bank = generate_bank(
            &brick,
            &k,
            "brick",
            15.0,
            &[-30.0, -15.0, 0.0, 15.0, 30.0],
            64,
        )
        .unwrap();
        let matcher = TemplateMatcher::new(&brick, &k, &bank, &group);

        // Truth midway between grid nodes in both angles.
        let truth = Quaternion::about_x((-7.5f64).to_radians())
            * Quaternion::about_z(7.5f64.to_radians());
        let sil = render::rasterize_silhouette(&brick, truth, &k, bank.render_distance(), 64)
            .unwrap();

        let coarse = matcher.match_orientation(&sil, false).unwrap();
        let refined = matcher.match_orientation(&sil, true).unwrap();
        assert!(refined.best_iou >= coarse.best_iou);
        let err = group.sym_angle(refined.best, truth).to_degrees();
        assert!(err <= 5.0, "refined error {err}° exceeds 5°");
        assert!(
            err <= group.sym_angle(coarse.best, truth).to_degrees() + 1e-9,
            "refinement moved away from the truth"
        );
    }

    #[test]
    fn fully_degenerate_scores_tie_to_the_lowest_index() {
        let k = camera();
        let ball = mesh::icosphere(0.05, 1).unwrap();
        let bank = generate_bank(&ball, &k, "ball", 90.0, &[0.0], 64).unwrap();
        let group = SymmetryGroup::axis(Vec3::Z).unwrap();
        let matcher = TemplateMatcher::new(&ball, &k, &bank, &group);
        let result = matcher
            .match_orientation(&bank.entries()[2].mask, false)
            .unwrap();
        // Every view of a sphere is the same mask, so index 0 wins.
        assert_eq!(result.best_index, 0);
        assert_eq!(result.best_iou, 1.0);
        let canonical = group.canonicalize(bank.entries()[0].orientation);
        assert!(result.best.angle_to(canonical) < 1e-12);
    }

    #[test]
    fn assemble_pose_with_centered_roi_keeps_the_apparent_orientation() {
        let k = camera();
        let matched = MatchResult {
            best: Quaternion::about_y(0.7),
            best_iou: 1.0,
            best_index: 0,
            top_k: Vec::new(),
        };
        // ROI centered on the principal point and a code encoding a point
        // on the optical axis: the decoded center pixel offset is zero.
        let roi = Roi::new(k.cx - 50.0, k.cy - 40.0, 100.0, 80.0).unwrap();
        let code = codec::encode_translation(Vec3::new(0.0, 0.0, 1.25), &roi, &k).unwrap();
        let pose = assemble_pose(&matched, &code, &roi, &k, "cube", PoseProvenance::Synthetic)
            .unwrap();
        assert_eq!(pose.class_id, "cube");
        assert_eq!(pose.provenance, PoseProvenance::Synthetic);
        assert!((pose.translation - Vec3::new(0.0, 0.0, 1.25)).norm() < 1e-12);
        assert!(pose.orientation.angle_to(matched.best) < 1e-12);
    }

    #[test]
    fn assemble_pose_applies_the_viewing_ray_correction_off_center() {
        let k = camera();
        let q_apparent = Quaternion::about_x(0.3);
        let matched = MatchResult {
            best: q_apparent,
            best_iou: 1.0,
            best_index: 0,
            top_k: Vec::new(),
        };
        let roi = Roi::new(k.cx + 100.0, k.cy - 20.0, 60.0, 40.0).unwrap();
        let code = TranslationCode {
            nx: 0.5,
            ny: 0.5,
            range: 1.0,
        };
        let pose =
            assemble_pose(&matched, &code, &roi, &k, "cube", PoseProvenance::GtRoi).unwrap();
        let expected = codec::apparent_to_true(q_apparent, pose.translation);
        assert!(pose.orientation.angle_to(expected) < 1e-15);
        assert!(pose.translation.x > 0.0);
        assert!((pose.translation.norm() - 1.0).abs() < 1e-12);
    }
}
