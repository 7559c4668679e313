//! Geometry and evaluation toolkit for silhouette-based 6D object pose
//! estimation.
//!
//! The pipeline renders binary silhouettes of a mesh at a canonical
//! per-class distance, recovers 3D translation from ROI-anchored
//! center/range codes, corrects the apparent orientation of off-center
//! detections, reasons about occlusion by re-projecting masks into the
//! scene, and scores estimates with the usual pose metrics (IoU,
//! symmetry-reduced angular error, translation error, ADD-S with
//! accuracy-threshold AUC). A deterministic template matcher recovers
//! orientation from a silhouette against a pre-rendered viewpoint bank.
//!
//! Data-parallel stages (bank generation, template scoring, batch
//! evaluation) run on rayon when the default `parallel` feature is on and
//! fall back to plain sequential loops without it. All outputs are
//! byte-deterministic for a fixed seed either way.

pub mod bank;
pub mod codec;
pub mod error;
pub mod estimator;
pub mod eval;
pub mod exec;
pub mod geometry;
pub mod mask;
pub mod mesh;
pub mod metrics;
pub mod occlusion;
pub mod render;
pub mod report;
pub mod sampling;
pub mod scene;
pub mod symmetry;

pub use error::{Error, Result};
pub use geometry::{CameraIntrinsics, Quaternion, RigidTransform, Roi, Vec3};
pub use mask::SilhouetteMask;
pub use mesh::TriangleMesh;
