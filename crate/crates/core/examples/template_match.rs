use silpose_core::bank::generate_bank_icosphere;
use silpose_core::estimator::TemplateMatcher;
use silpose_core::geometry::{CameraIntrinsics, Vec3};
use silpose_core::render::{self, rasterize_silhouette};
use silpose_core::symmetry::SymmetryGroup;
use silpose_core::{mesh, sampling};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let k = CameraIntrinsics::new(1600.0, 320.0, 240.0, 640.0, 480.0)?;
    let cuboid = mesh::cuboid(0.06, 0.14, 0.10)?;
    let distance = render::render_distance(cuboid.extent(), k.min_fov())?;

    // 162 directions x 24 in-plane spins = 3888 templates at 64 px.
    let bank = generate_bank_icosphere(&cuboid, &k, "cuboid", 2, 24, 64)?;
    let group = SymmetryGroup::two_planes(Vec3::X, Vec3::Y)?;

    let truth = sampling::uniform_quaternion(&mut sampling::rng(7));
    let query = rasterize_silhouette(&cuboid, truth, &k, distance, 64)?;

    let matcher = TemplateMatcher::new(&cuboid, &k, &bank, &group);
    let result = matcher.match_orientation(&query, true)?;
    let err = group.sym_angle(result.best, truth);
    println!("IoU {:.3}, error {:.2} deg", result.best_iou, err.to_degrees());
    Ok(())
}
