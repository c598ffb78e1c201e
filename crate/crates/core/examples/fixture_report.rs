//! Prints smoothing and Fréchet statistics of the refinement on synthetic
//! fixtures.
//!
//! `cargo run --release -p splinemask-core --example fixture_report [size] [jitter] [seeds]`

use splinemask_core::metrics::{discrete_curvature, frechet_distance_cyclic, CurvatureMode};
use splinemask_core::pipeline::{refine_all_with_depth, PipelineDepth};
use splinemask_core::raster::largest_contour;
use splinemask_core::synth::{generate, Shape};
use splinemask_core::{BinaryMask, Point2, RefineConfig};

fn contour_of(mask: &BinaryMask) -> Vec<Point2> {
    largest_contour(mask).map(|c| c.points).unwrap_or_default()
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let size: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(256);
    let jitter: f64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(2.0);
    let seeds: u64 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(10);
    let config = RefineConfig::default();
    println!("shape      seed  var_jit   var_ref   fd_jit  fd_coarse fd_ref");
    for shape in Shape::ALL {
        for seed in 0..seeds {
            let f = generate(shape, size, jitter, seed).expect("fixture");
            let truth = contour_of(&f.clean);
            let jit = contour_of(&f.jittered);
            let masks = [f.jittered.clone()];
            let full = refine_all_with_depth(&f.image, &masks, &config, PipelineDepth::Full).unwrap();
            let coarse =
                refine_all_with_depth(&f.image, &masks, &config, PipelineDepth::CoarseOnly).unwrap();
            let refined = contour_of(&full[0].refined_mask);
            let coarse_c = contour_of(&coarse[0].refined_mask);
            let var = |c: &[Point2]| {
                discrete_curvature(c, CurvatureMode::Menger)
                    .unwrap()
                    .curvature_variance
            };
            let fd = |c: &[Point2]| frechet_distance_cyclic(&truth, c).unwrap().distance;
            println!(
                "{:<10} {seed:>4}  {:.5}  {:.5}  {:.3}  {:.3}  {:.3}  {:?}",
                shape.name(),
                var(&jit),
                var(&refined),
                fd(&jit),
                fd(&coarse_c),
                fd(&refined),
                full[0].flags
            );
        }
    }
}
