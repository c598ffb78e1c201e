//! Boundary refinement for segmentation masks.
//!
//! A jagged mask boundary is traced, fitted with a coarse cubic B-spline,
//! re-anchored to Canny edges found in a band around that curve, adaptively
//! resampled by curvature, and refitted with a quadratic B-spline. The
//! refined closed curve is filled back into a mask.
//!
//! The crate is organised by stage:
//!
//! - [`geometry`]: B-spline basis, evaluation, derivatives, curvature and
//!   least-squares fitting.
//! - [`raster`]: masks, images, contour tracing, dilation, curve
//!   rasterization and polygon fill.
//! - [`edge`]: Gaussian smoothing and Canny edge detection.
//! - [`sampling`]: KD-tree, curvature-based and Canny-anchored sampling.
//! - [`pipeline`]: the per-mask refinement driver and timing report.
//! - [`metrics`]: discrete curvature statistics and discrete Fréchet distance.
//! - [`synth`]: seeded synthetic fixtures (pentagram, disk, square).

pub mod edge;
pub mod error;
pub mod geometry;
pub mod metrics;
pub mod pipeline;
pub mod raster;
pub mod sampling;
pub mod synth;

pub use error::{Error, Result};
pub use geometry::{BSplineCurve, CurveSample, KnotVector, Point2};
pub use pipeline::{refine_all, refine_mask, RefineConfig, RefineResult};
pub use raster::{BinaryMask, Contour, GrayImage, RegionMask};
