//! B-spline curve mathematics.

mod bspline;
mod fit;
mod point;

pub use bspline::{basis, basis_all, BSplineCurve, CurveSample, DerivativeEvaluator, KnotVector};
pub use fit::{fit_closed_curve, fit_curve, uniform_parameters, FitOutcome};
pub use point::Point2;
