//! Adaptive resampling of the coarse curve.
//!
//! [`curvature_sampling`] flags uniform samples whose curvature exceeds a
//! threshold; [`canny_sampling`] walks the same uniform samples in order and
//! replaces each by a Canny-anchored centroid, collapsing flat stretches.

mod kdtree;

use serde::{Deserialize, Serialize};

pub use kdtree::{kd_radius_query, KdTree2};

use crate::error::{param_err, Result};
use crate::geometry::{BSplineCurve, Point2};

/// Consecutive outputs closer than this are merged.
const DUPLICATE_EPS: f64 = 1e-9;

/// `n` evenly spaced samples of a closed curve with their curvature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformSamples {
    pub params: Vec<f64>,
    pub points: Vec<Point2>,
    pub curvatures: Vec<f64>,
}

/// Samples whose curvature exceeds the threshold, identified by their index
/// in the generating uniform sampling.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct HighCurvatureSet {
    pub indices: Vec<usize>,
    pub params: Vec<f64>,
    pub points: Vec<Point2>,
}

impl HighCurvatureSet {
    #[must_use]
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Which rule produced an output sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleCase {
    /// No Canny edge nearby: the coarse sample is kept.
    Kept,
    /// High-curvature sample: centroid of nearby Canny points.
    HighCurvature,
    /// Flat region: centroid of nearby Canny points and coarse samples.
    Merged,
}

/// Ordered key samples for the fine fit.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub points: Vec<Point2>,
    /// Index of the uniform sample that generated each point.
    pub sources: Vec<usize>,
    pub cases: Vec<SampleCase>,
}

impl SampleSet {
    #[must_use]
    pub fn len(&self) -> usize {
        self.points.len()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Evaluates position and curvature at `n` evenly spaced parameters of a
/// closed curve.
pub fn uniform_samples(curve: &BSplineCurve, n: usize) -> Result<UniformSamples> {
    let eval = curve.derivative_evaluator();
    let params = curve.loop_parameters(n);
    let mut points = Vec::with_capacity(n);
    let mut curvatures = Vec::with_capacity(n);
    for &t in &params {
        let s = eval.sample(t)?;
        points.push(s.point);
        curvatures.push(s.curvature);
    }
    Ok(UniformSamples {
        params,
        points,
        curvatures,
    })
}

/// Keeps the uniform samples whose curvature is strictly above `theta`.
pub fn select_high_curvature(samples: &UniformSamples, theta: f64) -> HighCurvatureSet {
    let mut set = HighCurvatureSet::default();
    for (i, &k) in samples.curvatures.iter().enumerate() {
        if k > theta {
            set.indices.push(i);
            set.params.push(samples.params[i]);
            set.points.push(samples.points[i]);
        }
    }
    set
}

/// Samples `n` parameters uniformly over the curve and returns those with
/// curvature above `theta`, in parameter order.
pub fn curvature_sampling(curve: &BSplineCurve, n: usize, theta: f64) -> Result<HighCurvatureSet> {
    if n < 8 {
        return param_err(format!("curvature sampling needs n >= 8, got {n}"));
    }
    if !(theta > 0.0) {
        return param_err(format!("curvature threshold must be positive, got {theta}"));
    }
    Ok(select_high_curvature(&uniform_samples(curve, n)?, theta))
}

/// Canny-anchored resampling of the uniform coarse samples.
///
/// For each `p_i` in order, with `C` the Canny points within `r`:
/// 1. `C` empty: keep `p_i`.
/// 2. `i` is a high-curvature index: emit the centroid of `C`.
/// 3. `p_i` not yet handled: mark every uniform sample within `r` of `p_i`
///    as handled and emit the centroid of `C` together with those samples.
///
/// Handled samples that reach rule 3 emit nothing.
pub fn canny_sampling(
    p_unif: &[Point2],
    p_hc: &HighCurvatureSet,
    cad_canny: &[Point2],
    r: f64,
) -> Result<SampleSet> {
    if p_unif.is_empty() {
        return param_err("canny sampling needs at least one uniform sample");
    }
    if !(r > 0.0) {
        return param_err(format!("search radius must be positive, got {r}"));
    }
    let canny_tree = KdTree2::new(cad_canny);
    let coarse_tree = KdTree2::new(p_unif);
    let mut high = vec![false; p_unif.len()];
    for &i in &p_hc.indices {
        if let Some(flag) = high.get_mut(i) {
            *flag = true;
        }
    }
    let mut handled = vec![false; p_unif.len()];
    let mut out = SampleSet::default();
    let mut push = |p: Point2, i: usize, case: SampleCase| {
        if let Some(last) = out.points.last() {
            if last.distance(p) < DUPLICATE_EPS {
                return;
            }
        }
        out.points.push(p);
        out.sources.push(i);
        out.cases.push(case);
    };

    for (i, &p) in p_unif.iter().enumerate() {
        let near_canny = canny_tree.within_radius(p, r);
        if near_canny.is_empty() {
            push(p, i, SampleCase::Kept);
        } else if high[i] {
            let c = Point2::centroid(near_canny.iter().map(|&j| &cad_canny[j]))
                .expect("non-empty neighbour set");
            push(c, i, SampleCase::HighCurvature);
        } else if !handled[i] {
            let near_coarse = coarse_tree.within_radius(p, r);
            for &j in &near_coarse {
                handled[j] = true;
            }
            let c = Point2::centroid(
                near_canny
                    .iter()
                    .map(|&j| &cad_canny[j])
                    .chain(near_coarse.iter().map(|&j| &p_unif[j])),
            )
            .expect("non-empty neighbour set");
            push(c, i, SampleCase::Merged);
        }
    }
    Ok(out)
}
