//! Per-mask refinement driver.
//!
//! Each mask goes through four stages:
//!
//! 1. trace the outer contour and fit a closed coarse curve;
//! 2. rasterize and dilate that curve into a band and keep the Canny edges
//!    inside it;
//! 3. flag high-curvature samples of the coarse curve and resample it
//!    against the banded edges;
//! 4. fit a closed fine curve to the resampled points and fill it into the
//!    refined mask.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::edge::{canny, mask_edges, CannyParams, EdgeMap};
use crate::error::{param_err, Result};
use crate::geometry::{fit_closed_curve, BSplineCurve};
use crate::raster::{
    check_dims, dilate_polyline, fill_polygon, largest_contour, rasterize_curve, BinaryMask,
    Contour, GrayImage,
};
use crate::sampling::{canny_sampling, select_high_curvature, uniform_samples, SampleSet};

/// Every tunable of the refinement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RefineConfig {
    pub coarse_degree: usize,
    pub fine_degree: usize,
    /// Control points ≈ data points / ratio, clamped to
    /// `[min_control_points, max_control_points]`.
    pub control_point_ratio: f64,
    pub min_control_points: usize,
    pub max_control_points: usize,
    pub dilation_radius: f64,
    pub canny: CannyParams,
    /// Uniform samples of the coarse curve; `None` uses
    /// `max(64, round(0.5 · contour perimeter))`.
    pub sample_count_n: Option<usize>,
    pub curvature_theta: f64,
    /// Neighbour search radius; `None` uses `dilation_radius`.
    pub kd_radius_r: Option<f64>,
    /// Contours with fewer points pass through unchanged.
    pub min_contour_points: usize,
    pub raster_samples: usize,
}

impl Default for RefineConfig {
    fn default() -> Self {
        Self {
            coarse_degree: 3,
            fine_degree: 2,
            control_point_ratio: 5.0,
            min_control_points: 8,
            max_control_points: 128,
            dilation_radius: 3.0,
            canny: CannyParams::default(),
            sample_count_n: None,
            curvature_theta: 0.05,
            kd_radius_r: None,
            min_contour_points: 12,
            raster_samples: 512,
        }
    }
}

impl RefineConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.coarse_degree >= self.fine_degree && self.fine_degree >= 1) {
            return param_err(format!(
                "need coarse_degree >= fine_degree >= 1, got {} and {}",
                self.coarse_degree, self.fine_degree
            ));
        }
        if !(self.control_point_ratio > 0.0 && self.control_point_ratio.is_finite()) {
            return param_err("control_point_ratio must be positive");
        }
        if self.min_control_points == 0 || self.min_control_points > self.max_control_points {
            return param_err("need 0 < min_control_points <= max_control_points");
        }
        if !(self.dilation_radius >= 1.0 && self.dilation_radius.is_finite()) {
            return param_err("dilation_radius must be at least 1");
        }
        self.canny.validate()?;
        if matches!(self.sample_count_n, Some(n) if n < 8) {
            return param_err("sample_count_n must be at least 8");
        }
        if !(self.curvature_theta > 0.0) {
            return param_err("curvature_theta must be positive");
        }
        if matches!(self.kd_radius_r, Some(r) if !(r > 0.0)) {
            return param_err("kd_radius_r must be positive");
        }
        if self.min_contour_points == 0 {
            return param_err("min_contour_points must be positive");
        }
        if self.raster_samples < 8 {
            return param_err("raster_samples must be at least 8");
        }
        Ok(())
    }

    /// Control points for a closed fit of `data_count` points, or `None` when
    /// the data cannot support a curve of this degree.
    #[must_use]
    pub fn control_budget(&self, data_count: usize, degree: usize) -> Option<usize> {
        let raw = (data_count as f64 / self.control_point_ratio).round() as usize;
        let count = raw
            .clamp(self.min_control_points, self.max_control_points)
            .min(data_count.saturating_sub(degree));
        (count > degree).then_some(count)
    }

    #[must_use]
    pub fn sample_count(&self, perimeter: f64) -> usize {
        self.sample_count_n
            .unwrap_or_else(|| ((0.5 * perimeter).round() as usize).max(64))
    }

    #[must_use]
    pub fn search_radius(&self) -> f64 {
        self.kd_radius_r.unwrap_or(self.dilation_radius)
    }
}

/// Warnings attached to a result.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RefineFlag {
    /// The input mask was returned unchanged.
    Passthrough,
    /// The mask had no foreground.
    EmptyMask,
    /// The traced contour had fewer than `min_contour_points` points.
    SmallContour,
    CoarseRegularized,
    FineRegularized,
    /// Too few key samples for the fine fit; the coarse curve was reused.
    FineFallback,
    /// The refinement failed; carries the error message.
    Failed(String),
}

/// Wall-clock time spent in each stage.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageTimings {
    pub coarse_fitting: Duration,
    pub dilated_canny: Duration,
    pub adaptive_sampling: Duration,
    pub fine_fitting: Duration,
}

impl StageTimings {
    pub const NAMES: [&'static str; 4] = [
        "coarse_fitting",
        "dilated_canny",
        "adaptive_sampling",
        "fine_fitting",
    ];

    #[must_use]
    pub fn as_array(&self) -> [Duration; 4] {
        [
            self.coarse_fitting,
            self.dilated_canny,
            self.adaptive_sampling,
            self.fine_fitting,
        ]
    }

    #[must_use]
    pub fn total(&self) -> Duration {
        self.as_array().iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefineResult {
    pub mask_id: usize,
    /// Outer contour traced from the input mask.
    pub source_contour: Option<Contour>,
    pub coarse_curve: Option<BSplineCurve>,
    pub fine_curve: Option<BSplineCurve>,
    pub coarse_polyline: Option<Contour>,
    pub fine_polyline: Option<Contour>,
    pub sample_set: SampleSet,
    pub refined_mask: BinaryMask,
    pub stage_timings: StageTimings,
    pub flags: Vec<RefineFlag>,
}

impl RefineResult {
    fn passthrough(mask_id: usize, mask: &BinaryMask, flags: Vec<RefineFlag>) -> Self {
        let mut all = vec![RefineFlag::Passthrough];
        all.extend(flags);
        Self {
            mask_id,
            source_contour: None,
            coarse_curve: None,
            fine_curve: None,
            coarse_polyline: None,
            fine_polyline: None,
            sample_set: SampleSet::default(),
            refined_mask: mask.clone(),
            stage_timings: StageTimings::default(),
            flags: all,
        }
    }

    #[must_use]
    pub fn is_passthrough(&self) -> bool {
        self.flags.contains(&RefineFlag::Passthrough)
    }
}

/// How many stages to run; `CoarseOnly` stops after the coarse fit and fills
/// the coarse curve.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum PipelineDepth {
    CoarseOnly,
    #[default]
    Full,
}

/// Refines one mask against its source image.
pub fn refine_mask(image: &GrayImage, mask: &BinaryMask, config: &RefineConfig) -> Result<RefineResult> {
    check_dims(image.dimensions(), mask.dimensions())?;
    config.validate()?;
    let start = Instant::now();
    let edges = canny(image, &config.canny)?;
    let canny_time = start.elapsed();
    let mut result = refine_mask_with_edges(0, mask, &edges, config, PipelineDepth::Full)?;
    result.stage_timings.dilated_canny += canny_time;
    Ok(result)
}

/// Refines every mask against one shared Canny edge map. Results keep the
/// input order; a mask that fails is returned unchanged and flagged.
pub fn refine_all(
    image: &GrayImage,
    masks: &[BinaryMask],
    config: &RefineConfig,
) -> Result<Vec<RefineResult>> {
    refine_all_with_depth(image, masks, config, PipelineDepth::Full)
}

pub fn refine_all_with_depth(
    image: &GrayImage,
    masks: &[BinaryMask],
    config: &RefineConfig,
    depth: PipelineDepth,
) -> Result<Vec<RefineResult>> {
    for m in masks {
        check_dims(image.dimensions(), m.dimensions())?;
    }
    config.validate()?;
    if masks.is_empty() {
        return Ok(Vec::new());
    }
    let start = Instant::now();
    let edges = canny(image, &config.canny)?;
    // Edge detection runs once; each result carries an equal share of it.
    let canny_share = start.elapsed() / masks.len() as u32;
    Ok(masks
        .par_iter()
        .enumerate()
        .map(|(id, mask)| {
            match refine_mask_with_edges(id, mask, &edges, config, depth) {
                Ok(mut r) => {
                    r.stage_timings.dilated_canny += canny_share;
                    r
                }
                Err(e) => RefineResult::passthrough(id, mask, vec![RefineFlag::Failed(e.to_string())]),
            }
        })
        .collect())
}

/// Runs the stages for one mask given a precomputed edge map.
pub fn refine_mask_with_edges(
    mask_id: usize,
    mask: &BinaryMask,
    edges: &EdgeMap,
    config: &RefineConfig,
    depth: PipelineDepth,
) -> Result<RefineResult> {
    check_dims(edges.dimensions(), mask.dimensions())?;
    let (w, h) = mask.dimensions();
    let mut flags = Vec::new();
    let mut timings = StageTimings::default();

    // Stage 1
    let clock = Instant::now();
    let Some(contour) = largest_contour(mask) else {
        return Ok(RefineResult::passthrough(mask_id, mask, vec![RefineFlag::EmptyMask]));
    };
    let coarse_budget = config.control_budget(contour.len(), config.coarse_degree);
    let coarse_budget = match coarse_budget {
        Some(b) if contour.len() >= config.min_contour_points => b,
        _ => {
            let mut r = RefineResult::passthrough(mask_id, mask, vec![RefineFlag::SmallContour]);
            r.source_contour = Some(contour);
            return Ok(r);
        }
    };
    let coarse = fit_closed_curve(&contour.points, config.coarse_degree, coarse_budget)?;
    if coarse.regularized {
        flags.push(RefineFlag::CoarseRegularized);
    }
    let coarse_curve = coarse.curve;
    let coarse_polyline = rasterize_curve(&coarse_curve, config.raster_samples)?;
    timings.coarse_fitting = clock.elapsed();

    if depth == PipelineDepth::CoarseOnly {
        let clock = Instant::now();
        let refined_mask = polyline_mask(&coarse_polyline, mask, &mut flags)?;
        timings.fine_fitting = clock.elapsed();
        return Ok(RefineResult {
            mask_id,
            source_contour: Some(contour),
            coarse_curve: Some(coarse_curve),
            fine_curve: None,
            coarse_polyline: Some(coarse_polyline),
            fine_polyline: None,
            sample_set: SampleSet::default(),
            refined_mask,
            stage_timings: timings,
            flags,
        });
    }

    // Stage 2
    let clock = Instant::now();
    let region = dilate_polyline(&coarse_polyline, config.dilation_radius, w, h)?;
    let candidates = mask_edges(edges, &region)?;
    timings.dilated_canny = clock.elapsed();

    // Stage 3
    let clock = Instant::now();
    let n = config.sample_count(contour.perimeter());
    let uniform = uniform_samples(&coarse_curve, n)?;
    let high = select_high_curvature(&uniform, config.curvature_theta);
    let sample_set = canny_sampling(&uniform.points, &high, &candidates, config.search_radius())?;
    timings.adaptive_sampling = clock.elapsed();

    // Stage 4
    let clock = Instant::now();
    let fine_budget = config
        .control_budget(sample_set.len(), config.fine_degree)
        .filter(|_| sample_set.len() >= config.fine_degree + 2);
    let fine_curve = match fine_budget {
        Some(b) => {
            let fine = fit_closed_curve(&sample_set.points, config.fine_degree, b)?;
            if fine.regularized {
                flags.push(RefineFlag::FineRegularized);
            }
            fine.curve
        }
        None => {
            flags.push(RefineFlag::FineFallback);
            coarse_curve.clone()
        }
    };
    let fine_polyline = rasterize_curve(&fine_curve, config.raster_samples)?;
    let refined_mask = polyline_mask(&fine_polyline, mask, &mut flags)?;
    timings.fine_fitting = clock.elapsed();

    Ok(RefineResult {
        mask_id,
        source_contour: Some(contour),
        coarse_curve: Some(coarse_curve),
        fine_curve: Some(fine_curve),
        coarse_polyline: Some(coarse_polyline),
        fine_polyline: Some(fine_polyline),
        sample_set,
        refined_mask,
        stage_timings: timings,
        flags,
    })
}

fn polyline_mask(poly: &Contour, fallback: &BinaryMask, flags: &mut Vec<RefineFlag>) -> Result<BinaryMask> {
    if poly.len() < 3 {
        flags.push(RefineFlag::Passthrough);
        return Ok(fallback.clone());
    }
    fill_polygon(poly, fallback.width(), fallback.height())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageShare {
    pub stage: String,
    pub total_ms: f64,
    pub share_percent: f64,
}

/// Summed per-stage time over a batch with percentage shares.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingReport {
    pub stages: Vec<StageShare>,
    pub total_ms: f64,
}

pub fn stage_timing_report(results: &[RefineResult]) -> Result<TimingReport> {
    if results.is_empty() {
        return param_err("timing report needs at least one result");
    }
    let mut sums = [0.0f64; 4];
    for r in results {
        for (s, d) in sums.iter_mut().zip(r.stage_timings.as_array()) {
            *s += d.as_secs_f64() * 1e3;
        }
    }
    let total: f64 = sums.iter().sum();
    let stages = StageTimings::NAMES
        .iter()
        .zip(sums)
        .map(|(name, ms)| StageShare {
            stage: (*name).to_string(),
            total_ms: ms,
            share_percent: if total > 0.0 { 100.0 * ms / total } else { 0.0 },
        })
        .collect();
    Ok(TimingReport {
        stages,
        total_ms: total,
    })
}
