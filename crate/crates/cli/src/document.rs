//! The JSON record written by `refine`.

use serde::{Deserialize, Serialize};
use splinemask_core::pipeline::{RefineFlag, StageTimings, TimingReport};
use splinemask_core::{Contour, RefineConfig, RefineResult};

pub const SCHEMA_VERSION: &str = "1";

/// JSON Schema for [`ContourDocument`].
pub const SCHEMA: &str = include_str!("../schema/contour_document.schema.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourDocument {
    pub schema_version: String,
    pub image: ImageInfo,
    pub config: RefineConfig,
    pub masks: Vec<MaskRecord>,
    /// Summed stage times over the successful masks.
    pub timing: Option<TimingReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageInfo {
    pub width: usize,
    pub height: usize,
    pub source_path: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaskRecord {
    pub mask_id: usize,
    pub source_path: String,
    /// File name of the refined mask, next to the document.
    pub refined_file: Option<String>,
    pub error: Option<String>,
    /// Closed polylines: the first point is repeated last.
    pub coarse_polyline: Option<Vec<[f64; 2]>>,
    pub fine_polyline: Option<Vec<[f64; 2]>>,
    pub sample_count: usize,
    pub flags: Vec<String>,
    pub stage_timings_ms: Option<StageTimingsMs>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StageTimingsMs {
    pub coarse_fitting: f64,
    pub dilated_canny: f64,
    pub adaptive_sampling: f64,
    pub fine_fitting: f64,
    pub total: f64,
}

impl From<&StageTimings> for StageTimingsMs {
    fn from(t: &StageTimings) -> Self {
        let ms = |d: std::time::Duration| d.as_secs_f64() * 1e3;
        Self {
            coarse_fitting: ms(t.coarse_fitting),
            dilated_canny: ms(t.dilated_canny),
            adaptive_sampling: ms(t.adaptive_sampling),
            fine_fitting: ms(t.fine_fitting),
            total: ms(t.total()),
        }
    }
}

pub fn closed_polyline(contour: &Contour) -> Vec<[f64; 2]> {
    let mut pts: Vec<[f64; 2]> = contour.points.iter().map(|p| [p.x, p.y]).collect();
    if let Some(&first) = pts.first() {
        pts.push(first);
    }
    pts
}

pub fn flag_name(flag: &RefineFlag) -> String {
    match flag {
        RefineFlag::Failed(_) => "failed".to_string(),
        other => serde_json::to_value(other)
            .ok()
            .and_then(|v| v.as_str().map(str::to_string))
            .unwrap_or_else(|| format!("{other:?}")),
    }
}

impl MaskRecord {
    pub fn failed(mask_id: usize, source_path: String, error: String) -> Self {
        Self {
            mask_id,
            source_path,
            refined_file: None,
            error: Some(error),
            coarse_polyline: None,
            fine_polyline: None,
            sample_count: 0,
            flags: vec!["failed".to_string()],
            stage_timings_ms: None,
        }
    }

    pub fn from_result(mask_id: usize, source_path: String, refined_file: String, r: &RefineResult) -> Self {
        let error = r.flags.iter().find_map(|f| match f {
            RefineFlag::Failed(msg) => Some(msg.clone()),
            _ => None,
        });
        Self {
            mask_id,
            source_path,
            refined_file: Some(refined_file),
            error,
            coarse_polyline: r.coarse_polyline.as_ref().map(closed_polyline),
            fine_polyline: r.fine_polyline.as_ref().map(closed_polyline),
            sample_count: r.sample_set.len(),
            flags: r.flags.iter().map(flag_name).collect(),
            stage_timings_ms: Some((&r.stage_timings).into()),
        }
    }
}

impl ContourDocument {
    /// A copy with every timing field removed, for comparing runs.
    #[must_use]
    pub fn without_timings(&self) -> Self {
        let mut doc = self.clone();
        doc.timing = None;
        for m in &mut doc.masks {
            m.stage_timings_ms = None;
        }
        doc
    }
}
