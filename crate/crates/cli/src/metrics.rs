//! `metrics`: curvature statistics of two contours and their Fréchet
//! distance.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use splinemask_core::metrics::{discrete_curvature, frechet_distance, frechet_distance_cyclic, CurvatureMode};
use splinemask_core::raster::largest_contour;
use splinemask_core::Point2;

use crate::io::read_mask;
use crate::{MetricsArgs, EXIT_OK};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureSummary {
    pub mean_curvature: f64,
    pub curvature_variance: f64,
    pub zero_division_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourMetrics {
    pub path: String,
    pub points: usize,
    pub menger: CurvatureSummary,
    pub paper_formula: CurvatureSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub a: ContourMetrics,
    pub b: ContourMetrics,
    pub frechet_distance: f64,
    pub cyclic: bool,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ContourJson {
    Bare(Vec<[f64; 2]>),
    Wrapped { points: Vec<[f64; 2]> },
}

/// A contour from JSON (`[[x, y], …]` or `{"points": [[x, y], …]}`) or the
/// outer contour of a mask image.
pub fn load_contour(path: &Path) -> Result<Vec<Point2>> {
    let is_json = path.extension().and_then(|e| e.to_str()).is_some_and(|e| e.eq_ignore_ascii_case("json"));
    let points = if is_json {
        let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        let parsed: ContourJson =
            serde_json::from_str(&text).with_context(|| format!("{} is not a contour", path.display()))?;
        let raw = match parsed {
            ContourJson::Bare(p) | ContourJson::Wrapped { points: p } => p,
        };
        raw.into_iter().map(|[x, y]| Point2::new(x, y)).collect()
    } else {
        let mask = read_mask(path)?;
        match largest_contour(&mask) {
            Some(c) => c.points,
            None => bail!("{} has no foreground", path.display()),
        }
    };
    let points: Vec<Point2> = points;
    if points.is_empty() {
        bail!("{} has no points", path.display());
    }
    if points.iter().any(|p| !p.is_finite()) {
        bail!("{} has non-finite coordinates", path.display());
    }
    Ok(points)
}

fn summarize(points: &[Point2], mode: CurvatureMode) -> Result<CurvatureSummary> {
    let s = discrete_curvature(points, mode)?;
    Ok(CurvatureSummary {
        mean_curvature: s.mean_curvature,
        curvature_variance: s.curvature_variance,
        zero_division_points: s.zero_division_points,
    })
}

fn contour_metrics(path: &Path, points: &[Point2]) -> Result<ContourMetrics> {
    Ok(ContourMetrics {
        path: path.display().to_string(),
        points: points.len(),
        menger: summarize(points, CurvatureMode::Menger)?,
        paper_formula: summarize(points, CurvatureMode::PaperFormula)?,
    })
}

pub fn report(a: &Path, b: &Path, cyclic: bool) -> Result<MetricsReport> {
    let pa = load_contour(a)?;
    let pb = load_contour(b)?;
    let frechet = if cyclic { frechet_distance_cyclic(&pa, &pb)? } else { frechet_distance(&pa, &pb)? };
    Ok(MetricsReport {
        a: contour_metrics(a, &pa)?,
        b: contour_metrics(b, &pb)?,
        frechet_distance: frechet.distance,
        cyclic,
    })
}

pub fn run(args: &MetricsArgs) -> Result<u8> {
    let r = report(&args.a, &args.b, args.cyclic)?;
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{}", serde_json::to_string_pretty(&r)?) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(EXIT_OK),
    }
}
