use super::{BinaryMask, Contour, RegionMask};
use crate::error::{param_err, Result};
use crate::geometry::{BSplineCurve, Point2};

/// Lattice points closer than this to a polygon edge count as on the boundary.
const BOUNDARY_EPS: f64 = 1e-9;

/// `samples` evenly spaced parameter evaluations of a closed curve in
/// continuous coordinates (the end parameter is omitted).
pub fn sample_closed_curve(curve: &BSplineCurve, samples: usize) -> Result<Vec<Point2>> {
    curve
        .loop_parameters(samples)
        .into_iter()
        .map(|t| curve.evaluate(t))
        .collect()
}

/// Closed pixel polyline of a curve: `samples` evenly spaced evaluations
/// rounded half away from zero, with consecutive duplicates collapsed.
pub fn rasterize_curve(curve: &BSplineCurve, samples: usize) -> Result<Contour> {
    if samples < 8 {
        return param_err(format!("rasterization needs at least 8 samples, got {samples}"));
    }
    let mut points: Vec<Point2> = Vec::with_capacity(samples);
    for p in sample_closed_curve(curve, samples)? {
        let q = Point2::new(p.x.round(), p.y.round());
        if points.last() != Some(&q) {
            points.push(q);
        }
    }
    while points.len() > 1 && points.last() == points.first() {
        points.pop();
    }
    Ok(Contour::closed(points))
}

/// Pixels whose centre lies within `radius` of the polyline's segments.
pub fn dilate_polyline(
    poly: &Contour,
    radius: f64,
    width: usize,
    height: usize,
) -> Result<RegionMask> {
    if !(radius >= 1.0) {
        return param_err(format!("dilation radius must be at least 1, got {radius}"));
    }
    let mut out = BinaryMask::new(width, height);
    if width == 0 || height == 0 {
        return Ok(out);
    }
    let segments: Vec<(Point2, Point2)> = match poly.points.as_slice() {
        [] => Vec::new(),
        [p] => vec![(*p, *p)],
        _ => poly.segments().collect(),
    };
    let r2 = radius * radius;
    let clip = |v: f64, max: usize| -> Option<usize> {
        if v < 0.0 {
            Some(0)
        } else if v > (max - 1) as f64 {
            None
        } else {
            Some(v as usize)
        }
    };
    for (a, b) in segments {
        let x_lo = (a.x.min(b.x) - radius).ceil();
        let x_hi = (a.x.max(b.x) + radius).floor();
        let y_lo = (a.y.min(b.y) - radius).ceil();
        let y_hi = (a.y.max(b.y) + radius).floor();
        if x_hi < 0.0 || y_hi < 0.0 {
            continue;
        }
        let (Some(x0), Some(y0)) = (clip(x_lo, width), clip(y_lo, height)) else {
            continue;
        };
        let x1 = (x_hi as usize).min(width - 1);
        let y1 = (y_hi as usize).min(height - 1);
        for y in y0..=y1 {
            for x in x0..=x1 {
                if out.get(x, y) {
                    continue;
                }
                let p = Point2::new(x as f64, y as f64);
                if p.segment_distance_squared(a, b) <= r2 {
                    out.set(x, y, true);
                }
            }
        }
    }
    Ok(out)
}

/// Even-odd scanline fill of a closed polygon, sampled at pixel centres.
/// Pixels whose centre lies on an edge are included.
pub fn fill_polygon(poly: &Contour, width: usize, height: usize) -> Result<BinaryMask> {
    let pts = &poly.points;
    if pts.len() < 3 {
        return param_err(format!("polygon fill needs at least 3 points, got {}", pts.len()));
    }
    let n = pts.len();
    let edges: Vec<(Point2, Point2)> = (0..n).map(|i| (pts[i], pts[(i + 1) % n])).collect();
    let mut out = BinaryMask::new(width, height);

    let mut crossings = Vec::new();
    for y in 0..height {
        let yc = y as f64;
        crossings.clear();
        for &(a, b) in &edges {
            if (a.y <= yc && yc < b.y) || (b.y <= yc && yc < a.y) {
                crossings.push(a.x + (yc - a.y) * (b.x - a.x) / (b.y - a.y));
            }
        }
        crossings.sort_by(f64::total_cmp);
        for pair in crossings.chunks_exact(2) {
            let lo = pair[0].ceil().max(0.0);
            let hi = pair[1].floor();
            if hi < 0.0 || lo > (width - 1) as f64 {
                continue;
            }
            for x in lo as usize..=(hi as usize).min(width - 1) {
                out.set(x, y, true);
            }
        }
    }

    for &(a, b) in &edges {
        mark_lattice_points_on_segment(&mut out, a, b);
    }
    Ok(out)
}

fn mark_lattice_points_on_segment(out: &mut BinaryMask, a: Point2, b: Point2) {
    let (w, h) = (out.width() as i64, out.height() as i64);
    let mut mark = |x: f64, y: f64| {
        let (xi, yi) = (x.round(), y.round());
        if (x - xi).abs() <= BOUNDARY_EPS && (y - yi).abs() <= BOUNDARY_EPS {
            let (xi, yi) = (xi as i64, yi as i64);
            if (0..w).contains(&xi) && (0..h).contains(&yi) {
                out.set(xi as usize, yi as usize, true);
            }
        }
    };
    if a.y == b.y {
        let x_lo = (a.x.min(b.x) - BOUNDARY_EPS).ceil().max(-1.0);
        let x_hi = (a.x.max(b.x) + BOUNDARY_EPS).floor().min(w as f64);
        let mut x = x_lo;
        while x <= x_hi {
            mark(x, a.y);
            x += 1.0;
        }
        return;
    }
    let y_lo = (a.y.min(b.y) - BOUNDARY_EPS).ceil().max(-1.0);
    let y_hi = (a.y.max(b.y) + BOUNDARY_EPS).floor().min(h as f64);
    let mut y = y_lo;
    while y <= y_hi {
        let x = a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y);
        mark(x, y);
        y += 1.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::KnotVector;

    fn contour(pts: &[(f64, f64)]) -> Contour {
        Contour::closed(pts.iter().map(|&p| p.into()).collect())
    }

    /// Independent per-pixel oracle: ray casting towards +x with the same
    /// half-open vertex rule, plus an on-edge test.
    fn brute_fill(poly: &[Point2], w: usize, h: usize) -> BinaryMask {
        BinaryMask::from_fn(w, h, |x, y| {
            let p = Point2::new(x as f64, y as f64);
            let n = poly.len();
            let mut inside = false;
            for i in 0..n {
                let (a, b) = (poly[i], poly[(i + 1) % n]);
                if p.segment_distance_squared(a, b) <= 1e-18 {
                    return true;
                }
                if (a.y <= p.y) != (b.y <= p.y) {
                    let xc = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
                    if xc > p.x {
                        inside = !inside;
                    }
                }
            }
            inside
        })
    }

    #[test]
    fn square_fill_counts_boundary() {
        let c = contour(&[(2.0, 2.0), (7.0, 2.0), (7.0, 7.0), (2.0, 7.0)]);
        let m = fill_polygon(&c, 10, 10).unwrap();
        assert_eq!(m.count(), 36);
        assert_eq!(m, brute_fill(&c.points, 10, 10));
    }

    #[test]
    fn bowtie_matches_even_odd_oracle() {
        let c = contour(&[(1.0, 1.0), (11.0, 9.0), (11.0, 1.0), (1.0, 9.0)]);
        let m = fill_polygon(&c, 14, 12).unwrap();
        assert_eq!(m, brute_fill(&c.points, 14, 12));
    }

    #[test]
    fn degenerate_polygon_is_rejected() {
        let c = contour(&[(0.0, 0.0), (3.0, 3.0)]);
        assert!(fill_polygon(&c, 5, 5).is_err());
    }

    #[test]
    fn horizontal_segment_band() {
        let c = Contour {
            points: vec![Point2::new(2.0, 5.0), Point2::new(7.0, 5.0)],
            closed: false,
        };
        let m = dilate_polyline(&c, 1.0, 10, 10).unwrap();
        let expected = BinaryMask::from_fn(10, 10, |x, y| {
            let p = Point2::new(x as f64, y as f64);
            p.segment_distance_squared(c.points[0], c.points[1]) <= 1.0
        });
        assert_eq!(m, expected);
        // rows 4–6 over columns 2–7, plus the single cap pixels (1,5) and (8,5)
        assert_eq!(m.count(), 3 * 6 + 2);
        assert!(m.get(1, 5) && m.get(8, 5) && !m.get(1, 4));
    }

    #[test]
    fn dilation_saturates_and_handles_empty() {
        let c = contour(&[(4.0, 4.0)]);
        assert_eq!(dilate_polyline(&c, 20.0, 8, 8).unwrap().count(), 64);
        assert!(dilate_polyline(&contour(&[]), 3.0, 8, 8).unwrap().is_empty());
        assert!(dilate_polyline(&c, 0.5, 8, 8).is_err());
    }

    #[test]
    fn rasterize_constant_curve_collapses() {
        let p = Point2::new(3.2, 4.7);
        let curve = BSplineCurve::new(2, vec![p; 5], KnotVector::clamped_uniform(5, 2).unwrap()).unwrap();
        let c = rasterize_curve(&curve, 64).unwrap();
        assert_eq!(c.points, vec![Point2::new(3.0, 5.0)]);
        assert!(rasterize_curve(&curve, 7).is_err());
    }
}
