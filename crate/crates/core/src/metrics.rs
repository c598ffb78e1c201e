//! Contour quality metrics: discrete curvature statistics and the discrete
//! Fréchet distance.

use serde::{Deserialize, Serialize};

use crate::error::{param_err, Result};
use crate::geometry::Point2;

/// How per-point curvature is computed from three consecutive points.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurvatureMode {
    /// Circumscribed-circle curvature `4·Area / (|a|·|b|·|c|)`.
    #[default]
    Menger,
    /// Signed ratio with numerator
    /// `x₋(y − y₊) − x(y₋ − y₊) + x₊(y₋ − y)` and denominator
    /// `(x₋ − x)² + |y₋ − y|^{3/2}`.
    PaperFormula,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureStats {
    pub mean_curvature: f64,
    /// Population variance of `per_point`.
    pub curvature_variance: f64,
    pub per_point: Vec<f64>,
    /// Points whose formula divided by zero and were recorded as 0.
    pub zero_division_points: usize,
}

fn menger(a: Point2, b: Point2, c: Point2) -> Option<f64> {
    let twice_area = (b - a).cross(c - a).abs();
    if twice_area == 0.0 {
        return Some(0.0);
    }
    let den = a.distance(b) * b.distance(c) * c.distance(a);
    (den > 0.0).then(|| 2.0 * twice_area / den)
}

fn closed_form(prev: Point2, cur: Point2, next: Point2) -> Option<f64> {
    let num = prev.x * (cur.y - next.y) - cur.x * (prev.y - next.y) + next.x * (prev.y - cur.y);
    let dx = prev.x - cur.x;
    // A negative base has no real 3/2 power; its magnitude is used.
    let den = dx * dx + (prev.y - cur.y).abs().powf(1.5);
    (den != 0.0).then(|| num / den)
}

/// Per-point curvature with closed wrap-around neighbours, plus mean and
/// variance.
pub fn discrete_curvature(points: &[Point2], mode: CurvatureMode) -> Result<CurvatureStats> {
    let n = points.len();
    if n < 3 {
        return param_err(format!("curvature needs at least 3 points, got {n}"));
    }
    let mut zero_division_points = 0;
    let per_point: Vec<f64> = (0..n)
        .map(|i| {
            let prev = points[(i + n - 1) % n];
            let next = points[(i + 1) % n];
            let value = match mode {
                CurvatureMode::Menger => menger(prev, points[i], next),
                CurvatureMode::PaperFormula => closed_form(prev, points[i], next),
            };
            value.unwrap_or_else(|| {
                zero_division_points += 1;
                0.0
            })
        })
        .collect();
    let mean = per_point.iter().sum::<f64>() / n as f64;
    let variance = per_point.iter().map(|k| (k - mean) * (k - mean)).sum::<f64>() / n as f64;
    Ok(CurvatureStats {
        mean_curvature: mean,
        curvature_variance: variance,
        per_point,
        zero_division_points,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrechetResult {
    pub distance: f64,
    /// Optimal monotone coupling as `(i, j)` index pairs, when requested.
    pub coupling: Option<Vec<(usize, usize)>>,
}

fn check_nonempty(p: &[Point2], q: &[Point2]) -> Result<()> {
    if p.is_empty() || q.is_empty() {
        return param_err("Fréchet distance needs two non-empty point sequences");
    }
    Ok(())
}

/// DP over the coupling lattice keeping one row; returns `None` as soon as
/// a whole row reaches `cutoff` (every coupling crosses every row).
fn frechet_rows(p: &[Point2], q: &[Point2], cutoff: f64) -> Option<f64> {
    let m = q.len();
    let mut prev = vec![0.0; m];
    let mut cur = vec![0.0; m];
    for (i, &pi) in p.iter().enumerate() {
        let mut row_min = f64::INFINITY;
        for j in 0..m {
            let d = pi.distance(q[j]);
            let reach = match (i, j) {
                (0, 0) => d,
                (0, _) => cur[j - 1],
                (_, 0) => prev[0],
                _ => prev[j].min(cur[j - 1]).min(prev[j - 1]),
            };
            cur[j] = d.max(reach);
            row_min = row_min.min(cur[j]);
        }
        if row_min >= cutoff {
            return None;
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    Some(prev[m - 1])
}

/// Discrete Fréchet distance:
/// `d[i][j] = max(|p_i − q_j|, min(d[i−1][j], d[i][j−1], d[i−1][j−1]))`.
pub fn frechet_distance(p: &[Point2], q: &[Point2]) -> Result<FrechetResult> {
    check_nonempty(p, q)?;
    let distance = frechet_rows(p, q, f64::INFINITY).expect("no cutoff");
    Ok(FrechetResult {
        distance,
        coupling: None,
    })
}

/// Same distance as [`frechet_distance`], with an optimal coupling recovered
/// from the full table.
pub fn frechet_with_coupling(p: &[Point2], q: &[Point2]) -> Result<FrechetResult> {
    check_nonempty(p, q)?;
    let (n, m) = (p.len(), q.len());
    let mut d = vec![0.0; n * m];
    for i in 0..n {
        for j in 0..m {
            let dist = p[i].distance(q[j]);
            let reach = match (i, j) {
                (0, 0) => dist,
                (0, _) => d[j - 1],
                (_, 0) => d[(i - 1) * m],
                _ => d[(i - 1) * m + j]
                    .min(d[i * m + j - 1])
                    .min(d[(i - 1) * m + j - 1]),
            };
            d[i * m + j] = dist.max(reach);
        }
    }
    let mut path = vec![(n - 1, m - 1)];
    let (mut i, mut j) = (n - 1, m - 1);
    while (i, j) != (0, 0) {
        (i, j) = match (i, j) {
            (0, _) => (0, j - 1),
            (_, 0) => (i - 1, 0),
            _ => {
                let diag = d[(i - 1) * m + j - 1];
                let up = d[(i - 1) * m + j];
                let left = d[i * m + j - 1];
                if diag <= up && diag <= left {
                    (i - 1, j - 1)
                } else if up <= left {
                    (i - 1, j)
                } else {
                    (i, j - 1)
                }
            }
        };
        path.push((i, j));
    }
    path.reverse();
    Ok(FrechetResult {
        distance: d[n * m - 1],
        coupling: Some(path),
    })
}

/// Minimum discrete Fréchet distance over all cyclic rotations of `q`.
///
/// Exact: rotations are visited in order of the endpoint lower bound
/// `max(|p_0 − q_s|, |p_last − q_{s−1}|)` and the search stops once that
/// bound reaches the best distance found.
pub fn frechet_distance_cyclic(p: &[Point2], q: &[Point2]) -> Result<FrechetResult> {
    check_nonempty(p, q)?;
    let m = q.len();
    let first = p[0];
    let last = p[p.len() - 1];
    let mut order: Vec<(f64, usize)> = (0..m)
        .map(|s| {
            let lb = first.distance(q[s]).max(last.distance(q[(s + m - 1) % m]));
            (lb, s)
        })
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut best = f64::INFINITY;
    let mut rotated = Vec::with_capacity(m);
    for (lb, s) in order {
        if lb >= best {
            break;
        }
        rotated.clear();
        rotated.extend_from_slice(&q[s..]);
        rotated.extend_from_slice(&q[..s]);
        if let Some(d) = frechet_rows(p, &rotated, best) {
            best = best.min(d);
        }
    }
    Ok(FrechetResult {
        distance: best,
        coupling: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[(f64, f64)]) -> Vec<Point2> {
        v.iter().map(|&p| p.into()).collect()
    }

    #[test]
    fn regular_polygon_menger_is_inverse_radius() {
        for n in [5usize, 12, 40] {
            let r = 7.5;
            let poly: Vec<Point2> = (0..n)
                .map(|i| {
                    let a = std::f64::consts::TAU * i as f64 / n as f64;
                    Point2::new(3.0 + r * a.cos(), -2.0 + r * a.sin())
                })
                .collect();
            let s = discrete_curvature(&poly, CurvatureMode::Menger).unwrap();
            for k in &s.per_point {
                assert!((k - 1.0 / r).abs() < 1e-9);
            }
            assert!(s.curvature_variance < 1e-18);
        }
    }

    #[test]
    fn collinear_menger_is_zero() {
        let line = pts(&[(0.0, 0.0), (1.0, 1.0), (2.0, 2.0), (3.0, 3.0)]);
        // The wrap-around triples fold back on the line: still zero area.
        let s = discrete_curvature(&line, CurvatureMode::Menger).unwrap();
        assert!(s.per_point.iter().all(|&k| k == 0.0));
        assert_eq!(s.curvature_variance, 0.0);
    }

    #[test]
    fn too_short_contour_is_rejected() {
        assert!(discrete_curvature(&pts(&[(0.0, 0.0), (1.0, 0.0)]), CurvatureMode::Menger).is_err());
    }

    #[test]
    fn closed_form_zero_denominator_is_flagged() {
        // Point 1 repeats point 0, so its denominator vanishes.
        let p = pts(&[(0.0, 0.0), (0.0, 0.0), (1.0, 2.0), (3.0, 1.0)]);
        let s = discrete_curvature(&p, CurvatureMode::PaperFormula).unwrap();
        assert_eq!(s.per_point[1], 0.0);
        assert!(s.zero_division_points >= 1);
    }

    #[test]
    fn frechet_trivial_cases() {
        let a = pts(&[(0.0, 0.0), (1.0, 0.0), (2.0, 1.0)]);
        assert_eq!(frechet_distance(&a, &a).unwrap().distance, 0.0);
        let d = frechet_distance(&pts(&[(0.0, 0.0)]), &pts(&[(3.0, 4.0)])).unwrap();
        assert_eq!(d.distance, 5.0);
        assert!(frechet_distance(&a, &[]).is_err());
    }

    #[test]
    fn coupling_realizes_the_distance() {
        let a = pts(&[(0.0, 0.0), (1.0, 1.0), (2.0, 0.0), (3.0, 0.5)]);
        let b = pts(&[(0.0, 0.2), (1.5, 0.0), (3.0, 0.0)]);
        let r = frechet_with_coupling(&a, &b).unwrap();
        assert_eq!(r.distance, frechet_distance(&a, &b).unwrap().distance);
        let coupling = r.coupling.unwrap();
        assert_eq!(coupling.first(), Some(&(0, 0)));
        assert_eq!(coupling.last(), Some(&(3, 2)));
        let worst = coupling
            .iter()
            .map(|&(i, j)| a[i].distance(b[j]))
            .fold(0.0, f64::max);
        assert_eq!(worst, r.distance);
    }

    #[test]
    fn cyclic_matches_brute_force_over_rotations() {
        let a = pts(&[(0.0, 0.0), (4.0, 0.0), (4.0, 4.0), (0.0, 4.0)]);
        let b = pts(&[(4.2, 3.9), (0.1, 4.0), (0.0, 0.3), (3.8, 0.0)]);
        let brute = (0..b.len())
            .map(|s| {
                let r: Vec<Point2> = b[s..].iter().chain(&b[..s]).copied().collect();
                frechet_distance(&a, &r).unwrap().distance
            })
            .fold(f64::INFINITY, f64::min);
        assert_eq!(frechet_distance_cyclic(&a, &b).unwrap().distance, brute);
        assert!(brute < frechet_distance(&a, &b).unwrap().distance);
    }
}
