//! Least-squares approximation of ordered data by a B-spline.

use nalgebra::{DMatrix, SymmetricEigen};

use super::{basis_all, BSplineCurve, KnotVector, Point2};
use crate::error::{param_err, Result};

/// Relative residual of the normal equations accepted without regularization.
const RESIDUAL_TOLERANCE: f64 = 1e-8;
/// Condition number of `NᵀN` above which the solve is regularized.
const CONDITION_LIMIT: f64 = 1e12;
/// Tikhonov weight, relative to the mean diagonal of `NᵀN`.
const TIKHONOV_SCALE: f64 = 1e-10;

/// A fitted curve plus solve diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct FitOutcome {
    pub curve: BSplineCurve,
    /// `true` when `NᵀN` was singular or ill-conditioned and a Tikhonov term
    /// was added.
    pub regularized: bool,
    /// `‖NᵀN·P − NᵀD‖ / ‖NᵀD‖` of the returned control points.
    pub relative_residual: f64,
}

/// Parameters `t_i = u_0 + i·(u_m − u_0)/a` for `i = 0..=a`, so that the first
/// and last data points land on the ends of the knot range.
#[must_use]
pub fn uniform_parameters(count: usize, knots: &KnotVector) -> Vec<f64> {
    let (u0, um) = (knots.first(), knots.last());
    if count == 1 {
        return vec![u0];
    }
    let a = (count - 1) as f64;
    (0..count)
        .map(|i| if i + 1 == count { um } else { u0 + i as f64 * (um - u0) / a })
        .collect()
}

/// Fits `control_count` control points of a degree-`degree` curve over `knots`
/// to `data` by solving `P = (NᵀN)⁻¹ NᵀD`.
pub fn fit_curve(
    data: &[Point2],
    degree: usize,
    control_count: usize,
    knots: &KnotVector,
) -> Result<FitOutcome> {
    if degree < 1 {
        return param_err("fit degree must be at least 1");
    }
    if control_count < degree + 1 {
        return param_err(format!(
            "{control_count} control points cannot carry degree {degree}"
        ));
    }
    if data.len() < control_count {
        return param_err(format!(
            "{} data points cannot determine {control_count} control points",
            data.len()
        ));
    }
    if knots.len() != control_count + degree + 1 {
        return param_err(format!(
            "expected {} knots, got {}",
            control_count + degree + 1,
            knots.len()
        ));
    }
    if data.iter().any(|p| !p.is_finite()) {
        return param_err("data points must be finite");
    }

    let params = uniform_parameters(data.len(), knots);
    let b = control_count;
    let mut ntn = DMatrix::<f64>::zeros(b, b);
    let mut ntd = DMatrix::<f64>::zeros(b, 2);
    for (&t, d) in params.iter().zip(data) {
        let row = basis_all(degree, t, knots)?;
        let nonzero: Vec<(usize, f64)> = row
            .into_iter()
            .enumerate()
            .filter(|&(_, v)| v != 0.0)
            .collect();
        for &(i, vi) in &nonzero {
            ntd[(i, 0)] += vi * d.x;
            ntd[(i, 1)] += vi * d.y;
            for &(j, vj) in &nonzero {
                ntn[(i, j)] += vi * vj;
            }
        }
    }

    let rhs_norm = ntd.norm();
    let residual_of = |p: &DMatrix<f64>| {
        let r = (&ntn * p - &ntd).norm();
        if rhs_norm > 0.0 {
            r / rhs_norm
        } else {
            r
        }
    };

    let direct = if condition_number(&ntn) <= CONDITION_LIMIT {
        ntn.clone().cholesky().map(|c| c.solve(&ntd))
    } else {
        None
    };
    let (solution, regularized) = match direct {
        Some(p) if residual_of(&p) <= RESIDUAL_TOLERANCE => (p, false),
        _ => {
            let lambda = TIKHONOV_SCALE * ntn.trace() / b as f64;
            let mut reg = ntn.clone();
            for i in 0..b {
                reg[(i, i)] += lambda;
            }
            let p = match reg.clone().cholesky() {
                Some(c) => c.solve(&ntd),
                None => reg
                    .svd(true, true)
                    .solve(&ntd, 0.0)
                    .map_err(|e| crate::Error::Parameter(format!("least-squares solve failed: {e}")))?,
            };
            (p, true)
        }
    };

    let relative_residual = residual_of(&solution);
    let control_points = (0..b)
        .map(|i| Point2::new(solution[(i, 0)], solution[(i, 1)]))
        .collect();
    let curve = BSplineCurve::new(degree, control_points, knots.clone())?;
    Ok(FitOutcome {
        curve,
        regularized,
        relative_residual,
    })
}

fn condition_number(m: &DMatrix<f64>) -> f64 {
    let eig = SymmetricEigen::new(m.clone()).eigenvalues;
    let max = eig.iter().fold(0.0_f64, |a, &v| a.max(v.abs()));
    let min = eig.iter().fold(f64::INFINITY, |a, &v| a.min(v.abs()));
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Fits a closed curve through a closed contour.
///
/// The contour is closed by appending its first point, fitted over clamped
/// uniform knots, and the two end control points are replaced by their
/// average so `C(t_start) == C(t_end)`.
pub fn fit_closed_curve(data: &[Point2], degree: usize, control_count: usize) -> Result<FitOutcome> {
    if data.len() < control_count + degree {
        return param_err(format!(
            "closed fit of {control_count} control points at degree {degree} needs at least {} points, got {}",
            control_count + degree,
            data.len()
        ));
    }
    let mut closed = data.to_vec();
    if data.first() != data.last() {
        closed.push(data[0]);
    }
    let knots = KnotVector::clamped_uniform(control_count, degree)?;
    let fit = fit_curve(&closed, degree, control_count, &knots)?;

    let mut points = fit.curve.control_points().to_vec();
    let last = points.len() - 1;
    let joint = (points[0] + points[last]) * 0.5;
    points[0] = joint;
    points[last] = joint;
    Ok(FitOutcome {
        curve: BSplineCurve::new(degree, points, knots)?,
        ..fit
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameters_span_the_knot_range() {
        let k = KnotVector::clamped_uniform(6, 3).unwrap();
        let t = uniform_parameters(5, &k);
        assert_eq!(t, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn line_is_reproduced_exactly() {
        let data: Vec<Point2> = (0..10).map(|i| Point2::new(f64::from(i), 2.0 * f64::from(i))).collect();
        let k = KnotVector::clamped_uniform(2, 1).unwrap();
        let fit = fit_curve(&data, 1, 2, &k).unwrap();
        assert!(!fit.regularized);
        let params = uniform_parameters(data.len(), &k);
        for (t, d) in params.iter().zip(&data) {
            assert!(fit.curve.evaluate(*t).unwrap().distance(*d) < 1e-9);
        }
    }

    #[test]
    fn constant_data_gives_constant_control_points() {
        let data = vec![Point2::new(5.0, 5.0); 20];
        let k = KnotVector::clamped_uniform(8, 3).unwrap();
        let fit = fit_curve(&data, 3, 8, &k).unwrap();
        for p in fit.curve.control_points() {
            assert!(p.distance(Point2::new(5.0, 5.0)) < 1e-9);
        }
    }

    #[test]
    fn too_few_points_is_a_parameter_error() {
        let data = vec![Point2::new(0.0, 0.0); 3];
        let k = KnotVector::clamped_uniform(8, 3).unwrap();
        assert!(matches!(fit_curve(&data, 3, 8, &k), Err(crate::Error::Parameter(_))));
        assert!(matches!(fit_closed_curve(&data, 3, 8), Err(crate::Error::Parameter(_))));
    }

    #[test]
    fn unsupported_control_points_trigger_regularization() {
        // 12 points but all parameters crowd into the first half of the knots:
        // later basis functions have no data, so NᵀN is singular.
        let k = KnotVector::new(vec![0.0, 0.0, 0.0, 0.0, 0.01, 0.02, 0.03, 0.04, 1.0, 1.0, 1.0, 1.0]).unwrap();
        let data: Vec<Point2> = (0..8).map(|i| Point2::new(f64::from(i), 0.0)).collect();
        let fit = fit_curve(&data, 3, 8, &k).unwrap();
        assert!(fit.regularized);
        assert!(fit.curve.control_points().iter().all(|p| p.is_finite()));
    }

    #[test]
    fn square_contour_closes() {
        let mut data = Vec::new();
        for i in 0..10 {
            data.push(Point2::new(f64::from(i), 0.0));
        }
        for i in 0..10 {
            data.push(Point2::new(10.0, f64::from(i)));
        }
        for i in 0..10 {
            data.push(Point2::new(10.0 - f64::from(i), 10.0));
        }
        for i in 0..10 {
            data.push(Point2::new(0.0, 10.0 - f64::from(i)));
        }
        let fit = fit_closed_curve(&data, 3, 12).unwrap();
        let (a, b) = fit.curve.domain();
        let gap = fit.curve.evaluate(a).unwrap().distance(fit.curve.evaluate(b).unwrap());
        assert!(gap < 1e-9, "gap {gap}");
    }
}
