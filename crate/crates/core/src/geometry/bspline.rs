use serde::{Deserialize, Serialize};

use super::Point2;
use crate::error::{param_err, Error, Result};

/// Below this first-derivative norm the curvature is reported as zero.
const CURVATURE_SPEED_FLOOR: f64 = 1e-12;

/// Non-decreasing knot sequence `u_0..=u_m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct KnotVector(Vec<f64>);

impl KnotVector {
    pub fn new(knots: Vec<f64>) -> Result<Self> {
        if knots.len() < 2 {
            return param_err("a knot vector needs at least two knots");
        }
        if knots.iter().any(|u| !u.is_finite()) {
            return param_err("knots must be finite");
        }
        if knots.windows(2).any(|w| w[0] > w[1]) {
            return param_err("knots must be non-decreasing");
        }
        Ok(Self(knots))
    }

    /// Clamped uniform knots on `[0, 1]`: `degree + 1` repeated knots at each
    /// end and equally spaced interior knots.
    pub fn clamped_uniform(control_count: usize, degree: usize) -> Result<Self> {
        if control_count < degree + 1 {
            return param_err(format!(
                "clamped knots need at least {} control points for degree {degree}, got {control_count}",
                degree + 1
            ));
        }
        let segments = control_count - degree;
        let mut knots = Vec::with_capacity(control_count + degree + 1);
        knots.extend(std::iter::repeat_n(0.0, degree));
        knots.extend((0..=segments).map(|j| j as f64 / segments as f64));
        knots.extend(std::iter::repeat_n(1.0, degree));
        Ok(Self(knots))
    }

    #[must_use]
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    #[must_use]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[must_use]
    pub fn first(&self) -> f64 {
        self.0[0]
    }

    #[must_use]
    pub fn last(&self) -> f64 {
        self.0[self.0.len() - 1]
    }
}

impl TryFrom<Vec<f64>> for KnotVector {
    type Error = Error;
    fn try_from(knots: Vec<f64>) -> Result<Self> {
        Self::new(knots)
    }
}

impl From<KnotVector> for Vec<f64> {
    fn from(knots: KnotVector) -> Self {
        knots.0
    }
}

/// Index `j` of the degree-0 basis function that is 1 at `t`.
///
/// Spans are half-open `[u_j, u_{j+1})`, except that `t == u_m` belongs to the
/// last non-empty span so the basis still sums to one at the right end.
fn indicator_span(knots: &[f64], t: f64) -> Option<usize> {
    let first = knots[0];
    let last = knots[knots.len() - 1];
    if !(first..=last).contains(&t) || first == last {
        return None;
    }
    let mut j = knots.partition_point(|&u| u <= t).saturating_sub(1);
    j = j.min(knots.len() - 2);
    while knots[j] == knots[j + 1] {
        j -= 1;
    }
    Some(j)
}

/// Values of every `N_{i,degree}(t)` for `i = 0..knots.len() - degree - 1`.
///
/// Runs the Cox–de Boor recursion bottom-up over the whole knot vector, with
/// `0/0` quotients taken as zero.
pub fn basis_all(degree: usize, t: f64, knots: &KnotVector) -> Result<Vec<f64>> {
    let u = knots.as_slice();
    if u.len() < degree + 2 {
        return param_err(format!(
            "{} knots cannot carry a degree-{degree} basis",
            u.len()
        ));
    }
    if !t.is_finite() || t < knots.first() || t > knots.last() {
        return Err(Error::Domain(format!(
            "parameter {t} outside [{}, {}]",
            knots.first(),
            knots.last()
        )));
    }
    let mut n = vec![0.0; u.len() - 1];
    if let Some(j) = indicator_span(u, t) {
        n[j] = 1.0;
    }
    for p in 1..=degree {
        let next: Vec<f64> = (0..u.len() - 1 - p)
            .map(|j| {
                let left_den = u[j + p] - u[j];
                let right_den = u[j + p + 1] - u[j + 1];
                let left = if left_den == 0.0 {
                    0.0
                } else {
                    (t - u[j]) / left_den * n[j]
                };
                let right = if right_den == 0.0 {
                    0.0
                } else {
                    (u[j + p + 1] - t) / right_den * n[j + 1]
                };
                left + right
            })
            .collect();
        n = next;
    }
    Ok(n)
}

/// `N_{i,degree}(t)` over `knots`.
pub fn basis(i: usize, degree: usize, t: f64, knots: &KnotVector) -> Result<f64> {
    if knots.len() < degree + 2 || i > knots.len() - degree - 2 {
        return Err(Error::Domain(format!(
            "basis index {i} out of range for degree {degree} and {} knots",
            knots.len()
        )));
    }
    Ok(basis_all(degree, t, knots)?[i])
}

/// Span index `s` in `[degree, n]` with `u_s <= t < u_{s+1}`; the right end of
/// the domain maps to the last non-empty span.
fn find_span(degree: usize, control_count: usize, knots: &[f64], t: f64) -> usize {
    let n = control_count - 1;
    let mut s = knots.partition_point(|&u| u <= t).saturating_sub(1);
    s = s.clamp(degree, n);
    while s > degree && knots[s] == knots[s + 1] {
        s -= 1;
    }
    s
}

/// The `degree + 1` non-zero basis values on span `s`.
fn span_basis(s: usize, t: f64, degree: usize, knots: &[f64]) -> Vec<f64> {
    let mut values = vec![0.0; degree + 1];
    let mut left = vec![0.0; degree + 1];
    let mut right = vec![0.0; degree + 1];
    values[0] = 1.0;
    for j in 1..=degree {
        left[j] = t - knots[s + 1 - j];
        right[j] = knots[s + j] - t;
        let mut saved = 0.0;
        for r in 0..j {
            let den = right[r + 1] + left[j - r];
            let temp = if den == 0.0 { 0.0 } else { values[r] / den };
            values[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        values[j] = saved;
    }
    values
}

fn eval_spline(degree: usize, ctrl: &[Point2], knots: &[f64], t: f64) -> Point2 {
    let s = find_span(degree, ctrl.len(), knots, t);
    span_basis(s, t, degree, knots)
        .iter()
        .enumerate()
        .fold(Point2::default(), |acc, (r, &w)| {
            acc + ctrl[s - degree + r] * w
        })
}

/// Control points and knots of the derivative of a degree-`degree` spline:
/// `Q_i = degree / (u_{i+degree+1} - u_{i+1}) * (P_{i+1} - P_i)`.
fn hodograph(degree: usize, ctrl: &[Point2], knots: &[f64]) -> (Vec<Point2>, Vec<f64>) {
    let q = (0..ctrl.len() - 1)
        .map(|i| {
            let den = knots[i + degree + 1] - knots[i + 1];
            if den == 0.0 {
                Point2::default()
            } else {
                (ctrl[i + 1] - ctrl[i]) * (degree as f64 / den)
            }
        })
        .collect();
    (q, knots[1..knots.len() - 1].to_vec())
}

/// A B-spline curve `C(t) = Σ N_{i,k}(t) P_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BSplineCurve {
    degree: usize,
    control_points: Vec<Point2>,
    knots: KnotVector,
}

impl BSplineCurve {
    pub fn new(degree: usize, control_points: Vec<Point2>, knots: KnotVector) -> Result<Self> {
        if degree < 1 {
            return param_err("curve degree must be at least 1");
        }
        if control_points.len() < degree + 1 {
            return param_err(format!(
                "degree {degree} needs at least {} control points, got {}",
                degree + 1,
                control_points.len()
            ));
        }
        if knots.len() != control_points.len() + degree + 1 {
            return param_err(format!(
                "expected {} knots for {} control points of degree {degree}, got {}",
                control_points.len() + degree + 1,
                control_points.len(),
                knots.len()
            ));
        }
        if control_points.iter().any(|p| !p.is_finite()) {
            return param_err("control points must be finite");
        }
        let u = knots.as_slice();
        if u[degree] >= u[control_points.len()] {
            return param_err("curve evaluation domain is empty");
        }
        Ok(Self {
            degree,
            control_points,
            knots,
        })
    }

    #[must_use]
    pub fn degree(&self) -> usize {
        self.degree
    }

    #[must_use]
    pub fn control_points(&self) -> &[Point2] {
        &self.control_points
    }

    #[must_use]
    pub fn knots(&self) -> &KnotVector {
        &self.knots
    }

    /// Valid parameter range `[u_k, u_{m-k}]`.
    #[must_use]
    pub fn domain(&self) -> (f64, f64) {
        let u = self.knots.as_slice();
        (u[self.degree], u[self.control_points.len()])
    }

    fn check_domain(&self, t: f64) -> Result<()> {
        let (a, b) = self.domain();
        if t.is_finite() && (a..=b).contains(&t) {
            Ok(())
        } else {
            Err(Error::Domain(format!("parameter {t} outside [{a}, {b}]")))
        }
    }

    pub fn evaluate(&self, t: f64) -> Result<Point2> {
        self.check_domain(t)?;
        Ok(eval_spline(
            self.degree,
            &self.control_points,
            self.knots.as_slice(),
            t,
        ))
    }

    pub fn derivatives(&self, t: f64) -> Result<CurveSample> {
        self.derivative_evaluator().sample(t)
    }

    /// Precomputes the derivative control polygons for repeated sampling.
    #[must_use]
    pub fn derivative_evaluator(&self) -> DerivativeEvaluator<'_> {
        let (q, qk) = hodograph(self.degree, &self.control_points, self.knots.as_slice());
        let second = (self.degree >= 2).then(|| hodograph(self.degree - 1, &q, &qk));
        DerivativeEvaluator {
            curve: self,
            first: (q, qk),
            second,
        }
    }

    /// `count` parameters evenly spaced over the domain, excluding the right
    /// end (which coincides with the left end on a closed curve).
    #[must_use]
    pub fn loop_parameters(&self, count: usize) -> Vec<f64> {
        let (a, b) = self.domain();
        (0..count)
            .map(|j| a + (b - a) * j as f64 / count as f64)
            .collect()
    }

    /// Applies `f` to every control point; B-splines are affine invariant so
    /// this maps the curve itself for affine `f`.
    #[must_use]
    pub fn map_points(&self, f: impl Fn(Point2) -> Point2) -> Self {
        Self {
            degree: self.degree,
            control_points: self.control_points.iter().map(|&p| f(p)).collect(),
            knots: self.knots.clone(),
        }
    }
}

/// Point, derivatives and curvature of a curve at one parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    pub t: f64,
    pub point: Point2,
    pub first_derivative: Point2,
    pub second_derivative: Point2,
    /// `false` for degree-1 curves, whose second derivative is reported as zero.
    pub second_derivative_defined: bool,
    pub curvature: f64,
}

/// Evaluates a curve together with its first two derivatives.
#[derive(Debug, Clone)]
pub struct DerivativeEvaluator<'a> {
    curve: &'a BSplineCurve,
    first: (Vec<Point2>, Vec<f64>),
    second: Option<(Vec<Point2>, Vec<f64>)>,
}

impl DerivativeEvaluator<'_> {
    pub fn sample(&self, t: f64) -> Result<CurveSample> {
        let point = self.curve.evaluate(t)?;
        let k = self.curve.degree;
        let d1 = eval_spline(k - 1, &self.first.0, &self.first.1, t);
        let d2 = self
            .second
            .as_ref()
            .map_or(Point2::default(), |(pts, knots)| {
                eval_spline(k - 2, pts, knots, t)
            });
        let speed = d1.norm();
        let curvature = if speed < CURVATURE_SPEED_FLOOR {
            0.0
        } else {
            d1.cross(d2).abs() / (speed * speed * speed)
        };
        Ok(CurveSample {
            t,
            point,
            first_derivative: d1,
            second_derivative: d2,
            second_derivative_defined: self.second.is_some(),
            curvature,
        })
    }
}
