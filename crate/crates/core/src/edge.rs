//! Gaussian smoothing and Canny edge detection.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{param_err, Result};
use crate::geometry::Point2;
use crate::raster::{check_dims, GrayImage, RegionMask};

/// Boolean edge raster, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeMap {
    width: usize,
    height: usize,
    data: Vec<bool>,
}

impl EdgeMap {
    #[must_use]
    pub fn width(&self) -> usize {
        self.width
    }

    #[must_use]
    pub fn height(&self) -> usize {
        self.height
    }

    #[must_use]
    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[must_use]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.data[y * self.width + x]
    }

    #[must_use]
    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&v| v).count()
    }

    /// Edge pixel coordinates in raster order.
    pub fn points(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.data
            .iter()
            .enumerate()
            .filter(|(_, &v)| v)
            .map(move |(i, _)| (i % self.width, i / self.width))
    }
}

/// Canny parameters. Thresholds are fractions of the image's maximum
/// gradient magnitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CannyParams {
    pub sigma: f64,
    pub low_ratio: f64,
    pub high_ratio: f64,
}

impl Default for CannyParams {
    fn default() -> Self {
        Self {
            sigma: 2.0,
            low_ratio: 0.10,
            high_ratio: 0.20,
        }
    }
}

impl CannyParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return param_err(format!("sigma must be positive, got {}", self.sigma));
        }
        if !(0.0 < self.low_ratio && self.low_ratio < self.high_ratio && self.high_ratio <= 1.0) {
            return param_err(format!(
                "need 0 < low_ratio < high_ratio <= 1, got {} and {}",
                self.low_ratio, self.high_ratio
            ));
        }
        Ok(())
    }
}

/// `G(x, y) = exp(−(x² + y²) / 2σ²) / 2πσ²`.
#[must_use]
pub fn gaussian_weight(x: f64, y: f64, sigma: f64) -> f64 {
    let s2 = sigma * sigma;
    (-(x * x + y * y) / (2.0 * s2)).exp() / (2.0 * std::f64::consts::PI * s2)
}

/// Square Gaussian kernel sampled at integer offsets in `[-radius, radius]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianKernel {
    pub radius: usize,
    /// Row-major `(2·radius + 1)²` weights, normalized to sum 1.
    pub values: Vec<f64>,
}

impl GaussianKernel {
    #[must_use]
    pub fn size(&self) -> usize {
        2 * self.radius + 1
    }

    #[must_use]
    pub fn at(&self, dx: i64, dy: i64) -> f64 {
        let r = self.radius as i64;
        self.values[((dy + r) * (2 * r + 1) + dx + r) as usize]
    }
}

fn kernel_radius(sigma: f64) -> usize {
    (3.0 * sigma).ceil() as usize
}

/// Truncated at `±⌈3σ⌉` and normalized.
pub fn gaussian_kernel(sigma: f64) -> Result<GaussianKernel> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return param_err(format!("sigma must be positive, got {sigma}"));
    }
    let radius = kernel_radius(sigma);
    let r = radius as i64;
    let mut values: Vec<f64> = (-r..=r)
        .flat_map(|dy| (-r..=r).map(move |dx| (dx, dy)))
        .map(|(dx, dy)| gaussian_weight(dx as f64, dy as f64, sigma))
        .collect();
    let sum: f64 = values.iter().sum();
    values.iter_mut().for_each(|v| *v /= sum);
    Ok(GaussianKernel { radius, values })
}

/// Mirror index into `[0, len)` with the edge sample repeated
/// (`d c b a | a b c d | d c b a`).
fn reflect(i: i64, len: usize) -> usize {
    let n = len as i64;
    let period = 2 * n;
    let mut m = i.rem_euclid(period);
    if m >= n {
        m = period - 1 - m;
    }
    m as usize
}

/// Gaussian blur with reflect padding. The 2-D kernel is separable, so it is
/// applied as two normalized 1-D passes.
pub fn gaussian_blur(image: &GrayImage, sigma: f64) -> Result<Vec<f64>> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return param_err(format!("sigma must be positive, got {sigma}"));
    }
    let (w, h) = image.dimensions();
    let r = kernel_radius(sigma) as i64;
    let mut k1: Vec<f64> = (-r..=r)
        .map(|d| (-(d * d) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let s: f64 = k1.iter().sum();
    k1.iter_mut().for_each(|v| *v /= s);

    let src = image.data();
    let mut tmp = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            tmp[y * w + x] = (-r..=r)
                .map(|d| k1[(d + r) as usize] * src[y * w + reflect(x as i64 + d, w)])
                .sum();
        }
    }
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            out[y * w + x] = (-r..=r)
                .map(|d| k1[(d + r) as usize] * tmp[reflect(y as i64 + d, h) * w + x])
                .sum();
        }
    }
    Ok(out)
}

/// Sobel gradients `(gx, gy)` with reflect padding.
fn sobel(data: &[f64], w: usize, h: usize) -> (Vec<f64>, Vec<f64>) {
    let at = |x: i64, y: i64| data[reflect(y, h) * w + reflect(x, w)];
    let mut gx = vec![0.0; w * h];
    let mut gy = vec![0.0; w * h];
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let i = y as usize * w + x as usize;
            gx[i] = (at(x + 1, y - 1) + 2.0 * at(x + 1, y) + at(x + 1, y + 1))
                - (at(x - 1, y - 1) + 2.0 * at(x - 1, y) + at(x - 1, y + 1));
            gy[i] = (at(x - 1, y + 1) + 2.0 * at(x, y + 1) + at(x + 1, y + 1))
                - (at(x - 1, y - 1) + 2.0 * at(x, y - 1) + at(x + 1, y - 1));
        }
    }
    (gx, gy)
}

/// Magnitude one step along the gradient, interpolated between the axis
/// neighbour and the diagonal neighbour of the gradient's sector.
fn along_gradient(mag_at: impl Fn(i64, i64) -> f64, x: i64, y: i64, gx: f64, gy: f64, side: f64) -> f64 {
    let sx = if gx < 0.0 { -1 } else { 1 };
    let sy = if gy < 0.0 { -1 } else { 1 };
    let s = side as i64;
    let (axis, w) = if gx.abs() >= gy.abs() {
        (mag_at(x + s * sx, y), gy.abs() / gx.abs())
    } else {
        (mag_at(x, y + s * sy), gx.abs() / gy.abs())
    };
    let diag = mag_at(x + s * sx, y + s * sy);
    w * diag + (1.0 - w) * axis
}

/// Canny edges: Gaussian smoothing, Sobel gradients, non-maximum suppression
/// within the gradient's 45° sector, then hysteresis between
/// `low_ratio` and `high_ratio` times the maximum gradient magnitude.
pub fn canny(image: &GrayImage, params: &CannyParams) -> Result<EdgeMap> {
    params.validate()?;
    let (w, h) = image.dimensions();
    if w == 0 || h == 0 {
        return param_err("canny needs a non-empty image");
    }
    let smooth = gaussian_blur(image, params.sigma)?;
    let (gx, gy) = sobel(&smooth, w, h);
    let mag: Vec<f64> = gx.iter().zip(&gy).map(|(a, b)| a.hypot(*b)).collect();
    let max = mag.iter().copied().fold(0.0, f64::max);
    let mut data = vec![false; w * h];
    if max <= 0.0 {
        return Ok(EdgeMap {
            width: w,
            height: h,
            data,
        });
    }

    let mag_at = |x: i64, y: i64| -> f64 {
        if x < 0 || y < 0 || x >= w as i64 || y >= h as i64 {
            0.0
        } else {
            mag[y as usize * w + x as usize]
        }
    };
    // Ties along the gradient keep the pixel on the negative side so flat
    // two-pixel ridges thin to one pixel.
    let mut thin = vec![0.0; w * h];
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let i = y as usize * w + x as usize;
            let m = mag[i];
            if m <= 0.0 {
                continue;
            }
            let (a, b) = (gx[i], gy[i]);
            if m >= along_gradient(mag_at, x, y, a, b, 1.0) && m > along_gradient(mag_at, x, y, a, b, -1.0) {
                thin[i] = m;
            }
        }
    }

    let high = params.high_ratio * max;
    let low = params.low_ratio * max;
    let mut queue: VecDeque<usize> = VecDeque::new();
    for (i, &m) in thin.iter().enumerate() {
        if m >= high {
            data[i] = true;
            queue.push_back(i);
        }
    }
    while let Some(i) = queue.pop_front() {
        let (x, y) = ((i % w) as i64, (i / w) as i64);
        for dy in -1..=1 {
            for dx in -1..=1 {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                    continue;
                }
                let j = ny as usize * w + nx as usize;
                if !data[j] && thin[j] >= low {
                    data[j] = true;
                    queue.push_back(j);
                }
            }
        }
    }
    Ok(EdgeMap {
        width: w,
        height: h,
        data,
    })
}

/// Edge pixels inside `region`, in raster order.
pub fn mask_edges(edges: &EdgeMap, region: &RegionMask) -> Result<Vec<Point2>> {
    check_dims(edges.dimensions(), region.dimensions())?;
    Ok(edges
        .points()
        .filter(|&(x, y)| region.get(x, y))
        .map(|(x, y)| Point2::new(x as f64, y as f64))
        .collect())
}
