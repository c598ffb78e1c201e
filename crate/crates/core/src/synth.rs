//! Seeded synthetic fixtures: a filled shape image, its clean mask and a
//! boundary-jittered mask.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{param_err, Error, Result};
use crate::geometry::Point2;
use crate::raster::{fill_polygon, largest_contour, BinaryMask, Contour, GrayImage};

const BACKGROUND_LEVEL: f64 = 0.2;
const FOREGROUND_LEVEL: f64 = 0.8;
/// Points on each side used to estimate the boundary normal.
const NORMAL_REACH: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Pentagram,
    Disk,
    Square,
}

impl Shape {
    pub const ALL: [Shape; 3] = [Shape::Pentagram, Shape::Disk, Shape::Square];

    #[must_use]
    pub fn name(self) -> &'static str {
        match self {
            Shape::Pentagram => "pentagram",
            Shape::Disk => "disk",
            Shape::Square => "square",
        }
    }
}

impl FromStr for Shape {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pentagram" => Ok(Shape::Pentagram),
            "disk" => Ok(Shape::Disk),
            "square" => Ok(Shape::Square),
            other => param_err(format!("unknown shape `{other}` (pentagram, disk, square)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fixture {
    pub image: GrayImage,
    pub clean: BinaryMask,
    pub jittered: BinaryMask,
}

/// Vertices of a regular pentagram centred in a `size`² raster with one tip
/// pointing up.
#[must_use]
pub fn pentagram_polygon(size: usize) -> Vec<Point2> {
    let c = (size as f64 - 1.0) / 2.0;
    let outer = 0.42 * size as f64;
    let inner = outer * (0.4 * PI).cos() / (0.2 * PI).cos();
    (0..10)
        .map(|i| {
            let a = -FRAC_PI_2 + PI * i as f64 / 5.0;
            let r = if i % 2 == 0 { outer } else { inner };
            Point2::new(c + r * a.cos(), c + r * a.sin())
        })
        .collect()
}

/// Axis-aligned square centred in the raster, corners on pixel centres.
#[must_use]
pub fn square_polygon(size: usize) -> Vec<Point2> {
    let c = ((size - 1) / 2) as f64;
    let h = (0.3 * size as f64).round();
    vec![
        Point2::new(c - h, c - h),
        Point2::new(c + h, c - h),
        Point2::new(c + h, c + h),
        Point2::new(c - h, c + h),
    ]
}

#[must_use]
pub fn disk_radius(size: usize) -> f64 {
    0.35 * size as f64
}

/// Ground-truth mask of a shape.
pub fn clean_mask(shape: Shape, size: usize) -> Result<BinaryMask> {
    match shape {
        Shape::Disk => {
            let c = (size as f64 - 1.0) / 2.0;
            let r2 = disk_radius(size).powi(2);
            Ok(BinaryMask::from_fn(size, size, |x, y| {
                let (dx, dy) = (x as f64 - c, y as f64 - c);
                dx * dx + dy * dy <= r2
            }))
        }
        Shape::Pentagram => fill_polygon(&Contour::closed(pentagram_polygon(size)), size, size),
        Shape::Square => fill_polygon(&Contour::closed(square_polygon(size)), size, size),
    }
}

/// Displaces every traced boundary point of `mask` along its outward normal
/// by a uniform offset in `[-jitter, jitter]` and fills the result.
pub fn jitter_mask(mask: &BinaryMask, jitter: f64, rng: &mut impl Rng) -> Result<BinaryMask> {
    if !(jitter >= 0.0 && jitter.is_finite()) {
        return param_err(format!("jitter must be non-negative, got {jitter}"));
    }
    if jitter == 0.0 {
        return Ok(mask.clone());
    }
    let Some(contour) = largest_contour(mask) else {
        return Ok(mask.clone());
    };
    let pts = &contour.points;
    let n = pts.len();
    if n < 3 {
        return Ok(mask.clone());
    }
    let displaced: Vec<Point2> = (0..n)
        .map(|i| {
            let ahead = pts[(i + NORMAL_REACH) % n];
            let behind = pts[(i + n - NORMAL_REACH) % n];
            let t = ahead - behind;
            let len = t.norm();
            // Traced contours have positive shoelace area, so (t.y, -t.x)
            // points outward.
            let normal = if len > 0.0 {
                Point2::new(t.y, -t.x) / len
            } else {
                Point2::default()
            };
            let offset: f64 = rng.random_range(-jitter..=jitter);
            pts[i] + normal * offset
        })
        .collect();
    fill_polygon(&Contour::closed(displaced), mask.width(), mask.height())
}

/// Image, clean mask and jittered mask for `shape`. Identical arguments
/// produce identical fixtures.
pub fn generate(shape: Shape, size: usize, jitter: f64, seed: u64) -> Result<Fixture> {
    if size < 64 {
        return param_err(format!("fixture size must be at least 64, got {size}"));
    }
    let clean = clean_mask(shape, size)?;
    let image = GrayImage::from_fn(size, size, |x, y| {
        if clean.get(x, y) {
            FOREGROUND_LEVEL
        } else {
            BACKGROUND_LEVEL
        }
    });
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jittered = jitter_mask(&clean, jitter, &mut rng)?;
    Ok(Fixture {
        image,
        clean,
        jittered,
    })
}

/// Points of a circle, for tests and examples.
#[must_use]
pub fn circle_points(center: Point2, radius: f64, count: usize) -> Vec<Point2> {
    (0..count)
        .map(|i| {
            let a = TAU * i as f64 / count as f64;
            center + Point2::new(a.cos(), a.sin()) * radius
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_jitter_is_identity() {
        let f = generate(Shape::Pentagram, 96, 0.0, 3).unwrap();
        assert_eq!(f.clean, f.jittered);
    }

    #[test]
    fn same_seed_same_fixture() {
        let a = generate(Shape::Disk, 80, 2.0, 11).unwrap();
        let b = generate(Shape::Disk, 80, 2.0, 11).unwrap();
        let c = generate(Shape::Disk, 80, 2.0, 12).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.jittered, c.jittered);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(generate(Shape::Disk, 32, 1.0, 0).is_err());
        assert!(generate(Shape::Disk, 64, -1.0, 0).is_err());
        assert!("hexagon".parse::<Shape>().is_err());
        assert_eq!("square".parse::<Shape>().unwrap(), Shape::Square);
    }

    #[test]
    fn shapes_are_centred_and_sized() {
        let m = clean_mask(Shape::Square, 100).unwrap();
        assert_eq!(m.count(), 61 * 61);
        let d = clean_mask(Shape::Disk, 100).unwrap();
        let area = PI * disk_radius(100).powi(2);
        assert!((d.count() as f64 - area).abs() / area < 0.02);
    }
}
