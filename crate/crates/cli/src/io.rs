//! Raster file I/O. Masks are 8-bit single channel; values ≥ 128 are
//! foreground.

use std::path::Path;

use anyhow::{Context, Result};
use image::{ImageBuffer, Luma, Rgb, RgbImage};
use splinemask_core::{BinaryMask, GrayImage};

pub const FOREGROUND_THRESHOLD: u8 = 128;

pub fn read_rgb(path: &Path) -> Result<RgbImage> {
    let img = image::open(path).with_context(|| format!("cannot read image {}", path.display()))?;
    Ok(img.to_rgb8())
}

pub fn gray_from_rgb(rgb: &RgbImage) -> Result<GrayImage> {
    let (w, h) = rgb.dimensions();
    Ok(GrayImage::from_rgb8(w as usize, h as usize, rgb.as_raw())?)
}

pub fn read_mask(path: &Path) -> Result<BinaryMask> {
    let img = image::open(path).with_context(|| format!("cannot read mask {}", path.display()))?;
    let luma = img.to_luma8();
    let (w, h) = luma.dimensions();
    let data = luma.as_raw().iter().map(|&v| v >= FOREGROUND_THRESHOLD).collect();
    Ok(BinaryMask::from_vec(w as usize, h as usize, data)?)
}

pub fn mask_to_luma(mask: &BinaryMask) -> ImageBuffer<Luma<u8>, Vec<u8>> {
    let (w, h) = mask.dimensions();
    let raw = mask.data().iter().map(|&v| if v { 255 } else { 0 }).collect();
    ImageBuffer::from_raw(w as u32, h as u32, raw).expect("buffer matches dimensions")
}

/// Writes a mask as 0/255; the format follows the extension (PNG or PGM).
pub fn write_mask(mask: &BinaryMask, path: &Path) -> Result<()> {
    mask_to_luma(mask)
        .save(path)
        .with_context(|| format!("cannot write mask {}", path.display()))
}

pub fn write_gray(image: &GrayImage, path: &Path) -> Result<()> {
    let (w, h) = image.dimensions();
    let raw = image.data().iter().map(|&v| (v * 255.0).round() as u8).collect();
    let buf: ImageBuffer<Luma<u8>, Vec<u8>> =
        ImageBuffer::from_raw(w as u32, h as u32, raw).expect("buffer matches dimensions");
    buf.save(path)
        .with_context(|| format!("cannot write image {}", path.display()))
}

/// Draws a closed polyline, stepping at most one pixel at a time.
pub fn draw_closed_polyline(img: &mut RgbImage, points: &[[f64; 2]], color: Rgb<u8>) {
    let (w, h) = img.dimensions();
    for (i, a) in points.iter().enumerate() {
        let b = points[(i + 1) % points.len()];
        let steps = (b[0] - a[0]).abs().max((b[1] - a[1]).abs()).ceil().max(1.0) as usize;
        for s in 0..=steps {
            let f = s as f64 / steps as f64;
            let x = (a[0] + f * (b[0] - a[0])).round();
            let y = (a[1] + f * (b[1] - a[1])).round();
            if x >= 0.0 && y >= 0.0 && (x as u32) < w && (y as u32) < h {
                img.put_pixel(x as u32, y as u32, color);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mask_round_trip_png_and_pgm() {
        let dir = tempfile::tempdir().unwrap();
        let mask = BinaryMask::from_fn(13, 7, |x, y| (x * 3 + y) % 4 == 0);
        for name in ["m.png", "m.pgm"] {
            let path = dir.path().join(name);
            write_mask(&mask, &path).unwrap();
            assert_eq!(read_mask(&path).unwrap(), mask);
        }
    }

    #[test]
    fn threshold_is_128() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.png");
        let buf: ImageBuffer<Luma<u8>, Vec<u8>> = ImageBuffer::from_raw(4, 1, vec![0, 127, 128, 255]).unwrap();
        buf.save(&path).unwrap();
        assert_eq!(read_mask(&path).unwrap().data(), &[false, false, true, true]);
    }

    #[test]
    fn polyline_drawing_clips() {
        let mut img = RgbImage::new(5, 5);
        draw_closed_polyline(&mut img, &[[-3.0, 2.0], [8.0, 2.0], [2.0, 9.0]], Rgb([255, 0, 0]));
        assert!((0..5).all(|x| img.get_pixel(x, 2)[0] == 255));
    }
}
