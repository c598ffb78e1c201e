use splinemask_core::edge::{canny, gaussian_blur, mask_edges, CannyParams, EdgeMap};
use splinemask_core::{BinaryMask, GrayImage};

fn disk_image(size: usize, r: f64) -> GrayImage {
    let c = (size as f64 - 1.0) / 2.0;
    GrayImage::from_fn(size, size, |x, y| {
        if (x as f64 - c).hypot(y as f64 - c) <= r { 1.0 } else { 0.0 }
    })
}

fn sigma(s: f64) -> CannyParams {
    CannyParams { sigma: s, ..CannyParams::default() }
}

fn blobs_image(size: usize) -> GrayImage {
    GrayImage::from_fn(size, size, |x, y| {
        let (fx, fy) = (x as f64, y as f64);
        let a = if (fx - 20.0).hypot(fy - 24.0) < 12.0 { 0.5 } else { 0.0 };
        let b = if (fx - 44.0).abs() < 10.0 && (fy - 40.0).abs() < 14.0 { 0.3 } else { 0.0 };
        0.1 + a + b
    })
}

fn rotate90(img: &GrayImage) -> GrayImage {
    let (w, h) = img.dimensions();
    GrayImage::from_fn(h, w, |x, y| img.get(y, h - 1 - x))
}

#[test]
fn vertical_step_gives_one_contiguous_column() {
    let img = GrayImage::from_fn(64, 48, |x, _| if x < 32 { 0.0 } else { 1.0 });
    let edges = canny(&img, &sigma(1.0)).unwrap();
    for y in 0..48 {
        let cols: Vec<usize> = (0..64).filter(|&x| edges.get(x, y)).collect();
        assert_eq!(cols.len(), 1, "row {y}: {cols:?}");
        assert!((31..=32).contains(&cols[0]), "row {y}: {cols:?}");
    }
}

#[test]
fn constant_image_has_no_edges() {
    let img = GrayImage::from_fn(40, 30, |_, _| 0.6);
    assert_eq!(canny(&img, &CannyParams::default()).unwrap().count(), 0);
}

#[test]
fn disk_edge_count_tracks_circumference() {
    let edges = canny(&disk_image(96, 20.0), &sigma(1.0)).unwrap();
    let expected = std::f64::consts::TAU * 20.0;
    let count = edges.count() as f64;
    assert!((count - expected).abs() <= 0.15 * expected, "{count} vs {expected}");
}

#[test]
fn disk_edges_survive_rotation() {
    let img = disk_image(96, 20.0);
    let a = canny(&img, &CannyParams::default()).unwrap().count() as f64;
    let b = canny(&rotate90(&img), &CannyParams::default()).unwrap().count() as f64;
    assert!((a - b).abs() < 0.1 * a, "{a} vs {b}");
}

#[test]
fn raising_high_ratio_never_adds_edges() {
    let img = blobs_image(64);
    let mut prev: Option<EdgeMap> = None;
    for high in [0.15, 0.2, 0.3, 0.45, 0.6, 0.9] {
        let params = CannyParams { high_ratio: high, ..CannyParams::default() };
        let edges = canny(&img, &params).unwrap();
        if let Some(p) = &prev {
            assert!(edges.points().all(|(x, y)| p.get(x, y)), "high {high}");
        }
        prev = Some(edges);
    }
}

#[test]
fn suppressed_edges_are_thin_across_the_gradient() {
    for (img, sigma) in [(disk_image(80, 25.0), 2.0), (blobs_image(64), 1.0), (blobs_image(64), 2.0)] {
        let params = CannyParams { sigma, ..CannyParams::default() };
        let edges = canny(&img, &params).unwrap();
        let blur = gaussian_blur(&img, sigma).unwrap();
        let (w, h) = img.dimensions();
        let at = |x: i64, y: i64| blur[y.clamp(0, h as i64 - 1) as usize * w + x.clamp(0, w as i64 - 1) as usize];
        for (x, y) in edges.points() {
            let (x, y) = (x as i64, y as i64);
            let gx = at(x + 1, y - 1) + 2.0 * at(x + 1, y) + at(x + 1, y + 1)
                - at(x - 1, y - 1) - 2.0 * at(x - 1, y) - at(x - 1, y + 1);
            let gy = at(x - 1, y + 1) + 2.0 * at(x, y + 1) + at(x + 1, y + 1)
                - at(x - 1, y - 1) - 2.0 * at(x, y - 1) - at(x + 1, y - 1);
            let angle = gy.atan2(gx).to_degrees().rem_euclid(180.0);
            let (dx, dy) = match angle {
                a if !(22.5..157.5).contains(&a) => (1, 0),
                a if a < 67.5 => (1, 1),
                a if a < 112.5 => (0, 1),
                _ => (-1, 1),
            };
            let on = |x: i64, y: i64| {
                x >= 0 && y >= 0 && (x as usize) < w && (y as usize) < h && edges.get(x as usize, y as usize)
            };
            assert!(!(on(x + dx, y + dy) && on(x - dx, y - dy)), "thick edge at ({x},{y})");
        }
    }
}

#[test]
fn masked_edges_are_a_subset() {
    let img = blobs_image(64);
    let edges = canny(&img, &CannyParams::default()).unwrap();
    let region = BinaryMask::from_fn(64, 64, |x, y| (x + y) % 3 != 0 && x > 10);
    let kept = mask_edges(&edges, &region).unwrap();
    assert!(!kept.is_empty());
    for p in &kept {
        let (x, y) = (p.x as usize, p.y as usize);
        assert!(edges.get(x, y) && region.get(x, y));
    }
    assert_eq!(kept.len(), edges.points().filter(|&(x, y)| region.get(x, y)).count());
}
