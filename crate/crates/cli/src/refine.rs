//! `refine`: batch refinement with refined masks, a contour document and an
//! optional overlay.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use image::Rgb;
use splinemask_core::pipeline::stage_timing_report;
use splinemask_core::{refine_all, BinaryMask, RefineConfig};

use crate::document::{ContourDocument, ImageInfo, MaskRecord, SCHEMA_VERSION};
use crate::io::{draw_closed_polyline, gray_from_rgb, read_mask, read_rgb, write_mask};
use crate::{usage, ConfigFlags, RefineArgs, EXIT_FAILURE, EXIT_OK};

pub const DOCUMENT_FILE: &str = "contours.json";
pub const OVERLAY_FILE: &str = "overlay.png";
const OVERLAY_COLOR: Rgb<u8> = Rgb([255, 0, 0]);

/// Defaults, then the config file, then explicit flags.
pub fn build_config(file: Option<&Path>, flags: &ConfigFlags) -> Result<RefineConfig> {
    let mut config = match file {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
            match serde_json::from_str(&text) {
                Ok(c) => c,
                Err(e) => return usage(format!("invalid config {}: {e}", path.display())),
            }
        }
        None => RefineConfig::default(),
    };
    macro_rules! apply {
        ($($flag:ident => $($field:ident).+),* $(,)?) => {
            $(if let Some(v) = flags.$flag { config.$($field).+ = v; })*
        };
    }
    apply! {
        coarse_degree => coarse_degree,
        fine_degree => fine_degree,
        control_point_ratio => control_point_ratio,
        min_control_points => min_control_points,
        max_control_points => max_control_points,
        dilation_radius => dilation_radius,
        sigma => canny.sigma,
        low_ratio => canny.low_ratio,
        high_ratio => canny.high_ratio,
        curvature_theta => curvature_theta,
        min_contour_points => min_contour_points,
        raster_samples => raster_samples,
    }
    if flags.sample_count.is_some() {
        config.sample_count_n = flags.sample_count;
    }
    if flags.kd_radius.is_some() {
        config.kd_radius_r = flags.kd_radius;
    }
    if let Err(e) = config.validate() {
        return usage(format!("invalid configuration: {e}"));
    }
    Ok(config)
}

fn is_mask_file(path: &Path) -> bool {
    path.is_file()
        && path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| e.eq_ignore_ascii_case("png") || e.eq_ignore_ascii_case("pgm"))
}

fn mask_paths(args: &RefineArgs) -> Result<Vec<PathBuf>> {
    let paths = match &args.mask_dir {
        Some(dir) => {
            let mut paths: Vec<PathBuf> = fs::read_dir(dir)
                .with_context(|| format!("cannot list {}", dir.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| is_mask_file(p))
                .collect();
            paths.sort();
            paths
        }
        None => args.masks.clone(),
    };
    if paths.is_empty() {
        return usage("no mask files given");
    }
    Ok(paths)
}

/// `mask.png` becomes `mask.refined.png`; PGM input keeps PGM.
pub fn refined_name(path: &Path) -> String {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("mask");
    let ext = match path.extension().and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("pgm") => "pgm",
        _ => "png",
    };
    format!("{stem}.refined.{ext}")
}

pub fn run(args: &RefineArgs) -> Result<u8> {
    let config = build_config(args.config.as_deref(), &args.flags)?;
    if args.jobs == Some(0) {
        return usage("--jobs must be at least 1");
    }
    let paths = mask_paths(args)?;
    let rgb = read_rgb(&args.image)?;
    let image = gray_from_rgb(&rgb)?;
    fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("cannot create {}", args.out_dir.display()))?;

    let mut loaded: Vec<(usize, BinaryMask)> = Vec::new();
    let mut records: Vec<Option<MaskRecord>> = vec![None; paths.len()];
    for (id, path) in paths.iter().enumerate() {
        let mask = read_mask(path).and_then(|m| {
            if m.dimensions() == image.dimensions() {
                Ok(m)
            } else {
                anyhow::bail!(
                    "mask is {}x{} but the image is {}x{}",
                    m.width(),
                    m.height(),
                    image.width(),
                    image.height()
                )
            }
        });
        match mask {
            Ok(m) => loaded.push((id, m)),
            Err(e) => records[id] = Some(MaskRecord::failed(id, path.display().to_string(), format!("{e:#}"))),
        }
    }

    let masks: Vec<BinaryMask> = loaded.iter().map(|(_, m)| m.clone()).collect();
    let results = match args.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .context("cannot start worker threads")?
            .install(|| refine_all(&image, &masks, &config))?,
        None => refine_all(&image, &masks, &config)?,
    };

    let mut overlay = args.overlay.then(|| rgb.clone());
    let mut succeeded = Vec::new();
    for ((id, _), result) in loaded.iter().zip(&results) {
        let path = &paths[*id];
        let name = refined_name(path);
        let source = path.display().to_string();
        match write_mask(&result.refined_mask, &args.out_dir.join(&name)) {
            Ok(()) => {
                let record = MaskRecord::from_result(*id, source, name, result);
                if let (Some(img), Some(poly)) = (overlay.as_mut(), &record.fine_polyline) {
                    draw_closed_polyline(img, poly, OVERLAY_COLOR);
                }
                records[*id] = Some(record);
                succeeded.push(result.clone());
            }
            Err(e) => records[*id] = Some(MaskRecord::failed(*id, source, format!("{e:#}"))),
        }
    }
    if let Some(img) = overlay {
        let path = args.out_dir.join(OVERLAY_FILE);
        img.save(&path).with_context(|| format!("cannot write {}", path.display()))?;
    }

    let doc = ContourDocument {
        schema_version: SCHEMA_VERSION.to_string(),
        image: ImageInfo {
            width: image.width(),
            height: image.height(),
            source_path: args.image.display().to_string(),
        },
        config,
        masks: records.into_iter().flatten().collect(),
        timing: stage_timing_report(&succeeded).ok(),
    };
    let doc_path = args.out_dir.join(DOCUMENT_FILE);
    fs::write(&doc_path, serde_json::to_string_pretty(&doc)?)
        .with_context(|| format!("cannot write {}", doc_path.display()))?;

    for m in doc.masks.iter().filter(|m| m.refined_file.is_none()) {
        eprintln!("{}: {}", m.source_path, m.error.as_deref().unwrap_or("failed"));
    }
    eprintln!("refined {} of {} masks into {}", succeeded.len(), doc.masks.len(), args.out_dir.display());
    Ok(if succeeded.is_empty() { EXIT_FAILURE } else { EXIT_OK })
}
