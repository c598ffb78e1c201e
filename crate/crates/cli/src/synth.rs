//! `synth`: seeded fixture generation.

use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use splinemask_core::synth::generate;

use crate::io::{write_gray, write_mask};
use crate::{usage, SynthArgs, EXIT_OK};

/// Paths of the image, clean mask and jittered mask.
pub fn output_paths(args: &SynthArgs) -> [PathBuf; 3] {
    let name = args.shape.name();
    ["image", "clean", "jittered"].map(|kind| args.out_dir.join(format!("{name}_{kind}.png")))
}

pub fn run(args: &SynthArgs) -> Result<u8> {
    if !(args.jitter.is_finite() && args.jitter >= 0.0) {
        return usage(format!("--jitter must be a non-negative number, got {}", args.jitter));
    }
    let fixture = match generate(args.shape, args.size, args.jitter, args.seed) {
        Ok(f) => f,
        Err(splinemask_core::Error::Parameter(msg)) => return usage(msg),
        Err(e) => return Err(e.into()),
    };
    fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("cannot create {}", args.out_dir.display()))?;
    let [image, clean, jittered] = output_paths(args);
    write_gray(&fixture.image, &image)?;
    write_mask(&fixture.clean, &clean)?;
    write_mask(&fixture.jittered, &jittered)?;
    for p in [&image, &clean, &jittered] {
        println!("{}", p.display());
    }
    Ok(EXIT_OK)
}
