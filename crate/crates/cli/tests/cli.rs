use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use splinemask_cli::document::{ContourDocument, SCHEMA};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_splinemask"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn synth(dir: &Path, shape: &str, size: usize, seed: u64) -> [PathBuf; 3] {
    let out = run(&["synth", "--shape", shape, "--size", &size.to_string(), "--seed", &seed.to_string(), "--out-dir", s(dir)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    ["image", "clean", "jittered"].map(|k| dir.join(format!("{shape}_{k}.png")))
}

fn files_in(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    names.sort();
    names
}

fn load_doc(dir: &Path) -> (Value, ContourDocument) {
    let text = fs::read_to_string(dir.join("contours.json")).unwrap();
    (serde_json::from_str(&text).unwrap(), serde_json::from_str(&text).unwrap())
}

fn assert_valid(doc: &Value) {
    let schema: Value = serde_json::from_str(SCHEMA).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?}");
}

#[test]
fn one_mask_gives_mask_and_document() {
    let fx = tempfile::tempdir().unwrap();
    let [image, _, jittered] = synth(fx.path(), "disk", 96, 1);
    let out = tempfile::tempdir().unwrap();
    let res = run(&["refine", "--image", s(&image), "--mask", s(&jittered), "--out-dir", s(out.path())]);
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    assert_eq!(files_in(out.path()), ["contours.json", "disk_jittered.refined.png"]);

    let (raw, doc) = load_doc(out.path());
    assert_valid(&raw);
    assert_eq!(doc.schema_version, "1");
    assert_eq!((doc.image.width, doc.image.height), (96, 96));
    let rec = &doc.masks[0];
    assert!(rec.error.is_none());
    assert!(rec.sample_count > 0);
    let r = doc.config.dilation_radius;
    for poly in [rec.coarse_polyline.as_ref().unwrap(), rec.fine_polyline.as_ref().unwrap()] {
        assert_eq!(poly.first(), poly.last());
        for p in poly {
            assert!(p[0] >= -r && p[0] <= 95.0 + r && p[1] >= -r && p[1] <= 95.0 + r);
        }
    }
}

#[test]
fn overlay_adds_a_third_file() {
    let fx = tempfile::tempdir().unwrap();
    let [image, _, jittered] = synth(fx.path(), "square", 96, 2);
    let out = tempfile::tempdir().unwrap();
    let res = run(&["refine", "--image", s(&image), "--mask", s(&jittered), "--out-dir", s(out.path()), "--overlay"]);
    assert_eq!(res.status.code(), Some(0));
    assert_eq!(files_in(out.path()), ["contours.json", "overlay.png", "square_jittered.refined.png"]);
    let overlay = image::open(out.path().join("overlay.png")).unwrap().to_rgb8();
    assert!(overlay.pixels().any(|p| p.0 == [255, 0, 0]));
}

#[test]
fn corrupt_mask_in_batch_is_reported_and_others_succeed() {
    let fx = tempfile::tempdir().unwrap();
    let [image, _, _] = synth(fx.path(), "pentagram", 96, 3);
    let masks = tempfile::tempdir().unwrap();
    for seed in 0..4u64 {
        let d = fx.path().join(format!("s{seed}"));
        let [_, _, j] = synth(&d, "pentagram", 96, seed);
        fs::copy(j, masks.path().join(format!("m{seed}.png"))).unwrap();
    }
    fs::write(masks.path().join("m9.png"), b"not a png").unwrap();
    let out = tempfile::tempdir().unwrap();
    let res = run(&["refine", "--image", s(&image), "--mask-dir", s(masks.path()), "--out-dir", s(out.path()), "--jobs", "2"]);
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    let names = files_in(out.path());
    assert_eq!(names.iter().filter(|n| n.ends_with(".refined.png")).count(), 4);
    let (raw, doc) = load_doc(out.path());
    assert_valid(&raw);
    assert_eq!(doc.masks.len(), 5);
    let ids: Vec<usize> = doc.masks.iter().map(|m| m.mask_id).collect();
    assert_eq!(ids, [0, 1, 2, 3, 4]);
    let bad = &doc.masks[4];
    assert!(bad.source_path.ends_with("m9.png"));
    assert!(bad.error.is_some() && bad.refined_file.is_none());
    assert_eq!(bad.flags, ["failed"]);
}

#[test]
fn all_masks_failing_exits_one() {
    let fx = tempfile::tempdir().unwrap();
    let [image, _, _] = synth(fx.path(), "disk", 96, 0);
    let small = tempfile::tempdir().unwrap();
    let [_, _, wrong_size] = synth(small.path(), "disk", 64, 0);
    let out = tempfile::tempdir().unwrap();
    let res = run(&["refine", "--image", s(&image), "--mask", s(&wrong_size), "--out-dir", s(out.path())]);
    assert_eq!(res.status.code(), Some(1));
    let (raw, doc) = load_doc(out.path());
    assert_valid(&raw);
    assert!(doc.masks[0].error.as_ref().unwrap().contains("64x64"));
}

#[test]
fn bad_arguments_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["synth", "--shape", "hexagon", "--out-dir", s(dir.path())],
        vec!["synth", "--shape", "disk", "--size", "32", "--out-dir", s(dir.path())],
        vec!["refine", "--image", "x.png", "--out-dir", s(dir.path())],
        vec!["refine", "--image", "x.png", "--mask", "m.png", "--out-dir", s(dir.path()), "--sigma", "-1"],
        vec!["frobnicate"],
    ] {
        assert_eq!(run(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn synth_is_byte_deterministic_and_zero_jitter_is_clean() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let pa = synth(a.path(), "pentagram", 128, 9);
    let pb = synth(b.path(), "pentagram", 128, 9);
    for (x, y) in pa.iter().zip(&pb) {
        assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap());
    }
    let z = tempfile::tempdir().unwrap();
    let out = run(&["synth", "--shape", "square", "--size", "80", "--jitter", "0", "--out-dir", s(z.path())]);
    assert!(out.status.success());
    assert_eq!(
        fs::read(z.path().join("square_clean.png")).unwrap(),
        fs::read(z.path().join("square_jittered.png")).unwrap()
    );
}

#[test]
fn metrics_reports_json() {
    let fx = tempfile::tempdir().unwrap();
    let [_, clean, jittered] = synth(fx.path(), "pentagram", 256, 0);
    let same = run(&["metrics", s(&clean), s(&clean)]);
    assert!(same.status.success());
    let v: Value = serde_json::from_slice(&same.stdout).unwrap();
    assert_eq!(v["frechet_distance"], 0.0);

    let diff = run(&["metrics", s(&clean), s(&jittered), "--cyclic"]);
    let v: Value = serde_json::from_slice(&diff.stdout).unwrap();
    let var = |k: &str| v[k]["menger"]["curvature_variance"].as_f64().unwrap();
    assert!(var("b") > var("a"));
    assert!(v["a"]["paper_formula"]["mean_curvature"].is_number());
    assert!(v["frechet_distance"].as_f64().unwrap() > 0.0);

    let bad = fx.path().join("bad.json");
    fs::write(&bad, "{").unwrap();
    let res = run(&["metrics", s(&bad), s(&clean)]);
    assert_eq!(res.status.code(), Some(1));
    assert!(!res.stderr.is_empty());
}
