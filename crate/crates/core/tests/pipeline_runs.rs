mod common;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use common::synthetic_dataset;
use vsal_core::config::RunConfig;
use vsal_core::pipeline::run_pipeline;
use vsal_core::Error;

fn config(out: PathBuf) -> RunConfig {
    RunConfig {
        out_dir: out,
        ..RunConfig::default()
    }
}

fn frame_files(dir: &Path) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "pfm"))
        .collect();
    v.sort();
    v
}

fn assert_same_sequence(a: &Path, b: &Path) {
    let (fa, fb) = (frame_files(a), frame_files(b));
    assert!(!fa.is_empty(), "no frames in {}", a.display());
    assert_eq!(fa.len(), fb.len(), "{} vs {}", a.display(), b.display());
    for (x, y) in fa.iter().zip(&fb) {
        assert_eq!(x.file_name(), y.file_name());
        assert!(
            fs::read(x).unwrap() == fs::read(y).unwrap(),
            "{} differs",
            x.display()
        );
    }
}

fn vsal(args: &[&str]) {
    let out = Command::new(env!("CARGO_BIN_EXE_vsal"))
        .args(args)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "vsal {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn synthetic_run_writes_every_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let data = synthetic_dataset(&dir.path().join("data"));
    let out = dir.path().join("out");
    let result = run_pipeline(&config(out.clone()), &data.manifest, &data.fixations).unwrap();
    assert!(result.mask.count() >= 1);
    assert_eq!(result.fused_maps().len(), 30);
    for name in [
        "report.json",
        "run.json",
        "selection.json",
        "similarity.csv",
        "fusion.csv",
    ] {
        assert!(out.join(name).is_file(), "{name} missing");
    }
    for sub in [
        "gt",
        "spatial",
        "fused",
        "predictors/temporal_diff",
        "predictors/spectral_residual",
    ] {
        assert_eq!(frame_files(&out.join(sub)).len(), 30, "{sub}");
    }
    let run: serde_json::Value =
        serde_json::from_slice(&fs::read(out.join("run.json")).unwrap()).unwrap();
    assert_eq!(run["config"]["omega"], 2.1);
    assert_eq!(run["frames"], 30);
}

#[test]
fn missing_fixation_file_fails_before_predictors() {
    let dir = tempfile::tempdir().unwrap();
    let data = synthetic_dataset(&dir.path().join("data"));
    let out = dir.path().join("out");
    let err = run_pipeline(
        &config(out.clone()),
        &data.manifest,
        &dir.path().join("absent.csv"),
    )
    .unwrap_err();
    match err {
        Error::Stage { stage, .. } => assert_eq!(stage, "fixations"),
        other => panic!("expected a stage error, got {other:?}"),
    }
    assert!(!out.exists());
}

#[test]
fn fixations_outside_frame_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let data = synthetic_dataset(&dir.path().join("data"));
    let mut text = fs::read_to_string(&data.fixations).unwrap();
    text.push_str("synthetic,s99,0.1,64.0,3.0\n");
    fs::write(&data.fixations, text).unwrap();
    let err = run_pipeline(
        &config(dir.path().join("out")),
        &data.manifest,
        &data.fixations,
    )
    .unwrap_err();
    assert!(err.to_string().contains("fixations"), "{err}");
}

#[test]
fn cli_stages_reproduce_pipeline_intermediates() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    let s = |p: &Path| p.to_str().unwrap().to_string();
    let data = root.join("data");
    vsal(&["synth", "--out", &s(&data)]);
    let manifest = s(&data.join("manifest.json"));
    let fixations = s(&data.join("fixations.csv"));

    let pipe = root.join("pipe");
    vsal(&[
        "pipeline",
        "--manifest",
        &manifest,
        "--fixations",
        &fixations,
        "--out",
        &s(&pipe),
    ]);

    let cli = root.join("cli");
    vsal(&[
        "density",
        "--manifest",
        &manifest,
        "--fixations",
        &fixations,
        "--out",
        &s(&cli.join("gt")),
    ]);
    assert_same_sequence(&cli.join("gt"), &pipe.join("gt"));

    vsal(&[
        "predict",
        "--manifest",
        &manifest,
        "--out",
        &s(&cli.join("predictors")),
    ]);
    for name in [
        "spectral_residual",
        "center_surround",
        "global_contrast",
        "frequency_tuned",
        "temporal_diff",
    ] {
        assert_same_sequence(
            &cli.join("predictors").join(name),
            &pipe.join("predictors").join(name),
        );
    }

    vsal(&[
        "select",
        "--maps",
        &s(&cli.join("predictors")),
        "--out",
        &s(&cli),
    ]);
    for name in ["selection.json", "similarity.csv"] {
        assert_eq!(
            fs::read(cli.join(name)).unwrap(),
            fs::read(pipe.join(name)).unwrap(),
            "{name}"
        );
    }

    let selection: serde_json::Value =
        serde_json::from_slice(&fs::read(cli.join("selection.json")).unwrap()).unwrap();
    let mut fuse_args = vec!["fuse".to_string()];
    for name in selection["selected"].as_array().unwrap() {
        fuse_args.push("--ensemble".into());
        fuse_args.push(s(&cli.join("predictors").join(name.as_str().unwrap())));
    }
    fuse_args.extend([
        "--temporal".into(),
        s(&cli.join("predictors/temporal_diff")),
        "--out".into(),
        s(&cli.join("fused")),
        "--spatial-out".into(),
        s(&cli.join("spatial")),
    ]);
    vsal(&fuse_args.iter().map(String::as_str).collect::<Vec<_>>());
    assert_same_sequence(&cli.join("spatial"), &pipe.join("spatial"));
    assert_same_sequence(&cli.join("fused"), &pipe.join("fused"));
    assert_eq!(
        fs::read(cli.join("fused/fusion.csv")).unwrap(),
        fs::read(pipe.join("fusion.csv")).unwrap()
    );

    let report = cli.join("report.json");
    vsal(&[
        "eval",
        "--pred",
        &s(&cli.join("fused")),
        "--gt",
        &s(&cli.join("gt")),
        "--manifest",
        &manifest,
        "--fixations",
        &fixations,
        "--out",
        &s(&report),
    ]);
    assert_eq!(
        fs::read(&report).unwrap(),
        fs::read(pipe.join("report.json")).unwrap()
    );
}

#[test]
fn select_from_csv_and_bad_flags() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sim.csv");
    fs::write(&csv, "p1,p2,p3\n1,0.9,0.1\n0.9,1,0.1\n0.1,0.1,1\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_vsal"))
        .args(["select", "--similarity", csv.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["selected"], serde_json::json!(["p1", "p3"]));

    let bad = Command::new(env!("CARGO_BIN_EXE_vsal"))
        .args([
            "select",
            "--similarity",
            csv.to_str().unwrap(),
            "--lambda-d",
            "-1",
        ])
        .output()
        .unwrap();
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).contains("lambda"));
}
