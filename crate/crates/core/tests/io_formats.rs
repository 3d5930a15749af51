use std::fs;
use std::path::Path;

use image::{GrayImage, Luma};
use vsal_core::io::{load_manifest, read_map, write_manifest, write_map, ManifestFile, MapFormat};
use vsal_core::{Error, SaliencyMap};

fn write_frames(dir: &Path, sizes: &[(u32, u32)]) -> Vec<std::path::PathBuf> {
    fs::create_dir_all(dir.join("frames")).unwrap();
    sizes
        .iter()
        .enumerate()
        .map(|(k, &(w, h))| {
            let rel = Path::new("frames").join(format!("{k:03}.png"));
            GrayImage::from_fn(w, h, |x, y| Luma([((x + y) % 256) as u8]))
                .save(dir.join(&rel))
                .unwrap();
            rel
        })
        .collect()
}

fn manifest(frames: Vec<std::path::PathBuf>, fps: f64) -> ManifestFile {
    ManifestFile {
        video_id: "clip".into(),
        width: 64,
        height: 64,
        fps,
        frames,
    }
}

#[test]
fn thirty_valid_frames() {
    let dir = tempfile::tempdir().unwrap();
    let frames = write_frames(dir.path(), &[(64, 64); 30]);
    let path = dir.path().join("manifest.json");
    write_manifest(&path, &manifest(frames, 25.0)).unwrap();
    let m = load_manifest(&path).unwrap();
    assert_eq!(m.frame_count(), 30);
    assert_eq!((m.width, m.height, m.fps), (64, 64, 25.0));
    assert!(m.frame_paths[29].ends_with("frames/029.png"));
}

#[test]
fn wrong_sized_frame_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let mut sizes = vec![(64, 64); 5];
    sizes[3] = (32, 32);
    let frames = write_frames(dir.path(), &sizes);
    let path = dir.path().join("manifest.json");
    write_manifest(&path, &manifest(frames, 25.0)).unwrap();
    match load_manifest(&path) {
        Err(Error::FrameDecode { path, .. }) => assert!(path.ends_with("frames/003.png")),
        other => panic!("expected FrameDecode, got {other:?}"),
    }
}

#[test]
fn zero_fps_is_invalid() {
    let dir = tempfile::tempdir().unwrap();
    let frames = write_frames(dir.path(), &[(64, 64); 2]);
    let path = dir.path().join("manifest.json");
    write_manifest(&path, &manifest(frames, 0.0)).unwrap();
    assert!(matches!(
        load_manifest(&path),
        Err(Error::ManifestInvalid(_))
    ));
}

#[test]
fn missing_frame_and_unknown_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("manifest.json");
    write_manifest(&path, &manifest(vec!["frames/none.png".into()], 25.0)).unwrap();
    assert!(matches!(
        load_manifest(&path),
        Err(Error::FrameDecode { .. })
    ));
    fs::write(
        &path,
        r#"{"video_id":"a","width":8,"height":8,"fps":1,"frames":[],"extra":1}"#,
    )
    .unwrap();
    assert!(matches!(
        load_manifest(&path),
        Err(Error::ManifestInvalid(_))
    ));
}

#[test]
fn pfm_file_round_trip_is_single_precision_exact() {
    let dir = tempfile::tempdir().unwrap();
    let m = SaliencyMap::from_fn(17, 9, |x, y| {
        (x as f64 * 0.37 + y as f64).sin().abs() * 1e-3
    });
    let path = dir.path().join("m.pfm");
    write_map(&m, &path, MapFormat::Pfm).unwrap();
    let back = read_map(&path).unwrap();
    assert_eq!(back.dims(), (17, 9));
    for (a, b) in m.values().iter().zip(back.values()) {
        assert!((a - b).abs() <= 1e-6 * a.abs().max(f64::MIN_POSITIVE));
    }
    assert_eq!(back, m.quantize_f32());
}

#[test]
fn pgm_file_is_min_max_scaled() {
    let dir = tempfile::tempdir().unwrap();
    let m = SaliencyMap::from_fn(4, 1, |x, _| 2.0 + x as f64);
    let path = dir.path().join("m.pgm");
    write_map(&m, &path, MapFormat::Pgm8).unwrap();
    let bytes = fs::read(&path).unwrap();
    assert!(bytes.starts_with(b"P5\n4 1\n255\n"));
    assert_eq!(&bytes[bytes.len() - 4..], &[0, 85, 170, 255]);
}
