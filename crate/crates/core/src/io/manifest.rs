use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::predictors::Frame;

/// On-disk manifest layout. Frame paths are relative to the manifest file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestFile {
    pub video_id: String,
    pub width: usize,
    pub height: usize,
    pub fps: f64,
    pub frames: Vec<PathBuf>,
}

/// A validated frame sequence with resolved frame paths.
#[derive(Debug, Clone, PartialEq)]
pub struct VideoManifest {
    pub video_id: String,
    pub width: usize,
    pub height: usize,
    pub fps: f64,
    pub frame_paths: Vec<PathBuf>,
}

impl VideoManifest {
    pub fn frame_count(&self) -> usize {
        self.frame_paths.len()
    }

    fn validate_fields(&self) -> Result<()> {
        if self.video_id.is_empty() {
            return Err(Error::ManifestInvalid("video_id is empty".into()));
        }
        if !(self.fps > 0.0 && self.fps.is_finite()) {
            return Err(Error::ManifestInvalid(format!(
                "fps must be positive, got {}",
                self.fps
            )));
        }
        if self.width == 0 || self.height == 0 {
            return Err(Error::ManifestInvalid(
                "width and height must be positive".into(),
            ));
        }
        if self.frame_paths.is_empty() {
            return Err(Error::ManifestInvalid("frame list is empty".into()));
        }
        Ok(())
    }
}

/// Parses a JSON manifest and checks every frame's size from its header.
pub fn load_manifest(path: &Path) -> Result<VideoManifest> {
    let text = fs::read_to_string(path)?;
    let file: ManifestFile =
        serde_json::from_str(&text).map_err(|e| Error::ManifestInvalid(e.to_string()))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let manifest = VideoManifest {
        video_id: file.video_id,
        width: file.width,
        height: file.height,
        fps: file.fps,
        frame_paths: file.frames.iter().map(|p| base.join(p)).collect(),
    };
    manifest.validate_fields()?;
    for p in &manifest.frame_paths {
        let (w, h) = image::image_dimensions(p).map_err(|e| Error::FrameDecode {
            path: p.clone(),
            reason: e.to_string(),
        })?;
        if (w as usize, h as usize) != (manifest.width, manifest.height) {
            return Err(Error::FrameDecode {
                path: p.clone(),
                reason: format!(
                    "frame is {w}x{h}, manifest declares {}x{}",
                    manifest.width, manifest.height
                ),
            });
        }
    }
    Ok(manifest)
}

pub fn write_manifest(path: &Path, manifest: &ManifestFile) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(manifest)? + "\n")?;
    Ok(())
}

/// Decodes every frame of the manifest, in order.
pub fn load_frames(manifest: &VideoManifest) -> Result<Vec<Frame>> {
    manifest
        .frame_paths
        .par_iter()
        .map(|p| {
            let f = Frame::load(p)?;
            if (f.width(), f.height()) != (manifest.width, manifest.height) {
                return Err(Error::FrameDecode {
                    path: p.clone(),
                    reason: format!(
                        "decoded size {}x{} differs from manifest",
                        f.width(),
                        f.height()
                    ),
                });
            }
            Ok(f)
        })
        .collect()
}
