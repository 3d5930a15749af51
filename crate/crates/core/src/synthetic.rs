//! Synthetic moving-blob videos with simulated fixations.
//!
//! A bright Gaussian blob drifts over a static smooth-noise texture; each
//! simulated subject fixates near the blob once per frame. Used by the
//! end-to-end tests and the `synth` CLI subcommand.

use std::fs;
use std::path::{Path, PathBuf};

use image::{GrayImage, Luma};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::density::FixationRecord;
use crate::error::{Error, Result};
use crate::io::{write_fixation_csv, write_manifest, FixationsByVideo, ManifestFile};
use crate::predictors::plane::{gaussian_blur, Plane};

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub video_id: String,
    pub size: usize,
    pub frames: usize,
    pub fps: f64,
    pub subjects: usize,
    /// Spread of fixations around the blob center, in pixels.
    pub fixation_sigma: f64,
    pub blob_sigma: f64,
    pub blob_amplitude: f64,
    pub background: f64,
    pub texture_amplitude: f64,
    /// Extra fixation-only videos (no frames) that feed the shuffle pool.
    pub decoy_videos: usize,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            video_id: "synthetic".into(),
            size: 64,
            frames: 30,
            fps: 30.0,
            subjects: 8,
            fixation_sigma: 3.0,
            blob_sigma: 3.0,
            blob_amplitude: 0.5,
            background: 0.3,
            texture_amplitude: 0.15,
            decoy_videos: 1,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticVideo {
    pub spec: SyntheticSpec,
    /// Luminance per frame, in `[0, 1]`.
    pub frames: Vec<Plane>,
    pub blob_centers: Vec<(f64, f64)>,
    pub fixations: FixationsByVideo,
}

impl SyntheticSpec {
    fn duration(&self) -> f64 {
        self.frames as f64 / self.fps
    }

    /// Blob center at time `t` seconds: left-to-right sweep with a vertical wave.
    pub fn blob_center(&self, t: f64) -> (f64, f64) {
        let s = self.size as f64;
        let phase = (t / self.duration()).clamp(0.0, 1.0);
        let x = 0.22 * s + 0.56 * s * phase;
        let y = 0.5 * s + 0.2 * s * (2.0 * std::f64::consts::PI * phase).sin();
        (x, y)
    }
}

fn texture(spec: &SyntheticSpec, rng: &mut ChaCha8Rng) -> Plane {
    let noise = Plane::from_fn(spec.size, spec.size, |_, _| rng.random::<f64>() - 0.5);
    let smooth = gaussian_blur(&noise, 1.5);
    let peak = smooth
        .data
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(1e-12);
    smooth.map(|v| spec.background + spec.texture_amplitude * v / peak)
}

fn sample_fixations(
    spec: &SyntheticSpec,
    rng: &mut ChaCha8Rng,
    center: impl Fn(f64) -> (f64, f64),
) -> Vec<FixationRecord> {
    let noise = Normal::new(0.0, spec.fixation_sigma).expect("positive sigma");
    let hi = spec.size as f64 - 1e-6;
    let mut out = Vec::with_capacity(spec.frames * spec.subjects);
    for k in 0..spec.frames {
        for s in 0..spec.subjects {
            let t = (k as f64 + rng.random::<f64>()) / spec.fps;
            let (cx, cy) = center(t);
            let x = (cx + noise.sample(rng)).clamp(0.0, hi);
            let y = (cy + noise.sample(rng)).clamp(0.0, hi);
            out.push(FixationRecord::new(format!("s{s:02}"), t, x, y));
        }
    }
    out
}

pub fn generate(spec: &SyntheticSpec) -> Result<SyntheticVideo> {
    if spec.size < 8
        || spec.frames == 0
        || spec.fps.is_nan()
        || spec.fps <= 0.0
        || spec.subjects == 0
    {
        return Err(Error::InvalidArgument(
            "synthetic video needs size >= 8, frames, fps and subjects".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let background = texture(spec, &mut rng);
    let two_s2 = 2.0 * spec.blob_sigma * spec.blob_sigma;

    let mut frames = Vec::with_capacity(spec.frames);
    let mut centers = Vec::with_capacity(spec.frames);
    for k in 0..spec.frames {
        let (cx, cy) = spec.blob_center(k as f64 / spec.fps);
        centers.push((cx, cy));
        frames.push(Plane::from_fn(spec.size, spec.size, |x, y| {
            let d2 = (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2);
            (background.get(x, y) + spec.blob_amplitude * (-d2 / two_s2).exp()).clamp(0.0, 1.0)
        }));
    }

    let mut fixations = FixationsByVideo::new();
    fixations.insert(
        spec.video_id.clone(),
        sample_fixations(spec, &mut rng, |t| spec.blob_center(t)),
    );
    for d in 0..spec.decoy_videos {
        // decoys wander along a mirrored path
        let s = spec.size as f64;
        let recs = sample_fixations(spec, &mut rng, |t| {
            let (x, y) = spec.blob_center(t);
            (s - 1.0 - x, s - 1.0 - y)
        });
        fixations.insert(format!("{}_decoy{d}", spec.video_id), recs);
    }

    Ok(SyntheticVideo {
        spec: spec.clone(),
        frames,
        blob_centers: centers,
        fixations,
    })
}

/// Paths written by [`write_dataset`].
#[derive(Debug, Clone)]
pub struct DatasetPaths {
    pub manifest: PathBuf,
    pub fixations: PathBuf,
}

/// Writes 8-bit PNG frames, `manifest.json` and `fixations.csv` under `dir`.
pub fn write_dataset(video: &SyntheticVideo, dir: &Path) -> Result<DatasetPaths> {
    let frame_dir = dir.join("frames");
    fs::create_dir_all(&frame_dir)?;
    let mut names = Vec::with_capacity(video.frames.len());
    for (k, f) in video.frames.iter().enumerate() {
        let img = GrayImage::from_fn(f.width as u32, f.height as u32, |x, y| {
            Luma([(f.get(x as usize, y as usize) * 255.0)
                .round()
                .clamp(0.0, 255.0) as u8])
        });
        let rel = PathBuf::from("frames").join(format!("{k:05}.png"));
        img.save(dir.join(&rel))
            .map_err(|e| Error::Io(std::io::Error::other(e)))?;
        names.push(rel);
    }
    let manifest = dir.join("manifest.json");
    write_manifest(
        &manifest,
        &ManifestFile {
            video_id: video.spec.video_id.clone(),
            width: video.spec.size,
            height: video.spec.size,
            fps: video.spec.fps,
            frames: names,
        },
    )?;
    let fixations = dir.join("fixations.csv");
    write_fixation_csv(&fixations, &video.fixations)?;
    Ok(DatasetPaths {
        manifest,
        fixations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_seeded() {
        let spec = SyntheticSpec {
            frames: 4,
            ..SyntheticSpec::default()
        };
        let a = generate(&spec).unwrap();
        let b = generate(&spec).unwrap();
        assert_eq!(a.frames, b.frames);
        assert_eq!(a.fixations, b.fixations);
        assert_eq!(a.fixations[&spec.video_id].len(), 4 * spec.subjects);
        assert_eq!(a.fixations.len(), 2);
    }

    #[test]
    fn blob_is_brightest_near_center() {
        let v = generate(&SyntheticSpec::default()).unwrap();
        let (cx, cy) = v.blob_centers[10];
        let f = &v.frames[10];
        let (mut best, mut at) = (f64::MIN, (0, 0));
        for y in 0..f.height {
            for x in 0..f.width {
                if f.get(x, y) > best {
                    best = f.get(x, y);
                    at = (x, y);
                }
            }
        }
        assert!((at.0 as f64 - cx).hypot(at.1 as f64 - cy) < 3.0);
    }
}
