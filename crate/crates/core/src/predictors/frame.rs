use std::path::Path;

use image::DynamicImage;

use super::plane::Plane;
use crate::error::{Error, Result};

/// Rec. 601 luma weights.
pub const LUMA: [f64; 3] = [0.299, 0.587, 0.114];

/// One decoded video frame: luminance plus optional chroma.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    luminance: Plane,
    chroma: Option<[Plane; 2]>,
}

impl Frame {
    /// Grayscale frame. Values are clamped into `[0, 1]`.
    pub fn from_luminance(luminance: Plane) -> Self {
        Self {
            luminance: luminance.map(|v| v.clamp(0.0, 1.0)),
            chroma: None,
        }
    }

    pub fn with_chroma(luminance: Plane, cb: Plane, cr: Plane) -> Result<Self> {
        let dims = (luminance.width, luminance.height);
        for c in [&cb, &cr] {
            if (c.width, c.height) != dims {
                return Err(Error::DimensionMismatch(dims.0, dims.1, c.width, c.height));
            }
        }
        Ok(Self {
            luminance: luminance.map(|v| v.clamp(0.0, 1.0)),
            chroma: Some([cb, cr]),
        })
    }

    /// Converts interleaved RGB in `[0, 1]` to luma and offset chroma.
    pub fn from_rgb(width: usize, height: usize, rgb: &[f64]) -> Result<Self> {
        if rgb.len() != width * height * 3 {
            return Err(Error::BadLength {
                width,
                height,
                expected: width * height * 3,
                got: rgb.len(),
            });
        }
        let n = width * height;
        let (mut y, mut cb, mut cr) = (
            Vec::with_capacity(n),
            Vec::with_capacity(n),
            Vec::with_capacity(n),
        );
        for px in rgb.chunks_exact(3) {
            let luma = LUMA[0] * px[0] + LUMA[1] * px[1] + LUMA[2] * px[2];
            y.push(luma);
            cb.push(0.5 + 0.564 * (px[2] - luma));
            cr.push(0.5 + 0.713 * (px[0] - luma));
        }
        Self::with_chroma(
            Plane::new(width, height, y),
            Plane::new(width, height, cb),
            Plane::new(width, height, cr),
        )
    }

    /// Decodes an image file. Grayscale images yield luminance-only frames.
    pub fn load(path: &Path) -> Result<Self> {
        let img = image::open(path).map_err(|e| Error::FrameDecode {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
        Ok(Self::from_image(&img))
    }

    pub fn from_image(img: &DynamicImage) -> Self {
        let (w, h) = (img.width() as usize, img.height() as usize);
        if img.color().has_color() {
            let rgb = img.to_rgb32f();
            let data: Vec<f64> = rgb.as_raw().iter().map(|&v| v as f64).collect();
            Self::from_rgb(w, h, &data).expect("decoded buffer matches its dimensions")
        } else {
            let l = img.to_luma32f();
            let data = l.as_raw().iter().map(|&v| v as f64).collect();
            Self::from_luminance(Plane::new(w, h, data))
        }
    }

    pub fn width(&self) -> usize {
        self.luminance.width
    }

    pub fn height(&self) -> usize {
        self.luminance.height
    }

    pub fn luminance(&self) -> &Plane {
        &self.luminance
    }

    pub fn chroma(&self) -> Option<&[Plane; 2]> {
        self.chroma.as_ref()
    }

    /// Luminance followed by chroma planes when present.
    pub fn channels(&self) -> Vec<&Plane> {
        let mut out = vec![&self.luminance];
        if let Some([cb, cr]) = &self.chroma {
            out.push(cb);
            out.push(cr);
        }
        out
    }
}
