//! Single-channel real-valued images and the filters predictors share.

use crate::map::{sample_positions, NormState, SaliencyMap};

/// A row-major grid of reals. Unlike [`SaliencyMap`] values may be negative.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f64>,
}

impl Plane {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), width * height, "plane data length");
        Self {
            width,
            height,
            data,
        }
    }

    pub fn filled(width: usize, height: usize, v: f64) -> Self {
        Self::new(width, height, vec![v; width * height])
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Plane {
        Plane::new(
            self.width,
            self.height,
            self.data.iter().map(|&v| f(v)).collect(),
        )
    }

    pub fn zip_map(&self, other: &Plane, f: impl Fn(f64, f64) -> f64) -> Plane {
        assert_eq!((self.width, self.height), (other.width, other.height));
        Plane::new(
            self.width,
            self.height,
            self.data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    /// Converts to a saliency map, clamping negatives (round-off) to zero.
    pub fn into_map(self) -> SaliencyMap {
        let values = self.data.into_iter().map(|v| v.max(0.0)).collect();
        SaliencyMap::from_parts(self.width, self.height, values, NormState::Raw)
    }
}

/// Normalized 1-D Gaussian taps with radius `ceil(3 sigma)`.
pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    assert!(sigma > 0.0);
    let radius = (3.0 * sigma).ceil() as isize;
    let taps: Vec<f64> = (-radius..=radius)
        .map(|i| (-((i * i) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let total: f64 = taps.iter().sum();
    taps.into_iter().map(|t| t / total).collect()
}

/// Separable Gaussian blur with replicated borders.
pub fn gaussian_blur(p: &Plane, sigma: f64) -> Plane {
    let kernel = gaussian_kernel(sigma);
    let r = (kernel.len() / 2) as isize;
    let (w, h) = (p.width, p.height);
    let clamp = |i: isize, n: usize| i.clamp(0, n as isize - 1) as usize;

    let mut tmp = vec![0.0; w * h];
    for y in 0..h {
        let row = &p.data[y * w..(y + 1) * w];
        for x in 0..w {
            let mut acc = 0.0;
            for (k, &wk) in kernel.iter().enumerate() {
                acc += wk * row[clamp(x as isize + k as isize - r, w)];
            }
            tmp[y * w + x] = acc;
        }
    }
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (k, &wk) in kernel.iter().enumerate() {
                acc += wk * tmp[clamp(y as isize + k as isize - r, h) * w + x];
            }
            out[y * w + x] = acc;
        }
    }
    Plane::new(w, h, out)
}

/// Bilinear resampling, same convention as [`crate::map::resize`].
pub fn resample(p: &Plane, width: usize, height: usize) -> Plane {
    if (p.width, p.height) == (width, height) {
        return p.clone();
    }
    let xs = sample_positions(p.width, width);
    let ys = sample_positions(p.height, height);
    let mut data = Vec::with_capacity(width * height);
    for &(y0, y1, fy) in &ys {
        for &(x0, x1, fx) in &xs {
            let top = p.get(x0, y0) + (p.get(x1, y0) - p.get(x0, y0)) * fx;
            let bottom = p.get(x0, y1) + (p.get(x1, y1) - p.get(x0, y1)) * fx;
            data.push(top + (bottom - top) * fy);
        }
    }
    Plane::new(width, height, data)
}

/// Area-averaging downscale so the longer side is at most `longer`.
///
/// Planes already within the limit are returned unchanged.
pub fn downscale_to(p: &Plane, longer: usize) -> Plane {
    let side = p.width.max(p.height);
    if side <= longer {
        return p.clone();
    }
    let scale = longer as f64 / side as f64;
    let w = ((p.width as f64 * scale).round() as usize).max(1);
    let h = ((p.height as f64 * scale).round() as usize).max(1);
    box_resample(p, w, h)
}

fn box_resample(p: &Plane, width: usize, height: usize) -> Plane {
    let sx = p.width as f64 / width as f64;
    let sy = p.height as f64 / height as f64;
    let spans = |i: usize, s: f64, n: usize| {
        let lo = i as f64 * s;
        let hi = ((i + 1) as f64 * s).min(n as f64);
        let mut taps = Vec::new();
        let mut j = lo.floor() as usize;
        while (j as f64) < hi && j < n {
            let overlap = (hi.min((j + 1) as f64) - lo.max(j as f64)).max(0.0);
            if overlap > 0.0 {
                taps.push((j, overlap));
            }
            j += 1;
        }
        taps
    };
    let xs: Vec<_> = (0..width).map(|i| spans(i, sx, p.width)).collect();
    let ys: Vec<_> = (0..height).map(|i| spans(i, sy, p.height)).collect();
    let mut data = Vec::with_capacity(width * height);
    for ty in &ys {
        for tx in &xs {
            let mut acc = 0.0;
            let mut wsum = 0.0;
            for &(y, wy) in ty {
                for &(x, wx) in tx {
                    acc += p.get(x, y) * wx * wy;
                    wsum += wx * wy;
                }
            }
            data.push(acc / wsum);
        }
    }
    Plane::new(width, height, data)
}
