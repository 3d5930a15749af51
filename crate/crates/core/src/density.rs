//! Ground-truth fixation density maps.
//!
//! Each fixation at or after the frame time contributes a spatial Gaussian
//! weighted by a temporal Gaussian of its time offset.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::{NormState, SaliencyMap};

/// Default temporal spread in seconds.
pub const DEFAULT_SIGMA_T: f64 = 0.1;
/// Default fraction of the larger frame side used as the spatial spread.
pub const DEFAULT_SIGMA_D_FRAC: f64 = 0.03;
pub const DEFAULT_EPSILON_CUTOFF: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixationRecord {
    pub subject_id: String,
    /// Seconds from the start of the video.
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

impl FixationRecord {
    pub fn new(subject_id: impl Into<String>, t: f64, x: f64, y: f64) -> Self {
        Self {
            subject_id: subject_id.into(),
            t,
            x,
            y,
        }
    }

    /// Integer pixel containing the fixation, if inside a `width x height` frame.
    pub fn pixel(&self, width: usize, height: usize) -> Option<Pixel> {
        let (x, y) = (self.x.floor(), self.y.floor());
        (x >= 0.0 && y >= 0.0 && (x as usize) < width && (y as usize) < height)
            .then(|| Pixel::new(x as usize, y as usize))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pixel {
    pub x: usize,
    pub y: usize,
}

impl Pixel {
    pub fn new(x: usize, y: usize) -> Self {
        Self { x, y }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityParams {
    sigma_d: f64,
    sigma_t: f64,
    epsilon_cutoff: f64,
}

impl DensityParams {
    pub fn new(sigma_d: f64, sigma_t: f64, epsilon_cutoff: f64) -> Result<Self> {
        if !(sigma_d > 0.0 && sigma_d.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "sigma_d must be positive, got {sigma_d}"
            )));
        }
        if !(sigma_t > 0.0 && sigma_t.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "sigma_t must be positive, got {sigma_t}"
            )));
        }
        if !(0.0..1.0).contains(&epsilon_cutoff) {
            return Err(Error::InvalidArgument(format!(
                "epsilon_cutoff must lie in [0, 1), got {epsilon_cutoff}"
            )));
        }
        Ok(Self {
            sigma_d,
            sigma_t,
            epsilon_cutoff,
        })
    }

    /// Defaults for a frame size: 3% of the larger side, 0.1 s, 1e-4 cutoff.
    pub fn for_frame(width: usize, height: usize) -> Self {
        Self {
            sigma_d: default_sigma_spatial(width, height),
            sigma_t: DEFAULT_SIGMA_T,
            epsilon_cutoff: DEFAULT_EPSILON_CUTOFF,
        }
    }

    pub fn sigma_d(&self) -> f64 {
        self.sigma_d
    }

    pub fn sigma_t(&self) -> f64 {
        self.sigma_t
    }

    pub fn epsilon_cutoff(&self) -> f64 {
        self.epsilon_cutoff
    }
}

pub fn default_sigma_spatial(width: usize, height: usize) -> f64 {
    DEFAULT_SIGMA_D_FRAC * width.max(height) as f64
}

/// Density map for time `t`. Only fixations with `t_f >= t` count.
///
/// Fixations whose temporal weight falls below the cutoff are skipped.
pub fn density_map(
    fixations: &[FixationRecord],
    t: f64,
    width: usize,
    height: usize,
    params: &DensityParams,
) -> SaliencyMap {
    let mut values = vec![0.0; width * height];
    let two_sd2 = 2.0 * params.sigma_d * params.sigma_d;
    let two_st2 = 2.0 * params.sigma_t * params.sigma_t;
    let mut gx = vec![0.0; width];
    let mut gy = vec![0.0; height];
    for f in fixations {
        if f.t < t {
            continue;
        }
        let temporal = (-(f.t - t).powi(2) / two_st2).exp();
        if temporal < params.epsilon_cutoff {
            continue;
        }
        for (x, g) in gx.iter_mut().enumerate() {
            *g = (-(f.x - x as f64).powi(2) / two_sd2).exp();
        }
        for (y, g) in gy.iter_mut().enumerate() {
            *g = (-(f.y - y as f64).powi(2) / two_sd2).exp() * temporal;
        }
        for (row, &wy) in values.chunks_exact_mut(width).zip(&gy) {
            for (v, &wx) in row.iter_mut().zip(&gx) {
                *v += wx * wy;
            }
        }
    }
    SaliencyMap::from_parts(width, height, values, NormState::Raw)
}

/// Presentation time of frame `k`.
pub fn frame_time(k: usize, fps: f64) -> f64 {
    k as f64 / fps
}

/// Index of the frame on screen at time `t`.
pub fn frame_index(t: f64, fps: f64) -> usize {
    (t * fps).floor().max(0.0) as usize
}

/// Fixated pixels for each of `frames` frames, by display interval.
pub fn fixations_per_frame(
    fixations: &[FixationRecord],
    frames: usize,
    fps: f64,
    width: usize,
    height: usize,
) -> Vec<Vec<Pixel>> {
    let mut out = vec![Vec::new(); frames];
    for f in fixations {
        if f.t < 0.0 {
            continue;
        }
        let k = frame_index(f.t, fps);
        if k < frames {
            if let Some(p) = f.pixel(width, height) {
                out[k].push(p);
            }
        }
    }
    out
}

/// One density map per frame, computed in parallel.
pub fn density_maps(
    fixations: &[FixationRecord],
    frames: usize,
    fps: f64,
    width: usize,
    height: usize,
    params: &DensityParams,
) -> Vec<SaliencyMap> {
    (0..frames)
        .into_par_iter()
        .map(|k| density_map(fixations, frame_time(k, fps), width, height, params))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(sigma_d: f64) -> DensityParams {
        DensityParams::new(sigma_d, 0.1, 1e-4).unwrap()
    }

    #[test]
    fn sigma_defaults() {
        assert!((default_sigma_spatial(1280, 720) - 38.4).abs() < 1e-12);
        assert!((default_sigma_spatial(720, 1280) - 38.4).abs() < 1e-12);
        assert!((default_sigma_spatial(100, 100) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn peak_and_one_sigma() {
        let f = [FixationRecord::new("s", 1.0, 10.0, 10.0)];
        let m = density_map(&f, 1.0, 32, 32, &params(4.0));
        assert_eq!(m.get(10, 10), 1.0);
        assert!((m.get(14, 10) - (-0.5f64).exp()).abs() < 1e-12);
        assert_eq!(m.norm_state(), NormState::Raw);
    }

    #[test]
    fn past_fixations_ignored() {
        let f = [FixationRecord::new("s", 0.95, 10.0, 10.0)];
        assert!(density_map(&f, 1.0, 32, 32, &params(4.0)).is_all_zero());
    }

    #[test]
    fn coincident_fixations_add() {
        let f = [
            FixationRecord::new("a", 0.5, 10.0, 10.0),
            FixationRecord::new("b", 0.5, 10.0, 10.0),
        ];
        assert_eq!(density_map(&f, 0.5, 32, 32, &params(4.0)).get(10, 10), 2.0);
    }

    #[test]
    fn empty_list_gives_zero_map() {
        let m = density_map(&[], 0.0, 5, 4, &params(1.0));
        assert!(m.is_all_zero());
        assert_eq!(m.dims(), (5, 4));
    }

    #[test]
    fn far_future_fixation_is_cut_off() {
        // exp(-(0.5)^2 / 0.02) ~ 3.7e-6 < 1e-4
        let f = [FixationRecord::new("s", 1.5, 3.0, 3.0)];
        assert!(density_map(&f, 1.0, 8, 8, &params(2.0)).is_all_zero());
    }

    #[test]
    fn param_validation() {
        assert!(DensityParams::new(0.0, 0.1, 0.0).is_err());
        assert!(DensityParams::new(1.0, -0.1, 0.0).is_err());
        assert!(DensityParams::new(1.0, 0.1, 1.0).is_err());
    }

    #[test]
    fn frame_assignment() {
        let f = [
            FixationRecord::new("a", 0.0, 1.2, 2.9),
            FixationRecord::new("a", 0.099, 3.0, 3.0),
            FixationRecord::new("a", 0.1, 4.0, 4.0),
            FixationRecord::new("a", 0.25, 40.0, 4.0),
        ];
        let per = fixations_per_frame(&f, 3, 10.0, 8, 8);
        assert_eq!(per[0], vec![Pixel::new(1, 2), Pixel::new(3, 3)]);
        assert_eq!(per[1], vec![Pixel::new(4, 4)]);
        assert!(per[2].is_empty());
    }

    fn fixation() -> impl Strategy<Value = FixationRecord> {
        (0.0f64..0.3, 0.0f64..24.0, 0.0f64..16.0)
            .prop_map(|(t, x, y)| FixationRecord::new("p", t, x, y))
    }

    proptest! {
        #[test]
        fn additive(a in prop::collection::vec(fixation(), 0..6), b in prop::collection::vec(fixation(), 0..6)) {
            let p = params(2.5);
            let ma = density_map(&a, 0.05, 24, 16, &p);
            let mb = density_map(&b, 0.05, 24, 16, &p);
            let all: Vec<_> = a.iter().chain(&b).cloned().collect();
            let mab = density_map(&all, 0.05, 24, 16, &p);
            for i in 0..mab.len() {
                prop_assert!((mab.values()[i] - ma.values()[i] - mb.values()[i]).abs() < 1e-9);
                prop_assert!(mab.values()[i] >= 0.0);
            }
        }

        #[test]
        fn radially_non_increasing(x in 2.0f64..22.0, y in 2.0f64..14.0) {
            let f = [FixationRecord::new("p", 0.0, x, y)];
            let m = density_map(&f, 0.0, 24, 16, &params(3.0));
            let mut pts: Vec<(f64, f64)> = (0..16).flat_map(|py| (0..24).map(move |px| (px, py)))
                .map(|(px, py)| ((px as f64 - x).hypot(py as f64 - y), m.get(px, py)))
                .collect();
            pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            for w in pts.windows(2) {
                if w[1].0 > w[0].0 + 1e-12 {
                    prop_assert!(w[1].1 <= w[0].1 + 1e-15);
                }
            }
        }

        #[test]
        fn temporal_factor_uniform(dt1 in 0.0f64..0.2, extra in 0.01f64..0.1) {
            let p = DensityParams::new(3.0, 0.1, 0.0).unwrap();
            let near = density_map(&[FixationRecord::new("p", 1.0 + dt1, 7.0, 5.0)], 1.0, 16, 12, &p);
            let far = density_map(&[FixationRecord::new("p", 1.0 + dt1 + extra, 7.0, 5.0)], 1.0, 16, 12, &p);
            let ratio = far.get(7, 5) / near.get(7, 5);
            prop_assert!(ratio < 1.0);
            for i in 0..near.len() {
                if near.values()[i] > 1e-200 {
                    prop_assert!(far.values()[i] < near.values()[i]);
                    prop_assert!((far.values()[i] / near.values()[i] - ratio).abs() < 1e-9);
                }
            }
        }
    }
}
