//! Contrast-based spatial predictors.

use super::frame::Frame;
use super::plane::{downscale_to, gaussian_blur, resample, Plane};
use super::{check_min_size, params};
use crate::error::Result;
use crate::map::SaliencyMap;

/// Multiscale center-surround differences summed over every channel.
pub fn center_surround(frame: &Frame) -> Result<SaliencyMap> {
    check_min_size(frame)?;
    let mut acc: Option<Plane> = None;
    for channel in frame.channels() {
        let work = downscale_to(channel, params::CENTER_SURROUND_WORKING_SIDE);
        for &(center, surround) in params::CENTER_SURROUND_SCALES {
            let c = gaussian_blur(&work, center);
            let s = gaussian_blur(&work, surround);
            let diff = c.zip_map(&s, |a, b| (a - b).abs());
            acc = Some(match acc {
                None => diff,
                Some(total) => total.zip_map(&diff, |a, b| a + b),
            });
        }
    }
    let acc = acc.expect("a frame always has a luminance channel");
    Ok(resample(&acc, frame.width(), frame.height()).into_map())
}

/// Smoothed absolute deviation of each pixel's luminance from the frame mean.
pub fn global_contrast(frame: &Frame) -> SaliencyMap {
    let raw = global_contrast_raw(frame);
    gaussian_blur(&raw, params::CONTRAST_SIGMA).into_map()
}

pub(crate) fn global_contrast_raw(frame: &Frame) -> Plane {
    let lum = frame.luminance();
    let mean = lum.mean();
    lum.map(|v| (v - mean).abs())
}

/// Distance between lightly blurred channels and their heavily blurred means.
///
/// The heavy blur runs at a reduced working scale and is upsampled; it is
/// smooth enough for bilinear interpolation to be exact to a few ulps.
pub fn frequency_tuned(frame: &Frame) -> SaliencyMap {
    let (w, h) = (frame.width(), frame.height());
    let mut dist2 = Plane::filled(w, h, 0.0);
    for channel in frame.channels() {
        let work = downscale_to(channel, params::FREQUENCY_WORKING_SIDE);
        let heavy_sigma =
            (work.width.max(work.height) as f64 * params::FREQUENCY_HEAVY_FRACTION).max(1.0);
        let heavy = resample(&gaussian_blur(&work, heavy_sigma), w, h);
        let light = gaussian_blur(channel, params::FREQUENCY_LIGHT_SIGMA);
        dist2 = dist2.zip_map(&light.zip_map(&heavy, |a, b| a - b), |acc, d| acc + d * d);
    }
    dist2.map(f64::sqrt).into_map()
}
