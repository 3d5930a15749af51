use super::frame::Frame;
use super::params;
use super::plane::gaussian_blur;
use crate::error::{Error, Result};
use crate::map::SaliencyMap;

/// Smoothed absolute luminance difference between consecutive frames.
pub fn temporal_diff(curr: &Frame, prev: &Frame) -> Result<SaliencyMap> {
    if (curr.width(), curr.height()) != (prev.width(), prev.height()) {
        return Err(Error::DimensionMismatch(
            curr.width(),
            curr.height(),
            prev.width(),
            prev.height(),
        ));
    }
    let diff = curr
        .luminance()
        .zip_map(prev.luminance(), |a, b| (a - b).abs());
    Ok(gaussian_blur(&diff, params::TEMPORAL_SIGMA).into_map())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predictors::plane::Plane;

    fn blob_at(cx: f64, cy: f64) -> Frame {
        Frame::from_luminance(Plane::from_fn(64, 64, |x, y| {
            let d2 = (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2);
            if d2 <= 16.0 {
                0.9
            } else {
                0.2
            }
        }))
    }

    #[test]
    fn identical_frames_are_silent() {
        let f = blob_at(20.0, 30.0);
        assert!(temporal_diff(&f, &f).unwrap().is_all_zero());
    }

    #[test]
    fn moved_blob_mass_is_local() {
        let (old, new) = ((30.0, 30.0), (34.0, 30.0));
        let m = temporal_diff(&blob_at(new.0, new.1), &blob_at(old.0, old.1)).unwrap();
        let total = m.sum();
        assert!(total > 0.0);
        let mut near = 0.0;
        for y in 0..64 {
            for x in 0..64 {
                // within 8 px of either blob (radius 4)
                let dist = |c: (f64, f64)| {
                    (((x as f64 - c.0).powi(2) + (y as f64 - c.1).powi(2)).sqrt() - 4.0).max(0.0)
                };
                if dist(old).min(dist(new)) <= 8.0 {
                    near += m.get(x, y);
                }
            }
        }
        assert!(near / total >= 0.9, "fraction {}", near / total);
    }

    #[test]
    fn size_mismatch() {
        let a = Frame::from_luminance(Plane::filled(8, 8, 0.0));
        let b = Frame::from_luminance(Plane::filled(9, 8, 0.0));
        assert!(matches!(
            temporal_diff(&a, &b),
            Err(Error::DimensionMismatch(..))
        ));
    }
}
