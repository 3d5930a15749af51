//! The saliency map type shared by every stage.
//!
//! A [`SaliencyMap`] is an immutable row-major grid of non-negative `f64`
//! values tagged with the normalization it is known to satisfy. All
//! operations return new maps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Normalization a map is known to satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormState {
    Raw,
    /// Values sum to one.
    SumOne,
    /// Minimum is zero and maximum is one, or all zeros for a constant input.
    MinMax,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaliencyMap {
    width: usize,
    height: usize,
    values: Vec<f64>,
    norm: NormState,
}

impl SaliencyMap {
    /// Builds a raw map, rejecting negative or non-finite values.
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidArgument(format!(
                "map dimensions must be positive, got {width}x{height}"
            )));
        }
        if values.len() != width * height {
            return Err(Error::BadLength {
                width,
                height,
                expected: width * height,
                got: values.len(),
            });
        }
        if let Some((i, &v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::InvalidValue(v, i));
        }
        Ok(Self {
            width,
            height,
            values,
            norm: NormState::Raw,
        })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        assert!(width > 0 && height > 0, "map dimensions must be positive");
        Self {
            width,
            height,
            values: vec![0.0; width * height],
            norm: NormState::Raw,
        }
    }

    /// Builds a map by evaluating `f(x, y)` at every pixel.
    ///
    /// Negative outputs are clamped to zero.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(width, height);
        for y in 0..height {
            for x in 0..width {
                let v = f(x, y);
                debug_assert!(v.is_finite());
                m.values[y * width + x] = v.max(0.0);
            }
        }
        m
    }

    /// Internal constructor for values already known to be valid.
    pub(crate) fn from_parts(
        width: usize,
        height: usize,
        values: Vec<f64>,
        norm: NormState,
    ) -> Self {
        debug_assert_eq!(values.len(), width * height);
        debug_assert!(values.iter().all(|v| v.is_finite() && *v >= 0.0));
        Self {
            width,
            height,
            values,
            norm,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn norm_state(&self) -> NormState {
        self.norm
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn is_all_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub(crate) fn check_same_dims(&self, other: &SaliencyMap) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch(
                self.width,
                self.height,
                other.width,
                other.height,
            ));
        }
        Ok(())
    }

    /// Rounds every value through `f32`, the precision used by float map files.
    pub fn quantize_f32(&self) -> SaliencyMap {
        let values = self.values.iter().map(|&v| v as f32 as f64).collect();
        SaliencyMap::from_parts(self.width, self.height, values, NormState::Raw)
    }
}

/// Scales `m` so its values sum to one.
pub fn normalize_sum(m: &SaliencyMap) -> Result<SaliencyMap> {
    let total = m.sum();
    if total.is_nan() || total <= 0.0 {
        return Err(Error::AllZeroMap);
    }
    let values = m.values.iter().map(|v| v / total).collect();
    Ok(SaliencyMap::from_parts(
        m.width,
        m.height,
        values,
        NormState::SumOne,
    ))
}

/// Affinely rescales `m` onto `[0, 1]`. Constant maps become all zeros.
pub fn normalize_minmax(m: &SaliencyMap) -> SaliencyMap {
    let lo = m.min();
    let hi = m.max();
    let range = hi - lo;
    let values = if range > 0.0 {
        m.values
            .iter()
            .map(|v| ((v - lo) / range).clamp(0.0, 1.0))
            .collect()
    } else {
        vec![0.0; m.len()]
    };
    SaliencyMap::from_parts(m.width, m.height, values, NormState::MinMax)
}

/// Bilinear resampling with pixel-center alignment and edge clamping.
///
/// Resizing to the current dimensions returns the values unchanged.
pub fn resize(m: &SaliencyMap, width: usize, height: usize) -> Result<SaliencyMap> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidArgument(format!(
            "resize target must be at least 1x1, got {width}x{height}"
        )));
    }
    if m.dims() == (width, height) {
        return Ok(SaliencyMap::from_parts(
            width,
            height,
            m.values.clone(),
            NormState::Raw,
        ));
    }
    let xs = sample_positions(m.width, width);
    let ys = sample_positions(m.height, height);
    let mut values = Vec::with_capacity(width * height);
    for &(y0, y1, fy) in &ys {
        let row0 = &m.values[y0 * m.width..(y0 + 1) * m.width];
        let row1 = &m.values[y1 * m.width..(y1 + 1) * m.width];
        for &(x0, x1, fx) in &xs {
            let top = row0[x0] + (row0[x1] - row0[x0]) * fx;
            let bottom = row1[x0] + (row1[x1] - row1[x0]) * fx;
            values.push((top + (bottom - top) * fy).max(0.0));
        }
    }
    Ok(SaliencyMap::from_parts(
        width,
        height,
        values,
        NormState::Raw,
    ))
}

/// For each destination index: the two source taps and the blend fraction.
pub(crate) fn sample_positions(src: usize, dst: usize) -> Vec<(usize, usize, f64)> {
    let scale = src as f64 / dst as f64;
    (0..dst)
        .map(|i| {
            let pos = ((i as f64 + 0.5) * scale - 0.5).clamp(0.0, (src - 1) as f64);
            let i0 = pos.floor() as usize;
            let i1 = (i0 + 1).min(src - 1);
            (i0, i1, pos - i0 as f64)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(w: usize, h: usize, v: &[f64]) -> SaliencyMap {
        SaliencyMap::new(w, h, v.to_vec()).unwrap()
    }

    #[test]
    fn normalize_sum_uniform() {
        let m = normalize_sum(&map(2, 2, &[2.0; 4])).unwrap();
        assert_eq!(m.values(), &[0.25; 4]);
        assert_eq!(m.norm_state(), NormState::SumOne);
    }

    #[test]
    fn normalize_sum_proportional() {
        let m = normalize_sum(&map(2, 1, &[3.0, 1.0])).unwrap();
        assert_eq!(m.values(), &[0.75, 0.25]);
    }

    #[test]
    fn normalize_sum_rejects_zero_map() {
        assert!(matches!(
            normalize_sum(&SaliencyMap::zeros(3, 3)),
            Err(Error::AllZeroMap)
        ));
    }

    #[test]
    fn minmax_examples() {
        assert_eq!(
            normalize_minmax(&map(2, 1, &[1.0, 3.0])).values(),
            &[0.0, 1.0]
        );
        assert_eq!(
            normalize_minmax(&map(2, 1, &[5.0, 5.0])).values(),
            &[0.0, 0.0]
        );
        assert_eq!(
            normalize_minmax(&map(3, 1, &[0.0, 0.5, 1.0])).values(),
            &[0.0, 0.5, 1.0]
        );
    }

    #[test]
    fn constructor_rejects_bad_input() {
        assert!(matches!(
            SaliencyMap::new(2, 1, vec![1.0, -0.5]),
            Err(Error::InvalidValue(_, 1))
        ));
        assert!(matches!(
            SaliencyMap::new(2, 2, vec![1.0]),
            Err(Error::BadLength { .. })
        ));
        assert!(SaliencyMap::new(1, 1, vec![f64::NAN]).is_err());
    }

    #[test]
    fn resize_constant_and_identity() {
        let c = resize(&map(2, 2, &[0.7; 4]), 4, 4).unwrap();
        assert!(c.values().iter().all(|v| (v - 0.7).abs() < 1e-15));
        let src = map(3, 2, &[0.1, 0.9, 0.3, 0.0, 2.0, 1.5]);
        let same = resize(&src, 3, 2).unwrap();
        for (a, b) in src.values().iter().zip(same.values()) {
            assert!((a - b).abs() <= 1e-12);
        }
        assert_eq!(same.norm_state(), NormState::Raw);
    }

    #[test]
    fn resize_rejects_zero_target() {
        assert!(resize(&map(1, 1, &[1.0]), 0, 3).is_err());
    }
}
