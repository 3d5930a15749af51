//! Bank of deterministic classical saliency predictors.
//!
//! Four spatial predictors from distinct algorithm families, plus a
//! frame-difference predictor that supplies the temporal map.

mod contrast;
mod frame;
pub mod plane;
mod spectral;
mod temporal;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use contrast::{center_surround, frequency_tuned, global_contrast};
pub use frame::{Frame, LUMA};
pub use spectral::spectral_residual;
pub use temporal::temporal_diff;

use crate::error::{Error, Result};
use crate::map::SaliencyMap;

/// Fixed smoothing and working-scale constants.
pub mod params {
    /// Bumped whenever any constant below changes.
    pub const VERSION: &str = "1";

    pub const SPECTRAL_WORKING_SIDE: usize = 64;
    pub const SPECTRAL_SIGMA: f64 = 3.0;
    pub const SPECTRAL_LOG_OFFSET: f64 = 1e-9;
    pub const SPECTRAL_AMPLITUDE_FLOOR: f64 = 1e-9;

    pub const CENTER_SURROUND_WORKING_SIDE: usize = 128;
    /// (center sigma, surround sigma) pairs in working-scale pixels.
    pub const CENTER_SURROUND_SCALES: &[(f64, f64)] = &[(1.0, 4.0), (2.0, 8.0), (4.0, 16.0)];

    pub const CONTRAST_SIGMA: f64 = 2.0;

    pub const FREQUENCY_WORKING_SIDE: usize = 128;
    pub const FREQUENCY_LIGHT_SIGMA: f64 = 1.0;
    /// Heavy blur sigma as a fraction of the working longer side.
    pub const FREQUENCY_HEAVY_FRACTION: f64 = 0.25;

    pub const TEMPORAL_SIGMA: f64 = 2.0;

    pub const MIN_FRAME_SIDE: usize = 8;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PredictorId {
    SpectralResidual,
    CenterSurround,
    GlobalContrast,
    FrequencyTuned,
    TemporalDiff,
}

impl PredictorId {
    pub const ALL: [PredictorId; 5] = [
        PredictorId::SpectralResidual,
        PredictorId::CenterSurround,
        PredictorId::GlobalContrast,
        PredictorId::FrequencyTuned,
        PredictorId::TemporalDiff,
    ];

    pub const SPATIAL: [PredictorId; 4] = [
        PredictorId::SpectralResidual,
        PredictorId::CenterSurround,
        PredictorId::GlobalContrast,
        PredictorId::FrequencyTuned,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PredictorId::SpectralResidual => "spectral_residual",
            PredictorId::CenterSurround => "center_surround",
            PredictorId::GlobalContrast => "global_contrast",
            PredictorId::FrequencyTuned => "frequency_tuned",
            PredictorId::TemporalDiff => "temporal_diff",
        }
    }

    pub fn is_temporal(self) -> bool {
        self == PredictorId::TemporalDiff
    }

    /// Runs this predictor on frame `k` of `frames`.
    pub fn run(self, frames: &[Frame], k: usize) -> Result<SaliencyMap> {
        let f = &frames[k];
        match self {
            PredictorId::SpectralResidual => spectral_residual(f),
            PredictorId::CenterSurround => center_surround(f),
            PredictorId::GlobalContrast => Ok(global_contrast(f)),
            PredictorId::FrequencyTuned => Ok(frequency_tuned(f)),
            PredictorId::TemporalDiff => match k {
                0 => Ok(SaliencyMap::zeros(f.width(), f.height())),
                _ => temporal_diff(f, &frames[k - 1]),
            },
        }
    }
}

impl fmt::Display for PredictorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PredictorId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PredictorId::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::UnknownPredictor(s.to_string()))
    }
}

pub(crate) fn check_min_size(frame: &Frame) -> Result<()> {
    if frame.width() < params::MIN_FRAME_SIDE || frame.height() < params::MIN_FRAME_SIDE {
        return Err(Error::FrameTooSmall(frame.width(), frame.height()));
    }
    Ok(())
}

/// Maps produced by [`run_bank`], indexed by frame then predictor.
#[derive(Debug, Clone)]
pub struct BankOutput {
    pub predictors: Vec<PredictorId>,
    pub maps: Vec<Vec<SaliencyMap>>,
}

impl BankOutput {
    pub fn frame_count(&self) -> usize {
        self.maps.len()
    }

    pub fn get(&self, frame: usize, predictor: usize) -> &SaliencyMap {
        &self.maps[frame][predictor]
    }

    /// All frames' maps for one predictor.
    pub fn series(&self, id: PredictorId) -> Option<Vec<&SaliencyMap>> {
        let i = self.predictors.iter().position(|&p| p == id)?;
        Some(self.maps.iter().map(|row| &row[i]).collect())
    }

    pub fn map_count(&self) -> usize {
        self.maps.iter().map(Vec::len).sum()
    }
}

/// Runs every requested predictor on every frame, in parallel over frames.
///
/// The first frame's temporal map is all zeros.
pub fn run_bank(frames: &[Frame], which: &[PredictorId]) -> Result<BankOutput> {
    if which.is_empty() {
        return Err(Error::EmptyPredictorList);
    }
    let first = frames.first().ok_or(Error::EmptySequence)?;
    for f in frames {
        if (f.width(), f.height()) != (first.width(), first.height()) {
            return Err(Error::DimensionMismatch(
                first.width(),
                first.height(),
                f.width(),
                f.height(),
            ));
        }
    }
    let maps = (0..frames.len())
        .into_par_iter()
        .map(|k| {
            which
                .iter()
                .map(|p| p.run(frames, k))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BankOutput {
        predictors: which.to_vec(),
        maps,
    })
}
