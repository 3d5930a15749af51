use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::density::{
    DensityParams, DEFAULT_EPSILON_CUTOFF, DEFAULT_SIGMA_D_FRAC, DEFAULT_SIGMA_T,
};
use crate::error::{Error, Result};
use crate::fusion::{FusionParams, DEFAULT_OMEGA};
use crate::io::ReportFormat;
use crate::predictors::PredictorId;
use crate::selection::{SelectionParams, Solver, DEFAULT_EPSILON, DEFAULT_LAMBDA_D};

pub const DEFAULT_WORKING_RESOLUTION: (usize, usize) = (320, 320);

/// Every parameter of a pipeline run. Recorded verbatim in the run manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub sigma_d_frac: f64,
    pub sigma_t: f64,
    pub density_cutoff: f64,
    pub lambda_d: f64,
    pub omega: f64,
    pub epsilon: f64,
    /// Resolution at which predictor similarities are computed.
    pub working_resolution: (usize, usize),
    /// Spatial candidates for selection. The temporal predictor always runs.
    pub predictors: Vec<PredictorId>,
    pub solver: Solver,
    pub out_dir: PathBuf,
    pub report_format: ReportFormat,
    /// Also write 8-bit previews of the fused maps.
    pub previews: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            sigma_d_frac: DEFAULT_SIGMA_D_FRAC,
            sigma_t: DEFAULT_SIGMA_T,
            density_cutoff: DEFAULT_EPSILON_CUTOFF,
            lambda_d: DEFAULT_LAMBDA_D,
            omega: DEFAULT_OMEGA,
            epsilon: DEFAULT_EPSILON,
            working_resolution: DEFAULT_WORKING_RESOLUTION,
            predictors: PredictorId::SPATIAL.to_vec(),
            solver: Solver::Exhaustive,
            out_dir: PathBuf::from("out"),
            report_format: ReportFormat::Json,
            previews: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("sigma_d_frac", self.sigma_d_frac),
            ("sigma_t", self.sigma_t),
            ("omega", self.omega),
            ("epsilon", self.epsilon),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if !(self.lambda_d >= 0.0 && self.lambda_d.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "lambda_d must be >= 0, got {}",
                self.lambda_d
            )));
        }
        if self.working_resolution.0 == 0 || self.working_resolution.1 == 0 {
            return Err(Error::InvalidArgument(
                "working resolution must be positive".into(),
            ));
        }
        if self.predictors.iter().all(|p| p.is_temporal()) {
            return Err(Error::EmptyPredictorList);
        }
        Ok(())
    }

    /// Spatial candidates in configured order, duplicates and the temporal
    /// predictor removed.
    pub fn spatial_predictors(&self) -> Vec<PredictorId> {
        let mut out = Vec::new();
        for &p in &self.predictors {
            if !p.is_temporal() && !out.contains(&p) {
                out.push(p);
            }
        }
        out
    }

    pub fn density_params(&self, width: usize, height: usize) -> Result<DensityParams> {
        DensityParams::new(
            self.sigma_d_frac * width.max(height) as f64,
            self.sigma_t,
            self.density_cutoff,
        )
    }

    pub fn selection_params(&self) -> Result<SelectionParams> {
        SelectionParams::new(self.lambda_d, self.epsilon)
    }

    pub fn fusion_params(&self) -> Result<FusionParams> {
        FusionParams::new(self.omega)
    }
}

/// Parses `WxH`, e.g. `320x320`.
pub fn parse_resolution(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::InvalidArgument(format!("resolution must look like 320x320, got `{s}`"));
    let (w, h) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    let w: usize = w.trim().parse().map_err(|_| bad())?;
    let h: usize = h.trim().parse().map_err(|_| bad())?;
    if w == 0 || h == 0 {
        return Err(bad());
    }
    Ok((w, h))
}
