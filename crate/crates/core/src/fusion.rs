//! Spatial ensemble fusion and adaptive spatiotemporal fusion.
//!
//! The spatiotemporal rule blends an entropy-weighted interaction map of the
//! spatial and temporal maps with whichever of the two is more compact. The
//! blend weight is the smaller consistency score, and drops to zero when the
//! interaction map is not compact enough relative to the inputs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::{normalize_minmax, normalize_sum, NormState, SaliencyMap};

pub const DEFAULT_OMEGA: f64 = 2.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FusionParams {
    pub omega: f64,
}

impl FusionParams {
    pub fn new(omega: f64) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "omega must be positive, got {omega}"
            )));
        }
        Ok(Self { omega })
    }
}

impl Default for FusionParams {
    fn default() -> Self {
        Self {
            omega: DEFAULT_OMEGA,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyScores {
    /// Spatial-to-temporal: `e(s*t) / e(t)`.
    pub c_s2t: f64,
    /// Temporal-to-spatial: `e(s*t) / e(s)`.
    pub c_t2s: f64,
}

/// Shannon entropy (nats) of the sum-normalized map.
pub fn entropy(m: &SaliencyMap) -> Result<f64> {
    let p = normalize_sum(m)?;
    Ok(entropy_of_distribution(p.values()))
}

fn entropy_of_distribution(p: &[f64]) -> f64 {
    let h: f64 = p.iter().filter(|&&v| v > 0.0).map(|&v| -v * v.ln()).sum();
    h.max(0.0)
}

fn product(p: &SaliencyMap, q: &SaliencyMap) -> SaliencyMap {
    let values = p
        .values()
        .iter()
        .zip(q.values())
        .map(|(a, b)| a * b)
        .collect();
    SaliencyMap::from_parts(p.width(), p.height(), values, NormState::Raw)
}

pub fn consistency(s: &SaliencyMap, t: &SaliencyMap) -> Result<ConsistencyScores> {
    s.check_same_dims(t)?;
    let p = normalize_sum(s)?;
    let q = normalize_sum(t)?;
    let joint = entropy(&product(&p, &q))?;
    let (es, et) = (
        entropy_of_distribution(p.values()),
        entropy_of_distribution(q.values()),
    );
    if es == 0.0 || et == 0.0 {
        return Err(Error::ZeroEntropyDenominator);
    }
    Ok(ConsistencyScores {
        c_s2t: joint / et,
        c_t2s: joint / es,
    })
}

/// Score-weighted blend of the normalized maps, sum-normalized.
pub fn interaction_map(
    s: &SaliencyMap,
    t: &SaliencyMap,
    scores: &ConsistencyScores,
) -> Result<SaliencyMap> {
    s.check_same_dims(t)?;
    let ConsistencyScores { c_s2t, c_t2s } = *scores;
    if !(c_s2t.is_finite() && c_t2s.is_finite()) || c_s2t < 0.0 || c_t2s < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "consistency scores must be finite and non-negative, got ({c_s2t}, {c_t2s})"
        )));
    }
    let denom = c_s2t + c_t2s;
    if denom <= 0.0 {
        return Err(Error::DegenerateScores);
    }
    let p = normalize_sum(s)?;
    let q = normalize_sum(t)?;
    let values = p
        .values()
        .iter()
        .zip(q.values())
        .map(|(sv, tv)| (c_t2s * tv + c_s2t * sv) / denom)
        .collect();
    normalize_sum(&SaliencyMap::from_parts(
        s.width(),
        s.height(),
        values,
        NormState::Raw,
    ))
}

/// Saliency-weighted mean distance of pixels to the weighted centroid.
pub fn compactness(m: &SaliencyMap) -> Result<f64> {
    let p = normalize_sum(m)?;
    let w = m.width();
    let (mut cx, mut cy) = (0.0, 0.0);
    for (i, &v) in p.values().iter().enumerate() {
        cx += v * (i % w) as f64;
        cy += v * (i / w) as f64;
    }
    let mut d = 0.0;
    for (i, &v) in p.values().iter().enumerate() {
        if v > 0.0 {
            d += v * ((i % w) as f64 - cx).hypot((i / w) as f64 - cy);
        }
    }
    Ok(d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Spatial,
    Temporal,
}

/// The more compact of the two maps; ties favour the spatial map.
pub fn select_map(s: &SaliencyMap, t: &SaliencyMap) -> Result<SaliencyMap> {
    let (source, _, _) = select_source(s, t)?;
    Ok(match source {
        Source::Spatial => s.clone(),
        Source::Temporal => t.clone(),
    })
}

fn select_source(s: &SaliencyMap, t: &SaliencyMap) -> Result<(Source, f64, f64)> {
    let (ds, dt) = (compactness(s)?, compactness(t)?);
    Ok((
        if ds <= dt {
            Source::Spatial
        } else {
            Source::Temporal
        },
        ds,
        dt,
    ))
}

/// Which rule set the blend weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FusionBranch {
    /// Interaction map compact enough; weight is the smaller score.
    Blend,
    /// Interaction map failed the compactness test; weight zero.
    CompactnessRejected,
    /// Scores undefined (zero entropy, disjoint supports or an empty input).
    Degenerate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FusionOutcome {
    pub map: SaliencyMap,
    pub lambda: f64,
    pub branch: FusionBranch,
    pub selected: Source,
    pub scores: Option<ConsistencyScores>,
    pub d_spatial: Option<f64>,
    pub d_temporal: Option<f64>,
    pub d_interaction: Option<f64>,
}

/// Adaptive spatiotemporal fusion; see [`fuse_detailed`].
pub fn fuse(s: &SaliencyMap, t: &SaliencyMap, params: &FusionParams) -> Result<SaliencyMap> {
    fuse_detailed(s, t, params).map(|o| o.map)
}

/// Fuses a spatial and a temporal map and reports the intermediate terms.
///
/// If exactly one input is all zero, the other is returned (normalized) via
/// the degenerate branch.
pub fn fuse_detailed(
    s: &SaliencyMap,
    t: &SaliencyMap,
    params: &FusionParams,
) -> Result<FusionOutcome> {
    s.check_same_dims(t)?;
    match (s.is_all_zero(), t.is_all_zero()) {
        (true, true) => return Err(Error::AllZeroMap),
        (false, true) | (true, false) => {
            let (map, selected) = if t.is_all_zero() {
                (normalize_sum(s)?, Source::Spatial)
            } else {
                (normalize_sum(t)?, Source::Temporal)
            };
            let d = compactness(&map)?;
            let (d_spatial, d_temporal) = match selected {
                Source::Spatial => (Some(d), None),
                Source::Temporal => (None, Some(d)),
            };
            return Ok(FusionOutcome {
                map,
                lambda: 0.0,
                branch: FusionBranch::Degenerate,
                selected,
                scores: None,
                d_spatial,
                d_temporal,
                d_interaction: None,
            });
        }
        (false, false) => {}
    }

    let (selected, ds, dt) = select_source(s, t)?;
    let sel = normalize_sum(match selected {
        Source::Spatial => s,
        Source::Temporal => t,
    })?;

    let interaction = consistency(s, t).and_then(|sc| interaction_map(s, t, &sc).map(|m| (sc, m)));
    let (scores, interaction) = match interaction {
        Ok(pair) => pair,
        Err(Error::ZeroEntropyDenominator | Error::AllZeroMap | Error::DegenerateScores) => {
            return Ok(FusionOutcome {
                map: sel,
                lambda: 0.0,
                branch: FusionBranch::Degenerate,
                selected,
                scores: None,
                d_spatial: Some(ds),
                d_temporal: Some(dt),
                d_interaction: None,
            })
        }
        Err(e) => return Err(e),
    };

    let d_int = compactness(&interaction)?;
    let (lambda, branch) = if d_int < params.omega * ds.min(dt) {
        (
            scores.c_t2s.min(scores.c_s2t).clamp(0.0, 1.0),
            FusionBranch::Blend,
        )
    } else {
        (0.0, FusionBranch::CompactnessRejected)
    };
    let map = if lambda == 0.0 {
        sel
    } else {
        let values = interaction
            .values()
            .iter()
            .zip(sel.values())
            .map(|(i, v)| lambda * i + (1.0 - lambda) * v)
            .collect();
        normalize_sum(&SaliencyMap::from_parts(
            s.width(),
            s.height(),
            values,
            NormState::Raw,
        ))?
    };
    Ok(FusionOutcome {
        map,
        lambda,
        branch,
        selected,
        scores: Some(scores),
        d_spatial: Some(ds),
        d_temporal: Some(dt),
        d_interaction: Some(d_int),
    })
}

/// Mean of min-max normalized maps, then sum-normalized.
pub fn spatial_ensemble_fuse(maps: &[&SaliencyMap]) -> Result<SaliencyMap> {
    let first = maps.first().ok_or(Error::EmptyList)?;
    let mut acc = vec![0.0; first.len()];
    for m in maps {
        first.check_same_dims(m)?;
        for (a, v) in acc.iter_mut().zip(normalize_minmax(m).values()) {
            *a += v;
        }
    }
    let n = maps.len() as f64;
    let values = acc.into_iter().map(|v| v / n).collect();
    normalize_sum(&SaliencyMap::from_parts(
        first.width(),
        first.height(),
        values,
        NormState::Raw,
    ))
}
