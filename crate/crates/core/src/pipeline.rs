//! End-to-end run: density maps, predictor bank, selection, spatial ensemble,
//! spatiotemporal fusion and evaluation.
//!
//! Each stage's output is rounded through `f32` before the next stage uses
//! it, so running the CLI subcommands one by one on the written `.pfm` files
//! reproduces every intermediate exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::density::{density_maps, fixations_per_frame, DensityParams, FixationRecord, Pixel};
use crate::error::{Error, Result};
use crate::fusion::{fuse_detailed, spatial_ensemble_fuse, FusionOutcome, FusionParams};
use crate::io::{
    load_frames, load_manifest, parse_fixation_csv, write_report, write_sequence, FixationsByVideo,
    MapFormat, VideoManifest,
};
use crate::map::SaliencyMap;
use crate::metrics::{evaluate_sequence, MetricReport};
use crate::predictors::{params, run_bank, BankOutput, Frame, PredictorId};
use crate::selection::{
    diversity, objective, representativeness, similarity_matrix, SelectionMask, SelectionParams,
    SimilarityMatrix, Solver,
};

fn quantized(maps: Vec<SaliencyMap>) -> Vec<SaliencyMap> {
    maps.iter().map(SaliencyMap::quantize_f32).collect()
}

/// Ground-truth density map per frame.
pub fn stage_density(
    fixations: &[FixationRecord],
    manifest: &VideoManifest,
    params: &DensityParams,
) -> Vec<SaliencyMap> {
    quantized(density_maps(
        fixations,
        manifest.frame_count(),
        manifest.fps,
        manifest.width,
        manifest.height,
        params,
    ))
}

pub fn stage_predict(frames: &[Frame], which: &[PredictorId]) -> Result<BankOutput> {
    let mut bank = run_bank(frames, which)?;
    for row in &mut bank.maps {
        *row = quantized(std::mem::take(row));
    }
    Ok(bank)
}

/// Result of the selection stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionSummary {
    pub predictors: Vec<String>,
    pub mask: Vec<bool>,
    pub selected: Vec<String>,
    pub objective: f64,
    pub representativeness: f64,
    pub diversity: f64,
    pub solver: Solver,
    pub lambda_d: f64,
    pub epsilon: f64,
}

impl SelectionSummary {
    pub fn new(
        sim: &SimilarityMatrix,
        mask: &SelectionMask,
        params: &SelectionParams,
        solver: Solver,
    ) -> Self {
        Self {
            predictors: sim.labels().to_vec(),
            mask: mask.alpha().to_vec(),
            selected: mask
                .selected()
                .iter()
                .map(|&i| sim.labels()[i].clone())
                .collect(),
            objective: objective(mask, sim, params),
            representativeness: representativeness(mask, sim, params.epsilon),
            diversity: diversity(mask, sim, params.epsilon),
            solver,
            lambda_d: params.lambda_d,
            epsilon: params.epsilon,
        }
    }
}

/// Similarity matrix over `frames[k][i]` and the solver's mask.
pub fn stage_select(
    labels: Vec<String>,
    frames: &[Vec<SaliencyMap>],
    working_resolution: (usize, usize),
    params: &SelectionParams,
    solver: Solver,
) -> Result<(SimilarityMatrix, SelectionMask)> {
    let sim = similarity_matrix(labels, frames, working_resolution.0, working_resolution.1)?;
    let mask = solver.solve(&sim, params)?;
    Ok((sim, mask))
}

/// Per-frame ensemble of the given spatial maps (`frames[k]` lists frame `k`'s maps).
pub fn stage_spatial(frames: &[Vec<&SaliencyMap>]) -> Result<Vec<SaliencyMap>> {
    let maps = frames
        .par_iter()
        .map(|row| spatial_ensemble_fuse(row))
        .collect::<Result<Vec<_>>>()?;
    Ok(quantized(maps))
}

pub fn stage_fuse(
    spatial: &[SaliencyMap],
    temporal: &[SaliencyMap],
    params: &FusionParams,
) -> Result<Vec<FusionOutcome>> {
    if spatial.len() != temporal.len() {
        return Err(Error::InvalidArgument(format!(
            "{} spatial maps but {} temporal maps",
            spatial.len(),
            temporal.len()
        )));
    }
    spatial
        .par_iter()
        .zip(temporal)
        .map(|(s, t)| {
            fuse_detailed(s, t, params).map(|mut o| {
                o.map = o.map.quantize_f32();
                o
            })
        })
        .collect()
}

/// Negatives for shuffled AUC: fixations from every other video, or from
/// this video's own log when it is the only one.
pub fn shuffle_pool(
    all: &FixationsByVideo,
    video_id: &str,
    width: usize,
    height: usize,
) -> Vec<Pixel> {
    let others: Vec<Pixel> = all
        .iter()
        .filter(|(id, _)| id.as_str() != video_id)
        .flat_map(|(_, recs)| recs.iter().filter_map(|f| f.pixel(width, height)))
        .collect();
    if !others.is_empty() {
        return others;
    }
    all.get(video_id)
        .map(|recs| recs.iter().filter_map(|f| f.pixel(width, height)).collect())
        .unwrap_or_default()
}

pub fn stage_eval(
    fused: &[SaliencyMap],
    gts: &[SaliencyMap],
    all: &FixationsByVideo,
    manifest: &VideoManifest,
) -> Result<MetricReport> {
    let own = all
        .get(&manifest.video_id)
        .map(Vec::as_slice)
        .unwrap_or(&[]);
    let per_frame = fixations_per_frame(
        own,
        manifest.frame_count(),
        manifest.fps,
        manifest.width,
        manifest.height,
    );
    let pool = shuffle_pool(all, &manifest.video_id, manifest.width, manifest.height);
    evaluate_sequence(fused, gts, &per_frame, &pool)
}

/// Checks the video has fixations and all of them lie inside the frame.
pub fn validate_fixations<'a>(
    all: &'a FixationsByVideo,
    manifest: &VideoManifest,
) -> Result<&'a [FixationRecord]> {
    let own = all.get(&manifest.video_id).ok_or_else(|| {
        Error::InvalidArgument(format!(
            "fixation log has no entries for video `{}`",
            manifest.video_id
        ))
    })?;
    if let Some(f) = own
        .iter()
        .find(|f| f.x >= manifest.width as f64 || f.y >= manifest.height as f64)
    {
        return Err(Error::InvalidArgument(format!(
            "fixation ({}, {}) at {} s lies outside the {}x{} frame",
            f.x, f.y, f.t, manifest.width, manifest.height
        )));
    }
    Ok(own)
}

/// Everything a run produced, also persisted under the output directory.
#[derive(Debug, Clone)]
pub struct PipelineResult {
    pub ground_truth: Vec<SaliencyMap>,
    pub bank: BankOutput,
    pub similarity: SimilarityMatrix,
    pub mask: SelectionMask,
    pub selection: SelectionSummary,
    pub spatial: Vec<SaliencyMap>,
    pub fusion: Vec<FusionOutcome>,
    pub report: MetricReport,
}

impl PipelineResult {
    pub fn fused_maps(&self) -> Vec<SaliencyMap> {
        self.fusion.iter().map(|o| o.map.clone()).collect()
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.fusion.iter().map(|o| o.lambda).collect()
    }
}

#[derive(Debug, Serialize)]
struct RunManifest<'a> {
    tool: &'static str,
    version: &'static str,
    predictor_params_version: &'static str,
    video_id: &'a str,
    width: usize,
    height: usize,
    fps: f64,
    frames: usize,
    config: &'a RunConfig,
    selected: &'a [String],
}

/// Loads inputs (failing before any compute), runs every stage and writes
/// all artifacts under `config.out_dir`.
pub fn run_pipeline(
    config: &RunConfig,
    manifest_path: &Path,
    fixations_path: &Path,
) -> Result<PipelineResult> {
    config.validate().map_err(|e| e.in_stage("config"))?;
    let all = parse_fixation_csv(fixations_path).map_err(|e| e.in_stage("fixations"))?;
    let manifest = load_manifest(manifest_path).map_err(|e| e.in_stage("manifest"))?;
    let own = validate_fixations(&all, &manifest).map_err(|e| e.in_stage("fixations"))?;
    let density_params = config
        .density_params(manifest.width, manifest.height)
        .map_err(|e| e.in_stage("config"))?;
    let selection_params = config
        .selection_params()
        .map_err(|e| e.in_stage("config"))?;
    let fusion_params = config.fusion_params().map_err(|e| e.in_stage("config"))?;
    let frames = load_frames(&manifest).map_err(|e| e.in_stage("manifest"))?;

    let out = &config.out_dir;
    fs::create_dir_all(out)?;

    let ground_truth = stage_density(own, &manifest, &density_params);
    write_sequence(&out.join("gt"), &ground_truth, MapFormat::Pfm)
        .map_err(|e| e.in_stage("density"))?;

    let spatial_ids = config.spatial_predictors();
    let mut which = spatial_ids.clone();
    which.push(PredictorId::TemporalDiff);
    let bank = stage_predict(&frames, &which).map_err(|e| e.in_stage("predict"))?;
    for (i, id) in bank.predictors.iter().enumerate() {
        let maps: Vec<SaliencyMap> = bank.maps.iter().map(|row| row[i].clone()).collect();
        write_sequence(
            &out.join("predictors").join(id.name()),
            &maps,
            MapFormat::Pfm,
        )
        .map_err(|e| e.in_stage("predict"))?;
    }

    let n_spatial = spatial_ids.len();
    let spatial_rows: Vec<Vec<SaliencyMap>> = bank
        .maps
        .iter()
        .map(|row| row[..n_spatial].to_vec())
        .collect();
    let labels = spatial_ids.iter().map(|p| p.name().to_string()).collect();
    let (similarity, mask) = stage_select(
        labels,
        &spatial_rows,
        config.working_resolution,
        &selection_params,
        config.solver,
    )
    .map_err(|e| e.in_stage("select"))?;
    let selection = SelectionSummary::new(&similarity, &mask, &selection_params, config.solver);
    similarity
        .write_csv(fs::File::create(out.join("similarity.csv"))?)
        .map_err(|e| e.in_stage("select"))?;
    fs::write(
        out.join("selection.json"),
        serde_json::to_string_pretty(&selection)? + "\n",
    )?;

    let chosen = mask.selected();
    let per_frame: Vec<Vec<&SaliencyMap>> = spatial_rows
        .iter()
        .map(|row| chosen.iter().map(|&i| &row[i]).collect())
        .collect();
    let spatial = stage_spatial(&per_frame).map_err(|e| e.in_stage("spatial"))?;
    write_sequence(&out.join("spatial"), &spatial, MapFormat::Pfm)
        .map_err(|e| e.in_stage("spatial"))?;

    let temporal: Vec<SaliencyMap> = bank.maps.iter().map(|row| row[n_spatial].clone()).collect();
    let fusion = stage_fuse(&spatial, &temporal, &fusion_params).map_err(|e| e.in_stage("fuse"))?;
    let fused: Vec<SaliencyMap> = fusion.iter().map(|o| o.map.clone()).collect();
    write_sequence(&out.join("fused"), &fused, MapFormat::Pfm).map_err(|e| e.in_stage("fuse"))?;
    fs::write(out.join("fusion.csv"), fusion_table(&fusion))?;
    if config.previews {
        write_sequence(&out.join("preview"), &fused, MapFormat::Pgm8)
            .map_err(|e| e.in_stage("fuse"))?;
    }

    let report =
        stage_eval(&fused, &ground_truth, &all, &manifest).map_err(|e| e.in_stage("eval"))?;
    let report_path = out.join(format!("report.{}", config.report_format.extension()));
    write_report(&report, &report_path, config.report_format).map_err(|e| e.in_stage("eval"))?;

    let run = RunManifest {
        tool: "vsal",
        version: env!("CARGO_PKG_VERSION"),
        predictor_params_version: params::VERSION,
        video_id: &manifest.video_id,
        width: manifest.width,
        height: manifest.height,
        fps: manifest.fps,
        frames: manifest.frame_count(),
        config,
        selected: &selection.selected,
    };
    fs::write(
        out.join("run.json"),
        serde_json::to_string_pretty(&run)? + "\n",
    )?;

    Ok(PipelineResult {
        ground_truth,
        bank,
        similarity,
        mask,
        selection,
        spatial,
        fusion,
        report,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Per-frame fusion diagnostics as CSV.
pub fn fusion_table(fusion: &[FusionOutcome]) -> String {
    let mut out = String::from(
        "frame,lambda,branch,selected,c_s2t,c_t2s,d_spatial,d_temporal,d_interaction\n",
    );
    for (k, o) in fusion.iter().enumerate() {
        let branch = serde_json::to_value(o.branch).expect("enum serializes");
        let selected = serde_json::to_value(o.selected).expect("enum serializes");
        let _ = writeln!(
            out,
            "{k},{},{},{},{},{},{},{},{}",
            o.lambda,
            branch.as_str().unwrap_or_default(),
            selected.as_str().unwrap_or_default(),
            opt(o.scores.map(|s| s.c_s2t)),
            opt(o.scores.map(|s| s.c_t2s)),
            opt(o.d_spatial),
            opt(o.d_temporal),
            opt(o.d_interaction),
        );
    }
    out
}
