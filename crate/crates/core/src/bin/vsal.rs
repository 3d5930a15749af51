use std::error::Error as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use vsal_core::config::{parse_resolution, RunConfig};
use vsal_core::density::{
    DensityParams, DEFAULT_EPSILON_CUTOFF, DEFAULT_SIGMA_D_FRAC, DEFAULT_SIGMA_T,
};
use vsal_core::fusion::{FusionParams, DEFAULT_OMEGA};
use vsal_core::io::{
    load_frames, load_manifest, parse_fixation_csv, read_sequence, report_to_csv, report_to_json,
    write_sequence, MapFormat, ReportFormat,
};
use vsal_core::pipeline::{
    fusion_table, run_pipeline, stage_density, stage_eval, stage_fuse, stage_predict, stage_select,
    stage_spatial, validate_fixations, SelectionSummary,
};
use vsal_core::predictors::PredictorId;
use vsal_core::selection::{
    SelectionParams, SimilarityMatrix, Solver, DEFAULT_EPSILON, DEFAULT_LAMBDA_D,
};
use vsal_core::synthetic::{generate, write_dataset, SyntheticSpec};
use vsal_core::{Error, Result};

#[derive(Parser)]
#[command(name = "vsal", version, about = "Video saliency ensemble toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fixation log -> ground-truth density map per frame
    Density(DensityArgs),
    /// Frames -> one map sequence per predictor
    Predict(PredictArgs),
    /// Predictor maps or a similarity CSV -> selected predictor subset
    Select(SelectArgs),
    /// Spatial + temporal maps -> fused maps
    Fuse(FuseArgs),
    /// Predicted maps vs ground truth and fixations -> metric report
    Eval(EvalArgs),
    /// Every stage end to end
    Pipeline(PipelineArgs),
    /// Write a synthetic moving-blob dataset
    Synth(SynthArgs),
}

#[derive(Args)]
struct Inputs {
    /// Video manifest (JSON)
    #[arg(long)]
    manifest: PathBuf,
    /// Fixation CSV: video_id,subject_id,timestamp_s,x_px,y_px
    #[arg(long)]
    fixations: PathBuf,
}

#[derive(Args)]
struct DensityFlags {
    #[arg(long, allow_negative_numbers = true, default_value_t = DEFAULT_SIGMA_D_FRAC)]
    sigma_d_frac: f64,
    /// Temporal spread in seconds
    #[arg(long, allow_negative_numbers = true, default_value_t = DEFAULT_SIGMA_T)]
    sigma_t: f64,
    /// Skip fixations whose temporal weight is below this
    #[arg(long, allow_negative_numbers = true, default_value_t = DEFAULT_EPSILON_CUTOFF)]
    density_cutoff: f64,
}

#[derive(Args)]
struct SelectFlags {
    #[arg(long, allow_negative_numbers = true, default_value_t = DEFAULT_LAMBDA_D)]
    lambda_d: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
    /// Similarity working resolution, WxH
    #[arg(long, value_parser = parse_resolution, default_value = "320x320")]
    resolution: (usize, usize),
    #[arg(long, default_value = "exhaustive")]
    solver: Solver,
}

#[derive(Args)]
struct DensityArgs {
    #[command(flatten)]
    inputs: Inputs,
    #[command(flatten)]
    density: DensityFlags,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "pfm")]
    format: MapFormat,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Comma-separated predictor names
    #[arg(long, value_delimiter = ',', default_values = ["spectral_residual", "center_surround", "global_contrast", "frequency_tuned", "temporal_diff"])]
    predictors: Vec<PredictorId>,
    /// Output directory; one subdirectory per predictor
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "pfm")]
    format: MapFormat,
}

#[derive(Args)]
struct SelectArgs {
    /// Similarity matrix CSV (header of names, then M rows of M reals)
    #[arg(long, conflicts_with = "maps", required_unless_present = "maps")]
    similarity: Option<PathBuf>,
    /// Directory holding one map sequence subdirectory per predictor
    #[arg(long)]
    maps: Option<PathBuf>,
    /// Predictors to read from --maps, in order
    #[arg(long, value_delimiter = ',', default_values = ["spectral_residual", "center_surround", "global_contrast", "frequency_tuned"])]
    predictors: Vec<PredictorId>,
    #[command(flatten)]
    select: SelectFlags,
    /// Directory for selection.json (and similarity.csv when computed)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FuseArgs {
    /// Spatial map sequence used as is
    #[arg(
        long,
        conflicts_with = "ensemble",
        required_unless_present = "ensemble"
    )]
    spatial: Option<PathBuf>,
    /// Spatial map sequences to average first (repeatable)
    #[arg(long)]
    ensemble: Vec<PathBuf>,
    /// Temporal map sequence
    #[arg(long)]
    temporal: PathBuf,
    #[arg(long, allow_negative_numbers = true, default_value_t = DEFAULT_OMEGA)]
    omega: f64,
    /// Output directory for fused maps
    #[arg(long)]
    out: PathBuf,
    /// Where to write the averaged spatial maps when --ensemble is used
    #[arg(long)]
    spatial_out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    pred: PathBuf,
    #[arg(long)]
    gt: PathBuf,
    #[command(flatten)]
    inputs: Inputs,
    #[arg(long, default_value = "json")]
    report: ReportFormat,
    /// Report file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PipelineArgs {
    #[command(flatten)]
    inputs: Inputs,
    #[command(flatten)]
    density: DensityFlags,
    #[command(flatten)]
    select: SelectFlags,
    #[arg(long, allow_negative_numbers = true, default_value_t = DEFAULT_OMEGA)]
    omega: f64,
    /// Spatial candidate predictors
    #[arg(long, value_delimiter = ',', default_values = ["spectral_residual", "center_surround", "global_contrast", "frequency_tuned"])]
    predictors: Vec<PredictorId>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, default_value = "json")]
    report: ReportFormat,
    /// Also write 8-bit PGM previews of the fused maps
    #[arg(long)]
    previews: bool,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 64)]
    size: usize,
    #[arg(long, default_value_t = 30)]
    frames: usize,
    #[arg(long, default_value_t = 30.0)]
    fps: f64,
    #[arg(long, default_value_t = 8)]
    subjects: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

fn density(args: DensityArgs) -> Result<()> {
    let all = parse_fixation_csv(&args.inputs.fixations)?;
    let manifest = load_manifest(&args.inputs.manifest)?;
    let own = validate_fixations(&all, &manifest)?;
    let params = DensityParams::new(
        args.density.sigma_d_frac * manifest.width.max(manifest.height) as f64,
        args.density.sigma_t,
        args.density.density_cutoff,
    )?;
    let maps = stage_density(own, &manifest, &params);
    write_sequence(&args.out, &maps, args.format)?;
    println!(
        "wrote {} density maps to {}",
        maps.len(),
        args.out.display()
    );
    Ok(())
}

fn predict(args: PredictArgs) -> Result<()> {
    let manifest = load_manifest(&args.manifest)?;
    let frames = load_frames(&manifest)?;
    let bank = stage_predict(&frames, &args.predictors)?;
    for (i, id) in bank.predictors.iter().enumerate() {
        let maps: Vec<_> = bank.maps.iter().map(|row| row[i].clone()).collect();
        write_sequence(&args.out.join(id.name()), &maps, args.format)?;
    }
    println!("wrote {} maps to {}", bank.map_count(), args.out.display());
    Ok(())
}

fn read_bank_dir(
    dir: &Path,
    predictors: &[PredictorId],
) -> Result<Vec<Vec<vsal_core::SaliencyMap>>> {
    let series = predictors
        .iter()
        .map(|p| read_sequence(&dir.join(p.name())))
        .collect::<Result<Vec<_>>>()?;
    let frames = series[0].len();
    if series.iter().any(|s| s.len() != frames) {
        return Err(Error::InvalidArgument(
            "predictor sequences have different lengths".into(),
        ));
    }
    Ok((0..frames)
        .map(|k| series.iter().map(|s| s[k].clone()).collect())
        .collect())
}

fn select(args: SelectArgs) -> Result<()> {
    let params = SelectionParams::new(args.select.lambda_d, args.select.epsilon)?;
    let (sim, mask) = match (&args.similarity, &args.maps) {
        (Some(csv), _) => {
            let sim = SimilarityMatrix::read_csv(fs::File::open(csv)?)?;
            let mask = args.select.solver.solve(&sim, &params)?;
            (sim, mask)
        }
        (None, Some(dir)) => {
            let spatial: Vec<PredictorId> = args
                .predictors
                .iter()
                .copied()
                .filter(|p| !p.is_temporal())
                .collect();
            if spatial.is_empty() {
                return Err(Error::EmptyPredictorList);
            }
            let rows = read_bank_dir(dir, &spatial)?;
            let labels = spatial.iter().map(|p| p.name().to_string()).collect();
            stage_select(
                labels,
                &rows,
                args.select.resolution,
                &params,
                args.select.solver,
            )?
        }
        (None, None) => unreachable!("clap requires one input"),
    };
    let summary = SelectionSummary::new(&sim, &mask, &params, args.select.solver);
    let json = serde_json::to_string_pretty(&summary)? + "\n";
    if let Some(out) = &args.out {
        fs::create_dir_all(out)?;
        fs::write(out.join("selection.json"), &json)?;
        if args.maps.is_some() {
            sim.write_csv(fs::File::create(out.join("similarity.csv"))?)?;
        }
    }
    print!("{json}");
    Ok(())
}

fn fuse(args: FuseArgs) -> Result<()> {
    let spatial = match &args.spatial {
        Some(dir) => read_sequence(dir)?,
        None => {
            let series = args
                .ensemble
                .iter()
                .map(|d| read_sequence(d))
                .collect::<Result<Vec<_>>>()?;
            let frames = series[0].len();
            if series.iter().any(|s| s.len() != frames) {
                return Err(Error::InvalidArgument(
                    "ensemble sequences have different lengths".into(),
                ));
            }
            let rows: Vec<Vec<_>> = (0..frames)
                .map(|k| series.iter().map(|s| &s[k]).collect())
                .collect();
            let maps = stage_spatial(&rows)?;
            if let Some(out) = &args.spatial_out {
                write_sequence(out, &maps, MapFormat::Pfm)?;
            }
            maps
        }
    };
    let temporal = read_sequence(&args.temporal)?;
    let outcomes = stage_fuse(&spatial, &temporal, &FusionParams::new(args.omega)?)?;
    let fused: Vec<_> = outcomes.iter().map(|o| o.map.clone()).collect();
    write_sequence(&args.out, &fused, MapFormat::Pfm)?;
    fs::write(args.out.join("fusion.csv"), fusion_table(&outcomes))?;
    println!("wrote {} fused maps to {}", fused.len(), args.out.display());
    Ok(())
}

fn eval(args: EvalArgs) -> Result<()> {
    let all = parse_fixation_csv(&args.inputs.fixations)?;
    let manifest = load_manifest(&args.inputs.manifest)?;
    validate_fixations(&all, &manifest)?;
    let preds = read_sequence(&args.pred)?;
    let gts = read_sequence(&args.gt)?;
    if preds.len() != manifest.frame_count() || gts.len() != manifest.frame_count() {
        return Err(Error::InvalidArgument(format!(
            "manifest has {} frames but got {} predictions and {} ground-truth maps",
            manifest.frame_count(),
            preds.len(),
            gts.len()
        )));
    }
    let report = stage_eval(&preds, &gts, &all, &manifest)?;
    let text = match args.report {
        ReportFormat::Json => report_to_json(&report)?,
        ReportFormat::Csv => report_to_csv(&report),
    };
    match &args.out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn pipeline(args: PipelineArgs) -> Result<()> {
    let config = RunConfig {
        sigma_d_frac: args.density.sigma_d_frac,
        sigma_t: args.density.sigma_t,
        density_cutoff: args.density.density_cutoff,
        lambda_d: args.select.lambda_d,
        omega: args.omega,
        epsilon: args.select.epsilon,
        working_resolution: args.select.resolution,
        predictors: args.predictors,
        solver: args.select.solver,
        out_dir: args.out,
        report_format: args.report,
        previews: args.previews,
    };
    let result = run_pipeline(&config, &args.inputs.manifest, &args.inputs.fixations)?;
    let fmt = |v: Option<f64>| v.map_or("n/a".to_string(), |x| format!("{x:.4}"));
    println!("selected: {}", result.selection.selected.join(", "));
    println!(
        "AUC {}  sAUC {}  NSS {}  SIM {}  CC {}",
        fmt(result.report.auc),
        fmt(result.report.sauc),
        fmt(result.report.nss),
        fmt(result.report.sim),
        fmt(result.report.cc)
    );
    println!("artifacts in {}", config.out_dir.display());
    Ok(())
}

fn synth(args: SynthArgs) -> Result<()> {
    let spec = SyntheticSpec {
        size: args.size,
        frames: args.frames,
        fps: args.fps,
        subjects: args.subjects,
        seed: args.seed,
        ..SyntheticSpec::default()
    };
    let paths = write_dataset(&generate(&spec)?, &args.out)?;
    println!("manifest: {}", paths.manifest.display());
    println!("fixations: {}", paths.fixations.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Density(a) => density(a),
        Command::Predict(a) => predict(a),
        Command::Select(a) => select(a),
        Command::Fuse(a) => fuse(a),
        Command::Eval(a) => eval(a),
        Command::Pipeline(a) => pipeline(a),
        Command::Synth(a) => synth(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = e.source();
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::FAILURE
        }
    }
}
