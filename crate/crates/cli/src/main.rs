use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use lesionseg::harness::{
    evaluate_predictions, load_dataset, load_predictions, render_overlay, run_batch_with, run_pipeline,
    write_report_with, BatchOptions, BatchOutcome, PipelineConfig, ReportOptions,
};
use lesionseg::{io, Error};

const EXIT_USAGE: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_ALL_FAILED: u8 = 3;

#[derive(Parser)]
#[command(name = "lesionseg", version, about = "Automatic skin-lesion segmentation and Jaccard evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Segment one image.
    Segment(SegmentArgs),
    /// Segment and score every image in a dataset directory.
    Batch(BatchArgs),
    /// Score externally produced masks against ground truth.
    Eval(EvalArgs),
    /// Write synthetic lesion images and their masks, for trying the tool out.
    Synth(SynthArgs),
}

#[derive(Args)]
struct ConfigArgs {
    /// JSON file with PipelineConfig fields; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<PipelineConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => PipelineConfig::load(path)?,
            None => PipelineConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct SegmentArgs {
    #[arg(long)]
    input: PathBuf,
    /// Output mask PNG, 255 on the lesion.
    #[arg(long)]
    out_mask: PathBuf,
    /// Optional copy of the input with the lesion outline drawn on it.
    #[arg(long)]
    out_overlay: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args)]
struct BatchArgs {
    /// Directory of `<id>.jpg` or `<id>.png` images.
    #[arg(long)]
    images: PathBuf,
    /// Directory of `<id>_segmentation.png` masks.
    #[arg(long)]
    ground_truth: PathBuf,
    /// CSV report path; the summary goes next to it as `.summary.json`.
    #[arg(long)]
    report: PathBuf,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    workers: Option<u64>,
    /// Only the first N images in id order.
    #[arg(long)]
    limit: Option<usize>,
    /// Leave runtime_ms empty so repeated runs give identical reports.
    #[arg(long)]
    omit_timing: bool,
    /// Also write each predicted mask as `<id>.png` here.
    #[arg(long)]
    out_masks: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args)]
struct EvalArgs {
    /// Directory of predicted masks named `<id>.png` or `<id>_segmentation.png`.
    #[arg(long)]
    pred: PathBuf,
    #[arg(long)]
    ground_truth: PathBuf,
    #[arg(long)]
    report: PathBuf,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 10)]
    count: usize,
    #[arg(long, default_value_t = 256)]
    size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// A failure with the exit code it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_io() {
            EXIT_IO
        } else if matches!(e.root(), Error::InvalidConfig(_) | Error::Json(_)) {
            EXIT_USAGE
        } else {
            EXIT_ALL_FAILED
        };
        Failure {
            code,
            error: e.into(),
        }
    }
}

fn io_failure(error: anyhow::Error) -> Failure {
    Failure { code: EXIT_IO, error }
}

fn segment(args: &SegmentArgs) -> Result<(), Failure> {
    let cfg = args.config.resolve()?;
    let img = io::load_rgb(&args.input)?;
    let result = run_pipeline(&img, &cfg)?;
    io::save_mask(&result.mask, &args.out_mask)?;
    if let Some(path) = &args.out_overlay {
        io::save_rgb(&render_overlay(&img, &result.mask)?, path)?;
    }
    let init = result.init_mode.map_or("none", |m| m.kind().as_str());
    println!(
        "{}: {} lesion pixels of {}, {init}, {} iterations",
        args.input.display(),
        result.mask.count_ones(),
        result.mask.len(),
        result.iterations_run
    );
    Ok(())
}

fn report(outcome: &BatchOutcome, path: &Path, opts: &ReportOptions) -> Result<(), Failure> {
    for f in &outcome.failures {
        eprintln!("failed: {}", f.error);
    }
    if outcome.records.is_empty() {
        return Err(Failure {
            code: EXIT_ALL_FAILED,
            error: anyhow::anyhow!("all {} images failed", outcome.failures.len()),
        });
    }
    let summary = write_report_with(outcome, path, opts)?;
    println!(
        "{} images evaluated, {} failed, {} without ground truth; mean JC {:.4} (median {:.4}, min {:.4}, max {:.4})",
        summary.images_evaluated,
        summary.images_failed,
        summary.skipped.len(),
        summary.jaccard.mean,
        summary.jaccard.median,
        summary.jaccard.min,
        summary.jaccard.max
    );
    println!("report: {}", path.display());
    Ok(())
}

fn batch(args: &BatchArgs) -> Result<(), Failure> {
    let cfg = args.config.resolve()?;
    let mut dataset = load_dataset(&args.images, &args.ground_truth)?;
    if let Some(n) = args.limit {
        dataset = dataset.limit(n);
    }
    let workers = match args.workers {
        Some(n) => n as usize,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let opts = BatchOptions {
        workers,
        mask_dir: args.out_masks.clone(),
    };
    let outcome = run_batch_with(&dataset, &cfg, &opts)?;
    report(
        &outcome,
        &args.report,
        &ReportOptions {
            include_timing: !args.omit_timing,
        },
    )
}

fn eval(args: &EvalArgs) -> Result<(), Failure> {
    let (pairs, skipped) = load_predictions(&args.pred, &args.ground_truth)?;
    let outcome = evaluate_predictions(&pairs, skipped);
    report(&outcome, &args.report, &ReportOptions::default())
}

fn synth(args: &SynthArgs) -> Result<(), Failure> {
    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))
        .map_err(io_failure)?;
    for (i, f) in lesionseg::synth::fixture_set(args.count, args.size, args.seed).iter().enumerate() {
        io::save_rgb(&f.image, args.out.join(format!("SYN_{i:07}.png")))?;
        io::save_mask(&f.truth, args.out.join(format!("SYN_{i:07}_segmentation.png")))?;
    }
    println!("wrote {} fixtures to {}", args.count, args.out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match &cli.command {
        Command::Segment(a) => segment(a),
        Command::Batch(a) => batch(a),
        Command::Eval(a) => eval(a),
        Command::Synth(a) => synth(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
