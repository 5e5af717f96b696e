//! `gsr`: batch game-state reconstruction for broadcast soccer. Calibrate
//! cameras from pitch observations, project annotations, track athletes,
//! refine tracklets, evaluate, and synthesize test scenes.

mod config;
mod pipeline;

use std::path::PathBuf;

use anyhow::Result;
use clap::{Parser, Subcommand, ValueEnum};
use gsr_core::pitch::PitchModel;
use gsr_core::synth::NoiseModel;

use config::ConfigFile;
use pipeline::{EvalOutput, PostprocessArgs, SynthArgs};

#[derive(Parser)]
#[command(name = "gsr", version, about = "Game-state reconstruction toolkit for broadcast soccer")]
struct Cli {
    /// Optional JSON config file; command-line flags win over its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for batch stages (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Seed for stages that draw random numbers.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Pitch length override, meters.
    #[arg(long, global = true)]
    pitch_length: Option<f64>,
    /// Pitch width override, meters.
    #[arg(long, global = true)]
    pitch_width: Option<f64>,
    /// Frame width in pixels (annotations do not carry an image size).
    #[arg(long, global = true, default_value_t = 1920)]
    image_width: u32,
    /// Frame height in pixels.
    #[arg(long, global = true, default_value_t = 1080)]
    image_height: u32,
    /// Write a machine-readable summary JSON here.
    #[arg(long, global = true)]
    summary: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate camera parameters for every frame of every clip.
    Calibrate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Replace detected keypoints/lines with canonical-pitch projections.
    Annotate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// World-space sampling step for projected lines, meters.
        #[arg(long, default_value_t = 0.25)]
        spacing: f64,
    },
    /// Associate detections into identity-consistent tracks.
    Track {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Refine tracklets: legibility filter, voting, merging, teams.
    Postprocess {
        #[arg(long)]
        input: PathBuf,
        /// Directory of calibrated clips for pitch coordinates (defaults to
        /// cameras embedded in the input clips).
        #[arg(long)]
        calibrations: Option<PathBuf>,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        legibility_threshold: f64,
    },
    /// Score predictions against ground truth.
    Eval {
        #[arg(long, value_enum)]
        mode: EvalMode,
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        gt: PathBuf,
        /// Jaccard thresholds in pixels (calibration mode).
        #[arg(long, value_delimiter = ',')]
        gamma: Option<Vec<f64>>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        /// Write the report here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Generate synthetic clips with ground truth and noisy observations.
    Synth {
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 2)]
        clips: usize,
        #[arg(long, default_value_t = 50)]
        frames: usize,
        #[arg(long, default_value_t = 22)]
        athletes: usize,
        /// Static wide camera keeping the whole pitch visible.
        #[arg(long)]
        full_pitch_camera: bool,
        #[arg(long, default_value_t = 0.0)]
        keypoint_sigma: f64,
        #[arg(long, default_value_t = 0.0)]
        dropout: f64,
        #[arg(long, default_value_t = 0.0)]
        false_positive_rate: f64,
        #[arg(long, default_value_t = 0.0)]
        embedding_sigma: f64,
        #[arg(long, default_value_t = 0.0)]
        bbox_jitter: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum EvalMode {
    Calibration,
    Tracking,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Table,
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let file_config = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    if let Some(jobs) = cli.jobs.or(file_config.jobs) {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()?;
    }
    let dims = file_config.pitch_dimensions(cli.pitch_length, cli.pitch_width)?;
    let pitch = PitchModel::build(dims)?;
    let summary = cli.summary.as_deref();

    match cli.command {
        Command::Calibrate { input, output } => {
            pipeline::cmd_calibrate(&input, &output, &pitch, summary)
        }
        Command::Annotate {
            input,
            output,
            spacing,
        } => pipeline::cmd_annotate(&input, &output, &pitch, spacing, summary),
        Command::Track { input, output } => {
            let tracker_cfg = file_config.tracker_config();
            pipeline::cmd_track(&input, &output, &tracker_cfg, summary)
        }
        Command::Postprocess {
            input,
            calibrations,
            output,
            legibility_threshold,
        } => {
            let args = PostprocessArgs {
                input,
                calibrations,
                output,
                legibility_threshold,
                merge: file_config.merge_config(),
                team: file_config.team_config(cli.seed),
            };
            pipeline::cmd_postprocess(&args, summary)
        }
        Command::Eval {
            mode,
            pred,
            gt,
            gamma,
            format,
            output,
        } => {
            let format = match format {
                Format::Json => EvalOutput::Json,
                Format::Table => EvalOutput::Table,
            };
            match mode {
                EvalMode::Calibration => {
                    let gammas = file_config.gammas(gamma);
                    pipeline::cmd_eval_calibration(
                        &pred,
                        &gt,
                        &pitch,
                        &gammas,
                        &format,
                        output.as_deref(),
                    )
                }
                EvalMode::Tracking => {
                    pipeline::cmd_eval_tracking(&pred, &gt, &format, output.as_deref())
                }
            }
        }
        Command::Synth {
            output,
            clips,
            frames,
            athletes,
            full_pitch_camera,
            keypoint_sigma,
            dropout,
            false_positive_rate,
            embedding_sigma,
            bbox_jitter,
        } => {
            let args = SynthArgs {
                output,
                clips,
                frames,
                athletes,
                seed: cli.seed.or(file_config.seed).unwrap_or(7),
                full_pitch_camera,
                noise: NoiseModel {
                    keypoint_sigma,
                    detection_dropout: dropout,
                    false_positive_rate,
                    embedding_noise_sigma: embedding_sigma,
                    bbox_jitter,
                },
            };
            pipeline::cmd_synth(&args, &pitch, summary)
        }
    }
}
