//! Command-line surface tying the pipeline together: `evaluate`, `alarm`,
//! `simulate`, `windows`, and `bench`.
//!
//! Exit codes: 0 success, 1 the command ran but could not persist its
//! output, 2 configuration or parse error. Output is line-oriented and
//! stable so golden-file tests can pin it; every command is deterministic
//! given its flags, inputs, and seed.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::alarm::{frame_positive, AlarmConfig, AlarmMachine};
use crate::detector::{noisy_oracle_detect, FrameDetections, OracleNoiseParams, POSITIVE_LABEL};
use crate::error::Result;
use crate::eval::{percent, scene_suite_eval, video_box_eval, VideoEvalOptions};
use crate::geometry::{match_frame, BoundingBox};
use crate::io::{self, AnnotatedBox, FrameAnnotations};
use crate::sliding_window::{window_grid, WindowGridSpec};

/// How a command ended, ordered by severity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CommandOutcome {
    Success,
    /// The evaluation ran but an output could not be written.
    Degraded,
    /// Bad flags, unreadable or malformed inputs.
    ConfigError,
}

impl CommandOutcome {
    pub fn exit_code(self) -> u8 {
        match self {
            CommandOutcome::Success => 0,
            CommandOutcome::Degraded => 1,
            CommandOutcome::ConfigError => 2,
        }
    }

    /// The more severe of two outcomes.
    pub fn merge(self, other: Self) -> Self {
        self.max(other)
    }
}

#[derive(Parser)]
#[command(name = "vigil", version, about = "Detection-alarm engine and evaluation harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a detections file against ground truth, frame by frame
    Evaluate(EvaluateArgs),
    /// Run the consecutive-frame alarm over scenes and report activation times
    Alarm(AlarmArgs),
    /// Synthesize a detections file from ground truth with a seeded noise model
    Simulate(SimulateArgs),
    /// Print the sliding-window grid for a frame geometry
    Windows(WindowsArgs),
    /// Measure evaluation-pipeline throughput
    Bench(BenchArgs),
}

#[derive(Args)]
pub struct EvaluateArgs {
    /// Detections file (one frame per line)
    pub detections: PathBuf,
    /// Ground truth: native line format, a VOC XML file, or a VOC directory
    pub truth: PathBuf,
    /// Minimum confidence for a detection to count
    #[arg(long, default_value_t = 0.7)]
    pub threshold: f64,
    /// Minimum IoU for a detection to match a ground-truth box
    #[arg(long, default_value_t = 0.5)]
    pub iou_min: f64,
    /// Apply NMS at this IoU before matching (off by default)
    #[arg(long, value_name = "IOU")]
    pub nms: Option<f64>,
    /// Positive class label
    #[arg(long, default_value = POSITIVE_LABEL)]
    pub label: String,
    /// Video id shown in the report; defaults to the detections file stem
    #[arg(long)]
    pub video_id: Option<String>,
    /// Also write a machine-readable JSON report
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args)]
pub struct AlarmArgs {
    /// Detections file (one frame per line)
    pub detections: PathBuf,
    /// Scene-spec JSON file
    pub scenes: PathBuf,
    /// Minimum confidence for a frame to count as positive
    #[arg(long, default_value_t = 0.7)]
    pub threshold: f64,
    /// Consecutive positive frames required to fire
    #[arg(long, default_value_t = 5)]
    pub k: u32,
    /// Negative frames required to re-arm (defaults to k)
    #[arg(long)]
    pub rearm_gap: Option<u32>,
    /// Frame rate for scenes that do not state one
    #[arg(long, default_value_t = 25.0)]
    pub fps: f64,
    /// Positive class label
    #[arg(long, default_value = POSITIVE_LABEL)]
    pub label: String,
    /// Also write a machine-readable JSON report
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args)]
pub struct SimulateArgs {
    /// Ground truth: native line format, a VOC XML file, or a VOC directory
    pub truth: PathBuf,
    /// Output detections file
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Probability of dropping a true box
    #[arg(long, default_value_t = 0.0)]
    pub miss_prob: f64,
    /// Mean spurious boxes per frame
    #[arg(long, default_value_t = 0.0)]
    pub fp_rate: f64,
    /// Gaussian sigma, in pixels, applied to each box edge
    #[arg(long, default_value_t = 0.0)]
    pub jitter: f64,
    /// Confidence range for surviving true boxes, as LO:HI
    #[arg(long, default_value = "0.7:1", value_parser = parse_score_range)]
    pub tp_score: (f64, f64),
    /// Confidence range for spurious boxes, as LO:HI
    #[arg(long, default_value = "0.5:0.9", value_parser = parse_score_range)]
    pub fp_score: (f64, f64),
    /// Frame bounds for spurious boxes and clipping, as WxH
    #[arg(long, default_value = "640x360", value_parser = parse_dims)]
    pub frame: (u32, u32),
}

#[derive(Args)]
pub struct WindowsArgs {
    /// Frame size, as WxH
    #[arg(long, default_value = "640x360", value_parser = parse_dims)]
    pub frame: (u32, u32),
    /// Window size, as WxH
    #[arg(long, default_value = "160x120", value_parser = parse_dims)]
    pub window: (u32, u32),
    /// Scan stride, as XxY
    #[arg(long, default_value = "60x60", value_parser = parse_dims)]
    pub stride: (u32, u32),
    /// Do not append edge windows when the stride overshoots
    #[arg(long)]
    pub no_clamp: bool,
}

#[derive(Args)]
pub struct BenchArgs {
    /// Replay this detections file; omit to synthesize a stream
    #[arg(long)]
    pub detections: Option<PathBuf>,
    /// Ground truth to match against (requires --detections)
    #[arg(long, requires = "detections")]
    pub truth: Option<PathBuf>,
    /// Synthetic stream length when no files are given
    #[arg(long, default_value_t = 10_000)]
    pub frames: u64,
    #[arg(long, default_value_t = 0.7)]
    pub threshold: f64,
    #[arg(long, default_value_t = 0.5)]
    pub iou_min: f64,
    #[arg(long, default_value_t = 5)]
    pub k: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Parses command-line arguments and dispatches; the process exit code
/// follows the [`CommandOutcome`] contract.
pub fn run() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Alarm(args) => cmd_alarm(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Windows(args) => cmd_windows(args),
        Command::Bench(args) => cmd_bench(args),
    };
    ExitCode::from(outcome.exit_code())
}

fn report_config_error(result: Result<CommandOutcome>) -> CommandOutcome {
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        CommandOutcome::ConfigError
    })
}

pub fn cmd_evaluate(args: &EvaluateArgs) -> CommandOutcome {
    report_config_error(evaluate_inner(args))
}

fn evaluate_inner(args: &EvaluateArgs) -> Result<CommandOutcome> {
    let detections = io::parse_detections(&args.detections)?;
    let truths = io::parse_ground_truth(&args.truth)?;
    let opts = VideoEvalOptions {
        score_min: args.threshold,
        iou_min: args.iou_min,
        nms_iou: args.nms,
        positive_label: args.label.clone(),
    };
    let video_id = args
        .video_id
        .clone()
        .unwrap_or_else(|| file_stem(&args.detections));
    let report = video_box_eval(&video_id, &detections, &truths, &opts)?;

    println!("video\tframes\ttp\tgt_p\tfp\tprecision\trecall\tf1");
    println!(
        "{}\t{}\t{}\t{}\t{}\t{:.2}\t{:.2}\t{:.2}",
        report.video_id,
        report.frames,
        report.true_positives,
        report.gt_positives,
        report.false_positives,
        percent(report.metrics.precision),
        percent(report.metrics.recall),
        percent(report.metrics.f1),
    );

    let mut outcome = CommandOutcome::Success;
    if let Some(path) = &args.report {
        outcome = outcome.merge(write_output(path, &io::video_report_json(&report)));
    }
    Ok(outcome)
}

pub fn cmd_alarm(args: &AlarmArgs) -> CommandOutcome {
    report_config_error(alarm_inner(args))
}

fn alarm_inner(args: &AlarmArgs) -> Result<CommandOutcome> {
    let detections = io::parse_detections(&args.detections)?;
    let scenes = io::parse_scene_specs(&args.scenes, args.fps)?;
    let cfg = AlarmConfig {
        k: args.k,
        score_min: args.threshold,
        fps: args.fps,
        rearm_gap: args.rearm_gap.unwrap_or(args.k),
    };
    let report = scene_suite_eval(&scenes, &detections, &cfg, &args.label)?;

    for result in &report.results {
        if let Some(event) = &result.event {
            println!("{} {} {:.3}", event.scene_id, event.frame, event.aatpi_seconds);
        }
    }
    match report.mean_aatpi {
        Some(mean) => println!(
            "detected {} of {} scenes, mean AATpI {mean:.3} s",
            report.detected, report.total
        ),
        None => println!("detected 0 of {} scenes", report.total),
    }

    let mut outcome = CommandOutcome::Success;
    if let Some(path) = &args.report {
        outcome = outcome.merge(write_output(path, &io::suite_report_json(&report)));
    }
    Ok(outcome)
}

pub fn cmd_simulate(args: &SimulateArgs) -> CommandOutcome {
    report_config_error(simulate_inner(args))
}

fn simulate_inner(args: &SimulateArgs) -> Result<CommandOutcome> {
    let truths = io::parse_ground_truth(&args.truth)?;
    let params = OracleNoiseParams {
        miss_prob: args.miss_prob,
        fp_rate: args.fp_rate,
        jitter_sigma: args.jitter,
        tp_score_range: args.tp_score,
        fp_score_range: args.fp_score,
        seed: args.seed,
    };
    params.validate()?;
    let (frame_w, frame_h) = (f64::from(args.frame.0), f64::from(args.frame.1));

    let mut stream = BTreeMap::new();
    for ann in truths.values() {
        stream.insert(ann.frame, noisy_oracle_detect(ann, &params, frame_w, frame_h)?);
    }
    let outcome = write_output(&args.out, &io::write_detections(&stream));
    if outcome == CommandOutcome::Success {
        println!("wrote {} frames to {}", stream.len(), args.out.display());
    }
    Ok(outcome)
}

pub fn cmd_windows(args: &WindowsArgs) -> CommandOutcome {
    report_config_error(windows_inner(args))
}

fn windows_inner(args: &WindowsArgs) -> Result<CommandOutcome> {
    let spec = WindowGridSpec {
        frame_w: args.frame.0,
        frame_h: args.frame.1,
        win_w: args.window.0,
        win_h: args.window.1,
        stride_x: args.stride.0,
        stride_y: args.stride.1,
        clamp_edges: !args.no_clamp,
    };
    for window in window_grid(&spec)? {
        println!("{} {} {} {}", window.x, window.y, window.w, window.h);
    }
    Ok(CommandOutcome::Success)
}

pub fn cmd_bench(args: &BenchArgs) -> CommandOutcome {
    report_config_error(bench_inner(args))
}

fn bench_inner(args: &BenchArgs) -> Result<CommandOutcome> {
    let (detections_text, truths) = match &args.detections {
        Some(path) => {
            let text = fs::read_to_string(path)?;
            let truths = match &args.truth {
                Some(truth_path) => io::parse_ground_truth(truth_path)?,
                None => BTreeMap::new(),
            };
            (text, truths)
        }
        None => synthetic_stream(args.frames, args.seed)?,
    };

    // timed section: parse, threshold, match, alarm
    let started = Instant::now();
    let detections = io::parse_detections_str(&detections_text, "<bench>")?;
    let frame_ids: BTreeSet<u64> = detections.keys().chain(truths.keys()).copied().collect();
    let mut machine = AlarmMachine::new(args.k, args.k)?;
    let empty = FrameDetections::default();
    let (mut tp, mut fp, mut alarms) = (0u64, 0u64, 0u64);
    for &frame in &frame_ids {
        let frame_dets = detections.get(&frame).unwrap_or(&empty);
        let candidates: Vec<_> = frame_dets
            .detections
            .iter()
            .filter(|d| d.label == POSITIVE_LABEL && d.score >= args.threshold)
            .cloned()
            .collect();
        let truth_boxes: Vec<BoundingBox> = truths
            .get(&frame)
            .map(|ann| ann.boxes.iter().map(|b| b.bbox).collect())
            .unwrap_or_default();
        let outcome = match_frame(&candidates, &truth_boxes, args.iou_min)?;
        tp += outcome.true_positives() as u64;
        fp += outcome.false_positives() as u64;
        let positive = frame_positive(frame_dets, args.threshold, POSITIVE_LABEL);
        if machine.step(positive, frame)?.is_some() {
            alarms += 1;
        }
    }
    let elapsed = started.elapsed().as_secs_f64();

    let frames = frame_ids.len() as u64;
    println!("frames {frames}");
    if frames == 0 {
        println!("no frames processed");
        return Ok(CommandOutcome::Success);
    }
    println!("tp {tp}");
    println!("fp {fp}");
    println!("alarms {alarms}");
    println!("elapsed {elapsed:.3} s");
    println!("throughput {:.1} frames/s", frames as f64 / elapsed);
    println!("mean latency {:.4} ms", 1_000.0 * elapsed / frames as f64);
    Ok(CommandOutcome::Success)
}

/// Ground truth plus matching oracle detections for the synthetic bench
/// stream: one box orbiting the frame, detections serialized to the native
/// line format so parsing is part of the measured pipeline.
fn synthetic_stream(frames: u64, seed: u64) -> Result<(String, BTreeMap<u64, FrameAnnotations>)> {
    let mut truths = BTreeMap::new();
    for frame in 0..frames {
        let bbox = BoundingBox::new(
            (frame % 400) as f64,
            (frame % 200) as f64,
            48.0,
            36.0,
        )?;
        truths.insert(
            frame,
            FrameAnnotations {
                frame,
                boxes: vec![AnnotatedBox { bbox, label: POSITIVE_LABEL.to_string() }],
            },
        );
    }
    let params = OracleNoiseParams { seed, ..Default::default() };
    let mut stream = BTreeMap::new();
    for ann in truths.values() {
        stream.insert(ann.frame, noisy_oracle_detect(ann, &params, 640.0, 360.0)?);
    }
    Ok((io::write_detections(&stream), truths))
}

fn write_output(path: &Path, contents: &str) -> CommandOutcome {
    match fs::write(path, contents) {
        Ok(()) => CommandOutcome::Success,
        Err(e) => {
            eprintln!("error: could not write {}: {e}", path.display());
            CommandOutcome::Degraded
        }
    }
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn parse_dims(s: &str) -> std::result::Result<(u32, u32), String> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected WxH, got {s:?}"))?;
    let w = w.trim().parse().map_err(|_| format!("bad width in {s:?}"))?;
    let h = h.trim().parse().map_err(|_| format!("bad height in {s:?}"))?;
    Ok((w, h))
}

fn parse_score_range(s: &str) -> std::result::Result<(f64, f64), String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("expected LO:HI, got {s:?}"))?;
    let lo = lo.trim().parse().map_err(|_| format!("bad low bound in {s:?}"))?;
    let hi = hi.trim().parse().map_err(|_| format!("bad high bound in {s:?}"))?;
    Ok((lo, hi))
}
