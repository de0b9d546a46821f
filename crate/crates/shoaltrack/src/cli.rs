//! The `shoaltrack` command line: `track`, `evaluate`, `locomotion` and
//! `simulate`.
//!
//! Exit codes: 0 on success, 1 on bad input (flags, files, parameters), 2 on
//! internal failures.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use shoaltrack_core::locomotion::{direction_histogram, magnitude_histogram, sequence_directions, DirectionParams};
use shoaltrack_core::metrics::{compute_map, evaluate_tracking};
use shoaltrack_core::synth::{corrupt, generate, CorruptionModel};
use shoaltrack_core::{run_sequence, SequenceAnnotations, TrackerConfig, Variant};

use crate::config::{parse_simulation_config, SimulationConfig};
use crate::error::{IoError, Result};
use crate::histogram::{histogram_svg, write_histogram_csv};
use crate::mot::{parse_mot, write_mot, MotKind};
use crate::report::Report;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_INTERNAL: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "shoaltrack", version, about = "Fish tracking, evaluation and locomotion analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Link detections into identity tracks.
    Track(TrackArgs),
    /// Score tracks (and optionally detections) against ground truth.
    Evaluate(EvaluateArgs),
    /// Swimming-direction and speed histograms from a tracks file.
    Locomotion(LocomotionArgs),
    /// Generate a synthetic shoal and its corrupted detections.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TrackerKind {
    Bytetrack,
    Botsort,
}

#[derive(Debug, Args)]
struct TrackArgs {
    #[arg(long)]
    detections: PathBuf,
    #[arg(long, value_enum, default_value = "bytetrack")]
    tracker: TrackerKind,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    high_thresh: Option<f64>,
    #[arg(long)]
    low_thresh: Option<f64>,
    #[arg(long)]
    new_track_thresh: Option<f64>,
    #[arg(long)]
    match_thresh: Option<f64>,
    /// Frames a lost track is kept before removal.
    #[arg(long)]
    track_buffer: Option<u32>,
    /// Multiply IoU by detection score in the first association stage.
    #[arg(long)]
    fuse_score: Option<bool>,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[arg(long)]
    gt: PathBuf,
    #[arg(long)]
    tracks: PathBuf,
    /// Also report detection precision, recall and mAP.
    #[arg(long)]
    detections: Option<PathBuf>,
    /// IoU a match must exceed for MOTA and IDF1.
    #[arg(long, default_value_t = 0.5)]
    iou_gate: f64,
    /// Print JSON instead of a table; also selects JSON for `--out`.
    #[arg(long)]
    json_report: bool,
    /// Include per-threshold breakdowns.
    #[arg(long)]
    verbose: bool,
    /// Write the report to a file (CSV unless `--json-report`).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct LocomotionArgs {
    #[arg(long)]
    tracks: PathBuf,
    #[arg(long, default_value_t = 5)]
    min_track_len: usize,
    #[arg(long, default_value_t = 5)]
    window: usize,
    /// Displacements between window starts; defaults to the window, giving
    /// non-overlapping windows.
    #[arg(long)]
    window_stride: Option<usize>,
    #[arg(long, default_value_t = 18)]
    bins: usize,
    /// Direction histogram CSV.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Speed histogram CSV.
    #[arg(long)]
    magnitude_out: Option<PathBuf>,
    #[arg(long)]
    magnitude_svg: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    magnitude_bins: usize,
    /// Upper edge of the speed histogram in pixels/frame; defaults to the
    /// largest observed speed.
    #[arg(long)]
    max_magnitude: Option<f64>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out_gt: PathBuf,
    #[arg(long)]
    out_dets: PathBuf,
    /// Overrides `seed` from the config.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    fish_count: Option<u32>,
    #[arg(long)]
    frames: Option<u32>,
    /// Emit the ground truth as detections: no misses, jitter or false
    /// positives, all scores 1.
    #[arg(long)]
    clean: bool,
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code. Reports go to `out`, warnings and diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{}", e.render());
                return EXIT_OK;
            }
            let rendered = e.render().to_string();
            let first = rendered.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            let _ = writeln!(err, "shoaltrack: error: {first}");
            return EXIT_INPUT;
        }
    };
    let result = match cli.command {
        Command::Track(a) => track(a),
        Command::Evaluate(a) => evaluate(a, out),
        Command::Locomotion(a) => locomotion(a, err),
        Command::Simulate(a) => simulate(a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            let _ = writeln!(err, "shoaltrack: error: {msg}");
            if e.is_input_error() {
                EXIT_INPUT
            } else {
                EXIT_INTERNAL
            }
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| IoError::file(path, e))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| IoError::file(path, e))
}

fn read_mot(path: &Path, kind: MotKind) -> Result<SequenceAnnotations> {
    let text = read(path)?;
    parse_mot(&text, kind).map_err(|e| match e {
        IoError::Parse { .. } => IoError::Input(format!("{}: {e}", path.display())),
        e => e,
    })
}

fn normalize(p: &Path) -> PathBuf {
    std::fs::canonicalize(p).or_else(|_| std::path::absolute(p)).unwrap_or_else(|_| p.to_path_buf())
}

/// Fails when an output path repeats an input or another output.
fn ensure_distinct(inputs: &[&Path], outputs: &[&Path]) -> Result<()> {
    let mut seen: Vec<(PathBuf, &Path)> = inputs.iter().map(|p| (normalize(p), *p)).collect();
    for &o in outputs {
        let n = normalize(o);
        if let Some((_, other)) = seen.iter().find(|(s, _)| *s == n) {
            return Err(IoError::Input(format!("output {} must differ from {}", o.display(), other.display())));
        }
        seen.push((n, o));
    }
    Ok(())
}

fn track(a: TrackArgs) -> Result<()> {
    ensure_distinct(&[&a.detections], &[&a.out])?;
    let variant = match a.tracker {
        TrackerKind::Bytetrack => Variant::ByteTrack,
        TrackerKind::Botsort => Variant::BotSort,
    };
    let mut config = TrackerConfig::for_variant(variant);
    if let Some(v) = a.high_thresh {
        config.high_thresh = v;
    }
    if let Some(v) = a.low_thresh {
        config.low_thresh = v;
    }
    if let Some(v) = a.new_track_thresh {
        config.new_track_thresh = v;
    }
    if let Some(v) = a.match_thresh {
        config.match_thresh = v;
    }
    if let Some(v) = a.track_buffer {
        config.track_buffer = v;
    }
    if let Some(v) = a.fuse_score {
        config.fuse_score = v;
    }
    config.validate()?;
    let dets = read_mot(&a.detections, MotKind::Detections)?;
    let tracks = run_sequence(&dets, config).map_err(|e| match e {
        shoaltrack_core::Error::InvalidScore(_) => IoError::Input(format!("{}: {e}", a.detections.display())),
        e => e.into(),
    })?;
    write(&a.out, &write_mot(&tracks))
}

fn check_length(
    gt: &SequenceAnnotations,
    gt_path: &Path,
    other: &SequenceAnnotations,
    other_path: &Path,
) -> Result<()> {
    match (gt.last_frame(), other.last_frame()) {
        (Some(g), Some(o)) if o > g => Err(IoError::Input(format!(
            "sequence length mismatch: {} runs to frame {} but {} ends at frame {}",
            other_path.display(),
            o + 1,
            gt_path.display(),
            g + 1
        ))),
        _ => Ok(()),
    }
}

fn evaluate(a: EvaluateArgs, out: &mut dyn Write) -> Result<()> {
    if let Some(o) = &a.out {
        let mut inputs: Vec<&Path> = vec![&a.gt, &a.tracks];
        inputs.extend(a.detections.as_deref());
        ensure_distinct(&inputs, &[o])?;
    }
    if !(a.iou_gate.is_finite() && (0.0..1.0).contains(&a.iou_gate)) {
        return Err(IoError::Input(format!("--iou-gate {} outside [0, 1)", a.iou_gate)));
    }
    let gt = read_mot(&a.gt, MotKind::GroundTruth)?;
    let tracks = read_mot(&a.tracks, MotKind::Tracks)?;
    check_length(&gt, &a.gt, &tracks, &a.tracks)?;
    let dets = match &a.detections {
        Some(p) => {
            let d = read_mot(p, MotKind::Detections)?;
            check_length(&gt, &a.gt, &d, p)?;
            Some(d)
        }
        None => None,
    };
    let tracking =
        evaluate_tracking(&gt, &tracks, a.iou_gate).map_err(|e| IoError::Input(format!("{}: {e}", a.gt.display())))?;
    let mut report = Report::new();
    report.add_tracking(&tracking, a.verbose);
    if let Some(d) = &dets {
        report.add_detection(&compute_map(&gt, d), a.verbose);
    }
    let text = if a.json_report { report.to_json() } else { report.to_table() };
    out.write_all(text.as_bytes()).map_err(|e| IoError::file("<stdout>", e))?;
    if let Some(o) = &a.out {
        write(o, &if a.json_report { report.to_json() } else { report.to_csv() })?;
    }
    Ok(())
}

fn locomotion(a: LocomotionArgs, err: &mut dyn Write) -> Result<()> {
    let outputs: Vec<&Path> =
        [Some(a.out.as_path()), a.svg.as_deref(), a.magnitude_out.as_deref(), a.magnitude_svg.as_deref()]
            .into_iter()
            .flatten()
            .collect();
    ensure_distinct(&[&a.tracks], &outputs)?;
    let params =
        DirectionParams { min_len: a.min_track_len, window: a.window, stride: a.window_stride.unwrap_or(a.window) };
    params.validate()?;
    let tracks = read_mot(&a.tracks, MotKind::Tracks)?;
    let samples = sequence_directions(&tracks, &params);
    if samples.is_empty() {
        let _ = writeln!(
            err,
            "shoaltrack: warning: no track in {} yields a direction sample (min length {}, window {}); histograms are empty",
            a.tracks.display(),
            params.min_len,
            params.window
        );
    }
    let directions = direction_histogram(&samples, a.bins)?;
    write(&a.out, &write_histogram_csv(&directions))?;
    if let Some(p) = &a.svg {
        write(p, &histogram_svg(&directions, "Swimming direction", "angle (degrees, mirrored)"))?;
    }
    if a.magnitude_out.is_some() || a.magnitude_svg.is_some() {
        let max = match a.max_magnitude {
            Some(m) => m,
            None => samples.iter().map(|s| s.magnitude).fold(0.0, f64::max),
        };
        let max = if a.max_magnitude.is_none() && max <= 0.0 { 1.0 } else { max };
        let speeds = magnitude_histogram(&samples, a.magnitude_bins, max)?;
        if let Some(p) = &a.magnitude_out {
            write(p, &write_histogram_csv(&speeds))?;
        }
        if let Some(p) = &a.magnitude_svg {
            write(p, &histogram_svg(&speeds, "Swimming speed", "pixels per frame"))?;
        }
    }
    Ok(())
}

fn simulate(a: SimulateArgs) -> Result<()> {
    let mut inputs: Vec<&Path> = Vec::new();
    inputs.extend(a.config.as_deref());
    ensure_distinct(&inputs, &[&a.out_gt, &a.out_dets])?;
    let mut cfg = match &a.config {
        Some(p) => parse_simulation_config(&read(p)?).map_err(|e| IoError::Input(format!("{}: {e}", p.display())))?,
        None => SimulationConfig::default(),
    };
    if let Some(s) = a.seed {
        cfg.scenario.seed = s;
    }
    if let Some(n) = a.fish_count {
        cfg.scenario.fish_count = n;
    }
    if let Some(n) = a.frames {
        cfg.scenario.frames = n;
    }
    if a.clean {
        cfg.corruption = CorruptionModel::clean();
    }
    let gt = generate(&cfg.scenario)?;
    let dets = corrupt(&gt, &cfg.corruption, cfg.corruption_seed())?;
    write(&a.out_gt, &write_mot(&gt))?;
    write(&a.out_dets, &write_mot(&dets))
}
