//! Metrics engine: confusion counts, precision/recall/F1, image-level and
//! box-level video evaluation, and scene-suite aggregation.
//!
//! Internal values keep full precision; [`percent`] rounds half-up to two
//! decimals for display.

use std::collections::{BTreeMap, BTreeSet};

use crate::alarm::{frame_positive, run_scene, AlarmConfig, SceneResult, SceneSpec};
use crate::detector::{filter_by_threshold, FrameDetections, POSITIVE_LABEL};
use crate::error::{Error, Result};
use crate::geometry::{match_frame, nms, BoundingBox};
use crate::io::FrameAnnotations;

/// TP/FP/FN tallies; `true_negatives` only exists for image-level
/// classification (box-level video evaluation has no negative boxes).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionCounts {
    pub true_positives: u64,
    pub false_positives: u64,
    pub false_negatives: u64,
    pub true_negatives: Option<u64>,
}

impl ConfusionCounts {
    /// Box-level counts (no true negatives).
    pub fn detection(true_positives: u64, false_positives: u64, false_negatives: u64) -> Self {
        Self { true_positives, false_positives, false_negatives, true_negatives: None }
    }

    /// Image-level binary classification counts.
    pub fn classification(
        true_positives: u64,
        false_negatives: u64,
        true_negatives: u64,
        false_positives: u64,
    ) -> Self {
        Self {
            true_positives,
            false_positives,
            false_negatives,
            true_negatives: Some(true_negatives),
        }
    }
}

/// Precision, recall and F1 as ratios in `[0, 1]`, with the counts they
/// came from. `undefined` is set when any ratio had a zero denominator
/// (the ratio itself is reported as 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsReport {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub counts: ConfusionCounts,
    pub undefined: bool,
}

impl MetricsReport {
    pub fn precision_pct(&self) -> f64 {
        percent(self.precision)
    }

    pub fn recall_pct(&self) -> f64 {
        percent(self.recall)
    }

    pub fn f1_pct(&self) -> f64 {
        percent(self.f1)
    }
}

/// Ratio to percentage, rounded half-up to two decimals.
pub fn percent(ratio: f64) -> f64 {
    (ratio * 10_000.0).round() / 100.0
}

/// precision = tp/(tp+fp), recall = tp/(tp+fn), f1 their harmonic mean.
pub fn metrics_from_confusion(counts: &ConfusionCounts) -> MetricsReport {
    let tp = counts.true_positives as f64;
    let mut undefined = false;
    let mut ratio = |num: f64, den: f64| {
        if den > 0.0 {
            num / den
        } else {
            undefined = true;
            0.0
        }
    };
    let precision = ratio(tp, tp + counts.false_positives as f64);
    let recall = ratio(tp, tp + counts.false_negatives as f64);
    let f1 = ratio(2.0 * precision * recall, precision + recall);
    MetricsReport { precision, recall, f1, counts: *counts, undefined }
}

/// Binary image-level confusion from per-image calls and labels.
///
/// The id sets must coincide; mismatches are reported with the offending
/// ids. A call of `true` means "predicted positive".
pub fn image_level_eval(
    predictions: &BTreeMap<String, bool>,
    truths: &BTreeMap<String, bool>,
) -> Result<ConfusionCounts> {
    let pred_ids: BTreeSet<&String> = predictions.keys().collect();
    let truth_ids: BTreeSet<&String> = truths.keys().collect();
    if pred_ids != truth_ids {
        let unmatched: Vec<String> = pred_ids
            .symmetric_difference(&truth_ids)
            .map(|id| id.to_string())
            .collect();
        return Err(Error::InputMismatch(format!(
            "prediction and truth image ids differ: {}",
            unmatched.join(", ")
        )));
    }

    let mut counts = ConfusionCounts { true_negatives: Some(0), ..Default::default() };
    for (id, &predicted) in predictions {
        match (predicted, truths[id]) {
            (true, true) => counts.true_positives += 1,
            (true, false) => counts.false_positives += 1,
            (false, true) => counts.false_negatives += 1,
            (false, false) => *counts.true_negatives.as_mut().unwrap() += 1,
        }
    }
    Ok(counts)
}

/// Per-video box-level report in the layout of the evaluation table:
/// frame count, TP, FP, ground-truth positives, and derived metrics
/// (`fn = gt_p - tp`).
#[derive(Debug, Clone, PartialEq)]
pub struct VideoReport {
    pub video_id: String,
    pub frames: u64,
    pub true_positives: u64,
    pub false_positives: u64,
    pub gt_positives: u64,
    pub metrics: MetricsReport,
}

/// Options for [`video_box_eval`]. `nms_iou` applies NMS between the
/// threshold filter and matching when set; evaluation defaults leave it
/// off.
#[derive(Debug, Clone, PartialEq)]
pub struct VideoEvalOptions {
    pub score_min: f64,
    pub iou_min: f64,
    pub nms_iou: Option<f64>,
    pub positive_label: String,
}

impl Default for VideoEvalOptions {
    fn default() -> Self {
        Self {
            score_min: 0.7,
            iou_min: 0.5,
            nms_iou: None,
            positive_label: POSITIVE_LABEL.to_string(),
        }
    }
}

/// Frame-by-frame evaluation of a detection stream against ground truth.
///
/// Frames present on either side are evaluated; a frame missing from one
/// stream counts as empty there. Per frame: threshold filter on the
/// positive label, optional NMS, then greedy matching. Counts are summed
/// over frames and `frames` reports how many distinct frame indices were
/// seen.
pub fn video_box_eval(
    video_id: &str,
    detections: &BTreeMap<u64, FrameDetections>,
    truths: &BTreeMap<u64, FrameAnnotations>,
    opts: &VideoEvalOptions,
) -> Result<VideoReport> {
    let frame_ids: BTreeSet<u64> = detections.keys().chain(truths.keys()).copied().collect();

    let mut true_positives = 0u64;
    let mut false_positives = 0u64;
    let mut gt_positives = 0u64;
    let empty = FrameDetections::default();

    for &frame in &frame_ids {
        let frame_dets = detections.get(&frame).unwrap_or(&empty);
        let mut candidates: Vec<_> = filter_by_threshold(frame_dets, opts.score_min)?
            .detections
            .into_iter()
            .filter(|d| d.label == opts.positive_label)
            .collect();
        if let Some(threshold) = opts.nms_iou {
            candidates = nms(&candidates, threshold)?;
        }

        let truth_boxes: Vec<BoundingBox> = truths
            .get(&frame)
            .map(|ann| {
                ann.boxes
                    .iter()
                    .filter(|b| b.label == opts.positive_label)
                    .map(|b| b.bbox)
                    .collect()
            })
            .unwrap_or_default();

        let outcome = match_frame(&candidates, &truth_boxes, opts.iou_min)?;
        true_positives += outcome.true_positives() as u64;
        false_positives += outcome.false_positives() as u64;
        gt_positives += truth_boxes.len() as u64;
    }

    let counts =
        ConfusionCounts::detection(true_positives, false_positives, gt_positives - true_positives);
    Ok(VideoReport {
        video_id: video_id.to_string(),
        frames: frame_ids.len() as u64,
        true_positives,
        false_positives,
        gt_positives,
        metrics: metrics_from_confusion(&counts),
    })
}

/// Aggregate outcome of running the alarm over a list of scenes.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneSuiteReport {
    pub results: Vec<SceneResult>,
    pub detected: usize,
    pub total: usize,
    /// Mean AATpI over detected scenes; `None` when nothing fired.
    pub mean_aatpi: Option<f64>,
}

/// Runs the alarm machine over every scene of a detection stream.
///
/// Scenes must not overlap. Frames absent from the stream count as
/// negative.
pub fn scene_suite_eval(
    scenes: &[SceneSpec],
    detections: &BTreeMap<u64, FrameDetections>,
    cfg: &AlarmConfig,
    positive_label: &str,
) -> Result<SceneSuiteReport> {
    cfg.validate()?;
    for scene in scenes {
        scene.validate()?;
    }
    let mut by_start: Vec<&SceneSpec> = scenes.iter().collect();
    by_start.sort_by_key(|s| s.start);
    for pair in by_start.windows(2) {
        if pair[1].start <= pair[0].end {
            return Err(Error::OverlappingScenes(pair[0].id.clone(), pair[1].id.clone()));
        }
    }

    let mut results = Vec::with_capacity(scenes.len());
    for scene in scenes {
        let positives: Vec<bool> = (scene.start..=scene.end)
            .map(|frame| {
                detections
                    .get(&frame)
                    .is_some_and(|d| frame_positive(d, cfg.score_min, positive_label))
            })
            .collect();
        results.push(run_scene(scene, &positives, cfg)?);
    }

    let detected = results.iter().filter(|r| r.detected).count();
    let mean_aatpi = if detected > 0 {
        let sum: f64 = results
            .iter()
            .filter_map(|r| r.event.as_ref().map(|e| e.aatpi_seconds))
            .sum();
        Some(sum / detected as f64)
    } else {
        None
    };
    Ok(SceneSuiteReport { results, detected, total: scenes.len(), mean_aatpi })
}
