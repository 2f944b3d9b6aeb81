//! Exhaustive sliding-window detection: grid generation over a frame and
//! per-window classification aggregated into frame detections.

use std::collections::BTreeMap;

use crate::detector::{Detection, FrameDetections};
use crate::error::{Error, Result};
use crate::geometry::{iou_valid, nms, BoundingBox};
use crate::io::FrameAnnotations;

/// Window grid geometry. Defaults scan a frame with 160x120 windows at a
/// 60x60 stride; with `clamp_edges` a final column/row flush with the frame
/// edge is appended whenever the stride overshoots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowGridSpec {
    pub frame_w: u32,
    pub frame_h: u32,
    pub win_w: u32,
    pub win_h: u32,
    pub stride_x: u32,
    pub stride_y: u32,
    pub clamp_edges: bool,
}

impl WindowGridSpec {
    /// Default window and stride for the given frame size.
    pub fn for_frame(frame_w: u32, frame_h: u32) -> Self {
        Self {
            frame_w,
            frame_h,
            win_w: 160,
            win_h: 120,
            stride_x: 60,
            stride_y: 60,
            clamp_edges: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.win_w == 0 || self.win_h == 0 {
            return Err(Error::InvalidConfig("window sides must be positive".into()));
        }
        if self.stride_x == 0 || self.stride_y == 0 {
            return Err(Error::InvalidConfig("strides must be positive".into()));
        }
        if self.win_w > self.frame_w || self.win_h > self.frame_h {
            return Err(Error::InvalidConfig(format!(
                "window {}x{} does not fit in frame {}x{}",
                self.win_w, self.win_h, self.frame_w, self.frame_h
            )));
        }
        Ok(())
    }
}

/// All window positions for a grid spec, row-major.
pub fn window_grid(spec: &WindowGridSpec) -> Result<Vec<BoundingBox>> {
    spec.validate()?;
    let xs = axis_positions(spec.frame_w, spec.win_w, spec.stride_x, spec.clamp_edges);
    let ys = axis_positions(spec.frame_h, spec.win_h, spec.stride_y, spec.clamp_edges);
    let mut windows = Vec::with_capacity(xs.len() * ys.len());
    for &y in &ys {
        for &x in &xs {
            windows.push(BoundingBox {
                x: x as f64,
                y: y as f64,
                w: spec.win_w as f64,
                h: spec.win_h as f64,
            });
        }
    }
    Ok(windows)
}

fn axis_positions(frame: u32, win: u32, stride: u32, clamp: bool) -> Vec<u32> {
    let last = frame - win; // win <= frame checked by the caller
    let mut positions: Vec<u32> = (0..=last).step_by(stride as usize).collect();
    if clamp && !last.is_multiple_of(stride) {
        positions.push(last);
    }
    positions
}

/// One window's classification.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowClassification {
    pub window: BoundingBox,
    pub label: String,
    pub score: f64,
}

/// Per-window classifier contract. Implementations own any pixel access;
/// the scan engine only sees labels and scores.
pub trait WindowClassifier {
    fn classify(&self, frame_id: u64, window: &BoundingBox) -> Result<WindowClassification>;
}

/// Test and demo classifier that consults ground truth: a window is
/// positive when its IoU with some same-labeled truth box exceeds
/// `iou_min`; the score is the best overlap (or its complement for
/// background windows).
#[derive(Debug, Clone)]
pub struct OverlapOracleClassifier {
    truths: BTreeMap<u64, FrameAnnotations>,
    iou_min: f64,
    positive_label: String,
}

impl OverlapOracleClassifier {
    pub fn new(
        truths: BTreeMap<u64, FrameAnnotations>,
        iou_min: f64,
        positive_label: impl Into<String>,
    ) -> Result<Self> {
        if !(0.0..1.0).contains(&iou_min) {
            return Err(Error::InvalidConfig(format!("iou_min must lie in [0, 1), got {iou_min}")));
        }
        Ok(Self { truths, iou_min, positive_label: positive_label.into() })
    }
}

impl WindowClassifier for OverlapOracleClassifier {
    fn classify(&self, frame_id: u64, window: &BoundingBox) -> Result<WindowClassification> {
        let best = self
            .truths
            .get(&frame_id)
            .map(|ann| {
                ann.boxes
                    .iter()
                    .filter(|b| b.label == self.positive_label)
                    .map(|b| iou_valid(window, &b.bbox))
                    .fold(0.0f64, f64::max)
            })
            .unwrap_or(0.0);
        let (label, score) = if best > self.iou_min {
            (self.positive_label.clone(), best)
        } else {
            ("background".to_string(), 1.0 - best)
        };
        Ok(WindowClassification { window: *window, label, score })
    }
}

/// Scans every window of every grid, keeps positive classifications at or
/// above `score_min`, and reduces them with NMS at `nms_iou`.
///
/// The detected box is the window itself. Candidates are sorted by
/// descending score (position breaking ties) before NMS, so the result
/// does not depend on window enumeration order. Classifier failures are
/// reported with the offending window's coordinates.
pub fn sliding_window_detect(
    frame_id: u64,
    classifier: &dyn WindowClassifier,
    specs: &[WindowGridSpec],
    positive_label: &str,
    score_min: f64,
    nms_iou: f64,
) -> Result<FrameDetections> {
    if !(0.0..=1.0).contains(&score_min) {
        return Err(Error::InvalidConfig(format!(
            "score_min must lie in [0, 1], got {score_min}"
        )));
    }

    let mut positives: Vec<Detection> = Vec::new();
    for spec in specs {
        for window in window_grid(spec)? {
            let classification =
                classifier.classify(frame_id, &window).map_err(|e| Error::Classifier {
                    x: window.x,
                    y: window.y,
                    w: window.w,
                    h: window.h,
                    message: e.to_string(),
                })?;
            if classification.label == positive_label && classification.score >= score_min {
                positives.push(Detection {
                    bbox: window,
                    label: classification.label,
                    score: classification.score,
                });
            }
        }
    }

    // normalize aggregation order so results are enumeration-independent
    positives.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.bbox.y.partial_cmp(&b.bbox.y).unwrap_or(std::cmp::Ordering::Equal))
            .then(a.bbox.x.partial_cmp(&b.bbox.x).unwrap_or(std::cmp::Ordering::Equal))
    });
    Ok(FrameDetections { frame: frame_id, detections: nms(&positives, nms_iou)? })
}
