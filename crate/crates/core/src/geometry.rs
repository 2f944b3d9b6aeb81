//! Bounding-box arithmetic: IoU, non-maximum suppression, and per-frame
//! detection-to-ground-truth matching.
//!
//! Boxes follow the continuous-rectangle model: real-valued pixel
//! coordinates, areas computed as width times height, no pixel-grid `+1`
//! correction. All operations here are pure functions of their inputs.

use crate::detector::Detection;
use crate::error::{Error, Result};

/// Axis-aligned rectangle in pixel coordinates.
///
/// `(x, y)` is the top-left corner; `y` grows downward. Width and height
/// must be strictly positive and all coordinates finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl BoundingBox {
    /// Validating constructor.
    pub fn new(x: f64, y: f64, w: f64, h: f64) -> Result<Self> {
        let b = Self { x, y, w, h };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x.is_finite() && self.y.is_finite() && self.w.is_finite() && self.h.is_finite()) {
            return Err(Error::InvalidGeometry(format!(
                "coordinates must be finite, got ({}, {}, {}, {})",
                self.x, self.y, self.w, self.h
            )));
        }
        if self.w <= 0.0 || self.h <= 0.0 {
            return Err(Error::InvalidGeometry(format!(
                "width and height must be positive, got w={} h={}",
                self.w, self.h
            )));
        }
        Ok(())
    }

    /// Right edge, `x + w`.
    pub fn right(&self) -> f64 {
        self.x + self.w
    }

    /// Bottom edge, `y + h`.
    pub fn bottom(&self) -> f64 {
        self.y + self.h
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }
}

/// Intersection over union of two boxes, in `[0, 1]`; 0 when disjoint.
///
/// Errors on degenerate boxes (`w <= 0` or `h <= 0`).
pub fn iou(a: &BoundingBox, b: &BoundingBox) -> Result<f64> {
    a.validate()?;
    b.validate()?;
    Ok(iou_valid(a, b))
}

/// IoU for boxes already known to be valid.
///
/// Areas are derived from the same edge arithmetic as the intersection so
/// that identical boxes give exactly 1.0.
pub(crate) fn iou_valid(a: &BoundingBox, b: &BoundingBox) -> f64 {
    let ix = a.x.max(b.x);
    let iy = a.y.max(b.y);
    let ir = a.right().min(b.right());
    let ib = a.bottom().min(b.bottom());
    if ir <= ix || ib <= iy {
        return 0.0;
    }
    let inter = (ir - ix) * (ib - iy);
    let area_a = (a.right() - a.x) * (a.bottom() - a.y);
    let area_b = (b.right() - b.x) * (b.bottom() - b.y);
    // clamp guards against rounding pushing the ratio one ulp past 1
    (inter / (area_a + area_b - inter)).clamp(0.0, 1.0)
}

/// Greedy non-maximum suppression.
///
/// Detections are visited in descending score order (ties keep input
/// order); a candidate is kept iff its IoU with every already-kept box is
/// at most `iou_threshold`. The result is in descending score order.
pub fn nms(detections: &[Detection], iou_threshold: f64) -> Result<Vec<Detection>> {
    if !(0.0..=1.0).contains(&iou_threshold) {
        return Err(Error::InvalidConfig(format!(
            "nms iou threshold must lie in [0, 1], got {iou_threshold}"
        )));
    }
    for d in detections {
        d.bbox.validate()?;
    }
    let mut kept: Vec<Detection> = Vec::new();
    for idx in by_descending_score(detections) {
        let cand = &detections[idx];
        if kept.iter().all(|k| iou_valid(&k.bbox, &cand.bbox) <= iou_threshold) {
            kept.push(cand.clone());
        }
    }
    Ok(kept)
}

/// One-to-one assignment of detections to ground-truth boxes for a frame.
///
/// `assignments` holds `(detection index, ground-truth index)` pairs in the
/// order detections were matched; each index appears at most once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchOutcome {
    pub assignments: Vec<(usize, usize)>,
    num_detections: usize,
    num_truths: usize,
}

impl MatchOutcome {
    pub fn true_positives(&self) -> usize {
        self.assignments.len()
    }

    pub fn false_positives(&self) -> usize {
        self.num_detections - self.assignments.len()
    }

    pub fn false_negatives(&self) -> usize {
        self.num_truths - self.assignments.len()
    }
}

/// Greedy matching of detections against ground truth.
///
/// Detections are visited in descending score order (ties keep input
/// order). Each is assigned to the unmatched truth box with the highest
/// IoU, provided that IoU is strictly greater than `iou_min`; IoU ties go
/// to the lowest truth index. Unmatched detections count as false
/// positives, unmatched truths as false negatives.
pub fn match_frame(
    detections: &[Detection],
    truths: &[BoundingBox],
    iou_min: f64,
) -> Result<MatchOutcome> {
    if !(0.0..1.0).contains(&iou_min) {
        return Err(Error::InvalidConfig(format!(
            "iou_min must lie in [0, 1), got {iou_min}"
        )));
    }
    for d in detections {
        d.bbox.validate()?;
    }
    for t in truths {
        t.validate()?;
    }

    let mut taken = vec![false; truths.len()];
    let mut assignments = Vec::new();
    for det_idx in by_descending_score(detections) {
        let mut best: Option<(usize, f64)> = None;
        for (truth_idx, truth) in truths.iter().enumerate() {
            if taken[truth_idx] {
                continue;
            }
            let overlap = iou_valid(&detections[det_idx].bbox, truth);
            if overlap <= iou_min {
                continue;
            }
            let better = match best {
                None => true,
                Some((_, best_overlap)) => overlap > best_overlap,
            };
            if better {
                best = Some((truth_idx, overlap));
            }
        }
        if let Some((truth_idx, _)) = best {
            taken[truth_idx] = true;
            assignments.push((det_idx, truth_idx));
        }
    }
    Ok(MatchOutcome {
        assignments,
        num_detections: detections.len(),
        num_truths: truths.len(),
    })
}

/// Indices sorted by descending score; stable, so score ties keep input order.
fn by_descending_score(detections: &[Detection]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..detections.len()).collect();
    order.sort_by(|&a, &b| {
        detections[b]
            .score
            .partial_cmp(&detections[a].score)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    order
}
