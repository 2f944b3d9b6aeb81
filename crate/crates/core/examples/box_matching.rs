//! Bounding-box basics: IoU, non-maximum suppression, and matching one
//! frame of detections against ground truth.
//!
//! ```bash
//! cargo run --example box_matching
//! ```

use vigil::detector::Detection;
use vigil::geometry::{iou, match_frame, nms, BoundingBox};

fn main() -> vigil::Result<()> {
    let a = BoundingBox::new(0.0, 0.0, 10.0, 10.0)?;
    let b = BoundingBox::new(5.0, 0.0, 10.0, 10.0)?;
    let c = BoundingBox::new(100.0, 100.0, 10.0, 10.0)?;
    println!("iou(a, a) = {:.4}", iou(&a, &a)?);
    println!("iou(a, b) = {:.4}  (half-shifted neighbor)", iou(&a, &b)?);
    println!("iou(a, c) = {:.4}  (disjoint)", iou(&a, &c)?);

    // three raw detections: two duplicates on the same object plus one far away
    let raw = vec![
        Detection::new(a, "pistol", 0.92)?,
        Detection::new(BoundingBox::new(1.0, 0.5, 10.0, 10.0)?, "pistol", 0.85)?,
        Detection::new(c, "pistol", 0.60)?,
    ];
    let kept = nms(&raw, 0.45)?;
    println!("\nnms at 0.45 keeps {} of {} detections:", kept.len(), raw.len());
    for d in &kept {
        println!("  ({}, {}) {}x{} score {:.2}", d.bbox.x, d.bbox.y, d.bbox.w, d.bbox.h, d.score);
    }

    // match the suppressed detections against two ground-truth boxes
    let truths = [a, BoundingBox::new(200.0, 200.0, 12.0, 12.0)?];
    let outcome = match_frame(&kept, &truths, 0.5)?;
    println!(
        "\nmatching: tp={} fp={} fn={}",
        outcome.true_positives(),
        outcome.false_positives(),
        outcome.false_negatives()
    );
    for (det_idx, truth_idx) in &outcome.assignments {
        println!("  detection {det_idx} -> truth {truth_idx}");
    }
    Ok(())
}
