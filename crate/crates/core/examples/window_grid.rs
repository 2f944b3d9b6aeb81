//! Sliding-window scan: generate the window grid for a frame and run a
//! ground-truth-oracle classifier over it.
//!
//! ```bash
//! cargo run --example window_grid
//! ```

use std::collections::BTreeMap;

use vigil::geometry::BoundingBox;
use vigil::io::{AnnotatedBox, FrameAnnotations};
use vigil::sliding_window::{
    sliding_window_detect, window_grid, OverlapOracleClassifier, WindowGridSpec,
};

fn main() -> vigil::Result<()> {
    let spec = WindowGridSpec::for_frame(640, 360);
    let grid = window_grid(&spec)?;
    println!(
        "{}x{} frame, {}x{} windows, {}x{} stride -> {} windows",
        spec.frame_w, spec.frame_h, spec.win_w, spec.win_h, spec.stride_x, spec.stride_y,
        grid.len()
    );
    println!("first window: ({}, {})", grid[0].x, grid[0].y);
    println!("last window:  ({}, {})", grid[44].x, grid[44].y);

    // one pistol sitting on the window at (120, 120); the oracle classifier
    // answers positive wherever window-vs-truth IoU exceeds 0.5
    let truth = FrameAnnotations {
        frame: 0,
        boxes: vec![AnnotatedBox {
            bbox: BoundingBox::new(130.0, 115.0, 150.0, 120.0)?,
            label: "pistol".to_string(),
        }],
    };
    let truths: BTreeMap<u64, FrameAnnotations> = [(0, truth)].into_iter().collect();
    let classifier = OverlapOracleClassifier::new(truths, 0.5, "pistol")?;

    let detections = sliding_window_detect(0, &classifier, &[spec], "pistol", 0.5, 0.3)?;
    println!("\nscan of frame 0 found {} detection(s):", detections.detections.len());
    for d in &detections.detections {
        println!(
            "  window ({}, {}) {}x{} score {:.3}",
            d.bbox.x, d.bbox.y, d.bbox.w, d.bbox.h, d.score
        );
    }
    Ok(())
}
