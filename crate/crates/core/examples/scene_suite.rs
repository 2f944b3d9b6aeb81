//! Scene-suite alarm evaluation: 30 scenes, 27 of which carry a long
//! enough positive run to fire the k=5 alarm.
//!
//! ```bash
//! cargo run --example scene_suite
//! ```

use std::collections::BTreeMap;

use vigil::alarm::{AlarmConfig, SceneSpec};
use vigil::detector::{Detection, FrameDetections};
use vigil::eval::scene_suite_eval;
use vigil::geometry::BoundingBox;

fn main() -> vigil::Result<()> {
    let mut scenes = Vec::new();
    let mut detections: BTreeMap<u64, FrameDetections> = BTreeMap::new();

    // 20-frame scenes spaced apart; scenes 7, 15 and 23 only manage a
    // 4-frame run, one short of the k=5 requirement
    for i in 0..30u64 {
        let start = i * 30;
        scenes.push(SceneSpec::new(format!("scene-{i:02}"), start, start + 19, 25.0)?);
        let run = if matches!(i, 7 | 15 | 23) { 4 } else { 5 + (i % 6) };
        for frame in start..start + run {
            let det = Detection::new(BoundingBox::new(90.0, 60.0, 50.0, 35.0)?, "pistol", 0.9)?;
            detections.insert(frame, FrameDetections { frame, detections: vec![det] });
        }
    }

    let cfg = AlarmConfig::default();
    let report = scene_suite_eval(&scenes, &detections, &cfg, "pistol")?;

    for result in &report.results {
        match &result.event {
            Some(event) => println!(
                "{}: alarm at frame {} after {:.3} s",
                result.scene_id, event.frame, event.aatpi_seconds
            ),
            None => println!("{}: no alarm (longest run too short)", result.scene_id),
        }
    }
    println!(
        "\ndetected {} of {} scenes, mean AATpI {:.3} s",
        report.detected,
        report.total,
        report.mean_aatpi.unwrap_or(f64::NAN)
    );
    Ok(())
}
