//! The alarm state machine on a frame stream: fire after k consecutive
//! positives, latch, re-arm after a run of negatives.
//!
//! ```bash
//! cargo run --example alarm_stream
//! ```

use vigil::alarm::{aatpi, AlarmMachine, SceneSpec};

fn main() -> vigil::Result<()> {
    // '-' negative frame, 'P' positive frame
    let stream = "--PPPP-PPPPPPP--------PPPPP---";
    let positives: Vec<bool> = stream.chars().map(|c| c == 'P').collect();

    let scene = SceneSpec::new("demo", 0, positives.len() as u64 - 1, 25.0)?;
    let mut machine = AlarmMachine::new(5, 5)?;

    println!("stream: {stream}");
    println!("k = 5, re-arm gap = 5, fps = {}", scene.fps);
    for (frame, &positive) in positives.iter().enumerate() {
        if let Some(alarm_frame) = machine.step(positive, frame as u64)? {
            let seconds = aatpi(&scene, alarm_frame)?;
            println!("alarm at frame {alarm_frame:2} -> {seconds:.3} s into the scene");
        }
    }
    println!("(the first 4-frame run is too short; the 7-frame run fires once,");
    println!(" and the machine re-arms over the negative gap before the last run)");
    Ok(())
}
