//! Temporal alarm state machine: fire once `k` consecutive frames are
//! positive, latch, and re-arm after a run of negative frames.
//!
//! Alarm activation time (AATpI) is measured in video time — elapsed scene
//! frames over the scene frame rate — not wall-clock processing time. The
//! alarm frame counts inclusively, so the minimal `k`-frame scene yields
//! exactly `k / fps` seconds.

use crate::detector::FrameDetections;
use crate::error::{Error, Result};

/// Alarm parameters. `rearm_gap` is the number of consecutive negative
/// frames required to re-arm after an alarm; it defaults to `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlarmConfig {
    pub k: u32,
    pub score_min: f64,
    pub fps: f64,
    pub rearm_gap: u32,
}

impl Default for AlarmConfig {
    fn default() -> Self {
        Self { k: 5, score_min: 0.7, fps: 25.0, rearm_gap: 5 }
    }
}

impl AlarmConfig {
    /// Config with the given `k` and `rearm_gap = k`.
    pub fn with_k(k: u32) -> Self {
        Self { k, rearm_gap: k, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 1 {
            return Err(Error::InvalidConfig("k must be at least 1".into()));
        }
        if !self.fps.is_finite() || self.fps <= 0.0 {
            return Err(Error::InvalidConfig(format!("fps must be positive, got {}", self.fps)));
        }
        if !(0.0..=1.0).contains(&self.score_min) {
            return Err(Error::InvalidConfig(format!(
                "score_min must lie in [0, 1], got {}",
                self.score_min
            )));
        }
        Ok(())
    }
}

/// An alarm firing: the frame it fired on and the elapsed scene time.
#[derive(Debug, Clone, PartialEq)]
pub struct AlarmEvent {
    pub scene_id: String,
    pub frame: u64,
    pub aatpi_seconds: f64,
}

/// A contiguous frame interval evaluated as one alarm unit.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneSpec {
    pub id: String,
    pub start: u64,
    pub end: u64,
    pub fps: f64,
}

impl SceneSpec {
    pub fn new(id: impl Into<String>, start: u64, end: u64, fps: f64) -> Result<Self> {
        let scene = Self { id: id.into(), start, end, fps };
        scene.validate()?;
        Ok(scene)
    }

    pub fn validate(&self) -> Result<()> {
        if self.end < self.start {
            return Err(Error::InvalidConfig(format!(
                "scene {}: end ({}) must not precede start ({})",
                self.id, self.end, self.start
            )));
        }
        if !self.fps.is_finite() || self.fps <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "scene {}: fps must be positive, got {}",
                self.id, self.fps
            )));
        }
        Ok(())
    }

    /// Number of frames in the scene, inclusive of both ends.
    pub fn frame_count(&self) -> u64 {
        self.end - self.start + 1
    }

    pub fn contains(&self, frame: u64) -> bool {
        (self.start..=self.end).contains(&frame)
    }
}

/// True iff at least one detection carries the positive label with
/// `score >= score_min`.
pub fn frame_positive(d: &FrameDetections, score_min: f64, positive_label: &str) -> bool {
    d.detections
        .iter()
        .any(|det| det.label == positive_label && det.score >= score_min)
}

/// Elapsed scene time at the alarm frame: `(alarm - start + 1) / fps`.
pub fn aatpi(scene: &SceneSpec, alarm_frame: u64) -> Result<f64> {
    if !scene.contains(alarm_frame) {
        return Err(Error::FrameOutsideScene { scene: scene.id.clone(), frame: alarm_frame });
    }
    Ok((alarm_frame - scene.start + 1) as f64 / scene.fps)
}

/// The alarm state machine for one stream.
///
/// A run counter increments on positive frames and resets on negatives.
/// The first time the counter reaches `k` an alarm is emitted at that
/// frame and the machine latches; it re-arms only after `rearm_gap`
/// consecutive negative frames (a gap of 0 re-arms immediately). Frames
/// must be fed in strictly increasing order.
#[derive(Debug, Clone)]
pub struct AlarmMachine {
    k: u32,
    rearm_gap: u32,
    run: u32,
    quiet: u32,
    latched: bool,
    last_frame: Option<u64>,
}

impl AlarmMachine {
    pub fn new(k: u32, rearm_gap: u32) -> Result<Self> {
        if k < 1 {
            return Err(Error::InvalidConfig("k must be at least 1".into()));
        }
        Ok(Self { k, rearm_gap, run: 0, quiet: 0, latched: false, last_frame: None })
    }

    pub fn from_config(cfg: &AlarmConfig) -> Result<Self> {
        cfg.validate()?;
        Self::new(cfg.k, cfg.rearm_gap)
    }

    /// Feeds one frame; returns the alarm frame when the alarm fires.
    pub fn step(&mut self, positive: bool, frame: u64) -> Result<Option<u64>> {
        if let Some(previous) = self.last_frame {
            if frame <= previous {
                return Err(Error::OutOfOrderFrame { previous, current: frame });
            }
        }
        self.last_frame = Some(frame);

        if positive {
            self.run = self.run.saturating_add(1);
            self.quiet = 0;
            if !self.latched && self.run == self.k {
                self.latched = self.rearm_gap > 0;
                return Ok(Some(frame));
            }
        } else {
            self.run = 0;
            if self.latched {
                self.quiet += 1;
                if self.quiet >= self.rearm_gap {
                    self.latched = false;
                    self.quiet = 0;
                }
            }
        }
        Ok(None)
    }

    /// Returns the machine to its initial state for a fresh stream.
    pub fn reset(&mut self) {
        self.run = 0;
        self.quiet = 0;
        self.latched = false;
        self.last_frame = None;
    }
}

/// Per-scene outcome: whether the alarm fired, the first firing, and how
/// many frames were positive.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneResult {
    pub scene_id: String,
    pub detected: bool,
    pub event: Option<AlarmEvent>,
    pub positive_frames: usize,
}

/// Runs the alarm machine over one scene's positive/negative sequence.
///
/// `positives` must hold exactly one flag per scene frame, in order.
pub fn run_scene(scene: &SceneSpec, positives: &[bool], cfg: &AlarmConfig) -> Result<SceneResult> {
    scene.validate()?;
    cfg.validate()?;
    let expected = scene.frame_count();
    if positives.len() as u64 != expected {
        return Err(Error::LengthMismatch { expected: expected as usize, actual: positives.len() });
    }

    let mut machine = AlarmMachine::new(cfg.k, cfg.rearm_gap)?;
    let mut event = None;
    let mut positive_frames = 0usize;
    for (offset, &positive) in positives.iter().enumerate() {
        if positive {
            positive_frames += 1;
        }
        let frame = scene.start + offset as u64;
        if let Some(alarm_frame) = machine.step(positive, frame)? {
            if event.is_none() {
                event = Some(AlarmEvent {
                    scene_id: scene.id.clone(),
                    frame: alarm_frame,
                    aatpi_seconds: aatpi(scene, alarm_frame)?,
                });
            }
        }
    }
    Ok(SceneResult {
        scene_id: scene.id.clone(),
        detected: event.is_some(),
        event,
        positive_frames,
    })
}
