//! Detection-alarm engine and evaluation harness for object detection in
//! video streams.
//!
//! The crate covers the full desk-scale pipeline around a pluggable
//! detector: bounding-box matching, detection metrics, a sliding-window
//! scan engine, a consecutive-frame alarm state machine with activation
//! timing (AATpI), deterministic synthetic detector backends, and the file
//! formats that tie them together. Real neural-network inference stays
//! behind the [`detector::DetectorBackend`] and
//! [`sliding_window::WindowClassifier`] contracts.
//!
//! # Examples
//!
//! Each major capability has a runnable example:
//!
//! ```bash
//! cargo run --example box_matching          # IoU, NMS, per-frame matching
//! cargo run --example window_grid           # sliding-window scan of a frame
//! cargo run --example alarm_stream          # alarm machine over a stream
//! cargo run --example synthetic_detections  # seeded noisy-oracle backend
//! cargo run --example video_evaluation      # frame-by-frame video metrics
//! cargo run --example scene_suite           # alarm over a 30-scene suite
//! ```
//!
//! The `vigil` binary exposes the same pipeline as subcommands
//! (`evaluate`, `alarm`, `simulate`, `windows`, `bench`); see the crate
//! README.
//!
//! # Library sketch
//!
//! ```
//! use std::collections::BTreeMap;
//! use vigil::alarm::{AlarmConfig, SceneSpec};
//! use vigil::detector::{noisy_oracle_detect, OracleNoiseParams};
//! use vigil::eval::{scene_suite_eval, video_box_eval, VideoEvalOptions};
//! use vigil::geometry::BoundingBox;
//! use vigil::io::{AnnotatedBox, FrameAnnotations};
//!
//! // ground truth: one pistol box on frames 0..40
//! let truths: BTreeMap<u64, FrameAnnotations> = (0..40u64)
//!     .map(|frame| {
//!         let bbox = BoundingBox::new(100.0, 80.0, 60.0, 40.0).unwrap();
//!         let boxes = vec![AnnotatedBox { bbox, label: "pistol".into() }];
//!         (frame, FrameAnnotations { frame, boxes })
//!     })
//!     .collect();
//!
//! // a deterministic synthetic detector stream derived from the truth
//! let params = OracleNoiseParams { seed: 7, ..Default::default() };
//! let detections = truths
//!     .values()
//!     .map(|ann| (ann.frame, noisy_oracle_detect(ann, &params, 640.0, 360.0).unwrap()))
//!     .collect();
//!
//! let report = video_box_eval("demo", &detections, &truths, &VideoEvalOptions::default()).unwrap();
//! assert_eq!(report.metrics.recall, 1.0);
//!
//! let scenes = vec![SceneSpec::new("scene-1", 0, 39, 25.0).unwrap()];
//! let suite = scene_suite_eval(&scenes, &detections, &AlarmConfig::default(), "pistol").unwrap();
//! assert_eq!(suite.detected, 1);
//! ```

pub mod alarm;
pub mod cli;
pub mod detector;
mod error;
pub mod eval;
pub mod geometry;
pub mod io;
mod rng;
pub mod sliding_window;

pub use error::{Error, Result};
