//! Detector backends: the pluggable per-frame detection contract plus two
//! deterministic implementations, replay-from-file and a seeded noisy
//! oracle derived from ground truth.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::geometry::BoundingBox;
use crate::io::FrameAnnotations;
use crate::rng::FrameRng;

/// Class label treated as the positive class unless configured otherwise.
pub const POSITIVE_LABEL: &str = "pistol";

/// A classified box with a confidence score in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub bbox: BoundingBox,
    pub label: String,
    pub score: f64,
}

impl Detection {
    pub fn new(bbox: BoundingBox, label: impl Into<String>, score: f64) -> Result<Self> {
        let d = Self { bbox, label: label.into(), score };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        self.bbox.validate()?;
        if self.label.is_empty() {
            return Err(Error::InvalidConfig("detection label must be non-empty".into()));
        }
        if !(0.0..=1.0).contains(&self.score) {
            return Err(Error::InvalidConfig(format!(
                "detection score must lie in [0, 1], got {}",
                self.score
            )));
        }
        Ok(())
    }
}

/// All detections for one frame.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FrameDetections {
    pub frame: u64,
    pub detections: Vec<Detection>,
}

/// The detector contract: deterministic per-frame detections.
///
/// Implementations are immutable after construction, so `detect` is safe to
/// call concurrently for distinct or identical frame ids.
pub trait DetectorBackend {
    /// Detections for `frame_id`, or [`Error::MissingFrame`] if the backend
    /// has no such frame.
    fn detect(&self, frame_id: u64) -> Result<FrameDetections>;

    /// Sorted frame ids this backend can serve.
    fn frame_ids(&self) -> Vec<u64>;
}

/// Keeps exactly the detections with `score >= threshold`, preserving order.
pub fn filter_by_threshold(d: &FrameDetections, threshold: f64) -> Result<FrameDetections> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::InvalidConfig(format!(
            "score threshold must lie in [0, 1], got {threshold}"
        )));
    }
    Ok(FrameDetections {
        frame: d.frame,
        detections: d
            .detections
            .iter()
            .filter(|det| det.score >= threshold)
            .cloned()
            .collect(),
    })
}

/// Serves a previously recorded detection stream verbatim.
#[derive(Debug, Clone)]
pub struct ReplayBackend {
    frames: BTreeMap<u64, FrameDetections>,
}

impl ReplayBackend {
    pub fn new(frames: BTreeMap<u64, FrameDetections>) -> Self {
        Self { frames }
    }

    /// Loads a detections file in the native line-delimited format.
    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        Ok(Self::new(crate::io::parse_detections(path)?))
    }
}

impl DetectorBackend for ReplayBackend {
    fn detect(&self, frame_id: u64) -> Result<FrameDetections> {
        self.frames
            .get(&frame_id)
            .cloned()
            .ok_or(Error::MissingFrame(frame_id))
    }

    fn frame_ids(&self) -> Vec<u64> {
        self.frames.keys().copied().collect()
    }
}

/// Noise model for the ground-truth oracle backend.
///
/// * each truth box is dropped with probability `miss_prob`;
/// * surviving boxes get each edge perturbed by `Gaussian(0, jitter_sigma)`
///   pixels and a score drawn uniformly from `tp_score_range`;
/// * `Poisson(fp_rate)` spurious positive-class boxes per frame, placed
///   uniformly inside the frame with scores from `fp_score_range`.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleNoiseParams {
    pub miss_prob: f64,
    pub fp_rate: f64,
    pub jitter_sigma: f64,
    pub tp_score_range: (f64, f64),
    pub fp_score_range: (f64, f64),
    pub seed: u64,
}

impl Default for OracleNoiseParams {
    fn default() -> Self {
        Self {
            miss_prob: 0.0,
            fp_rate: 0.0,
            jitter_sigma: 0.0,
            tp_score_range: (0.7, 1.0),
            fp_score_range: (0.5, 0.9),
            seed: 0,
        }
    }
}

impl OracleNoiseParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.miss_prob) {
            return Err(Error::InvalidConfig(format!(
                "miss_prob must lie in [0, 1], got {}",
                self.miss_prob
            )));
        }
        if !self.fp_rate.is_finite() || self.fp_rate < 0.0 || self.fp_rate > 10_000.0 {
            return Err(Error::InvalidConfig(format!(
                "fp_rate must lie in [0, 10000], got {}",
                self.fp_rate
            )));
        }
        if !self.jitter_sigma.is_finite() || self.jitter_sigma < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "jitter_sigma must be non-negative, got {}",
                self.jitter_sigma
            )));
        }
        for (name, range) in [
            ("tp_score_range", self.tp_score_range),
            ("fp_score_range", self.fp_score_range),
        ] {
            if !(0.0..=1.0).contains(&range.0) || !(0.0..=1.0).contains(&range.1) || range.0 > range.1 {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be an ordered sub-interval of [0, 1], got ({}, {})",
                    range.0, range.1
                )));
            }
        }
        Ok(())
    }
}

/// Synthesizes detections for one annotated frame.
///
/// Randomness is counter-based: the stream depends only on `params.seed`
/// and `truths.frame`, so calls are reproducible in any order. With
/// `jitter_sigma == 0` surviving boxes are returned geometrically
/// unchanged; with jitter, boxes are clipped to the frame and dropped if
/// clipping leaves a side of 1 pixel or less.
pub fn noisy_oracle_detect(
    truths: &FrameAnnotations,
    params: &OracleNoiseParams,
    frame_w: f64,
    frame_h: f64,
) -> Result<FrameDetections> {
    params.validate()?;
    if !(frame_w.is_finite() && frame_h.is_finite()) || frame_w <= 0.0 || frame_h <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "frame bounds must be positive, got {frame_w}x{frame_h}"
        )));
    }

    let mut rng = FrameRng::new(params.seed, truths.frame);
    let mut detections = Vec::new();

    for ann in &truths.boxes {
        if rng.next_f64() < params.miss_prob {
            continue;
        }
        let bbox = if params.jitter_sigma > 0.0 {
            let sigma = params.jitter_sigma;
            let x0 = (ann.bbox.x + sigma * rng.gaussian()).clamp(0.0, frame_w);
            let y0 = (ann.bbox.y + sigma * rng.gaussian()).clamp(0.0, frame_h);
            let x1 = (ann.bbox.right() + sigma * rng.gaussian()).clamp(0.0, frame_w);
            let y1 = (ann.bbox.bottom() + sigma * rng.gaussian()).clamp(0.0, frame_h);
            if x1 - x0 <= 1.0 || y1 - y0 <= 1.0 {
                continue;
            }
            BoundingBox { x: x0, y: y0, w: x1 - x0, h: y1 - y0 }
        } else {
            ann.bbox
        };
        let score = rng.uniform(params.tp_score_range.0, params.tp_score_range.1);
        detections.push(Detection { bbox, label: ann.label.clone(), score });
    }

    if params.fp_rate > 0.0 {
        for _ in 0..rng.poisson(params.fp_rate) {
            let w = rng.uniform(0.05 * frame_w, 0.25 * frame_w);
            let h = rng.uniform(0.05 * frame_h, 0.25 * frame_h);
            let x = rng.uniform(0.0, frame_w - w);
            let y = rng.uniform(0.0, frame_h - h);
            let score = rng.uniform(params.fp_score_range.0, params.fp_score_range.1);
            detections.push(Detection {
                bbox: BoundingBox { x, y, w, h },
                label: POSITIVE_LABEL.to_string(),
                score,
            });
        }
    }

    Ok(FrameDetections { frame: truths.frame, detections })
}

/// Ground-truth oracle backend with the noise model above.
#[derive(Debug, Clone)]
pub struct NoisyOracleBackend {
    truths: BTreeMap<u64, FrameAnnotations>,
    params: OracleNoiseParams,
    frame_w: f64,
    frame_h: f64,
}

impl NoisyOracleBackend {
    pub fn new(
        truths: BTreeMap<u64, FrameAnnotations>,
        params: OracleNoiseParams,
        frame_w: f64,
        frame_h: f64,
    ) -> Result<Self> {
        params.validate()?;
        if frame_w <= 0.0 || frame_h <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "frame bounds must be positive, got {frame_w}x{frame_h}"
            )));
        }
        Ok(Self { truths, params, frame_w, frame_h })
    }

    pub fn params(&self) -> &OracleNoiseParams {
        &self.params
    }
}

impl DetectorBackend for NoisyOracleBackend {
    fn detect(&self, frame_id: u64) -> Result<FrameDetections> {
        let ann = self.truths.get(&frame_id).ok_or(Error::MissingFrame(frame_id))?;
        noisy_oracle_detect(ann, &self.params, self.frame_w, self.frame_h)
    }

    fn frame_ids(&self) -> Vec<u64> {
        self.truths.keys().copied().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::AnnotatedBox;

    fn frame_of(boxes: &[(f64, f64, f64, f64)], frame: u64) -> FrameAnnotations {
        FrameAnnotations {
            frame,
            boxes: boxes
                .iter()
                .map(|&(x, y, w, h)| AnnotatedBox {
                    bbox: BoundingBox::new(x, y, w, h).unwrap(),
                    label: POSITIVE_LABEL.to_string(),
                })
                .collect(),
        }
    }

    fn dets(scores: &[f64]) -> FrameDetections {
        FrameDetections {
            frame: 0,
            detections: scores
                .iter()
                .map(|&s| {
                    Detection::new(BoundingBox::new(0.0, 0.0, 10.0, 10.0).unwrap(), "pistol", s)
                        .unwrap()
                })
                .collect(),
        }
    }

    #[test]
    fn threshold_keeps_scores_at_or_above() {
        let filtered = filter_by_threshold(&dets(&[0.95, 0.80, 0.60]), 0.7).unwrap();
        let scores: Vec<f64> = filtered.detections.iter().map(|d| d.score).collect();
        assert_eq!(scores, vec![0.95, 0.80]);
    }

    #[test]
    fn threshold_zero_keeps_everything() {
        let input = dets(&[0.95, 0.80, 0.60]);
        assert_eq!(filter_by_threshold(&input, 0.0).unwrap(), input);
    }

    #[test]
    fn threshold_on_empty_is_empty() {
        let out = filter_by_threshold(&dets(&[]), 0.9).unwrap();
        assert!(out.detections.is_empty());
    }

    #[test]
    fn threshold_outside_unit_interval_rejected() {
        assert!(matches!(
            filter_by_threshold(&dets(&[]), 1.5),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn threshold_is_inclusive() {
        let filtered = filter_by_threshold(&dets(&[0.7]), 0.7).unwrap();
        assert_eq!(filtered.detections.len(), 1);
    }

    #[test]
    fn replay_returns_frames_verbatim() {
        let frame = dets(&[0.9, 0.4]);
        let backend = ReplayBackend::new([(0u64, frame.clone())].into_iter().collect());
        assert_eq!(backend.detect(0).unwrap(), frame);
        assert!(matches!(backend.detect(7), Err(Error::MissingFrame(7))));
        assert_eq!(backend.frame_ids(), vec![0]);
    }

    #[test]
    fn replay_loads_the_native_file_format() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.jsonl");
        std::fs::write(
            &path,
            "{\"frame\":4,\"boxes\":[{\"x\":1,\"y\":2,\"w\":3,\"h\":4,\"score\":0.8,\"label\":\"pistol\"}]}\n",
        )
        .unwrap();
        let backend = ReplayBackend::from_file(&path).unwrap();
        assert_eq!(backend.frame_ids(), vec![4]);
        assert_eq!(backend.detect(4).unwrap().detections.len(), 1);
    }

    #[test]
    fn zero_noise_oracle_reproduces_truth_boxes() {
        let truths = frame_of(&[(10.0, 20.0, 30.0, 40.0), (100.0, 50.0, 20.0, 20.0), (5.0, 5.0, 8.0, 8.0)], 3);
        let out = noisy_oracle_detect(&truths, &OracleNoiseParams::default(), 640.0, 360.0).unwrap();
        assert_eq!(out.frame, 3);
        assert_eq!(out.detections.len(), 3);
        for (det, ann) in out.detections.iter().zip(&truths.boxes) {
            assert_eq!(det.bbox, ann.bbox);
            assert_eq!(det.label, "pistol");
            assert!((0.7..=1.0).contains(&det.score));
        }
    }

    #[test]
    fn oracle_certain_miss_drops_everything() {
        let truths = frame_of(&[(10.0, 20.0, 30.0, 40.0)], 0);
        let params = OracleNoiseParams { miss_prob: 1.0, ..Default::default() };
        let out = noisy_oracle_detect(&truths, &params, 640.0, 360.0).unwrap();
        assert!(out.detections.is_empty());
    }

    #[test]
    fn oracle_is_deterministic_per_frame() {
        let truths = frame_of(&[(10.0, 20.0, 30.0, 40.0), (60.0, 60.0, 50.0, 30.0)], 11);
        let params = OracleNoiseParams {
            miss_prob: 0.3,
            fp_rate: 1.5,
            jitter_sigma: 2.0,
            seed: 99,
            ..Default::default()
        };
        let a = noisy_oracle_detect(&truths, &params, 640.0, 360.0).unwrap();
        let b = noisy_oracle_detect(&truths, &params, 640.0, 360.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn oracle_survival_tracks_miss_probability() {
        // 10,000 boxes across 500 frames; law of large numbers at miss 0.5
        let params = OracleNoiseParams { miss_prob: 0.5, seed: 7, ..Default::default() };
        let mut survived = 0usize;
        for frame in 0..500u64 {
            let truths = frame_of(&vec![(10.0, 10.0, 20.0, 20.0); 20], frame);
            survived += noisy_oracle_detect(&truths, &params, 640.0, 360.0)
                .unwrap()
                .detections
                .len();
        }
        let fraction = survived as f64 / 10_000.0;
        assert!((fraction - 0.5).abs() < 0.02, "fraction {fraction}");
    }

    #[test]
    fn oracle_spurious_boxes_stay_in_frame() {
        let truths = frame_of(&[], 4);
        let params = OracleNoiseParams { fp_rate: 8.0, seed: 3, ..Default::default() };
        let out = noisy_oracle_detect(&truths, &params, 640.0, 360.0).unwrap();
        assert!(!out.detections.is_empty());
        for det in &out.detections {
            assert!(det.bbox.x >= 0.0 && det.bbox.right() <= 640.0);
            assert!(det.bbox.y >= 0.0 && det.bbox.bottom() <= 360.0);
            assert!((0.5..=0.9).contains(&det.score));
            det.validate().unwrap();
        }
    }

    #[test]
    fn oracle_jitter_clips_and_keeps_boxes_valid() {
        let truths = frame_of(&[(0.0, 0.0, 12.0, 12.0), (630.0, 350.0, 9.0, 9.0)], 2);
        let params = OracleNoiseParams { jitter_sigma: 6.0, seed: 21, ..Default::default() };
        for frame in 0..200u64 {
            let t = FrameAnnotations { frame, ..truths.clone() };
            for det in noisy_oracle_detect(&t, &params, 640.0, 360.0).unwrap().detections {
                det.validate().unwrap();
                assert!(det.bbox.w > 1.0 && det.bbox.h > 1.0);
                assert!(det.bbox.x >= 0.0 && det.bbox.right() <= 640.0);
                assert!(det.bbox.y >= 0.0 && det.bbox.bottom() <= 360.0);
            }
        }
    }

    #[test]
    fn oracle_rejects_bad_params() {
        let bad = OracleNoiseParams { miss_prob: 1.2, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = OracleNoiseParams { tp_score_range: (0.9, 0.2), ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = OracleNoiseParams { fp_score_range: (0.2, 1.4), ..Default::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn backend_full_pass_is_reproducible() {
        let truths: BTreeMap<u64, FrameAnnotations> = (0..50u64)
            .map(|f| (f, frame_of(&[(f as f64, 10.0, 25.0, 25.0)], f)))
            .collect();
        let params = OracleNoiseParams {
            miss_prob: 0.2,
            fp_rate: 0.7,
            jitter_sigma: 1.5,
            seed: 1234,
            ..Default::default()
        };
        let backend = NoisyOracleBackend::new(truths, params, 640.0, 360.0).unwrap();
        let pass1: Vec<FrameDetections> =
            backend.frame_ids().iter().map(|&f| backend.detect(f).unwrap()).collect();
        // second pass in reverse order must agree frame by frame
        let mut pass2: Vec<FrameDetections> =
            backend.frame_ids().iter().rev().map(|&f| backend.detect(f).unwrap()).collect();
        pass2.reverse();
        assert_eq!(pass1, pass2);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn threshold_is_monotone(
                scores in prop::collection::vec(0.0..=1.0f64, 0..20),
                t1 in 0.0..=1.0f64,
                t2 in 0.0..=1.0f64,
            ) {
                let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
                let input = dets(&scores);
                let loose = filter_by_threshold(&input, lo).unwrap();
                let strict = filter_by_threshold(&input, hi).unwrap();
                prop_assert!(strict.detections.len() <= loose.detections.len());
                for d in &strict.detections {
                    prop_assert!(loose.detections.contains(d));
                }
            }
        }
    }
}
