//! File formats and parsers: ground-truth annotations (native line records
//! or VOC-style per-image XML), detection streams, scene specs, run
//! configuration, and machine-readable reports.
//!
//! Native streams are line-delimited JSON, one frame per line:
//!
//! ```text
//! ground truth: {"frame":N,"boxes":[{"x":F,"y":F,"w":F,"h":F,"label":S}]}
//! detections:   {"frame":N,"boxes":[{"x":F,"y":F,"w":F,"h":F,"score":F,"label":S}]}
//! ```
//!
//! Writing is canonical — fixed key order, fixed float formatting (shortest
//! form with at most six decimals that round-trips, full precision
//! otherwise), one newline-terminated record per frame — so identical data
//! always serializes to identical bytes. Parsers reject invalid values
//! rather than coercing them and report the offending file position.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Deserialize;

use crate::alarm::{AlarmConfig, SceneSpec};
use crate::detector::{Detection, FrameDetections, OracleNoiseParams, POSITIVE_LABEL};
use crate::error::{Error, Result};
use crate::eval::{percent, SceneSuiteReport, VideoReport};
use crate::geometry::BoundingBox;
use crate::sliding_window::WindowGridSpec;

/// One labeled ground-truth box.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotatedBox {
    pub bbox: BoundingBox,
    pub label: String,
}

/// Ground truth for one frame.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FrameAnnotations {
    pub frame: u64,
    pub boxes: Vec<AnnotatedBox>,
}

// ---------------------------------------------------------------------------
// canonical float / string formatting

/// Shortest decimal form with at most six fractional digits that parses back
/// to the same value; falls back to the full shortest representation.
pub(crate) fn fmt_f64(v: f64) -> String {
    for precision in 0..=6usize {
        let s = format!("{v:.precision$}");
        if s.parse::<f64>() == Ok(v) {
            return s;
        }
    }
    format!("{v}")
}

fn json_string(s: &str) -> String {
    serde_json::to_string(s).expect("string serialization is infallible")
}

// ---------------------------------------------------------------------------
// raw line records

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGtBox {
    x: f64,
    y: f64,
    w: f64,
    h: f64,
    label: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGtFrame {
    frame: u64,
    boxes: Vec<RawGtBox>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDetBox {
    x: f64,
    y: f64,
    w: f64,
    h: f64,
    score: f64,
    label: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDetFrame {
    frame: u64,
    boxes: Vec<RawDetBox>,
}

fn parse_error(source: &str, line: usize, message: impl Into<String>) -> Error {
    Error::Parse { path: source.to_string(), line, message: message.into() }
}

fn check_label(label: &str, source: &str, line: usize) -> Result<()> {
    if label.is_empty() {
        return Err(parse_error(source, line, "label must be non-empty"));
    }
    Ok(())
}

fn check_box(x: f64, y: f64, w: f64, h: f64, source: &str, line: usize) -> Result<BoundingBox> {
    BoundingBox::new(x, y, w, h).map_err(|e| parse_error(source, line, e.to_string()))
}

fn jsonl_records<'a, T: serde::de::DeserializeOwned + 'a>(
    text: &'a str,
    source: &'a str,
) -> impl Iterator<Item = Result<(usize, T)>> + 'a {
    text.lines().enumerate().map(move |(idx, line)| {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            return Err(parse_error(source, line_no, "blank line in record stream"));
        }
        serde_json::from_str::<T>(line)
            .map(|rec| (line_no, rec))
            .map_err(|e| parse_error(source, line_no, e.to_string()))
    })
}

// ---------------------------------------------------------------------------
// ground truth

/// Parses ground truth from a native line-record file, a single VOC XML
/// file, or a directory of VOC XML files (one file per frame, the frame
/// index taken from the trailing digits of the file name).
pub fn parse_ground_truth(path: &Path) -> Result<BTreeMap<u64, FrameAnnotations>> {
    if path.is_dir() {
        return parse_voc_dir(path);
    }
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("xml")) {
        let frame = frame_index_from_name(path).unwrap_or(0);
        let ann = parse_voc_file(path, frame)?;
        return Ok([(frame, ann)].into_iter().collect());
    }
    let text = fs::read_to_string(path)?;
    parse_ground_truth_str(&text, &path.display().to_string())
}

/// Parses the native ground-truth line format from a string.
pub fn parse_ground_truth_str(text: &str, source: &str) -> Result<BTreeMap<u64, FrameAnnotations>> {
    let mut map = BTreeMap::new();
    for record in jsonl_records::<RawGtFrame>(text, source) {
        let (line_no, raw) = record?;
        let mut boxes = Vec::with_capacity(raw.boxes.len());
        for b in raw.boxes {
            check_label(&b.label, source, line_no)?;
            boxes.push(AnnotatedBox {
                bbox: check_box(b.x, b.y, b.w, b.h, source, line_no)?,
                label: b.label,
            });
        }
        if map.insert(raw.frame, FrameAnnotations { frame: raw.frame, boxes }).is_some() {
            return Err(parse_error(source, line_no, format!("duplicate frame {}", raw.frame)));
        }
    }
    Ok(map)
}

/// Canonical serialization of a ground-truth stream.
pub fn write_ground_truth(map: &BTreeMap<u64, FrameAnnotations>) -> String {
    let mut out = String::new();
    for ann in map.values() {
        let _ = write!(out, "{{\"frame\":{},\"boxes\":[", ann.frame);
        for (i, b) in ann.boxes.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(
                out,
                "{{\"x\":{},\"y\":{},\"w\":{},\"h\":{},\"label\":{}}}",
                fmt_f64(b.bbox.x),
                fmt_f64(b.bbox.y),
                fmt_f64(b.bbox.w),
                fmt_f64(b.bbox.h),
                json_string(&b.label)
            );
        }
        out.push_str("]}\n");
    }
    out
}

// ---------------------------------------------------------------------------
// detections

/// Parses a native detections file (one frame per line).
pub fn parse_detections(path: &Path) -> Result<BTreeMap<u64, FrameDetections>> {
    let text = fs::read_to_string(path)?;
    parse_detections_str(&text, &path.display().to_string())
}

/// Parses the native detections line format from a string.
pub fn parse_detections_str(text: &str, source: &str) -> Result<BTreeMap<u64, FrameDetections>> {
    let mut map = BTreeMap::new();
    for record in jsonl_records::<RawDetFrame>(text, source) {
        let (line_no, raw) = record?;
        let mut detections = Vec::with_capacity(raw.boxes.len());
        for b in raw.boxes {
            check_label(&b.label, source, line_no)?;
            if !(0.0..=1.0).contains(&b.score) {
                return Err(parse_error(
                    source,
                    line_no,
                    format!("score must lie in [0, 1], got {}", b.score),
                ));
            }
            detections.push(Detection {
                bbox: check_box(b.x, b.y, b.w, b.h, source, line_no)?,
                label: b.label,
                score: b.score,
            });
        }
        if map
            .insert(raw.frame, FrameDetections { frame: raw.frame, detections })
            .is_some()
        {
            return Err(parse_error(source, line_no, format!("duplicate frame {}", raw.frame)));
        }
    }
    Ok(map)
}

/// Canonical serialization of a detection stream; `parse_detections_str`
/// of the output reproduces the input exactly.
pub fn write_detections(map: &BTreeMap<u64, FrameDetections>) -> String {
    let mut out = String::new();
    for fd in map.values() {
        let _ = write!(out, "{{\"frame\":{},\"boxes\":[", fd.frame);
        for (i, d) in fd.detections.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(
                out,
                "{{\"x\":{},\"y\":{},\"w\":{},\"h\":{},\"score\":{},\"label\":{}}}",
                fmt_f64(d.bbox.x),
                fmt_f64(d.bbox.y),
                fmt_f64(d.bbox.w),
                fmt_f64(d.bbox.h),
                fmt_f64(d.score),
                json_string(&d.label)
            );
        }
        out.push_str("]}\n");
    }
    out
}

// ---------------------------------------------------------------------------
// VOC-style XML annotations

/// Parses one VOC-style annotation file into the given frame index.
///
/// `<bndbox>` corners `(xmin, ymin, xmax, ymax)` convert to `(x, y, w, h)`
/// with `w = xmax - xmin`; `xmax <= xmin` (or the y equivalent) is an
/// invalid-geometry error. Object names become labels.
pub fn parse_voc_file(path: &Path, frame: u64) -> Result<FrameAnnotations> {
    let text = fs::read_to_string(path)?;
    parse_voc_str(&text, &path.display().to_string(), frame)
}

/// Parses VOC annotation XML from a string.
pub fn parse_voc_str(text: &str, source: &str, frame: u64) -> Result<FrameAnnotations> {
    let doc = roxmltree::Document::parse(text)
        .map_err(|e| parse_error(source, e.pos().row as usize, e.to_string()))?;
    let root = doc.root_element();
    if root.tag_name().name() != "annotation" {
        return Err(parse_error(
            source,
            1,
            format!("expected <annotation> root, found <{}>", root.tag_name().name()),
        ));
    }

    let mut boxes = Vec::new();
    for object in root.children().filter(|n| n.has_tag_name("object")) {
        let line = || doc.text_pos_at(object.range().start).row as usize;
        let name = child_text(&object, "name")
            .ok_or_else(|| parse_error(source, line(), "object without <name>"))?;
        if name.is_empty() {
            return Err(parse_error(source, line(), "object name must be non-empty"));
        }
        let bndbox = object
            .children()
            .find(|n| n.has_tag_name("bndbox"))
            .ok_or_else(|| parse_error(source, line(), "object without <bndbox>"))?;
        let corner = |tag: &str| -> Result<f64> {
            let raw = child_text(&bndbox, tag)
                .ok_or_else(|| parse_error(source, line(), format!("bndbox without <{tag}>")))?;
            raw.trim()
                .parse::<f64>()
                .map_err(|_| parse_error(source, line(), format!("<{tag}> is not a number: {raw:?}")))
        };
        let (xmin, ymin, xmax, ymax) = (corner("xmin")?, corner("ymin")?, corner("xmax")?, corner("ymax")?);
        if xmax <= xmin || ymax <= ymin {
            return Err(Error::InvalidGeometry(format!(
                "{source}: bndbox corners must satisfy xmax > xmin and ymax > ymin, \
                 got ({xmin}, {ymin}, {xmax}, {ymax})"
            )));
        }
        boxes.push(AnnotatedBox {
            bbox: BoundingBox::new(xmin, ymin, xmax - xmin, ymax - ymin)?,
            label: name,
        });
    }
    Ok(FrameAnnotations { frame, boxes })
}

/// Parses a directory of VOC XML files, one frame per file.
pub fn parse_voc_dir(dir: &Path) -> Result<BTreeMap<u64, FrameAnnotations>> {
    let mut paths: Vec<_> = fs::read_dir(dir)?
        .collect::<std::io::Result<Vec<_>>>()?
        .into_iter()
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|e| e.eq_ignore_ascii_case("xml")))
        .collect();
    paths.sort();

    let mut map = BTreeMap::new();
    for path in paths {
        let source = path.display().to_string();
        let frame = frame_index_from_name(&path).ok_or_else(|| {
            parse_error(&source, 0, "cannot derive a frame index: file stem has no trailing digits")
        })?;
        if map.insert(frame, parse_voc_file(&path, frame)?).is_some() {
            return Err(parse_error(&source, 0, format!("duplicate frame {frame}")));
        }
    }
    Ok(map)
}

fn child_text(node: &roxmltree::Node, tag: &str) -> Option<String> {
    node.children()
        .find(|n| n.has_tag_name(tag))
        .and_then(|n| n.text())
        .map(|t| t.trim().to_string())
}

fn frame_index_from_name(path: &Path) -> Option<u64> {
    let stem = path.file_stem()?.to_str()?;
    let digits: String = stem
        .chars()
        .rev()
        .take_while(|c| c.is_ascii_digit())
        .collect::<Vec<_>>()
        .into_iter()
        .rev()
        .collect();
    digits.parse().ok()
}

// ---------------------------------------------------------------------------
// scene specs

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSceneFile {
    scenes: Vec<RawScene>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScene {
    id: String,
    start: u64,
    end: u64,
    fps: Option<f64>,
}

/// Loads a scene-spec file: `{"scenes":[{"id":S,"start":N,"end":N,"fps":F}]}`.
///
/// `fps` defaults to `default_fps` when omitted.
pub fn parse_scene_specs(path: &Path, default_fps: f64) -> Result<Vec<SceneSpec>> {
    let text = fs::read_to_string(path)?;
    parse_scene_specs_str(&text, &path.display().to_string(), default_fps)
}

pub fn parse_scene_specs_str(text: &str, source: &str, default_fps: f64) -> Result<Vec<SceneSpec>> {
    let raw: RawSceneFile = serde_json::from_str(text)
        .map_err(|e| parse_error(source, e.line(), e.to_string()))?;
    raw.scenes
        .into_iter()
        .map(|s| {
            if s.end < s.start {
                return Err(Error::InvalidConfig(format!(
                    "scene {}: end ({}) must not precede start ({})",
                    s.id, s.end, s.start
                )));
            }
            let fps = s.fps.unwrap_or(default_fps);
            if !fps.is_finite() || fps <= 0.0 {
                return Err(Error::InvalidConfig(format!("scene {}: fps must be positive, got {fps}", s.id)));
            }
            Ok(SceneSpec { id: s.id, start: s.start, end: s.end, fps })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// run configuration

/// Resolved run configuration with every field defaulted.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub score_min: f64,
    pub iou_min: f64,
    pub k: u32,
    pub fps: f64,
    pub rearm_gap: u32,
    pub window: WindowGridSpec,
    pub nms_iou: Option<f64>,
    pub noise: OracleNoiseParams,
    pub seed: u64,
    pub positive_label: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            score_min: 0.7,
            iou_min: 0.5,
            k: 5,
            fps: 25.0,
            rearm_gap: 5,
            window: WindowGridSpec::for_frame(640, 360),
            nms_iou: None,
            noise: OracleNoiseParams::default(),
            seed: 0,
            positive_label: POSITIVE_LABEL.to_string(),
        }
    }
}

impl RunConfig {
    pub fn alarm_config(&self) -> AlarmConfig {
        AlarmConfig {
            k: self.k,
            score_min: self.score_min,
            fps: self.fps,
            rearm_gap: self.rearm_gap,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("score_min", self.score_min), ("iou_min", self.iou_min)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidConfig(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        if self.iou_min >= 1.0 {
            return Err(Error::InvalidConfig(format!("iou_min must lie in [0, 1), got {}", self.iou_min)));
        }
        self.alarm_config().validate()?;
        self.window.validate()?;
        if let Some(t) = self.nms_iou {
            if !(0.0..=1.0).contains(&t) {
                return Err(Error::InvalidConfig(format!("nms_iou must lie in [0, 1], got {t}")));
            }
        }
        self.noise.validate()?;
        if self.positive_label.is_empty() {
            return Err(Error::InvalidConfig("positive_label must be non-empty".into()));
        }
        Ok(())
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    score_min: Option<f64>,
    iou_min: Option<f64>,
    k: Option<u32>,
    fps: Option<f64>,
    rearm_gap: Option<u32>,
    window: Option<RawWindow>,
    nms_iou: Option<f64>,
    noise: Option<RawNoise>,
    seed: Option<u64>,
    positive_label: Option<String>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawWindow {
    frame_w: Option<u32>,
    frame_h: Option<u32>,
    win_w: Option<u32>,
    win_h: Option<u32>,
    stride_x: Option<u32>,
    stride_y: Option<u32>,
    clamp_edges: Option<bool>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawNoise {
    miss_prob: Option<f64>,
    fp_rate: Option<f64>,
    jitter_sigma: Option<f64>,
    tp_score_range: Option<(f64, f64)>,
    fp_score_range: Option<(f64, f64)>,
    seed: Option<u64>,
}

/// Loads a JSON run configuration; omitted keys take their defaults
/// (`k = 5`, `score_min = 0.7`, `fps = 25`, ...), unknown keys are
/// rejected by name.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path)?;
    load_config_str(&text, &path.display().to_string())
}

pub fn load_config_str(text: &str, source: &str) -> Result<RunConfig> {
    let raw: RawConfig = serde_json::from_str(text)
        .map_err(|e| parse_error(source, e.line(), e.to_string()))?;
    let defaults = RunConfig::default();

    let k = raw.k.unwrap_or(defaults.k);
    let rw = raw.window.unwrap_or_default();
    let window_defaults = defaults.window;
    let window = WindowGridSpec {
        frame_w: rw.frame_w.unwrap_or(window_defaults.frame_w),
        frame_h: rw.frame_h.unwrap_or(window_defaults.frame_h),
        win_w: rw.win_w.unwrap_or(window_defaults.win_w),
        win_h: rw.win_h.unwrap_or(window_defaults.win_h),
        stride_x: rw.stride_x.unwrap_or(window_defaults.stride_x),
        stride_y: rw.stride_y.unwrap_or(window_defaults.stride_y),
        clamp_edges: rw.clamp_edges.unwrap_or(window_defaults.clamp_edges),
    };
    let seed = raw.seed.unwrap_or(defaults.seed);
    let rn = raw.noise.unwrap_or_default();
    let noise_defaults = defaults.noise.clone();
    let noise = OracleNoiseParams {
        miss_prob: rn.miss_prob.unwrap_or(noise_defaults.miss_prob),
        fp_rate: rn.fp_rate.unwrap_or(noise_defaults.fp_rate),
        jitter_sigma: rn.jitter_sigma.unwrap_or(noise_defaults.jitter_sigma),
        tp_score_range: rn.tp_score_range.unwrap_or(noise_defaults.tp_score_range),
        fp_score_range: rn.fp_score_range.unwrap_or(noise_defaults.fp_score_range),
        seed: rn.seed.unwrap_or(seed),
    };

    let config = RunConfig {
        score_min: raw.score_min.unwrap_or(defaults.score_min),
        iou_min: raw.iou_min.unwrap_or(defaults.iou_min),
        k,
        fps: raw.fps.unwrap_or(defaults.fps),
        rearm_gap: raw.rearm_gap.unwrap_or(k),
        window,
        nms_iou: raw.nms_iou,
        noise,
        seed,
        positive_label: raw.positive_label.unwrap_or(defaults.positive_label),
    };
    config.validate()?;
    Ok(config)
}

// ---------------------------------------------------------------------------
// machine-readable reports

/// Canonical one-line JSON form of a video evaluation report. Metric
/// fields are percentages rounded to two decimals, matching the table
/// output; counts are exact.
pub fn video_report_json(r: &VideoReport) -> String {
    format!(
        "{{\"video\":{},\"frames\":{},\"tp\":{},\"gt_p\":{},\"fp\":{},\"fn\":{},\
         \"precision\":{:.2},\"recall\":{:.2},\"f1\":{:.2}}}\n",
        json_string(&r.video_id),
        r.frames,
        r.true_positives,
        r.gt_positives,
        r.false_positives,
        r.gt_positives - r.true_positives,
        percent(r.metrics.precision),
        percent(r.metrics.recall),
        percent(r.metrics.f1),
    )
}

/// Canonical one-line JSON form of a scene-suite report.
pub fn suite_report_json(r: &SceneSuiteReport) -> String {
    let mut scenes = String::new();
    for (i, s) in r.results.iter().enumerate() {
        if i > 0 {
            scenes.push(',');
        }
        let (frame, aatpi) = match &s.event {
            Some(e) => (e.frame.to_string(), format!("{:.3}", e.aatpi_seconds)),
            None => ("null".to_string(), "null".to_string()),
        };
        let _ = write!(
            scenes,
            "{{\"id\":{},\"detected\":{},\"alarm_frame\":{},\"aatpi\":{},\"positive_frames\":{}}}",
            json_string(&s.scene_id),
            s.detected,
            frame,
            aatpi,
            s.positive_frames,
        );
    }
    let mean = match r.mean_aatpi {
        Some(m) => format!("{m:.3}"),
        None => "null".to_string(),
    };
    format!(
        "{{\"detected\":{},\"total\":{},\"mean_aatpi\":{mean},\"scenes\":[{scenes}]}}\n",
        r.detected, r.total,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_is_minimal() {
        assert_eq!(fmt_f64(1.0), "1");
        assert_eq!(fmt_f64(0.9), "0.9");
        assert_eq!(fmt_f64(0.125), "0.125");
        assert_eq!(fmt_f64(-3.5), "-3.5");
        assert_eq!(fmt_f64(0.333333), "0.333333");
        // values needing more than six decimals keep full precision
        let v = 1.0 / 3.0;
        assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
    }

    #[test]
    fn detection_line_round_trips_canonical_form() {
        let line = r#"{"frame":0,"boxes":[{"x":1,"y":2,"w":3,"h":4,"score":0.9,"label":"pistol"}]}"#;
        let map = parse_detections_str(line, "<mem>").unwrap();
        assert_eq!(map.len(), 1);
        let fd = &map[&0];
        assert_eq!(fd.detections.len(), 1);
        assert_eq!(fd.detections[0].bbox, BoundingBox::new(1.0, 2.0, 3.0, 4.0).unwrap());
        assert_eq!(fd.detections[0].score, 0.9);
        assert_eq!(fd.detections[0].label, "pistol");
        // canonical write reproduces the exact bytes
        assert_eq!(write_detections(&map), format!("{line}\n"));
    }

    #[test]
    fn duplicate_frame_is_rejected_with_line() {
        let text = "{\"frame\":3,\"boxes\":[]}\n{\"frame\":3,\"boxes\":[]}\n";
        match parse_detections_str(text, "dets.jsonl") {
            Err(Error::Parse { path, line, message }) => {
                assert_eq!(path, "dets.jsonl");
                assert_eq!(line, 2);
                assert!(message.contains("duplicate frame 3"), "{message}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn empty_input_is_empty_map() {
        assert!(parse_detections_str("", "<mem>").unwrap().is_empty());
        assert!(parse_ground_truth_str("", "<mem>").unwrap().is_empty());
        assert_eq!(write_detections(&BTreeMap::new()), "");
    }

    #[test]
    fn score_out_of_range_is_rejected() {
        let line = r#"{"frame":0,"boxes":[{"x":1,"y":2,"w":3,"h":4,"score":1.5,"label":"pistol"}]}"#;
        let err = parse_detections_str(line, "<mem>").unwrap_err();
        assert!(err.to_string().contains("score must lie in [0, 1]"), "{err}");
    }

    #[test]
    fn unknown_key_is_rejected() {
        let line = r#"{"frame":0,"boxes":[],"extra":1}"#;
        let err = parse_detections_str(line, "<mem>").unwrap_err();
        assert!(err.to_string().contains("extra"), "{err}");
    }

    #[test]
    fn negative_frame_is_rejected() {
        let line = r#"{"frame":-1,"boxes":[]}"#;
        assert!(parse_detections_str(line, "<mem>").is_err());
    }

    #[test]
    fn degenerate_box_is_rejected() {
        let line = r#"{"frame":0,"boxes":[{"x":1,"y":2,"w":0,"h":4,"label":"pistol"}]}"#;
        let err = parse_ground_truth_str(line, "<mem>").unwrap_err();
        assert!(err.to_string().contains("positive"), "{err}");
    }

    #[test]
    fn ground_truth_round_trip_is_identity() {
        let text = concat!(
            "{\"frame\":0,\"boxes\":[{\"x\":10,\"y\":20,\"w\":100,\"h\":120,\"label\":\"pistol\"}]}\n",
            "{\"frame\":2,\"boxes\":[]}\n",
            "{\"frame\":5,\"boxes\":[{\"x\":0.5,\"y\":1.25,\"w\":30,\"h\":40,\"label\":\"knife\"},",
            "{\"x\":7,\"y\":8,\"w\":9,\"h\":10,\"label\":\"pistol\"}]}\n",
        );
        let map = parse_ground_truth_str(text, "<mem>").unwrap();
        assert_eq!(write_ground_truth(&map), text);
    }

    #[test]
    fn voc_conversion_matches_corner_arithmetic() {
        let xml = r#"<annotation>
  <filename>frame_000007.jpg</filename>
  <object>
    <name>pistol</name>
    <bndbox><xmin>10</xmin><ymin>20</ymin><xmax>110</xmax><ymax>140</ymax></bndbox>
  </object>
</annotation>"#;
        let ann = parse_voc_str(xml, "<mem>", 7).unwrap();
        assert_eq!(ann.frame, 7);
        assert_eq!(ann.boxes.len(), 1);
        assert_eq!(ann.boxes[0].bbox, BoundingBox::new(10.0, 20.0, 100.0, 120.0).unwrap());
        assert_eq!(ann.boxes[0].label, "pistol");
    }

    #[test]
    fn voc_inverted_corners_are_invalid_geometry() {
        let xml = r#"<annotation><object><name>pistol</name>
<bndbox><xmin>110</xmin><ymin>20</ymin><xmax>110</xmax><ymax>140</ymax></bndbox>
</object></annotation>"#;
        assert!(matches!(parse_voc_str(xml, "<mem>", 0), Err(Error::InvalidGeometry(_))));
    }

    #[test]
    fn voc_without_objects_is_empty_frame() {
        let ann = parse_voc_str("<annotation><filename>x.jpg</filename></annotation>", "<mem>", 3).unwrap();
        assert_eq!(ann.frame, 3);
        assert!(ann.boxes.is_empty());
    }

    #[test]
    fn voc_directory_maps_files_to_frames() {
        let dir = tempfile::tempdir().unwrap();
        let xml = "<annotation><object><name>pistol</name>\
                   <bndbox><xmin>1</xmin><ymin>2</ymin><xmax>11</xmax><ymax>22</ymax></bndbox>\
                   </object></annotation>";
        fs::write(dir.path().join("frame_000010.xml"), xml).unwrap();
        fs::write(dir.path().join("frame_000002.xml"), xml).unwrap();
        fs::write(dir.path().join("notes.txt"), "ignored").unwrap();
        let map = parse_voc_dir(dir.path()).unwrap();
        assert_eq!(map.keys().copied().collect::<Vec<_>>(), vec![2, 10]);
        assert_eq!(map[&10].boxes.len(), 1);
    }

    #[test]
    fn voc_file_without_frame_digits_is_rejected_in_directories() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("nodigits.xml"), "<annotation></annotation>").unwrap();
        let err = parse_voc_dir(dir.path()).unwrap_err();
        assert!(err.to_string().contains("trailing digits"), "{err}");
    }

    #[test]
    fn scene_defaults_and_validation() {
        let scenes = parse_scene_specs_str(r#"{"scenes":[{"id":"s1","start":0,"end":9}]}"#, "<mem>", 25.0).unwrap();
        assert_eq!(scenes.len(), 1);
        assert_eq!(scenes[0].fps, 25.0);
        assert_eq!(scenes[0].start, 0);
        assert_eq!(scenes[0].end, 9);

        let err = parse_scene_specs_str(r#"{"scenes":[{"id":"s1","start":9,"end":0}]}"#, "<mem>", 25.0).unwrap_err();
        assert!(matches!(err, Error::InvalidConfig(_)));

        let err = parse_scene_specs_str(r#"{"scenes":[{"id":"s1","start":0,"end":9,"fps":0}]}"#, "<mem>", 25.0)
            .unwrap_err();
        assert!(err.to_string().contains("fps"), "{err}");

        let err = parse_scene_specs_str(r#"{"scenes":[{"id":"s1","start":0,"end":9,"fpz":25}]}"#, "<mem>", 25.0)
            .unwrap_err();
        assert!(err.to_string().contains("fpz"), "{err}");
    }

    #[test]
    fn config_defaults_fill_missing_keys() {
        let cfg = load_config_str("{}", "<mem>").unwrap();
        assert_eq!(cfg, RunConfig::default());

        let cfg = load_config_str(r#"{"k":3,"seed":42}"#, "<mem>").unwrap();
        assert_eq!(cfg.k, 3);
        assert_eq!(cfg.rearm_gap, 3);
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.noise.seed, 42);
        assert_eq!(cfg.score_min, 0.7);
    }

    #[test]
    fn config_rejects_out_of_range_and_unknown_keys() {
        let err = load_config_str(r#"{"score_min":1.5}"#, "<mem>").unwrap_err();
        assert!(err.to_string().contains("score_min"), "{err}");

        let err = load_config_str(r#"{"scoremin":0.5}"#, "<mem>").unwrap_err();
        assert!(err.to_string().contains("scoremin"), "{err}");

        let err = load_config_str(r#"{"noise":{"miss_prob":2}}"#, "<mem>").unwrap_err();
        assert!(err.to_string().contains("miss_prob"), "{err}");
    }

    #[test]
    fn config_full_object_round_trips_values() {
        let text = r#"{
  "score_min": 0.8,
  "iou_min": 0.4,
  "k": 7,
  "fps": 30,
  "rearm_gap": 2,
  "window": {"frame_w": 320, "frame_h": 240, "win_w": 80, "win_h": 60, "stride_x": 20, "stride_y": 20, "clamp_edges": false},
  "nms_iou": 0.45,
  "noise": {"miss_prob": 0.1, "fp_rate": 0.5, "jitter_sigma": 2, "tp_score_range": [0.8, 1.0], "fp_score_range": [0.4, 0.6], "seed": 9},
  "seed": 1,
  "positive_label": "handgun"
}"#;
        let cfg = load_config_str(text, "<mem>").unwrap();
        assert_eq!(cfg.k, 7);
        assert_eq!(cfg.rearm_gap, 2);
        assert_eq!(cfg.fps, 30.0);
        assert_eq!(cfg.window.frame_w, 320);
        assert!(!cfg.window.clamp_edges);
        assert_eq!(cfg.nms_iou, Some(0.45));
        assert_eq!(cfg.noise.seed, 9);
        assert_eq!(cfg.positive_label, "handgun");
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_label() -> impl Strategy<Value = String> {
            prop::sample::select(vec!["pistol", "knife", "phone", "hand gun", "a\"b\\c"])
                .prop_map(str::to_string)
        }

        proptest! {
            #[test]
            fn detections_round_trip(
                frames in prop::collection::btree_map(
                    0u64..500,
                    prop::collection::vec(
                        (
                            -50.0..600.0f64,
                            -50.0..400.0f64,
                            0.5..300.0f64,
                            0.5..300.0f64,
                            0.0..=1.0f64,
                            arb_label(),
                        ),
                        0..4,
                    ),
                    0..12,
                )
            ) {
                let map: BTreeMap<u64, FrameDetections> = frames
                    .into_iter()
                    .map(|(frame, boxes)| {
                        let detections = boxes
                            .into_iter()
                            .map(|(x, y, w, h, score, label)| Detection {
                                bbox: BoundingBox { x, y, w, h },
                                label,
                                score,
                            })
                            .collect();
                        (frame, FrameDetections { frame, detections })
                    })
                    .collect();
                let text = write_detections(&map);
                let reparsed = parse_detections_str(&text, "<mem>").unwrap();
                prop_assert_eq!(&reparsed, &map);
                // canonical form is a fixed point
                prop_assert_eq!(write_detections(&reparsed), text);
            }
        }
    }
}
