//! Browser demo bindings. Every export takes plain numbers or text and
//! returns JSON (or a [`SceneView`]) so the page needs no glue beyond
//! `JSON.parse`. Failures come back as `{"error": "..."}`.

use cherrymetrics::eval::{evaluate_dataset, iou, match_detections, nms, pr_curve, EvalConfig, MatchResult};
use cherrymetrics::phenotype::ColorPalette;
use cherrymetrics::stats;
use cherrymetrics::synthgen::{generate_scene, perturb_detections, NoiseSpec, SceneSpec};
use cherrymetrics::{AbsBox, Detection};
use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct BoxIn {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
    #[serde(default = "one")]
    pub confidence: f64,
}

fn one() -> f64 {
    1.0
}

impl From<&AbsBox> for BoxIn {
    fn from(b: &AbsBox) -> Self {
        BoxIn {
            x_min: b.x_min,
            y_min: b.y_min,
            x_max: b.x_max,
            y_max: b.y_max,
            confidence: 1.0,
        }
    }
}

#[derive(Debug, Serialize, PartialEq)]
pub struct OverlapResult {
    /// Row-major IoU matrix over the input boxes.
    pub iou: Vec<Vec<f64>>,
    /// Input indices surviving NMS, highest confidence first.
    pub kept: Vec<usize>,
}

/// Pairwise IoU and greedy NMS over user-drawn boxes.
pub fn overlap(boxes: &[BoxIn], nms_threshold: f64) -> Result<OverlapResult, String> {
    if !(0.0..=1.0).contains(&nms_threshold) {
        return Err(format!("NMS threshold {nms_threshold} is outside [0, 1]"));
    }
    let dets = boxes
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let bbox = AbsBox::new(
                b.x_min.min(b.x_max),
                b.y_min.min(b.y_max),
                b.x_min.max(b.x_max),
                b.y_min.max(b.y_max),
            )
            .ok_or_else(|| format!("box {i} has negative or non-finite coordinates"))?;
            if bbox.area() == 0.0 {
                return Err(format!("box {i} has zero width or height"));
            }
            Ok(Detection {
                bbox,
                class_id: 0,
                confidence: b.confidence.clamp(0.0, 1.0),
            })
        })
        .collect::<Result<Vec<_>, String>>()?;
    let matrix = dets
        .iter()
        .map(|a| dets.iter().map(|b| iou(&a.bbox, &b.bbox)).collect())
        .collect();
    let kept = nms(&dets, nms_threshold)
        .iter()
        .map(|k| dets.iter().position(|d| d == k).expect("nms returns input detections"))
        .collect();
    Ok(OverlapResult { iou: matrix, kept })
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct SceneParams {
    pub seed: u64,
    pub count: usize,
    pub jitter: f64,
    pub drop_prob: f64,
    pub spurious: usize,
    pub ct: f64,
}

#[derive(Debug, Serialize, PartialEq)]
pub struct DetectionOut {
    #[serde(flatten)]
    pub bbox: BoxIn,
    /// Matched to a truth at the confidence threshold.
    pub matched: bool,
}

#[derive(Debug, Serialize, PartialEq)]
pub struct SceneSummary {
    pub truths: Vec<BoxIn>,
    pub detections: Vec<DetectionOut>,
    pub tc: usize,
    pub dc: usize,
    pub tp: usize,
    pub fp: usize,
    pub fn_count: usize,
    pub map50: f64,
    pub mean_iou: f64,
    /// `(recall, precision)` in rank order.
    pub pr: Vec<(f64, f64)>,
}

pub const SCENE_SIZE: u32 = 320;
pub const MAX_DISCS: usize = 80;

/// Synthetic scene, noisy detections and their evaluation.
pub fn scene(p: &SceneParams) -> Result<(Vec<u8>, SceneSummary), String> {
    if !(0.0..=1.0).contains(&p.drop_prob) || !(0.0..=1.0).contains(&p.ct) {
        return Err("drop probability and CT must be in [0, 1]".into());
    }
    if p.count > MAX_DISCS {
        return Err(format!("at most {MAX_DISCS} discs fit the demo scene"));
    }
    if !(p.jitter >= 0.0 && p.jitter.is_finite()) {
        return Err("jitter must be non-negative".into());
    }
    let spec = SceneSpec {
        image_id: "demo".into(),
        width: SCENE_SIZE,
        height: SCENE_SIZE,
        cherry_count: p.count,
        radius_range: (10, 18),
        min_separation: 3.0,
        seed: p.seed,
        ..SceneSpec::default()
    };
    let scene = generate_scene(&spec, &ColorPalette::default()).map_err(|e| e.to_string())?;
    let noise = NoiseSpec {
        jitter_px: p.jitter,
        drop_prob: p.drop_prob,
        spurious_count: p.spurious,
        confidence_range: (0.2, 1.0),
        seed: p.seed ^ 0x5eed,
        ..NoiseSpec::default()
    };
    let dets = perturb_detections(&scene.truth, &noise);
    let config = EvalConfig {
        ct: p.ct,
        ..EvalConfig::default()
    };
    let report = evaluate_dataset(std::slice::from_ref(&dets), std::slice::from_ref(&scene.truth), &config)
        .map_err(|e| e.to_string())?;

    let at_ct: MatchResult = match_detections(&dets.detections, &scene.truth.boxes, p.ct, config.iou_threshold);
    let mut matched = vec![false; dets.detections.len()];
    for pair in &at_ct.pairs {
        matched[pair.detection] = true;
    }
    let pr = match pr_curve(&[match_detections(&dets.detections, &scene.truth.boxes, 0.0, 0.5)]) {
        Ok(curve) => curve.points.iter().map(|q| (q.recall, q.precision)).collect(),
        Err(_) => Vec::new(),
    };
    let summary = SceneSummary {
        truths: scene.truth.boxes.iter().map(|g| BoxIn::from(&g.bbox)).collect(),
        detections: dets
            .detections
            .iter()
            .zip(matched)
            .map(|(d, matched)| DetectionOut {
                bbox: BoxIn {
                    confidence: d.confidence,
                    ..BoxIn::from(&d.bbox)
                },
                matched,
            })
            .collect(),
        tc: report.tc,
        dc: report.dc,
        tp: report.tp,
        fp: report.fp,
        fn_count: report.fn_count,
        map50: report.map50,
        mean_iou: report.mean_iou,
        pr,
    };
    Ok((scene.image.to_rgba(), summary))
}

/// Parses pasted `x,y` lines (an optional header line is skipped) and
/// summarizes them.
pub fn correlation(text: &str, level: f64) -> Result<stats::StatsSummary, String> {
    let (mut x, mut y) = (Vec::new(), Vec::new());
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split(|c: char| c == ',' || c == ';' || c.is_whitespace()).filter(|s| !s.is_empty());
        let pair = (parts.next().map(str::parse::<f64>), parts.next().map(str::parse::<f64>));
        match pair {
            (Some(Ok(a)), Some(Ok(b))) if parts.next().is_none() => {
                x.push(a);
                y.push(b);
            }
            _ if i == 0 && x.is_empty() => continue,
            _ => return Err(format!("line {}: expected two numbers, found {line:?}", i + 1)),
        }
    }
    stats::summarize(&x, &y, level).map_err(|e| e.to_string())
}

fn to_json<T: Serialize>(result: Result<T, String>) -> String {
    match result {
        Ok(v) => serde_json::to_string(&v).unwrap_or_else(|e| error_json(&e.to_string())),
        Err(e) => error_json(&e),
    }
}

fn error_json(message: &str) -> String {
    serde_json::json!({ "error": message }).to_string()
}

/// `boxes_json`: array of `{x_min, y_min, x_max, y_max, confidence}`.
#[wasm_bindgen]
pub fn overlap_json(boxes_json: &str, nms_threshold: f64) -> String {
    let boxes: Result<Vec<BoxIn>, String> = serde_json::from_str(boxes_json).map_err(|e| e.to_string());
    to_json(boxes.and_then(|b| overlap(&b, nms_threshold)))
}

#[wasm_bindgen]
pub fn correlation_json(text: &str, level: f64) -> String {
    to_json(correlation(text, level).map(|s| {
        serde_json::json!({
            "n": s.n, "r": s.r, "ci_low": s.ci_low, "ci_high": s.ci_high, "p_value": s.p_value,
            "slope": s.slope, "intercept": s.intercept, "r_squared": s.r_squared,
            "mean_x": s.mean_x, "mean_y": s.mean_y, "sd_x": s.sd_x, "sd_y": s.sd_y,
            "covariance": s.covariance,
        })
    }))
}

/// A rendered scene: RGBA pixels for a canvas plus the evaluation as JSON.
#[wasm_bindgen]
pub struct SceneView {
    width: u32,
    height: u32,
    rgba: Vec<u8>,
    json: String,
}

#[wasm_bindgen]
impl SceneView {
    #[wasm_bindgen(getter)]
    pub fn width(&self) -> u32 {
        self.width
    }

    #[wasm_bindgen(getter)]
    pub fn height(&self) -> u32 {
        self.height
    }

    #[wasm_bindgen(getter)]
    pub fn rgba(&self) -> Vec<u8> {
        self.rgba.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn json(&self) -> String {
        self.json.clone()
    }
}

#[wasm_bindgen]
pub fn scene_view(seed: u32, count: u32, jitter: f64, drop_prob: f64, spurious: u32, ct: f64) -> SceneView {
    let params = SceneParams {
        seed: seed as u64,
        count: count as usize,
        jitter,
        drop_prob,
        spurious: spurious as usize,
        ct,
    };
    match scene(&params) {
        Ok((rgba, summary)) => SceneView {
            width: SCENE_SIZE,
            height: SCENE_SIZE,
            rgba,
            json: to_json(Ok(summary)),
        },
        Err(e) => SceneView {
            width: 0,
            height: 0,
            rgba: Vec::new(),
            json: error_json(&e),
        },
    }
}
