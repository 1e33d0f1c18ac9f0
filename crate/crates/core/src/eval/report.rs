use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use crate::annot::{Detection, DetectionSet, LabeledImage};

use super::{
    average_precision_with, check_unit, match_detections, mean_iou, nms, pr_curve,
    ApInterpolation, EvalError, MatchResult,
};

/// Detections at or above this confidence are counted in `dc`.
pub const DC_CONFIDENCE_FLOOR: f64 = 0.1;

/// mAP is always reported at this IoU, whatever `iou_threshold` is.
const MAP_IOU: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct EvalConfig {
    pub ct: f64,
    pub iou_threshold: f64,
    /// Applied per image before matching when set.
    pub nms_threshold: Option<f64>,
    pub model_label: String,
    pub resize_label: String,
    pub interpolation: ApInterpolation,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            ct: 0.5,
            iou_threshold: 0.5,
            nms_threshold: None,
            model_label: String::new(),
            resize_label: String::new(),
            interpolation: ApInterpolation::AllPoint,
        }
    }
}

/// One row of the counting/IoU accuracy table.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub model_label: String,
    pub resize_label: String,
    pub ct: f64,
    pub dc: usize,
    pub tc: usize,
    pub tp: usize,
    pub fp: usize,
    pub fn_count: usize,
    pub map50: f64,
    pub mean_iou: f64,
}

impl EvaluationReport {
    /// `tp + fn = tc` and both ratios in `[0, 1]`.
    pub fn is_consistent(&self) -> bool {
        self.tp + self.fn_count == self.tc
            && (0.0..=1.0).contains(&self.map50)
            && (0.0..=1.0).contains(&self.mean_iou)
    }
}

/// Scores a whole dataset.
///
/// Detection sets are joined to annotations on `image_id`; annotated images
/// without detections count all their truths as misses. Images are processed
/// in parallel and merged in `image_id` order. `mean_iou` is reported as 0
/// when nothing matched.
pub fn evaluate_dataset(
    det_sets: &[DetectionSet],
    labeled_images: &[LabeledImage],
    config: &EvalConfig,
) -> Result<EvaluationReport, EvalError> {
    check_unit("ct", config.ct)?;
    check_unit("iou_threshold", config.iou_threshold)?;
    if let Some(t) = config.nms_threshold {
        check_unit("nms_threshold", t)?;
    }

    let truth_by_id: HashMap<&str, &LabeledImage> = labeled_images
        .iter()
        .map(|img| (img.image_id.as_str(), img))
        .collect();

    let mut joined: BTreeMap<&str, (Vec<Detection>, &LabeledImage)> = labeled_images
        .iter()
        .map(|img| (img.image_id.as_str(), (Vec::new(), img)))
        .collect();
    for set in det_sets {
        if !truth_by_id.contains_key(set.image_id.as_str()) {
            return Err(EvalError::Join(set.image_id.clone()));
        }
        if let Some((dets, _)) = joined.get_mut(set.image_id.as_str()) {
            dets.extend_from_slice(&set.detections);
        }
    }

    struct PerImage {
        dc: usize,
        at_ct: MatchResult,
        at_zero: MatchResult,
    }

    let per_image: Vec<PerImage> = joined
        .into_par_iter()
        .map(|(_, (dets, img))| {
            let dets = match config.nms_threshold {
                Some(t) => nms(&dets, t),
                None => dets,
            };
            PerImage {
                dc: dets
                    .iter()
                    .filter(|d| d.confidence >= DC_CONFIDENCE_FLOOR)
                    .count(),
                at_ct: match_detections(&dets, &img.boxes, config.ct, config.iou_threshold),
                at_zero: match_detections(&dets, &img.boxes, 0.0, MAP_IOU),
            }
        })
        .collect();

    let at_ct: Vec<MatchResult> = per_image.iter().map(|p| p.at_ct.clone()).collect();
    let at_zero: Vec<MatchResult> = per_image.iter().map(|p| p.at_zero.clone()).collect();
    let curve = pr_curve(&at_zero)?;

    let report = EvaluationReport {
        model_label: config.model_label.clone(),
        resize_label: config.resize_label.clone(),
        ct: config.ct,
        dc: per_image.iter().map(|p| p.dc).sum(),
        tc: at_ct.iter().map(|m| m.truth_count).sum(),
        tp: at_ct.iter().map(MatchResult::tp).sum(),
        fp: at_ct.iter().map(MatchResult::fp).sum(),
        fn_count: at_ct.iter().map(MatchResult::fn_count).sum(),
        map50: average_precision_with(&curve, config.interpolation),
        mean_iou: match mean_iou(&at_ct) {
            Ok(v) => v,
            Err(EvalError::NoMatches) => 0.0,
            Err(e) => return Err(e),
        },
    };
    debug_assert!(report.is_consistent());
    Ok(report)
}
