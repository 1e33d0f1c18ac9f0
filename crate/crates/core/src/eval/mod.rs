//! Detection-quality evaluation: overlap, suppression, matching against
//! ground truth, precision/recall, average precision and the per-model
//! counting report.

mod ap;
mod geometry;
mod matching;
mod report;

pub use ap::{average_precision, average_precision_with, mean_iou, pr_curve, ApInterpolation, PRCurve, PrPoint};
pub use geometry::{iou, nms};
pub use matching::{match_detections, MatchResult, MatchedPair};
pub use report::{evaluate_dataset, EvalConfig, EvaluationReport, DC_CONFIDENCE_FLOOR};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("recall is undefined: there are no ground-truth boxes")]
    NoGroundTruth,
    #[error("mean IoU is undefined: no true-positive pairs")]
    NoMatches,
    #[error("detections reference image {0:?}, which has no ground truth")]
    Join(String),
    #[error("{name} = {value} is outside [0, 1]")]
    Threshold { name: &'static str, value: f64 },
}

pub(crate) fn check_unit(name: &'static str, value: f64) -> Result<(), EvalError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(EvalError::Threshold { name, value })
    }
}
