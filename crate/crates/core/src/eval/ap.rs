use super::{EvalError, MatchResult};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrPoint {
    pub recall: f64,
    pub precision: f64,
    pub confidence: f64,
}

/// Cumulative precision/recall, one point per ranked detection.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PRCurve {
    pub points: Vec<PrPoint>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ApInterpolation {
    /// Area under the monotone precision envelope at every recall step.
    #[default]
    AllPoint,
    /// Mean envelope precision at recall 0.0, 0.1, ..., 1.0.
    ElevenPoint,
}

/// Builds the global precision/recall curve from per-image match results.
///
/// Retained detections from every image are ranked together by descending
/// confidence; ties keep image order, then detection index.
pub fn pr_curve(results: &[MatchResult]) -> Result<PRCurve, EvalError> {
    let total_truths: usize = results.iter().map(|m| m.truth_count).sum();
    if total_truths == 0 {
        return Err(EvalError::NoGroundTruth);
    }

    let mut ranked: Vec<(f64, bool)> = Vec::new();
    for m in results {
        let mut local: Vec<(usize, bool)> = m
            .pairs
            .iter()
            .map(|p| (p.detection, true))
            .chain(m.false_positives.iter().map(|&i| (i, false)))
            .collect();
        local.sort_by_key(|&(i, _)| i);
        ranked.extend(local.into_iter().map(|(i, tp)| (m.confidences[i], tp)));
    }
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0));

    let tc = total_truths as f64;
    let (mut tp, mut fp) = (0usize, 0usize);
    let points = ranked
        .into_iter()
        .map(|(confidence, is_tp)| {
            if is_tp {
                tp += 1;
            } else {
                fp += 1;
            }
            PrPoint {
                recall: tp as f64 / tc,
                precision: tp as f64 / (tp + fp) as f64,
                confidence,
            }
        })
        .collect();
    Ok(PRCurve { points })
}

/// All-point interpolated average precision.
pub fn average_precision(curve: &PRCurve) -> f64 {
    average_precision_with(curve, ApInterpolation::AllPoint)
}

pub fn average_precision_with(curve: &PRCurve, interpolation: ApInterpolation) -> f64 {
    let pts = &curve.points;
    if pts.is_empty() {
        return 0.0;
    }
    // envelope[i] = max precision over points i.. (recall is non-decreasing).
    let mut envelope: Vec<f64> = pts.iter().map(|p| p.precision).collect();
    for i in (0..envelope.len() - 1).rev() {
        envelope[i] = envelope[i].max(envelope[i + 1]);
    }

    match interpolation {
        ApInterpolation::AllPoint => {
            let mut prev_recall = 0.0;
            let mut ap = 0.0;
            for (p, env) in pts.iter().zip(&envelope) {
                ap += (p.recall - prev_recall) * env;
                prev_recall = p.recall;
            }
            ap
        }
        ApInterpolation::ElevenPoint => {
            let sum: f64 = (0..=10)
                .map(|k| {
                    let level = k as f64 / 10.0;
                    pts.iter()
                        .position(|p| p.recall >= level - 1e-12)
                        .map_or(0.0, |i| envelope[i])
                })
                .sum();
            sum / 11.0
        }
    }
}

/// Mean IoU over every true-positive pair across all images.
pub fn mean_iou(results: &[MatchResult]) -> Result<f64, EvalError> {
    let (sum, count) = results
        .iter()
        .flat_map(|m| &m.pairs)
        .fold((0.0, 0usize), |(s, n), p| (s + p.iou, n + 1));
    if count == 0 {
        return Err(EvalError::NoMatches);
    }
    Ok(sum / count as f64)
}
