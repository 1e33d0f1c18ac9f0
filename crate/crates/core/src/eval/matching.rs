use crate::annot::{Detection, GroundTruthBox};

use super::iou;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchedPair {
    pub detection: usize,
    pub truth: usize,
    pub iou: f64,
}

/// Outcome of matching one image's detections against its ground truth.
///
/// Indices refer to the input slices. Detections below the confidence
/// threshold appear in neither `pairs` nor `false_positives`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchResult {
    pub pairs: Vec<MatchedPair>,
    pub false_positives: Vec<usize>,
    pub false_negatives: Vec<usize>,
    pub confidence_threshold: f64,
    /// Confidence of every input detection, by input index.
    pub confidences: Vec<f64>,
    pub truth_count: usize,
}

impl MatchResult {
    pub fn tp(&self) -> usize {
        self.pairs.len()
    }

    pub fn fp(&self) -> usize {
        self.false_positives.len()
    }

    pub fn fn_count(&self) -> usize {
        self.false_negatives.len()
    }

    pub fn retained(&self) -> usize {
        self.tp() + self.fp()
    }
}

/// Greedy confidence-ordered matching.
///
/// Detections under `conf_threshold` are dropped. The rest are visited in
/// descending confidence (ties in input order); each claims the unmatched
/// same-class truth with the highest IoU, provided that IoU is at least
/// `iou_threshold`, and is a false positive otherwise. IoU ties go to the
/// lower truth index.
pub fn match_detections(
    dets: &[Detection],
    truths: &[GroundTruthBox],
    conf_threshold: f64,
    iou_threshold: f64,
) -> MatchResult {
    let mut order: Vec<usize> = (0..dets.len())
        .filter(|&i| dets[i].confidence >= conf_threshold)
        .collect();
    order.sort_by(|&i, &j| dets[j].confidence.total_cmp(&dets[i].confidence));

    let mut taken = vec![false; truths.len()];
    let mut pairs = Vec::new();
    let mut false_positives = Vec::new();
    for i in order {
        let d = &dets[i];
        let mut best: Option<(usize, f64)> = None;
        for (t, gt) in truths.iter().enumerate() {
            if taken[t] || gt.class_id != d.class_id {
                continue;
            }
            let overlap = iou(&d.bbox, &gt.bbox);
            if overlap >= iou_threshold && best.is_none_or(|(_, b)| overlap > b) {
                best = Some((t, overlap));
            }
        }
        match best {
            Some((t, overlap)) => {
                taken[t] = true;
                pairs.push(MatchedPair {
                    detection: i,
                    truth: t,
                    iou: overlap,
                });
            }
            None => false_positives.push(i),
        }
    }

    MatchResult {
        pairs,
        false_positives,
        false_negatives: (0..truths.len()).filter(|&t| !taken[t]).collect(),
        confidence_threshold: conf_threshold,
        confidences: dets.iter().map(|d| d.confidence).collect(),
        truth_count: truths.len(),
    }
}
