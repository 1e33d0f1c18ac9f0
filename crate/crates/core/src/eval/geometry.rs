use crate::annot::{AbsBox, Detection};

/// Intersection over union. Zero for disjoint boxes and when the union has
/// no area.
pub fn iou(a: &AbsBox, b: &AbsBox) -> f64 {
    let iw = (a.x_max.min(b.x_max) - a.x_min.max(b.x_min)).max(0.0);
    let ih = (a.y_max.min(b.y_max) - a.y_min.max(b.y_min)).max(0.0);
    let inter = iw * ih;
    let union = a.area() + b.area() - inter;
    if union <= 0.0 {
        0.0
    } else {
        (inter / union).clamp(0.0, 1.0)
    }
}

/// Greedy per-class non-max suppression.
///
/// Detections are ranked by descending confidence (ties keep input order).
/// A detection is dropped when its IoU with an already kept detection of the
/// same class exceeds `iou_threshold`. Survivors come back in rank order.
pub fn nms(dets: &[Detection], iou_threshold: f64) -> Vec<Detection> {
    let mut order: Vec<usize> = (0..dets.len()).collect();
    order.sort_by(|&i, &j| dets[j].confidence.total_cmp(&dets[i].confidence));

    let mut suppressed = vec![false; dets.len()];
    let mut kept = Vec::new();
    for (rank, &i) in order.iter().enumerate() {
        if suppressed[i] {
            continue;
        }
        kept.push(dets[i]);
        for &j in &order[rank + 1..] {
            if !suppressed[j]
                && dets[j].class_id == dets[i].class_id
                && iou(&dets[i].bbox, &dets[j].bbox) > iou_threshold
            {
                suppressed[j] = true;
            }
        }
    }
    kept
}
