//! Reference implementations used by the integration and acceptance tests.
//! Each one is written from the definition, not from the library code.
#![allow(dead_code)]

use cherrymetrics::{AbsBox, Detection, GroundTruthBox};
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

pub fn rng(seed: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}

/// Integer-corner box with positive extent inside `[0, grid]²`.
pub fn grid_box(rng: &mut Xoshiro256PlusPlus, grid: u32) -> AbsBox {
    let (a, b) = loop {
        let (a, b) = (rng.gen_range(0..=grid), rng.gen_range(0..=grid));
        if a != b {
            break (a.min(b), a.max(b));
        }
    };
    let (c, d) = loop {
        let (c, d) = (rng.gen_range(0..=grid), rng.gen_range(0..=grid));
        if c != d {
            break (c.min(d), c.max(d));
        }
    };
    AbsBox::new(a as f64, c as f64, b as f64, d as f64).unwrap()
}

/// IoU by counting the unit pixels each box covers.
pub fn raster_iou(a: &AbsBox, b: &AbsBox, grid: u32) -> f64 {
    let inside = |bx: &AbsBox, x: u32, y: u32| {
        let (px, py) = (x as f64, y as f64);
        px >= bx.x_min && px + 1.0 <= bx.x_max && py >= bx.y_min && py + 1.0 <= bx.y_max
    };
    let (mut inter, mut union) = (0u64, 0u64);
    for y in 0..grid {
        for x in 0..grid {
            match (inside(a, x, y), inside(b, x, y)) {
                (true, true) => {
                    inter += 1;
                    union += 1;
                }
                (true, false) | (false, true) => union += 1,
                _ => {}
            }
        }
    }
    inter as f64 / union as f64
}

/// Independent greedy matcher for one image: detections visited by
/// descending confidence (stable on input order); each takes the unmatched
/// same-class truth of largest IoU at or above the threshold, earliest
/// truth on ties. Returns per-detection TP flags in visiting order together
/// with the visiting order.
pub fn greedy_flags(dets: &[Detection], truths: &[GroundTruthBox], iou_thr: f64) -> Vec<(usize, bool)> {
    let mut order: Vec<usize> = (0..dets.len()).collect();
    order.sort_by(|&i, &j| {
        dets[j]
            .confidence
            .partial_cmp(&dets[i].confidence)
            .unwrap()
            .then(i.cmp(&j))
    });
    let mut taken = vec![false; truths.len()];
    let mut out = Vec::new();
    for i in order {
        let d = &dets[i];
        let mut best: Option<(usize, f64)> = None;
        for (j, t) in truths.iter().enumerate() {
            if taken[j] || t.class_id != d.class_id {
                continue;
            }
            let v = cherrymetrics::eval::iou(&d.bbox, &t.bbox);
            if v >= iou_thr && best.map_or(true, |(_, bv)| v > bv) {
                best = Some((j, v));
            }
        }
        if let Some((j, _)) = best {
            taken[j] = true;
        }
        out.push((i, best.is_some()));
    }
    out
}

/// All-point AP from a sweep over every distinct confidence threshold.
/// Each threshold reruns matching from scratch on the detections it keeps.
pub fn sweep_ap(dets: &[Detection], truths: &[GroundTruthBox], iou_thr: f64) -> f64 {
    let mut thresholds: Vec<f64> = dets.iter().map(|d| d.confidence).collect();
    thresholds.sort_by(|a, b| b.partial_cmp(a).unwrap());
    thresholds.dedup();
    let total = truths.len() as f64;
    let mut points: Vec<(f64, f64)> = Vec::new();
    for &t in &thresholds {
        let kept: Vec<Detection> = dets.iter().filter(|d| d.confidence >= t).cloned().collect();
        let tp = greedy_flags(&kept, truths, iou_thr).iter().filter(|(_, m)| *m).count() as f64;
        points.push((tp / total, tp / kept.len() as f64));
    }
    let mut recalls: Vec<f64> = points.iter().map(|p| p.0).collect();
    recalls.sort_by(|a, b| a.partial_cmp(b).unwrap());
    recalls.dedup();
    let mut ap = 0.0;
    let mut prev = 0.0;
    for r in recalls {
        if r == 0.0 {
            continue;
        }
        let p = points
            .iter()
            .filter(|(rr, _)| *rr >= r)
            .map(|(_, p)| *p)
            .fold(0.0, f64::max);
        ap += (r - prev) * p;
        prev = r;
    }
    ap
}

/// Random single-image AP instance on a small grid so overlaps are common.
/// Confidences are distinct.
pub fn ap_instance(rng: &mut Xoshiro256PlusPlus) -> (Vec<Detection>, Vec<GroundTruthBox>) {
    let n_truth = rng.gen_range(1..=8u32);
    let n_det = rng.gen_range(0..=15u32);
    let truths: Vec<GroundTruthBox> = (0..n_truth)
        .map(|_| GroundTruthBox {
            bbox: grid_box(rng, 24),
            class_id: 0,
        })
        .collect();
    let mut confs: Vec<u32> = (1..=1000).collect();
    let dets = (0..n_det)
        .map(|_| {
            let k = rng.gen_range(0..confs.len() as u32) as usize;
            let conf = confs.swap_remove(k) as f64 / 1000.0;
            let bbox = if rng.gen_bool(0.6) {
                let t = truths[rng.gen_range(0..n_truth) as usize].bbox;
                let j = |rng: &mut Xoshiro256PlusPlus, v: f64| (v + rng.gen_range(-2i32..=2) as f64).max(0.0);
                let (a, b) = (j(rng, t.x_min), j(rng, t.x_max));
                let (c, d) = (j(rng, t.y_min), j(rng, t.y_max));
                AbsBox::new(a.min(b), c.min(d), a.max(b) + 1.0, c.max(d) + 1.0).unwrap()
            } else {
                grid_box(rng, 24)
            };
            Detection {
                bbox,
                class_id: 0,
                confidence: conf,
            }
        })
        .collect();
    (dets, truths)
}

/// Standard normal two-sided critical value by bisection on a numerically
/// integrated density.
pub fn normal_critical(level: f64) -> f64 {
    let half_mass = |z: f64| simpson(|t| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt(), 0.0, z, 20_000);
    let (mut lo, mut hi) = (0.0, 6.0);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if 2.0 * half_mass(mid) < level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = if n % 2 == 1 { n + 1 } else { n };
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Fisher-z interval written with logarithms and exponentials.
pub fn fisher_ci_oracle(r: f64, n: usize, level: f64) -> (f64, f64) {
    let z = 0.5 * ((1.0 + r) / (1.0 - r)).ln();
    let se = 1.0 / ((n as f64) - 3.0).sqrt();
    let back = |v: f64| {
        let e = (2.0 * v).exp();
        (e - 1.0) / (e + 1.0)
    };
    let c = normal_critical(level);
    (back(z - c * se), back(z + c * se))
}

/// Two-sided p-value for `r` with `n` pairs by integrating the Student t
/// density after the substitution t = sqrt(df)·tan θ.
pub fn p_value_oracle(r: f64, n: usize) -> f64 {
    let df = (n - 2) as f64;
    let t = r.abs() * (df / (1.0 - r * r)).sqrt();
    let theta0 = (t / df.sqrt()).atan();
    let g = |th: f64| th.cos().powf(df - 1.0);
    let half = std::f64::consts::FRAC_PI_2;
    simpson(g, theta0, half, 200_000) / simpson(g, 0.0, half, 200_000)
}
