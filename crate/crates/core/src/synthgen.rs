//! Seeded synthetic scenes: flat-coloured discs on a plain background with
//! exact ground-truth boxes, plus a detector-noise model that turns ground
//! truth into scored detections.
//!
//! Randomness comes from xoshiro256++ seeded through SplitMix64
//! (`Xoshiro256PlusPlus::seed_from_u64`), and only fixed-width integer and
//! `f64` sampling is used, so output is identical across platforms for a
//! given seed.

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use thiserror::Error;

use crate::annot::{AbsBox, Detection, DetectionSet, GroundTruthBox, LabeledImage};
use crate::eval::iou;
use crate::imaging::ImageRGB;
use crate::phenotype::{ColorPalette, PhenotypeError, ScaleCalibration};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    #[error("could not place disc {placed} of {requested} after {attempts} attempts")]
    Placement {
        placed: usize,
        requested: usize,
        attempts: u64,
    },
    #[error("invalid scene: {0}")]
    Spec(String),
    #[error(transparent)]
    Calibration(#[from] PhenotypeError),
}

/// How discs get their palette class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClassAssignment {
    /// Uniform over classes 1..=7.
    Random,
    /// One class per disc, cycled if shorter than the disc count.
    Fixed(Vec<u8>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneSpec {
    pub image_id: String,
    pub width: u32,
    pub height: u32,
    pub cherry_count: usize,
    /// Inclusive integer radius range in pixels.
    pub radius_range: (u32, u32),
    pub classes: ClassAssignment,
    pub background: [u8; 3],
    /// Minimum gap between disc edges, in pixels.
    pub min_separation: f64,
    pub mm_per_pixel: f64,
    pub seed: u64,
}

impl Default for SceneSpec {
    fn default() -> Self {
        SceneSpec {
            image_id: "scene".into(),
            width: 512,
            height: 512,
            cherry_count: 20,
            radius_range: (10, 20),
            classes: ClassAssignment::Random,
            background: [235, 235, 225],
            min_separation: 4.0,
            mm_per_pixel: 0.25,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpec {
    /// Each box corner moves by up to this many pixels per axis.
    pub jitter_px: f64,
    /// Per-truth probability of a miss.
    pub drop_prob: f64,
    /// Drop exactly this many truths instead of sampling with `drop_prob`.
    pub drop_count: Option<usize>,
    /// Boxes placed away from every truth (IoU < 0.1).
    pub spurious_count: usize,
    pub confidence_range: (f64, f64),
    pub seed: u64,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        NoiseSpec {
            jitter_px: 0.0,
            drop_prob: 0.0,
            drop_count: None,
            spurious_count: 0,
            confidence_range: (0.5, 1.0),
            seed: 0,
        }
    }
}

/// A generated scene with its ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub image: ImageRGB,
    pub truth: LabeledImage,
    pub calibration: ScaleCalibration,
    /// Palette class painted into each disc, parallel to `truth.boxes`.
    pub disc_classes: Vec<u8>,
    /// `(cx, cy, radius)` per disc.
    pub discs: Vec<(u32, u32, u32)>,
}

/// Fills pixels whose centres lie within `r` of `(cx, cy)`.
pub fn paint_disc(img: &mut ImageRGB, cx: f64, cy: f64, r: f64, color: [u8; 3]) {
    let x0 = (cx - r).floor().max(0.0) as u32;
    let y0 = (cy - r).floor().max(0.0) as u32;
    let x1 = ((cx + r).ceil() as u32).min(img.width());
    let y1 = ((cy + r).ceil() as u32).min(img.height());
    for y in y0..y1 {
        let dy = y as f64 + 0.5 - cy;
        for x in x0..x1 {
            let dx = x as f64 + 0.5 - cx;
            if dx * dx + dy * dy <= r * r {
                img.put(x, y, color);
            }
        }
    }
}

pub fn generate_scene(spec: &SceneSpec, palette: &ColorPalette) -> Result<Scene, SynthError> {
    let calibration = ScaleCalibration::new(spec.mm_per_pixel)?;
    let (rmin, rmax) = spec.radius_range;
    if rmin == 0 || rmin > rmax {
        return Err(SynthError::Spec(format!("radius range {rmin}..={rmax}")));
    }
    if spec.width == 0 || spec.height == 0 {
        return Err(SynthError::Spec("image dimensions must be positive".into()));
    }
    if 2 * rmin > spec.width.min(spec.height) && spec.cherry_count > 0 {
        return Err(SynthError::Spec("smallest disc does not fit the image".into()));
    }
    if let ClassAssignment::Fixed(list) = &spec.classes {
        if list.is_empty() || list.iter().any(|c| !(1..=7).contains(c)) {
            return Err(SynthError::Spec("fixed classes must be non-empty and in 1..=7".into()));
        }
    }

    let mut rng = Xoshiro256PlusPlus::seed_from_u64(spec.seed);
    let budget = 10 * spec.cherry_count as u64 * 1000;
    let mut attempts = 0u64;
    let mut discs: Vec<(u32, u32, u32)> = Vec::with_capacity(spec.cherry_count);
    while discs.len() < spec.cherry_count {
        if attempts >= budget {
            return Err(SynthError::Placement {
                placed: discs.len(),
                requested: spec.cherry_count,
                attempts,
            });
        }
        attempts += 1;
        let r = rng.gen_range(rmin..=rmax);
        if 2 * r > spec.width || 2 * r > spec.height {
            continue;
        }
        let cx = rng.gen_range(r..=spec.width - r);
        let cy = rng.gen_range(r..=spec.height - r);
        let clear = discs.iter().all(|&(ox, oy, or)| {
            let (dx, dy) = (cx as f64 - ox as f64, cy as f64 - oy as f64);
            (dx * dx + dy * dy).sqrt() >= (r + or) as f64 + spec.min_separation
        });
        if clear {
            discs.push((cx, cy, r));
        }
    }

    let disc_classes: Vec<u8> = (0..discs.len())
        .map(|i| match &spec.classes {
            ClassAssignment::Random => rng.gen_range(1u8..=7),
            ClassAssignment::Fixed(list) => list[i % list.len()],
        })
        .collect();

    let mut image = ImageRGB::filled(spec.width, spec.height, spec.background);
    let mut boxes = Vec::with_capacity(discs.len());
    for (&(cx, cy, r), &class) in discs.iter().zip(&disc_classes) {
        let color = palette
            .reference(class)
            .expect("class validated above")
            .to_u8();
        paint_disc(&mut image, cx as f64, cy as f64, r as f64, color);
        boxes.push(GroundTruthBox {
            bbox: AbsBox {
                x_min: (cx - r) as f64,
                y_min: (cy - r) as f64,
                x_max: (cx + r) as f64,
                y_max: (cy + r) as f64,
            },
            class_id: 0,
        });
    }

    Ok(Scene {
        image,
        truth: LabeledImage {
            image_id: spec.image_id.clone(),
            width: spec.width,
            height: spec.height,
            boxes,
        },
        calibration,
        disc_classes,
        discs,
    })
}

fn sample_confidence(rng: &mut Xoshiro256PlusPlus, (lo, hi): (f64, f64)) -> f64 {
    let (lo, hi) = (lo.clamp(0.0, 1.0), hi.clamp(0.0, 1.0));
    if hi > lo {
        rng.gen_range(lo..=hi)
    } else {
        lo
    }
}

/// Simulates a detector run over `truth`.
///
/// Surviving truths come first, in truth order, with jittered corners;
/// spurious boxes follow.
pub fn perturb_detections(truth: &LabeledImage, noise: &NoiseSpec) -> DetectionSet {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(noise.seed);
    let n = truth.boxes.len();
    let (w, h) = (truth.width as f64, truth.height as f64);

    let mut dropped = vec![false; n];
    match noise.drop_count {
        Some(k) => {
            let mut idx: Vec<u32> = (0..n as u32).collect();
            for i in 0..k.min(n) {
                let j = rng.gen_range(i as u32..n as u32) as usize;
                idx.swap(i, j);
                dropped[idx[i] as usize] = true;
            }
        }
        None => {
            for d in dropped.iter_mut() {
                *d = rng.gen::<f64>() < noise.drop_prob;
            }
        }
    }

    let mut detections = Vec::new();
    for (gt, _) in truth.boxes.iter().zip(&dropped).filter(|(_, &d)| !d) {
        let b = gt.bbox;
        let mut jitter = || {
            if noise.jitter_px > 0.0 {
                rng.gen_range(-noise.jitter_px..=noise.jitter_px)
            } else {
                0.0
            }
        };
        let (ax, ay, bx, by) = (
            b.x_min + jitter(),
            b.y_min + jitter(),
            b.x_max + jitter(),
            b.y_max + jitter(),
        );
        let moved = AbsBox {
            x_min: ax.min(bx),
            y_min: ay.min(by),
            x_max: ax.max(bx),
            y_max: ay.max(by),
        }
        .clamp_to(w, h);
        detections.push(Detection {
            bbox: moved,
            class_id: gt.class_id,
            confidence: sample_confidence(&mut rng, noise.confidence_range),
        });
    }

    let (smin, smax) = truth
        .boxes
        .iter()
        .map(|g| g.bbox.width().max(g.bbox.height()))
        .fold(None, |acc: Option<(f64, f64)>, s| {
            Some(acc.map_or((s, s), |(lo, hi)| (lo.min(s), hi.max(s))))
        })
        .unwrap_or((20.0, 20.0));
    let (smin, smax) = (smin.min(w).min(h).max(1.0), smax.min(w).min(h).max(1.0));

    let mut spurious: Vec<AbsBox> = Vec::with_capacity(noise.spurious_count);
    for _ in 0..noise.spurious_count {
        let mut candidate = AbsBox {
            x_min: 0.0,
            y_min: 0.0,
            x_max: smin,
            y_max: smin,
        };
        for _ in 0..1000 {
            let s = if smax > smin { rng.gen_range(smin..=smax) } else { smin };
            let x = rng.gen_range(0.0..=(w - s));
            let y = rng.gen_range(0.0..=(h - s));
            candidate = AbsBox {
                x_min: x,
                y_min: y,
                x_max: x + s,
                y_max: y + s,
            };
            let clear = truth.boxes.iter().map(|g| &g.bbox).chain(&spurious).all(|o| iou(&candidate, o) < 0.1);
            if clear {
                break;
            }
        }
        spurious.push(candidate);
        detections.push(Detection {
            bbox: candidate,
            class_id: 0,
            confidence: sample_confidence(&mut rng, noise.confidence_range),
        });
    }

    DetectionSet {
        image_id: truth.image_id.clone(),
        detections,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{evaluate_dataset, EvalConfig};

    fn palette() -> ColorPalette {
        ColorPalette::default()
    }

    #[test]
    fn empty_scene_is_background() {
        let spec = SceneSpec {
            cherry_count: 0,
            width: 40,
            height: 30,
            ..SceneSpec::default()
        };
        let scene = generate_scene(&spec, &palette()).unwrap();
        assert!(scene.truth.boxes.is_empty());
        assert!(scene.image.pixels().iter().all(|p| *p == spec.background));
    }

    #[test]
    fn single_disc_box_is_twice_radius() {
        let spec = SceneSpec {
            cherry_count: 1,
            radius_range: (10, 10),
            seed: 99,
            ..SceneSpec::default()
        };
        let scene = generate_scene(&spec, &palette()).unwrap();
        let b = scene.truth.boxes[0].bbox;
        assert_eq!((b.width(), b.height()), (20.0, 20.0));
    }

    #[test]
    fn same_seed_same_scene() {
        let spec = SceneSpec {
            seed: 2024,
            ..SceneSpec::default()
        };
        let a = generate_scene(&spec, &palette()).unwrap();
        let b = generate_scene(&spec, &palette()).unwrap();
        assert_eq!(crate::imaging::write_ppm(&a.image), crate::imaging::write_ppm(&b.image));
        assert_eq!(a.truth, b.truth);
        let c = generate_scene(&SceneSpec { seed: 2025, ..spec }, &palette()).unwrap();
        assert_ne!(a.truth, c.truth);
    }

    #[test]
    fn discs_respect_separation_and_bounds() {
        let spec = SceneSpec {
            cherry_count: 40,
            min_separation: 3.0,
            seed: 5,
            ..SceneSpec::default()
        };
        let scene = generate_scene(&spec, &palette()).unwrap();
        for (i, &(x, y, r)) in scene.discs.iter().enumerate() {
            assert!(x >= r && y >= r && x + r <= spec.width && y + r <= spec.height);
            for &(ox, oy, or) in &scene.discs[i + 1..] {
                let d = ((x as f64 - ox as f64).powi(2) + (y as f64 - oy as f64).powi(2)).sqrt();
                assert!(d >= (r + or) as f64 + 3.0);
            }
        }
    }

    #[test]
    fn rasterized_extent_is_tight() {
        let spec = SceneSpec {
            cherry_count: 15,
            background: [0, 0, 0],
            classes: ClassAssignment::Fixed(vec![1]),
            seed: 77,
            ..SceneSpec::default()
        };
        let scene = generate_scene(&spec, &palette()).unwrap();
        let disc = palette().reference(1).unwrap().to_u8();
        for g in &scene.truth.boxes {
            let b = g.bbox;
            let (mut xs, mut ys) = (vec![], vec![]);
            for y in b.y_min as u32..b.y_max as u32 {
                for x in b.x_min as u32..b.x_max as u32 {
                    if scene.image.get(x, y) == disc {
                        xs.push(x);
                        ys.push(y);
                    }
                }
            }
            let lo_x = *xs.iter().min().unwrap() as f64;
            let hi_x = *xs.iter().max().unwrap() as f64 + 1.0;
            let lo_y = *ys.iter().min().unwrap() as f64;
            let hi_y = *ys.iter().max().unwrap() as f64 + 1.0;
            for (got, want) in [(lo_x, b.x_min), (hi_x, b.x_max), (lo_y, b.y_min), (hi_y, b.y_max)] {
                assert!((got - want).abs() < 1.0, "{got} vs {want}");
            }
        }
    }

    #[test]
    fn infeasible_packing_fails() {
        let spec = SceneSpec {
            width: 50,
            height: 50,
            cherry_count: 30,
            radius_range: (10, 10),
            ..SceneSpec::default()
        };
        assert!(matches!(
            generate_scene(&spec, &palette()),
            Err(SynthError::Placement { attempts: 300_000, .. })
        ));
    }

    #[test]
    fn zero_noise_reproduces_truth() {
        let scene = generate_scene(&SceneSpec { seed: 3, ..SceneSpec::default() }, &palette()).unwrap();
        let dets = perturb_detections(&scene.truth, &NoiseSpec::default());
        assert_eq!(dets.detections.len(), scene.truth.boxes.len());
        for (d, g) in dets.detections.iter().zip(&scene.truth.boxes) {
            assert_eq!(d.bbox, g.bbox);
            assert!((0.5..=1.0).contains(&d.confidence));
        }
        let r = evaluate_dataset(&[dets], &[scene.truth.clone()], &EvalConfig { ct: 0.0, ..EvalConfig::default() }).unwrap();
        assert_eq!(r.tp, r.tc);
    }

    #[test]
    fn drop_everything() {
        let scene = generate_scene(&SceneSpec { seed: 4, ..SceneSpec::default() }, &palette()).unwrap();
        let dets = perturb_detections(&scene.truth, &NoiseSpec { drop_prob: 1.0, ..NoiseSpec::default() });
        assert!(dets.detections.is_empty());
        let r = evaluate_dataset(&[dets], &[scene.truth.clone()], &EvalConfig::default()).unwrap();
        assert_eq!(r.fn_count, r.tc);
    }

    #[test]
    fn jitter_stays_within_bound() {
        let scene = generate_scene(&SceneSpec { seed: 8, ..SceneSpec::default() }, &palette()).unwrap();
        let noise = NoiseSpec { jitter_px: 1.5, seed: 1, ..NoiseSpec::default() };
        let dets = perturb_detections(&scene.truth, &noise);
        for (d, g) in dets.detections.iter().zip(&scene.truth.boxes) {
            assert!(d.bbox.is_valid());
            assert!((d.bbox.x_min - g.bbox.x_min).abs() <= 1.5);
            assert!((d.bbox.y_max - g.bbox.y_max).abs() <= 1.5);
        }
        assert_eq!(perturb_detections(&scene.truth, &noise), dets);
    }
}
