//! Per-fruit traits: size in pixels and millimetres, colour class from the
//! mean RGB of the box centre, stem colour above the box, top-50 flags and
//! per-image summaries.

use thiserror::Error;

use crate::annot::{AbsBox, DetectionSet};
use crate::imaging::{crop, mean_rgb, ImageError, ImageRGB, MeanRGB};

const DEFAULT_PALETTE: &str = include_str!("../data/ctifl_palette.txt");

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PhenotypeError {
    #[error("cherry {cherry_id}: degenerate box with zero width or height")]
    Degenerate { cherry_id: usize },
    #[error("cherry {cherry_id}: {source}")]
    Image {
        cherry_id: usize,
        #[source]
        source: ImageError,
    },
    #[error("no records to summarize")]
    EmptyImage,
    #[error("palette line {line}: {message}")]
    Palette { line: usize, message: String },
    #[error("mm_per_pixel must be finite and positive, got {0}")]
    Calibration(f64),
    #[error("{name} = {value} is out of range")]
    Parameter { name: &'static str, value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleCalibration {
    mm_per_pixel: f64,
}

impl ScaleCalibration {
    pub fn new(mm_per_pixel: f64) -> Result<Self, PhenotypeError> {
        if mm_per_pixel.is_finite() && mm_per_pixel > 0.0 {
            Ok(ScaleCalibration { mm_per_pixel })
        } else {
            Err(PhenotypeError::Calibration(mm_per_pixel))
        }
    }

    pub fn mm_per_pixel(&self) -> f64 {
        self.mm_per_pixel
    }
}

/// Seven reference colours keyed by class id 1..=7, stored in id order.
#[derive(Debug, Clone, PartialEq)]
pub struct ColorPalette {
    classes: [MeanRGB; 7],
}

impl ColorPalette {
    /// Accepts the seven entries in any order.
    pub fn new(entries: &[(u8, MeanRGB)]) -> Result<Self, PhenotypeError> {
        let bad = |message: String| PhenotypeError::Palette { line: 0, message };
        if entries.len() != 7 {
            return Err(bad(format!("expected 7 classes, found {}", entries.len())));
        }
        let mut slots: [Option<MeanRGB>; 7] = [None; 7];
        for &(id, color) in entries {
            if !(1..=7).contains(&id) {
                return Err(bad(format!("class id {id} is outside 1..=7")));
            }
            if slots[id as usize - 1].replace(color).is_some() {
                return Err(bad(format!("class id {id} appears twice")));
            }
        }
        let classes = slots.map(|c| c.expect("all seven ids present"));
        for i in 0..7 {
            for j in i + 1..7 {
                if classes[i] == classes[j] {
                    return Err(bad(format!(
                        "classes {} and {} share a reference colour",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(ColorPalette { classes })
    }

    /// Parses `class_id r g b` lines; `#` comments and blank lines skipped.
    pub fn parse(text: &str) -> Result<Self, PhenotypeError> {
        let mut entries = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| PhenotypeError::Palette {
                line: idx + 1,
                message,
            };
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.len() != 4 {
                return Err(err(format!("expected 4 fields, found {}", tokens.len())));
            }
            let id: u8 = tokens[0]
                .parse()
                .map_err(|_| err(format!("bad class id {:?}", tokens[0])))?;
            let mut rgb = [0.0; 3];
            for (slot, tok) in rgb.iter_mut().zip(&tokens[1..]) {
                *slot = tok
                    .parse::<f64>()
                    .ok()
                    .filter(|v| (0.0..=255.0).contains(v))
                    .ok_or_else(|| err(format!("channel {tok:?} is not in [0, 255]")))?;
            }
            entries.push((id, MeanRGB::new(rgb[0], rgb[1], rgb[2])));
        }
        ColorPalette::new(&entries)
    }

    pub fn reference(&self, class_id: u8) -> Option<MeanRGB> {
        (1..=7)
            .contains(&class_id)
            .then(|| self.classes[class_id as usize - 1])
    }

    /// `(class_id, reference)` in id order.
    pub fn entries(&self) -> impl Iterator<Item = (u8, MeanRGB)> + '_ {
        self.classes.iter().enumerate().map(|(i, c)| (i as u8 + 1, *c))
    }
}

impl Default for ColorPalette {
    fn default() -> Self {
        ColorPalette::parse(DEFAULT_PALETTE).expect("bundled palette is valid")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxSize {
    pub size_px: f64,
    pub width_px: f64,
    pub height_px: f64,
    pub size_mm: f64,
    pub width_mm: f64,
    pub height_mm: f64,
}

/// Largest side of the box, in pixels and millimetres.
pub fn box_size(b: &AbsBox, cal: ScaleCalibration) -> Option<BoxSize> {
    let (w, h) = (b.width(), b.height());
    if w <= 0.0 || h <= 0.0 {
        return None;
    }
    let s = w.max(h);
    let k = cal.mm_per_pixel;
    Some(BoxSize {
        size_px: s,
        width_px: w,
        height_px: h,
        size_mm: s * k,
        width_mm: w * k,
        height_mm: h * k,
    })
}

/// The box scaled about its centre by `shrink` on both axes.
pub fn central_region(b: &AbsBox, shrink: f64) -> AbsBox {
    let (cx, cy) = b.center();
    let hw = b.width() * shrink / 2.0;
    let hh = b.height() * shrink / 2.0;
    AbsBox {
        x_min: cx - hw,
        y_min: cy - hh,
        x_max: cx + hw,
        y_max: cy + hh,
    }
}

/// Band directly above the box, `rise` box-heights tall, clipped to the
/// image. `None` when nothing is left (box touching the top edge).
pub fn stem_region(b: &AbsBox, image_w: u32, image_h: u32, rise: f64) -> Option<AbsBox> {
    let region = AbsBox {
        x_min: b.x_min,
        y_min: b.y_min - rise * b.height(),
        x_max: b.x_max,
        y_max: b.y_min,
    }
    .clamp_to(image_w as f64, image_h as f64);
    (region.width() > 0.0 && region.height() > 0.0).then_some(region)
}

/// Nearest reference colour by Euclidean RGB distance; ties go to the lower
/// class id.
pub fn classify_color(c: &MeanRGB, palette: &ColorPalette) -> u8 {
    let mut best = (1u8, f64::INFINITY);
    for (id, reference) in palette.entries() {
        let d = c.distance_sq(&reference);
        if d < best.1 {
            best = (id, d);
        }
    }
    best.0
}

#[derive(Debug, Clone, PartialEq)]
pub struct CherryRecord {
    pub image_id: String,
    /// 1-based rank by descending detection confidence.
    pub cherry_id: usize,
    pub confidence: f64,
    pub bbox: AbsBox,
    pub size: BoxSize,
    pub mean_rgb: MeanRGB,
    pub color_class: u8,
    pub stem_rgb: Option<MeanRGB>,
    pub central_box: AbsBox,
    pub scaled_box: AbsBox,
    pub top50: bool,
}

/// Flags the `k` largest records by `size_mm`; ties prefer higher
/// confidence, then lower cherry id.
pub fn top_k_by_size(records: &mut [CherryRecord], k: usize) {
    let mut order: Vec<usize> = (0..records.len()).collect();
    order.sort_by(|&a, &b| {
        let (ra, rb) = (&records[a], &records[b]);
        rb.size
            .size_mm
            .total_cmp(&ra.size.size_mm)
            .then(rb.confidence.total_cmp(&ra.confidence))
            .then(ra.cherry_id.cmp(&rb.cherry_id))
    });
    for r in records.iter_mut() {
        r.top50 = false;
    }
    for &i in order.iter().take(k) {
        records[i].top50 = true;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractConfig {
    pub shrink: f64,
    pub rise: f64,
    pub top_k: usize,
}

impl Default for ExtractConfig {
    fn default() -> Self {
        ExtractConfig {
            shrink: 0.5,
            rise: 0.5,
            top_k: 50,
        }
    }
}

/// One record per detection. Colour comes from the central region of the
/// box, stem colour from the band above it.
pub fn extract_records(
    image: &ImageRGB,
    dets: &DetectionSet,
    cal: ScaleCalibration,
    palette: &ColorPalette,
    config: &ExtractConfig,
) -> Result<Vec<CherryRecord>, PhenotypeError> {
    if !(config.shrink > 0.0 && config.shrink <= 1.0) {
        return Err(PhenotypeError::Parameter {
            name: "shrink",
            value: config.shrink,
        });
    }
    if !(config.rise > 0.0 && config.rise.is_finite()) {
        return Err(PhenotypeError::Parameter {
            name: "rise",
            value: config.rise,
        });
    }

    let mut order: Vec<usize> = (0..dets.detections.len()).collect();
    order.sort_by(|&a, &b| {
        dets.detections[b]
            .confidence
            .total_cmp(&dets.detections[a].confidence)
    });

    let mut records = Vec::with_capacity(order.len());
    for (rank, &i) in order.iter().enumerate() {
        let cherry_id = rank + 1;
        let det = &dets.detections[i];
        let size = box_size(&det.bbox, cal).ok_or(PhenotypeError::Degenerate { cherry_id })?;
        let image_err = |source| PhenotypeError::Image { cherry_id, source };

        let central_box = central_region(&det.bbox, config.shrink);
        let color = mean_rgb(&crop(image, &central_box).map_err(image_err)?);
        let stem_rgb = match stem_region(&det.bbox, image.width(), image.height(), config.rise) {
            Some(region) => Some(mean_rgb(&crop(image, &region).map_err(image_err)?)),
            None => None,
        };

        records.push(CherryRecord {
            image_id: dets.image_id.clone(),
            cherry_id,
            confidence: det.confidence,
            bbox: det.bbox,
            size,
            mean_rgb: color,
            color_class: classify_color(&color, palette),
            stem_rgb,
            central_box,
            scaled_box: det.bbox.scaled(cal.mm_per_pixel),
            top50: false,
        });
    }
    top_k_by_size(&mut records, config.top_k);
    Ok(records)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub image_id: String,
    pub count: usize,
    pub avg_size_mm: f64,
    pub avg_size_mm_top50: f64,
    pub avg_rgb: MeanRGB,
    pub avg_rgb_top50: MeanRGB,
    pub stem_avg_rgb: Option<MeanRGB>,
    pub timestamp: String,
}

fn average<'a>(it: impl Iterator<Item = (&'a MeanRGB, f64)>) -> Option<(MeanRGB, f64)> {
    let mut n = 0usize;
    let mut acc = (0.0, 0.0, 0.0, 0.0);
    for (c, s) in it {
        n += 1;
        acc = (acc.0 + c.r, acc.1 + c.g, acc.2 + c.b, acc.3 + s);
    }
    (n > 0).then(|| {
        let k = n as f64;
        (MeanRGB::new(acc.0 / k, acc.1 / k, acc.2 / k), acc.3 / k)
    })
}

/// Per-image means over all records and over the top-50 subset.
pub fn summarize(records: &[CherryRecord], timestamp: &str) -> Result<SummaryRow, PhenotypeError> {
    let first = records.first().ok_or(PhenotypeError::EmptyImage)?;
    let (avg_rgb, avg_size_mm) =
        average(records.iter().map(|r| (&r.mean_rgb, r.size.size_mm))).expect("non-empty");
    let (avg_rgb_top50, avg_size_mm_top50) = average(
        records
            .iter()
            .filter(|r| r.top50)
            .map(|r| (&r.mean_rgb, r.size.size_mm)),
    )
    .unwrap_or((avg_rgb, avg_size_mm));
    let stem_avg_rgb = average(records.iter().filter_map(|r| r.stem_rgb.as_ref().map(|s| (s, 0.0))))
        .map(|(c, _)| c);
    Ok(SummaryRow {
        image_id: first.image_id.clone(),
        count: records.len(),
        avg_size_mm,
        avg_size_mm_top50,
        avg_rgb,
        avg_rgb_top50,
        stem_avg_rgb,
        timestamp: timestamp.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annot::Detection;
    use rand::{Rng, SeedableRng};
    use rand_xoshiro::Xoshiro256PlusPlus;

    fn bx(a: f64, b: f64, c: f64, d: f64) -> AbsBox {
        AbsBox::new(a, b, c, d).unwrap()
    }

    fn record(cherry_id: usize, size_mm: f64, confidence: f64) -> CherryRecord {
        let b = bx(0.0, 0.0, size_mm, size_mm);
        CherryRecord {
            image_id: "img".into(),
            cherry_id,
            confidence,
            bbox: b,
            size: box_size(&b, ScaleCalibration::new(1.0).unwrap()).unwrap(),
            mean_rgb: MeanRGB::new(10.0, 20.0, 30.0),
            color_class: 1,
            stem_rgb: None,
            central_box: b,
            scaled_box: b,
            top50: false,
        }
    }

    #[test]
    fn size_of_rectangle_and_square() {
        let cal = ScaleCalibration::new(0.3).unwrap();
        let s = box_size(&bx(10.0, 10.0, 110.0, 90.0), cal).unwrap();
        assert_eq!(s.size_px, 100.0);
        assert!((s.size_mm - 30.0).abs() < 1e-12);
        assert!((s.height_mm - 24.0).abs() < 1e-12);
        let sq = box_size(&bx(0.0, 0.0, 7.0, 7.0), cal).unwrap();
        assert_eq!((sq.size_px, sq.width_px, sq.height_px), (7.0, 7.0, 7.0));
        assert!(box_size(&bx(1.0, 1.0, 1.0, 5.0), cal).is_none());
    }

    #[test]
    fn calibration_must_be_positive() {
        assert!(ScaleCalibration::new(0.0).is_err());
        assert!(ScaleCalibration::new(f64::INFINITY).is_err());
    }

    #[test]
    fn central_region_cases() {
        let b = bx(3.0, 5.0, 11.0, 9.0);
        assert_eq!(central_region(&b, 1.0), b);
        assert_eq!(central_region(&bx(0.0, 0.0, 4.0, 4.0), 0.5), bx(1.0, 1.0, 3.0, 3.0));
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(3);
        for _ in 0..100 {
            let x = rng.gen_range(0.0..100.0);
            let y = rng.gen_range(0.0..100.0);
            let b = bx(x, y, x + rng.gen_range(0.1..50.0), y + rng.gen_range(0.1..50.0));
            let s: f64 = rng.gen_range(0.01..=1.0);
            let c = central_region(&b, s);
            assert!((c.area() - s * s * b.area()).abs() <= 1e-9 * b.area().max(1.0));
        }
    }

    #[test]
    fn stem_region_cases() {
        assert_eq!(
            stem_region(&bx(10.0, 50.0, 30.0, 90.0), 100, 100, 0.5),
            Some(bx(10.0, 30.0, 30.0, 50.0))
        );
        assert_eq!(stem_region(&bx(10.0, 0.0, 30.0, 40.0), 100, 100, 0.5), None);
        // Partially clipped at the top.
        assert_eq!(
            stem_region(&bx(0.0, 5.0, 10.0, 25.0), 100, 100, 0.5),
            Some(bx(0.0, 0.0, 10.0, 5.0))
        );
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(4);
        for _ in 0..100 {
            let (w, h) = (rng.gen_range(1..300u32), rng.gen_range(1..300u32));
            let x = rng.gen_range(0.0..w as f64);
            let y = rng.gen_range(0.0..h as f64);
            let b = bx(x, y, rng.gen_range(x..=w as f64), rng.gen_range(y..=h as f64));
            if let Some(s) = stem_region(&b, w, h, rng.gen_range(0.01..3.0)) {
                assert!(s.is_valid());
                assert!(s.x_max <= w as f64 && s.y_max <= h as f64);
                assert!(s.y_max <= b.y_min);
            }
        }
    }

    #[test]
    fn classify_exact_and_tie() {
        let p = ColorPalette::default();
        assert_eq!(classify_color(&p.reference(4).unwrap(), &p), 4);
        let (c2, c3) = (p.reference(2).unwrap(), p.reference(3).unwrap());
        let mid = MeanRGB::new((c2.r + c3.r) / 2.0, (c2.g + c3.g) / 2.0, (c2.b + c3.b) / 2.0);
        assert_eq!(c2.distance_sq(&mid), c3.distance_sq(&mid));
        assert_eq!(classify_color(&mid, &p), 2);
    }

    #[test]
    fn classify_matches_brute_force_scan() {
        let p = ColorPalette::default();
        let refs: Vec<(u8, MeanRGB)> = p.entries().collect();
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(5);
        for _ in 0..1000 {
            let c = MeanRGB::new(
                rng.gen_range(0.0..=255.0),
                rng.gen_range(0.0..=255.0),
                rng.gen_range(0.0..=255.0),
            );
            let dists: Vec<f64> = refs
                .iter()
                .map(|(_, r)| ((c.r - r.r).powi(2) + (c.g - r.g).powi(2) + (c.b - r.b).powi(2)).sqrt())
                .collect();
            let min = dists.iter().cloned().fold(f64::INFINITY, f64::min);
            let want = refs[dists.iter().position(|&d| d == min).unwrap()].0;
            assert_eq!(classify_color(&c, &p), want);
        }
    }

    #[test]
    fn classify_ignores_entry_order() {
        let mut entries: Vec<(u8, MeanRGB)> = ColorPalette::default().entries().collect();
        entries.reverse();
        let shuffled = ColorPalette::new(&entries).unwrap();
        let c = MeanRGB::new(150.0, 30.0, 30.0);
        assert_eq!(classify_color(&c, &shuffled), classify_color(&c, &ColorPalette::default()));
    }

    #[test]
    fn palette_validation() {
        assert!(ColorPalette::parse("1 0 0 0\n").is_err());
        let dup = "1 1 1 1\n2 2 2 2\n3 3 3 3\n4 4 4 4\n5 5 5 5\n6 6 6 6\n6 7 7 7\n";
        assert!(ColorPalette::parse(dup).is_err());
        let same = "1 1 1 1\n2 2 2 2\n3 3 3 3\n4 4 4 4\n5 5 5 5\n6 6 6 6\n7 6 6 6\n";
        assert!(ColorPalette::parse(same).is_err());
        let out_of_range = "1 1 1 1\n2 2 2 2\n3 3 3 3\n4 4 4 4\n5 5 5 5\n6 6 6 6\n7 7 7 300\n";
        assert!(matches!(
            ColorPalette::parse(out_of_range),
            Err(PhenotypeError::Palette { line: 7, .. })
        ));
    }

    #[test]
    fn top_k_cases() {
        let mut few: Vec<_> = (1..=40).map(|i| record(i, i as f64, 0.5)).collect();
        top_k_by_size(&mut few, 50);
        assert!(few.iter().all(|r| r.top50));

        let mut many: Vec<_> = (1..=60).map(|i| record(i, i as f64, 0.5)).collect();
        top_k_by_size(&mut many, 50);
        let flagged: Vec<f64> = many.iter().filter(|r| r.top50).map(|r| r.size.size_mm).collect();
        assert_eq!(flagged, (11..=60).map(|i| i as f64).collect::<Vec<_>>());
    }

    #[test]
    fn top_k_matches_sort_oracle() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(6);
        for _ in 0..50 {
            let n = rng.gen_range(0..90);
            let k = rng.gen_range(1..60);
            let mut recs: Vec<_> = (1..=n)
                .map(|i| record(i, rng.gen_range(1..8) as f64, rng.gen_range(0..4) as f64 / 4.0))
                .collect();
            let mut sorted = recs.clone();
            sorted.sort_by(|a, b| {
                (b.size.size_mm, b.confidence, std::cmp::Reverse(b.cherry_id))
                    .partial_cmp(&(a.size.size_mm, a.confidence, std::cmp::Reverse(a.cherry_id)))
                    .unwrap()
            });
            let want: std::collections::BTreeSet<usize> =
                sorted.iter().take(k).map(|r| r.cherry_id).collect();
            top_k_by_size(&mut recs, k);
            let got: std::collections::BTreeSet<usize> =
                recs.iter().filter(|r| r.top50).map(|r| r.cherry_id).collect();
            assert_eq!(got, want);
            assert_eq!(got.len(), k.min(n));
        }
    }

    #[test]
    fn extract_uniform_disc() {
        let palette = ColorPalette::default();
        let color = palette.reference(3).unwrap().to_u8();
        let mut img = ImageRGB::filled(100, 100, [240, 240, 230]);
        let (cx, cy, r) = (50.0, 60.0, 20.0);
        for y in 0..100u32 {
            for x in 0..100u32 {
                let (dx, dy) = (x as f64 + 0.5 - cx, y as f64 + 0.5 - cy);
                if dx * dx + dy * dy <= r * r {
                    img.put(x, y, color);
                }
            }
        }
        let dets = DetectionSet {
            image_id: "disc".into(),
            detections: vec![Detection {
                bbox: bx(cx - r, cy - r, cx + r, cy + r),
                class_id: 0,
                confidence: 0.97,
            }],
        };
        let cal = ScaleCalibration::new(0.25).unwrap();
        let recs = extract_records(&img, &dets, cal, &palette, &ExtractConfig::default()).unwrap();
        assert_eq!(recs.len(), 1);
        let rec = &recs[0];
        assert_eq!(rec.mean_rgb, MeanRGB::from(color));
        assert_eq!(rec.color_class, 3);
        assert_eq!(rec.size.size_mm, 10.0);
        assert_eq!(rec.stem_rgb, Some(MeanRGB::new(240.0, 240.0, 230.0)));
        assert!(rec.top50);
        assert_eq!(rec.scaled_box, bx(7.5, 10.0, 17.5, 20.0));
    }

    #[test]
    fn extract_orders_by_confidence_and_handles_empty() {
        let img = ImageRGB::filled(50, 50, [1, 2, 3]);
        let cal = ScaleCalibration::new(1.0).unwrap();
        let p = ColorPalette::default();
        let empty = DetectionSet {
            image_id: "e".into(),
            detections: vec![],
        };
        assert!(extract_records(&img, &empty, cal, &p, &ExtractConfig::default())
            .unwrap()
            .is_empty());
        let dets = DetectionSet {
            image_id: "e".into(),
            detections: vec![
                Detection { bbox: bx(0.0, 0.0, 5.0, 5.0), class_id: 0, confidence: 0.4 },
                Detection { bbox: bx(10.0, 10.0, 20.0, 20.0), class_id: 0, confidence: 0.8 },
            ],
        };
        let recs = extract_records(&img, &dets, cal, &p, &ExtractConfig::default()).unwrap();
        assert_eq!(recs[0].confidence, 0.8);
        assert_eq!(recs[0].cherry_id, 1);
        assert_eq!(recs[1].cherry_id, 2);
        assert_eq!(recs[1].stem_rgb, None);
    }

    #[test]
    fn extract_reports_cherry_context() {
        let img = ImageRGB::filled(10, 10, [0, 0, 0]);
        let dets = DetectionSet {
            image_id: "e".into(),
            detections: vec![
                Detection { bbox: bx(0.0, 0.0, 5.0, 5.0), class_id: 0, confidence: 0.9 },
                Detection { bbox: bx(30.0, 30.0, 40.0, 40.0), class_id: 0, confidence: 0.5 },
            ],
        };
        let err = extract_records(
            &img,
            &dets,
            ScaleCalibration::new(1.0).unwrap(),
            &ColorPalette::default(),
            &ExtractConfig::default(),
        )
        .unwrap_err();
        assert!(matches!(err, PhenotypeError::Image { cherry_id: 2, .. }));
    }

    #[test]
    fn doubling_calibration_doubles_sizes_only() {
        let img = ImageRGB::filled(60, 60, [180, 30, 40]);
        let dets = DetectionSet {
            image_id: "c".into(),
            detections: vec![Detection { bbox: bx(10.0, 20.0, 30.0, 35.0), class_id: 0, confidence: 0.9 }],
        };
        let p = ColorPalette::default();
        let one = extract_records(&img, &dets, ScaleCalibration::new(0.2).unwrap(), &p, &ExtractConfig::default()).unwrap();
        let two = extract_records(&img, &dets, ScaleCalibration::new(0.4).unwrap(), &p, &ExtractConfig::default()).unwrap();
        assert!((two[0].size.size_mm - 2.0 * one[0].size.size_mm).abs() < 1e-12);
        assert_eq!(two[0].color_class, one[0].color_class);
    }

    #[test]
    fn summarize_cases() {
        assert_eq!(summarize(&[], "t"), Err(PhenotypeError::EmptyImage));
        let mut single = vec![record(1, 12.0, 0.9)];
        top_k_by_size(&mut single, 50);
        let s = summarize(&single, "2024-01-01T00:00:00Z").unwrap();
        assert_eq!(s.count, 1);
        assert_eq!(s.avg_size_mm, 12.0);
        assert_eq!(s.avg_size_mm_top50, 12.0);
        assert_eq!(s.avg_rgb, single[0].mean_rgb);
        assert_eq!(s.stem_avg_rgb, None);

        let mut pair = vec![record(1, 20.0, 0.9), record(2, 30.0, 0.8)];
        pair[1].stem_rgb = Some(MeanRGB::new(1.0, 2.0, 3.0));
        top_k_by_size(&mut pair, 1);
        let s = summarize(&pair, "t").unwrap();
        assert_eq!(s.avg_size_mm, 25.0);
        assert_eq!(s.avg_size_mm_top50, 30.0);
        assert_eq!(s.stem_avg_rgb, Some(MeanRGB::new(1.0, 2.0, 3.0)));
    }
}
