use std::collections::HashMap;
use std::fmt::Write as _;

use super::{AbsBox, AnnotError, Detection, DetectionSet};

pub const DETECTIONS_CSV_HEADER: &str = "image_id,x_min,y_min,x_max,y_max,confidence,class_id";

/// Reads a detection CSV and groups rows by image id.
///
/// Groups appear in order of first appearance; rows keep file order inside
/// each group. Row numbers in errors are 1-based file lines.
pub fn parse_detections_csv(text: &str) -> Result<Vec<DetectionSet>, AnnotError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let headers = reader
        .headers()
        .map_err(|e| AnnotError::Csv(e.to_string()))?
        .clone();
    let found = headers.iter().collect::<Vec<_>>().join(",");
    if found != DETECTIONS_CSV_HEADER {
        return Err(AnnotError::Schema {
            expected: DETECTIONS_CSV_HEADER.to_string(),
            found,
        });
    }

    let mut sets: Vec<DetectionSet> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| AnnotError::Csv(e.to_string()))?;
        let row = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let field = |i: usize, name: &str| -> Result<f64, AnnotError> {
            let raw = record.get(i).unwrap_or("");
            raw.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| AnnotError::Format {
                    line: row,
                    message: format!("{name} {raw:?} is not a number"),
                })
        };
        let (x_min, y_min, x_max, y_max) = (
            field(1, "x_min")?,
            field(2, "y_min")?,
            field(3, "x_max")?,
            field(4, "y_max")?,
        );
        let confidence = field(5, "confidence")?;
        if !(0.0..=1.0).contains(&confidence) {
            return Err(AnnotError::Range {
                line: row,
                field: "confidence",
                value: confidence,
            });
        }
        let class_raw = record.get(6).unwrap_or("");
        let class_id: u32 = class_raw.parse().map_err(|_| AnnotError::Format {
            line: row,
            message: format!("class_id {class_raw:?} is not a non-negative integer"),
        })?;
        let bbox = AbsBox::new(x_min, y_min, x_max, y_max).ok_or_else(|| AnnotError::Geometry {
            row,
            message: format!("invalid box ({x_min}, {y_min}, {x_max}, {y_max})"),
        })?;

        let image_id = record.get(0).unwrap_or("").to_string();
        let slot = *index.entry(image_id.clone()).or_insert_with(|| {
            sets.push(DetectionSet {
                image_id,
                detections: Vec::new(),
            });
            sets.len() - 1
        });
        sets[slot].detections.push(Detection {
            bbox,
            class_id,
            confidence,
        });
    }
    Ok(sets)
}

/// Writes detection sets in the same schema, LF line endings, shortest
/// round-trip number formatting.
pub fn write_detections_csv(sets: &[DetectionSet]) -> String {
    let mut out = String::from(DETECTIONS_CSV_HEADER);
    out.push('\n');
    for set in sets {
        for d in &set.detections {
            let b = &d.bbox;
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                set.image_id, b.x_min, b.y_min, b.x_max, b.y_max, d.confidence, d.class_id
            );
        }
    }
    out
}
