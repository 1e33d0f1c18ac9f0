use super::{AbsBox, AnnotError, GroundTruthBox, LabeledImage, NormBox};

/// De-normalizes a YOLO centre/extent box to pixel corners, clamped to the
/// image.
pub fn yolo_to_absolute(n: NormBox, width: u32, height: u32) -> AbsBox {
    let (w, h) = (width as f64, height as f64);
    AbsBox {
        x_min: (n.cx - n.w / 2.0) * w,
        y_min: (n.cy - n.h / 2.0) * h,
        x_max: (n.cx + n.w / 2.0) * w,
        y_max: (n.cy + n.h / 2.0) * h,
    }
    .clamp_to(w, h)
}

/// Inverse of [`yolo_to_absolute`] for boxes inside the image.
pub fn absolute_to_yolo(b: AbsBox, width: u32, height: u32) -> NormBox {
    let (w, h) = (width as f64, height as f64);
    let (cx, cy) = b.center();
    NormBox {
        cx: cx / w,
        cy: cy / h,
        w: b.width() / w,
        h: b.height() / h,
    }
}

/// Parses a YOLO label file (`class cx cy w h` per line). Blank lines and
/// lines starting with `#` are skipped.
pub fn parse_yolo_labels(
    text: &str,
    image_id: &str,
    width: u32,
    height: u32,
    class_count: u32,
) -> Result<LabeledImage, AnnotError> {
    let mut boxes = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 5 {
            return Err(AnnotError::Format {
                line: line_no,
                message: format!("expected 5 fields, found {}", tokens.len()),
            });
        }
        let class_id: u32 = tokens[0].parse().map_err(|_| AnnotError::Format {
            line: line_no,
            message: format!("class id {:?} is not a non-negative integer", tokens[0]),
        })?;
        if class_id >= class_count {
            return Err(AnnotError::UnknownClass(tokens[0].to_string()));
        }
        let mut values = [0.0f64; 4];
        for (slot, (name, tok)) in values
            .iter_mut()
            .zip(["cx", "cy", "w", "h"].into_iter().zip(&tokens[1..]))
        {
            let v: f64 = tok.parse().map_err(|_| AnnotError::Format {
                line: line_no,
                message: format!("{name} {tok:?} is not a number"),
            })?;
            if !(0.0..=1.0).contains(&v) {
                return Err(AnnotError::Range {
                    line: line_no,
                    field: name,
                    value: v,
                });
            }
            *slot = v;
        }
        let [cx, cy, w, h] = values;
        let norm = NormBox::new(cx, cy, w, h).ok_or(AnnotError::Format {
            line: line_no,
            message: "box has zero width or height".into(),
        })?;
        boxes.push(GroundTruthBox {
            bbox: yolo_to_absolute(norm, width, height),
            class_id,
        });
    }
    Ok(LabeledImage {
        image_id: image_id.to_string(),
        width,
        height,
        boxes,
    })
}
