use std::fmt::Write as _;
use std::path::Path;

use roxmltree::{Document, Node};

use super::{AbsBox, AnnotError, ClassList, GroundTruthBox, LabeledImage};

/// Parses one PASCAL VOC annotation document.
///
/// The image id is the `<filename>` with its extension removed. Coordinates
/// are read as reals; boxes that overshoot the image are clamped to it with a
/// warning. Unknown elements are ignored.
pub fn parse_voc(xml_text: &str, classes: &ClassList) -> Result<LabeledImage, AnnotError> {
    let doc = Document::parse(xml_text).map_err(|e| {
        let pos = e.pos();
        AnnotError::Xml {
            line: pos.row,
            col: pos.col,
            message: e.to_string(),
        }
    })?;
    let root = doc.root_element();
    if !root.has_tag_name("annotation") {
        return Err(AnnotError::MissingElement("annotation".into()));
    }

    let filename = child_text(root, "filename", "filename")?;
    let image_id = Path::new(filename.trim())
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();

    let size = child(root, "size", "size")?;
    let width = parse_dimension(size, "width")?;
    let height = parse_dimension(size, "height")?;

    let mut boxes = Vec::new();
    for object in root.children().filter(|n| n.has_tag_name("object")) {
        let name = child_text(object, "name", "object/name")?;
        let class_id = classes
            .id_of(name.trim())
            .ok_or_else(|| AnnotError::UnknownClass(name.trim().to_string()))?;
        let bndbox = child(object, "bndbox", "object/bndbox")?;
        let coord = |tag: &str| -> Result<f64, AnnotError> {
            let text = child_text(bndbox, tag, &format!("bndbox/{tag}"))?;
            text.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| AnnotError::InvalidValue {
                    field: tag.to_string(),
                    value: text.to_string(),
                })
        };
        let raw = AbsBox {
            x_min: coord("xmin")?,
            y_min: coord("ymin")?,
            x_max: coord("xmax")?,
            y_max: coord("ymax")?,
        };
        let clamped = raw.clamp_to(width as f64, height as f64);
        if clamped != raw {
            log::warn!(
                "{image_id}: box {} clamped to the {width}x{height} image",
                boxes.len() + 1
            );
        }
        if !clamped.is_valid() {
            return Err(AnnotError::Geometry {
                row: boxes.len() + 1,
                message: format!(
                    "inverted box ({}, {}, {}, {})",
                    raw.x_min, raw.y_min, raw.x_max, raw.y_max
                ),
            });
        }
        boxes.push(GroundTruthBox {
            bbox: clamped,
            class_id,
        });
    }

    Ok(LabeledImage {
        image_id,
        width,
        height,
        boxes,
    })
}

/// Serializes an annotation as VOC XML. Coordinates are rounded half-up to
/// integers; the filename is the image id with a `.ppm` extension.
pub fn write_voc(img: &LabeledImage, classes: &ClassList) -> String {
    let mut xml = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<annotation>\n");
    let _ = writeln!(
        xml,
        "  <filename>{}.ppm</filename>",
        escape(&img.image_id)
    );
    xml.push_str("  <size>\n");
    let _ = writeln!(xml, "    <width>{}</width>", img.width);
    let _ = writeln!(xml, "    <height>{}</height>", img.height);
    xml.push_str("    <depth>3</depth>\n  </size>\n");
    for gt in &img.boxes {
        let name = classes.name_of(gt.class_id).unwrap_or("unknown");
        xml.push_str("  <object>\n");
        let _ = writeln!(xml, "    <name>{}</name>", escape(name));
        xml.push_str("    <bndbox>\n");
        let b = &gt.bbox;
        for (tag, v) in [
            ("xmin", b.x_min),
            ("ymin", b.y_min),
            ("xmax", b.x_max),
            ("ymax", b.y_max),
        ] {
            let _ = writeln!(xml, "      <{tag}>{}</{tag}>", round_half_up(v));
        }
        xml.push_str("    </bndbox>\n  </object>\n");
    }
    xml.push_str("</annotation>\n");
    xml
}

fn round_half_up(v: f64) -> i64 {
    (v + 0.5).floor() as i64
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn child<'a, 'i>(node: Node<'a, 'i>, tag: &str, path: &str) -> Result<Node<'a, 'i>, AnnotError> {
    node.children()
        .find(|n| n.has_tag_name(tag))
        .ok_or_else(|| AnnotError::MissingElement(path.to_string()))
}

fn child_text<'a>(node: Node<'a, '_>, tag: &str, path: &str) -> Result<&'a str, AnnotError> {
    Ok(child(node, tag, path)?.text().unwrap_or(""))
}

fn parse_dimension(size: Node<'_, '_>, tag: &str) -> Result<u32, AnnotError> {
    let text = child_text(size, tag, &format!("size/{tag}"))?;
    let trimmed = text.trim();
    // Some tools write "512.0".
    let value = trimmed
        .parse::<u32>()
        .ok()
        .or_else(|| {
            trimmed
                .parse::<f64>()
                .ok()
                .filter(|v| v.fract() == 0.0 && *v >= 0.0 && *v <= u32::MAX as f64)
                .map(|v| v as u32)
        })
        .filter(|v| *v > 0);
    value.ok_or_else(|| AnnotError::InvalidValue {
        field: tag.to_string(),
        value: text.to_string(),
    })
}
