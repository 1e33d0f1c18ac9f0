//! Bounding-box types and the annotation/detection file formats.
//!
//! Everything downstream works in absolute pixel corner coordinates
//! ([`AbsBox`]); the YOLO reader converts from normalized centre/extent on the
//! way in.

mod detections_csv;
mod voc;
mod yolo;

pub use detections_csv::{parse_detections_csv, write_detections_csv, DETECTIONS_CSV_HEADER};
pub use voc::{parse_voc, write_voc};
pub use yolo::{absolute_to_yolo, parse_yolo_labels, yolo_to_absolute};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnnotError {
    #[error("malformed XML at line {line}, column {col}: {message}")]
    Xml { line: u32, col: u32, message: String },
    #[error("missing required element <{0}>")]
    MissingElement(String),
    #[error("invalid value for <{field}>: {value:?}")]
    InvalidValue { field: String, value: String },
    #[error("unknown class {0:?}")]
    UnknownClass(String),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("line {line}: {field} = {value} is outside [0, 1]")]
    Range { line: usize, field: &'static str, value: f64 },
    #[error("row {row}: {message}")]
    Geometry { row: usize, message: String },
    #[error("detection CSV header mismatch: expected {expected:?}, found {found:?}")]
    Schema { expected: String, found: String },
    #[error("CSV: {0}")]
    Csv(String),
}

/// Axis-aligned box in absolute pixel corner coordinates. Origin is the
/// top-left corner of the image, x grows rightward and y downward.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbsBox {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
}

impl AbsBox {
    /// Returns `None` unless all coordinates are finite, non-negative and
    /// ordered.
    pub fn new(x_min: f64, y_min: f64, x_max: f64, y_max: f64) -> Option<Self> {
        let b = AbsBox {
            x_min,
            y_min,
            x_max,
            y_max,
        };
        b.is_valid().then_some(b)
    }

    pub fn is_valid(&self) -> bool {
        [self.x_min, self.y_min, self.x_max, self.y_max]
            .iter()
            .all(|v| v.is_finite() && *v >= 0.0)
            && self.x_min <= self.x_max
            && self.y_min <= self.y_max
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn center(&self) -> (f64, f64) {
        (
            (self.x_min + self.x_max) / 2.0,
            (self.y_min + self.y_max) / 2.0,
        )
    }

    /// Clamps every coordinate into `[0, width] x [0, height]`.
    pub fn clamp_to(&self, width: f64, height: f64) -> AbsBox {
        AbsBox {
            x_min: self.x_min.clamp(0.0, width),
            y_min: self.y_min.clamp(0.0, height),
            x_max: self.x_max.clamp(0.0, width),
            y_max: self.y_max.clamp(0.0, height),
        }
    }

    pub fn scaled(&self, factor: f64) -> AbsBox {
        AbsBox {
            x_min: self.x_min * factor,
            y_min: self.y_min * factor,
            x_max: self.x_max * factor,
            y_max: self.y_max * factor,
        }
    }
}

/// YOLO-style normalized box: centre and extent as fractions of the image
/// width and height.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormBox {
    pub cx: f64,
    pub cy: f64,
    pub w: f64,
    pub h: f64,
}

impl NormBox {
    pub fn new(cx: f64, cy: f64, w: f64, h: f64) -> Option<Self> {
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        (unit(cx) && unit(cy) && unit(w) && unit(h) && w > 0.0 && h > 0.0)
            .then_some(NormBox { cx, cy, w, h })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundTruthBox {
    pub bbox: AbsBox,
    pub class_id: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detection {
    pub bbox: AbsBox,
    pub class_id: u32,
    pub confidence: f64,
}

/// One annotated image: identifier, pixel dimensions and its boxes in
/// document order.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledImage {
    pub image_id: String,
    pub width: u32,
    pub height: u32,
    pub boxes: Vec<GroundTruthBox>,
}

/// Detections for one image, in file order.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionSet {
    pub image_id: String,
    pub detections: Vec<Detection>,
}

/// Ordered class names; the position of a name is its class id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassList {
    names: Vec<String>,
}

impl ClassList {
    pub fn new<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        ClassList {
            names: names.into_iter().map(Into::into).collect(),
        }
    }

    pub fn id_of(&self, name: &str) -> Option<u32> {
        self.names.iter().position(|n| n == name).map(|i| i as u32)
    }

    pub fn name_of(&self, id: u32) -> Option<&str> {
        self.names.get(id as usize).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

impl Default for ClassList {
    fn default() -> Self {
        ClassList::new(["cherry"])
    }
}
