//! Detection-quality evaluation and fruit phenotyping over bounding-box
//! detections.
//!
//! The crate is detector-agnostic: it consumes annotations (PASCAL VOC XML,
//! YOLO label text) and per-image detection CSVs, scores detections against
//! ground truth, measures per-fruit size and colour from the source image, and
//! writes the per-image and per-fruit report sheets.
//!
//! Modules, bottom-up:
//!
//! * [`annot`]: box types and the three annotation/detection formats.
//! * [`imaging`]: 8-bit RGB rasters, binary PPM, cropping, mean colour.
//! * [`eval`]: IoU, NMS, matching, PR curves, AP and evaluation reports.
//! * [`phenotype`]: size, colour class, stem colour, top-50 flags, summaries.
//! * [`stats`]: Pearson correlation, Fisher CI, p-value, OLS fit.
//! * [`reporting`]: the four CSV sheets and the evaluation table.
//! * [`synthgen`]: seeded synthetic disc scenes and detector noise.
//! * [`cli`]: the `cherrymetrics` command-line tool (feature `cli`, on by
//!   default).

pub mod annot;
#[cfg(feature = "cli")]
pub mod cli;
pub mod eval;
pub mod imaging;
pub mod phenotype;
pub mod reporting;
pub mod stats;
pub mod synthgen;

pub use annot::{AbsBox, Detection, DetectionSet, GroundTruthBox, LabeledImage, NormBox};
pub use imaging::{ImageRGB, MeanRGB};
