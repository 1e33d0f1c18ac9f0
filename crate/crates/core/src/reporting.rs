//! CSV serialization of phenotype sheets, evaluation reports and
//! correlation summaries.
//!
//! Numbers are written with four decimals so files are byte-stable; rows are
//! sorted by `(image_id, cherry_id)`.

use std::collections::HashMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::annot::AbsBox;
use crate::eval::EvaluationReport;
use crate::imaging::MeanRGB;
use crate::phenotype::{BoxSize, CherryRecord, SummaryRow};
use crate::stats::StatsSummary;

pub const SUMMARY_HEADER: &[&str] = &[
    "image_id",
    "count",
    "avg_size_mm",
    "avg_size_mm_top50",
    "avg_r",
    "avg_g",
    "avg_b",
    "avg_r_top50",
    "avg_g_top50",
    "avg_b_top50",
    "stem_avg_r",
    "stem_avg_g",
    "stem_avg_b",
    "timestamp",
];

pub const CHERRY_SIZE_HEADER: &[&str] = &[
    "image_id",
    "cherry_id",
    "confidence",
    "size_px",
    "width_px",
    "height_px",
    "size_mm",
    "width_mm",
    "height_mm",
    "top50",
    "box_xmin",
    "box_ymin",
    "box_xmax",
    "box_ymax",
    "central_xmin",
    "central_ymin",
    "central_xmax",
    "central_ymax",
    "scaled_xmin",
    "scaled_ymin",
    "scaled_xmax",
    "scaled_ymax",
    "timestamp",
];

pub const CHERRY_COLOUR_HEADER: &[&str] = &[
    "image_id",
    "cherry_id",
    "avg_r",
    "avg_g",
    "avg_b",
    "color_class",
    "top50",
    "timestamp",
];

pub const STEM_COLOUR_HEADER: &[&str] = &[
    "image_id",
    "cherry_id",
    "stem_avg_r",
    "stem_avg_g",
    "stem_avg_b",
    "top50",
    "timestamp",
];

pub const EVAL_REPORT_HEADER: &[&str] = &[
    "model", "resize", "ct", "dc", "tc", "tp", "fp", "fn", "map50", "mean_iou",
];

pub const STATS_HEADER: &[&str] = &[
    "n",
    "r",
    "ci_low",
    "ci_high",
    "p_value",
    "covariance",
    "mean_x",
    "mean_y",
    "sd_x",
    "sd_y",
    "slope",
    "intercept",
    "r_squared",
];

pub const SHEET_FILES: [&str; 4] = [
    "summary.csv",
    "cherry_size.csv",
    "cherry_colour.csv",
    "stem_colour.csv",
];

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("record for image {0:?} has no summary row")]
    Dangling(String),
    #[error("nothing to write")]
    EmptyInput,
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: header mismatch, expected {expected:?}")]
    Header { path: PathBuf, expected: String },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
}

/// A header plus rendered cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sheet {
    pub header: &'static [&'static str],
    pub rows: Vec<Vec<String>>,
}

impl Sheet {
    fn empty(header: &'static [&'static str]) -> Self {
        Sheet {
            header,
            rows: Vec::new(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
    }

    pub fn from_csv(
        text: &str,
        header: &'static [&'static str],
        path: &Path,
    ) -> Result<Self, ReportError> {
        let mut r = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(text.as_bytes());
        let parse_err = |e: csv::Error| ReportError::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        };
        let found = r.headers().map_err(parse_err)?;
        if !found.iter().eq(header.iter().copied()) {
            return Err(ReportError::Header {
                path: path.to_path_buf(),
                expected: header.join(","),
            });
        }
        let rows = r
            .records()
            .map(|rec| rec.map(|rec| rec.iter().map(str::to_string).collect()))
            .collect::<Result<Vec<Vec<String>>, _>>()
            .map_err(parse_err)?;
        Ok(Sheet { header, rows })
    }
}

/// The four phenotype sheets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SheetSet {
    pub summary: Sheet,
    pub cherry_size: Sheet,
    pub cherry_colour: Sheet,
    pub stem_colour: Sheet,
}

impl SheetSet {
    fn sheets(&self) -> [&Sheet; 4] {
        [
            &self.summary,
            &self.cherry_size,
            &self.cherry_colour,
            &self.stem_colour,
        ]
    }
}

pub fn fmt4(v: f64) -> String {
    let s = format!("{v:.4}");
    // Avoid "-0.0000".
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

fn rgb_cells(c: &MeanRGB) -> [String; 3] {
    [fmt4(c.r), fmt4(c.g), fmt4(c.b)]
}

fn box_cells(b: &AbsBox) -> [String; 4] {
    [fmt4(b.x_min), fmt4(b.y_min), fmt4(b.x_max), fmt4(b.y_max)]
}

fn flag(b: bool) -> String {
    if b { "true" } else { "false" }.to_string()
}

/// Lays summaries and records out as the four sheets. Each record takes its
/// timestamp from its image's summary row.
pub fn build_sheets(
    summaries: &[SummaryRow],
    records: &[CherryRecord],
) -> Result<SheetSet, ReportError> {
    let stamp: HashMap<&str, &str> = summaries
        .iter()
        .map(|s| (s.image_id.as_str(), s.timestamp.as_str()))
        .collect();

    let mut sorted_summaries: Vec<&SummaryRow> = summaries.iter().collect();
    sorted_summaries.sort_by(|a, b| a.image_id.cmp(&b.image_id));
    let mut sorted_records: Vec<&CherryRecord> = records.iter().collect();
    sorted_records.sort_by(|a, b| (&a.image_id, a.cherry_id).cmp(&(&b.image_id, b.cherry_id)));

    let mut set = SheetSet {
        summary: Sheet::empty(SUMMARY_HEADER),
        cherry_size: Sheet::empty(CHERRY_SIZE_HEADER),
        cherry_colour: Sheet::empty(CHERRY_COLOUR_HEADER),
        stem_colour: Sheet::empty(STEM_COLOUR_HEADER),
    };

    for s in sorted_summaries {
        let mut row = vec![
            s.image_id.clone(),
            s.count.to_string(),
            fmt4(s.avg_size_mm),
            fmt4(s.avg_size_mm_top50),
        ];
        row.extend(rgb_cells(&s.avg_rgb));
        row.extend(rgb_cells(&s.avg_rgb_top50));
        match &s.stem_avg_rgb {
            Some(c) => row.extend(rgb_cells(c)),
            None => row.extend([String::new(), String::new(), String::new()]),
        }
        row.push(s.timestamp.clone());
        set.summary.rows.push(row);
    }

    for r in sorted_records {
        let ts = stamp
            .get(r.image_id.as_str())
            .ok_or_else(|| ReportError::Dangling(r.image_id.clone()))?
            .to_string();
        let id = r.cherry_id.to_string();
        let top = flag(r.top50);

        let mut size = vec![
            r.image_id.clone(),
            id.clone(),
            fmt4(r.confidence),
            fmt4(r.size.size_px),
            fmt4(r.size.width_px),
            fmt4(r.size.height_px),
            fmt4(r.size.size_mm),
            fmt4(r.size.width_mm),
            fmt4(r.size.height_mm),
            top.clone(),
        ];
        size.extend(box_cells(&r.bbox));
        size.extend(box_cells(&r.central_box));
        size.extend(box_cells(&r.scaled_box));
        size.push(ts.clone());
        set.cherry_size.rows.push(size);

        let mut colour = vec![r.image_id.clone(), id.clone()];
        colour.extend(rgb_cells(&r.mean_rgb));
        colour.extend([r.color_class.to_string(), top.clone(), ts.clone()]);
        set.cherry_colour.rows.push(colour);

        if let Some(stem) = &r.stem_rgb {
            let mut row = vec![r.image_id.clone(), id];
            row.extend(rgb_cells(stem));
            row.extend([top, ts]);
            set.stem_colour.rows.push(row);
        }
    }
    Ok(set)
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), ReportError> {
    fs::write(path, contents).map_err(|source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn read_file(path: &Path) -> Result<String, ReportError> {
    fs::read_to_string(path).map_err(|source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes `summary.csv`, `cherry_size.csv`, `cherry_colour.csv` and
/// `stem_colour.csv` into `out_dir`, creating it if needed.
pub fn write_sheets(sheets: &SheetSet, out_dir: &Path) -> Result<(), ReportError> {
    fs::create_dir_all(out_dir).map_err(|source| ReportError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    for (name, sheet) in SHEET_FILES.iter().zip(sheets.sheets()) {
        write_file(&out_dir.join(name), sheet.to_csv().as_bytes())?;
    }
    Ok(())
}

pub fn read_sheets(dir: &Path) -> Result<SheetSet, ReportError> {
    let load = |name: &str, header: &'static [&'static str]| {
        let path = dir.join(name);
        Sheet::from_csv(&read_file(&path)?, header, &path)
    };
    Ok(SheetSet {
        summary: load(SHEET_FILES[0], SUMMARY_HEADER)?,
        cherry_size: load(SHEET_FILES[1], CHERRY_SIZE_HEADER)?,
        cherry_colour: load(SHEET_FILES[2], CHERRY_COLOUR_HEADER)?,
        stem_colour: load(SHEET_FILES[3], STEM_COLOUR_HEADER)?,
    })
}

/// Rebuilds per-cherry records (with their timestamps) from stored sheets.
/// Values carry the four-decimal precision they were written with.
pub fn records_from_sheets(
    sheets: &SheetSet,
) -> Result<Vec<(CherryRecord, String)>, ReportError> {
    let err = |sheet: &str, message: String| ReportError::Parse {
        path: PathBuf::from(sheet),
        message,
    };
    let num = |sheet: &str, cell: &str| -> Result<f64, ReportError> {
        cell.parse::<f64>()
            .map_err(|_| err(sheet, format!("{cell:?} is not a number")))
    };
    let key = |row: &[String]| (row[0].clone(), row[1].clone());

    let colour: HashMap<(String, String), &Vec<String>> = sheets
        .cherry_colour
        .rows
        .iter()
        .map(|r| (key(r), r))
        .collect();
    let stem: HashMap<(String, String), &Vec<String>> = sheets
        .stem_colour
        .rows
        .iter()
        .map(|r| (key(r), r))
        .collect();

    let mut out = Vec::with_capacity(sheets.cherry_size.rows.len());
    for row in &sheets.cherry_size.rows {
        let s = "cherry_size.csv";
        if row.len() != CHERRY_SIZE_HEADER.len() {
            return Err(err(s, format!("row has {} cells", row.len())));
        }
        let f = |i: usize| num(s, &row[i]);
        let abs = |i: usize| -> Result<AbsBox, ReportError> {
            Ok(AbsBox {
                x_min: f(i)?,
                y_min: f(i + 1)?,
                x_max: f(i + 2)?,
                y_max: f(i + 3)?,
            })
        };
        let c = colour
            .get(&key(row))
            .ok_or_else(|| err("cherry_colour.csv", format!("no row for {}/{}", row[0], row[1])))?;
        let rgb = |r: &[String], sheet: &str| -> Result<MeanRGB, ReportError> {
            Ok(MeanRGB::new(num(sheet, &r[2])?, num(sheet, &r[3])?, num(sheet, &r[4])?))
        };
        let stem_rgb = match stem.get(&key(row)) {
            Some(r) => Some(rgb(r, "stem_colour.csv")?),
            None => None,
        };
        let record = CherryRecord {
            image_id: row[0].clone(),
            cherry_id: row[1]
                .parse()
                .map_err(|_| err(s, format!("bad cherry_id {:?}", row[1])))?,
            confidence: f(2)?,
            size: BoxSize {
                size_px: f(3)?,
                width_px: f(4)?,
                height_px: f(5)?,
                size_mm: f(6)?,
                width_mm: f(7)?,
                height_mm: f(8)?,
            },
            top50: row[9] == "true",
            bbox: abs(10)?,
            central_box: abs(14)?,
            scaled_box: abs(18)?,
            mean_rgb: rgb(c, "cherry_colour.csv")?,
            color_class: c[5]
                .parse()
                .map_err(|_| err("cherry_colour.csv", format!("bad class {:?}", c[5])))?,
            stem_rgb,
        };
        out.push((record, row[22].clone()));
    }
    Ok(out)
}

pub fn format_eval_report(reports: &[EvaluationReport]) -> Result<String, ReportError> {
    if reports.is_empty() {
        return Err(ReportError::EmptyInput);
    }
    let sheet = Sheet {
        header: EVAL_REPORT_HEADER,
        rows: reports
            .iter()
            .map(|r| {
                vec![
                    r.model_label.clone(),
                    r.resize_label.clone(),
                    fmt4(r.ct),
                    r.dc.to_string(),
                    r.tc.to_string(),
                    r.tp.to_string(),
                    r.fp.to_string(),
                    r.fn_count.to_string(),
                    fmt4(r.map50),
                    fmt4(r.mean_iou),
                ]
            })
            .collect(),
    };
    Ok(sheet.to_csv())
}

pub fn write_eval_report(reports: &[EvaluationReport], path: &Path) -> Result<(), ReportError> {
    let text = format_eval_report(reports)?;
    write_file(path, text.as_bytes())
}

/// One-row CSV; the p-value keeps full precision in scientific notation.
pub fn format_stats_csv(s: &StatsSummary) -> String {
    Sheet {
        header: STATS_HEADER,
        rows: vec![vec![
            s.n.to_string(),
            fmt4(s.r),
            fmt4(s.ci_low),
            fmt4(s.ci_high),
            format!("{:.4e}", s.p_value),
            fmt4(s.covariance),
            fmt4(s.mean_x),
            fmt4(s.mean_y),
            fmt4(s.sd_x),
            fmt4(s.sd_y),
            fmt4(s.slope),
            fmt4(s.intercept),
            fmt4(s.r_squared),
        ]],
    }
    .to_csv()
}

pub fn format_stats_text(s: &StatsSummary) -> String {
    let p = if s.p_value < 1e-4 {
        "<.0001".to_string()
    } else {
        format!("{:.4}", s.p_value)
    };
    format!(
        "correlation   r={:.6}  {:.0}% CI [{:.6}, {:.6}]  p={p}\n\
         covariance    {:.4}\n\
         count         {}\n\
         x             mean={:.4}  sd={:.4}\n\
         y             mean={:.4}  sd={:.4}\n\
         fit           y = {:.6} * x + {:.6}  r^2={:.4}\n",
        s.r, s.level * 100.0, s.ci_low, s.ci_high, s.covariance, s.n, s.mean_x, s.sd_x, s.mean_y, s.sd_y,
        s.slope, s.intercept, s.r_squared
    )
}

/// Points and fitted values for plotting the bivariate fit elsewhere.
pub fn format_plot_data(x: &[f64], y: &[f64], slope: f64, intercept: f64) -> String {
    let mut out = String::from("x,y,fitted\n");
    for (&a, &b) in x.iter().zip(y) {
        out.push_str(&format!("{},{},{}\n", fmt4(a), fmt4(b), fmt4(slope * a + intercept)));
    }
    out
}
