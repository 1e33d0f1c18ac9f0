//! `cherrymetrics` command line: `synth`, `eval`, `extract`, `stats` and
//! `report`.
//!
//! Settings come from a flat `key=value` file (`--config`, or the path in
//! `CHERRYMETRICS_CONFIG`) and are overridden by flags. Exit codes: 0 on
//! success, 1 on usage errors, 2 on data errors. Every failure prints one
//! line starting with `error:` on stderr.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use thiserror::Error;

use crate::annot::{parse_detections_csv, parse_voc, write_detections_csv, write_voc, ClassList};
use crate::eval::{evaluate_dataset, ApInterpolation, EvalConfig};
use crate::imaging::{read_ppm, write_ppm};
use crate::phenotype::{self, ColorPalette, ExtractConfig, ScaleCalibration};
use crate::reporting::{
    build_sheets, format_eval_report, format_plot_data, format_stats_csv, format_stats_text,
    read_sheets, records_from_sheets, write_sheets,
};
use crate::stats;
use crate::synthgen::{generate_scene, perturb_detections, ClassAssignment, NoiseSpec, SceneSpec};

pub const CONFIG_ENV: &str = "CHERRYMETRICS_CONFIG";

#[derive(Debug, Error, PartialEq)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }
}

fn data_err(path: &Path, e: impl Display) -> CliError {
    CliError::Data(format!("{}: {e}", path.display()))
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| data_err(path, e))
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| data_err(parent, e))?;
    }
    fs::write(path, bytes).map_err(|e| data_err(path, e))
}

/// Settings shared by all subcommands.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub classes: ClassList,
    pub ct: f64,
    pub iou_threshold: f64,
    pub nms_threshold: Option<f64>,
    pub mm_per_pixel: Option<f64>,
    pub palette: Option<PathBuf>,
    pub shrink: f64,
    pub rise: f64,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub timestamp: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            classes: ClassList::default(),
            ct: 0.5,
            iou_threshold: 0.5,
            nms_threshold: None,
            mm_per_pixel: None,
            palette: None,
            shrink: 0.5,
            rise: 0.5,
            out: None,
            jobs: None,
            timestamp: None,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
#[error("line {line}: {message}")]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

fn parse_unit(s: &str) -> Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(v) if (0.0..=1.0).contains(&v) => Ok(v),
        _ => Err(format!("{s:?} is not a number in [0, 1]")),
    }
}

fn parse_positive(s: &str) -> Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("{s:?} is not a positive number")),
    }
}

impl RunConfig {
    /// Parses `key=value` lines; `#` starts a comment line.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| ConfigError { line: i + 1, message };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected key=value, found {line:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |e: String| err(format!("{key}: {e}"));
            match key {
                "classes" => {
                    let names: Vec<&str> = value.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
                    if names.is_empty() {
                        return Err(bad("empty class list".into()));
                    }
                    cfg.classes = ClassList::new(names);
                }
                "ct" => cfg.ct = parse_unit(value).map_err(bad)?,
                "iou_threshold" => cfg.iou_threshold = parse_unit(value).map_err(bad)?,
                "nms_threshold" => cfg.nms_threshold = Some(parse_unit(value).map_err(bad)?),
                "mm_per_pixel" => cfg.mm_per_pixel = Some(parse_positive(value).map_err(bad)?),
                "palette" => cfg.palette = Some(PathBuf::from(value)),
                "shrink" => {
                    cfg.shrink = parse_unit(value)
                        .ok()
                        .filter(|v| *v > 0.0)
                        .ok_or_else(|| bad(format!("{value:?} is not in (0, 1]")))?
                }
                "rise" => cfg.rise = parse_positive(value).map_err(bad)?,
                "out" => cfg.out = Some(PathBuf::from(value)),
                "jobs" => {
                    cfg.jobs = Some(
                        value
                            .parse::<usize>()
                            .ok()
                            .filter(|&n| n > 0)
                            .ok_or_else(|| bad(format!("{value:?} is not a positive integer")))?,
                    )
                }
                "timestamp" => cfg.timestamp = Some(value.to_string()),
                other => return Err(err(format!("unknown key {other:?}"))),
            }
        }
        Ok(cfg)
    }

    /// Reads and validates a config file. Referenced paths must exist.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let cfg = RunConfig::parse(&read_text(path)?).map_err(|e| data_err(path, e))?;
        if let Some(p) = &cfg.palette {
            if !p.exists() {
                return Err(data_err(path, format!("palette file {} does not exist", p.display())));
            }
        }
        Ok(cfg)
    }
}

#[derive(Debug, Parser)]
#[command(name = "cherrymetrics", version, about = "Detection accuracy, cherry phenotypes and validation statistics")]
struct Cli {
    /// Config file of key=value lines (default: $CHERRYMETRICS_CONFIG).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for per-image work (default: all cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    jobs: Option<u32>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate seeded disc scenes with VOC ground truth.
    Synth(SynthArgs),
    /// Score detections against VOC ground truth.
    Eval(EvalArgs),
    /// Measure size and colour of every detected cherry.
    Extract(ExtractArgs),
    /// Correlation, confidence interval and fit for an x,y CSV.
    Stats(StatsArgs),
    /// Rewrite the four sheets from previously written sheets.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    scenes: u32,
    #[arg(long, default_value = "scene")]
    prefix: String,
    #[arg(long, default_value_t = 20)]
    count: usize,
    #[arg(long, default_value_t = 512)]
    width: u32,
    #[arg(long, default_value_t = 512)]
    height: u32,
    #[arg(long, default_value_t = 10)]
    radius_min: u32,
    #[arg(long, default_value_t = 20)]
    radius_max: u32,
    #[arg(long, default_value_t = 4.0)]
    min_separation: f64,
    /// Paint every disc with this palette class instead of random classes.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=7))]
    colour_class: Option<u8>,
    #[arg(long, value_parser = parse_positive)]
    mm_per_pixel: Option<f64>,
    #[arg(long)]
    palette: Option<PathBuf>,
    /// Also write detections.csv from the noise model.
    #[arg(long)]
    detections: bool,
    #[arg(long, default_value_t = 0.0)]
    jitter: f64,
    #[arg(long, default_value_t = 0.0, value_parser = parse_unit)]
    drop_prob: f64,
    /// Drop exactly this many truths per scene (overrides --drop-prob).
    #[arg(long)]
    drop_count: Option<usize>,
    #[arg(long, default_value_t = 0)]
    spurious: usize,
    #[arg(long, default_value_t = 0.5, value_parser = parse_unit)]
    conf_min: f64,
    #[arg(long, default_value_t = 1.0, value_parser = parse_unit)]
    conf_max: f64,
    /// Noise seed (default: the scene seed).
    #[arg(long)]
    noise_seed: Option<u64>,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long)]
    dets: PathBuf,
    #[arg(long)]
    truth_dir: PathBuf,
    #[arg(long, value_parser = parse_unit)]
    ct: Option<f64>,
    #[arg(long, value_parser = parse_unit)]
    iou: Option<f64>,
    #[arg(long, value_parser = parse_unit)]
    nms: Option<f64>,
    #[arg(long, default_value = "")]
    model: String,
    #[arg(long, default_value = "")]
    resize: String,
    /// Use 11-point interpolated AP instead of all-point.
    #[arg(long)]
    eleven_point: bool,
    /// Report file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ExtractArgs {
    #[arg(long)]
    images: PathBuf,
    #[arg(long)]
    dets: PathBuf,
    /// Per-image "image_id,mm_per_pixel" CSV.
    #[arg(long)]
    calibration: Option<PathBuf>,
    #[arg(long, value_parser = parse_positive)]
    mm_per_pixel: Option<f64>,
    #[arg(long)]
    palette: Option<PathBuf>,
    #[arg(long, value_parser = parse_unit)]
    shrink: Option<f64>,
    #[arg(long, value_parser = parse_positive)]
    rise: Option<f64>,
    /// Timestamp stored with every row (default: current UTC time).
    #[arg(long)]
    timestamp: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct StatsArgs {
    /// CSV with header "x,y".
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 0.95)]
    level: f64,
    /// Write x, y and fitted values here.
    #[arg(long)]
    plot_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ReportArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Runs the tool on `argv` (program name first) and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp
                | ErrorKind::DisplayVersion
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    print!("{e}");
                    if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                        eprintln!("error: missing subcommand");
                        1
                    } else {
                        0
                    }
                }
                _ => {
                    eprint!("{e}");
                    1
                }
            };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.to_string().replace('\n', " "));
            e.exit_code()
        }
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let config_path = cli
        .config
        .or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
    let config = match &config_path {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let jobs = cli.jobs.map(|j| j as usize).or(config.jobs);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Data(format!("thread pool: {e}")))?;
    pool.install(|| match cli.command {
        Command::Synth(a) => synth(a, &config),
        Command::Eval(a) => eval(a, &config),
        Command::Extract(a) => extract(a, &config),
        Command::Stats(a) => stats_cmd(a),
        Command::Report(a) => report(a, &config),
    })
}

fn output_dir(flag: Option<PathBuf>, config: &RunConfig, cmd: &str) -> Result<PathBuf, CliError> {
    flag.or_else(|| config.out.clone())
        .ok_or_else(|| CliError::Usage(format!("{cmd} needs --out or out= in the config")))
}

fn load_palette(flag: Option<PathBuf>, config: &RunConfig) -> Result<ColorPalette, CliError> {
    match flag.or_else(|| config.palette.clone()) {
        Some(p) => ColorPalette::parse(&read_text(&p)?).map_err(|e| data_err(&p, e)),
        None => Ok(ColorPalette::default()),
    }
}

fn synth(a: SynthArgs, config: &RunConfig) -> Result<(), CliError> {
    let out = output_dir(a.out, config, "synth")?;
    if a.conf_min > a.conf_max {
        return Err(CliError::Usage("--conf-min exceeds --conf-max".into()));
    }
    if !(a.jitter >= 0.0 && a.jitter.is_finite()) {
        return Err(CliError::Usage("--jitter must be a non-negative number".into()));
    }
    let palette = load_palette(a.palette, config)?;
    let mm_per_pixel = a.mm_per_pixel.or(config.mm_per_pixel).unwrap_or(0.25);
    let classes = match a.colour_class {
        Some(c) => ClassAssignment::Fixed(vec![c]),
        None => ClassAssignment::Random,
    };
    let noise_seed = a.noise_seed.unwrap_or(a.seed);

    let specs: Vec<SceneSpec> = (0..a.scenes)
        .map(|i| SceneSpec {
            image_id: format!("{}_{i:04}", a.prefix),
            width: a.width,
            height: a.height,
            cherry_count: a.count,
            radius_range: (a.radius_min, a.radius_max),
            classes: classes.clone(),
            background: SceneSpec::default().background,
            min_separation: a.min_separation,
            mm_per_pixel,
            seed: a.seed.wrapping_add(i as u64),
        })
        .collect();
    let scenes = specs
        .par_iter()
        .map(|s| generate_scene(s, &palette).map_err(|e| CliError::Data(format!("{}: {e}", s.image_id))))
        .collect::<Result<Vec<_>, _>>()?;

    let mut calibration = String::from("image_id,mm_per_pixel\n");
    let mut det_sets = Vec::new();
    for (i, scene) in scenes.iter().enumerate() {
        let id = &scene.truth.image_id;
        write_bytes(&out.join("images").join(format!("{id}.ppm")), &write_ppm(&scene.image))?;
        write_bytes(
            &out.join("truth").join(format!("{id}.xml")),
            write_voc(&scene.truth, &config.classes).as_bytes(),
        )?;
        calibration.push_str(&format!("{id},{}\n", scene.calibration.mm_per_pixel()));
        if a.detections {
            let noise = NoiseSpec {
                jitter_px: a.jitter,
                drop_prob: a.drop_prob,
                drop_count: a.drop_count,
                spurious_count: a.spurious,
                confidence_range: (a.conf_min, a.conf_max),
                seed: noise_seed.wrapping_add(i as u64),
            };
            det_sets.push(perturb_detections(&scene.truth, &noise));
        }
    }
    write_bytes(&out.join("calibration.csv"), calibration.as_bytes())?;
    if a.detections {
        write_bytes(&out.join("detections.csv"), write_detections_csv(&det_sets).as_bytes())?;
    }
    let manifest = format!(
        "generator=xoshiro256++\nseed={}\nnoise_seed={}\nscenes={}\n",
        a.seed, noise_seed, a.scenes
    );
    write_bytes(&out.join("manifest.txt"), manifest.as_bytes())?;
    log::info!("wrote {} scene(s) to {}", a.scenes, out.display());
    Ok(())
}

fn eval(a: EvalArgs, config: &RunConfig) -> Result<(), CliError> {
    let det_sets = parse_detections_csv(&read_text(&a.dets)?).map_err(|e| data_err(&a.dets, e))?;
    let mut xml_paths: Vec<PathBuf> = fs::read_dir(&a.truth_dir)
        .map_err(|e| data_err(&a.truth_dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x.eq_ignore_ascii_case("xml")))
        .collect();
    xml_paths.sort();
    let truths = xml_paths
        .iter()
        .map(|p| parse_voc(&read_text(p)?, &config.classes).map_err(|e| data_err(p, e)))
        .collect::<Result<Vec<_>, _>>()?;

    let eval_config = EvalConfig {
        ct: a.ct.unwrap_or(config.ct),
        iou_threshold: a.iou.unwrap_or(config.iou_threshold),
        nms_threshold: a.nms.or(config.nms_threshold),
        model_label: a.model,
        resize_label: a.resize,
        interpolation: if a.eleven_point {
            ApInterpolation::ElevenPoint
        } else {
            ApInterpolation::AllPoint
        },
    };
    let report = evaluate_dataset(&det_sets, &truths, &eval_config).map_err(|e| data_err(&a.dets, e))?;
    let text = format_eval_report(&[report]).map_err(|e| CliError::Data(e.to_string()))?;
    match a.out {
        Some(p) => write_bytes(&p, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_calibration(path: &Path) -> Result<BTreeMap<String, f64>, CliError> {
    let text = read_text(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| data_err(path, e))?;
    if header.iter().collect::<Vec<_>>() != ["image_id", "mm_per_pixel"] {
        return Err(data_err(path, "expected header \"image_id,mm_per_pixel\""));
    }
    let mut map = BTreeMap::new();
    for row in reader.records() {
        let row = row.map_err(|e| data_err(path, e))?;
        let line = row.position().map_or(0, |p| p.line());
        let value = parse_positive(&row[1]).map_err(|e| data_err(path, format!("line {line}: {e}")))?;
        map.insert(row[0].to_string(), value);
    }
    Ok(map)
}

fn now_utc() -> String {
    let fmt = time::macros::format_description!("[year]-[month]-[day]T[hour]:[minute]:[second]Z");
    time::OffsetDateTime::now_utc()
        .format(&fmt)
        .expect("fixed format always renders")
}

fn extract(a: ExtractArgs, config: &RunConfig) -> Result<(), CliError> {
    let out = output_dir(a.out, config, "extract")?;
    let palette = load_palette(a.palette, config)?;
    let fallback = a.mm_per_pixel.or(config.mm_per_pixel);
    let per_image = a.calibration.as_deref().map(read_calibration).transpose()?;
    if fallback.is_none() && per_image.is_none() {
        return Err(CliError::Usage(
            "extract needs --calibration, --mm-per-pixel or mm_per_pixel= in the config".into(),
        ));
    }
    let extract_config = ExtractConfig {
        shrink: a.shrink.unwrap_or(config.shrink),
        rise: a.rise.unwrap_or(config.rise),
        ..ExtractConfig::default()
    };
    if extract_config.shrink <= 0.0 {
        return Err(CliError::Usage("--shrink must be in (0, 1]".into()));
    }
    let timestamp = a.timestamp.or_else(|| config.timestamp.clone()).unwrap_or_else(now_utc);

    let mut det_sets = parse_detections_csv(&read_text(&a.dets)?).map_err(|e| data_err(&a.dets, e))?;
    det_sets.sort_by(|x, y| x.image_id.cmp(&y.image_id));

    let per_image_results = det_sets
        .par_iter()
        .map(|set| {
            let path = a.images.join(format!("{}.ppm", set.image_id));
            let bytes = fs::read(&path).map_err(|e| data_err(&path, e))?;
            let image = read_ppm(&bytes).map_err(|e| data_err(&path, e))?;
            let mm = per_image
                .as_ref()
                .and_then(|m| m.get(&set.image_id).copied())
                .or(fallback)
                .ok_or_else(|| CliError::Data(format!("no calibration for image {:?}", set.image_id)))?;
            let cal = ScaleCalibration::new(mm).map_err(|e| CliError::Data(e.to_string()))?;
            let records = phenotype::extract_records(&image, set, cal, &palette, &extract_config)
                .map_err(|e| data_err(&path, e))?;
            if records.is_empty() {
                log::warn!("{}: no detections, skipped", set.image_id);
                return Ok(None);
            }
            let summary = phenotype::summarize(&records, &timestamp).map_err(|e| data_err(&path, e))?;
            Ok(Some((summary, records)))
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let (summaries, records): (Vec<_>, Vec<_>) = per_image_results.into_iter().flatten().unzip();
    let records: Vec<_> = records.into_iter().flatten().collect();
    let sheets = build_sheets(&summaries, &records).map_err(|e| CliError::Data(e.to_string()))?;
    write_sheets(&sheets, &out).map_err(|e| CliError::Data(e.to_string()))?;
    log::info!("{} image(s), {} cherries -> {}", summaries.len(), records.len(), out.display());
    Ok(())
}

fn read_xy(path: &Path) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let text = read_text(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| data_err(path, e))?;
    if header.iter().collect::<Vec<_>>() != ["x", "y"] {
        return Err(data_err(path, "expected header \"x,y\""));
    }
    let (mut x, mut y) = (Vec::new(), Vec::new());
    for row in reader.records() {
        let row = row.map_err(|e| data_err(path, e))?;
        let line = row.position().map_or(0, |p| p.line());
        let num = |cell: &str| {
            cell.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| data_err(path, format!("line {line}: {cell:?} is not a number")))
        };
        x.push(num(&row[0])?);
        y.push(num(&row[1])?);
    }
    Ok((x, y))
}

fn stats_cmd(a: StatsArgs) -> Result<(), CliError> {
    let (x, y) = read_xy(&a.input)?;
    let summary = stats::summarize(&x, &y, a.level).map_err(|e| match e {
        stats::StatsError::UnsupportedLevel(_) => CliError::Usage(e.to_string()),
        e => data_err(&a.input, e),
    })?;
    print!("{}\n{}", format_stats_text(&summary), format_stats_csv(&summary));
    if let Some(p) = a.plot_out {
        write_bytes(&p, format_plot_data(&x, &y, summary.slope, summary.intercept).as_bytes())?;
    }
    Ok(())
}

fn report(a: ReportArgs, config: &RunConfig) -> Result<(), CliError> {
    let out = output_dir(a.out, config, "report")?;
    let sheets = read_sheets(&a.input).map_err(|e| CliError::Data(e.to_string()))?;
    let rows = records_from_sheets(&sheets).map_err(|e| CliError::Data(e.to_string()))?;
    let mut by_image: BTreeMap<String, (Vec<_>, String)> = BTreeMap::new();
    for (record, stamp) in rows {
        let entry = by_image
            .entry(record.image_id.clone())
            .or_insert_with(|| (Vec::new(), stamp));
        entry.0.push(record);
    }
    let mut summaries = Vec::with_capacity(by_image.len());
    for (id, (records, stamp)) in &by_image {
        summaries.push(phenotype::summarize(records, stamp).map_err(|e| CliError::Data(format!("{id}: {e}")))?);
    }
    let records: Vec<_> = by_image.into_values().flat_map(|(r, _)| r).collect();
    let mut rebuilt = build_sheets(&summaries, &records).map_err(|e| CliError::Data(e.to_string()))?;
    // Averages recomputed from 4-decimal cells can differ in the last digit,
    // so stored summary rows win.
    let stored: BTreeMap<&str, &Vec<String>> = sheets
        .summary
        .rows
        .iter()
        .map(|row| (row[0].as_str(), row))
        .collect();
    for row in &mut rebuilt.summary.rows {
        if let Some(kept) = stored.get(row[0].as_str()) {
            row.clone_from(kept);
        }
    }
    write_sheets(&rebuilt, &out).map_err(|e| CliError::Data(e.to_string()))
}
