use std::fs;
use std::path::PathBuf;

use cherrymetrics::eval::{evaluate_dataset, EvalConfig};
use cherrymetrics::reporting::{build_sheets, format_eval_report, write_sheets, SHEET_FILES};
use cherrymetrics::{AbsBox, Detection, DetectionSet, GroundTruthBox, LabeledImage};

fn golden(name: &str) -> Vec<u8> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn empty_sheets_match_golden_headers() {
    let dir = tempfile::tempdir().unwrap();
    write_sheets(&build_sheets(&[], &[]).unwrap(), dir.path()).unwrap();
    for name in SHEET_FILES {
        let written = fs::read(dir.path().join(name)).unwrap();
        assert_eq!(written, golden(name), "{name}");
    }
}

#[test]
fn eval_report_matches_golden() {
    let boxes = [
        AbsBox::new(10.0, 10.0, 40.0, 40.0).unwrap(),
        AbsBox::new(60.0, 20.0, 90.0, 55.0).unwrap(),
    ];
    let truth = LabeledImage {
        image_id: "img".into(),
        width: 100,
        height: 100,
        boxes: boxes.iter().map(|&bbox| GroundTruthBox { bbox, class_id: 0 }).collect(),
    };
    let dets = DetectionSet {
        image_id: "img".into(),
        detections: boxes
            .iter()
            .map(|&bbox| Detection { bbox, class_id: 0, confidence: 0.9 })
            .collect(),
    };
    let config = EvalConfig {
        model_label: "yolov3".into(),
        resize_label: "416".into(),
        ..EvalConfig::default()
    };
    let report = evaluate_dataset(&[dets], &[truth], &config).unwrap();
    assert_eq!(format_eval_report(&[report]).unwrap().as_bytes(), golden("eval_report.csv"));
}
