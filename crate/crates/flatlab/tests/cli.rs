use std::fs;

use flatlab::cli::{run, LatticeScan};
use flatlab::experiment::SurveyRow;
use flatlab::format::parse_surface_text;
use flatlab::report::{from_csv, from_json};
use flatlab_core::audit::{DirectionReport, Verdict};
use flatlab_core::builders;

fn flatlab(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("flatlab").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn build_output_parses_back() {
    let (code, text, _) = flatlab(&["build", "octagon"]);
    assert_eq!(code, 0);
    let m = parse_surface_text(&text).unwrap();
    assert_eq!(m.to_spec().unwrap(), builders::octagon().to_spec().unwrap());
}

#[test]
fn surface_file_argument() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("l3.surf");
    let (_, text, _) = flatlab(&["build", "l3"]);
    fs::write(&path, text).unwrap();
    let (code, out, _) = flatlab(&["--format", "csv", "hmin", path.to_str().unwrap(), "--direction", "1,0"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains(",1,2"), "{out}");
}

#[test]
fn show_octagon() {
    let (code, out, _) = flatlab(&["--format", "json", "show", "octagon", "--epsilon", "1/2"]);
    assert_eq!(code, 0);
    assert!(out.contains("\"H(2)\""), "{out}");
    assert!(out.contains("\"in_thick_part\": true") || out.contains("\"in_thick_part\":true"), "{out}");
}

#[test]
fn survey_csv_columns() {
    let (code, out, _) = flatlab(&["--format", "csv", "orbit-survey", "golden-l", "--bound", "3"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().next().unwrap(), "direction_p,direction_q,d,period");
    let rows: Vec<SurveyRow> = from_csv(&out).unwrap();
    assert!(!rows.is_empty() && rows.iter().all(|r| r.d == 1 && r.period.is_some()));
}

#[test]
fn lattice_scan_json_witness() {
    let (code, out, _) = flatlab(&["--format", "json", "lattice-scan", "stretched-l", "--bound", "2"]);
    assert_eq!(code, 0);
    let scan: LatticeScan = from_json("lattice_scan", &out).unwrap();
    assert_eq!(scan.evidence.verdict, Verdict::WitnessAgainst);
    let (_, csv, _) = flatlab(&["--format", "csv", "lattice-scan", "stretched-l", "--bound", "2"]);
    let reports: Vec<DirectionReport> = from_csv(&csv).unwrap();
    assert_eq!(reports, scan.reports);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("saddles.csv");
    let (code, out, _) = flatlab(&["--format", "csv", "--out", path.to_str().unwrap(), "saddles", "torus", "--bound", "2"]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let text = fs::read_to_string(&path).unwrap();
    // 8 primitive vectors of length at most 2, plus the header
    assert_eq!(text.lines().count(), 9);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "surface = \"torus\"\nbound = \"2\"\nformat = \"csv\"\n").unwrap();
    let c = cfg.to_str().unwrap();
    let (code, out, _) = flatlab(&["--config", c, "saddles"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 9);
    let (code, out, _) = flatlab(&["--config", c, "--format", "json", "saddles", "--bound", "1"]);
    assert_eq!(code, 0);
    assert!(out.trim_start().starts_with('{'));
    assert_eq!(out.matches("\"holonomy\"").count(), 4);
}

#[test]
fn track_records() {
    let (code, out, _) = flatlab(&["--format", "csv", "track", "octagon", "--t", "1,2", "--psi", "1e-2,1e-4"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 5);
}

#[test]
fn sl2_decompose_exact() {
    let (code, out, _) = flatlab(&["--format", "json", "sl2", "decompose", "--kind", "bruhat", "--matrix", "2,1,1,1"]);
    assert_eq!(code, 0);
    assert!(out.contains("\"1/2\""), "{out}");
}

#[test]
fn exit_codes() {
    assert_eq!(flatlab(&["saddles", "torus"]).0, 2, "missing bound");
    assert_eq!(flatlab(&["show", "no-such-surface"]).0, 2);
    assert_eq!(flatlab(&["frobnicate"]).0, 2);
    assert_eq!(flatlab(&["sl2", "decompose", "--matrix", "1,1,1,1"]).0, 2, "determinant zero");
    assert_eq!(flatlab(&["--max-frontier", "3", "saddles", "golden-l", "--bound", "10"]).0, 3);
    assert_eq!(flatlab(&["--format", "csv", "cylinders", "l3", "--direction", "1,0"]).0, 0);
    assert_eq!(flatlab(&["cylinders", "l3", "--direction", "0,0"]).0, 2);
}

#[test]
fn bad_surface_file_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.surf");
    fs::write(&path, "field rational\npolygon a (0,0) (1,0) (1,1) (0,1)\nglue a 0 a 0\n").unwrap();
    let (code, _, err) = flatlab(&["show", path.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains('3'), "{err}");
    let (code, _, _) = flatlab(&["show", dir.path().join("missing.surf").to_str().unwrap()]);
    assert_ne!(code, 0);
}
