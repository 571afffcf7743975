use std::fs;
use std::process::Command as Process;

use hk_cli::*;
use hk_core::verify::{CheckSpec, ScanConfig};

fn hk() -> Process {
    Process::new(env!("CARGO_BIN_EXE_hk"))
}

fn small_config(command: Command) -> RunConfig {
    RunConfig {
        command,
        scan: ScanConfig {
            k_max: Some(4),
            trials: 2,
            ..Default::default()
        },
        n: None,
        delta: None,
        s: None,
        negative_controls: false,
    }
}

#[test]
fn inadmissible_kato_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let status = hk()
        .args(["kato", "--n", "2", "--delta", "1", "--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(EXIT_USAGE));
    assert!(!dir.path().join("manifest.json").exists());
}

#[test]
fn negative_control_runs_on_request() {
    let dir = tempfile::tempdir().unwrap();
    let status = hk()
        .args(["kato", "--n", "2", "--delta", "1", "--negative-controls", "--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(EXIT_OK));
    let manifest = parse_manifest(&fs::read(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest.reports.len(), 1);
    assert!(manifest.reports[0].passed);
}

#[test]
fn unknown_arguments_are_usage_errors() {
    assert_eq!(main_with_args(["hk", "bogus"]), EXIT_USAGE);
    assert_eq!(main_with_args(["hk", "norms", "--frobnicate"]), EXIT_USAGE);
    assert_eq!(main_with_args(["hk", "norms", "--rule-scale", "0"]), EXIT_USAGE);
    assert_eq!(main_with_args(["hk", "kernel", "--n", "5"]), EXIT_USAGE);
    assert_eq!(main_with_args(["hk", "norms", "--format", "xml"]), EXIT_USAGE);
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, b"x").unwrap();
    let out = blocker.join("sub");
    let code = main_with_args(["hk", "norms", "--kmax", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(code, EXIT_IO);
}

#[test]
fn empty_manifest_is_valid_json() {
    let manifest = RunManifest {
        version: "0.1.0".into(),
        config: small_config(Command::Norms),
        reports: Vec::new(),
        wall_seconds: Vec::new(),
        errors: Vec::new(),
    };
    let bytes = manifest_json(&manifest);
    let value: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(value["reports"], serde_json::json!([]));
    assert_eq!(parse_manifest(&bytes).unwrap(), manifest);
    assert_eq!(exit_code(&manifest), EXIT_OK);
}

#[test]
fn manifest_round_trip_and_csv_schema() {
    let cfg = small_config(Command::Identities);
    let specs = plan(&cfg).unwrap();
    assert_eq!(specs.len(), 3);
    let manifest = execute(&cfg, &specs, Some(2)).unwrap();
    assert_eq!(parse_manifest(&manifest_json(&manifest)).unwrap(), manifest);
    for r in &manifest.reports {
        assert_eq!(r.seed(), Some(cfg.scan.seed));
        let csv = String::from_utf8(report_csv(r)).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("label,ratio,tolerance,passed"));
        assert_eq!(lines.count(), r.samples.len());
    }
    assert_eq!(exit_code(&manifest), EXIT_OK);
}

#[test]
fn csv_quotes_and_digits() {
    assert_eq!(format_float(2.0), "2.0000000000000000e0");
    assert_eq!(format_float(0.1).parse::<f64>().unwrap(), 0.1);
    let cfg = small_config(Command::Kato);
    let report = CheckSpec::Kato {
        n: 2,
        delta: 0.5,
        axes: vec![0, 1],
    }
    .run(&cfg.scan)
    .unwrap();
    let mut renamed = report.clone();
    renamed.samples[0].label = "a, \"quoted\" label".into();
    let csv = String::from_utf8(report_csv(&renamed)).unwrap();
    assert!(csv.lines().nth(1).unwrap().starts_with("\"a, \"\"quoted\"\" label\","));
}

#[test]
fn failures_are_never_masked() {
    let cfg = small_config(Command::Kato);
    let spec = CheckSpec::Kato {
        n: 3,
        delta: 1.0,
        axes: vec![0, 1, 2],
    };
    let ok = spec.run(&cfg.scan).unwrap();
    let tight = ScanConfig {
        bound: Some(1.0),
        ..cfg.scan.clone()
    };
    let failed = spec.run(&tight).unwrap();
    assert!(!failed.passed);
    let mut manifest = RunManifest {
        version: "0.1.0".into(),
        config: cfg,
        reports: vec![failed, ok.clone()],
        wall_seconds: vec![0.0, 0.0],
        errors: Vec::new(),
    };
    assert_eq!(exit_code(&manifest), EXIT_FAILED);
    manifest.reports = vec![ok.clone(), ok];
    assert_eq!(exit_code(&manifest), EXIT_OK);
    manifest.reports[1].status = hk_core::Status::Inconclusive;
    assert_eq!(exit_code(&manifest), EXIT_INCONCLUSIVE);
}

#[test]
fn identities_are_deterministic_across_processes() {
    let run = || {
        let dir = tempfile::tempdir().unwrap();
        let status = hk()
            .args(["identities", "--seed", "7", "--kmax", "6", "--trials", "3", "--out"])
            .arg(dir.path())
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(EXIT_OK));
        let mut tables: Vec<(String, Vec<u8>)> = fs::read_dir(dir.path())
            .unwrap()
            .map(|e| e.unwrap().path())
            .filter(|p| p.extension().is_some_and(|e| e == "csv"))
            .map(|p| {
                (
                    p.file_name().unwrap().to_string_lossy().into_owned(),
                    fs::read(&p).unwrap(),
                )
            })
            .collect();
        tables.sort();
        tables
    };
    let first = run();
    assert_eq!(first.len(), 3);
    assert_eq!(first, run());
}

#[test]
fn json_tables_on_request() {
    let dir = tempfile::tempdir().unwrap();
    let code = main_with_args([
        "hk",
        "norms",
        "--kmax",
        "3",
        "--format",
        "json",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    let report: hk_core::EstimateReport =
        serde_json::from_slice(&fs::read(dir.path().join("00_antiderivative_norms.json")).unwrap()).unwrap();
    assert_eq!(report.samples.len(), 8);
}

#[test]
fn plans() {
    let mut cfg = small_config(Command::All);
    assert_eq!(plan(&cfg).unwrap().len(), 17);
    cfg.negative_controls = true;
    assert_eq!(plan(&cfg).unwrap().last(), Some(&CheckSpec::KatoNegativeControl));
    let mut cfg = small_config(Command::Sobolev);
    cfg.n = Some(1);
    cfg.s = Some(2.0);
    assert_eq!(plan(&cfg).unwrap(), vec![CheckSpec::HermiteSobolev { n: 1, s: 2.0 }]);
}
