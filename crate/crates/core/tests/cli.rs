use std::path::Path;
use std::process::Command;

use erbound::cha::ActiveLearningConfig;
use erbound::experiment::{self, Method, Report, Settings, Timings, CSV_COLUMNS};
use erbound::states;

fn erbound() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_erbound"));
    c.env_remove(experiment::THREADS_ENV);
    c
}

fn small() -> [&'static str; 4] {
    ["--pool-size", "120", "--iterations", "4"]
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn bell_file_both_methods() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bell.json");
    experiment::write_matrix_file(&input, &states::max_entangled(2).unwrap()).unwrap();
    let json = dir.path().join("report.json");
    let out = erbound()
        .arg("bound")
        .arg(&input)
        .args(small())
        .arg("--json")
        .arg(&json)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Report = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    let r = &report.records[0];
    assert!((r.cha_bits.unwrap() - 1.0).abs() <= 0.05);
    assert!((r.ppt_bits.unwrap() - 1.0).abs() <= 0.01);
    assert!(r.state.starts_with("file:"));
    assert_eq!(report.config_hash, report.settings.config_hash());
    assert!(report.support.is_some());
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv.lines().next().unwrap(), CSV_COLUMNS.join(","));
}

#[test]
fn half_trace_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"{"dim_a": 1, "dim_b": 2, "matrix": [[0.25, 0], [0, 0], [0, 0], [0.25, 0]]}"#;
    let input = write(dir.path(), "half.json", text);
    let out = erbound().arg("bound").arg(&input).output().unwrap();
    assert_eq!(out.status.code(), Some(experiment::EXIT_INVALID_INPUT));
    assert!(String::from_utf8_lossy(&out.stderr).contains("trace"));
}

#[test]
fn malformed_inputs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let not_json = write(dir.path(), "x.json", "{ nope");
    assert_eq!(erbound().arg("bound").arg(&not_json).status().unwrap().code(), Some(2));
    assert_eq!(erbound().args(["werner", "--alpha", "1.5"]).status().unwrap().code(), Some(2));
    assert_eq!(erbound().args(["werner", "--alpha-grid", "0:1"]).status().unwrap().code(), Some(2));
    let cfg = write(dir.path(), "bad.cfg", "pool_size = many\n");
    assert_eq!(erbound().arg("werner").arg("--config").arg(&cfg).status().unwrap().code(), Some(2));
    assert_eq!(erbound().args(["random", "--count", "0"]).status().unwrap().code(), Some(2));
}

#[test]
fn ppt_on_tiles_file_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("tiles.json");
    experiment::write_matrix_file(&input, &states::tiles_state()).unwrap();
    let s = Settings { method: Method::Ppt, ..Settings::default() };
    let ev = experiment::bound_file(&input, &s).unwrap();
    assert!(ev.record.ppt_bits.unwrap().abs() <= 1e-3);
    assert!(ev.record.cha_bits.is_none());
}

#[test]
fn csv_bytes_repeat_single_threaded() {
    let run = || {
        erbound()
            .args(["random", "--da", "2", "--db", "2", "--count", "3", "--seed", "11", "--threads", "1", "--no-timings"])
            .args(small())
            .output()
            .unwrap()
    };
    let (a, b) = (run(), run());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(String::from_utf8(a.stdout).unwrap().lines().count(), 4);
}

#[test]
fn thread_count_does_not_change_values() {
    let cha = ActiveLearningConfig { pool_size: 120, outer_iterations: 4, ..ActiveLearningConfig::desk() };
    let one = Settings { cha: cha.clone(), threads: Some(1), seed: 4, ..Settings::default() };
    let four = Settings { threads: Some(4), ..one.clone() };
    let a = experiment::random_study(2, 3, 4, &one).unwrap();
    let b = experiment::random_study(2, 3, 4, &four).unwrap();
    assert_eq!(
        experiment::write_csv_string(&a, &one, Timings::Omit).unwrap(),
        experiment::write_csv_string(&b, &four, Timings::Omit).unwrap()
    );
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.cfg", "pool_size = 100\nouter_iterations = 2\nmethod = ppt\nseed = 3\n");
    let json = dir.path().join("r.json");
    let status = erbound()
        .args(["werner", "--alpha", "0.8", "--seed", "9"])
        .arg("--config")
        .arg(&cfg)
        .arg("--json")
        .arg(&json)
        .arg("--out")
        .arg(dir.path().join("r.csv"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let report: Report = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(report.seed, 9);
    assert_eq!(report.settings.cha.pool_size, 100);
    assert_eq!(report.settings.method, Method::Ppt);
    let r = &report.records[0];
    assert!(r.cha_bits.is_none());
    assert!((r.ppt_bits.unwrap() - r.analytic_bits.unwrap()).abs() < 0.01);
}

#[test]
fn werner_d3_alpha_one_is_one_bit() {
    let out = erbound().args(["werner", "--d", "3", "--alpha", "1.0", "--method", "ppt"]).output().unwrap();
    let csv = String::from_utf8(out.stdout).unwrap();
    let row = csv.lines().nth(1).unwrap();
    let fields: Vec<&str> = row.split(',').collect();
    // state is quoted and holds one comma
    assert_eq!(fields[4], "1");
}

#[test]
fn demo_pure_writes_history() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("demo.json");
    let status = erbound()
        .args(["demo-pure", "--method", "cha"])
        .args(small())
        .arg("--json")
        .arg(&json)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let report: Report = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(report.history.unwrap().len(), 4);
    assert!(report.records[0].analytic_bits.unwrap() > 0.918);
}
