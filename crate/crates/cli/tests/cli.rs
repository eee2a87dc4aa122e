//! End-to-end runs of the `snv` binary.

use std::path::Path;
use std::process::{Command, Output};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use snv_cli::io::load_series_csv;
use snv_cli::CliError;

fn snv(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_snv")).args(args).current_dir(dir).output().expect("binary runs")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn sweep_from_config_has_the_documented_schema() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "defaults.json",
        r#"{"field": {"direction": "[001]", "sweep": {"start": 0, "stop": 9, "steps": 19}}, "temperature_k": 4.0}"#,
    );
    let out = snv(&["sweep-field", "--config", &config, "--out", "sweep.csv"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "b_tesla,line_label,freq_offset_ghz,intensity,thermal_weight");
    assert_eq!(lines.count(), 19 * 16);
}

#[test]
fn lifetime_fit_recovers_time_constant() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut csv = String::from("# synthetic lifetime trace\ntime_ns,value\n");
    for k in 0..400 {
        let t = 0.1 * k as f64;
        let mean = 2000.0 * (-t / 4.5).exp() + 5.0;
        let y = mean + Normal::new(0.0, mean.sqrt()).unwrap().sample(&mut rng);
        csv.push_str(&format!("{t},{y}\n"));
    }
    let input = write(dir.path(), "lifetime.csv", &csv);
    let out = snv(&["fit-decay", "--in", &input, "--floor", "--out", "fit.json", "--quiet"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stderr(&out).is_empty());
    let fit = json(&dir.path().join("fit.json"));
    let tau = fit["time_constant_ns"]["value"].as_f64().unwrap();
    assert!((tau / 4.5 - 1.0).abs() < 0.05, "{tau}");
    assert!(fit["time_constant_ns"]["std_error"].as_f64().unwrap() > 0.0);
    assert_eq!(fit["converged"], true);
    assert!(fit["residual_norm"].is_number());
}

#[test]
fn t1_table_decreases_with_temperature() {
    let dir = tempfile::tempdir().unwrap();
    let out = snv(
        &["t1-model", "--delta-ghz", "850", "--gamma0", "27175.12", "--temps", "3.25,4,5,6", "--out", "t1.csv"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let series = load_series_csv(&dir.path().join("t1.csv"), "temperature_k", "t1_ms").unwrap();
    assert_eq!(series.len(), 4);
    assert!(series.y.windows(2).all(|w| w[1] < w[0]));
    assert!((series.y[0] / 10.4 - 1.0).abs() < 1e-5);
}

#[test]
fn shuffled_columns_give_the_same_series() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.csv", "tau_ns,g2\n-1,0.5\n0,0.1\n1,0.5\n");
    let b = write(dir.path(), "b.csv", "# reordered\ng2,tau_ns\n0.5,-1\n0.1,0\n0.5,1\n");
    let sa = load_series_csv(Path::new(&a), "tau_ns", "g2").unwrap();
    let sb = load_series_csv(Path::new(&b), "tau_ns", "g2").unwrap();
    assert_eq!(sa, sb);
    assert_eq!(sa.len(), 3);
    assert!(sa.y_err.is_none());
}

#[test]
fn optional_uncertainty_column_is_read() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "t1.csv", "temperature_k,t1_ms,t1_ms_err\n3.25,10.4,1.0\n4,1.3,0.3\n");
    let s = load_series_csv(Path::new(&p), "temperature_k", "t1_ms").unwrap();
    assert_eq!(s.y_err, Some(vec![1.0, 0.3]));
}

#[test]
fn bad_cell_reports_line_and_column() {
    let dir = tempfile::tempdir().unwrap();
    let text = "time_ns,value\n0,1\n1,0.8\n2,0.6\n3,0.5\n4,0.4\n5,oops\n6,0.2\n";
    let p = write(dir.path(), "bad.csv", text);
    match load_series_csv(Path::new(&p), "time_ns", "value") {
        Err(CliError::BadNumber { line, column }) => {
            assert_eq!(line, 7);
            assert_eq!(column, "value");
        }
        other => panic!("expected BadNumber, got {other:?}"),
    }
    let out = snv(&["fit-decay", "--in", &p], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("BadNumber"), "{}", stderr(&out));
    assert!(stderr(&out).contains("line 7"));
}

#[test]
fn missing_and_empty_inputs_are_named() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "x.csv", "time_ns,signal\n0,1\n");
    assert!(
        matches!(load_series_csv(Path::new(&p), "time_ns", "value"), Err(CliError::MissingColumn(c)) if c == "value")
    );
    let e = write(dir.path(), "e.csv", "time_ns,value\n");
    assert!(matches!(load_series_csv(Path::new(&e), "time_ns", "value"), Err(CliError::EmptyFile(_))));
    let blank = write(dir.path(), "blank.csv", "");
    assert!(matches!(load_series_csv(Path::new(&blank), "time_ns", "value"), Err(CliError::EmptyFile(_))));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = snv(&["no-such-command"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr(&out).trim().lines().count(), 1);

    let out = snv(&["t1-model", "--temps", "4", "--bogus"], dir.path());
    assert_eq!(out.status.code(), Some(2));

    let config = write(dir.path(), "c.json", r#"{"temperature": 4}"#);
    let out = snv(&["t1-model", "--temps", "4", "--config", &config], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("InvalidConfig"));

    let out = snv(&["simulate-pumping", "--pump-line", "C3"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("UnknownLine"));

    let out = snv(&["--help"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("sweep-field"));
}

#[test]
fn failed_run_leaves_no_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "bad.csv", "time_ns,value\n0,x\n");
    let out = snv(&["fit-decay", "--in", &p, "--out", "fit.json"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(!dir.path().join("fit.json").exists());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn flags_override_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "c.json",
        r#"{"field": {"direction": "[001]", "sweep": {"start": 0, "stop": 9, "steps": 19}},
            "output": {"path": "from_config.csv", "format": "csv"}}"#,
    );
    let out = snv(&["sweep-field", "--config", &config, "--steps", "3"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(dir.path().join("from_config.csv")).unwrap();
    assert_eq!(text.lines().count(), 1 + 3 * 16);
    let out = snv(&["sweep-field", "--config", &config, "--steps", "2", "--out", "flag.csv"], dir.path());
    assert!(out.status.success());
    assert_eq!(std::fs::read_to_string(dir.path().join("flag.csv")).unwrap().lines().count(), 1 + 2 * 16);
}

#[test]
fn outputs_round_trip_through_the_reader() {
    let dir = tempfile::tempdir().unwrap();
    for (args, cols) in [
        (vec!["simulate-g2", "--points", "201", "--out", "g2.csv"], ("tau_ns", "g2", "g2.csv")),
        (vec!["simulate-spectrum", "--b-tesla", "3", "--out", "s.csv"], ("freq_ghz", "intensity", "s.csv")),
        (vec!["simulate-pumping", "--duration-ns", "2000", "--out", "p.csv", "--quiet"], ("time_ns", "value", "p.csv")),
        (
            vec!["t1-model", "--dark-times", "0,0.5,1,2,4", "--t1-ms", "1.26", "--floor", "0.05", "--out", "r.csv"],
            ("dark_time_ms", "ratio", "r.csv"),
        ),
    ] {
        let out = snv(&args, dir.path());
        assert!(out.status.success(), "{args:?}: {}", stderr(&out));
        let path = dir.path().join(cols.2);
        let first = std::fs::read(&path).unwrap();
        let series = load_series_csv(&path, cols.0, cols.1).unwrap();
        // re-serializing what was read reproduces the file exactly
        let mut again = format!("{},{}\n", cols.0, cols.1);
        for (x, y) in series.x.iter().zip(&series.y) {
            again.push_str(&format!("{},{}\n", snv_cli::io::format_number(*x), snv_cli::io::format_number(*y)));
        }
        assert_eq!(String::from_utf8(first).unwrap(), again, "{args:?}");
    }
}

#[test]
fn field_fit_from_the_command_line() {
    use snv_core::defect::{lab_to_defect_frame, DefectParameters, AXIS_111, DIR_001};
    use snv_core::fitting::predicted_lines;

    let dir = tempfile::tempdir().unwrap();
    let truth = DefectParameters::snv();
    let unit = lab_to_defect_frame(DIR_001, AXIS_111).unwrap();
    let mut csv = String::from("b_tesla,freq_offset_ghz\n");
    for b in [1.0, 3.0, 5.0, 7.0, 9.0] {
        for (_, f) in predicted_lines(&truth, unit.map(|c| c * b)).unwrap() {
            csv.push_str(&format!("{b},{f}\n"));
        }
    }
    let input = write(dir.path(), "lines.csv", &csv);
    let config = write(
        dir.path(),
        "init.json",
        r#"{"defect": {"lambda_g": 880.0, "lambda_e": 2300.0}, "field": {"direction": "[001]", "magnitude_tesla": 0}}"#,
    );
    let out = snv(
        &["fit-field", "--in", &input, "--config", &config, "--out", "fit.json", "--restarts", "2", "--seed", "3"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let fit = json(&dir.path().join("fit.json"));
    assert!((fit["ground_spin_orbit_fraction"].as_f64().unwrap() - 0.99).abs() < 1e-3, "{fit}");
    assert!((fit["excited_spin_orbit_fraction"].as_f64().unwrap() - 0.80).abs() < 1e-3, "{fit}");
    assert!((fit["lambda_g"]["value"].as_f64().unwrap() / 841.5 - 1.0).abs() < 1e-4);
}
