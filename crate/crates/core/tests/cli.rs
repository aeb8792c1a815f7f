use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rframes"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn write_signal(dir: &Path, name: &str, v: &[f64]) {
    let body: Vec<String> = v.iter().map(|x| format!("{x:?}")).collect();
    fs::write(dir.join(name), body.join("\n") + "\n").unwrap();
}

fn cos_mix(n: usize, periods: &[usize]) -> Vec<f64> {
    (0..n)
        .map(|k| {
            periods
                .iter()
                .map(|&q| (2.0 * std::f64::consts::PI * k as f64 / q as f64).cos())
                .sum()
        })
        .collect()
}

#[test]
fn rsum_prints_integers() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(stdout(&run(&["rsum", "--q", "5", "--n", "10"], dir.path())).trim(), "4,-1,-1,-1,-1,4,-1,-1,-1,-1");
    assert_eq!(stdout(&run(&["rsum", "--q", "1", "--n", "3"], dir.path())).trim(), "1,1,1");
    let bad = run(&["rsum", "--q", "3", "--n", "4"], dir.path());
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn frame_check_worked_examples() {
    let dir = tempfile::tempdir().unwrap();
    let r = json(&run(&["frame-check", "--n", "6", "--p", "2"], dir.path()));
    assert_eq!((r["tight"].as_bool(), r["A"].as_f64()), (Some(true), Some(18.0)));
    let r = json(&run(&["frame-check", "--n", "8", "--p", "1", "--crosscheck"], dir.path()));
    assert_eq!((r["tight"].as_bool(), r["A"].as_f64()), (Some(true), Some(64.0)));
    assert_eq!(r["frame_operator"]["A"].as_f64(), Some(64.0));
    let r = json(&run(&["frame-check", "--n", "12", "--p", "2"], dir.path()));
    assert_eq!(r["is_frame"].as_bool(), Some(false));
    assert_eq!(r["ranks"], serde_json::json!([2, 1, 2, 1, 2, 1]));
    assert_eq!(run(&["frame-check", "--n", "12", "--p", "5"], dir.path()).status.code(), Some(2));
}

#[test]
fn json_output_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = run(&["frame-check", "--n", "30", "--p", "2"], dir.path());
    let b = run(&["frame-check", "--n", "30", "--p", "2"], dir.path());
    assert_eq!(a.stdout, b.stdout);
    write_signal(dir.path(), "x.csv", &cos_mix(30, &[3, 5]));
    let args = ["denoise", "--signal", "x.csv", "--n", "30", "--snr-db", "0", "--seed", "5"];
    assert_eq!(run(&args, dir.path()).stdout, run(&args, dir.path()).stdout);
}

#[test]
fn period_id_reports_lcm() {
    let dir = tempfile::tempdir().unwrap();
    write_signal(dir.path(), "mix.csv", &cos_mix(30, &[3, 5, 15]));
    let r = json(&run(&["period-id", "--signal", "mix.csv", "--out", "pid"], dir.path()));
    assert_eq!(r["period"], 15);
    assert!(dir.path().join("pid/energies.csv").exists());
    write_signal(dir.path(), "two.csv", &cos_mix(20, &[2, 5]));
    assert_eq!(json(&run(&["period-id", "--signal", "two.csv"], dir.path()))["period"], 10);
    write_signal(dir.path(), "flat.csv", &[2.5; 12]);
    assert_eq!(json(&run(&["period-id", "--signal", "flat.csv"], dir.path()))["period"], 1);
    assert_eq!(run(&["period-id", "--signal", "missing.csv"], dir.path()).status.code(), Some(4));
}

#[test]
fn recover_writes_traces_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let x: Vec<f64> = (0..38).map(|k| if k == 5 { 1.0 } else { 0.0 }).collect();
    write_signal(dir.path(), "x.csv", &x);
    fs::write(dir.path().join("m.json"), r#"{"pairs": [[4, 3]]}"#).unwrap();
    let args = ["recover", "--signal", "x.csv", "--n", "38", "--p", "2", "--missing", "m.json", "--out", "rec"];
    let r = json(&run(&args, dir.path()));
    assert_eq!(r["condition"]["satisfied"].as_bool(), Some(true));
    assert!(r["sup_error"].as_f64().unwrap() < 1e-6);
    let traces = fs::read_to_string(dir.path().join("rec/traces.csv")).unwrap();
    assert!(traces.starts_with("n,original,observed,output\n"));
    assert_eq!(traces.lines().count(), 39);
    let report: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("rec/report.json")).unwrap()).unwrap();
    assert_eq!(report, r);
}

#[test]
fn recover_with_periods_from_a_request() {
    let dir = tempfile::tempdir().unwrap();
    let x = cos_mix(70, &[5, 7]);
    let missing: Vec<[usize; 2]> = (15..=34).map(|k| [k, 4]).collect();
    let req = serde_json::json!({"signal": {"n": 70, "values": x}, "p": 2, "missing": {"pairs": missing}, "periods": [5, 7]});
    fs::write(dir.path().join("req.json"), req.to_string()).unwrap();
    let r = json(&run(&["recover", "--request", "req.json"], dir.path()));
    assert!(r["sup_error"].as_f64().unwrap() < 1e-6);
    assert_eq!(r["periods"], serde_json::json!([5, 7]));
}

#[test]
fn denoise_reports_gain() {
    let dir = tempfile::tempdir().unwrap();
    write_signal(dir.path(), "x.csv", &cos_mix(30, &[3, 5]));
    let r = json(&run(&["denoise", "--signal", "x.csv", "--n", "30", "--snr-db", "0.0006", "--seed", "1", "--out", "den"], dir.path()));
    for key in ["snr_noisy_db", "snr_denoised_db", "snr_gain_db"] {
        assert!(r[key].is_number(), "{key}");
    }
    assert!(dir.path().join("den/traces.csv").exists());
    // No noise: the input already lies on its detected channels.
    let r = json(&run(&["denoise", "--signal", "x.csv", "--n", "30"], dir.path()));
    assert_eq!(r["snr_gain_db"], "inf");
    let x = cos_mix(30, &[3, 5]);
    let out: Vec<f64> = r["denoised"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert!(x.iter().zip(&out).all(|(a, b)| (a - b).abs() < 1e-9));
}

#[test]
fn reproduce_examples_and_erasures() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["reproduce", "examples", "--out", "ex"], dir.path());
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("N=6 p=2: tight with bound 18\n"));
    assert!(text.contains("N=8 p=1: tight with bound 64\n"));
    assert!(text.contains("N=12 p=2: not a frame"));
    let ex: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("ex/examples.json")).unwrap()).unwrap();
    assert_eq!(ex.as_array().unwrap().len(), 3);
    let o = run(&["reproduce", "erasures", "--out", "er"], dir.path());
    assert!(stdout(&o).contains("without L0 c4, L2 c4: robust = false"));
    let csv = fs::read_to_string(dir.path().join("er/erasures.csv")).unwrap();
    let sufficient_failures = csv
        .lines()
        .skip(1)
        .filter(|l| {
            let f: Vec<&str> = l.split(',').collect();
            f[3] == "true" && f[8] != "0"
        })
        .count();
    assert_eq!(sufficient_failures, 0);
}
