use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use rls_predict::timeseries::{load_csv, CsvOptions};

fn rlspredict(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rlspredict"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn synth_file(dir: &Path, name: &str, extra: &[&str]) -> String {
    let out = dir.join(name);
    let mut args = vec!["synth", "--output", path_str(&out)];
    args.extend_from_slice(extra);
    let status = rlspredict(&args);
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    out.to_str().unwrap().to_string()
}

#[test]
fn synth_is_reproducible_and_loadable() {
    let dir = tempfile::tempdir().unwrap();
    let flags = ["--ar", "0.9", "--noise", "0.1", "--length", "2000", "--seed", "7"];
    let a = synth_file(dir.path(), "a.csv", &flags);
    let b = synth_file(dir.path(), "b.csv", &flags);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let text = fs::read_to_string(&a).unwrap();
    assert!(text.starts_with("index,price\n0,"));
    let series = load_csv(&a, &CsvOptions::default()).unwrap();
    assert_eq!(series.len(), 2000);
}

#[test]
fn predict_on_short_file_names_the_bound() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("short.csv");
    fs::write(&input, "price\n1\n2\n3\n4\n5\n").unwrap();
    let out = rlspredict(&["predict", "--input", path_str(&input)]);
    assert_eq!(out.status.code(), Some(4));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("117") && stderr.contains("N + L + 1"), "{stderr}");
    assert_eq!(stderr.lines().count(), 1);
}

#[test]
fn input_errors_have_their_own_status() {
    let out = rlspredict(&["predict", "--input", "/nonexistent/prices.csv"]);
    assert_eq!(out.status.code(), Some(3));

    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.csv");
    fs::write(&input, "price\n1.5\nabc\n").unwrap();
    let out = rlspredict(&["predict", "--input", path_str(&input)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("row 3"));

    let out = rlspredict(&["predict", "--input", path_str(&input), "--lambda", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn help_documents_exit_statuses() {
    let out = rlspredict(&["--help"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for code in ["0 ", "2 ", "3 ", "4 ", "5 ", "6 "] {
        assert!(text.contains(&format!("  {code}")), "{text}");
    }
}

#[test]
fn predict_trace_and_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let input = synth_file(dir.path(), "s.csv", &["--ar", "0.9", "--length", "300", "--seed", "3"]);
    let snaps = dir.path().join("w.csv");
    let out = rlspredict(&[
        "predict",
        "--input",
        &input,
        "--coeffs",
        "5",
        "--window",
        "2",
        "--snapshots-output",
        path_str(&snaps),
    ]);
    assert!(out.status.success());
    let trace = String::from_utf8(out.stdout).unwrap();
    let mut lines = trace.lines();
    assert_eq!(lines.next(), Some("index,desired,predicted,error"));
    assert!(lines.next().unwrap().starts_with("6,"));
    assert_eq!(trace.lines().count(), 1 + 300 - 6);

    let snaps = fs::read_to_string(snaps).unwrap();
    assert!(snaps.starts_with("index,w0,w1,w2,w3,w4\n6,"));
    assert_eq!(snaps.lines().count(), 1 + 300 - 6);
}

/// Compares CSV text against the JSON emission of the same run, cell by cell.
fn assert_same_values(csv_text: &str, json_text: &str) {
    let json: serde_json::Value = serde_json::from_str(json_text).unwrap();
    let records = json.as_array().unwrap();
    let mut lines = csv_text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), records.len());
    for (row, record) in rows.iter().zip(records) {
        for (key, cell) in header.iter().zip(row.split(',')) {
            let value = &record[*key];
            match cell.parse::<f64>() {
                Ok(x) => assert_eq!(value.as_f64(), Some(x), "{key}"),
                Err(_) if cell.is_empty() => assert!(value.is_null()),
                Err(_) => assert_eq!(value.as_str(), Some(cell)),
            }
        }
    }
}

#[test]
fn json_and_csv_agree() {
    let dir = tempfile::tempdir().unwrap();
    let input = synth_file(dir.path(), "s.csv", &["--ar", "0.9", "--length", "400", "--seed", "9"]);
    let runs: [&[&str]; 3] = [
        &["forecast", "--input", &input, "--coeffs", "8", "--window", "5"],
        &[
            "sweep", "--input", &input, "--n-range", "2:6:2", "--l-range", "1:4", "--eval-from", "300", "--eval-to",
            "399",
        ],
        &["table", "--input", &input, "--rows", "8:5,4:3", "--anchor", "380"],
    ];
    for args in runs {
        let csv = rlspredict(args);
        assert!(csv.status.success(), "{}", String::from_utf8_lossy(&csv.stderr));
        let mut json_args = args.to_vec();
        json_args.extend(["--format", "json"]);
        let json = rlspredict(&json_args);
        assert!(json.status.success());
        assert_same_values(
            &String::from_utf8(csv.stdout).unwrap(),
            &String::from_utf8(json.stdout).unwrap(),
        );
    }
}

#[test]
fn sweep_profiles() {
    let dir = tempfile::tempdir().unwrap();
    let input = synth_file(dir.path(), "s.csv", &["--ar", "0.9", "--length", "500", "--seed", "2"]);
    let base = [
        "sweep", "--input", &input, "--n-range", "2:10:4", "--l-range", "1:5", "--eval-from", "400", "--eval-to", "499",
        "--jobs", "2",
    ];
    let run = |emit: &str| {
        let mut args = base.to_vec();
        args.extend(["--emit", emit]);
        let out = rlspredict(&args);
        assert!(out.status.success());
        String::from_utf8(out.stdout).unwrap()
    };
    let surface = run("surface");
    assert!(surface.starts_with("n,l,correlation\n2,1,"));
    assert_eq!(surface.lines().count(), 1 + 3 * 5);
    let by_n = run("profile-n");
    assert!(by_n.starts_with("n,max_correlation\n"));
    assert_eq!(by_n.lines().count(), 1 + 3);
    let by_l = run("profile-l");
    assert!(by_l.starts_with("l,max_correlation\n"));
    assert_eq!(by_l.lines().count(), 1 + 5);

    let bad = rlspredict(&["sweep", "--input", &input, "--n-range", "5:10", "--eval-from", "2", "--eval-to", "499"]);
    assert_eq!(bad.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("N=5"));
}

#[test]
fn backtest_no_trade_is_success() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("down.csv");
    let mut text = String::from("price\n");
    for k in 0..400 {
        text.push_str(&format!("{}\n", 100.0 * 0.995f64.powi(k)));
    }
    fs::write(&input, text).unwrap();
    let out = rlspredict(&[
        "backtest",
        "--input",
        path_str(&input),
        "--coeffs",
        "5",
        "--window",
        "4",
        "--anchor",
        "380",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "n,l,buy_index,sell_index,buy_price,sell_price,profit_pct\n5,4,,,,,no_trade\n"
    );
}

#[test]
fn table_uses_design_schema() {
    let dir = tempfile::tempdir().unwrap();
    let input = synth_file(dir.path(), "s.csv", &["--ar", "0.98", "--noise", "0.3", "--length", "2490", "--seed", "1"]);
    let out_path = dir.path().join("table.csv");
    let out = rlspredict(&["table", "--input", &input, "--output", path_str(&out_path), "--jobs", "3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(out_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,l,buy_index,sell_index,buy_price,sell_price,profit_pct"));
    let pairs: Vec<String> = lines.map(|l| l.split(',').take(2).collect::<Vec<_>>().join(":")).collect();
    assert_eq!(pairs, ["60:20", "65:19", "70:18", "75:17", "80:16", "85:15", "90:16", "95:17", "100:18"]);
}
