use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn usf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_usf"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn error_record(o: &Output) -> Value {
    let text = String::from_utf8(o.stderr.clone()).unwrap();
    serde_json::from_str(text.trim()).expect("stderr holds one JSON record")
}

#[test]
fn rho_diag_csv_has_echo_and_rows() {
    let o = usf(&["rho-diag", "--d", "2", "--lambda", "0.5", "--n-max", "40"]);
    assert!(o.status.success());
    let s = stdout(&o);
    let echo: Vec<&str> = s.lines().take_while(|l| l.starts_with("# ")).collect();
    assert!(echo.contains(&"# command=rho-diag"));
    assert!(echo.contains(&"# lambda=0.5"));
    assert!(echo.contains(&"# n_max=40"));
    let data: Vec<&str> = s.lines().skip(echo.len()).collect();
    assert_eq!(data[0], "n,p2n,root_estimate,corrected_ratio,hk_ratio");
    assert_eq!(data.len(), 41);
    let p2: f64 = data[1].split(',').nth(1).unwrap().parse().unwrap();
    assert!((p2 - 1.0 / 7.0).abs() < 1e-15);
}

#[test]
fn wsf_z1_writes_exact_and_empirical_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("z1.csv");
    let o = usf(&[
        "wsf-z1",
        "--lambda",
        "0.5",
        "--n",
        "30",
        "--trials",
        "2000",
        "--seed",
        "7",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("# command=wsf-z1\n"));
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header = rdr.headers().unwrap().clone();
    assert_eq!(
        header.iter().collect::<Vec<_>>(),
        [
            "position",
            "count",
            "frequency",
            "exact_finite",
            "exact_limit",
            "z"
        ]
    );
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 62);
    let total: u64 = rows.iter().map(|r| r[1].parse::<u64>().unwrap()).sum();
    assert_eq!(total, 2000);
    let exact: f64 = rows.iter().map(|r| r[3].parse::<f64>().unwrap()).sum();
    assert!((exact - 1.0).abs() < 1e-12);
}

#[test]
fn invalid_lambda_is_a_domain_error_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("never.csv");
    let o = usf(&["speed", "--lambda", "1.5", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(error_record(&o)["error"]["kind"], "domain");
    assert!(!Path::new(&out).exists());
    // λ = 1 is only a reference value for some commands
    assert_eq!(usf(&["speed", "--lambda", "1"]).status.code(), Some(3));
    assert!(usf(&["rho-diag", "--lambda", "1", "--n-max", "3"])
        .status
        .success());
}

#[test]
fn error_categories_have_stable_codes() {
    let cases: [(&[&str], i32, &str); 5] = [
        (&["no-such-command"], 2, "parse"),
        (&["rho-diag", "--d", "x"], 2, "parse"),
        (
            &["llt-diag", "--n", "5", "--sigma", "0.001"],
            5,
            "empty-region",
        ),
        (&["bnk", "--n-max", "12", "--mode", "brute"], 4, "budget"),
        (&["path-prob", "--path", "0,0;2,0"], 3, "domain"),
    ];
    for (args, code, kind) in cases {
        let o = usf(args);
        assert_eq!(o.status.code(), Some(code), "{args:?}");
        let rec = error_record(&o);
        assert_eq!(rec["error"]["kind"], kind, "{args:?}");
        assert_eq!(rec["error"]["exit_code"], code);
        assert!(o.stdout.is_empty());
    }
}

#[test]
fn identical_configs_give_identical_bytes() {
    let base = [
        "intersections",
        "--d",
        "2",
        "--horizon",
        "200,400",
        "--trials",
        "30",
        "--seed",
        "5",
    ];
    let one = usf(&[&base[..], &["--workers", "1"]].concat());
    let again = usf(&base);
    let four = usf(&[&base[..], &["--workers", "4"]].concat());
    assert!(one.status.success());
    assert_eq!(one.stdout, again.stdout);
    assert_eq!(one.stdout, four.stdout);
    assert!(stdout(&one).lines().any(|l| l == "# horizon=200,400"));
}

#[test]
fn config_file_fills_gaps_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# catalan run\nn_max = 4\noutput = json\n").unwrap();
    let o = usf(&["catalan", "--config", cfg.to_str().unwrap()]);
    let s = stdout(&o);
    let lines: Vec<Value> = s
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines[0]["params"]["n_max"], 4);
    assert_eq!(lines.len(), 6);
    assert_eq!(lines[5]["catalan"], "14");

    let o = usf(&[
        "catalan",
        "--config",
        cfg.to_str().unwrap(),
        "--n-max",
        "2",
        "--output",
        "csv",
    ]);
    let s = stdout(&o);
    assert!(s.contains("# n_max=2\n"));
    assert!(s.ends_with("l,catalan,tail\n0,1,0.25\n1,1,0.3125\n2,2,0.34375\n"));

    std::fs::write(&cfg, "colour = blue\n").unwrap();
    assert_eq!(
        usf(&["catalan", "--config", cfg.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn box_and_ust_agree_on_edges() {
    let b = usf(&[
        "box",
        "--d",
        "1",
        "--n",
        "2",
        "--lambda",
        "0.5",
        "--boundary",
        "wired",
    ]);
    let s = stdout(&b);
    let edges: Vec<&str> = s.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    // wired segment [-2, 2] is a 6-cycle through the root
    assert_eq!(edges.len(), 6);
    let e = usf(&["ust", "--d", "1", "--n", "2", "--mode", "exact"]);
    let trees: Vec<String> = stdout(&e)
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(String::from)
        .collect();
    assert_eq!(trees.len(), 6);
    let total: f64 = trees
        .iter()
        .map(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap())
        .sum();
    assert!((total - 1.0).abs() < 1e-12);
    let sampled = usf(&["ust", "--d", "2", "--n", "3", "--trials", "3"]);
    assert!(sampled.status.success());
    assert_eq!(
        stdout(&sampled)
            .lines()
            .filter(|l| !l.starts_with('#'))
            .count(),
        4
    );
}

#[test]
fn every_subcommand_runs_with_small_parameters() {
    let runs: [&[&str]; 15] = [
        &["rho-diag", "--n-max", "3"],
        &["speed", "--horizon", "100", "--trials", "4"],
        &["axial-visits", "--horizon", "100", "--trials", "4"],
        &["intersections", "--horizon", "50", "--trials", "4"],
        &["expected-intersections", "--n", "5"],
        &["llt-diag", "--n-max", "6"],
        &["catalan", "--n-max", "3"],
        &["bnk", "--n-max", "4"],
        &["path-prob", "--path", "0,0;0,1;0,0"],
        &["alpha", "--horizon", "50,100", "--trials", "10", "--r", "5"],
        &[
            "tree-count",
            "--horizon",
            "25",
            "--trials",
            "10",
            "--k",
            "3",
        ],
        &["box", "--n", "1"],
        &["ust", "--n", "1", "--trials", "2"],
        &["wsf-z1", "--n", "2", "--trials", "10"],
        &["empirical-return", "--n", "2", "--trials", "100"],
    ];
    for args in runs {
        let o = usf(args);
        assert!(
            o.status.success(),
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        let first = stdout(&o).lines().next().unwrap().to_string();
        assert_eq!(first, format!("# command={}", args[0]));
    }
}
