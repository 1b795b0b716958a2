use std::process::{Command, Output};

fn aplab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aplab"))
        .args(args)
        .env_remove("APLAB_PRECISION_BITS")
        .output()
        .expect("run aplab")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn length_curve_range_gives_eight_rows() {
    let o = aplab(&["length-curve", "--signal", "golden", "--eps", "0.4:8:2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "eps,L_lower,L_upper,window,resolved");
    assert_eq!(lines.len(), 9);
    assert!(!text.contains('\r'));
}

#[test]
fn exit_codes() {
    let o = aplab(&["scan", "--eps", "0.1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--signal"));

    let o = aplab(&["eval", "--signal", "0+0i@1.0", "--at", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("zero amplitude"));

    let o = aplab(&[
        "scan",
        "--signal",
        "golden",
        "--eps",
        "0.01",
        "--window",
        "1000",
        "--max-grid-points",
        "100",
    ]);
    assert_eq!(o.status.code(), Some(2));

    let o = aplab(&["cf", "--alpha", "phi", "--depth", "500"]);
    assert_eq!(o.status.code(), Some(2));

    // tiny windows truncate the inclusion lengths, so the golden checks fail
    let o = aplab(&[
        "verify",
        "--suite",
        "golden",
        "--min-hits",
        "1",
        "--initial-factor",
        "0.5",
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains(",false\n"));

    let o = aplab(&[
        "dimension",
        "--signal",
        "golden",
        "--eps",
        "0.1",
        "--grid",
        "10",
    ]);
    assert_eq!(o.status.code(), Some(1));

    assert_eq!(aplab(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(aplab(&["--help"]).status.code(), Some(0));
}

#[test]
fn eval_literal_signal() {
    let o = aplab(&["eval", "--signal", "1+0i@6.28,2-1i@1.0", "--at", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "t,re,im,translation_distance\n0,3,-1,0\n");
}

#[test]
fn json_round_trip() {
    let o = aplab(&[
        "di-fit", "--signal", "golden", "--eps", "0.4:5:2", "--format", "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["command"], "di-fit");
    assert_eq!(v["config"]["signal"], "golden");
    assert_eq!(v["config"]["eps"].as_array().unwrap().len(), 5);
    assert_eq!(v["config"]["min_hits"], 32);
    assert_eq!(v["result"]["curve"]["samples"].as_array().unwrap().len(), 5);
    let slope = v["result"]["fit"]["slope"].as_f64().unwrap();
    assert!(slope > 0.5);

    let o = aplab(&["cf", "--alpha", "649/200", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["result"]["exact_input"], true);
    assert_eq!(v["result"]["cf"]["a0"], "3");
    assert_eq!(
        v["result"]["cf"]["quotients"],
        serde_json::json!(["4", "12", "4"])
    );
    assert_eq!(v["result"]["cf"]["terminated"], true);
}

#[test]
fn cf_csv() {
    let o = aplab(&["cf", "--alpha", "649/200"]);
    assert_eq!(
        stdout(&o),
        "k,a,p,q\n0,3,3,1\n1,4,13,4\n2,12,159,49\n3,4,649,200\n"
    );
}

#[test]
fn diophantine_commands() {
    let o = aplab(&[
        "simdenom",
        "--alpha",
        "phi,sqrt2",
        "--delta",
        "0.05",
        "--qmax",
        "1000",
    ]);
    assert_eq!(stdout(&o), "found,q\ntrue,157\n");
    let o = aplab(&[
        "simdenom", "--alpha", "phi", "--delta", "0.01", "--qmax", "54",
    ]);
    assert_eq!(stdout(&o), "found,q\nfalse,\n");
    let o = aplab(&["badness", "--alpha", "phi", "--qmax", "1000"]);
    assert!(stdout(&o).starts_with("n,q_max,score,argmin_q\n1,1000,0.38196601125"));
    let o = aplab(&[
        "kronecker",
        "--signal",
        "golden",
        "--kappa",
        "0,pi",
        "--eps",
        "0.01",
        "--tmax",
        "1",
    ]);
    assert_eq!(stdout(&o), "found,t,residual_1,residual_2\nfalse,,,\n");
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "# golden run\nsignal = golden\neps = 0.4:3:2\nmin_hits = 16\n",
    )
    .unwrap();
    let path = cfg.to_str().unwrap();

    let o = aplab(&["length-curve", "--config", path]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 4);

    let o = aplab(&[
        "length-curve",
        "--config",
        path,
        "--eps",
        "0.4",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["config"]["eps"], serde_json::json!([0.4]));
    assert_eq!(v["config"]["min_hits"], 16);

    std::fs::write(&cfg, "signal = golden\nwindow_size = 3\n").unwrap();
    let o = aplab(&["length-curve", "--config", path, "--eps", "0.4"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown key"));
}

#[test]
fn output_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("dim.csv");
    let o = aplab(&[
        "dimension",
        "--signal",
        "golden",
        "--eps",
        "0.5,0.25",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("eps,cover_upper,packing_lower\n0.5,"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn precision_environment() {
    let run = |bits: &str| {
        Command::new(env!("CARGO_BIN_EXE_aplab"))
            .args(["cf", "--alpha", "phi", "--depth", "60"])
            .env("APLAB_PRECISION_BITS", bits)
            .output()
            .unwrap()
    };
    assert_eq!(run("100").status.code(), Some(0));
    // 53 bits certify about 38 quotients of the golden ratio
    assert_eq!(run("53").status.code(), Some(2));
    assert_eq!(run("200").status.code(), Some(1));
}

#[test]
fn deterministic_json() {
    let args = [
        "dimension",
        "--signal",
        "golden",
        "--eps",
        "0.5,0.25,0.125,0.0625",
        "--seed",
        "5",
        "--format",
        "json",
    ];
    let a = aplab(&args);
    let b = aplab(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!(v["result"]["report"]["fit"]["upper_dim"].as_f64().unwrap() > 1.5);
    assert_eq!(v["result"]["equivalence"]["seed"], 5);
}
