use std::f64::consts::PI;
use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn gupqm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gupqm")).args(args).env_remove("GUPQM_SEED").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    assert_eq!(o.status.code(), Some(0), "{}", stderr(o));
    serde_json::from_str(&stdout(o)).unwrap()
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

#[test]
fn coincident_free_kernel_in_two_dimensions() {
    let v = json(&gupqm(&["kernel", "--system", "free", "--dim", "2", "--alpha", "0", "--q0", "0,0", "--qf", "0,0", "--time", "1"]));
    let amp = &v["amplitude"];
    assert!(num(&amp["re"]).abs() < 1e-15);
    assert!((num(&amp["im"]) + 1.0 / (2.0 * PI)).abs() < 1e-15);
    for key in ["leading_prefactor", "f", "S0", "S1"] {
        assert!(v[key]["re"].is_f64() && v[key]["im"].is_f64(), "{key}");
    }
}

#[test]
fn bound_curve_minimum_respects_minimal_length() {
    let o = gupqm(&["bound", "--alpha", "1", "--hbar", "1", "--dp-min", "0.2", "--dp-max", "2", "--samples", "50"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("dP,dQ_bound"));
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            (a.parse().unwrap(), b.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 50);
    let min = rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let spacing = (2.0 - 0.2) / 49.0;
    // Second-order growth away from the minimum at dP = 1/sqrt(3).
    let grid_error = 1.5 * 3f64.sqrt() * spacing * spacing;
    assert!(min >= 3f64.sqrt() - 1e-12, "{min}");
    assert!(min <= 3f64.sqrt() + grid_error, "{min}");
}

#[test]
fn verify_all_passes_and_reports_every_check() {
    let o = gupqm(&["verify", "all", "--trials", "20", "--seed", "7", "--dim", "2", "--alpha", "1e-3"]);
    let v = json(&o);
    assert_eq!(v["passed"], Value::Bool(true));
    let suites = v["suites"].as_array().unwrap();
    assert_eq!(suites.len(), 5);
    for s in suites {
        assert_eq!(s["failed_trials"], 0);
        let records = s["records"].as_array().unwrap();
        assert_eq!(records.len(), 20);
        for r in records {
            assert!(r.get("error").is_none(), "{r}");
            for c in r["checks"].as_array().unwrap() {
                assert_eq!(c["passed"], Value::Bool(true), "{c}");
            }
        }
    }
}

#[test]
fn identical_inputs_give_identical_bytes() {
    let args = ["verify", "all", "--trials", "6", "--seed", "11", "--euclidean"];
    let a = gupqm(&args);
    let b = gupqm(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);

    let sweep = ["kernel", "--omega", "0.5", "--qf", "0.4,0.1", "--sweep", "alpha:0:1e-2:4", "--sweep", "time:0.5:2:5:log"];
    let serial = gupqm(&[&sweep[..], &["--jobs", "1"]].concat());
    let parallel = gupqm(&[&sweep[..], &["--jobs", "4"]].concat());
    assert_eq!(serial.status.code(), Some(0), "{}", stderr(&serial));
    assert_eq!(serial.stdout, parallel.stdout);
}

#[test]
fn seed_falls_back_to_environment() {
    let flag = gupqm(&["verify", "eom", "--trials", "3", "--seed", "99"]);
    let env = Command::new(env!("CARGO_BIN_EXE_gupqm"))
        .args(["verify", "eom", "--trials", "3"])
        .env("GUPQM_SEED", "99")
        .output()
        .unwrap();
    let default = gupqm(&["verify", "eom", "--trials", "3"]);
    assert_eq!(flag.stdout, env.stdout);
    assert_ne!(flag.stdout, default.stdout);

    let bad = Command::new(env!("CARGO_BIN_EXE_gupqm"))
        .args(["verify", "eom", "--trials", "1"])
        .env("GUPQM_SEED", "abc")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(stderr(&bad).contains("GUPQM_SEED"));
}

#[test]
fn csv_headers_are_fixed() {
    let cases: [(&[&str], &str); 5] = [
        (
            &["kernel", "--format", "csv"],
            "amplitude_re,amplitude_im,leading_prefactor_re,leading_prefactor_im,f_re,f_im,S0_re,S0_im,S1_re,S1_im",
        ),
        (&["action", "--format", "csv", "--qf", "1"], "S0_re,S0_im,S1_re,S1_im,total_re,total_im"),
        (&["spectrum", "--format", "csv", "--levels", "3"], "index,n1,n2,formula,oracle,delta"),
        (&["green", "--format", "csv"], "bessel_argument,correction_size,closed,numeric,delta"),
        (&["verify", "eom", "--trials", "1", "--format", "csv"], "suite,trial,description,check,value,passed"),
    ];
    for (args, header) in cases {
        let o = gupqm(args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stderr(&o));
        assert_eq!(stdout(&o).lines().next(), Some(header), "{args:?}");
    }
}

#[test]
fn sweeps_prefix_columns_in_input_order() {
    let o = gupqm(&["green", "--format", "csv", "--sweep", "epsilon:0.5:2:3", "--sweep", "alpha:0:1e-2:2"]);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 7);
    assert!(lines[0].starts_with("epsilon,alpha,bessel_argument"));
    let eps: Vec<f64> = lines[1..].iter().map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(eps, vec![0.5, 0.5, 1.25, 1.25, 2.0, 2.0]);

    let v = json(&gupqm(&["action", "--qf", "1", "--sweep", "time:1:2:2"]));
    let arr = v.as_array().unwrap();
    assert_eq!(num(&arr[1]["sweep"]["time"]), 2.0);
    assert!((num(&arr[1]["S0"]["re"]) - 0.25).abs() < 1e-15);
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# oscillator run\ncommand = kernel\nomega = 0.5\nq0 = 0.1,0.2\nqf = 0.3,0.4\ntime = 1.5\nalpha = 1e-3\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let from_file = json(&gupqm(&["kernel", "--config", cfg]));
    let explicit =
        json(&gupqm(&["kernel", "--omega", "0.5", "--q0", "0.1,0.2", "--qf", "0.3,0.4", "--time", "1.5", "--alpha", "1e-3"]));
    assert_eq!(from_file, explicit);
    let overridden = json(&gupqm(&["kernel", "--config", cfg, "--alpha", "0"]));
    let leading =
        json(&gupqm(&["kernel", "--omega", "0.5", "--q0", "0.1,0.2", "--qf", "0.3,0.4", "--time", "1.5", "--alpha", "0"]));
    assert_eq!(overridden, leading);
    assert_ne!(overridden, from_file);

    let wrong = gupqm(&["action", "--config", cfg]);
    assert_eq!(wrong.status.code(), Some(2));
    assert!(stderr(&wrong).contains("run.cfg:2"), "{}", stderr(&wrong));
}

#[test]
fn config_diagnostics_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "mass = 1\n\nmomentum = 3\n").unwrap();
    let o = gupqm(&["kernel", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bad.cfg:3") && stderr(&o).contains("momentum"), "{}", stderr(&o));

    fs::write(&cfg, "mass = 1\ntime = soon\n").unwrap();
    let o = gupqm(&["kernel", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bad.cfg:2") && stderr(&o).contains("soon"), "{}", stderr(&o));

    fs::write(&cfg, "sweep = hbar:1:2:0\n").unwrap();
    let o = gupqm(&["bound", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bad.cfg:1"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_two() {
    let cases: [&[&str]; 8] = [
        &["kernel", "--bogus"],
        &["kernel", "--dim", "3", "--q0", "1,2"],
        &["kernel", "--q0", "1,2", "--qf", "1"],
        &["kernel", "--system", "free", "--omega", "1"],
        &["kernel", "--sweep", "q0:0:1:3"],
        &["verify", "all", "--alpha", "0.5"],
        &["green", "--dim", "3"],
        &["bound", "--dp-min", "0"],
    ];
    for args in cases {
        let o = gupqm(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn caustic_reports_the_offending_phase() {
    let o = gupqm(&["kernel", "--system", "sho", "--omega", "2", "--time", "1.5707963267948966"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("omega*T = 3.14159"), "{}", stderr(&o));
}

#[test]
fn failed_verification_exits_one() {
    let o = gupqm(&["verify", "schrodinger", "--trials", "2", "--tol", "relative_residual=1e-30"]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["passed"], Value::Bool(false));
}

#[test]
fn writes_to_out_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("green.json");
    let o = gupqm(&["green", "--compare-numeric", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert!(num(&v["delta"]).abs() < 1e-9);

    let o = gupqm(&["green", "--out", dir.path().join("missing/dir/x.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("cannot write"));
}
