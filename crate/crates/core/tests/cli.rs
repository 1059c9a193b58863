use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn lampspeed(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lampspeed"))
        .args(args)
        .env("LAMPSPEED_OUT", out)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout_json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

#[test]
fn simulate_is_reproducible_and_guarded() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["simulate", "--group", "i=1,k=0,l=2,m=inf", "--times", "2^2..2^6", "--walkers", "50", "--seed", "7"];
    let first = lampspeed(dir.path(), &args);
    assert_eq!(code(&first), 0, "{}", String::from_utf8_lossy(&first.stderr));
    let path = String::from_utf8(first.stdout).unwrap().trim().to_string();
    let a = fs::read_to_string(&path).unwrap();
    assert!(a.starts_with("# tool: lampspeed"));
    assert!(a.contains("n,mean_lower,stderr_lower,mean_upper,stderr_upper,walkers,seed"));

    // Same config: refused, then forced with another thread count.
    assert_eq!(code(&lampspeed(dir.path(), &args)), 2);
    let mut forced = args.to_vec();
    forced.extend(["--force", "--parallelism", "1"]);
    assert_eq!(code(&lampspeed(dir.path(), &forced)), 0);
    assert_eq!(fs::read_to_string(&path).unwrap(), a);
}

#[test]
fn simulate_reads_spec_files_and_rejects_bad_specs() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("g.spec");
    fs::write(&spec, "# two factors\ni=1,k=3,l=4,m=9\ni=1,k=0,l=2,m=inf,tail\n").unwrap();
    let at = format!("@{}", spec.display());
    let o = lampspeed(dir.path(), &["simulate", "--group", &at, "--times", "4,8", "--walkers", "10"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(String::from_utf8(o.stdout).unwrap().trim()).unwrap();
    assert!(csv.contains("# spec: i=1,k=3,l=4,m=9; i=1,k=0,l=2,m=inf,tail"));
    assert_eq!(code(&lampspeed(dir.path(), &["simulate", "--group", "i=1,k=5,l=2,m=4"])), 2);
    assert_eq!(code(&lampspeed(dir.path(), &["simulate", "--group", "@/nonexistent.spec"])), 2);
    assert_eq!(code(&lampspeed(dir.path(), &["simulate", "--group", "i=1,k=0,l=2,m=inf", "--walkers", "1"])), 2);
}

#[test]
fn exponent_of_synthetic_power_law() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("c.csv");
    let mut text = String::from("# spec: synthetic\nn,mean_lower,stderr_lower,mean_upper,stderr_upper,walkers,seed\n");
    for j in 4..=12 {
        let n = 1u64 << j;
        let v = (n as f64).powf(0.6);
        text += &format!("{n},{v},0.01,{v},0.01,100,1\n");
    }
    fs::write(&csv, text).unwrap();
    let p = csv.to_str().unwrap();
    let o = lampspeed(dir.path(), &["exponent", p, "--window", "2^4..2^12"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert!((v["fit"]["slope"].as_f64().unwrap() - 0.6).abs() < 1e-9);
    assert_eq!(v["meta"]["tool"], "lampspeed");
    assert_eq!(code(&lampspeed(dir.path(), &["exponent", p, "--window", "2^4..2^5"])), 2);
    assert_eq!(code(&lampspeed(dir.path(), &["exponent", "/nonexistent.csv"])), 2);
}

#[test]
fn ball_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let o = lampspeed(dir.path(), &["ball", "--a", "i=1,k=7,l=5,m=20", "--b", "i=1,k=0,l=2,m=inf", "--radius", "3"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["result"]["coincide"], true);
    let o = lampspeed(dir.path(), &["ball", "--a", "i=1,k=1,l=4,m=inf", "--b", "i=1,k=0,l=2,m=inf", "--radius", "4"]);
    let v = stdout_json(&o);
    assert_eq!(v["result"]["coincide"], false);
    assert!(v["result"]["witness"].is_string());
    for (a, r) in [("i=1,k=2,l=3,m=inf", "2"), ("i=1,k=1,l=4,m=inf", "0")] {
        let b = if r == "0" { "i=1,k=0,l=2,m=inf" } else { a };
        let o = lampspeed(dir.path(), &["ball", "--a", a, "--b", b, "--radius", r]);
        assert_eq!(stdout_json(&o)["result"]["coincide"], true);
    }
    let written = fs::read_dir(dir.path().join("balls")).unwrap().count();
    assert_eq!(written, 4);
}

#[test]
fn dgen_constants_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let o = lampspeed(dir.path(), &["dgen", "--f", "trivial", "--g", "i=1,k=0,l=2,m=inf"]);
    let v = stdout_json(&o);
    assert_eq!((v["constants"]["c1"].as_u64(), v["constants"]["c2"].as_u64()), (Some(1), Some(0)));
    let o = lampspeed(dir.path(), &["dgen", "--f", "i=1,k=0,l=2,m=2", "--g", "i=1,k=0,l=2,m=inf"]);
    let v = stdout_json(&o);
    assert_eq!((v["constants"]["c1"].as_u64(), v["constants"]["c2"].as_u64()), (Some(1), Some(6)));
    assert_eq!(code(&lampspeed(dir.path(), &["dgen", "--f", "i=1,k=0,l=2,m=inf", "--g", "i=1,k=0,l=2,m=inf"])), 2);
}

#[test]
fn dist_table() {
    let dir = tempfile::tempdir().unwrap();
    let v = stdout_json(&lampspeed(dir.path(), &["dist", "--t", "0", "--l", "5"]));
    assert_eq!(v["result"]["distribution"]["p"], serde_json::json!(["1/1", "0/1", "0/1", "0/1", "0/1"]));
    let v = stdout_json(&lampspeed(dir.path(), &["dist", "--t", "9", "--l", "6"]));
    assert_eq!(v["result"]["non_increasing"], true);
    assert_eq!(v["result"]["ineq_32"]["holds"], true);
    assert_eq!(code(&lampspeed(dir.path(), &["dist", "--t", "3", "--l", "1"])), 2);
}

#[test]
fn schedule_commands() {
    let dir = tempfile::tempdir().unwrap();
    let o = lampspeed(dir.path(), &["schedule", "--lambda", "0.65", "--stages", "0", "--profile", "smoke"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let path = String::from_utf8(o.stdout).unwrap().trim().to_string();
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["schedule"]["final_spec"], "i=1,k=0,l=2,m=inf,tail");
    assert_eq!(code(&lampspeed(dir.path(), &["schedule", "--lambda", "0.9"])), 2);
    // The desk epsilon cannot meet the arithmetic condition on the grid.
    assert_eq!(code(&lampspeed(dir.path(), &["schedule", "--lambda", "0.65"])), 3);
    let o = lampspeed(
        dir.path(),
        &["schedule", "--lambda", "0.65", "--epsilon", "constant-ramp:600,1048576", "--profile", "smoke"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.path().join("curves").read_dir().unwrap().any(|e| e.unwrap().file_name().to_string_lossy().ends_with("-final.csv")));
}

#[test]
fn verify_suites() {
    let dir = tempfile::tempdir().unwrap();
    let o = lampspeed(dir.path(), &["verify", "--suite", "balls"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8(o.stdout).unwrap().contains("criterion 4 [PASS]"));
    assert_eq!(code(&lampspeed(dir.path(), &["verify", "--suite", "nope"])), 2);
    assert_eq!(code(&lampspeed(dir.path(), &["verify", "--suite", "schedule", "--profile", "smoke"])), 4);
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&lampspeed(dir.path(), &["frobnicate"])), 2);
    assert_eq!(code(&lampspeed(dir.path(), &["--help"])), 0);
}
