//! End-to-end checks of the `pgn` binary: exit codes, report shapes, and
//! byte stability of the CSV emitters.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pgn"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

/// Fresh scratch directory for one test.
fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("pgn-cli-{tag}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).expect("create scratch dir");
    dir
}

const DIM5_SEED: &str = r#"{
  "m": 2,
  "n": 5,
  "rho": "8",
  "points": [
    ["1", "8", "8", "10", "25"],
    ["8", "10", "10", "25", "51"],
    ["8", "28", "28", "64", "80"]
  ]
}"#;

fn write_dim5_seed(dir: &Path) -> PathBuf {
    let path = dir.join("dim5_g2_s3.json");
    fs::write(&path, DIM5_SEED).expect("write seed");
    path
}

#[test]
fn round_trip_reproduces_the_periodic_invariants() {
    let dir = scratch("round-trip");
    let seed = write_dim5_seed(&dir);
    let sys = dir.join("sys.json");

    let out = run(&["build", "--seed", seed.to_str().unwrap(), "--periods", "2", "--out",
        sys.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));

    let out = run(&["validate", sys.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("\"valid\": true"));

    let out = run(&["invariants", "--seed", seed.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some("alpha = 43/9, beta = 86/9"));
    assert!(text.lines().nth(1).unwrap().starts_with("alpha ~ 4.77777777"));

    let _ = fs::remove_dir_all(&dir);
}

#[test]
fn corrupted_ordering_fails_validate_and_audit() {
    let dir = scratch("corrupt");
    let seed = write_dim5_seed(&dir);
    let sys = dir.join("sys.json");
    let out = run(&["build", "--seed", seed.to_str().unwrap(), "--periods", "1", "--out",
        sys.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));

    // swapping two initial values preserves the sum but breaks the ordering
    let mut raw: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&sys).unwrap()).unwrap();
    let initial = raw["initial"].as_array_mut().unwrap();
    initial.swap(1, 3);
    let bad = dir.join("bad.json");
    fs::write(&bad, serde_json::to_string(&raw).unwrap()).unwrap();

    let out = run(&["validate", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("\"valid\": false"));
    assert!(stdout(&out).contains("S2-ordering"));

    let out = run(&["audit", "--system", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("\"rule\": \"S2-ordering\""));
    assert!(stderr(&out).contains("\"rule\":\"S2-ordering\""));

    let _ = fs::remove_dir_all(&dir);
}

#[test]
fn audit_passes_on_a_built_system() {
    let dir = scratch("audit-pass");
    let seed = write_dim5_seed(&dir);
    let sys = dir.join("sys.json");
    let out = run(&["build", "--seed", seed.to_str().unwrap(), "--periods", "2", "--out",
        sys.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));

    let out = run(&["audit", "--system", sys.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    for rule in ["type_kl", "chi_extrema_max", "mm_lemma_eq2", "s35_bloc_lemma4"] {
        assert!(text.contains(rule), "{rule} missing");
    }
    assert!(!text.contains("\"status\": \"violation\""));

    // the rule filter keeps only the requested ids
    let out = run(&["audit", "--system", sys.to_str().unwrap(), "--rules", "mm_lemma_eq2"]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let checks = report["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    assert!(checks.iter().all(|c| c["rule"] == "mm_lemma_eq2"));

    let _ = fs::remove_dir_all(&dir);
}

#[test]
fn family_sweep_contains_the_closed_form_row() {
    let out = run(&["family", "--name", "s35", "--g", "2", "--s", "6"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.starts_with("g,s,alpha,beta,alpha_dec,beta_dec,family_tag"));
    assert!(text.contains("2,6,323/65,646/65"), "{text}");
}

#[test]
fn exact_flags_reject_decimals() {
    let out = run(&["family", "--name", "s35", "--g", "1.5", "--s", "3"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["probe", "--m", "2", "--n", "4", "--g-grid", "2,2.5", "--s-max", "1",
        "--iters", "4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_or_malformed_input_exits_two() {
    let out = run(&["invariants", "--seed", "/nonexistent/seed.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("\"kind\":\"malformed\""));

    let dir = scratch("bad-json");
    let path = dir.join("garbage.json");
    fs::write(&path, "{ not json").unwrap();
    let out = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let _ = fs::remove_dir_all(&dir);
}

#[test]
fn probe_bytes_do_not_depend_on_thread_count() {
    let args =
        ["probe", "--m", "2", "--n", "4", "--g-grid", "3/2,2", "--s-max", "1", "--iters", "10"];
    let one = run(&[&args[..], &["--threads", "1"]].concat());
    let four = run(&[&args[..], &["--threads", "4"]].concat());
    assert!(one.status.success(), "{}", stderr(&one));
    assert_eq!(one.stdout, four.stdout);

    let env = bin()
        .args(args)
        .env("PGN_THREADS", "2")
        .output()
        .expect("binary runs");
    assert_eq!(one.stdout, env.stdout);

    let text = stdout(&one);
    assert!(text.starts_with("m,n,g,s,rho,pattern,alpha_lo,alpha_hi,beta"));
    // the regular corner is rediscovered at both grid points
    assert!(text.contains("2,4,3/2,1,3/2,1:4,3/2,"));
    assert!(text.contains("2,4,2,1,2,1:4,2,"));
}

#[test]
fn plotdata_overlays_exact_curves() {
    let dir = scratch("plotdata");
    let probe = dir.join("probe.csv");
    let out = run(&["probe", "--m", "2", "--n", "4", "--g-grid", "2", "--s-max", "1", "--iters",
        "8", "--out", probe.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));

    let out = run(&["plotdata", "--in", probe.to_str().unwrap(), "--curves",
        "s24,s35_high,s35_conj,s35_arc2"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.starts_with("source,curve,g,alpha,beta,alpha_dec,beta_dec"));
    assert!(text.contains("probe,,2,"));
    // single input point: one sample per clipped window
    assert!(text.contains("curve,s24,2,2,4,"));
    assert!(text.contains("curve,s35_high,2,5,10,"));
    // conjecture curve at g = 2: alpha = 5 - 1/3 = 14/3
    assert!(text.contains("curve,s35_conj,2,14/3,28/3,"));
    // the second arc keeps its own window; all samples pass the gates
    assert!(text.contains("curve,s35_arc2,"));
    for line in text.lines().filter(|l| l.starts_with("curve,s35_arc2,")) {
        let g: Vec<&str> = line.split(',').collect();
        let num: f64 = {
            let parts: Vec<&str> = g[2].split('/').collect();
            let p: f64 = parts[0].parse().unwrap();
            let q: f64 = if parts.len() > 1 { parts[1].parse().unwrap() } else { 1.0 };
            p / q
        };
        assert!((1.797..=1.840).contains(&num), "{line}");
    }

    let _ = fs::remove_dir_all(&dir);
}
