use std::process::{Command, Output};

fn annuli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_annuli"))
        .args(args)
        .env_remove("ANNULI_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

#[test]
fn dim_isotropic_value() {
    let o = annuli(&["dim", "--n", "2", "--tau-psi", "1", "--tau-phi", "1"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("dim = 4/3"), "{}", stdout(&o));
}

#[test]
fn dim_insensitive_regime_and_weighted() {
    let o = annuli(&["dim", "--n", "2", "--tau-psi", "2", "--tau-phi", "7"]);
    assert!(stdout(&o).starts_with("dim = 1\n"));
    let o = annuli(&["dim", "--n", "2", "--tau-psi", "1", "--tau-phi", "1", "--weighted"]);
    assert!(stdout(&o).starts_with("dim = 4/3"));
}

#[test]
fn dim_limits() {
    // thickness 0: plain balls, Jarník value
    let o = annuli(&["dim", "--n", "2", "--tau-psi", "1", "--tau-phi", "0"]);
    assert!(stdout(&o).starts_with("dim = 3/2"), "{}", stdout(&o));
    let o = annuli(&["dim", "--n", "2", "--tau-psi", "1", "--tau-phi", "inf"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn dim_json_embeds_config() {
    let o = annuli(&["dim", "--n", "3", "--tau-psi", "1/2", "--tau-phi", "1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["command"], "dim");
    assert_eq!(v["config"]["tau_psi"], "1/2");
    assert!(v["result"]["value"]["exact"].is_string());
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&annuli(&["dim", "--n", "2", "--tau-psi", "abc", "--tau-phi", "1"])), 2);
    assert_eq!(code(&annuli(&["dim", "--n", "2", "--tau-psi", "-1", "--tau-phi", "1"])), 2);
    assert_eq!(code(&annuli(&["dim", "--n", "2", "--tau-psi", "1,2", "--tau-phi", "1"])), 2);
    assert_eq!(code(&annuli(&["select", "--n", "2", "--tau-psi", "1", "--tau-phi", "1", "--j", "3"])), 2);
    assert_eq!(code(&annuli(&["verify", "sandwich"])), 2);
}

#[test]
fn io_error_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let out = blocker.join("sub").join("dim.txt");
    let o = annuli(&["dim", "--n", "2", "--tau-psi", "1", "--tau-phi", "1", "--output", out.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
}

#[test]
fn mtp_example() {
    let o = annuli(&["mtp", "--delta", "1,1", "--a", "1.5,1.5", "--t", "0.5,1.5"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("dim = 4/3"));
}

#[test]
fn select_example() {
    let o = annuli(&["select", "--n", "2", "--tau-psi", "1.2,0.3", "--tau-phi", "1,1", "--j", "2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["result"]["b"], serde_json::json!(["7/10", "3/10"]));
}

#[test]
fn verify_decomposition_seeded() {
    let args = ["verify", "decomposition", "--n", "2", "--q", "2", "--samples", "20000", "--seed", "42"];
    let a = annuli(&args);
    let b = annuli(&args);
    assert_eq!(code(&a), 0);
    assert!(stdout(&a).contains("0 violations"));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn verify_cube_constants() {
    assert_eq!(code(&annuli(&["verify", "cube", "--n", "3"])), 0);
    assert_eq!(code(&annuli(&["verify", "cube", "--n", "3", "--printed"])), 1);
    assert_eq!(code(&annuli(&["verify", "cube", "--n", "3", "--printed", "--expect-fail"])), 0);
    assert_eq!(code(&annuli(&["verify", "cube", "--n", "3", "--expect-fail"])), 1);
}

#[test]
fn sweep_is_reproducible_through_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let direct = annuli(&["sweep", "--trials", "50", "--seed", "7"]);
    assert_eq!(code(&direct), 0);
    let o = Command::new(env!("CARGO_BIN_EXE_annuli"))
        .args(["sweep", "--trials", "50", "--seed", "7"])
        .env("ANNULI_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let written = std::fs::read(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(written, direct.stdout);
    assert_eq!(stdout(&direct).lines().count(), 51);
}

#[test]
fn cover_within_band() {
    let o = annuli(&["cover", "--tau-psi", "1,2", "--tau-phi", "1,1", "--q", "16,32"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.starts_with("q,j,k,predicted,measured,ratio"));
    assert_eq!(text.lines().count(), 1 + 2 * 4);
}

#[test]
fn cover_band_violation() {
    let o = annuli(&["cover", "--tau-psi", "1,2", "--tau-phi", "1,1", "--q", "16", "--band", "1"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn stream_matches_count() {
    let base = ["stream", "--kind", "rect-annulus", "--tau-psi", "1,2", "--tau-phi", "1", "--q-lo", "1", "--q-hi", "4"];
    let o = annuli(&base);
    assert_eq!(code(&o), 0);
    let lines = stdout(&o).lines().count();
    let mut counted = base.to_vec();
    counted.push("--count-only");
    let c = annuli(&counted);
    assert_eq!(stdout(&c).trim().parse::<usize>().unwrap(), lines);
    // 2^2 + 3^2 + 4^2 + 5^2
    assert_eq!(lines, 54);
}

#[test]
fn stream_shifted_rect_needs_j() {
    let o = annuli(&["stream", "--kind", "shifted-rect", "--tau-psi", "1", "--tau-phi", "1", "--n", "2", "--q-lo", "1", "--q-hi", "2"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn scan_lists_witnesses() {
    let o = annuli(&["scan", "--x", "3/16,3/16", "--tau-psi", "1", "--tau-phi", "1", "--q-max", "2", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("2,0;0"));
}
