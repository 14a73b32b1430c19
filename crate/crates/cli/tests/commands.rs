use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn maps(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../maps").join(name)
}

fn run(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_renormlab"))
        .arg("-o")
        .arg(out)
        .args(args)
        .env_remove(circlemap::PRECISION_ENV)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

#[test]
fn rho_of_rigid_golden() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["--depth", "8", "rho", &path(&maps("rigid_golden.toml"))]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("quotients [1,1,1,1,1,1,1,1]"), "{s}");
    assert!(s.contains("value 6.1764705882352941"));
    assert!(!s.contains("rational"));
}

#[test]
fn rho_flags_rational_rotation() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["rho", &path(&maps("half.toml"))]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("quotients [2]") && s.contains("rational"), "{s}");
}

#[test]
fn rho_exhausted_precision_keeps_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["--precision-bits", "53", "--depth", "40", "rho", &path(&maps("rigid_golden.toml"))]);
    assert_eq!(o.status.code(), Some(3));
    let s = stdout(&o);
    assert!(s.starts_with("quotients [1,1,1,"), "{s}");
    assert!(s.contains("precision exhausted"));
}

#[test]
fn tuned_map_round_trips_through_rho() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["--depth", "14", "tune", &path(&maps("cubic.toml")), "--target", "2,2,2,2,2,2,2,2,2,2,2,2,2,2,2,2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let tuned = dir.path().join("tuned.toml");
    let o = run(dir.path(), &["--depth", "12", "rho", &path(&tuned)]);
    assert!(stdout(&o).contains("quotients [2,2,2,2,2,2,2,2,2,2,2,2]"));
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "family = \"composition\"\nomega = \"zero point six\"\n").unwrap();
    assert_eq!(run(dir.path(), &["rho", &path(&bad)]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["rho", "/nonexistent.toml"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["--precision-bits", "20", "rho", &path(&maps("half.toml"))]).status.code(), Some(2));
    let o = run(dir.path(), &["tune", &path(&maps("cubic.toml")), "--target", "1,0,3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn converge_on_identical_maps() {
    let dir = tempfile::tempdir().unwrap();
    let f = path(&maps("golden_bicubic.toml"));
    let o = run(dir.path(), &["--depth", "5", "converge", &f, &f]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("exact-equality"));
    let csv = std::fs::read_to_string(dir.path().join("converge.csv")).unwrap();
    // header plus levels 3..=5
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn rigid_probe_has_zero_b2() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["--samples", "18", "probe", &path(&maps("rigid_golden.toml")), "--levels", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert_eq!(s.matches("B2=0.000000e0").count(), 2, "{s}");
    assert!(s.contains("growth check skipped"));
    assert!(dir.path().join("probe_2.csv").exists() && dir.path().join("probe_3.csv").exists());
}

#[test]
fn rotation_mismatch_is_an_invalid_experiment() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["conjugacy", &path(&maps("golden_bicubic.toml")), &path(&maps("half.toml")), "--to", "4"]);
    assert_eq!(o.status.code(), Some(4), "{}", stdout(&o));
}

#[test]
fn manifest_embeds_inputs_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let map = maps("golden_bicubic.toml");
    let o = run(dir.path(), &["--depth", "6", "renorm", &path(&map)]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("renorm.manifest.toml")).unwrap();
    let m: toml::Value = toml::from_str(&text).unwrap();
    assert_eq!(m["command"].as_str(), Some("renorm"));
    assert_eq!(m["exit_code"].as_integer(), Some(0));
    assert_eq!(m["config"]["depth"].as_integer(), Some(6));
    assert!(m["wall_time_s"].as_float().unwrap() >= 0.0);
    let inputs = m["inputs"].as_array().unwrap();
    assert_eq!(inputs[0][1].as_str().unwrap(), std::fs::read_to_string(&map).unwrap());
    let csv = std::fs::read_to_string(dir.path().join("renorm.csv")).unwrap();
    assert!(csv.starts_with("level,height,eta0,xi0,commutation_residual\n"));
    assert_eq!(csv.lines().count(), 7);
}

#[test]
fn failed_runs_still_write_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["rho", "/nonexistent.toml"]);
    assert_eq!(o.status.code(), Some(2));
    let text = std::fs::read_to_string(dir.path().join("rho.manifest.toml")).unwrap();
    assert!(text.contains("exit_code = 2"));
}
