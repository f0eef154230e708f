use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn mhd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mhd"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_config(dir: &Path, body: &str) -> String {
    let out = dir.join("out");
    let path = dir.join("run.toml");
    fs::write(
        &path,
        format!("{body}\noutput_dir = {:?}\n", out.display().to_string()),
    )
    .unwrap();
    path.display().to_string()
}

const SMALL: &str = "a = 4\nb = 4\ngrid_points_per_axis = 16\ntime_slices = 9";

#[test]
fn dump_tables_prints_frames_and_weights() {
    let o = mhd(&["dump-tables"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.contains("magnetic 3 39,52,0 52,-39,0 0,0,65"));
    assert!(s.contains("velocity 0 60,25,0 25,-60,0 0,0,65"));
    assert!(s.contains("skew_weights_at_zero 1.75000000000000000"));
}

#[test]
fn missing_subcommand_is_usage_error() {
    assert_eq!(code(&mhd(&[])), 1);
}

#[test]
fn unknown_key_is_usage_error() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write_config(d.path(), "grid_n = 8");
    assert_eq!(code(&mhd(&["validate", &cfg])), 1);
}

#[test]
fn unwritable_output_dir_is_startup_error() {
    let d = tempfile::tempdir().unwrap();
    let blocker = d.path().join("file");
    fs::write(&blocker, b"").unwrap();
    let path = d.path().join("run.toml");
    fs::write(
        &path,
        format!(
            "output_dir = {:?}\n",
            blocker.join("sub").display().to_string()
        ),
    )
    .unwrap();
    let o = mhd(&["validate", path.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("not writable"));
}

#[test]
fn desk_regime_reports_failures_but_exits_zero() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write_config(d.path(), "a = 16\nb = 4");
    let o = mhd(&["validate", &cfg]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.contains("ell_decorrelation") && s.contains(" fail "));
}

#[test]
fn strict_regime_failure_exits_two() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write_config(d.path(), "a = 16\nb = 4\nstrict_regime = true");
    assert_eq!(code(&mhd(&["validate", &cfg])), 2);
    assert_eq!(code(&mhd(&["run", &cfg])), 2);
}

#[test]
fn asymptotic_regime_passes_every_inequality() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write_config(
        d.path(),
        "a = 2\nb = 10000\nbeta = 1e-9\neta = 1e-3\nstrict_regime = true",
    );
    let o = mhd(&["validate", &cfg]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let rows: Vec<String> = stdout(&o)
        .lines()
        .filter(|l| l.starts_with("0 "))
        .map(String::from)
        .collect();
    assert!(rows
        .iter()
        .filter(|l| l.contains("<"))
        .all(|l| l.split_whitespace().nth(5) == Some("pass")));
}

#[test]
fn bad_thread_count_is_usage_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_mhd"))
        .arg("dump-tables")
        .env("MHD_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(code(&o), 1);
}

#[test]
fn run_step_and_diagnose() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write_config(d.path(), &format!("{SMALL}\nq_max = 0"));
    let o = mhd(&["run", &cfg]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let level0 = d.path().join("out/level_0");
    let csv = fs::read_to_string(level0.join("diagnostics.csv")).unwrap();
    assert!(csv.starts_with("# MHDDIAG v1 config_hash="));
    let summary = fs::read_to_string(level0.join("summary.txt")).unwrap();
    assert!(summary.contains("magnetic helicity"));

    let o = mhd(&["step", &cfg, level0.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("1 u_l2"));
    let o = mhd(&["diagnose", d.path().join("out/level_1").to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.lines().nth(1).unwrap().starts_with("level,t,energy"));
    assert!(s.lines().nth(2).unwrap().starts_with("1,"));
}

#[test]
fn resume_rejects_other_configuration() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write_config(d.path(), &format!("{SMALL}\nq_max = 0"));
    assert_eq!(code(&mhd(&["run", &cfg])), 0);
    let other = d.path().join("other.toml");
    fs::write(
        &other,
        format!(
            "{SMALL}\nq_max = 0\nbeta = 0.02\noutput_dir = {:?}\n",
            d.path().join("o2").display().to_string()
        ),
    )
    .unwrap();
    let level0 = d.path().join("out/level_0");
    let o = mhd(&["step", other.to_str().unwrap(), level0.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
}

#[test]
fn oracle_suite_all_pass() {
    let o = mhd(&["oracles"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    let lines: Vec<&str> = s
        .lines()
        .filter(|l| l.ends_with(" pass") || l.ends_with(" fail"))
        .collect();
    assert!(lines.len() >= 30);
    assert!(lines.iter().all(|l| l.ends_with(" pass")), "{s}");
    assert!(lines.iter().all(|l| l.split_whitespace().count() == 5));
}
