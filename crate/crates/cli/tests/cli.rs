use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nhcoupler"))
        .current_dir(dir)
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn figure_output_is_identical_across_thread_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    for (threads, out) in [("1", "t1"), ("4", "t4")] {
        let o = run(d, &["fig4b", "--threads", threads, "--out", out]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let mut names: Vec<_> = fs::read_dir(d.join("t1")).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(!names.is_empty());
    for n in names {
        let a = fs::read(d.join("t1").join(&n)).unwrap();
        let b = fs::read(d.join("t4").join(&n)).unwrap();
        assert!(a == b, "{n:?} differs");
    }
}

#[test]
fn scan_output_is_identical_across_thread_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let set = ["--set", "scan.axis1.n=41", "--set", "scan.axis2.n=31"];
    let a = run(d, &[&["nonrecip", "--threads", "1"][..], &set].concat());
    let b = run(d, &[&["nonrecip", "--threads", "3"][..], &set].concat());
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn unknown_key_exits_2_with_suggestion() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.toml");
    fs::write(&cfg, "[circuit]\ngama_a = 65.0\n").unwrap();
    let o = run(tmp.path(), &["spectrum", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    assert!(e.contains("circuit.gama_a") && e.contains("circuit.gamma_a"), "{e}");
}

#[test]
fn bad_override_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(tmp.path(), &["spectrum", "--set", "sweep.n"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(tmp.path(), &["spectrum", "--set", "circuit.omega_cc=1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("circuit.omega_c"));
}

#[test]
fn toml_syntax_error_reports_position() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.toml");
    fs::write(&cfg, "seed = 1\n[circuit\n").unwrap();
    let o = run(tmp.path(), &["spectrum", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains(":2:"), "{}", stderr(&o));
}

#[test]
fn selftest_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(tmp.path(), &["selftest", "--set", "selftest.draws=500"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s = String::from_utf8(o.stdout).unwrap();
    assert_eq!(s.lines().count(), 7);
    assert!(s.lines().all(|l| l.starts_with("PASS")), "{s}");
}

#[test]
fn json_output_is_well_formed() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(tmp.path(), &["spectrum", "--format", "json", "--set", "sweep.n=11"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = String::from_utf8(o.stdout).unwrap();
    let t = s.trim();
    assert!(t.starts_with('{') && t.ends_with('}'));
    for k in ["\"header\"", "\"columns\"", "\"rows\""] {
        assert!(t.contains(k), "missing {k}");
    }
}

#[test]
fn csv_header_echoes_resolved_config() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("s.csv");
    let o = run(tmp.path(), &["spectrum", "--set", "circuit.gamma_a=130", "--set", "sweep.n=5", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = fs::read_to_string(out).unwrap();
    let header: Vec<_> = s.lines().filter(|l| l.starts_with("# ")).collect();
    assert!(header.iter().any(|l| l.contains("gamma_a = 130")), "{header:?}");
    let data: Vec<_> = s.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data.len(), 6);
}
