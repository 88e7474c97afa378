use std::path::Path;
use std::process::{Command, Output};

fn wordperc(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wordperc"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.cfg");
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

#[test]
fn writes_rows_summary_and_meta() {
    let dir = tempfile::tempdir().unwrap();
    let out = wordperc(&["growth", "--replicas", "20"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["growth_rows.csv", "growth_summary.csv", "growth_meta.txt"] {
        assert!(dir.path().join(name).is_file(), "{name} missing");
    }
    let rows = std::fs::read_to_string(dir.path().join("growth_rows.csv")).unwrap();
    assert!(rows.starts_with("n,replica,seed,success,"));
    assert!(!String::from_utf8_lossy(&out.stdout).trim().is_empty());
}

#[test]
fn gadget_writes_picture_and_edge_rules() {
    let dir = tempfile::tempdir().unwrap();
    let out = wordperc(&["gadget"], dir.path());
    assert!(out.status.success());
    let pbm = std::fs::read_to_string(dir.path().join("gadget.pbm")).unwrap();
    assert!(pbm.starts_with("P1"));
    assert!(dir.path().join("gadget_edges.txt").is_file());
    assert!(String::from_utf8_lossy(&out.stdout).contains("pass"));
}

#[test]
fn malformed_config_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "this line has no equals sign\n");
    let out = wordperc(&["iso", "--config", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("wordperc:"));
}

#[test]
fn invalid_parameter_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "slice.n = 63\n");
    assert_eq!(wordperc(&["slice", "--config", &cfg], dir.path()).status.code(), Some(2));
    let missing = dir.path().join("absent.cfg").display().to_string();
    assert_eq!(wordperc(&["slab", "--config", &missing], dir.path()).status.code(), Some(2));
}

#[test]
fn hex_and_decimal_seeds_agree() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(wordperc(&["oriented", "--replicas", "50", "--seed", "0x1f"], a.path()).status.success());
    assert!(wordperc(&["oriented", "--replicas", "50", "--seed", "31"], b.path()).status.success());
    let read = |d: &Path| std::fs::read(d.join("oriented_rows.csv")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
}

#[test]
fn seed_changes_the_rows() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = config(a.path(), "slab.width = 5\nslab.height = 5\n");
    assert!(wordperc(&["slab", "--config", &cfg, "--replicas", "30", "--seed", "1"], a.path()).status.success());
    assert!(wordperc(&["slab", "--config", &cfg, "--replicas", "30", "--seed", "2"], b.path()).status.success());
    let read = |d: &Path| std::fs::read(d.join("slab_rows.csv")).unwrap();
    assert_ne!(read(a.path()), read(b.path()));
}
