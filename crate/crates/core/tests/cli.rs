//! End-to-end checks of the command-line interface and its exit-code
//! contract: 0 success, 1 usage/config error, 2 divergence.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bouss2d"))
}

#[test]
fn verify_subcommand_csv_and_exit_zero() {
    let out = bin().args(["verify", "--samples", "300"]).output().unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("k,epsilon,max_residual_bdf"));
    // every residual column entry stays at rounding level
    for line in stdout.lines().skip(2) {
        let cols: Vec<&str> = line.split(',').collect();
        let res_bdf: f64 = cols[2].parse().unwrap();
        let res_ext: f64 = cols[3].parse().unwrap();
        assert!(res_bdf <= 1e-12 && res_ext <= 1e-12, "{line}");
    }
}

#[test]
fn unknown_subcommand_exits_one() {
    let out = bin().arg("frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = bin().args(["marsigli", "--bogus-flag"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn marsigli_short_run_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args([
            "marsigli", "--nx", "33", "--ny", "9", "--tau", "1e-3", "--T", "1e-2",
        ])
        .args(["--stab", "sb", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.path().join("marsigli_reports.csv")).unwrap();
    assert!(csv.starts_with("t,E,r"));
    assert_eq!(csv.lines().count(), 11); // header + bootstrap + 9 steps
}

#[test]
fn run_subcommand_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = format!(
        "[problem]\nkind = shear\n[grid]\nnx = 17\nny = 17\n[time]\ntau = 1e-3\nt_end = 5e-3\n\
         [scheme]\nk = 3\nl = 1\nstab = sb\ncs = 0.5\n[output]\ndir = {}\n",
        dir.path().display()
    );
    let cfg_path = dir.path().join("run.cfg");
    std::fs::write(&cfg_path, config).unwrap();
    let out = bin().arg("run").arg(&cfg_path).output().unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(dir.path().join("shear_reports.csv").exists());
    // malformed config exits 1
    std::fs::write(&cfg_path, "[problem]\nkind = nope\n").unwrap();
    let out = bin().arg("run").arg(&cfg_path).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn vtk_snapshots_written() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args([
            "shear", "--nx", "17", "--ny", "17", "--tau", "1e-3", "--T", "6e-3",
        ])
        .args(["--stab", "sb", "--vtk-every", "2", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let vtk = std::fs::read_to_string(dir.path().join("shear_000002.vtk")).unwrap();
    assert!(vtk.starts_with("# vtk DataFile Version 3.0"));
    assert!(vtk.contains("DATASET STRUCTURED_POINTS"));
}
