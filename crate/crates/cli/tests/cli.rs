use std::fs;
use std::process::Command;

fn chdbc() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chdbc"))
}

#[test]
fn mesh_info_prints_one_row_per_level() {
    let out = chdbc().args(["mesh-info", "--levels", "2"]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("n_nodes"));
    assert!(text.lines().any(|l| l.starts_with("1,61,")));
    assert!(text.lines().any(|l| l.starts_with("2,217,")));
}

#[test]
fn small_convergence_run_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "final_time = 0.2\nbdf_order = 2\n").unwrap();
    let out_dir = dir.path().join("out");
    let out = chdbc()
        .args(["converge", "--levels", "2", "--tau", "0.1,0.05", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let errors = fs::read_to_string(out_dir.join("errors.csv")).unwrap();
    assert_eq!(errors.lines().count(), 5);
    let eoc = fs::read_to_string(out_dir.join("eoc.csv")).unwrap();
    assert_eq!(eoc.lines().count(), 3);
    let manifest = fs::read_to_string(out_dir.join("manifest.txt")).unwrap();
    assert!(manifest.contains("bdf_order = 2"));

    // The manifest is itself a valid config and reproduces the run.
    let again = dir.path().join("again");
    let out = chdbc()
        .arg("converge")
        .arg("--config")
        .arg(out_dir.join("manifest.txt"))
        .arg("--out")
        .arg(&again)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(errors, fs::read_to_string(again.join("errors.csv")).unwrap());
}

#[test]
fn bad_config_reports_field_and_fails() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "bdf_order = 9\n").unwrap();
    let out = chdbc().arg("converge").arg("--config").arg(&cfg).output().unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bdf_order"), "{err}");

    fs::write(&cfg, "unknown_key = 1\n").unwrap();
    let out = chdbc().arg("mesh-info").arg("--config").arg(&cfg).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown_key"));
}

#[test]
fn missing_config_file_fails() {
    let out = chdbc().args(["defects", "--config", "/nonexistent/run.toml"]).output().unwrap();
    assert!(!out.status.success());
}

#[test]
fn spinodal_with_small_config_writes_energy() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("spin.toml");
    fs::write(
        &cfg,
        "preset = \"spinodal\"\ndomain_radius = 2.0\nfinal_time = 0.005\n\n[mesh]\ntarget_nodes = 60\n\n[output]\nsnapshot_times = [0.0]\n",
    )
    .unwrap();
    let out_dir = dir.path().join("spin");
    let out = chdbc()
        .arg("spinodal")
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .args(["--seed", "7"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let energy = fs::read_to_string(out_dir.join("energy.csv")).unwrap();
    assert_eq!(energy.lines().next(), Some("t,energy"));
    assert_eq!(energy.lines().count(), 6);
    assert!(out_dir.join("snapshot_000000.vtk").exists());
    assert!(fs::read_to_string(out_dir.join("manifest.txt")).unwrap().contains("# seed: 7"));
}
