//! End-to-end checks of the command-line surface: subcommands, overrides,
//! output files, and exit codes (0 success, 2 config, 3 solver, 4 I/O).

use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_shellcap"))
}

fn write_config(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("shellcap-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

const DRY_CFG: &str = "\
[problem]
omega_s = 0.2

[problem.nondimensional]
alpha = 3.0
xi = 1.0
eta = 2.0
";

#[test]
fn relax_json_to_stdout() {
    let cfg = write_config("relax.conf", DRY_CFG);
    let out = bin().args(["relax", "--config"]).arg(&cfg).output().unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("{\"mode\":\"relax\""));
    assert!(stdout.contains("\"x\":8.4973120475889"));
}

#[test]
fn solve_pressure_override() {
    let cfg = write_config("solve.conf", DRY_CFG);
    let out = bin()
        .args(["solve", "--p-hat-o", "0.5", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("\"p_hat_o\":5.0000000000000000e-1"));
    assert!(stdout.contains("\"x\":8.3434129398"));
}

#[test]
fn sweep_csv_to_file() {
    let cfg = write_config("sweep.conf", DRY_CFG);
    let out_path = cfg.with_file_name("sweep.csv");
    let out = bin()
        .args(["sweep", "--from", "0", "--to", "0.5", "--count", "6", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_path)
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let payload = std::fs::read_to_string(&out_path).unwrap();
    assert!(payload
        .starts_with("p_hat_o,x,lambda_o,strain,gamma0_over_mu_Ri,e_c,p_f_over_mu,residual"));
    assert_eq!(payload.lines().count(), 7);
    // rerun byte-identically
    let out2_path = cfg.with_file_name("sweep2.csv");
    let out2 = bin()
        .args(["sweep", "--from", "0", "--to", "0.5", "--count", "6", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out2_path)
        .output()
        .unwrap();
    assert!(out2.status.success());
    assert_eq!(payload, std::fs::read_to_string(&out2_path).unwrap());
}

#[test]
fn stress_profile_samples_flag() {
    let cfg = write_config("profile.conf", DRY_CFG);
    let out = bin()
        .args(["stress-profile", "--samples", "21", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 22);
    assert!(stdout.starts_with("R_over_Ri,sigma_rr_over_mu,sigma_hoop_over_mu,p_over_mu"));
}

#[test]
fn geometry_check_needs_no_config() {
    let out = bin().arg("geometry-check").output().unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("fixture,quantity,residual,threshold,pass"));
    assert!(!stdout.contains("false"), "a geometry diagnostic failed:\n{stdout}");
}

#[test]
fn config_error_exit_code() {
    let cfg = write_config("bad.conf", "[problem.nondimensional]\nalpha = 3.0\nbogus = 1\n");
    let out = bin().args(["relax", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));
    // missing config for a solve mode is a config error too
    let out = bin().arg("relax").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bracketing_failure_exit_code_and_scan_table() {
    let cfg = write_config("strained.conf", DRY_CFG);
    let out = bin()
        .args(["solve", "--p-hat-o", "0.1", "--bracket", "2.0,5.0", "--scan", "64", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("scan table"), "missing scan table diagnostic:\n{stderr}");
    assert!(stderr.lines().count() > 60);
}

#[test]
fn io_error_exit_code() {
    let cfg = write_config("io.conf", DRY_CFG);
    let out = bin()
        .args(["relax", "--config"])
        .arg(&cfg)
        .args(["--out", "/nonexistent-dir/x.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn format_override() {
    let cfg = write_config("fmt.conf", DRY_CFG);
    let out = bin()
        .args(["relax", "--format", "csv", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("p_hat_o,x,lambda_o,"));
}
