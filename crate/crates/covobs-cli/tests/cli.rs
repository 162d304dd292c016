//! End-to-end checks of the `covobs` binary: exit codes, report files,
//! determinism, and flag/config precedence.

use std::path::{Path, PathBuf};
use std::process::Command;

struct Run {
    code: i32,
    stderr: String,
    dir: PathBuf,
}

impl Run {
    fn json(&self, name: &str) -> serde_json::Value {
        let text = std::fs::read_to_string(self.dir.join(name))
            .unwrap_or_else(|e| panic!("missing {name}: {e}"));
        serde_json::from_str(&text).unwrap()
    }

    fn bytes(&self, name: &str) -> Vec<u8> {
        std::fs::read(self.dir.join(name)).unwrap()
    }

    fn has(&self, name: &str) -> bool {
        self.dir.join(name).exists()
    }
}

/// Runs one subcommand with `cfg` as the config file, outputs into a fresh
/// directory derived from `tag`.
fn run(tag: &str, sub: &str, cfg: &str, extra: &[&str]) -> Run {
    let dir = std::env::temp_dir().join(format!("covobs-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    let cfg_path = dir.join("run.cfg");
    std::fs::write(&cfg_path, cfg).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_covobs"))
        .arg(sub)
        .arg("--config")
        .arg(&cfg_path)
        .arg("--out")
        .arg(&dir)
        .args(extra)
        .output()
        .unwrap();
    Run {
        code: out.status.code().unwrap(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
        dir,
    }
}

fn field(v: &serde_json::Value, name: &str) -> f64 {
    v[name].as_f64().unwrap_or_else(|| panic!("field {name} in {v}"))
}

fn first_line(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name))
        .unwrap()
        .lines()
        .next()
        .unwrap()
        .to_string()
}

#[test]
fn distribution_adds_state_and_smear_variances() {
    let cfg = "grid_n = 4096\ngrid_length = 40\nstate = gaussian\nstate_sigma = 1.2\nstate_center = 0.7\nsmear = gaussian\nsigma = 0.5\n";
    let r = run("dist", "distribution", cfg, &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let summary = r.json("distribution.json");
    assert!((field(&summary, "mean") - 0.7).abs() <= 1e-9);
    assert!((field(&summary, "variance") - (1.44 + 0.25)).abs() <= 1e-6);
    assert!((field(&summary, "mass") - 1.0).abs() <= 1e-9);
    assert_eq!(first_line(&r.dir, "distribution.csv"), "x,density");
}

#[test]
fn dirac_smearing_reproduces_the_state_density() {
    let cfg = "grid_n = 4096\ngrid_length = 40\nstate = gaussian\nstate_sigma = 1.2\nstate_center = 0.7\nsmear = dirac\n";
    let r = run("dirac", "distribution", cfg, &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let summary = r.json("distribution.json");
    assert!((field(&summary, "mean") - 0.7).abs() <= 1e-9);
    assert!((field(&summary, "variance") - 1.44).abs() <= 1e-6);
}

#[test]
fn gaussian_resolution_lands_in_the_frozen_window() {
    let r = run("res", "resolution", "grid_n = 4096\ngrid_length = 40\nsmear = gaussian\nsigma = 1.0\n", &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let report = r.json("resolution.json");
    let gamma = field(&report, "gamma");
    assert!((1.339..=1.359).contains(&gamma), "gamma {gamma}");
    assert_eq!(report["method"], "bisection");
    assert!(!report["curve"].as_array().unwrap().is_empty());
    assert_eq!(first_line(&r.dir, "resolution_curve.csv"), "alpha,g");
}

#[test]
fn vacuum_bound_run_passes_with_margin() {
    let r = run("vac", "bound", "grid_n = 4096\ngrid_length = 40\ngenerator = vacuum\n", &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let b = r.json("bound.json");
    assert!((field(&b, "bound") - 0.17157287525380990).abs() <= 1e-12);
    assert!(field(&b, "worst_product") >= 0.9);
    assert_eq!(b["all_pass"], true);
    assert_eq!(b["count"], 1);
    assert!(b.get("seed").is_none(), "vacuum runs carry no seed");
}

#[test]
fn corpus_bound_runs_are_deterministic() {
    let cfg = "generator = corpus\ncount = 4\nseed = 7\ngrid_n = 2048\ngrid_length = 40\n";
    let a = run("corpus-a", "bound", cfg, &[]);
    let b = run("corpus-b", "bound", cfg, &[]);
    assert_eq!(a.code, 0, "{}", a.stderr);
    assert_eq!(a.bytes("bound.json"), b.bytes("bound.json"));
    let report = a.json("bound.json");
    assert_eq!(report["seed"], 7);
    assert_eq!(report["reports"].as_array().unwrap().len(), 4);
    assert_eq!(report["all_pass"], true);
}

#[test]
fn flags_override_config_values() {
    let cfg = "smear = gaussian\nsigma = 1.0\ngrid_n = 4096\ngrid_length = 40\n";
    let r = run("flags", "resolution", cfg, &["--grid-n", "1024"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    // tolerance floors at the grid step, so it records which grid ran
    assert_eq!(field(&r.json("resolution.json"), "tolerance"), 40.0 / 1024.0);
}

#[test]
fn battery_passes_clean_and_detects_an_injected_shift() {
    let clean = run("bat-ok", "battery", "grid_n = 4096\ngrid_length = 40\ntrials = 5\n", &[]);
    assert_eq!(clean.code, 0, "{}", clean.stderr);
    let report = clean.json("battery.json");
    assert_eq!(report["pass"], true);
    assert_eq!(report["position"]["pass"], true);
    assert_eq!(report["momentum"]["pass"], true);

    let faulty = run(
        "bat-fault",
        "battery",
        "grid_n = 4096\ngrid_length = 40\ntrials = 5\naxis = position\nfault_shift = 0.05\n",
        &[],
    );
    assert_eq!(faulty.code, 1);
    let report = faulty.json("battery.json");
    assert_eq!(report["pass"], false);
    assert_eq!(report["position"]["pass"], false);
    assert!(report.get("momentum").is_none());
}

#[test]
fn r3_runs_are_deterministic_and_catch_offsets() {
    let cfg = "grid_n = 4096\ngrid_length = 40\nradial = maxwell\nradial_sigma = 0.8\nn = 20000\nseed = 11\n";
    let a = run("r3-a", "r3", cfg, &[]);
    let b = run("r3-b", "r3", cfg, &[]);
    assert_eq!(a.code, 0, "{}", a.stderr);
    assert_eq!(a.bytes("r3.json"), b.bytes("r3.json"));
    assert_eq!(a.bytes("samples.csv"), b.bytes("samples.csv"));
    assert_eq!(a.json("r3.json")["pass"], true);

    let faulty = run(
        "r3-fault",
        "r3",
        "grid_n = 4096\ngrid_length = 40\nradial = maxwell\nradial_sigma = 0.8\nn = 20000\nseed = 11\nfault_offset = 0.6,0,0\n",
        &[],
    );
    assert_eq!(faulty.code, 1);
    let report = faulty.json("r3.json");
    assert_eq!(report["pass"], false);
    assert_eq!(report["fault_offset"], serde_json::json!([0.6, 0.0, 0.0]));
}

#[test]
fn big_grid_separation_certifies_through_the_cli() {
    let cfg = "left_smear = gaussian\nleft_sigma = 1.0\nright_smear = sinc\nright_bandwidth = 1.0\n\
               band_a = 0.6\nband_b = 0.9\nxi_max = 3.0\nxi_count = 256\n\
               grid_n = 524288\ngrid_length = 327680\n";
    let r = run("sep", "distinction", cfg, &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.json("distinction.json")["relation"], "RightLessEq");
    let sep = r.json("separation.json");
    assert_eq!(sep["pass"], true);
    assert!(field(&sep, "tv_under_right") <= 1e-6);
    assert!(field(&sep, "tv_under_left") >= 0.05);
}

#[test]
fn unusable_bands_fail_at_runtime_not_config_time() {
    // identical band-limited smearings admit no separating band
    let cfg = "grid_n = 4096\ngrid_length = 40\nleft_smear = sinc\nleft_bandwidth = 1.0\nright_smear = sinc\nright_bandwidth = 1.0\n\
               band_a = 0.6\nband_b = 0.9\n";
    let r = run("band-bad", "distinction", cfg, &[]);
    assert_eq!(r.code, 1, "{}", r.stderr);
    assert!(r.has("distinction.json"));
    assert!(!r.has("separation.json"));

    let half = "grid_n = 4096\ngrid_length = 40\nleft_smear = sinc\nleft_bandwidth = 1.0\nright_smear = sinc\nright_bandwidth = 1.0\n\
                band_a = 0.6\n";
    let r = run("band-half", "distinction", half, &[]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("band_b"), "{}", r.stderr);
}

#[test]
fn config_errors_exit_2_and_write_nothing() {
    let unknown = run("cfg-unknown", "resolution", "grid_n = 4096\ngrid_length = 40\nsmear = gaussian\nsigma = 1.0\nsigmaa = 2\n", &[]);
    assert_eq!(unknown.code, 2);
    assert!(unknown.stderr.contains("sigmaa"), "{}", unknown.stderr);
    assert!(!unknown.has("resolution.json"));

    let invalid = run("cfg-invalid", "resolution", "grid_n = 4096\ngrid_length = 40\nsmear = gaussian\nsigma = -2\n", &[]);
    assert_eq!(invalid.code, 2);
    assert!(invalid.stderr.contains("smear"), "{}", invalid.stderr);

    let no_grid = run("cfg-nogrid", "distribution", "state = gaussian\nstate_sigma = 1.0\nsmear = dirac\n", &[]);
    assert_eq!(no_grid.code, 2);
    assert!(no_grid.stderr.contains("grid_n"), "{}", no_grid.stderr);

    let missing = run("cfg-missing", "resolution", "grid_n = 4096\ngrid_length = 40\n", &[]);
    assert_eq!(missing.code, 2);
    assert!(missing.stderr.contains("smear"), "{}", missing.stderr);

    let bad_grid = run(
        "cfg-grid",
        "resolution",
        "smear = gaussian\nsigma = 1.0\ngrid_n = 1000\ngrid_length = 40\n",
        &[],
    );
    assert_eq!(bad_grid.code, 2);
    assert!(bad_grid.stderr.contains("grid_n"), "{}", bad_grid.stderr);
}
