//! One function per subcommand. Each parses and validates its full input
//! set (so typos and bad values exit before any file is touched), runs the
//! corresponding library routine, and writes reports atomically.

use crate::config::{Config, ConfigError};
use covobs::{
    compare, covariance_battery, covariance_battery_with_fault, limit_of_resolution, make_dirac,
    make_gaussian, make_uniform, mix, outcome_distribution, radial_maxwell, radial_shell,
    random_generator_corpus, resolution_product_check, rotation_covariance_test,
    rotation_covariance_test_with_fault, sample_measure, sinc_measure, smeared_output,
    verify_separation, BatteryReport, GridSpec, Measure1D, MixedState, Observable1D,
    PhaseSpaceObservable, ProductReport, RotInvMeasure3D, RotationReport, WaveFunction,
};
use serde::Serialize;
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("config error: `{field}`: {source}")]
    Build { field: String, source: covobs::Error },
    #[error("{0}")]
    Run(#[from] covobs::Error),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    /// Exit-code contract: 0 pass, 1 failed certification or runtime
    /// failure, 2 config error.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Build { .. } => 2,
            CliError::Run(_) | CliError::Io { .. } => 1,
        }
    }
}

/// Ties a library constructor error to the config key that caused it.
fn build_err(field: &str) -> impl Fn(covobs::Error) -> CliError + '_ {
    move |source| CliError::Build {
        field: field.to_string(),
        source,
    }
}

/// Common run parameters shared by every command.
pub struct Ctx {
    pub out_dir: PathBuf,
    pub grid: GridSpec,
    pub seed: u64,
    pub tol: f64,
}

impl Ctx {
    pub fn from_config(cfg: &Config) -> Result<Ctx, CliError> {
        let n = cfg.require_usize("grid_n")?;
        let length = cfg.require_f64("grid_length")?;
        let grid = GridSpec::new(n, length).map_err(build_err("grid_n/grid_length"))?;
        Ok(Ctx {
            out_dir: PathBuf::from(cfg.get_str("out").unwrap_or(".")),
            grid,
            seed: cfg.get_u64_or("seed", 0)?,
            tol: cfg.get_f64_or("tol", 1e-2)?,
        })
    }
}

fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<(), CliError> {
    let io = |path: &Path| {
        let path = path.display().to_string();
        move |source| CliError::Io {
            path: path.clone(),
            source,
        }
    };
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    let path = dir.join(name);
    let tmp = dir.join(format!("{name}.tmp"));
    std::fs::write(&tmp, bytes).map_err(io(&tmp))?;
    std::fs::rename(&tmp, &path).map_err(io(&path))?;
    Ok(())
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string(value).expect("reports serialize");
    text.push('\n');
    write_atomic(dir, name, text.as_bytes())
}

fn write_csv<F>(dir: &Path, name: &str, fill: F) -> Result<(), CliError>
where
    F: FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
{
    let mut buf = Vec::new();
    fill(&mut buf).expect("in-memory writes succeed");
    write_atomic(dir, name, &buf)
}

/// Builds the smear measure named by `{prefix}smear`.
fn build_measure(cfg: &Config, prefix: &str, grid: GridSpec) -> Result<Measure1D, CliError> {
    let kind_key = format!("{prefix}smear");
    let kind = cfg.require_str(&kind_key)?;
    let key = |name: &str| format!("{prefix}{name}");
    match kind {
        "gaussian" => {
            let sigma = cfg.require_f64(&key("sigma"))?;
            let center = cfg.get_f64_or(&key("center"), 0.0)?;
            make_gaussian(center, sigma, grid).map_err(&build_err(&kind_key))
        }
        "uniform" => {
            let width = cfg.require_f64(&key("width"))?;
            let center = cfg.get_f64_or(&key("center"), 0.0)?;
            make_uniform(center, width, grid).map_err(&build_err(&kind_key))
        }
        "dirac" => {
            let at = cfg.get_f64_or(&key("at"), 0.0)?;
            if !at.is_finite() || at.abs() > 0.5 * grid.length {
                return Err(ConfigError::Invalid {
                    key: key("at"),
                    message: format!("atom at {at} is outside the grid"),
                }
                .into());
            }
            Ok(make_dirac(at, grid))
        }
        "two_atom" => {
            let separation = cfg.require_f64(&key("separation"))?;
            if !(separation.is_finite() && separation > 0.0)
                || separation > 0.9 * grid.length
            {
                return Err(ConfigError::Invalid {
                    key: key("separation"),
                    message: format!("need a positive on-grid separation, got {separation}"),
                }
                .into());
            }
            mix(&[
                (0.5, make_dirac(-0.5 * separation, grid)),
                (0.5, make_dirac(0.5 * separation, grid)),
            ])
            .map_err(&build_err(&kind_key))
        }
        "sinc" => {
            let bandwidth = cfg.require_f64(&key("bandwidth"))?;
            sinc_measure(bandwidth, grid).map_err(&build_err(&key("bandwidth")))
        }
        other => Err(ConfigError::Invalid {
            key: kind_key,
            message: format!(
                "unknown kind {other:?} (expected gaussian|uniform|dirac|two_atom|sinc)"
            ),
        }
        .into()),
    }
}

/// Builds the probe state named by the `state` key.
fn build_state(cfg: &Config, grid: GridSpec) -> Result<WaveFunction, CliError> {
    match cfg.require_str("state")? {
        "gaussian" => {
            let sigma = cfg.require_f64("state_sigma")?;
            let center = cfg.get_f64_or("state_center", 0.0)?;
            WaveFunction::gaussian(grid, center, sigma).map_err(&build_err("state"))
        }
        "hermite" => {
            let k = cfg.require_usize("state_k")?;
            let center = cfg.get_f64_or("state_center", 0.0)?;
            let scale = cfg.get_f64_or("state_scale", 1.0)?;
            WaveFunction::hermite(grid, k, center, scale).map_err(&build_err("state"))
        }
        other => Err(ConfigError::Invalid {
            key: "state".into(),
            message: format!("unknown kind {other:?} (expected gaussian|hermite)"),
        }
        .into()),
    }
}

#[derive(Serialize)]
struct DistributionSummary {
    mean: f64,
    variance: f64,
    mass: f64,
}

pub fn distribution(ctx: &Ctx, cfg: &Config) -> Result<bool, CliError> {
    let state = build_state(cfg, ctx.grid)?;
    let smear = build_measure(cfg, "", ctx.grid)?;
    cfg.finish()?;

    let obs = Observable1D::position(smear);
    let outcome = outcome_distribution(&obs, &MixedState::pure(state))?;
    let summary = DistributionSummary {
        mean: outcome.mean(),
        variance: outcome.variance(),
        mass: outcome.mass(),
    };
    write_csv(&ctx.out_dir, "distribution.csv", |w| outcome.write_csv(w))?;
    write_json(&ctx.out_dir, "distribution.json", &summary)?;
    Ok(true)
}

pub fn resolution(ctx: &Ctx, cfg: &Config) -> Result<bool, CliError> {
    let smear = build_measure(cfg, "", ctx.grid)?;
    cfg.finish()?;

    let report = limit_of_resolution(&smear, ctx.tol)?;
    write_json(&ctx.out_dir, "resolution.json", &report)?;
    write_csv(&ctx.out_dir, "resolution_curve.csv", |w| {
        report.write_curve_csv(w)
    })?;
    Ok(true)
}

#[derive(Serialize)]
struct BoundRun {
    generator: String,
    count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    bound: f64,
    worst_product: f64,
    all_pass: bool,
    reports: Vec<ProductReport>,
}

pub fn bound(ctx: &Ctx, cfg: &Config) -> Result<bool, CliError> {
    let generator = cfg.get_str("generator").unwrap_or("vacuum").to_string();
    let (states, seed) = match generator.as_str() {
        "vacuum" => {
            let vac = WaveFunction::gaussian(ctx.grid, 0.0, 0.5f64.sqrt())
                .map_err(&build_err("grid_n/grid_length"))?;
            (vec![MixedState::pure(vac)], None)
        }
        "corpus" => {
            let count = cfg.get_usize_or("count", 50)?;
            let states = random_generator_corpus(ctx.grid, count, ctx.seed)
                .map_err(&build_err("count"))?;
            (states, Some(ctx.seed))
        }
        other => {
            return Err(ConfigError::Invalid {
                key: "generator".into(),
                message: format!("unknown kind {other:?} (expected vacuum|corpus)"),
            }
            .into())
        }
    };
    cfg.finish()?;

    let mut reports = Vec::with_capacity(states.len());
    for state in &states {
        let obs = PhaseSpaceObservable::new(state.clone());
        reports.push(resolution_product_check(&obs, ctx.tol)?);
    }
    let run = BoundRun {
        generator,
        count: reports.len(),
        seed,
        bound: reports[0].bound,
        worst_product: reports
            .iter()
            .map(|r| r.product)
            .fold(f64::INFINITY, f64::min),
        all_pass: reports.iter().all(|r| r.pass),
        reports,
    };
    write_json(&ctx.out_dir, "bound.json", &run)?;
    Ok(run.all_pass)
}

pub fn distinction(ctx: &Ctx, cfg: &Config) -> Result<bool, CliError> {
    let left = build_measure(cfg, "left_", ctx.grid)?;
    let right = build_measure(cfg, "right_", ctx.grid)?;
    let threshold = cfg.get_f64_or("threshold", 1e-6)?;
    let xi_max = cfg.get_f64_or("xi_max", 8.0)?;
    let xi_count = cfg.get_usize_or("xi_count", 1024)?;
    let band = match (cfg.get_str("band_a"), cfg.get_str("band_b")) {
        (Some(a), Some(b)) => {
            let parse = |key: &str, raw: &str| -> Result<f64, CliError> {
                raw.parse().map_err(|e| {
                    CliError::Config(ConfigError::Invalid {
                        key: key.into(),
                        message: format!("{e} (got {raw:?})"),
                    })
                })
            };
            Some((parse("band_a", a)?, parse("band_b", b)?))
        }
        (None, None) => None,
        _ => {
            return Err(ConfigError::Missing(
                "band_a/band_b (both or neither)".into(),
            )
            .into())
        }
    };
    cfg.finish()?;

    let verdict = compare(&left, &right, threshold, xi_max, xi_count)?;
    write_json(&ctx.out_dir, "distinction.json", &verdict)?;
    match band {
        Some((a, b)) => {
            let report = verify_separation(&left, &right, a, b, ctx.grid)?;
            let pass = report.pass;
            write_json(&ctx.out_dir, "separation.json", &report)?;
            Ok(pass)
        }
        None => Ok(true),
    }
}

/// Rodrigues axis-angle rotation matrix.
fn rotation_matrix(axis: [f64; 3], angle: f64) -> Result<[[f64; 3]; 3], CliError> {
    let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    if !(norm.is_finite() && norm > 1e-12 && angle.is_finite()) {
        return Err(ConfigError::Invalid {
            key: "rotation_axis/rotation_angle".into(),
            message: "need a nonzero finite axis and finite angle".into(),
        }
        .into());
    }
    let k = [axis[0] / norm, axis[1] / norm, axis[2] / norm];
    let (s, c) = angle.sin_cos();
    let mut r = [[0.0; 3]; 3];
    let cross = [
        [0.0, -k[2], k[1]],
        [k[2], 0.0, -k[0]],
        [-k[1], k[0], 0.0],
    ];
    for i in 0..3 {
        for j in 0..3 {
            let ident = if i == j { 1.0 } else { 0.0 };
            r[i][j] = c * ident + s * cross[i][j] + (1.0 - c) * k[i] * k[j];
        }
    }
    Ok(r)
}

#[derive(Serialize)]
struct R3Run {
    rotation_axis: [f64; 3],
    rotation_angle: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    fault_offset: Option<[f64; 3]>,
    report: RotationReport,
    pass: bool,
}

pub fn r3(ctx: &Ctx, cfg: &Config) -> Result<bool, CliError> {
    let atom = cfg.get_f64_or("atom", 0.0)?;
    let radial_kind = cfg.get_str("radial").unwrap_or("maxwell").to_string();
    let rho = match radial_kind.as_str() {
        "maxwell" => {
            let sigma = cfg.get_f64_or("radial_sigma", 1.0)?;
            let radial =
                radial_maxwell(sigma, 1.0 - atom, ctx.grid).map_err(&build_err("radial_sigma"))?;
            RotInvMeasure3D::new(atom, radial).map_err(&build_err("atom"))?
        }
        "shell" => {
            let radius = cfg.require_f64("radial_radius")?;
            let radial =
                radial_shell(radius, 1.0 - atom, ctx.grid).map_err(&build_err("radial_radius"))?;
            RotInvMeasure3D::new(atom, radial).map_err(&build_err("atom"))?
        }
        "none" => {
            if atom < 1.0 {
                return Err(ConfigError::Invalid {
                    key: "radial".into(),
                    message: "radial = none requires atom = 1".into(),
                }
                .into());
            }
            RotInvMeasure3D::sharp(ctx.grid)
        }
        other => {
            return Err(ConfigError::Invalid {
                key: "radial".into(),
                message: format!("unknown kind {other:?} (expected maxwell|shell|none)"),
            }
            .into())
        }
    };
    let n = cfg.get_usize_or("n", 20_000)?;
    let state_sigma = cfg.get_f64_or("state_sigma", 1.0)?;
    let state_measure = RotInvMeasure3D::new(
        0.0,
        radial_maxwell(state_sigma, 1.0, ctx.grid).map_err(&build_err("state_sigma"))?,
    )
    .map_err(&build_err("state_sigma"))?;
    let axis = cfg
        .get_vec3("rotation_axis")?
        .unwrap_or([0.0, 0.0, 1.0]);
    let angle = cfg.get_f64_or("rotation_angle", std::f64::consts::FRAC_PI_2)?;
    let rotation = rotation_matrix(axis, angle)?;
    let fault = cfg.get_vec3("fault_offset")?;
    cfg.finish()?;

    // the cloud must come from a different stream than the smearing noise,
    // otherwise the two replay the same draws and the moments correlate
    let cloud = sample_measure(&state_measure, n, ctx.seed ^ 0xC10D_5A17)?;
    let report = match fault {
        Some(offset) => {
            rotation_covariance_test_with_fault(&rho, &cloud, &rotation, ctx.seed, offset)?
        }
        None => rotation_covariance_test(&rho, &cloud, &rotation, ctx.seed)?,
    };
    let samples = smeared_output(&rho, &cloud, ctx.seed)?;
    write_csv(&ctx.out_dir, "samples.csv", |w| samples.write_csv(w))?;
    let run = R3Run {
        rotation_axis: axis,
        rotation_angle: angle,
        fault_offset: fault,
        pass: report.pass,
        report,
    };
    write_json(&ctx.out_dir, "r3.json", &run)?;
    Ok(run.pass)
}

#[derive(Serialize)]
struct BatteryRun {
    axis: String,
    trials: usize,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    fault_shift: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    position: Option<BatteryReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    momentum: Option<BatteryReport>,
    pass: bool,
}

pub fn battery(ctx: &Ctx, cfg: &Config) -> Result<bool, CliError> {
    let axis = cfg.get_str("axis").unwrap_or("both").to_string();
    if !matches!(axis.as_str(), "position" | "momentum" | "both") {
        return Err(ConfigError::Invalid {
            key: "axis".into(),
            message: format!("unknown axis {axis:?} (expected position|momentum|both)"),
        }
        .into());
    }
    let trials = cfg.get_usize_or("trials", 20)?;
    let fault_shift = match cfg.get_str("fault_shift") {
        Some(raw) => Some(raw.parse::<f64>().map_err(|e| {
            CliError::Config(ConfigError::Invalid {
                key: "fault_shift".into(),
                message: format!("{e} (got {raw:?})"),
            })
        })?),
        None => None,
    };
    // position smears live on the grid itself, momentum smears on its
    // conjugate; build whichever the axis selection needs
    let has_smear_key = cfg.get_str("smear").is_some();
    let build_default = |grid: GridSpec| -> Result<Measure1D, CliError> {
        make_gaussian(0.0, 0.6, grid).map_err(&build_err("grid_n/grid_length"))
    };
    let position_smear = if axis == "position" || axis == "both" {
        Some(if has_smear_key {
            build_measure(cfg, "", ctx.grid)?
        } else {
            build_default(ctx.grid)?
        })
    } else {
        None
    };
    let momentum_smear = if axis == "momentum" || axis == "both" {
        let conj = ctx.grid.conjugate();
        Some(if has_smear_key {
            build_measure(cfg, "", conj)?
        } else {
            build_default(conj)?
        })
    } else {
        None
    };
    cfg.finish()?;

    let run_one = |obs: &Observable1D| -> Result<BatteryReport, CliError> {
        Ok(match fault_shift {
            Some(t) => covariance_battery_with_fault(obs, trials, ctx.seed, t)?,
            None => covariance_battery(obs, trials, ctx.seed)?,
        })
    };
    let position = position_smear
        .map(|smear| run_one(&Observable1D::position(smear)))
        .transpose()?;
    let momentum = momentum_smear
        .map(|smear| run_one(&Observable1D::momentum(smear)))
        .transpose()?;
    let pass = position.iter().chain(momentum.iter()).all(|r| r.pass);
    let run = BatteryRun {
        axis,
        trials,
        seed: ctx.seed,
        fault_shift,
        position,
        momentum,
        pass,
    };
    write_json(&ctx.out_dir, "battery.json", &run)?;
    Ok(pass)
}
