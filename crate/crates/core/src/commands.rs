//! Command implementations behind the `washburn` binary.
//!
//! Each command takes a parsed configuration and writes its artifacts. Data
//! files (CSV and JSON) contain no timestamps, so identical configurations give
//! byte-identical output; `run.json` echoes the resolved configuration.

use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::Serialize;

use crate::dynamics::{RegimeCase, RegimeSpec, State};
use crate::error::{Error, Result};
use crate::integrate::{integrate, Crossing, IntegrateOptions, SolverStats, Trajectory};
use crate::params::{
    nondimensionalize, ModelParams, PhysicalParams, PhysicalParamsFile, PhysicalScales,
};
use crate::regime::{run_regime, RegimeOptions, RegimeSummary};
use crate::report::{to_json_string, write_json};
use crate::solver::Tolerances;
use crate::stability::{
    audit_trajectory, basin, classify_approach, linearize, settling_horizon, ApproachEvidence,
    AuditReport, BasinSpec, StabilityReport,
};
use crate::verify::{run_verify, VerifyContext, VerifyReport};
use crate::volterra::{picard_solve, PicardOptions, PicardSummary};

/// The dimensionless model, given directly or through a physical-parameter file.
#[derive(Debug, Clone, Args, Serialize)]
pub struct ModelArgs {
    /// Inertia-to-gravity ratio ω (> 0). Required unless --params is given.
    #[arg(long)]
    pub omega: Option<f64>,
    /// Slip parameter β in (0, 1]; 1 is no slip.
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    /// Initial height over the equilibrium height, in [0, 1.5].
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    /// JSON file with keys rho, mu, gamma, theta_deg, g, R, L, h0 (SI units);
    /// overrides --omega, --beta and --alpha.
    #[arg(long, value_name = "FILE")]
    pub params: Option<PathBuf>,
}

impl ModelArgs {
    pub fn resolve(&self) -> Result<ModelParams> {
        match &self.params {
            Some(path) => nondimensionalize(&read_physical(path)?),
            None => {
                let omega = self
                    .omega
                    .ok_or_else(|| Error::domain("omega", "pass --omega or --params"))?;
                ModelParams::new(omega, self.beta, self.alpha)
            }
        }
    }
}

pub fn read_physical(path: &Path) -> Result<PhysicalParams> {
    let text = fs::read_to_string(path)?;
    Ok(PhysicalParamsFile::from_json(&text)?.into())
}

fn tolerances(abs: f64, rel: f64) -> Result<Tolerances> {
    Tolerances::new(abs, rel)
}

fn warn(params: &ModelParams) {
    for w in params.warnings() {
        eprintln!("warning: {w}");
    }
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => write_json(path, value),
        None => {
            print!("{}", to_json_string(value)?);
            Ok(())
        }
    }
}

/// Render into memory first so a failed write surfaces as an error.
fn write_csv_file(path: &Path, render: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<()> {
    let mut buf = Vec::new();
    render(&mut buf)?;
    fs::write(path, buf)?;
    Ok(())
}

// ---------------------------------------------------------------- simulate

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateConfig {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Regularization ε ≥ 0 inside the square root.
    #[arg(long, default_value_t = 0.0)]
    pub epsilon: f64,
    /// Horizon S in s = T/√ω [default: 30√ω/β, at most 1e6].
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Spacing Δs of the output samples.
    #[arg(long, default_value_t = 0.01)]
    pub sample_step: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub abs_tol: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub rel_tol: f64,
    /// Add the linear stability report and the approach classification.
    #[arg(long)]
    pub classify: bool,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Serialize)]
pub struct Classification {
    pub linear: StabilityReport,
    pub approach: Option<ApproachEvidence>,
    /// Why the approach could not be classified, when it could not.
    pub inconclusive: Option<String>,
}

impl Classification {
    pub fn of(traj: &Trajectory) -> Result<Self> {
        let linear = linearize(traj.params.omega, traj.params.beta)?;
        Ok(match classify_approach(traj) {
            Ok(evidence) => Classification {
                linear,
                approach: Some(evidence),
                inconclusive: None,
            },
            Err(Error::Inconclusive(reason)) => Classification {
                linear,
                approach: None,
                inconclusive: Some(reason),
            },
            Err(e) => return Err(e),
        })
    }
}

#[derive(Debug, Serialize)]
pub struct SimulateSummary {
    pub params: ModelParams,
    pub epsilon: f64,
    pub horizon: f64,
    pub samples: usize,
    pub final_state: State,
    pub final_distance: f64,
    pub min_u: f64,
    pub max_u: f64,
    pub crossings: Vec<Crossing>,
    pub stats: SolverStats,
    /// `max |u_ε − u_0|` over the samples; present when ε > 0.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon_sup_difference: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification: Option<Classification>,
    pub warnings: Vec<String>,
}

#[derive(Serialize)]
struct RunRecord<'a, C: Serialize, P: Serialize> {
    command: &'static str,
    version: &'static str,
    config: &'a C,
    resolved: P,
}

fn write_run_record<C: Serialize, P: Serialize>(
    dir: &Path,
    command: &'static str,
    config: &C,
    resolved: P,
) -> Result<()> {
    write_json(
        &dir.join("run.json"),
        &RunRecord {
            command,
            version: env!("CARGO_PKG_VERSION"),
            config,
            resolved,
        },
    )
}

const SIMULATE_PLOT: &str = "\
set datafile separator ','
set key autotitle columnhead
set xlabel 'T'
set ylabel 'H'
set grid
plot 'trajectory.csv' using 5:4 with lines lw 2 title 'H(T)', \\
     1 with lines dt 2 lc rgb 'gray' title 'H = 1'
";

pub fn cmd_simulate(cfg: &SimulateConfig) -> Result<SimulateSummary> {
    let params = cfg.model.resolve()?;
    warn(&params);
    let mut opts = IntegrateOptions::new(&params)
        .epsilon(cfg.epsilon)
        .sample_step(cfg.sample_step)
        .tol(tolerances(cfg.abs_tol, cfg.rel_tol)?);
    if let Some(h) = cfg.horizon {
        opts = opts.horizon(h);
    }
    let traj = integrate(&params, &opts)?;

    let epsilon_sup_difference = if cfg.epsilon > 0.0 {
        let plain = integrate(&params, &opts.epsilon(0.0))?;
        Some(traj.sup_distance(&plain)?)
    } else {
        None
    };
    let classification = if cfg.classify {
        Some(Classification::of(&traj)?)
    } else {
        None
    };

    let final_state = traj.final_state();
    let summary = SimulateSummary {
        params,
        epsilon: cfg.epsilon,
        horizon: opts.horizon,
        samples: traj.samples.len(),
        final_state,
        final_distance: final_state.distance_to_equilibrium(),
        min_u: traj.min_u(),
        max_u: traj.max_u(),
        crossings: traj.crossings.clone(),
        stats: traj.stats,
        epsilon_sup_difference,
        classification,
        warnings: params.warnings(),
    };

    fs::create_dir_all(&cfg.out)?;
    write_csv_file(&cfg.out.join("trajectory.csv"), |w| traj.write_csv(w))?;
    write_json(&cfg.out.join("summary.json"), &summary)?;
    fs::write(cfg.out.join("plot.gp"), SIMULATE_PLOT)?;
    #[derive(Serialize)]
    struct Resolved {
        params: ModelParams,
        horizon: f64,
        abs_tol: f64,
        rel_tol: f64,
    }
    write_run_record(
        &cfg.out,
        "simulate",
        cfg,
        Resolved {
            params,
            horizon: opts.horizon,
            abs_tol: opts.tol.abs,
            rel_tol: opts.tol.rel,
        },
    )?;
    Ok(summary)
}

// ------------------------------------------------------------------ picard

#[derive(Debug, Clone, Args, Serialize)]
pub struct PicardConfig {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Horizon S.
    #[arg(long, default_value_t = 10.0)]
    pub horizon: f64,
    /// Number of grid intervals N (step h = S/N).
    #[arg(long, default_value_t = 4096)]
    pub intervals: usize,
    /// Grid step h; overrides --intervals with N = round(S/h).
    #[arg(long)]
    pub step: Option<f64>,
    /// Stop once successive iterates differ by less than this (sup norm).
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

pub fn cmd_picard(cfg: &PicardConfig) -> Result<PicardSummary> {
    let params = cfg.model.resolve()?;
    warn(&params);
    let intervals = match cfg.step {
        Some(h) if h > 0.0 => (cfg.horizon / h).round().max(1.0) as usize,
        Some(h) => return Err(Error::domain("step", format!("must be > 0, got {h}"))),
        None => cfg.intervals,
    };
    let opts = PicardOptions::new(cfg.horizon)
        .intervals(intervals)
        .tol(cfg.tol)
        .max_iter(cfg.max_iter);
    let result = picard_solve(params.omega, params.beta, params.alpha, &opts)?;
    let summary = result.summary();

    fs::create_dir_all(&cfg.out)?;
    write_csv_file(&cfg.out.join("picard.csv"), |w| {
        result.solution.write_csv(w)
    })?;
    write_json(&cfg.out.join("picard.json"), &summary)?;
    write_run_record(&cfg.out, "picard", cfg, (params, intervals))?;
    Ok(summary)
}

// ---------------------------------------------------------------- classify

#[derive(Debug, Clone, Args, Serialize)]
pub struct ClassifyConfig {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Horizon S [default: long enough for the linear envelope to fall below 1e-6].
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn cmd_classify(cfg: &ClassifyConfig) -> Result<Classification> {
    let params = cfg.model.resolve()?;
    warn(&params);
    let horizon = match cfg.horizon {
        Some(h) => h,
        None => settling_horizon(params.omega, params.beta, 1e-6)?,
    };
    let traj = integrate(&params, &IntegrateOptions::new(&params).horizon(horizon))?;
    let report = Classification::of(&traj)?;
    emit(&report, cfg.out.as_deref())?;
    Ok(report)
}

// ------------------------------------------------------------------- basin

#[derive(Debug, Clone, Args, Serialize)]
pub struct BasinConfig {
    /// Initial height ratio α in [0, 1.5].
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    /// Integrate from (α²/2, 0) with this ω and audit the trajectory.
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    /// Horizon for the audit run [default: 30√ω/β].
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
pub struct BasinReport {
    pub basin: BasinSpec,
    pub residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub audit: Option<AuditReport>,
}

pub fn cmd_basin(cfg: &BasinConfig) -> Result<BasinReport> {
    let spec = basin(cfg.alpha)?;
    let audit = match cfg.omega {
        Some(omega) => {
            let params = ModelParams::new(omega, cfg.beta, cfg.alpha)?;
            let mut opts = IntegrateOptions::new(&params);
            if let Some(h) = cfg.horizon {
                opts = opts.horizon(h);
            }
            Some(audit_trajectory(&integrate(&params, &opts)?, &spec))
        }
        None => None,
    };
    let report = BasinReport {
        residual: spec.residual(),
        basin: spec,
        audit,
    };
    emit(&report, cfg.out.as_deref())?;
    Ok(report)
}

// ------------------------------------------------------------------ regime

#[derive(Debug, Clone, Args, Serialize)]
pub struct RegimeConfig {
    /// Reduced model: 1 (negligible gravity), 2 (negligible inertia),
    /// 3 (negligible gravity and inertia) or 4 (negligible viscosity).
    #[arg(long = "case")]
    pub case: RegimeCase,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    /// Initial height h*(0); Case 2 needs it in [0, 1).
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    /// Horizon in t* [default: 100 for Case 4, 5β for Case 2, 10 otherwise].
    #[arg(long)]
    pub horizon: Option<f64>,
    #[arg(long, default_value_t = 0.01)]
    pub sample_step: f64,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

const REGIME_PLOT: &str = "\
set datafile separator ','
set key autotitle columnhead
set xlabel 't*'
set ylabel 'h*'
set grid
plot 'regime.csv' using 1:2 with lines lw 2 title 'h*(t*)', \\
     'regime.csv' using 1:5 with lines dt 2 title 'oracle'
";

pub fn cmd_regime(cfg: &RegimeConfig) -> Result<RegimeSummary> {
    let spec = RegimeSpec::default_for(cfg.case);
    let mut opts = RegimeOptions::new(cfg.case, cfg.beta, cfg.alpha).sample_step(cfg.sample_step);
    if let Some(h) = cfg.horizon {
        opts = opts.horizon(h);
    }
    let run = run_regime(&spec, &opts)?;
    fs::create_dir_all(&cfg.out)?;
    write_csv_file(&cfg.out.join("regime.csv"), |w| run.write_csv(w))?;
    write_json(&cfg.out.join("regime.json"), &run.summary)?;
    fs::write(cfg.out.join("plot.gp"), REGIME_PLOT)?;
    write_run_record(&cfg.out, "regime", cfg, run.summary.horizon)?;
    Ok(run.summary)
}

// ------------------------------------------------------------------ nondim

#[derive(Debug, Clone, Args, Serialize)]
pub struct NondimConfig {
    /// JSON file with keys rho, mu, gamma, theta_deg, g, R, L, h0 (SI units).
    #[arg(long, value_name = "FILE")]
    pub params: PathBuf,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
pub struct NondimReport {
    pub omega: f64,
    pub beta: f64,
    pub alpha: f64,
    pub h_e: f64,
    pub tau: f64,
    #[serde(rename = "Oh")]
    pub ohnesorge: f64,
    #[serde(rename = "Bo")]
    pub bond: f64,
    pub omega_star: f64,
    pub warnings: Vec<String>,
}

pub fn nondim_report(physical: &PhysicalParams) -> Result<NondimReport> {
    let p = nondimensionalize(physical)?;
    let PhysicalScales {
        h_e,
        tau,
        ohnesorge,
        bond,
    } = p.scales.expect("built from physical inputs");
    Ok(NondimReport {
        omega: p.omega,
        beta: p.beta,
        alpha: p.alpha,
        h_e,
        tau,
        ohnesorge,
        bond,
        omega_star: p.omega_star(),
        warnings: p.warnings(),
    })
}

pub fn cmd_nondim(cfg: &NondimConfig) -> Result<NondimReport> {
    let report = nondim_report(&read_physical(&cfg.params)?)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    emit(&report, cfg.out.as_deref())?;
    Ok(report)
}

// ------------------------------------------------------------------ verify

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyConfig {
    /// Run only these suites (repeatable): params, dynamics, integrate,
    /// volterra, stability, basin, regime, acceptance.
    #[arg(long, value_name = "SUITE")]
    pub only: Vec<String>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn cmd_verify(cfg: &VerifyConfig) -> Result<VerifyReport> {
    let report = run_verify(&VerifyContext::default(), &cfg.only)?;
    for c in &report.checks {
        eprintln!(
            "{} {}/{}: {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.suite,
            c.name,
            c.detail
        );
    }
    emit(&report, cfg.out.as_deref())?;
    Ok(report)
}
