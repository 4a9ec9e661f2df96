//! Built-in invariant suites and acceptance criteria.
//!
//! [`run_verify`] executes every suite (or a filtered subset) and returns a
//! serializable report. The acceptance criteria are also exposed one by one
//! through [`acceptance_criteria`] so the test harness can print a line for
//! each. Sampling uses a fixed seed, so every run checks the same points.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::dynamics::{negligible_gravity_solution, rhs_h, rhs_u, RegimeCase, RegimeSpec, State};
use crate::error::{Error, Result};
use crate::integrate::{continuous_dependence, integrate, IntegrateOptions, Trajectory};
use crate::params::{
    self, h_from_u, nondimensionalize, slip_parameter, u_from_h, ModelParams, PhysicalParams,
};
use crate::regime::{run_regime, RegimeOptions};
use crate::solver::{self, SolverOptions, Tolerances};
use crate::stability::{
    self, audit_trajectory, basin, classify_approach, energy, linearize, lyapunov_factored,
    lyapunov_value, settling_horizon, Approach, CriticalPointKind,
};
use crate::volterra::{
    self, apply_t, apply_t_direct, barriers, check_order_interval, check_scaling_inequality,
    picard_solve, s_star, GridFunction, PicardOptions,
};

const SEED: u64 = 0x5742_5348;

/// Hooks a test double can replace to check that the suites catch mistakes.
#[derive(Clone, Copy)]
pub struct VerifyContext {
    pub critical_omega: fn(f64) -> Result<f64>,
}

impl Default for VerifyContext {
    fn default() -> Self {
        VerifyContext {
            critical_omega: params::critical_omega,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub suite: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Outcome of one check body: pass flag and a human-readable measurement.
type Outcome = Result<(bool, String)>;
type CheckFn = fn(&VerifyContext) -> Outcome;

pub const SUITES: [&str; 8] = [
    "params",
    "dynamics",
    "integrate",
    "volterra",
    "stability",
    "basin",
    "regime",
    "acceptance",
];

fn suite(name: &str) -> Vec<(&'static str, CheckFn)> {
    match name {
        "params" => vec![
            ("reference fluid scales", params_reference as CheckFn),
            ("u/H round trip", params_round_trip),
            ("two omega formulas agree", params_omega_formulas),
            ("beta decreasing in slip", params_beta_monotone),
            (
                "critical omega scales as beta squared",
                params_critical_scaling,
            ),
            ("critical omega anchors", params_critical_anchors),
        ],
        "dynamics" => vec![
            (
                "equilibrium is a fixed point",
                dynamics_equilibrium as CheckFn,
            ),
            ("right-hand side anchors", dynamics_anchors),
            ("regularization ordering", dynamics_regularization_order),
            ("H-form and u-form agree", dynamics_h_u_consistency),
        ],
        "integrate" => vec![
            ("reference run settles", integrate_reference as CheckFn),
            ("crossing counts", integrate_crossings),
            ("positivity", integrate_positivity),
            ("epsilon halving convergence", integrate_epsilon_halving),
            ("tolerance convergence", integrate_tolerance),
            (
                "continuous dependence near equilibrium",
                integrate_dependence_near_equilibrium,
            ),
        ],
        "volterra" => vec![
            (
                "recursive and direct sums agree",
                volterra_fast_vs_direct as CheckFn,
            ),
            ("zero input closed form", volterra_zero_input),
            ("T is decreasing", volterra_monotone),
            ("T maps the order interval into itself", volterra_self_map),
            ("quadrature order", volterra_quadrature_order),
            (
                "equilibrium converges in one iteration",
                volterra_equilibrium,
            ),
            ("geometric Picard convergence", volterra_geometric),
        ],
        "stability" => vec![
            ("Lyapunov anchors", stability_lyapunov_anchors as CheckFn),
            ("V positive and factored form agrees", stability_v_positive),
            ("eigenvalue real parts", stability_real_parts),
            ("eigenvalue anchors", stability_eigen_anchors),
            ("classification boundary", stability_boundary),
            ("approach examples", stability_approach_examples),
        ],
        "basin" => vec![
            ("basin anchors", basin_anchors as CheckFn),
            ("basin level residual", basin_residual),
            ("basin brackets equilibrium", basin_geometry),
            ("trajectory audits", basin_audits),
        ],
        "regime" => vec![
            ("exponents", regime_exponents_check as CheckFn),
            ("oracles", regime_oracles),
            ("slip speeds early rise", regime_slip_early),
        ],
        "acceptance" => ACCEPTANCE.iter().map(|c| (c.name, c.run)).collect(),
        _ => Vec::new(),
    }
}

fn run_check(
    suite: &'static str,
    name: &'static str,
    f: CheckFn,
    ctx: &VerifyContext,
) -> CheckResult {
    let start = Instant::now();
    let (passed, detail) = match f(ctx) {
        Ok(outcome) => outcome,
        Err(e) => (false, format!("error: {e}")),
    };
    CheckResult {
        suite,
        name,
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// Run the named suites (all when `only` is empty), one after another.
pub fn run_verify(ctx: &VerifyContext, only: &[String]) -> Result<VerifyReport> {
    for name in only {
        if !SUITES.contains(&name.as_str()) {
            return Err(Error::domain(
                "suite",
                format!(
                    "unknown suite {name:?}; expected one of {}",
                    SUITES.join(", ")
                ),
            ));
        }
    }
    let mut checks = Vec::new();
    for &s in SUITES
        .iter()
        .filter(|s| only.is_empty() || only.iter().any(|o| o == *s))
    {
        if s == "acceptance" {
            checks.extend(ACCEPTANCE.iter().map(|c| c.evaluate(ctx)));
        } else {
            checks.extend(
                suite(s)
                    .into_iter()
                    .map(|(name, f)| run_check(s, name, f, ctx)),
            );
        }
    }
    Ok(VerifyReport {
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

// ---------------------------------------------------------------- helpers

fn params(omega: f64, beta: f64, alpha: f64) -> Result<ModelParams> {
    ModelParams::new(omega, beta, alpha)
}

fn run(omega: f64, beta: f64, alpha: f64, horizon: f64) -> Result<Trajectory> {
    let p = params(omega, beta, alpha)?;
    integrate(&p, &IntegrateOptions::new(&p).horizon(horizon))
}

fn tight() -> Tolerances {
    Tolerances {
        abs: 1e-12,
        rel: 1e-12,
    }
}

fn max_abs(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn strictly_decreasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] < w[0])
}

fn fmt_list(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format!("{v:.3e}"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Shared α × β × ω grid for the bounds, energy and convergence checks.
fn bounds_grid() -> Vec<(f64, f64, f64)> {
    let mut grid = Vec::new();
    for alpha in [0.0, 0.1, 1.0, 1.4, 1.5] {
        for beta in [0.5, 1.0] {
            for omega in [0.1, 1.0] {
                grid.push((alpha, beta, omega));
            }
        }
    }
    grid
}

fn water_in_capillary() -> PhysicalParams {
    PhysicalParams {
        rho: 1000.0,
        mu: 1e-3,
        gamma: 0.0728,
        theta: 0.0,
        g: 9.81,
        radius: 1e-4,
        slip_length: 0.0,
        h0: 0.0,
    }
}

// ----------------------------------------------------------------- params

fn params_reference(_: &VerifyContext) -> Outcome {
    let p = nondimensionalize(&water_in_capillary())?;
    let s = p.scales.expect("physical scales");
    let expected = [
        ("h_e", s.h_e, 0.14841997961264016),
        ("tau", s.tau, 12.103566125393693),
        ("omega", p.omega, 1.0327534769917582e-4),
        ("Oh", s.ohnesorge, 0.011720180773462386),
        ("Bo", s.bond, 1.3475274725274725e-3),
    ];
    let worst = expected
        .iter()
        .map(|(_, got, want)| ((got - want) / want).abs())
        .fold(0.0, f64::max);
    Ok((
        worst < 1e-14 && p.beta == 1.0 && p.alpha == 0.0,
        format!("max relative error {worst:.2e}"),
    ))
}

fn params_round_trip(_: &VerifyContext) -> Outcome {
    let mut worst = 0.0f64;
    for k in 0..=10_000 {
        let u = 9.0 / 8.0 * k as f64 / 10_000.0;
        worst = worst.max((u_from_h(h_from_u(u)?)? - u).abs());
    }
    Ok((
        worst <= 1e-15,
        format!("max |u_from_H(H_from_u(u)) - u| = {worst:.2e}"),
    ))
}

fn params_omega_formulas(_: &VerifyContext) -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED);
    let mut checked = 0;
    for _ in 0..1000 {
        let mut p = water_in_capillary();
        p.rho = rng.gen_range(500.0..2000.0);
        p.mu = 10f64.powf(rng.gen_range(-4.0..0.0));
        p.gamma = rng.gen_range(0.01..0.1);
        p.theta = rng.gen_range(0.0..1.5);
        p.g = rng.gen_range(1.0..20.0);
        p.radius = 10f64.powf(rng.gen_range(-5.0..-2.0));
        p.slip_length = p.radius * rng.gen_range(0.0..2.0);
        // nondimensionalize itself raises a consistency error on disagreement.
        nondimensionalize(&p)?;
        checked += 1;
    }
    Ok((
        true,
        format!("{checked} random fluids within 1e-12 relative"),
    ))
}

fn params_beta_monotone(_: &VerifyContext) -> Outcome {
    let betas: Vec<f64> = (0..=200)
        .map(|k| slip_parameter(k as f64 * 0.01, 1.0))
        .collect();
    let in_range = betas.iter().all(|&b| b > 0.0 && b <= 1.0);
    Ok((
        in_range && strictly_decreasing(&betas) && betas[0] == 1.0 && betas[25] == 0.5,
        format!(
            "beta(L/R = 0) = {}, beta(0.25) = {}, beta(2) = {:.6}",
            betas[0], betas[25], betas[200]
        ),
    ))
}

fn params_critical_scaling(ctx: &VerifyContext) -> Outcome {
    let mut worst = 0.0f64;
    for &beta in &[0.1, 0.5, 0.7, 1.0] {
        for &c in &[0.5, 2.0, 3.0] {
            let lhs = (ctx.critical_omega)(c * beta)?;
            let rhs = c * c * (ctx.critical_omega)(beta)?;
            worst = worst.max(((lhs - rhs) / rhs).abs());
        }
    }
    Ok((worst < 1e-15, format!("max relative gap {worst:.2e}")))
}

fn params_critical_anchors(ctx: &VerifyContext) -> Outcome {
    let got = [
        (ctx.critical_omega)(1.0)?,
        (ctx.critical_omega)(0.5)?,
        (ctx.critical_omega)(2.0)?,
    ];
    let rejects = (ctx.critical_omega)(0.0).is_err() && (ctx.critical_omega)(-1.0).is_err();
    Ok((got == [0.25, 0.0625, 1.0] && rejects, format!("{got:?}")))
}

// --------------------------------------------------------------- dynamics

fn dynamics_equilibrium(_: &VerifyContext) -> Outcome {
    let mut ok = true;
    for omega in [1e-4, 0.1, 0.25, 1.0, 4.0, 100.0] {
        for beta in [0.01, 0.5, 1.0] {
            let d = rhs_u(State::EQUILIBRIUM, omega, beta, 0.0);
            ok &= d.du == 0.0 && d.dv == 0.0;
        }
    }
    Ok((ok, "rhs_u(1/2, 0) = (0, 0) exactly".into()))
}

fn dynamics_anchors(_: &VerifyContext) -> Outcome {
    let a = rhs_u(State::new(0.0, 0.0), 1.0, 1.0, 0.0);
    let b = rhs_u(State::new(9.0 / 8.0, 0.0), 1.0, 1.0, 0.0);
    let h1 = rhs_h(1.0, 0.0, 0.3, 0.7)?;
    let h2 = rhs_h(0.5, 0.0, 1.0, 1.0)?;
    let singular = matches!(rhs_h(1e-13, 0.0, 1.0, 1.0), Err(Error::Singularity { .. }));
    let ok = (a.du, a.dv) == (0.0, 1.0)
        && (b.du, b.dv) == (0.0, -0.5)
        && h1 == 0.0
        && h2 == 1.0
        && singular;
    Ok((
        ok,
        format!("u''(0) = {}, u''(9/8) = {}, H''(1/2) = {h2}", a.dv, b.dv),
    ))
}

fn dynamics_regularization_order(_: &VerifyContext) -> Outcome {
    let mut ok = true;
    for &(u, v) in &[(0.0, 0.0), (0.3, -0.2), (0.5, 0.0), (1.1, 1.0)] {
        let mut prev = f64::INFINITY;
        for eps in [0.0, 1e-8, 1e-4, 1e-2, 1.0] {
            let dv = rhs_u(State::new(u, v), 1.0, 1.0, eps).dv;
            ok &= dv < prev;
            prev = dv;
        }
    }
    Ok((ok, "second component strictly decreasing in epsilon".into()))
}

fn dynamics_h_u_consistency(_: &VerifyContext) -> Outcome {
    let mut worst = 0.0f64;
    for &(omega, beta, alpha) in &[
        (1.0, 1.0, 0.5),
        (0.25, 0.5, 0.1),
        (4.0, 1.0, 1.5),
        (0.1, 1.0, 1.2),
    ] {
        let horizon_t = 20.0;
        let p = params(omega, beta, alpha)?;
        let sqrt_omega = omega.sqrt();
        let traj = integrate(
            &p,
            &IntegrateOptions::new(&p)
                .horizon(horizon_t / sqrt_omega)
                .tol(tight()),
        )?;
        let h_form = solver::solve(
            |_, y: &[f64; 2]| [y[1], rhs_h(y[0], y[1], omega, beta).unwrap_or(f64::NAN)],
            0.0,
            [alpha, 0.0],
            horizon_t,
            &SolverOptions {
                tol: tight(),
                ..Default::default()
            },
        )?;
        for k in 0..=2000 {
            let t = horizon_t * k as f64 / 2000.0;
            let from_u = traj.eval(t / sqrt_omega).expect("inside").height();
            let direct = h_form.eval(t).expect("inside")[0];
            worst = worst.max((from_u - direct).abs());
        }
    }
    Ok((
        worst < 1e-7,
        format!("sup |H_u - H_direct| over T in [0, 20] = {worst:.2e}"),
    ))
}

// -------------------------------------------------------------- integrate

fn integrate_reference(_: &VerifyContext) -> Outcome {
    let traj = run(1.0, 1.0, 0.0, 30.0)?;
    let gap = (traj.final_state().u - 0.5).abs();
    let eq = run(0.3, 0.6, 1.0, 100.0)?;
    let drift = max_abs(eq.samples.iter().map(|s| s.u - 0.5));
    Ok((
        gap < 1e-6 && drift < 1e-12 && traj.max_u() < 9.0 / 8.0,
        format!(
            "|u(30) - 1/2| = {gap:.2e}; equilibrium drift {drift:.2e}; max u = {:.4}",
            traj.max_u()
        ),
    ))
}

fn integrate_crossings(_: &VerifyContext) -> Outcome {
    let sub = run(0.1, 1.0, 0.0, 50.0)?.crossings.len();
    let sup = run(1.0, 1.0, 0.0, 50.0)?.crossings.len();
    let eq = run(1.0, 1.0, 1.0, 50.0)?.crossings.len();
    Ok((
        sub == 0 && sup >= 2 && eq == 0,
        format!("omega = 0.1: {sub}, omega = 1: {sup}, equilibrium: {eq}"),
    ))
}

fn integrate_positivity(_: &VerifyContext) -> Outcome {
    let mut ok = true;
    let mut worst = f64::INFINITY;
    for (alpha, beta, omega) in bounds_grid() {
        let p = params(omega, beta, alpha)?;
        let traj = integrate(&p, &IntegrateOptions::new(&p))?;
        let min_after_start = traj
            .samples
            .iter()
            .skip(1)
            .map(|s| s.u)
            .fold(f64::INFINITY, f64::min);
        ok &= min_after_start > 0.0 && (alpha == 0.0 || traj.min_u() > 0.0);
        worst = worst.min(min_after_start);
    }
    Ok((ok, format!("smallest u after the first sample {worst:.3e}")))
}

fn epsilon_differences(divisor: f64, tol: Tolerances) -> Result<Vec<f64>> {
    let p = params(1.0, 1.0, 0.0)?;
    let opts = IntegrateOptions::new(&p).horizon(20.0).tol(tol);
    (2..=8)
        .map(|k| {
            let eps = 10f64.powi(-k);
            let a = integrate(&p, &opts.epsilon(eps))?;
            let b = integrate(&p, &opts.epsilon(eps / divisor))?;
            a.sup_distance(&b)
        })
        .collect()
}

fn integrate_epsilon_halving(_: &VerifyContext) -> Outcome {
    let diffs = epsilon_differences(
        2.0,
        Tolerances {
            abs: 1e-13,
            rel: 1e-13,
        },
    )?;
    Ok((
        strictly_decreasing(&diffs),
        format!("|u_e - u_e/2| = [{}]", fmt_list(&diffs)),
    ))
}

fn integrate_tolerance(_: &VerifyContext) -> Outcome {
    let mut ok = true;
    let mut worst_ratio = 0.0f64;
    for &(omega, beta, alpha) in &[(1.0, 1.0, 0.0), (0.1, 0.5, 0.1), (4.0, 1.0, 1.5)] {
        let p = params(omega, beta, alpha)?;
        let coarse_tol = Tolerances::default();
        let opts = IntegrateOptions::new(&p).horizon(20.0);
        let a = integrate(&p, &opts.tol(coarse_tol))?.final_state();
        let b = integrate(&p, &opts.tol(coarse_tol.halved()))?.final_state();
        let change = (a.u - b.u).abs().max((a.v - b.v).abs());
        let scale = coarse_tol.abs + coarse_tol.rel * a.u.abs().max(a.v.abs());
        ok &= change < 10.0 * scale;
        worst_ratio = worst_ratio.max(change / scale);
    }
    Ok((
        ok,
        format!("max change / coarse tolerance = {worst_ratio:.2}"),
    ))
}

fn integrate_dependence_near_equilibrium(_: &VerifyContext) -> Outcome {
    let p = params(1.0, 1.0, 1.0)?;
    let opts = IntegrateOptions::new(&p).horizon(20.0);
    let rows = continuous_dependence(1.0, 1.0, 1.0, &[1.0, 1.0 - 1e-6, 1.0 + 1e-6], &opts)?;
    let same = rows[0].sup_distance;
    let near = rows[1].sup_distance.max(rows[2].sup_distance);
    Ok((
        same == 0.0 && near < 1e-4,
        format!("identical: {same}, alpha = 1 +- 1e-6: {near:.2e}"),
    ))
}

// ---------------------------------------------------------------- volterra

fn volterra_fast_vs_direct(_: &VerifyContext) -> Outcome {
    let f = GridFunction::from_fn(5.0, 1024, |s| 0.5 * (1.0 - (-s).exp() * s.cos()))?;
    let mut worst = 0.0f64;
    for &(omega, beta, alpha) in &[(1.0, 1.0, 0.0), (0.1, 0.5, 0.1), (4.0, 0.3, 1.5)] {
        let fast = apply_t(&f, omega, beta, alpha)?;
        let slow = apply_t_direct(&f, omega, beta, alpha)?;
        worst = worst.max(fast.sup_distance(&slow)?);
    }
    Ok((worst < 1e-12, format!("max gap {worst:.2e}")))
}

fn volterra_zero_input(_: &VerifyContext) -> Outcome {
    let (omega, beta) = (1.0f64, 1.0f64);
    let c = omega.sqrt() / beta;
    let f = GridFunction::constant(0.5, 512, 0.0)?;
    let tf = apply_t(&f, omega, beta, 0.0)?;
    let worst = max_abs(
        f.nodes()
            .zip(tf.values())
            .map(|(s, v)| v - (s + c * (-s / c).exp_m1())),
    );
    // Trapezoid bound: s h² max|k''| / 12 with k'' = e^{-(s-t)/c} / c².
    let bound = f.horizon() * f.step().powi(2) / (12.0 * c * c);
    Ok((
        worst <= bound,
        format!("max error {worst:.2e} vs trapezoid bound {bound:.2e}"),
    ))
}

fn volterra_monotone(_: &VerifyContext) -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED ^ 1);
    let mut ok = true;
    for _ in 0..50 {
        let omega = rng.gen_range(0.05..4.0);
        let beta = rng.gen_range(0.1..1.0);
        let f = GridFunction::from_fn(3.0, 256, |s| 0.4 * s * s / (1.0 + s))?;
        let bump: Vec<f64> = f
            .values()
            .iter()
            .map(|v| v + rng.gen_range(0.0..0.2))
            .collect();
        let g = GridFunction::new(f.step(), bump)?;
        let (tf, tg) = (
            apply_t(&f, omega, beta, 0.0)?,
            apply_t(&g, omega, beta, 0.0)?,
        );
        ok &= tf.values().iter().zip(tg.values()).all(|(a, b)| a >= b);
    }
    Ok((ok, "f <= g implies T f >= T g on 50 random pairs".into()))
}

fn volterra_self_map(_: &VerifyContext) -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED ^ 2);
    let mut worst = f64::INFINITY;
    for _ in 0..100 {
        let omega = rng.gen_range(0.05..4.0);
        let beta = rng.gen_range(0.1..1.0);
        let (lo, hi) = barriers(omega, beta, 256)?;
        let values = lo
            .values()
            .iter()
            .zip(hi.values())
            .map(|(a, b)| a + rng.gen_range(0.0..=1.0) * (b - a))
            .collect();
        let f = GridFunction::new(lo.step(), values)?;
        let tf = apply_t(&f, omega, beta, 0.0)?;
        for (k, s) in tf.nodes().enumerate() {
            let v = tf.values()[k];
            worst = worst.min(v - s * s / 6.0).min(s * s / 2.0 - v);
        }
    }
    Ok((
        worst >= -volterra::ORDER_SLACK,
        format!("smallest slack {worst:.2e}"),
    ))
}

fn volterra_quadrature_order(_: &VerifyContext) -> Outcome {
    let solve = |n: usize| {
        picard_solve(
            1.0,
            1.0,
            0.0,
            &PicardOptions::new(10.0).intervals(n).tol(1e-13),
        )
    };
    let (a, b, c) = (solve(512)?, solve(1024)?, solve(2048)?);
    let d1 = a.solution.sup_distance_refined(&b.solution)?;
    let d2 = b.solution.sup_distance_refined(&c.solution)?;
    let ratio = d1 / d2;
    Ok((
        (3.5..=4.5).contains(&ratio),
        format!("distance ratio under halving {ratio:.3}"),
    ))
}

fn volterra_equilibrium(_: &VerifyContext) -> Outcome {
    let r = picard_solve(0.3, 0.7, 1.0, &PicardOptions::new(10.0))?;
    Ok((
        r.iterations() == 1 && r.final_diff() == 0.0,
        format!(
            "{} iteration(s), difference {}",
            r.iterations(),
            r.final_diff()
        ),
    ))
}

fn volterra_geometric(_: &VerifyContext) -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for &(omega, beta) in &[(1.0f64, 1.0), (0.1, 0.5), (0.25, 1.0)] {
        let horizon = 5.0 * omega.sqrt() / beta;
        let r = picard_solve(omega, beta, 0.0, &PicardOptions::new(horizon))?;
        let ratios = r.contraction_ratios();
        let tail = &ratios[ratios.len().saturating_sub(4)..];
        let worst = tail.iter().copied().fold(0.0, f64::max);
        ok &= !tail.is_empty() && worst < 1.0;
        notes.push(format!("{} its, tail ratio <= {worst:.3}", r.iterations()));
    }
    Ok((ok, notes.join("; ")))
}

// --------------------------------------------------------------- stability

fn stability_lyapunov_anchors(_: &VerifyContext) -> Outcome {
    let (e_eq, v_eq) = stability::lyapunov(0.5, 0.0)?;
    let (e_0, v_0) = stability::lyapunov(0.0, 0.0)?;
    let (e_top, v_top) = stability::lyapunov(9.0 / 8.0, 0.0)?;
    let ok = v_eq == 0.0
        && (e_eq + 1.0 / 6.0).abs() < 1e-16
        && (e_0, v_0) == (0.0, 1.0 / 6.0)
        && e_top.abs() < 1e-15
        && (v_top - 1.0 / 6.0).abs() < 1e-15
        && stability::lyapunov(-1e-3, 0.0).is_err();
    Ok((ok, format!("V(1/2,0) = {v_eq}, E(9/8,0) = {e_top:.1e}")))
}

fn stability_v_positive(_: &VerifyContext) -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED ^ 3);
    let (mut positive, mut worst) = (true, 0.0f64);
    for _ in 0..100_000 {
        let u: f64 = rng.gen_range(0.0..=9.0 / 8.0);
        let v: f64 = rng.gen_range(-2.0..=2.0);
        if (u - 0.5).abs() + v.abs() <= 1e-6 {
            continue;
        }
        let factored = lyapunov_factored(u, v);
        let direct = energy(u, v) + 1.0 / 6.0;
        positive &= factored > 0.0 && lyapunov_value(u, v) > 0.0;
        // Relative to the size of the terms summed in the direct form, which
        // bounds its rounding error.
        let magnitude = 0.5 * v * v + u + 2.0 * 2f64.sqrt() / 3.0 * u.powf(1.5) + 1.0 / 6.0;
        worst = worst.max((factored - direct).abs() / magnitude);
    }
    Ok((
        positive && worst < 1e-13,
        format!("max gap {worst:.2e} relative to the term magnitude"),
    ))
}

fn stability_real_parts(_: &VerifyContext) -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED ^ 4);
    let mut ok = true;
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let beta = rng.gen_range(1e-3..=2.0);
        let omega = rng.gen_range(1e-3..=4.0);
        let r = linearize(omega, beta)?;
        let half = -beta / (2.0 * omega.sqrt());
        let mean = 0.5 * (r.lambda1.re + r.lambda2.re);
        worst = worst.max(((mean - half) / half).abs());
        ok &= r.lambda1.re < 0.0 && r.lambda2.re < 0.0;
        if r.kind != CriticalPointKind::StableNode {
            ok &= r.lambda1.re == r.lambda2.re && ((r.lambda1.re - half) / half).abs() <= 1e-12;
        }
    }
    Ok((
        ok && worst <= 1e-12,
        format!("mean real part matches -beta/(2 sqrt omega) to {worst:.2e}; both negative; equal off the node branch"),
    ))
}

fn stability_eigen_anchors(_: &VerifyContext) -> Outcome {
    let r = linearize(1.0, 1.0)?;
    let half_sqrt3 = 3f64.sqrt() / 2.0;
    let spiral = r.kind == CriticalPointKind::StableSpiral
        && (r.lambda1 - Complex64::new(-0.5, half_sqrt3)).norm() < 1e-12
        && (r.lambda2 - Complex64::new(-0.5, -half_sqrt3)).norm() < 1e-12;
    let r = linearize(0.125, 1.0)?;
    let node = r.kind == CriticalPointKind::StableNode
        && (r.lambda1.re + 2.414_213_6).abs() < 1e-7
        && (r.lambda2.re + 0.414_213_6).abs() < 1e-7;
    let r = linearize(0.25, 1.0)?;
    let ev = stability::StabilityReport::eigenvector(r.lambda1);
    let inflected = r.kind == CriticalPointKind::StableInflectedNode
        && ev[1] / ev[0] == Complex64::new(-1.0, 0.0);
    Ok((
        spiral && node && inflected,
        format!("spiral {spiral}, node {node}, inflected {inflected}"),
    ))
}

fn stability_boundary(ctx: &VerifyContext) -> Outcome {
    let mut worst = 0.0f64;
    for beta in [0.2, 0.5, 1.0, 1.7] {
        let (mut lo, mut hi) = (1e-6, 10.0);
        while hi - lo > 1e-12 {
            let mid = 0.5 * (lo + hi);
            if linearize(mid, beta)?.kind == CriticalPointKind::StableSpiral {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let switch = 0.5 * (lo + hi);
        worst = worst.max((switch - (ctx.critical_omega)(beta)?).abs());
    }
    Ok((
        worst <= 1e-10,
        format!("max |switch - critical omega| = {worst:.2e}"),
    ))
}

fn classify(omega: f64, beta: f64, alpha: f64) -> Result<Approach> {
    let horizon = settling_horizon(omega, beta, 1e-6)?;
    Ok(classify_approach(&run(omega, beta, alpha, horizon)?)?.approach)
}

fn stability_approach_examples(_: &VerifyContext) -> Outcome {
    let eq = classify(1.0, 1.0, 1.0)?;
    let mono = classify(0.1, 1.0, 0.0)?;
    let osc = classify(0.5, 0.5, 0.0)?;
    let ok =
        eq == Approach::AtEquilibrium && mono == Approach::Monotone && osc == Approach::Oscillatory;
    Ok((ok, format!("{eq:?}, {mono:?}, {osc:?}")))
}

// ------------------------------------------------------------------- basin

fn basin_anchors(_: &VerifyContext) -> Outcome {
    let b0 = basin(0.0)?;
    let b1 = basin(1.0)?;
    let b15 = basin(1.5)?;
    let c15 = -0.5 * 2.25 + 2.0 * 2f64.sqrt() / 3.0 * 1.125 * 1.125f64.sqrt() + 1.0 / 6.0;
    let ok = (b0.level, b0.u_min, b0.u_max) == (1.0 / 6.0, 0.0, 9.0 / 8.0)
        && (b1.level, b1.u_min, b1.u_max) == (0.0, 0.5, 0.5)
        && (b15.level - c15).abs() < 1e-15
        && (b15.u_min, b15.u_max) == (0.0, 9.0 / 8.0)
        && basin(1.6).is_err()
        && basin(-0.1).is_err();
    Ok((ok, format!("C(3/2) = {:.17} vs {c15:.17}", b15.level)))
}

fn basin_residual(_: &VerifyContext) -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED ^ 5);
    let (mut worst, mut ordered) = (0.0f64, true);
    for _ in 0..1000 {
        let b = basin(rng.gen_range(0.0..=1.5))?;
        worst = worst.max(b.residual());
        ordered &= 0.0 <= b.u_min && b.u_min <= b.u_max && b.u_max <= 9.0 / 8.0;
    }
    Ok((
        ordered && worst < 1e-10,
        format!("max level residual {worst:.2e}"),
    ))
}

fn basin_geometry(_: &VerifyContext) -> Outcome {
    let n = 15_000;
    let mut ok = true;
    let mut prev: Option<(f64, f64)> = None;
    let mut max_jump = 0.0f64;
    for k in 0..=n {
        let b = basin(1.5 * k as f64 / n as f64)?;
        ok &= b.u_min <= 0.5 && 0.5 <= b.u_max;
        if let Some((lo, hi)) = prev {
            max_jump = max_jump.max((b.u_min - lo).abs()).max((b.u_max - hi).abs());
        }
        prev = Some((b.u_min, b.u_max));
    }
    // The bounds have square-root behavior only at α = 3/2, where the jump
    // over one step of 1e-4 stays below about 1e-2.
    Ok((
        ok && max_jump < 2e-2,
        format!("largest jump per step 1e-4: {max_jump:.2e}"),
    ))
}

fn basin_audits(_: &VerifyContext) -> Outcome {
    let a0 = audit_trajectory(&run(1.0, 1.0, 0.0, 60.0)?, &basin(0.0)?);
    let a1 = audit_trajectory(&run(1.0, 1.0, 1.0, 60.0)?, &basin(1.0)?);
    let a15 = audit_trajectory(&run(1.0, 1.0, 1.5, 60.0)?, &basin(1.5)?);
    let ok = a0.initial_in_basin
        && a0.forward_invariant
        && a1.max_excess == 0.0
        && a1.final_distance == 0.0
        && a15.forward_invariant
        && a15.final_distance < 1e-5;
    Ok((
        ok,
        format!(
            "alpha = 0: max V - C = {:.2e}; alpha = 3/2: final distance {:.2e}",
            a0.max_excess, a15.final_distance
        ),
    ))
}

// ------------------------------------------------------------------ regime

fn regime_exponents_check(_: &VerifyContext) -> Outcome {
    use num_rational::Rational64 as Q;
    let ok = RegimeCase::ALL
        .iter()
        .all(|&c| RegimeSpec::default_for(c).is_valid())
        && RegimeSpec::new(RegimeCase::NegligibleGravity)?.a == Q::from_integer(1)
        && RegimeSpec::new(RegimeCase::NegligibleViscosity)?.a == Q::new(1, 2)
        && RegimeSpec::family(Q::new(1, 4))?.a == Q::new(1, 2)
        && RegimeSpec::family(Q::new(1, 2)).is_err();
    Ok((ok, "fixed exponents and the a = 2b family".into()))
}

fn regime_oracles(_: &VerifyContext) -> Outcome {
    let (ok, detail) = criterion_regimes()?;
    Ok((ok, detail))
}

fn regime_slip_early(_: &VerifyContext) -> Outcome {
    let spec = RegimeSpec::default_for(RegimeCase::NegligibleGravity);
    let slip = run_regime(&spec, &RegimeOptions::new(spec.case, 0.5, 0.0))?;
    let no_slip = run_regime(&spec, &RegimeOptions::new(spec.case, 1.0, 0.0))?;
    let (a, b) = (slip.height_at(1.0), no_slip.height_at(1.0));
    Ok((
        a > b,
        format!("h*(1): beta = 0.5 gives {a:.6}, beta = 1 gives {b:.6}"),
    ))
}

// -------------------------------------------------------------- acceptance

/// One acceptance criterion with its runtime budget.
pub struct Criterion {
    pub id: &'static str,
    pub name: &'static str,
    pub budget: Duration,
    run: CheckFn,
}

impl Criterion {
    /// Run the criterion. Exceeding the budget fails it.
    pub fn evaluate(&self, ctx: &VerifyContext) -> CheckResult {
        let mut result = run_check("acceptance", self.name, self.run, ctx);
        let within = result.seconds <= self.budget.as_secs_f64();
        if !within {
            result.passed = false;
        }
        result.detail = format!(
            "{}; {:.3} s of {} s budget",
            result.detail,
            result.seconds,
            self.budget.as_secs_f64()
        );
        result
    }
}

pub fn acceptance_criteria() -> &'static [Criterion] {
    &ACCEPTANCE
}

static ACCEPTANCE: [Criterion; 11] = [
    Criterion {
        id: "c1",
        name: "equilibrium exactness",
        budget: Duration::from_secs(1),
        run: c1_equilibrium,
    },
    Criterion {
        id: "c2",
        name: "bounds 0 <= u <= 9/8",
        budget: Duration::from_secs(5),
        run: c2_bounds,
    },
    Criterion {
        id: "c3",
        name: "energy and Lyapunov decrease",
        budget: Duration::from_secs(10),
        run: c3_energy,
    },
    Criterion {
        id: "c4",
        name: "bifurcation at omega* = beta^2/4",
        budget: Duration::from_secs(30),
        run: c4_bifurcation,
    },
    Criterion {
        id: "c5",
        name: "eigenvalue anchor",
        budget: Duration::from_millis(1),
        run: c5_eigen,
    },
    Criterion {
        id: "c6",
        name: "basin formulas",
        budget: Duration::from_secs(1),
        run: c6_basin,
    },
    Criterion {
        id: "c7",
        name: "Volterra/ODE cross-validation",
        budget: Duration::from_secs(60),
        run: c7_volterra,
    },
    Criterion {
        id: "c8",
        name: "regularization convergence",
        budget: Duration::from_secs(10),
        run: c8_regularization,
    },
    Criterion {
        id: "c9",
        name: "continuous dependence",
        budget: Duration::from_secs(5),
        run: c9_dependence,
    },
    Criterion {
        id: "c10",
        name: "regime oracles",
        budget: Duration::from_secs(10),
        run: c10_regimes,
    },
    Criterion {
        id: "c11",
        name: "convergence to equilibrium",
        budget: Duration::from_secs(20),
        run: c11_convergence,
    },
];

fn c1_equilibrium(_: &VerifyContext) -> Outcome {
    let mut worst = 0.0f64;
    for beta in [0.5, 1.0] {
        for omega in [0.1, 0.25, 1.0, 4.0] {
            let traj = run(omega, beta, 1.0, 100.0)?;
            worst = worst.max(max_abs(traj.samples.iter().map(|s| s.u - 0.5)));
        }
    }
    Ok((worst < 1e-10, format!("max |u - 1/2| = {worst:.2e}")))
}

fn c2_bounds(_: &VerifyContext) -> Outcome {
    let (mut lowest, mut highest) = (f64::INFINITY, f64::NEG_INFINITY);
    for (alpha, beta, omega) in bounds_grid() {
        let p = params(omega, beta, alpha)?;
        let traj = integrate(&p, &IntegrateOptions::new(&p))?;
        lowest = lowest.min(traj.min_u());
        highest = highest.max(traj.max_u());
    }
    Ok((
        lowest >= -1e-12 && highest <= 9.0 / 8.0 + 1e-9,
        format!(
            "min u = {lowest:.3e}, max u - 9/8 = {:.3e}",
            highest - 9.0 / 8.0
        ),
    ))
}

/// Largest `|ΔV/Δs + (β/√ω)v²|` from centered differences, taken at every
/// `stride`-th interior sample so runs at Δs and Δs/2 compare the same nodes.
fn lyapunov_fd_error(traj: &Trajectory, stride: usize) -> f64 {
    let damping = traj.params.damping();
    let s = &traj.samples;
    (stride..s.len().saturating_sub(1))
        .step_by(stride)
        .map(|i| {
            let ds = s[i + 1].s - s[i - 1].s;
            ((s[i + 1].lyapunov - s[i - 1].lyapunov) / ds + damping * s[i].v * s[i].v).abs()
        })
        .fold(0.0, f64::max)
}

fn c3_energy(_: &VerifyContext) -> Outcome {
    let mut worst_rise = 0.0f64;
    let mut lowest_order = f64::INFINITY;
    for (alpha, beta, omega) in bounds_grid() {
        let p = params(omega, beta, alpha)?;
        let base = IntegrateOptions::new(&p);
        let traj = integrate(&p, &base)?;
        for w in traj.samples.windows(2) {
            worst_rise = worst_rise.max(w[1].energy - w[0].energy);
        }
        if alpha == 1.0 {
            continue; // V ≡ 0: no error to measure an order from.
        }
        let fine = base.tol(tight());
        let coarse = lyapunov_fd_error(&integrate(&p, &fine.sample_step(0.02))?, 1);
        let finer = lyapunov_fd_error(&integrate(&p, &fine.sample_step(0.01))?, 2);
        lowest_order = lowest_order.min((coarse / finer).log2());
    }
    Ok((
        worst_rise <= 1e-8 && lowest_order >= 1.9,
        format!("largest E increase {worst_rise:.2e}; lowest observed order {lowest_order:.3}"),
    ))
}

/// Smallest `ω` in `[lo, hi]` whose run from rest at `α = 0` crosses `u = 1/2`.
pub fn crossing_onset(beta: f64, lo: f64, hi: f64, width: f64) -> Result<(f64, f64)> {
    let crosses = |omega: f64| -> Result<bool> {
        let horizon = settling_horizon(omega, beta, 1e-6)?;
        Ok(!run(omega, beta, 0.0, horizon)?.crossings.is_empty())
    };
    let (mut lo, mut hi) = (lo, hi);
    if crosses(lo)? || !crosses(hi)? {
        return Err(Error::Inconclusive(format!(
            "crossing onset not bracketed by [{lo}, {hi}] for beta = {beta}"
        )));
    }
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        if crosses(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((lo, hi))
}

fn c4_bifurcation(ctx: &VerifyContext) -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for (beta, low, high) in [(1.0, 0.1, 1.0), (0.5, 0.05, 0.5)] {
        let a = classify(low, beta, 0.0)?;
        let b = classify(high, beta, 0.0)?;
        ok &= a == Approach::Monotone && b == Approach::Oscillatory;
        let star = (ctx.critical_omega)(beta)?;
        let reference = beta * beta / 4.0;
        let (lo, hi) = crossing_onset(beta, 0.5 * reference, 2.0 * reference, 1e-3)?;
        ok &= lo >= star - 0.05 && hi <= star + 0.05;
        notes.push(format!(
            "beta = {beta}: {a:?}/{b:?}, onset in [{lo:.4}, {hi:.4}] vs omega* = {star}"
        ));
    }
    Ok((ok, notes.join("; ")))
}

fn c5_eigen(_: &VerifyContext) -> Outcome {
    let r = linearize(0.25, 1.0)?;
    let err = (r.lambda1 - Complex64::new(-1.0, 0.0))
        .norm()
        .max((r.lambda2 - Complex64::new(-1.0, 0.0)).norm());
    Ok((
        err <= 1e-12 && r.kind == CriticalPointKind::StableInflectedNode,
        format!("|lambda + 1| = {err:.1e}, {:?}", r.kind),
    ))
}

fn c6_basin(ctx: &VerifyContext) -> Outcome {
    let (anchors, a) = basin_anchors(ctx)?;
    let (residual, r) = basin_residual(ctx)?;
    Ok((anchors && residual, format!("{a}; {r}")))
}

fn c7_volterra(_: &VerifyContext) -> Outcome {
    let horizon = 10.0;
    let mut worst = 0.0f64;
    for beta in [1.0, 0.5] {
        for omega in [0.1, 0.25, 1.0] {
            for alpha in [0.0, 0.1, 1.0] {
                let p = params(omega, beta, alpha)?;
                let traj = integrate(&p, &IntegrateOptions::new(&p).horizon(horizon).tol(tight()))?;
                let picard = picard_solve(omega, beta, alpha, &PicardOptions::new(horizon))?;
                worst = worst.max(picard.solution.sup_distance_to(&traj)?);
            }
        }
    }
    let mut order_ok = true;
    let mut worst_violation = f64::NEG_INFINITY;
    for beta in [1.0, 0.5] {
        for omega in [0.1, 0.25, 1.0, 4.0] {
            order_ok &= check_order_interval(omega, beta, 1024)?.holds;
            let (u0, v0) = barriers(omega, beta, 1024)?;
            for f in [&u0, &v0] {
                for lambda in [0.25, 0.5, 0.999999] {
                    let r = check_scaling_inequality(f, lambda, omega, beta)?;
                    order_ok &= r.holds;
                    worst_violation = worst_violation.max(r.max_violation);
                }
            }
            debug_assert!(u0.horizon() == s_star(omega, beta));
        }
    }
    Ok((
        worst <= 1e-5 && order_ok,
        format!("max |picard - ode| = {worst:.2e}; order interval holds: {order_ok}; max scaling excess {worst_violation:.2e}"),
    ))
}

fn c8_regularization(_: &VerifyContext) -> Outcome {
    let diffs = epsilon_differences(
        10.0,
        Tolerances {
            abs: 1e-13,
            rel: 1e-13,
        },
    )?;
    Ok((
        strictly_decreasing(&diffs),
        format!("|u_e - u_e/10| = [{}]", fmt_list(&diffs)),
    ))
}

fn c9_dependence(_: &VerifyContext) -> Outcome {
    let p = params(1.0, 1.0, 0.0)?;
    let rows = continuous_dependence(
        1.0,
        1.0,
        0.0,
        &[0.2, 0.1, 0.05, 0.025],
        &IntegrateOptions::new(&p),
    )?;
    let d: Vec<f64> = rows.iter().map(|r| r.sup_distance).collect();
    Ok((
        strictly_decreasing(&d),
        format!("distances [{}]", fmt_list(&d)),
    ))
}

fn criterion_regimes() -> Outcome {
    let mut worst = Vec::new();
    let mut ok = true;
    for (case, alpha, bound) in [
        (RegimeCase::NegligibleGravityInertia, 0.0, 1e-10),
        (RegimeCase::NegligibleGravityInertia, 0.3, 1e-10),
        (RegimeCase::NegligibleGravity, 0.0, 1e-8),
        (RegimeCase::NegligibleInertia, 0.1, 1e-8),
        (RegimeCase::NegligibleViscosity, 0.5, 1e-8),
    ] {
        let mut case_worst = 0.0f64;
        for beta in [1.0, 0.5] {
            let spec = RegimeSpec::default_for(case);
            let run = run_regime(&spec, &RegimeOptions::new(case, beta, alpha))?;
            case_worst = case_worst.max(run.summary.max_residual);
        }
        ok &= case_worst < bound;
        worst.push(format!(
            "case {} (alpha = {alpha}): {case_worst:.2e}",
            case.number()
        ));
    }
    // Independent spot check of the Case 1 closed form against its ODE.
    let (u, du) = negligible_gravity_solution(1.0, 0.0, 2.0);
    ok &= (u - (2.0 - (1.0 - (-2.0f64).exp()))).abs() < 1e-15
        && (du - (1.0 - (-2.0f64).exp())).abs() < 1e-15;
    Ok((ok, worst.join("; ")))
}

fn c10_regimes(_: &VerifyContext) -> Outcome {
    criterion_regimes()
}

fn c11_convergence(_: &VerifyContext) -> Outcome {
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    for (alpha, beta, omega) in bounds_grid() {
        let horizon = 60.0 * omega.sqrt() / beta;
        let d = run(omega, beta, alpha, horizon)?
            .final_state()
            .distance_to_equilibrium();
        worst = worst.max(d);
        if !(d < 1e-5) {
            failures.push(format!(
                "(alpha, beta, omega) = ({alpha}, {beta}, {omega}): {d:.2e}"
            ));
        }
    }
    let detail = if failures.is_empty() {
        format!("max final distance {worst:.2e}")
    } else {
        format!("final distance >= 1e-5 at {}", failures.join(", "))
    };
    Ok((failures.is_empty(), detail))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_rejected() {
        assert!(run_verify(&VerifyContext::default(), &["nope".into()]).is_err());
    }

    #[test]
    fn basin_suite_passes() {
        let report = run_verify(&VerifyContext::default(), &["basin".into()]).unwrap();
        assert!(report.passed, "{:#?}", report.checks);
        assert!(report.checks.iter().all(|c| c.suite == "basin"));
    }

    #[test]
    fn wrong_critical_omega_is_caught() {
        fn doubled(beta: f64) -> Result<f64> {
            Ok(beta * beta / 2.0)
        }
        let ctx = VerifyContext {
            critical_omega: doubled,
        };
        let result = run_check(
            "stability",
            "classification boundary",
            stability_boundary,
            &ctx,
        );
        assert!(!result.passed);
    }

    #[test]
    fn theta_range_is_respected() {
        let mut p = water_in_capillary();
        p.theta = std::f64::consts::FRAC_PI_2;
        assert!(nondimensionalize(&p).is_err());
    }
}
