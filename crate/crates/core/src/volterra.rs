//! The model as a fixed point of a Volterra operator.
//!
//! Integrating the u-form equation twice against its damping gives
//!
//! ```text
//! [T f](s) = α²/2 + ∫₀ˢ c (1 − e^{−(s−t)/c}) (1 − √(2[f(t)]₊)) dt,   c = √ω/β,
//! ```
//!
//! whose fixed point is the solution `u`. [`apply_t`] discretizes the
//! integral with the composite trapezoid rule on a uniform grid and
//! [`picard_solve`] iterates it. The kernel is a constant minus an
//! exponential, so every node value follows from two running sums and a
//! full application costs `O(N)`. [`apply_t_direct`] evaluates the same
//! quadrature sum term by term and serves as its cross-check.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrate::Trajectory;
use crate::params::ModelParams;
use crate::report::fmt17;

/// Largest grid the solver accepts.
pub const MAX_INTERVALS: usize = 1 << 16;

pub const DEFAULT_INTERVALS: usize = 4096;
pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 10_000;

/// Slack allowed in the scaling inequality.
pub const SCALING_SLACK: f64 = 1e-12;

/// Slack allowed when checking that `T` maps the order interval into itself.
pub const ORDER_SLACK: f64 = 1e-10;

/// Node values on the uniform grid `s_k = k·h`, `k = 0..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    step: f64,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(step: f64, values: Vec<f64>) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::domain(
                "grid step",
                format!("must be > 0, got {step}"),
            ));
        }
        if values.len() < 3 {
            return Err(Error::domain(
                "grid",
                format!(
                    "needs at least 2 intervals, got {}",
                    values.len().saturating_sub(1)
                ),
            ));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::domain(
                "grid values",
                format!("non-finite value at node {k}"),
            ));
        }
        Ok(GridFunction { step, values })
    }

    /// Sample `f` on `N` intervals of `[0, horizon]`.
    pub fn from_fn(horizon: f64, intervals: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let step = horizon / intervals as f64;
        Self::new(step, (0..=intervals).map(|k| f(k as f64 * step)).collect())
    }

    pub fn constant(horizon: f64, intervals: usize, value: f64) -> Result<Self> {
        Self::from_fn(horizon, intervals, |_| value)
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn intervals(&self) -> usize {
        self.values.len() - 1
    }

    pub fn horizon(&self) -> f64 {
        self.step * self.intervals() as f64
    }

    pub fn node(&self, k: usize) -> f64 {
        k as f64 * self.step
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(|k| self.node(k))
    }

    pub fn scaled(&self, factor: f64) -> GridFunction {
        GridFunction {
            step: self.step,
            values: self.values.iter().map(|v| factor * v).collect(),
        }
    }

    /// `max_k |f_k − g_k|` on a shared grid.
    pub fn sup_distance(&self, other: &GridFunction) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Sup distance at the nodes of `self` against a grid refined by an
    /// integer factor.
    pub fn sup_distance_refined(&self, fine: &GridFunction) -> Result<f64> {
        let ratio = self.step / fine.step;
        let factor = ratio.round() as usize;
        if factor == 0
            || (ratio - factor as f64).abs() > 1e-9
            || fine.intervals() != factor * self.intervals()
        {
            return Err(Error::domain(
                "grid",
                "the fine grid must refine this one by an integer factor",
            ));
        }
        Ok(self
            .values
            .iter()
            .enumerate()
            .map(|(k, v)| (v - fine.values[k * factor]).abs())
            .fold(0.0, f64::max))
    }

    /// Sup distance against a trajectory evaluated at the grid nodes.
    pub fn sup_distance_to(&self, traj: &Trajectory) -> Result<f64> {
        let mut worst = 0.0f64;
        for (k, s) in self.nodes().enumerate() {
            let state = traj
                .eval(s)
                .ok_or_else(|| Error::domain("trajectory", format!("does not cover s = {s}")))?;
            worst = worst.max((self.values[k] - state.u).abs());
        }
        Ok(worst)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "s,u")?;
        for (k, v) in self.values.iter().enumerate() {
            writeln!(w, "{},{}", fmt17(self.node(k)), fmt17(*v))?;
        }
        Ok(())
    }

    fn check_same_grid(&self, other: &GridFunction) -> Result<()> {
        if self.values.len() != other.values.len() || self.step != other.step {
            return Err(Error::domain(
                "grid",
                "grid functions live on different grids",
            ));
        }
        Ok(())
    }
}

fn forcing(u: f64) -> f64 {
    1.0 - (2.0 * u.max(0.0)).sqrt()
}

fn check_params(omega: f64, beta: f64, alpha: f64) -> Result<()> {
    ModelParams::new(omega, beta, alpha).map(|_| ())
}

/// `T f` by the composite trapezoid rule, in `O(N)`.
///
/// With `g_j = 1 − √(2[f_j]₊)`, `r = e^{−h/c}` and the kernel vanishing on the
/// diagonal, node `i` of the quadrature sum equals `c·h·D_i` where
/// `D_1 = ½(1 − r)g_0` and `D_{i+1} = D_i + (1 − r)(Q_i + g_i)`, with
/// `Q_1 = ½ r g_0` and `Q_{i+1} = r(Q_i + g_i)`.
pub fn apply_t(f: &GridFunction, omega: f64, beta: f64, alpha: f64) -> Result<GridFunction> {
    check_params(omega, beta, alpha)?;
    let c = omega.sqrt() / beta;
    let h = f.step;
    let r = (-h / c).exp();
    let one_minus_r = -(-h / c).exp_m1();
    let base = 0.5 * alpha * alpha;

    let mut out = Vec::with_capacity(f.values.len());
    out.push(base);
    let g0 = forcing(f.values[0]);
    let mut d = 0.5 * one_minus_r * g0;
    let mut q = 0.5 * r * g0;
    for i in 1..f.values.len() {
        out.push(base + c * h * d);
        let g = forcing(f.values[i]);
        d += one_minus_r * (q + g);
        q = r * (q + g);
    }
    Ok(GridFunction {
        step: h,
        values: out,
    })
}

/// `T f` by summing the trapezoid rule node by node, in `O(N²)`.
pub fn apply_t_direct(f: &GridFunction, omega: f64, beta: f64, alpha: f64) -> Result<GridFunction> {
    check_params(omega, beta, alpha)?;
    let c = omega.sqrt() / beta;
    let h = f.step;
    let g: Vec<f64> = f.values.iter().map(|&u| forcing(u)).collect();
    let kernel = |lag: f64| -c * (-lag / c).exp_m1();

    let values = (0..g.len())
        .map(|i| {
            let s = f.node(i);
            let mut sum = 0.0;
            for (j, gj) in g.iter().enumerate().take(i + 1) {
                let weight = if j == 0 || j == i { 0.5 } else { 1.0 };
                sum += weight * kernel(s - f.node(j)) * gj;
            }
            0.5 * alpha * alpha + h * sum
        })
        .collect();
    Ok(GridFunction { step: h, values })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardOptions {
    pub horizon: f64,
    /// Number of grid intervals `N`; the step is `S/N`.
    pub intervals: usize,
    pub tol: f64,
    pub max_iter: usize,
}

impl PicardOptions {
    /// `N = 4096`, tolerance `1e-10`, at most 10 000 iterations.
    pub fn new(horizon: f64) -> Self {
        PicardOptions {
            horizon,
            intervals: DEFAULT_INTERVALS,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
        }
    }

    pub fn intervals(mut self, n: usize) -> Self {
        self.intervals = n;
        self
    }

    pub fn tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn step(&self) -> f64 {
        self.horizon / self.intervals as f64
    }

    fn validate(&self) -> Result<()> {
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::domain(
                "horizon",
                format!("must be > 0, got {}", self.horizon),
            ));
        }
        if !(2..=MAX_INTERVALS).contains(&self.intervals) {
            return Err(Error::domain(
                "intervals",
                format!("must lie in [2, {MAX_INTERVALS}], got {}", self.intervals),
            ));
        }
        if !(self.tol > 0.0) {
            return Err(Error::domain(
                "tol",
                format!("must be > 0, got {}", self.tol),
            ));
        }
        if self.max_iter == 0 {
            return Err(Error::domain("max_iter", "must be at least 1"));
        }
        Ok(())
    }
}

/// Sidecar metadata written next to a Picard CSV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PicardSummary {
    pub iterations: usize,
    pub final_diff: f64,
    pub h: f64,
}

#[derive(Debug, Clone)]
pub struct PicardResult {
    pub solution: GridFunction,
    /// `‖f_{k+1} − f_k‖∞` for every iteration.
    pub log: Vec<f64>,
}

impl PicardResult {
    pub fn iterations(&self) -> usize {
        self.log.len()
    }

    pub fn final_diff(&self) -> f64 {
        self.log.last().copied().unwrap_or(0.0)
    }

    pub fn summary(&self) -> PicardSummary {
        PicardSummary {
            iterations: self.iterations(),
            final_diff: self.final_diff(),
            h: self.solution.step,
        }
    }

    /// Ratios of successive differences, skipping exact zeros.
    pub fn contraction_ratios(&self) -> Vec<f64> {
        self.log
            .windows(2)
            .filter(|w| w[0] > 0.0)
            .map(|w| w[1] / w[0])
            .collect()
    }
}

/// Iterate `f_{k+1} = T f_k` from `f_0 ≡ α²/2` until successive iterates
/// differ by less than `tol` in the sup norm.
pub fn picard_solve(
    omega: f64,
    beta: f64,
    alpha: f64,
    opts: &PicardOptions,
) -> Result<PicardResult> {
    opts.validate()?;
    check_params(omega, beta, alpha)?;
    let mut current = GridFunction::constant(opts.horizon, opts.intervals, 0.5 * alpha * alpha)?;
    let mut log = Vec::new();
    for _ in 0..opts.max_iter {
        let next = apply_t(&current, omega, beta, alpha)?;
        let diff = next.sup_distance(&current)?;
        log.push(diff);
        current = next;
        if !diff.is_finite() {
            break;
        }
        if diff < opts.tol {
            return Ok(PicardResult {
                solution: current,
                log,
            });
        }
    }
    Err(Error::NonConvergence {
        iterations: log.len(),
        last_diff: log.last().copied().unwrap_or(f64::NAN),
    })
}

/// End of the interval on which the order-interval argument runs,
/// `min{1/2, √ω/β}`.
pub fn s_star(omega: f64, beta: f64) -> f64 {
    0.5f64.min(omega.sqrt() / beta)
}

/// The barriers `u₀ = s²/6` and `v₀ = s²/2` on `N` intervals of `[0, s*]`.
pub fn barriers(omega: f64, beta: f64, intervals: usize) -> Result<(GridFunction, GridFunction)> {
    let end = s_star(omega, beta);
    Ok((
        GridFunction::from_fn(end, intervals, |s| s * s / 6.0)?,
        GridFunction::from_fn(end, intervals, |s| s * s / 2.0)?,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderIntervalReport {
    pub s_star: f64,
    /// `min_k (T v₀ − u₀)`; nonnegative when `T v₀ ≥ u₀`.
    pub lower_slack: f64,
    /// `min_k (v₀ − T u₀)`; nonnegative when `T u₀ ≤ v₀`.
    pub upper_slack: f64,
    pub holds: bool,
}

/// Check `T v₀ ≥ u₀` and `T u₀ ≤ v₀` nodewise on `[0, s*]` for `α = 0`.
pub fn check_order_interval(
    omega: f64,
    beta: f64,
    intervals: usize,
) -> Result<OrderIntervalReport> {
    let (lower, upper) = barriers(omega, beta, intervals)?;
    let t_upper = apply_t(&upper, omega, beta, 0.0)?;
    let t_lower = apply_t(&lower, omega, beta, 0.0)?;
    let min_gap = |a: &GridFunction, b: &GridFunction| {
        a.values
            .iter()
            .zip(&b.values)
            .map(|(x, y)| x - y)
            .fold(f64::INFINITY, f64::min)
    };
    let lower_slack = min_gap(&t_upper, &lower);
    let upper_slack = min_gap(&upper, &t_lower);
    Ok(OrderIntervalReport {
        s_star: lower.horizon(),
        lower_slack,
        upper_slack,
        holds: lower_slack >= -ORDER_SLACK && upper_slack >= -ORDER_SLACK,
    })
}

/// True when `u₀ ≤ f ≤ v₀` nodewise, within `slack`.
pub fn in_order_interval(f: &GridFunction, slack: f64) -> bool {
    f.nodes()
        .zip(&f.values)
        .all(|(s, &v)| v >= s * s / 6.0 - slack && v <= s * s / 2.0 + slack)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub lambda: f64,
    /// `max_k (T(λf) − λ^{−1/2} T f)`; the inequality holds when this is at
    /// most `1e-12`.
    pub max_violation: f64,
    pub holds: bool,
    /// Whether `f` satisfied the precondition `u₀ ≤ f ≤ v₀`.
    pub in_order_interval: bool,
}

/// Check `T(λf) ≤ λ^{−1/2} T f` nodewise for `α = 0` and `λ ∈ (0, 1)`.
///
/// `f` should lie in the order interval on `[0, s*]`; the report records
/// whether it does rather than refusing to run.
pub fn check_scaling_inequality(
    f: &GridFunction,
    lambda: f64,
    omega: f64,
    beta: f64,
) -> Result<ScalingReport> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::domain(
            "lambda",
            format!("must lie in (0, 1), got {lambda}"),
        ));
    }
    let scaled = apply_t(&f.scaled(lambda), omega, beta, 0.0)?;
    let bound = apply_t(f, omega, beta, 0.0)?.scaled(lambda.sqrt().recip());
    let max_violation = scaled
        .values
        .iter()
        .zip(&bound.values)
        .map(|(a, b)| a - b)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(ScalingReport {
        lambda,
        max_violation,
        holds: max_violation <= SCALING_SLACK,
        in_order_interval: in_order_interval(f, 1e-15),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(GridFunction::new(0.1, vec![0.0, 1.0]).is_err());
        assert!(GridFunction::new(0.0, vec![0.0; 3]).is_err());
        assert!(GridFunction::new(0.1, vec![0.0, f64::NAN, 1.0]).is_err());
        let g = GridFunction::constant(2.0, 4, 0.5).unwrap();
        assert_eq!(g.horizon(), 2.0);
        assert_eq!(g.nodes().collect::<Vec<_>>(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
    }

    #[test]
    fn equilibrium_is_a_fixed_point() {
        let f = GridFunction::constant(10.0, 64, 0.5).unwrap();
        let tf = apply_t(&f, 0.7, 0.6, 1.0).unwrap();
        assert!(tf.values().iter().all(|&v| v == 0.5));
        let r = picard_solve(0.7, 0.6, 1.0, &PicardOptions::new(10.0)).unwrap();
        assert_eq!(r.iterations(), 1);
        assert_eq!(r.final_diff(), 0.0);
    }

    #[test]
    fn recursion_matches_direct_sum() {
        let f =
            GridFunction::from_fn(5.0, 300, |s| 0.3 * s * (1.0 + (2.0 * s).sin()).abs()).unwrap();
        for (omega, beta, alpha) in [(1.0, 1.0, 0.0), (0.1, 0.5, 0.3), (4.0, 0.2, 1.4)] {
            let fast = apply_t(&f, omega, beta, alpha).unwrap();
            let slow = apply_t_direct(&f, omega, beta, alpha).unwrap();
            assert_eq!(fast.values()[0], 0.5 * alpha * alpha);
            assert!(fast.sup_distance(&slow).unwrap() < 1e-12);
        }
    }

    #[test]
    fn zero_input_matches_closed_form_kernel_integral() {
        let (omega, beta): (f64, f64) = (1.0, 1.0);
        let c = omega.sqrt() / beta;
        let f = GridFunction::constant(0.5, 1000, 0.0).unwrap();
        let tf = apply_t(&f, omega, beta, 0.0).unwrap();
        for (k, s) in f.nodes().enumerate() {
            let exact = s + c * (-s / c).exp_m1();
            assert!((tf.values()[k] - exact).abs() < 1e-8);
        }
    }

    #[test]
    fn order_interval_and_monotonicity() {
        for (omega, beta) in [(1.0, 1.0), (0.1, 0.5), (4.0, 1.0)] {
            let report = check_order_interval(omega, beta, 512).unwrap();
            assert!(report.holds, "{report:?}");
            let (lower, upper) = barriers(omega, beta, 512).unwrap();
            let t_lower = apply_t(&lower, omega, beta, 0.0).unwrap();
            let t_upper = apply_t(&upper, omega, beta, 0.0).unwrap();
            for (a, b) in t_lower.values().iter().zip(t_upper.values()) {
                assert!(a >= b);
            }
        }
    }

    #[test]
    fn scaling_inequality_anchors() {
        let (_, v0) = barriers(1.0, 1.0, 512).unwrap();
        assert!(
            check_scaling_inequality(&v0, 0.999999, 1.0, 1.0)
                .unwrap()
                .max_violation
                <= 1e-9
        );
        assert!(check_scaling_inequality(&v0, 0.25, 1.0, 1.0).unwrap().holds);
        let (u0, _) = barriers(4.0, 1.0, 512).unwrap();
        let report = check_scaling_inequality(&u0, 0.5, 4.0, 1.0).unwrap();
        assert!(report.holds && report.in_order_interval);
        assert!(check_scaling_inequality(&u0, 1.0, 4.0, 1.0).is_err());
    }

    #[test]
    fn non_convergence_is_reported() {
        let opts = PicardOptions::new(10.0).max_iter(3);
        match picard_solve(1.0, 1.0, 0.0, &opts) {
            Err(Error::NonConvergence {
                iterations,
                last_diff,
            }) => {
                assert_eq!(iterations, 3);
                assert!(last_diff > 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn csv_layout() {
        let g = GridFunction::constant(1.0, 2, 0.25).unwrap();
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("s,u\n0.0000000000000000e0,2.5000000000000000e-1\n"));
        assert_eq!(text.lines().count(), 4);
    }
}
