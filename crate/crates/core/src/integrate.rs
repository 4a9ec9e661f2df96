//! Trajectories of the u-form model.
//!
//! [`integrate`] runs the adaptive solver and samples the dense output on a
//! uniform grid. `H`, `T`, `E` and `V` are derived columns computed from
//! `(s, u, v)` at each sample; they are never integrated.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::dynamics::{rhs_u, State};
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::report::fmt17;
use crate::solver::{self, Solution, SolverOptions, Tolerances};
use crate::stability;

pub const MAX_HORIZON: f64 = 1e6;

/// Half-width of the band around `u = 1/2` that a trajectory must leave on
/// the other side before a crossing counts.
pub const CROSSING_HYSTERESIS: f64 = 1e-9;

/// Bisection width for crossing times.
pub const CROSSING_RESOLUTION: f64 = 1e-10;

pub const DEFAULT_SAMPLE_STEP: f64 = 0.01;

pub const CSV_HEADER: &str = "s,u,v,H,T,E,V";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub s: f64,
    pub u: f64,
    pub v: f64,
    #[serde(rename = "H")]
    pub height: f64,
    #[serde(rename = "T")]
    pub time: f64,
    #[serde(rename = "E")]
    pub energy: f64,
    #[serde(rename = "V")]
    pub lyapunov: f64,
}

impl Sample {
    /// Build a sample and its derived columns from `(s, u, v)`.
    pub fn from_state(s: f64, u: f64, v: f64, omega: f64) -> Self {
        let clamped = u.max(0.0);
        Sample {
            s,
            u,
            v,
            height: (2.0 * clamped).sqrt(),
            time: s * omega.sqrt(),
            energy: stability::energy(clamped, v),
            lyapunov: stability::lyapunov_value(clamped, v),
        }
    }

    pub fn state(&self) -> State {
        State::new(self.u, self.v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Up,
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub s: f64,
    pub direction: Direction,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrateOptions {
    pub epsilon: f64,
    pub horizon: f64,
    pub tol: Tolerances,
    pub sample_step: f64,
}

impl IntegrateOptions {
    /// Defaults: no regularization, the parameters' default horizon,
    /// tolerances `1e-10`/`1e-8`, samples every `0.01`.
    pub fn new(params: &ModelParams) -> Self {
        IntegrateOptions {
            epsilon: 0.0,
            horizon: params.default_horizon(),
            tol: Tolerances::default(),
            sample_step: DEFAULT_SAMPLE_STEP,
        }
    }

    pub fn horizon(mut self, horizon: f64) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn tol(mut self, tol: Tolerances) -> Self {
        self.tol = tol;
        self
    }

    pub fn sample_step(mut self, step: f64) -> Self {
        self.sample_step = step;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.horizon > 0.0) || self.horizon.is_nan() {
            return Err(Error::domain(
                "horizon",
                format!("must be > 0, got {}", self.horizon),
            ));
        }
        if self.horizon > MAX_HORIZON {
            return Err(Error::Horizon {
                horizon: self.horizon,
                cap: MAX_HORIZON,
            });
        }
        if !(self.sample_step > 0.0 && self.sample_step.is_finite()) {
            return Err(Error::domain(
                "sample step",
                format!("must be > 0, got {}", self.sample_step),
            ));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::domain(
                "epsilon",
                format!("must be >= 0, got {}", self.epsilon),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub params: ModelParams,
    pub epsilon: f64,
    pub tolerances: Tolerances,
    /// Times where `u` crosses `1/2`.
    pub crossings: Vec<Crossing>,
    pub stats: SolverStats,
    dense: Solution<2>,
}

impl Trajectory {
    pub fn horizon(&self) -> f64 {
        self.dense.t_end
    }

    /// Dense evaluation of the state at any `s` in `[0, S]`.
    pub fn eval(&self, s: f64) -> Option<State> {
        self.dense.eval(s).map(|[u, v]| State::new(u, v))
    }

    pub fn final_state(&self) -> State {
        let [u, v] = self.dense.y_end;
        State::new(u, v)
    }

    pub fn max_u(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.u)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_u(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.u)
            .fold(f64::INFINITY, f64::min)
    }

    /// `max_i |u_i − ũ_i|` against another trajectory on the same sample grid.
    pub fn sup_distance(&self, other: &Trajectory) -> Result<f64> {
        if self.samples.len() != other.samples.len() {
            return Err(Error::domain(
                "trajectory",
                "sample grids differ; use the same horizon and sample step",
            ));
        }
        Ok(self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a.u - b.u).abs())
            .fold(0.0, f64::max))
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{CSV_HEADER}")?;
        for s in &self.samples {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                fmt17(s.s),
                fmt17(s.u),
                fmt17(s.v),
                fmt17(s.height),
                fmt17(s.time),
                fmt17(s.energy),
                fmt17(s.lyapunov)
            )?;
        }
        Ok(())
    }
}

/// Sample times `k·Δs` on `[0, S]`, plus `S` itself when it is not a multiple.
pub fn sample_times(horizon: f64, step: f64) -> Vec<f64> {
    let n = (horizon / step + 1e-9).floor() as usize;
    let mut times: Vec<f64> = (0..=n).map(|k| (k as f64 * step).min(horizon)).collect();
    times.dedup();
    if horizon - times.last().copied().unwrap_or(0.0) > 1e-12 * horizon.max(1.0) {
        times.push(horizon);
    }
    times
}

/// First step used when the run starts at rest at the origin. There
/// `u ≈ s²/2 − (1 + β/√ω)s³/6`, so a step whose cubic term stays within the
/// absolute tolerance resolves the start.
fn seeded_first_step(params: &ModelParams, tol: Tolerances) -> Option<f64> {
    (params.alpha == 0.0).then(|| (6.0 * tol.abs / (1.0 + params.damping())).cbrt())
}

/// Integrate the u-form model from `u(0) = α²/2`, `u'(0) = 0` over `[0, S]`.
pub fn integrate(params: &ModelParams, opts: &IntegrateOptions) -> Result<Trajectory> {
    opts.validate()?;
    let (omega, beta, eps) = (params.omega, params.beta, opts.epsilon);
    let solver_opts = SolverOptions {
        tol: opts.tol,
        first_step: seeded_first_step(params, opts.tol),
        ..Default::default()
    };
    let dense = solver::solve(
        |_, y: &[f64; 2]| {
            let d = rhs_u(State::new(y[0], y[1]), omega, beta, eps);
            [d.du, d.dv]
        },
        0.0,
        [params.u0(), 0.0],
        opts.horizon,
        &solver_opts,
    )?;

    let samples = sample_times(opts.horizon, opts.sample_step)
        .into_iter()
        .map(|s| {
            let [u, v] = dense
                .eval(s)
                .expect("sample time lies on the solved interval");
            Sample::from_state(s, u, v, omega)
        })
        .collect();

    let stats = SolverStats {
        accepted: dense.accepted,
        rejected: dense.rejected,
        evaluations: dense.evaluations,
    };
    let mut traj = Trajectory {
        samples,
        params: *params,
        epsilon: eps,
        tolerances: opts.tol,
        crossings: Vec::new(),
        stats,
        dense,
    };
    traj.crossings = detect_crossings(&traj, 0.5);
    Ok(traj)
}

/// Times where `u − level` changes sign, with hysteresis.
///
/// The dense output is scanned at the step endpoints and four interior points
/// per step. A crossing is recorded once the trajectory leaves the band
/// `|u − level| ≤ 1e-9` on the side opposite to where it last left it; its
/// time is then refined by bisection on the dense output.
pub fn detect_crossings(traj: &Trajectory, level: f64) -> Vec<Crossing> {
    const SUBDIVISIONS: usize = 4;
    let g = |s: f64| traj.dense.eval(s).map(|y| y[0] - level).unwrap_or(0.0);

    let mut scan: Vec<(f64, f64)> =
        Vec::with_capacity(SUBDIVISIONS * traj.dense.segments.len() + 1);
    for seg in &traj.dense.segments {
        for k in 0..SUBDIVISIONS {
            let s = seg.t0 + seg.h * k as f64 / SUBDIVISIONS as f64;
            scan.push((s, seg.eval(s)[0] - level));
        }
    }
    scan.push((traj.dense.t_end, traj.dense.y_end[0] - level));

    let mut crossings = Vec::new();
    // Side of the band last left, and the latest scan point outside it.
    let mut side: Option<bool> = None;
    let mut anchor = 0.0;
    for (s, value) in scan {
        if value.abs() <= CROSSING_HYSTERESIS {
            continue;
        }
        let above = value > 0.0;
        if side == Some(!above) {
            crossings.push(Crossing {
                s: bisect(&g, anchor, s),
                direction: if above {
                    Direction::Up
                } else {
                    Direction::Down
                },
            });
        }
        side = Some(above);
        anchor = s;
    }
    crossings
}

fn bisect(g: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut ga = g(a);
    while b - a > CROSSING_RESOLUTION {
        let m = 0.5 * (a + b);
        let gm = g(m);
        if gm == 0.0 {
            return m;
        }
        if (gm > 0.0) == (ga > 0.0) {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DependenceRow {
    pub alpha: f64,
    pub delta_alpha: f64,
    pub sup_distance: f64,
}

/// Sup-norm distance of `u_α` from `u_{α₀}` for each `α` in `alphas`, all
/// runs sharing `opts` (horizon, tolerances and sample grid).
pub fn continuous_dependence(
    omega: f64,
    beta: f64,
    alpha0: f64,
    alphas: &[f64],
    opts: &IntegrateOptions,
) -> Result<Vec<DependenceRow>> {
    let reference = integrate(&ModelParams::new(omega, beta, alpha0)?, opts)?;
    alphas
        .iter()
        .map(|&alpha| {
            let run = integrate(&ModelParams::new(omega, beta, alpha)?, opts)?;
            Ok(DependenceRow {
                alpha,
                delta_alpha: (alpha - alpha0).abs(),
                sup_distance: run.sup_distance(&reference)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(omega: f64, beta: f64, alpha: f64) -> ModelParams {
        ModelParams::new(omega, beta, alpha).unwrap()
    }

    #[test]
    fn sample_grid() {
        assert_eq!(sample_times(1.0, 0.25), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(sample_times(1.0, 0.3).last(), Some(&1.0));
        let t = sample_times(30.0, 0.01);
        assert_eq!(t.len(), 3001);
        assert!(t.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn equilibrium_start_stays_put() {
        let p = params(0.7, 0.4, 1.0);
        let traj = integrate(&p, &IntegrateOptions::new(&p).horizon(50.0)).unwrap();
        assert!(traj.samples.iter().all(|s| s.u == 0.5 && s.v == 0.0));
        assert!(traj.crossings.is_empty());
    }

    #[test]
    fn first_sample_and_derived_columns() {
        let p = params(1.0, 1.0, 0.0);
        let traj = integrate(&p, &IntegrateOptions::new(&p).horizon(30.0)).unwrap();
        let first = traj.samples[0];
        assert_eq!(
            (first.s, first.u, first.v, first.height, first.time),
            (0.0, 0.0, 0.0, 0.0, 0.0)
        );
        assert_eq!(first.energy, 0.0);
        assert_eq!(first.lyapunov, 1.0 / 6.0);
        for s in &traj.samples {
            let again = Sample::from_state(s.s, s.u, s.v, p.omega);
            assert_eq!(*s, again);
        }
        assert!((traj.final_state().u - 0.5).abs() < 1e-6);
    }

    #[test]
    fn crossings_alternate_in_direction() {
        let p = params(1.0, 1.0, 0.0);
        let traj = integrate(&p, &IntegrateOptions::new(&p).horizon(50.0)).unwrap();
        assert!(traj.crossings.len() >= 2);
        assert_eq!(traj.crossings[0].direction, Direction::Up);
        for w in traj.crossings.windows(2) {
            assert_ne!(w[0].direction, w[1].direction);
            assert!(w[1].s > w[0].s);
        }
        for c in &traj.crossings {
            let u = traj.eval(c.s).unwrap().u;
            assert!((u - 0.5).abs() < 1e-9, "u = {u} at s = {}", c.s);
        }
    }

    #[test]
    fn subcritical_run_has_no_crossings() {
        let p = params(0.1, 1.0, 0.0);
        let traj = integrate(&p, &IntegrateOptions::new(&p).horizon(50.0)).unwrap();
        assert!(traj.crossings.is_empty());
    }

    #[test]
    fn horizon_cap_and_bad_options() {
        let p = params(1.0, 1.0, 0.0);
        assert!(matches!(
            integrate(&p, &IntegrateOptions::new(&p).horizon(2e6)),
            Err(Error::Horizon { .. })
        ));
        assert!(integrate(&p, &IntegrateOptions::new(&p).sample_step(0.0)).is_err());
        assert!(integrate(&p, &IntegrateOptions::new(&p).epsilon(-1.0)).is_err());
    }

    #[test]
    fn csv_layout() {
        let p = params(1.0, 1.0, 0.0);
        let traj = integrate(&p, &IntegrateOptions::new(&p).horizon(1.0).sample_step(0.5)).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.split('\n').collect();
        assert_eq!(lines[0], "s,u,v,H,T,E,V");
        assert_eq!(lines.len(), 5); // header, three rows, trailing empty
        assert!(!text.contains('\r'));
        let first: Vec<f64> = lines[1].split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(&first[..6], &[0.0; 6]);
        assert_eq!(first[6], 1.0 / 6.0);
    }
}
