//! Stability of the equilibrium `(u, v) = (1/2, 0)`.
//!
//! Linear analysis classifies the critical point from the spectrum of
//!
//! ```text
//! A = [ 0   1      ]
//!     [ -1  -β/√ω  ]
//! ```
//!
//! and the nonlinear picture comes from the Lyapunov function
//! `V(u, v) = ½v² − u + (2√2/3)u^{3/2} + 1/6`, whose sublevel set through the
//! initial state is forward invariant.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrate::Trajectory;
use crate::params::ALPHA_MAX;

/// `|1 − 4ω/β²|` at or below this counts as the degenerate (inflected) node.
pub const INFLECTED_TOL: f64 = 1e-12;

/// Distance from `u = 1/2` inside which `V` is evaluated in factored form.
pub const FACTORED_BAND: f64 = 1e-3;

/// `classify_approach` needs `|u(S) − 1/2|` below this.
pub const SETTLED_TOL: f64 = 1e-4;

/// Slack allowed when testing monotonicity of a sampled trajectory.
pub const MONOTONE_TOL: f64 = 1e-9;

/// Allowed excursion of `V` above the basin level along a trajectory.
pub const BASIN_EXCESS_TOL: f64 = 1e-8;

const TWO_SQRT2_OVER_3: f64 = 2.0 * SQRT_2 / 3.0;

/// `E(u, v) = ½v² − u + (2√2/3)u^{3/2}`, for `u ≥ 0`.
#[inline]
pub fn energy(u: f64, v: f64) -> f64 {
    0.5 * v * v - u + TWO_SQRT2_OVER_3 * u * u.sqrt()
}

/// `V` written as `½v² + (2√2/3)(√u − 1/√2)²(√u + 1/(2√2))`; exact zero at the
/// equilibrium and free of cancellation near it.
#[inline]
pub fn lyapunov_factored(u: f64, v: f64) -> f64 {
    let r = u.sqrt();
    let d = r - FRAC_1_SQRT_2;
    0.5 * v * v + TWO_SQRT2_OVER_3 * d * d * (r + 0.5 * FRAC_1_SQRT_2)
}

/// `V(u, v) = E(u, v) + 1/6` for `u ≥ 0`, switching to the factored form near
/// `u = 1/2`.
#[inline]
pub fn lyapunov_value(u: f64, v: f64) -> f64 {
    if (u - 0.5).abs() < FACTORED_BAND {
        lyapunov_factored(u, v)
    } else {
        energy(u, v) + 1.0 / 6.0
    }
}

/// Energy and Lyapunov value `(E, V)` at a phase point.
pub fn lyapunov(u: f64, v: f64) -> Result<(f64, f64)> {
    if !(u >= 0.0) {
        return Err(Error::domain("u", format!("must be >= 0, got {u}")));
    }
    Ok((energy(u, v), lyapunov_value(u, v)))
}

/// Exact rate `dV/ds = −(β/√ω) v²` along solutions.
pub fn lyapunov_rate(v: f64, omega: f64, beta: f64) -> f64 {
    -(beta / omega.sqrt()) * v * v
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CriticalPointKind {
    StableNode,
    StableSpiral,
    StableInflectedNode,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub omega: f64,
    pub beta: f64,
    #[serde(with = "complex_serde")]
    pub lambda1: Complex64,
    #[serde(with = "complex_serde")]
    pub lambda2: Complex64,
    pub kind: CriticalPointKind,
    pub omega_star: f64,
    pub discriminant: f64,
}

impl StabilityReport {
    /// Eigenvector `(1, λ)` of the linearization for the given eigenvalue.
    pub fn eigenvector(lambda: Complex64) -> [Complex64; 2] {
        [Complex64::new(1.0, 0.0), lambda]
    }

    /// Decay rate of the slowest linear mode, `min |Re λ|`.
    pub fn slowest_rate(&self) -> f64 {
        self.lambda1.re.abs().min(self.lambda2.re.abs())
    }
}

mod complex_serde {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Parts {
        re: f64,
        im: f64,
    }

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        Parts { re: z.re, im: z.im }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let p = Parts::deserialize(d)?;
        Ok(Complex64::new(p.re, p.im))
    }
}

/// Eigenvalues `λ₁,₂ = −β/(2√ω)(1 ± √(1 − 4ω/β²))` and the type of the
/// critical point.
pub fn linearize(omega: f64, beta: f64) -> Result<StabilityReport> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::domain("omega", format!("must be > 0, got {omega}")));
    }
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::domain("beta", format!("must be > 0, got {beta}")));
    }
    let half_damping = beta / (2.0 * omega.sqrt());
    let discriminant = 1.0 - 4.0 * omega / (beta * beta);
    let (kind, lambda1, lambda2) = if discriminant.abs() <= INFLECTED_TOL {
        let l = Complex64::new(-half_damping, 0.0);
        (CriticalPointKind::StableInflectedNode, l, l)
    } else if discriminant > 0.0 {
        let root = discriminant.sqrt();
        (
            CriticalPointKind::StableNode,
            Complex64::new(-half_damping * (1.0 + root), 0.0),
            Complex64::new(-half_damping * (1.0 - root), 0.0),
        )
    } else {
        let im = half_damping * (-discriminant).sqrt();
        (
            CriticalPointKind::StableSpiral,
            Complex64::new(-half_damping, im),
            Complex64::new(-half_damping, -im),
        )
    };
    Ok(StabilityReport {
        omega,
        beta,
        lambda1,
        lambda2,
        kind,
        omega_star: beta * beta / 4.0,
        discriminant,
    })
}

/// Horizon after which the linear envelope has decayed below `distance`
/// relative to an order-one start. Used wherever a run must settle.
pub fn settling_horizon(omega: f64, beta: f64, distance: f64) -> Result<f64> {
    let report = linearize(omega, beta)?;
    Ok(((1.0 / distance).ln() + 10.0) / report.slowest_rate())
}

/// Basin constants for an initial-height ratio `α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasinSpec {
    pub alpha: f64,
    /// Level of `V` through the initial state `(α²/2, 0)`.
    #[serde(rename = "C")]
    pub level: f64,
    pub u_min: f64,
    pub u_max: f64,
}

impl BasinSpec {
    pub fn contains(&self, u: f64, v: f64) -> bool {
        u >= 0.0 && lyapunov_value(u, v) <= self.level
    }

    /// Largest `|V(u, 0) − C|` over the two bounds.
    pub fn residual(&self) -> f64 {
        (level_function(self.u_min) - self.level)
            .abs()
            .max((level_function(self.u_max) - self.level).abs())
    }
}

/// `−u + (2√2/3)u^{3/2} + 1/6`, i.e. `V(u, 0)`.
pub fn level_function(u: f64) -> f64 {
    lyapunov_factored(u, 0.0)
}

/// Basin level `C(α) = −½α² + (2√2/3)(α²/2)^{3/2} + 1/6`, evaluated as
/// `(α − 1)²(2α + 1)/6`.
pub fn basin_level(alpha: f64) -> f64 {
    (alpha - 1.0).powi(2) * (2.0 * alpha + 1.0) / 6.0
}

pub fn basin(alpha: f64) -> Result<BasinSpec> {
    if !(alpha.is_finite() && (0.0..=ALPHA_MAX).contains(&alpha)) {
        return Err(Error::domain(
            "alpha",
            format!("must lie in [0, {ALPHA_MAX}], got {alpha}"),
        ));
    }
    let start = 0.5 * alpha * alpha;
    // (9/8)(1/2 − α/3 + √D/6)² with the factor 6 pulled out, which keeps the
    // anchors α ∈ {0, 1, 3/2} exact.
    let disc = (9.0 + 12.0 * alpha - 12.0 * alpha * alpha).max(0.0);
    let other = (3.0 - 2.0 * alpha + disc.sqrt()).powi(2) / 32.0;
    let (u_min, u_max) = if alpha <= 1.0 {
        (start, other)
    } else {
        (other, start)
    };
    Ok(BasinSpec {
        alpha,
        level: basin_level(alpha),
        u_min,
        u_max,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Approach {
    Monotone,
    Oscillatory,
    AtEquilibrium,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproachEvidence {
    pub approach: Approach,
    pub crossings: Vec<f64>,
    pub final_distance: f64,
}

fn is_monotone(values: impl Iterator<Item = f64> + Clone, tol: f64) -> bool {
    let mut it = values.clone();
    let (first, last) = match (it.next(), values.last()) {
        (Some(a), Some(b)) => (a, b),
        _ => return true,
    };
    let dir = if last >= first { 1.0 } else { -1.0 };
    let mut prev = first;
    for x in it {
        if (x - prev) * dir < -tol {
            return false;
        }
        prev = x;
    }
    true
}

/// Decide whether a settled trajectory approached the equilibrium
/// monotonically or by oscillating about it.
///
/// Exactly one crossing, or a non-monotone path without crossings, is reported
/// as [`Error::Inconclusive`]: the horizon is too short or `ω` sits too close to
/// `ω*` for the dichotomy to be read off numerically.
pub fn classify_approach(traj: &Trajectory) -> Result<ApproachEvidence> {
    let first = traj.samples.first().expect("trajectory has samples");
    let last = traj.samples.last().expect("trajectory has samples");
    let final_distance = last.state().distance_to_equilibrium();
    let crossings: Vec<f64> = traj.crossings.iter().map(|c| c.s).collect();
    if first.u == 0.5 && first.v == 0.0 {
        return Ok(ApproachEvidence {
            approach: Approach::AtEquilibrium,
            crossings,
            final_distance,
        });
    }
    if !((last.u - 0.5).abs() < SETTLED_TOL) {
        return Err(Error::Inconclusive(format!(
            "|u(S) - 1/2| = {:e} is not below {SETTLED_TOL:e}; extend the horizon",
            (last.u - 0.5).abs()
        )));
    }
    let approach = match crossings.len() {
        0 if is_monotone(traj.samples.iter().skip(1).map(|s| s.u), MONOTONE_TOL) => {
            Approach::Monotone
        }
        0 => {
            return Err(Error::Inconclusive(
                "no equilibrium crossings but u is not monotone".into(),
            ))
        }
        1 => {
            return Err(Error::Inconclusive(format!(
                "exactly one crossing at s = {}",
                crossings[0]
            )))
        }
        _ => Approach::Oscillatory,
    };
    Ok(ApproachEvidence {
        approach,
        crossings,
        final_distance,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub level: f64,
    pub initial_value: f64,
    pub initial_in_basin: bool,
    /// `max V − C` over the samples.
    pub max_excess: f64,
    /// Largest sample-to-sample increase of `V` (zero when nonincreasing).
    pub max_increase: f64,
    pub final_distance: f64,
    pub forward_invariant: bool,
}

/// Check a computed trajectory against the basin it starts in.
pub fn audit_trajectory(traj: &Trajectory, basin: &BasinSpec) -> AuditReport {
    let initial_value = traj.samples[0].lyapunov;
    let max_excess = traj
        .samples
        .iter()
        .map(|s| s.lyapunov - basin.level)
        .fold(f64::NEG_INFINITY, f64::max);
    let max_increase = traj
        .samples
        .windows(2)
        .map(|w| w[1].lyapunov - w[0].lyapunov)
        .fold(0.0, f64::max);
    let final_distance = traj
        .samples
        .last()
        .expect("trajectory has samples")
        .state()
        .distance_to_equilibrium();
    AuditReport {
        level: basin.level,
        initial_value,
        initial_in_basin: initial_value <= basin.level + 1e-12,
        max_excess,
        max_increase,
        final_distance,
        forward_invariant: max_excess <= BASIN_EXCESS_TOL,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lyapunov_anchor_values() {
        let (e, v) = lyapunov(0.5, 0.0).unwrap();
        assert!((e + 1.0 / 6.0).abs() < 1e-16);
        assert_eq!(v, 0.0);
        assert_eq!(lyapunov(0.0, 0.0).unwrap(), (0.0, 1.0 / 6.0));
        let (e, v) = lyapunov(9.0 / 8.0, 0.0).unwrap();
        assert!(e.abs() < 1e-15, "{e}");
        assert!((v - 1.0 / 6.0).abs() < 1e-15);
        assert!(lyapunov(-1e-3, 0.0).is_err());
    }

    #[test]
    fn inflected_node_at_critical_omega() {
        let r = linearize(0.25, 1.0).unwrap();
        assert_eq!(r.kind, CriticalPointKind::StableInflectedNode);
        assert!((r.lambda1 - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        assert!((r.lambda2 - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        let ev = StabilityReport::eigenvector(r.lambda1);
        assert_eq!(ev[1].re / ev[0].re, -1.0);
    }

    #[test]
    fn spiral_and_node() {
        let r = linearize(1.0, 1.0).unwrap();
        assert_eq!(r.kind, CriticalPointKind::StableSpiral);
        let half_sqrt3 = 3f64.sqrt() / 2.0;
        assert!((r.lambda1 - Complex64::new(-0.5, half_sqrt3)).norm() < 1e-15);
        assert!((r.lambda2 - Complex64::new(-0.5, -half_sqrt3)).norm() < 1e-15);

        let r = linearize(0.125, 1.0).unwrap();
        assert_eq!(r.kind, CriticalPointKind::StableNode);
        assert!((r.lambda1.re + 2.414_213_562_373_095).abs() < 1e-7);
        assert!((r.lambda2.re + 0.414_213_562_373_095_1).abs() < 1e-7);
        assert_eq!(r.lambda1.im, 0.0);
    }

    #[test]
    fn linearize_rejects_nonpositive() {
        assert!(linearize(0.0, 1.0).is_err());
        assert!(linearize(1.0, -0.1).is_err());
    }

    #[test]
    fn basin_anchors() {
        let b = basin(0.0).unwrap();
        assert_eq!((b.level, b.u_min, b.u_max), (1.0 / 6.0, 0.0, 9.0 / 8.0));
        let b = basin(1.0).unwrap();
        assert_eq!((b.level, b.u_min, b.u_max), (0.0, 0.5, 0.5));
        let b = basin(1.5).unwrap();
        assert!((b.level - 1.0 / 6.0).abs() < 1e-16);
        assert_eq!((b.u_min, b.u_max), (0.0, 9.0 / 8.0));
        assert!(basin(1.6).is_err());
        assert!(basin(-0.1).is_err());
    }

    #[test]
    fn basin_level_matches_the_unsimplified_formula() {
        for k in 0..=30 {
            let a = 1.5 * k as f64 / 30.0;
            let u = 0.5 * a * a;
            let direct = -0.5 * a * a + TWO_SQRT2_OVER_3 * u * u.sqrt() + 1.0 / 6.0;
            assert!((basin_level(a) - direct).abs() < 1e-15, "alpha = {a}");
        }
    }

    #[test]
    fn monotone_helper() {
        assert!(is_monotone([0.0, 0.1, 0.2, 0.2].into_iter(), 1e-9));
        assert!(is_monotone([1.0, 0.9, 0.9 + 1e-10].into_iter(), 1e-9));
        assert!(!is_monotone([0.0, 0.3, 0.2, 0.5].into_iter(), 1e-9));
    }
}
