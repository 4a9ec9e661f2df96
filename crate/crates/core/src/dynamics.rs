//! Right-hand sides of the model and of its reduced regimes.
//!
//! Everything that gets integrated is written in the transformed coordinate
//! `u = H²/2` with time `s = T/√ω`, where the equation reads
//!
//! ```text
//! u'' + (β/√ω) u' + √(2[u]₊ + ε) = 1
//! ```
//!
//! The height form is kept for cross-checks and output only; it is singular at
//! `H = 0`.

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stability;

/// Heights at or below this are treated as the singular point of the H-form.
pub const H_SINGULAR: f64 = 1e-12;

/// Negative excursions of `ũ` tolerated (and clamped) by the checked regime
/// right-hand side.
pub const NEGATIVE_U_TOLERANCE: f64 = 1e-12;

/// A point in the `(u, v = u')` phase plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub u: f64,
    pub v: f64,
}

impl State {
    pub const EQUILIBRIUM: State = State { u: 0.5, v: 0.0 };

    pub fn new(u: f64, v: f64) -> Self {
        State { u, v }
    }

    /// Companion height `H = √(2u)`, with negative round-off clamped to zero.
    pub fn height(&self) -> f64 {
        (2.0 * self.u.max(0.0)).sqrt()
    }

    pub fn distance_to_equilibrium(&self) -> f64 {
        (self.u - 0.5).hypot(self.v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateDerivative {
    pub du: f64,
    pub dv: f64,
}

/// Right-hand side of the (optionally regularized) u-form system.
///
/// Total on ℝ² for `ω, β > 0` and `ε ≥ 0`: the square root sees `max(u, 0)`.
#[inline]
pub fn rhs_u(state: State, omega: f64, beta: f64, epsilon: f64) -> StateDerivative {
    StateDerivative {
        du: state.v,
        dv: 1.0 - (beta / omega.sqrt()) * state.v - (2.0 * state.u.max(0.0) + epsilon).sqrt(),
    }
}

/// `H''` from the dimensionless height equation
/// `ω(HH')' + βHH' + H = 1`, i.e. `[1 − H − βHH' − ωH'²] / (ωH)`.
pub fn rhs_h(height: f64, height_rate: f64, omega: f64, beta: f64) -> Result<f64> {
    if !(height > H_SINGULAR) {
        return Err(Error::Singularity { height });
    }
    Ok(
        (1.0 - height - beta * height * height_rate - omega * height_rate * height_rate)
            / (omega * height),
    )
}

/// Which physical mechanism a reduced model drops.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegimeCase {
    /// `(h h')' + β h h' = 1`
    NegligibleGravity,
    /// `β h h' + h = 1`
    NegligibleInertia,
    /// `β h h' = 1`
    NegligibleGravityInertia,
    /// `(h h')' + h = 1`
    NegligibleViscosity,
}

impl RegimeCase {
    pub const ALL: [RegimeCase; 4] = [
        RegimeCase::NegligibleGravity,
        RegimeCase::NegligibleInertia,
        RegimeCase::NegligibleGravityInertia,
        RegimeCase::NegligibleViscosity,
    ];

    /// Case number 1–4 in the usual ordering.
    pub fn number(self) -> u8 {
        match self {
            RegimeCase::NegligibleGravity => 1,
            RegimeCase::NegligibleInertia => 2,
            RegimeCase::NegligibleGravityInertia => 3,
            RegimeCase::NegligibleViscosity => 4,
        }
    }

    pub fn from_number(n: u8) -> Result<Self> {
        RegimeCase::ALL
            .into_iter()
            .find(|c| c.number() == n)
            .ok_or_else(|| Error::domain("case", format!("expected 1..=4, got {n}")))
    }

    /// Whether the reduced equation keeps the inertial term.
    pub fn is_second_order(self) -> bool {
        matches!(
            self,
            RegimeCase::NegligibleGravity | RegimeCase::NegligibleViscosity
        )
    }
}

impl std::str::FromStr for RegimeCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "1" | "negligiblegravity" | "gravity" => Ok(RegimeCase::NegligibleGravity),
            "2" | "negligibleinertia" | "inertia" => Ok(RegimeCase::NegligibleInertia),
            "3" | "negligiblegravityinertia" | "gravityinertia" | "washburn" => {
                Ok(RegimeCase::NegligibleGravityInertia)
            }
            "4" | "negligibleviscosity" | "viscosity" => Ok(RegimeCase::NegligibleViscosity),
            _ => Err(Error::domain("case", format!("unknown regime {s:?}"))),
        }
    }
}

/// Power-law scaling `t̂ = ω^a`, `ĥ = ω^b` under which a regime balances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegimeExponents {
    Fixed {
        a: Rational64,
        b: Rational64,
    },
    /// One-parameter family `a = 2b` with `a ∈ (0, 1)`, `b ∈ (0, 1/2)`.
    Family {
        a_over_b: Rational64,
        a_open: (Rational64, Rational64),
        b_open: (Rational64, Rational64),
    },
}

pub fn regime_exponents(case: RegimeCase) -> RegimeExponents {
    let r = Rational64::new;
    match case {
        RegimeCase::NegligibleGravity => RegimeExponents::Fixed {
            a: r(1, 1),
            b: r(1, 2),
        },
        RegimeCase::NegligibleInertia => RegimeExponents::Fixed {
            a: r(0, 1),
            b: r(0, 1),
        },
        RegimeCase::NegligibleGravityInertia => RegimeExponents::Family {
            a_over_b: r(2, 1),
            a_open: (r(0, 1), r(1, 1)),
            b_open: (r(0, 1), r(1, 2)),
        },
        RegimeCase::NegligibleViscosity => RegimeExponents::Fixed {
            a: r(1, 2),
            b: r(0, 1),
        },
    }
}

/// A regime together with concrete scaling exponents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegimeSpec {
    pub case: RegimeCase,
    pub a: Rational64,
    pub b: Rational64,
}

impl RegimeSpec {
    /// Spec for a case with fixed exponents. Case 3 needs [`RegimeSpec::family`].
    pub fn new(case: RegimeCase) -> Result<Self> {
        match regime_exponents(case) {
            RegimeExponents::Fixed { a, b } => Ok(RegimeSpec { case, a, b }),
            RegimeExponents::Family { .. } => Err(Error::domain(
                "case",
                "negligible gravity and inertia is a one-parameter family; use RegimeSpec::family",
            )),
        }
    }

    /// Member of the Case-3 family with height exponent `b ∈ (0, 1/2)`.
    pub fn family(b: Rational64) -> Result<Self> {
        let a = b * 2;
        if a <= Rational64::from_integer(0) || a >= Rational64::from_integer(1) {
            return Err(Error::domain("b", format!("need 0 < b < 1/2, got {b}")));
        }
        Ok(RegimeSpec {
            case: RegimeCase::NegligibleGravityInertia,
            a,
            b,
        })
    }

    /// The member used when a caller does not care which one.
    pub fn default_for(case: RegimeCase) -> Self {
        match case {
            RegimeCase::NegligibleGravityInertia => {
                RegimeSpec::family(Rational64::new(1, 4)).expect("1/4 is inside the family")
            }
            c => RegimeSpec::new(c).expect("fixed exponents"),
        }
    }

    pub fn is_valid(&self) -> bool {
        match regime_exponents(self.case) {
            RegimeExponents::Fixed { a, b } => self.a == a && self.b == b,
            RegimeExponents::Family {
                a_over_b,
                a_open,
                b_open,
            } => {
                self.a == self.b * a_over_b
                    && self.a > a_open.0
                    && self.a < a_open.1
                    && self.b > b_open.0
                    && self.b < b_open.1
            }
        }
    }
}

/// Derivative of a reduced model in `ũ = (h*)²/2` coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegimeDerivative {
    /// `dũ/dt*` for the first-order cases; the rate slot of the state is unused.
    FirstOrder(f64),
    SecondOrder(StateDerivative),
}

/// Unchecked regime right-hand side used inside the integrator; `ũ` is clamped
/// at zero under square roots.
#[inline]
pub(crate) fn regime_rhs_total(case: RegimeCase, state: State, beta: f64) -> RegimeDerivative {
    let root = (2.0 * state.u.max(0.0)).sqrt();
    match case {
        RegimeCase::NegligibleGravity => RegimeDerivative::SecondOrder(StateDerivative {
            du: state.v,
            dv: 1.0 - beta * state.v,
        }),
        RegimeCase::NegligibleInertia => RegimeDerivative::FirstOrder((1.0 - root) / beta),
        RegimeCase::NegligibleGravityInertia => RegimeDerivative::FirstOrder(1.0 / beta),
        RegimeCase::NegligibleViscosity => RegimeDerivative::SecondOrder(StateDerivative {
            du: state.v,
            dv: 1.0 - root,
        }),
    }
}

/// Right-hand side of a reduced model.
///
/// Cases 2 and 3 are first order; `state.v` is ignored for them. Cases 2 and 4
/// take a square root of `ũ`: round-off below zero is clamped, anything more
/// negative than [`NEGATIVE_U_TOLERANCE`] is a domain error.
pub fn rhs_regime(spec: &RegimeSpec, state: State, beta: f64) -> Result<RegimeDerivative> {
    if !spec.is_valid() {
        return Err(Error::domain("spec", format!("invalid exponents {spec:?}")));
    }
    if !(beta > 0.0) {
        return Err(Error::domain("beta", format!("must be > 0, got {beta}")));
    }
    if matches!(
        spec.case,
        RegimeCase::NegligibleInertia | RegimeCase::NegligibleViscosity
    ) && state.u < -NEGATIVE_U_TOLERANCE
    {
        return Err(Error::domain("u", format!("must be >= 0, got {}", state.u)));
    }
    Ok(regime_rhs_total(spec.case, state, beta))
}

/// Closed-form solution of the negligible-gravity model `ũ'' + βũ' = 1` with
/// `ũ(0) = u0`, `ũ'(0) = 0`. Returns `(ũ, ũ')`.
pub fn negligible_gravity_solution(beta: f64, u0: f64, t: f64) -> (f64, f64) {
    let decay = (-beta * t).exp_m1(); // e^{-βt} - 1
    (u0 + t / beta + decay / (beta * beta), -decay / beta)
}

/// Washburn-type solution of `β h h' = 1`: `h = √(2t/β + h0²)`.
pub fn washburn_height(beta: f64, h0: f64, t: f64) -> f64 {
    (2.0 * t / beta + h0 * h0).sqrt()
}

/// Residual of the separable antiderivative of `β h h' + h = 1`:
/// `β[(h0 − h) − ln((1 − h)/(1 − h0))] − t`. Zero along exact solutions with
/// `0 < h0 < 1`.
pub fn negligible_inertia_residual(beta: f64, h0: f64, h: f64, t: f64) -> f64 {
    beta * ((h0 - h) - ((-h).ln_1p() - (-h0).ln_1p())) - t
}

/// Conserved energy of the inviscid model `ũ'' = 1 − √(2ũ)`.
pub fn negligible_viscosity_energy(u: f64, du: f64) -> f64 {
    stability::energy(u.max(0.0), du)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equilibrium_is_a_fixed_point() {
        for (omega, beta) in [(1.0, 1.0), (0.1, 0.5), (4.0, 0.3), (1e-4, 1.0)] {
            let d = rhs_u(State::EQUILIBRIUM, omega, beta, 0.0);
            assert_eq!(d.du, 0.0);
            assert_eq!(d.dv, 0.0);
        }
    }

    #[test]
    fn initial_curvature_at_the_endpoints() {
        let d = rhs_u(State::new(0.0, 0.0), 0.7, 0.9, 0.0);
        assert_eq!((d.du, d.dv), (0.0, 1.0));
        let d = rhs_u(State::new(9.0 / 8.0, 0.0), 0.7, 0.9, 0.0);
        assert_eq!((d.du, d.dv), (0.0, -0.5));
    }

    #[test]
    fn negative_u_is_clamped() {
        let d = rhs_u(State::new(-1e-9, 0.0), 1.0, 1.0, 0.0);
        assert_eq!(d.dv, 1.0);
    }

    #[test]
    fn height_form_values() {
        assert_eq!(rhs_h(1.0, 0.0, 0.3, 0.8).unwrap(), 0.0);
        assert_eq!(rhs_h(0.5, 0.0, 1.0, 1.0).unwrap(), 1.0);
        assert!(matches!(
            rhs_h(0.0, 0.0, 1.0, 1.0),
            Err(Error::Singularity { .. })
        ));
        assert!(rhs_h(1e-13, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn height_form_agrees_with_u_form_algebraically() {
        // Map (u, v, v') to (H, H', H'') and check the H-form balance.
        let (omega, beta) = (0.37_f64, 0.6);
        for &(u, v) in &[(0.1, 0.3), (0.7, -0.2), (1.0, 0.05)] {
            let d = rhs_u(State::new(u, v), omega, beta, 0.0);
            let h = (2.0 * u).sqrt();
            let hp = v / (omega.sqrt() * h);
            let hpp = (d.dv / omega - hp * hp) / h;
            let expect = rhs_h(h, hp, omega, beta).unwrap();
            assert!((hpp - expect).abs() < 1e-13, "{hpp} vs {expect}");
        }
    }

    #[test]
    fn exponents() {
        let r = Rational64::new;
        assert_eq!(
            regime_exponents(RegimeCase::NegligibleGravity),
            RegimeExponents::Fixed {
                a: r(1, 1),
                b: r(1, 2)
            }
        );
        assert_eq!(
            regime_exponents(RegimeCase::NegligibleInertia),
            RegimeExponents::Fixed {
                a: r(0, 1),
                b: r(0, 1)
            }
        );
        assert_eq!(
            regime_exponents(RegimeCase::NegligibleViscosity),
            RegimeExponents::Fixed {
                a: r(1, 2),
                b: r(0, 1)
            }
        );
        let fam = RegimeSpec::family(r(1, 4)).unwrap();
        assert_eq!(fam.a, r(1, 2));
        assert!(fam.is_valid());
        assert!(RegimeSpec::family(r(1, 2)).is_err());
        assert!(RegimeSpec::family(r(0, 1)).is_err());
        assert!(RegimeSpec::new(RegimeCase::NegligibleGravityInertia).is_err());
    }

    #[test]
    fn regime_rhs_values() {
        let washburn = RegimeSpec::default_for(RegimeCase::NegligibleGravityInertia);
        assert_eq!(
            rhs_regime(&washburn, State::new(0.0, 0.0), 1.0).unwrap(),
            RegimeDerivative::FirstOrder(1.0)
        );
        let inertia = RegimeSpec::new(RegimeCase::NegligibleInertia).unwrap();
        assert_eq!(
            rhs_regime(&inertia, State::new(0.5, 0.0), 1.0).unwrap(),
            RegimeDerivative::FirstOrder(0.0)
        );
        assert!(rhs_regime(&inertia, State::new(-1e-6, 0.0), 1.0).is_err());
        assert!(rhs_regime(&inertia, State::new(-1e-14, 0.0), 1.0).is_ok());
        let gravity = RegimeSpec::new(RegimeCase::NegligibleGravity).unwrap();
        assert!(rhs_regime(&gravity, State::new(-1.0, 0.0), 1.0).is_ok());
    }

    #[test]
    fn closed_forms() {
        // ũ'' + ũ' = 1 from rest at the origin: ũ = t − (1 − e^{−t}).
        for t in [0.0, 0.1, 1.0, 7.5] {
            let (u, du) = negligible_gravity_solution(1.0, 0.0, t);
            assert!((u - (t - (1.0 - (-t).exp()))).abs() < 1e-15);
            assert!((du - (1.0 - (-t).exp())).abs() < 1e-15);
        }
        assert_eq!(washburn_height(1.0, 0.0, 2.0), 2.0);
        assert_eq!(negligible_inertia_residual(0.7, 0.2, 0.2, 0.0), 0.0);
    }
}
