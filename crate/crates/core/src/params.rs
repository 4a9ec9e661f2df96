//! Physical inputs, their dimensionless reduction, and the derived constants
//! of the model.
//!
//! The dimensionless equation is
//!
//! ```text
//! ω (H H')' + β H H' + H = 1,    H(0) = α,  H'(0) = 0
//! ```
//!
//! with the height scaled by Jurin's height `h_e` and time by `τ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Initial-height ratios above this value are accepted but flagged: the model
/// is meant for columns starting well below the equilibrium height.
pub const ALPHA_WARN_THRESHOLD: f64 = 0.1;

/// Largest initial-height ratio for which the well-posedness bounds hold.
pub const ALPHA_MAX: f64 = 1.5;

/// Relative tolerance for the two independent routes to `ω`.
pub const OMEGA_CONSISTENCY_RTOL: f64 = 1e-12;

/// Dimensional description of the fluid and the pipe, SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Mass density [kg/m³].
    pub rho: f64,
    /// Dynamic viscosity [Pa·s].
    pub mu: f64,
    /// Surface tension [N/m].
    pub gamma: f64,
    /// Static contact angle [rad], in `[0, π/2)`.
    pub theta: f64,
    /// Gravitational acceleration [m/s²].
    pub g: f64,
    /// Pipe radius [m].
    pub radius: f64,
    /// Slip length [m]; zero is the no-slip wall.
    pub slip_length: f64,
    /// Initial column height [m].
    pub h0: f64,
}

/// On-disk form of [`PhysicalParams`]: the contact angle is given in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalParamsFile {
    pub rho: f64,
    pub mu: f64,
    pub gamma: f64,
    pub theta_deg: f64,
    pub g: f64,
    #[serde(rename = "R")]
    pub radius: f64,
    #[serde(rename = "L")]
    pub slip_length: f64,
    pub h0: f64,
}

impl From<PhysicalParamsFile> for PhysicalParams {
    fn from(f: PhysicalParamsFile) -> Self {
        PhysicalParams {
            rho: f.rho,
            mu: f.mu,
            gamma: f.gamma,
            theta: f.theta_deg.to_radians(),
            g: f.g,
            radius: f.radius,
            slip_length: f.slip_length,
            h0: f.h0,
        }
    }
}

impl PhysicalParamsFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

fn require_positive(field: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(
            field,
            format!("must be finite and > 0, got {value}"),
        ))
    }
}

fn require_nonnegative(field: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::domain(
            field,
            format!("must be finite and >= 0, got {value}"),
        ))
    }
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        require_positive("rho", self.rho)?;
        require_positive("mu", self.mu)?;
        require_positive("gamma", self.gamma)?;
        require_positive("g", self.g)?;
        require_positive("R", self.radius)?;
        require_nonnegative("L", self.slip_length)?;
        require_nonnegative("h0", self.h0)?;
        if !(self.theta.is_finite()
            && self.theta >= 0.0
            && self.theta < std::f64::consts::FRAC_PI_2)
        {
            return Err(Error::domain(
                "theta",
                format!(
                    "contact angle must lie in [0, pi/2), got {} rad",
                    self.theta
                ),
            ));
        }
        if self.theta.cos() <= 0.0 {
            return Err(Error::domain("theta", "cos(theta) must be positive"));
        }
        Ok(())
    }

    /// Jurin's equilibrium height `2γ cosθ / (ρ g R)`.
    pub fn jurin_height(&self) -> f64 {
        2.0 * self.gamma * self.theta.cos() / (self.rho * self.g * self.radius)
    }

    pub fn ohnesorge(&self) -> f64 {
        self.mu / (self.radius * self.rho * self.gamma).sqrt()
    }

    pub fn bond(&self) -> f64 {
        self.rho * self.g * self.radius * self.radius / self.gamma
    }
}

/// Dimensional scales carried along when the model was built from physical
/// inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalScales {
    /// Equilibrium (Jurin) height [m].
    pub h_e: f64,
    /// Time scale [s].
    pub tau: f64,
    /// Ohnesorge number.
    #[serde(rename = "Oh")]
    pub ohnesorge: f64,
    /// Bond number.
    #[serde(rename = "Bo")]
    pub bond: f64,
}

/// The dimensionless triple `(ω, β, α)` that fully determines a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub omega: f64,
    pub beta: f64,
    pub alpha: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub scales: Option<PhysicalScales>,
}

impl ModelParams {
    pub fn new(omega: f64, beta: f64, alpha: f64) -> Result<Self> {
        require_positive("omega", omega)?;
        if !(beta.is_finite() && beta > 0.0 && beta <= 1.0) {
            return Err(Error::domain(
                "beta",
                format!("must lie in (0, 1], got {beta}"),
            ));
        }
        if !(alpha.is_finite() && (0.0..=ALPHA_MAX).contains(&alpha)) {
            return Err(Error::domain(
                "alpha",
                format!("must lie in [0, {ALPHA_MAX}], got {alpha}"),
            ));
        }
        Ok(ModelParams {
            omega,
            beta,
            alpha,
            scales: None,
        })
    }

    /// Damping coefficient `β/√ω` of the u-form equation.
    pub fn damping(&self) -> f64 {
        self.beta / self.omega.sqrt()
    }

    pub fn omega_star(&self) -> f64 {
        self.beta * self.beta / 4.0
    }

    /// Initial transformed height `α²/2`.
    pub fn u0(&self) -> f64 {
        0.5 * self.alpha * self.alpha
    }

    /// Horizon covering about thirty damping e-folds, capped at `1e6`.
    pub fn default_horizon(&self) -> f64 {
        (30.0 / self.damping()).min(crate::integrate::MAX_HORIZON)
    }

    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.alpha > ALPHA_WARN_THRESHOLD {
            out.push(format!(
                "alpha = {} exceeds {ALPHA_WARN_THRESHOLD}: the initial column is not small compared to the equilibrium height",
                self.alpha
            ));
        }
        out
    }
}

/// Slip parameter `β = (1 + 4L/R)⁻¹`.
pub fn slip_parameter(slip_length: f64, radius: f64) -> f64 {
    1.0 / (1.0 + 4.0 * slip_length / radius)
}

/// Reduce dimensional inputs to the dimensionless model.
///
/// `ω` is computed twice, directly as `ρ²R⁴g / (64μ²h_e)` and through the
/// Bond and Ohnesorge numbers; disagreement beyond `1e-12` relative is
/// reported as [`Error::Consistency`].
pub fn nondimensionalize(p: &PhysicalParams) -> Result<ModelParams> {
    p.validate()?;
    let h_e = p.jurin_height();
    let tau = 8.0 * p.mu * h_e / (p.rho * p.g * p.radius * p.radius);
    let r2 = p.radius * p.radius;
    let omega = p.rho * p.rho * r2 * r2 * p.g / (64.0 * p.mu * p.mu * h_e);
    let oh = p.ohnesorge();
    let bo = p.bond();
    let omega_dimless = (bo / oh).powi(2) / (128.0 * p.theta.cos());
    let gap = (omega - omega_dimless).abs() / omega.abs().max(omega_dimless.abs());
    if !(gap <= OMEGA_CONSISTENCY_RTOL) {
        return Err(Error::Consistency {
            quantity: "omega",
            lhs: omega,
            rhs: omega_dimless,
            gap,
        });
    }
    let alpha = p.h0 / h_e;
    if alpha > ALPHA_MAX {
        return Err(Error::domain(
            "h0",
            format!("h0/h_e = {alpha} exceeds {ALPHA_MAX}"),
        ));
    }
    let mut m = ModelParams::new(omega, slip_parameter(p.slip_length, p.radius), alpha)?;
    m.scales = Some(PhysicalScales {
        h_e,
        tau,
        ohnesorge: oh,
        bond: bo,
    });
    Ok(m)
}

/// Critical value `ω* = β²/4` separating monotone from oscillatory approach.
pub fn critical_omega(beta: f64) -> Result<f64> {
    require_positive("beta", beta)?;
    Ok(beta * beta / 4.0)
}

/// `u = H²/2`.
pub fn u_from_h(h: f64) -> Result<f64> {
    require_nonnegative("H", h)?;
    Ok(0.5 * h * h)
}

/// `H = √(2u)`.
pub fn h_from_u(u: f64) -> Result<f64> {
    require_nonnegative("u", u)?;
    Ok((2.0 * u).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn water() -> PhysicalParams {
        PhysicalParams {
            rho: 1000.0,
            mu: 0.001,
            gamma: 0.0728,
            theta: 0.0,
            g: 9.81,
            radius: 1e-4,
            slip_length: 0.0,
            h0: 0.0,
        }
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn water_in_thin_tube() {
        // Reference values evaluated with 40-digit arithmetic.
        let m = nondimensionalize(&water()).unwrap();
        let s = m.scales.unwrap();
        assert!(rel(s.h_e, 0.148_419_979_612_640_16) < 1e-14);
        assert!(rel(s.tau, 12.103_566_125_393_693) < 1e-14);
        assert!(rel(m.omega, 1.032_753_476_991_758_2e-4) < 1e-13);
        assert!(rel(s.ohnesorge, 0.011_720_180_773_462_386) < 1e-14);
        assert!(rel(s.bond, 1.347_527_472_527_472_5e-3) < 1e-14);
        assert_eq!(m.beta, 1.0);
        assert_eq!(m.alpha, 0.0);
    }

    #[test]
    fn slip_parameter_values() {
        assert_eq!(slip_parameter(0.0, 3e-4), 1.0);
        assert_eq!(slip_parameter(0.25, 1.0), 0.5);
        let mut p = water();
        p.slip_length = 0.25 * p.radius;
        assert!((nondimensionalize(&p).unwrap().beta - 0.5).abs() < 1e-15);
    }

    #[test]
    fn critical_omega_values() {
        assert_eq!(critical_omega(1.0).unwrap(), 0.25);
        assert_eq!(critical_omega(0.5).unwrap(), 0.0625);
        assert_eq!(critical_omega(2.0).unwrap(), 1.0);
        assert!(critical_omega(0.0).is_err());
        assert!(critical_omega(-1.0).is_err());
    }

    #[test]
    fn transform_values() {
        assert_eq!(u_from_h(1.0).unwrap(), 0.5);
        assert_eq!(u_from_h(0.0).unwrap(), 0.0);
        assert_eq!(h_from_u(9.0 / 8.0).unwrap(), 1.5);
        assert!(u_from_h(-1e-3).is_err());
        assert!(h_from_u(-1e-3).is_err());
    }

    #[test]
    fn rejects_bad_inputs_naming_the_field() {
        let cases: [(&str, fn(&mut PhysicalParams)); 6] = [
            ("rho", |p| p.rho = 0.0),
            ("mu", |p| p.mu = -1.0),
            ("theta", |p| p.theta = std::f64::consts::FRAC_PI_2),
            ("R", |p| p.radius = f64::NAN),
            ("L", |p| p.slip_length = -1e-6),
            ("h0", |p| p.h0 = 1.0),
        ];
        for (name, mutate) in cases {
            let mut p = water();
            mutate(&mut p);
            match nondimensionalize(&p) {
                Err(Error::Domain { field, .. }) => assert_eq!(field, name),
                other => panic!("{name}: expected domain error, got {other:?}"),
            }
        }
    }

    #[test]
    fn alpha_range_is_enforced_not_clamped() {
        assert!(ModelParams::new(1.0, 1.0, 1.5).is_ok());
        assert!(ModelParams::new(1.0, 1.0, 1.5 + 1e-12).is_err());
        assert!(ModelParams::new(1.0, 0.0, 0.0).is_err());
        assert!(ModelParams::new(0.0, 1.0, 0.0).is_err());
        assert!(ModelParams::new(1.0, 1.0, 0.05)
            .unwrap()
            .warnings()
            .is_empty());
        assert_eq!(ModelParams::new(1.0, 1.0, 0.5).unwrap().warnings().len(), 1);
    }

    #[test]
    fn parameter_file_uses_degrees_and_exact_keys() {
        let text = r#"{"rho":1000,"mu":0.001,"gamma":0.0728,"theta_deg":60,"g":9.81,"R":1e-4,"L":0,"h0":0}"#;
        let p: PhysicalParams = PhysicalParamsFile::from_json(text).unwrap().into();
        assert!((p.theta.cos() - 0.5).abs() < 1e-15);
        let extra = r#"{"rho":1000,"mu":0.001,"gamma":0.0728,"theta_deg":0,"g":9.81,"R":1e-4,"L":0,"h0":0,"T":300}"#;
        assert!(PhysicalParamsFile::from_json(extra).is_err());
        let missing =
            r#"{"rho":1000,"mu":0.001,"gamma":0.0728,"theta_deg":0,"g":9.81,"R":1e-4,"L":0}"#;
        assert!(PhysicalParamsFile::from_json(missing).is_err());
    }
}
