//! Smoothing the square root at u = 0 and watching the effect vanish.

use washburn::integrate::{integrate, IntegrateOptions};
use washburn::solver::Tolerances;
use washburn::ModelParams;

fn main() -> washburn::Result<()> {
    let params = ModelParams::new(1.0, 1.0, 0.0)?;
    let opts = IntegrateOptions::new(&params)
        .horizon(20.0)
        .tol(Tolerances::new(1e-13, 1e-13)?);
    let exact = integrate(&params, &opts)?;
    for k in 2..=8 {
        let eps = 10f64.powi(-k);
        let smoothed = integrate(&params, &opts.epsilon(eps))?;
        println!(
            "epsilon = 1e-{k}: sup |u_eps - u| = {:.3e}",
            smoothed.sup_distance(&exact)?
        );
    }
    Ok(())
}
