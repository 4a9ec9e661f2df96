//! How far trajectories drift apart when the initial height is perturbed.

use washburn::integrate::{continuous_dependence, IntegrateOptions};
use washburn::ModelParams;

fn main() -> washburn::Result<()> {
    let params = ModelParams::new(1.0, 1.0, 0.0)?;
    let rows = continuous_dependence(
        1.0,
        1.0,
        0.0,
        &[0.2, 0.1, 0.05, 0.025, 0.0125],
        &IntegrateOptions::new(&params),
    )?;
    for r in rows {
        println!(
            "alpha = {:6.4}: sup |u - u_0| = {:.4e}",
            r.alpha, r.sup_distance
        );
    }
    Ok(())
}
