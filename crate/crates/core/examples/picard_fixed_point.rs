//! The integral form solved by Picard iteration, checked against the ODE.

use washburn::integrate::{integrate, IntegrateOptions};
use washburn::volterra::{check_order_interval, picard_solve, PicardOptions};
use washburn::ModelParams;

fn main() -> washburn::Result<()> {
    let (omega, beta) = (1.0, 1.0);
    let result = picard_solve(omega, beta, 0.0, &PicardOptions::new(10.0))?;
    println!(
        "{} iterations, last change {:.2e}",
        result.iterations(),
        result.final_diff()
    );
    for (k, r) in result
        .contraction_ratios()
        .iter()
        .enumerate()
        .skip(1)
        .step_by(4)
    {
        println!("  ratio after {:2} iterations: {r:.4}", k + 1);
    }

    let params = ModelParams::new(omega, beta, 0.0)?;
    let traj = integrate(&params, &IntegrateOptions::new(&params).horizon(10.0))?;
    println!(
        "sup |picard - ode| = {:.2e}",
        result.solution.sup_distance_to(&traj)?
    );

    let order = check_order_interval(omega, beta, 1024)?;
    println!(
        "s* = {}, T(v0) - u0 >= {:.2e}, v0 - T(u0) >= {:.2e}",
        order.s_star, order.lower_slack, order.upper_slack
    );
    Ok(())
}
