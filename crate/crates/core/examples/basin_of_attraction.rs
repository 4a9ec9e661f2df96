//! Basin levels and the range of heights a trajectory can visit.

use washburn::integrate::{integrate, IntegrateOptions};
use washburn::stability::audit_trajectory;
use washburn::{basin, ModelParams};

fn main() -> washburn::Result<()> {
    println!("alpha      C         u_min     u_max");
    for alpha in [0.0, 0.5, 1.0, 1.25, 1.5] {
        let b = basin(alpha)?;
        println!(
            "{alpha:4.2}  {:9.6}  {:9.6}  {:9.6}",
            b.level, b.u_min, b.u_max
        );
    }

    let params = ModelParams::new(1.0, 1.0, 1.5)?;
    let traj = integrate(&params, &IntegrateOptions::new(&params).horizon(60.0))?;
    let audit = audit_trajectory(&traj, &basin(1.5)?);
    println!(
        "alpha = 1.5 run: forward invariant {}, max V - C = {:.2e}, final distance {:.2e}",
        audit.forward_invariant, audit.max_excess, audit.final_distance
    );
    Ok(())
}
