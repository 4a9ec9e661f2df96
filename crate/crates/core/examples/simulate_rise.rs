//! Rise from rest in an inertia-dominated tube; prints the overshoots.

use washburn::integrate::{detect_crossings, integrate, IntegrateOptions};
use washburn::ModelParams;

fn main() -> washburn::Result<()> {
    let params = ModelParams::new(1.0, 1.0, 0.0)?;
    let traj = integrate(&params, &IntegrateOptions::new(&params).horizon(30.0))?;

    for c in &traj.crossings {
        let h = traj.eval(c.s).map(|st| st.height()).unwrap_or(f64::NAN);
        println!("s = {:8.4}  {:?}  H = {h:.6}", c.s, c.direction);
    }
    println!("peak H = {:.6}", (2.0 * traj.max_u()).sqrt());

    // Any other level works too, e.g. 90% of the Jurin height.
    let ninety = detect_crossings(&traj, 0.5 * 0.81);
    println!("first reaches H = 0.9 at s = {:.4}", ninety[0].s);

    let end = traj.final_state();
    println!("u(30) = {:.10}, v(30) = {:.3e}", end.u, end.v);
    Ok(())
}
