//! Water in a 0.1 mm glass capillary, with and without wall slip.

use washburn::commands::nondim_report;
use washburn::params::PhysicalParams;

fn main() -> washburn::Result<()> {
    let mut water = PhysicalParams {
        rho: 1000.0,
        mu: 1e-3,
        gamma: 0.0728,
        theta: 0.0,
        g: 9.81,
        radius: 1e-4,
        slip_length: 0.0,
        h0: 0.0,
    };
    for slip in [0.0, 2.5e-5, 1e-4] {
        water.slip_length = slip;
        let r = nondim_report(&water)?;
        println!(
            "L = {slip:.1e} m: h_e = {:.5} m, tau = {:.4} s, omega = {:.4e}, beta = {:.3}, omega* = {:.4}",
            r.h_e, r.tau, r.omega, r.beta, r.omega_star
        );
    }
    Ok(())
}
