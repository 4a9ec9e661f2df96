//! Eigenvalues at equilibrium across the critical ratio omega* = beta^2/4.

use washburn::linearize;

fn main() -> washburn::Result<()> {
    let beta = 1.0;
    for omega in [0.05, 0.125, 0.25, 0.5, 1.0, 4.0] {
        let r = linearize(omega, beta)?;
        println!(
            "omega = {omega:5.3}: {:<20} lambda = {:.4} {:+.4}i, {:.4} {:+.4}i",
            format!("{:?}", r.kind),
            r.lambda1.re,
            r.lambda1.im,
            r.lambda2.re,
            r.lambda2.im
        );
    }
    Ok(())
}
