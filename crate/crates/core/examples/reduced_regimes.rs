//! The four reduced models next to their closed forms.

use washburn::dynamics::{RegimeCase, RegimeSpec};
use washburn::regime::{run_regime, RegimeOptions};

fn main() -> washburn::Result<()> {
    for case in RegimeCase::ALL {
        let spec = RegimeSpec::default_for(case);
        for beta in [1.0, 0.5] {
            let run = run_regime(&spec, &RegimeOptions::new(case, beta, 0.0))?;
            println!(
                "case {} beta = {beta}: h*(1) = {:.5}, {:?} residual {:.2e}",
                case.number(),
                run.height_at(1.0),
                run.summary.residual_kind,
                run.summary.max_residual
            );
        }
    }
    Ok(())
}
