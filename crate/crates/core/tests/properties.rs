use proptest::prelude::*;
use washburn::dynamics::{rhs_u, State};
use washburn::integrate::{integrate, IntegrateOptions};
use washburn::params::{h_from_u, u_from_h, ModelParams};
use washburn::stability::{basin, energy, linearize, lyapunov_factored, lyapunov_value};
use washburn::volterra::{apply_t, apply_t_direct, GridFunction};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn height_round_trip(h in 0.0f64..10.0) {
        let back = h_from_u(u_from_h(h).unwrap()).unwrap();
        prop_assert!((back - h).abs() <= 4.0 * f64::EPSILON * h.max(1.0));
    }

    #[test]
    fn lyapunov_positive_off_equilibrium(u in 0.0f64..=1.125, v in -3.0f64..3.0) {
        prop_assume!((u - 0.5).abs() + v.abs() > 1e-6);
        prop_assert!(lyapunov_factored(u, v) > 0.0);
        prop_assert!(lyapunov_value(u, v) > 0.0);
        prop_assert!((lyapunov_factored(u, v) - (energy(u, v) + 1.0 / 6.0)).abs() < 1e-12);
    }

    #[test]
    fn basin_bounds_solve_level(alpha in 0.0f64..=1.5) {
        let b = basin(alpha).unwrap();
        prop_assert!(b.residual() < 1e-10);
        prop_assert!(b.u_min <= 0.5 && 0.5 <= b.u_max);
        prop_assert!((lyapunov_value(alpha * alpha / 2.0, 0.0) - b.level).abs() < 1e-12);
        prop_assert!(b.contains(0.5, 0.0));
    }

    #[test]
    fn real_parts_negative(omega in 1e-3f64..10.0, beta in 1e-3f64..2.0) {
        let r = linearize(omega, beta).unwrap();
        prop_assert!(r.lambda1.re < 0.0 && r.lambda2.re < 0.0);
        let mean = 0.5 * (r.lambda1.re + r.lambda2.re);
        prop_assert!((mean + beta / (2.0 * omega.sqrt())).abs() <= 1e-12 * mean.abs());
    }

    #[test]
    fn regularization_lowers_acceleration(
        u in 0.0f64..1.2,
        v in -1.0f64..1.0,
        eps in 1e-10f64..1.0,
    ) {
        let plain = rhs_u(State::new(u, v), 1.0, 1.0, 0.0).dv;
        let reg = rhs_u(State::new(u, v), 1.0, 1.0, eps).dv;
        prop_assert!(reg < plain);
    }

    #[test]
    fn recursion_matches_direct_sum(
        omega in 0.05f64..4.0,
        beta in 0.1f64..=1.0,
        alpha in 0.0f64..=1.5,
        amp in 0.0f64..1.0,
    ) {
        let f = GridFunction::from_fn(4.0, 200, |s| amp * s.sin().abs()).unwrap();
        let fast = apply_t(&f, omega, beta, alpha).unwrap();
        let direct = apply_t_direct(&f, omega, beta, alpha).unwrap();
        prop_assert!(fast.sup_distance(&direct).unwrap() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn trajectories_stay_bounded_and_dissipate(
        omega in 0.05f64..5.0,
        beta in 0.1f64..=1.0,
        alpha in 0.0f64..=1.5,
    ) {
        let p = ModelParams::new(omega, beta, alpha).unwrap();
        let traj = integrate(&p, &IntegrateOptions::new(&p).horizon(20.0)).unwrap();
        prop_assert!(traj.min_u() >= 0.0);
        prop_assert!(traj.max_u() <= 9.0 / 8.0 + 1e-9);
        for w in traj.samples.windows(2) {
            prop_assert!(w[1].energy <= w[0].energy + 1e-8);
        }
    }
}
