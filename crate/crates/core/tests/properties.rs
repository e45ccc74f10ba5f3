mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use phasefront::admissibility::{parameter_checks, select_parameters, stability_ok, PhasePair};
use phasefront::data::{Builtin, InitialData, PhaseLayout, Profile};
use phasefront::error::Error;
use phasefront::io::residual::{boundary_residual, segment_residual, Rect};
use phasefront::tracker::approximate_initial_data;
use phasefront::waves::{apply, h, strength_1_3, two_wave_strength, two_wave_target, ACoefficients, CurveKind, Family, State};

use common::{random_case, tracked_run};

fn family(one: bool) -> Family {
    if one {
        Family::One
    } else {
        Family::Three
    }
}

proptest! {
    #[test]
    fn cascade_passes_its_own_checks(
        x in 0.0f64..1.9,
        y in 0.0f64..1.9,
        lbar in prop::array::uniform3(0.0f64..0.3),
    ) {
        prop_assume!(stability_ok(x, y));
        let pair = PhasePair::new(-x, y).unwrap();
        match select_parameters(pair, lbar, false) {
            Ok(p) => {
                for (name, ok) in parameter_checks(&p, x, y, Some((lbar, false))) {
                    prop_assert!(ok, "{name} fails at ({x}, {y})");
                }
                prop_assert!(p.mu < 1.0);
            }
            Err(Error::Inadmissible(_)) => {}
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn wave_curves_round_trip(
        p in 0.2f64..5.0,
        u in -1.0f64..1.0,
        a in 0.5f64..2.0,
        eps in -2.0f64..2.0,
        one in any::<bool>(),
        lax in any::<bool>(),
    ) {
        let s = State::from_pressure(p, u, 0.3, a).unwrap();
        let kind = if lax { CurveKind::Lax } else { CurveKind::Integral };
        let f = family(one);
        let t = apply(&s, f, kind, eps);
        let back = strength_1_3(s.p(), t.p(), f).unwrap();
        prop_assert!((back - eps).abs() <= 1e-12 * (1.0 + eps.abs()));
        let theta = if lax { h(eps) } else { eps };
        prop_assert!((t.u - s.u - 2.0 * a * theta).abs() <= 1e-12 * (1.0 + theta.abs()));
    }

    #[test]
    fn two_wave_strength_inverts(a in 0.3f64..3.0, delta in -1.99f64..1.99) {
        let b = two_wave_target(a, delta).unwrap();
        prop_assert!((two_wave_strength(a, b) - delta).abs() < 1e-12);
    }

    #[test]
    fn sampling_does_not_increase_variation(
        amp in 0.0f64..0.4,
        periods in 0.5f64..4.0,
        u_amp in -0.3f64..0.3,
        width in 0.2f64..1.5,
        nu in 1u32..5,
    ) {
        let data = InitialData {
            v: Profile::Builtin(Builtin::Sine { start: -1.0, end: 1.0, base: 1.0, amplitude: amp, periods }),
            u: Profile::Builtin(Builtin::Bump { center: 0.1, width, base: 0.0, amplitude: u_amp }),
            phases: PhaseLayout { lambda_l: 0.2, lambda_m: 0.6, lambda_r: 0.4, a: -0.5, b: 0.5 },
            v_lower: 0.5,
        };
        let coeffs = ACoefficients::new(1.2, 1.0, 1.1).unwrap();
        let init = approximate_initial_data(&data, &coeffs, nu, 0.1 * 0.5f64.powi(nu as i32)).unwrap();
        prop_assert!(init.tv_log_p_sampled <= init.tv_log_p_exact * (1.0 + 1e-12) + 1e-14,
            "{} > {}", init.tv_log_p_sampled, init.tv_log_p_exact);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn residual_routes_agree(
        seed in any::<u64>(),
        x1 in -1.5f64..1.0,
        w in 0.05f64..1.0,
        t1 in 0.0f64..0.8,
        dt in 0.01f64..0.2,
    ) {
        let case = random_case(&mut ChaCha8Rng::seed_from_u64(seed));
        let t = tracked_run(&case, 1);
        let r = Rect { x1, x2: x1 + w, t1, t2: t1 + dt };
        let (bv, bu, bl) = boundary_residual(&t, &r).unwrap();
        let (sv, su) = segment_residual(&t, &r);
        prop_assert!((bv - sv).abs() < 1e-12 && (bu - su).abs() < 1e-12, "({bv}, {bu}) vs ({sv}, {su})");
        prop_assert!(bl.abs() < 1e-12);
    }

    #[test]
    fn tracker_invariants(seed in any::<u64>(), nu in 1u32..3) {
        let case = random_case(&mut ChaCha8Rng::seed_from_u64(seed));
        let t = tracked_run(&case, nu);
        prop_assert!(t.clean(), "breaches: {:?}", t.breaches.first());
        let layout = case.data.phases;
        for s in &t.slices {
            prop_assert_eq!(s.states.len(), s.fronts.len() + 1);
            prop_assert!(s.fronts.windows(2).all(|w| w[0].x <= w[1].x));
            for (i, st) in s.states.iter().enumerate() {
                let lo = if i == 0 { -1e9 } else { s.fronts[i - 1].x };
                let hi = s.fronts.get(i).map_or(1e9, |f| f.x);
                if hi > lo {
                    prop_assert_eq!(st.lambda, layout.lambda_at(0.5 * (lo + hi)));
                }
            }
            prop_assert!(s.functionals.f_total <= t.f0 * (1.0 + 1e-9) + 1e-15);
        }
        prop_assert!(t.events.windows(2).all(|w| w[0].time <= w[1].time));
        let again = tracked_run(&case, nu);
        prop_assert_eq!(&t.events, &again.events);
        prop_assert_eq!(t.final_slice(), again.final_slice());
    }
}
