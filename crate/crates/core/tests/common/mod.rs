//! Random admissible two-interface data shared by the integration tests.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use phasefront::admissibility::{check_admissible, stability_ok};
use phasefront::data::{InitialData, PhaseLayout, Profile};
use phasefront::tracker::{run, sigma_nu, RunOptions, Scheme, Strictness, Trajectory};
use phasefront::waves::ACoefficients;

pub struct Case {
    pub data: InitialData,
    pub coeffs: ACoefficients,
}

/// Admissible two-interface data: `(|η|, |ζ|)` drawn from the stability
/// domain, pressure continuous at the interfaces, amplitude scaled below
/// the threshold.
pub fn random_case(rng: &mut ChaCha8Rng) -> Case {
    loop {
        let (x, y) = (rng.gen_range(0.0..1.6), rng.gen_range(0.0..1.6));
        if !stability_ok(x, y) {
            continue;
        }
        let a_m = rng.gen_range(0.8..1.2);
        let coeffs = ACoefficients::new(a_m * (2.0 + x) / (2.0 - x), a_m, a_m * (2.0 + y) / (2.0 - y)).unwrap();
        let layout = PhaseLayout {
            lambda_l: rng.gen_range(0.0..1.0),
            lambda_m: rng.gen_range(0.0..1.0),
            lambda_r: rng.gen_range(0.0..1.0),
            a: rng.gen_range(-0.6..-0.2),
            b: rng.gen_range(0.2..0.6),
        };
        let count = rng.gen_range(10..24);
        let mut bps: Vec<f64> = (0..count).map(|_| rng.gen_range(-1.0..1.0)).collect();
        bps.extend([layout.a, layout.b]);
        bps.sort_by(f64::total_cmp);
        let steps: Vec<(f64, f64)> = (0..bps.len()).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let build = |amp: f64| {
            let mut lp = 0.0;
            let (mut vs, mut us) = (vec![coeffs.a_l * coeffs.a_l], vec![0.0]);
            for (i, &bp) in bps.iter().enumerate() {
                lp += amp * steps[i].0;
                let a = if bp < layout.a { coeffs.a_l } else if bp < layout.b { coeffs.a_m } else { coeffs.a_r };
                vs.push(a * a / lp.exp());
                us.push(amp * steps[i].1);
            }
            let v_min = vs.iter().cloned().fold(f64::INFINITY, f64::min);
            InitialData {
                v: Profile::Piecewise {
                    breakpoints: bps.clone(),
                    values: vs,
                },
                u: Profile::Piecewise {
                    breakpoints: bps.clone(),
                    values: us,
                },
                phases: layout,
                v_lower: 0.5 * v_min,
            }
        };
        let unit = check_admissible(&build(0.1), &coeffs).unwrap();
        let scale = (0.8 * unit.k_threshold / unit.weighted_tv).min(1.0);
        let data = build(0.1 * scale);
        if check_admissible(&data, &coeffs).unwrap().admissible {
            return Case { data, coeffs };
        }
    }
}

pub fn tracked_run(case: &Case, nu: u32) -> Trajectory {
    let report = check_admissible(&case.data, &case.coeffs).unwrap();
    let scheme = Scheme::from_report(&report, case.coeffs, case.data.phases, sigma_nu(0.1, nu)).unwrap();
    let opts = RunOptions {
        horizon: 1.0,
        snapshot_times: vec![0.25, 0.5, 0.75],
        strictness: Strictness::Fail,
        ..RunOptions::default()
    };
    run(&case.data, nu, scheme, opts).unwrap()
}
