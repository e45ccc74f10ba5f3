//! A 3-wave hitting a composite wave from the left, resolved by both
//! solvers, with the reflected strength against its bound.

use phasefront::interaction::{
    accurate_bound, interact_composite_accurate, interact_composite_simplified, simplified_bound,
};
use phasefront::riemann::CompositeWave;
use phasefront::waves::{apply, two_wave_target, CurveKind, Family, State};

fn main() {
    let delta = -0.4;
    let left = State::from_pressure(1.0, 0.0, 0.3, 1.3).unwrap();
    let a_plus = two_wave_target(left.a, delta).unwrap();
    let comp = CompositeWave::pure(delta, 0.0);
    println!("{:>8} {:>11} {:>12} {:>12} {:>10}", "inc", "solver", "transmitted", "reflected", "bound");
    for inc in [-0.3, -0.05, 0.05, 0.3] {
        let mid = apply(&left, Family::Three, CurveKind::Lax, inc);
        let right = comp.apply_to(&mid, 0.7, a_plus);
        let acc = interact_composite_accurate(&comp, Family::Three, inc, &left, &right, 0.0).unwrap();
        println!(
            "{inc:>8} {:>11} {:>12.8} {:>12.8} {:>10.6}",
            "accurate",
            acc.transmitted_strength,
            acc.reflected_strength,
            accurate_bound(inc, delta)
        );
        let rho = 0.5;
        let simp = interact_composite_simplified(&comp, Family::Three, inc, &left, &right, rho).unwrap();
        let c = simp.composite().unwrap();
        println!(
            "{inc:>8} {:>11} {:>12.8} {:>12.8} {:>10.6}  composite now ({:.6}, {delta}, {:.6})",
            "simplified",
            simp.transmitted_strength,
            simp.reflected_strength,
            simplified_bound(Family::Three, inc, delta, rho),
            c.d1,
            c.d3
        );
    }
}
