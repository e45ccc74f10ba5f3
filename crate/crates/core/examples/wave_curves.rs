//! Lax and integral curves through one state, and the shock speeds.

use phasefront::waves::{apply, shock_speed, strength_1_3, CurveKind, Family, State};

fn main() {
    let s = State::from_pressure(1.0, 0.0, 0.5, 1.2).unwrap();
    println!("{:>6} {:>6} {:>10} {:>10} {:>10} {:>10}", "family", "eps", "p (Lax)", "u (Lax)", "u (int.)", "speed");
    for family in [Family::One, Family::Three] {
        for eps in [-0.4, -0.1, 0.1, 0.4] {
            let lax = apply(&s, family, CurveKind::Lax, eps);
            let int = apply(&s, family, CurveKind::Integral, eps);
            // Shocks move at the Rankine-Hugoniot speed.
            let speed = if eps < 0.0 {
                let (l, r) = if family == Family::One { (lax, s) } else { (s, lax) };
                format!("{:.6}", shock_speed(&l, &r, family))
            } else {
                "fan".into()
            };
            let back = strength_1_3(s.p(), lax.p(), family).unwrap();
            assert!((back - eps).abs() < 1e-12);
            println!("{:>6} {:>6} {:>10.6} {:>10.6} {:>10.6} {:>10}", family.index(), eps, lax.p(), lax.u, int.u, speed);
        }
    }
}
