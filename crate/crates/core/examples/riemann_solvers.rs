//! The four pre-Riemann solvers on one pair of states in different phases,
//! and the Lax solution of a single-phase problem.

use phasefront::riemann::{lax_riemann, pre_riemann, ProtoKind, SolverKind};
use phasefront::waves::State;

fn main() {
    let left = State::from_pressure(1.0, 0.1, 0.2, 1.3).unwrap();
    let right = State::from_pressure(1.4, -0.2, 0.6, 1.0).unwrap();
    println!("{:>4} {:>12} {:>12} {:>12} {:>10}", "kind", "eps1", "delta", "eps3", "closure");
    for kind in SolverKind::ALL {
        let t = pre_riemann(&left, &right, kind).unwrap();
        let err = t.reconstruct(&left, right.lambda, right.a).rel_dist(&right);
        println!("{:>4} {:>12.8} {:>12.8} {:>12.8} {:>10.1e}", format!("{kind:?}"), t.eps1, t.delta, t.eps3, err);
    }

    let l = State::new(1.0, 0.0, 0.4, 1.0).unwrap();
    let r = State::new(0.9, 0.25, 0.4, 1.0).unwrap();
    println!("\nsingle phase:");
    for w in lax_riemann(&l, &r).unwrap() {
        let what = match (w.kind, w.strength < 0.0) {
            (ProtoKind::Two, _) => "2-wave",
            (_, true) => "shock",
            (_, false) => "rarefaction",
        };
        println!("  {what:<12} strength {:>9.6}  speeds {:.6}..{:.6}", w.strength, w.speed_range.0, w.speed_range.1);
    }
}
