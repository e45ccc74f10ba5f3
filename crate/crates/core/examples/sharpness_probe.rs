//! Sharpness of the bound on waves absorbed by a composite: for each
//! interface strength, whether the reflected 1-shock bound holds for all
//! small incident shocks.

use phasefront::interaction::{k_of_delta, sharpness_scan, theta_refined};

fn main() {
    let mut grid: Vec<f64> = (1..=19).map(|i| i as f64 / 10.0).collect();
    grid.push(5f64.sqrt() - 1.0);
    grid.sort_by(f64::total_cmp);
    println!("{:>9} {:>9} {:>12} {:>10}  verdict", "delta", "k", "a_k1", "max ratio");
    for d in grid {
        let s = sharpness_scan(d, 1.0).unwrap();
        println!("{d:>9.6} {:>9.5} {:>12.4e} {:>10.6}  {:?}", k_of_delta(d), s.a_k1, s.max_ratio, s.verdict);
    }
    for delta in [2.0 / 3.0, 0.8] {
        let peak = (1..=5000).map(|i| theta_refined(delta, i as f64 * 1e-3)).fold(0.0, f64::max);
        println!("max Theta({delta:.4}, z) on (0, 5] = {peak:.12}");
    }
}
