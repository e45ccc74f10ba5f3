//! Admissibility of the shipped two-interface data, and a few points of
//! the level sets of H.

use std::path::PathBuf;

use phasefront::admissibility::{check_admissible, h_func, k_func, level_curve, stability_ok};
use phasefront::io::config::RunConfig;

fn main() {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/two_interface.toml");
    let cfg = RunConfig::load(&path).unwrap();
    let r = check_admissible(&cfg.initial_data().unwrap(), &cfg.coefficients().unwrap()).unwrap();
    println!("eta = {:.6}, zeta = {:.6}", r.eta, r.zeta);
    println!("H = {:.6}, K(H) = {:.6}, weighted TV = {:.6}", r.h_value, r.k_threshold, r.weighted_tv);
    println!("admissible: {}", r.admissible);
    if let Some(p) = r.parameters {
        println!("m_o = {:.6}, xi = {:.6}, rho = {:.6}, mu = {:.6}", p.m_o, p.xi, p.rho, p.mu);
    }

    println!("\nK(2) = {:.12}", k_func(2.0).unwrap());
    for (x, y) in [(1.2, 1.2), (1.3, 1.3)] {
        println!("({x}, {y}) in D: {}", stability_ok(x, y));
    }
    for c in [1.0, 2.0, 3.0] {
        let pts = level_curve(c, 4);
        let shown: Vec<String> = pts.iter().map(|(x, y)| format!("({x:.2}, {y:.4})")).collect();
        println!("H = {c}: {}", shown.join(" "));
        for (x, y) in pts.into_iter().skip(1) {
            assert!((h_func(x, y).unwrap() - c).abs() < 1e-9);
        }
    }
}
