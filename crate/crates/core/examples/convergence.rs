//! Single-phase Riemann problem: distance to the exact similarity solution
//! as nu grows.

use std::path::PathBuf;

use phasefront::exact::l1_distance;
use phasefront::io::commands::{execute, single_phase_riemann};
use phasefront::io::config::RunConfig;

fn main() {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/riemann.toml");
    let cfg = RunConfig::load(&path).unwrap();
    let data = cfg.initial_data().unwrap();
    let exact = single_phase_riemann(&data, &cfg).unwrap();
    println!("{:>4} {:>8} {:>12} {:>8}", "nu", "fronts", "L1 error", "ratio");
    let mut prev: Option<f64> = None;
    for nu in [2, 4, 8, 12] {
        let r = execute(&cfg, &data, nu).unwrap();
        let fin = r.trajectory.final_slice();
        let e = l1_distance(fin, &exact, -4.0, 4.0);
        let ratio = prev.map_or(String::new(), |p| format!("{:.2}", p / e));
        println!("{nu:>4} {:>8} {e:>12.4e} {ratio:>8}", fin.fronts.len());
        prev = Some(e);
    }
}
