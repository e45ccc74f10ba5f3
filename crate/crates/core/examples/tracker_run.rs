//! Front tracking on the shipped two-interface data: event statistics,
//! functionals at the snapshots and the CSV artifacts.

use std::collections::BTreeMap;
use std::path::PathBuf;

use phasefront::io::commands::{execute, persist};
use phasefront::io::config::RunConfig;

fn main() {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/two_interface.toml");
    let mut cfg = RunConfig::load(&path).unwrap();
    cfg.output.dir = std::env::temp_dir().join("phasefront_tracker_run");
    let data = cfg.initial_data().unwrap();
    let r = execute(&cfg, &data, 2).unwrap();
    let t = &r.trajectory;
    println!("nu = 2: {} initial fronts, {} events, clean = {}", t.initial.fronts, t.events.len(), t.clean());
    println!("generation cut-off k = {:?}, rho = {:.3e}, passes = {}", r.k, r.rho, r.passes);

    let mut by_solver: BTreeMap<&str, usize> = BTreeMap::new();
    for e in &t.events {
        *by_solver.entry(e.solver.label()).or_default() += 1;
    }
    println!("events by solver: {by_solver:?}");

    println!("{:>5} {:>7} {:>10} {:>10} {:>10}", "t", "fronts", "F", "Lbar", "composite");
    for s in &t.slices {
        println!(
            "{:>5} {:>7} {:>10.6} {:>10.6} {:>10.3e}",
            s.t,
            s.fronts.len(),
            s.functionals.f_total,
            s.functionals.lbar(),
            s.composite_mass()
        );
    }
    let a = persist(&cfg.output.dir, &r).unwrap();
    println!("artifacts in {}", a.dir.display());
}
