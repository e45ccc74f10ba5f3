//! Weak-form residuals of a tracked solution on a grid of rectangles,
//! computed as boundary integrals and as sums of jump defects.

use std::path::PathBuf;

use phasefront::io::commands::execute;
use phasefront::io::config::RunConfig;
use phasefront::io::residual::{auto_rectangles, boundary_residual, segment_residual};

fn main() {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/two_interface.toml");
    let mut cfg = RunConfig::load(&path).unwrap();
    cfg.run.horizon = 1.0;
    let data = cfg.initial_data().unwrap();
    let r = execute(&cfg, &data, 1).unwrap();
    let t = &r.trajectory;
    let sigma = t.params.sigma;
    let rep = r.residuals.as_ref().unwrap();
    println!("{} rectangles, max |res_v| = {:.3e}, max |res_u| = {:.3e}", rep.rects.len(), rep.max_v, rep.max_u);
    let worst = rep
        .rects
        .iter()
        .filter(|q| !q.contains_composite && q.local_tv > 0.0)
        .map(|q| q.max_residual() / (sigma * q.local_tv))
        .fold(0.0, f64::max);
    println!("max residual / (sigma * local TV) off composites: {worst:.3}");

    let mut gap = 0.0f64;
    for rect in auto_rectangles(t, 6) {
        let (bv, bu, _) = boundary_residual(t, &rect).unwrap();
        let (sv, su) = segment_residual(t, &rect);
        gap = gap.max((bv - sv).abs()).max((bu - su).abs());
    }
    println!("boundary vs jump-sum routes differ by at most {gap:.2e}");
}
