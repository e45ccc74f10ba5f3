//! Weak-form residuals of a tracked solution over space-time rectangles.
//!
//! For a rectangle `[x₁,x₂]×[t₁,t₂]` the residuals are the boundary
//! integrals `∮(v dx + u dt)` and `∮(u dx − p dt)`, evaluated exactly for
//! the piecewise-constant solution.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::tracker::{Segment, Trajectory};
use crate::waves::State;

/// Closed rectangle in the `(x, t)` plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rect {
    pub x1: f64,
    pub x2: f64,
    pub t1: f64,
    pub t2: f64,
}

/// Residuals on one rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RectResidual {
    pub rect: Rect,
    pub res_v: f64,
    pub res_u: f64,
    /// `∮ λ dx`; zero because λ does not move.
    pub res_lambda: f64,
    /// `Σ (|[u]| + |[p]|) Δt` over the fronts inside.
    pub local_tv: f64,
    pub contains_composite: bool,
    /// Only shock fronts cross the rectangle.
    pub shocks_only: bool,
    /// For rectangles with composites: `Σ 2(|d1|+|d3|)·scale·Δt`.
    pub composite_bound: f64,
}

impl RectResidual {
    pub fn max_residual(&self) -> f64 {
        self.res_v.abs().max(self.res_u.abs())
    }
}

/// Residuals over a set of rectangles.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub rects: Vec<RectResidual>,
    pub max_v: f64,
    pub max_u: f64,
    pub l1_v: f64,
    pub l1_u: f64,
}

impl ResidualReport {
    /// Largest residual over rectangles free of composite waves.
    pub fn max_off_composite(&self) -> f64 {
        self.rects
            .iter()
            .filter(|r| !r.contains_composite)
            .map(RectResidual::max_residual)
            .fold(0.0, f64::max)
    }
}

/// Segments alive at `t`, sorted by position; at the final time the
/// segments closed by the end of the run count as alive.
fn alive_at(segs: &[Segment], t: f64, end: f64) -> Vec<&Segment> {
    let mut v: Vec<&Segment> = segs
        .iter()
        .filter(|s| s.t0 <= t && (t < s.t1 || (t >= end && s.t1 >= end)))
        .collect();
    v.sort_by(|a, b| a.position(t).total_cmp(&b.position(t)).then(a.id.cmp(&b.id)));
    v
}

/// Pieces `(x_lo, x_hi, state)` of the solution at time `t` on `[x1, x2]`.
fn horizontal(segs: &[Segment], end: f64, t: f64, x1: f64, x2: f64) -> Result<Vec<(f64, f64, State)>> {
    let alive = alive_at(segs, t, end);
    let first = alive.first().ok_or_else(|| Error::Contract(format!("no fronts alive at t = {t}")))?;
    let mut out = Vec::new();
    let mut x = x1;
    let mut state = first.left;
    for s in &alive {
        let xs = s.position(t);
        if xs <= x1 {
            state = s.right;
            continue;
        }
        if xs >= x2 {
            break;
        }
        out.push((x, xs, state));
        x = xs;
        state = s.right;
    }
    out.push((x, x2, state));
    Ok(out)
}

/// Pieces `(t_lo, t_hi, state)` of the solution along `x` for `t ∈ [t1, t2]`.
fn vertical(segs: &[Segment], end: f64, x: f64, t1: f64, t2: f64) -> Result<Vec<(f64, f64, State)>> {
    let start = horizontal(segs, end, t1, x, x + 1.0)?[0].2;
    let mut crossings: Vec<(f64, State)> = Vec::new();
    for s in segs {
        if s.speed == 0.0 {
            continue;
        }
        let tc = s.t0 + (x - s.x0) / s.speed;
        if tc > t1 && tc < t2 && tc > s.t0 && tc < s.t1 {
            crossings.push((tc, if s.speed > 0.0 { s.left } else { s.right }));
        }
    }
    crossings.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out = Vec::with_capacity(crossings.len() + 1);
    let (mut t, mut state) = (t1, start);
    for (tc, st) in crossings {
        out.push((t, tc, state));
        t = tc;
        state = st;
    }
    out.push((t, t2, state));
    Ok(out)
}

/// Boundary-integral residuals on one rectangle.
pub fn boundary_residual(traj: &Trajectory, r: &Rect) -> Result<(f64, f64, f64)> {
    if !(r.x1 < r.x2 && r.t1 < r.t2) || r.t1 < 0.0 || r.t2 > traj.horizon {
        return Err(Error::Contract(format!("rectangle {r:?} lies outside the computed domain")));
    }
    let segs = &traj.segments;
    let end = traj.horizon;
    let hx = |t: f64| -> Result<(f64, f64, f64)> {
        let mut acc = (0.0, 0.0, 0.0);
        for (lo, hi, s) in horizontal(segs, end, t, r.x1, r.x2)? {
            acc.0 += s.v * (hi - lo);
            acc.1 += s.u * (hi - lo);
            acc.2 += s.lambda * (hi - lo);
        }
        Ok(acc)
    };
    let vt = |x: f64| -> Result<(f64, f64)> {
        let mut acc = (0.0, 0.0);
        for (lo, hi, s) in vertical(segs, end, x, r.t1, r.t2)? {
            acc.0 += s.u * (hi - lo);
            acc.1 += s.p() * (hi - lo);
        }
        Ok(acc)
    };
    let (bottom, top) = (hx(r.t1)?, hx(r.t2)?);
    let (left, right) = (vt(r.x1)?, vt(r.x2)?);
    // Counter-clockwise: bottom left→right, right upward, top right→left, left downward.
    let res_v = bottom.0 - top.0 + right.0 - left.0;
    let res_u = bottom.1 - top.1 - (right.1 - left.1);
    let res_lambda = bottom.2 - top.2;
    Ok((res_v, res_u, res_lambda))
}

/// Residuals as the sum over fronts of their Rankine–Hugoniot defects,
/// `Σ ∫ (−s[v] − [u]) dt` and `Σ ∫ (−s[u] + [p]) dt`.
pub fn segment_residual(traj: &Trajectory, r: &Rect) -> (f64, f64) {
    let (mut rv, mut ru) = (0.0, 0.0);
    for s in &traj.segments {
        let Some((ta, tb)) = time_inside(s, r) else { continue };
        let dt = tb - ta;
        let (l, q) = (s.left, s.right);
        rv += (-s.speed * (q.v - l.v) - (q.u - l.u)) * dt;
        ru += (-s.speed * (q.u - l.u) + (q.p() - l.p())) * dt;
    }
    // The boundary integrals carry the opposite sign.
    (-rv, -ru)
}

/// Time interval during which a segment is strictly inside the rectangle.
fn time_inside(s: &Segment, r: &Rect) -> Option<(f64, f64)> {
    let (mut ta, mut tb) = (s.t0.max(r.t1), s.t1.min(r.t2));
    if s.speed == 0.0 {
        if !(s.x0 > r.x1 && s.x0 < r.x2) {
            return None;
        }
    } else {
        let c1 = s.t0 + (r.x1 - s.x0) / s.speed;
        let c2 = s.t0 + (r.x2 - s.x0) / s.speed;
        ta = ta.max(c1.min(c2));
        tb = tb.min(c1.max(c2));
    }
    (tb > ta).then_some((ta, tb))
}

fn composite_scale(l: &State, r: &State) -> f64 {
    l.a.max(r.a).max(l.p().max(r.p()))
}

/// Evaluates every rectangle.
pub fn residual_check(traj: &Trajectory, rects: &[Rect]) -> Result<ResidualReport> {
    let mut out = Vec::with_capacity(rects.len());
    for r in rects {
        let (res_v, res_u, res_lambda) = boundary_residual(traj, r)?;
        if res_lambda.abs() > 1e-12 * (r.x2 - r.x1) {
            return Err(Error::Structural(format!("phase field moved inside {r:?}: ∮λdx = {res_lambda}")));
        }
        let mut local_tv = 0.0;
        let mut contains_composite = false;
        let mut shocks_only = true;
        let mut composite_bound = 0.0;
        for s in &traj.segments {
            let Some((ta, tb)) = time_inside(s, r) else { continue };
            let dt = tb - ta;
            local_tv += ((s.right.u - s.left.u).abs() + (s.right.p() - s.left.p()).abs()) * dt;
            if s.composite {
                contains_composite = true;
                shocks_only = false;
                let d = composite_mass_between(&s.left, &s.right);
                composite_bound += 2.0 * d * composite_scale(&s.left, &s.right) * (2.0 * d).exp() * dt;
            } else if !(s.speed.abs() > 0.0 && is_shock(s)) {
                shocks_only = false;
            }
        }
        out.push(RectResidual {
            rect: *r,
            res_v,
            res_u,
            res_lambda,
            local_tv,
            contains_composite,
            shocks_only,
            composite_bound,
        });
    }
    let max_v = out.iter().map(|r| r.res_v.abs()).fold(0.0, f64::max);
    let max_u = out.iter().map(|r| r.res_u.abs()).fold(0.0, f64::max);
    let l1_v = out.iter().map(|r| r.res_v.abs()).sum();
    let l1_u = out.iter().map(|r| r.res_u.abs()).sum();
    Ok(ResidualReport {
        rects: out,
        max_v,
        max_u,
        l1_v,
        l1_u,
    })
}

/// `|d1| + |d3|` of the composite joining `l` to `r`, read back from the
/// pressure and velocity jumps.
fn composite_mass_between(l: &State, r: &State) -> f64 {
    // u jumps by 2a₋d1 + 2a₊d3 and log p by −2d1 + 2d3.
    let du = r.u - l.u;
    let dlp = (r.p() / l.p()).ln();
    let (am, ap) = (l.a, r.a);
    let d3 = (du + am * dlp) / (2.0 * (am + ap));
    let d1 = d3 - 0.5 * dlp;
    d1.abs() + d3.abs()
}

fn is_shock(s: &Segment) -> bool {
    // A 1-front moving left is a shock when v drops across it; a 3-front
    // moving right when v rises.
    if s.speed < 0.0 {
        s.right.v < s.left.v
    } else {
        s.right.v > s.left.v
    }
}

/// `n × n` tiling of `[x_lo, x_hi] × [0, T]` with edges moved off event
/// times and off the interfaces.
pub fn auto_rectangles(traj: &Trajectory, n: usize) -> Vec<Rect> {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for s in &traj.segments {
        for t in [s.t0, s.t1] {
            let x = s.position(t);
            lo = lo.min(x);
            hi = hi.max(x);
        }
    }
    if !(lo < hi) {
        lo -= 1.0;
        hi += 1.0;
    }
    let pad = 0.05 * (hi - lo);
    let (lo, hi) = (lo - pad, hi + pad);
    let t_end = traj.horizon;
    let mut times: Vec<f64> = traj.events.iter().map(|e| e.time).collect();
    times.dedup();
    let min_gap = times
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|&g| g > 0.0)
        .fold(t_end / (4 * n.max(1)) as f64, f64::min);
    let shift_t = |t: f64| -> f64 {
        if t <= 0.0 || t >= t_end {
            return t;
        }
        let i = times.partition_point(|&e| e < t);
        let near = [i.checked_sub(1), Some(i)]
            .into_iter()
            .flatten()
            .filter_map(|j| times.get(j))
            .any(|&e| (e - t).abs() < 0.5 * min_gap);
        if near {
            let mut t2 = t;
            while times.iter().any(|&e| (e - t2).abs() < 0.25 * min_gap) {
                t2 += 0.5 * min_gap;
            }
            t2
        } else {
            t
        }
    };
    let ifaces = [traj.layout.a, traj.layout.b];
    let dx = (hi - lo) / n as f64;
    let shift_x = |x: f64| -> f64 {
        if ifaces.iter().any(|&c| (c - x).abs() < 1e-9 * dx.max(1.0)) {
            x + 1e-3 * dx
        } else {
            x
        }
    };
    let xs: Vec<f64> = (0..=n).map(|i| shift_x(lo + dx * i as f64)).collect();
    let ts: Vec<f64> = (0..=n).map(|j| shift_t(t_end * j as f64 / n as f64)).collect();
    let mut out = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            out.push(Rect {
                x1: xs[i],
                x2: xs[i + 1],
                t1: ts[j],
                t2: ts[j + 1],
            });
        }
    }
    out
}
