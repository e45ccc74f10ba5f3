//! Exact self-similar solution of a single-phase Riemann problem, used as
//! a reference for the tracked solutions.

use crate::error::{Error, Result};
use crate::riemann::{lax_riemann, FrontProto, ProtoKind};
use crate::tracker::init::l1_piece;
use crate::tracker::Slice;
use crate::waves::{Family, State};

/// Similarity solution issued from a jump at `x0` at time 0.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactRiemann {
    pub x0: f64,
    pub left: State,
    pub right: State,
    pub waves: Vec<FrontProto>,
}

impl ExactRiemann {
    pub fn new(x0: f64, left: State, right: State) -> Result<Self> {
        if left.lambda != right.lambda || left.a != right.a {
            return Err(Error::Contract("exact solution needs both states in one phase".into()));
        }
        Ok(ExactRiemann {
            x0,
            left,
            right,
            waves: lax_riemann(&left, &right)?,
        })
    }

    /// State at `(x, t)`, `t > 0`.
    pub fn state(&self, x: f64, t: f64) -> State {
        let xi = (x - self.x0) / t;
        let mut cur = self.left;
        for w in &self.waves {
            let (lo, hi) = w.speed_range;
            if xi < lo {
                return cur;
            }
            if xi < hi {
                return fan_state(&cur, w, xi);
            }
            cur = w.right;
        }
        cur
    }

    /// Points where the solution at time `t` is not smooth.
    pub fn breakpoints(&self, t: f64) -> Vec<f64> {
        let mut b = Vec::new();
        for w in &self.waves {
            b.push(self.x0 + w.speed_range.0 * t);
            b.push(self.x0 + w.speed_range.1 * t);
        }
        b.dedup();
        b
    }
}

/// State inside a rarefaction fan at similarity coordinate `xi`.
fn fan_state(left: &State, w: &FrontProto, xi: f64) -> State {
    let a = left.a;
    let (v, u) = match w.kind {
        ProtoKind::One => {
            let v = -a / xi;
            (v, left.u + a * (v / left.v).ln())
        }
        _ => {
            let v = a / xi;
            (v, left.u - a * (v / left.v).ln())
        }
    };
    State { v, u, ..*left }
}

/// Family of a wave of the exact solution; `None` for a 2-wave.
pub fn family_of(w: &FrontProto) -> Option<Family> {
    match w.kind {
        ProtoKind::One => Some(Family::One),
        ProtoKind::Three => Some(Family::Three),
        ProtoKind::Two => None,
    }
}

/// `∫|f − c|` with the interval split where a monotone `f` crosses `c`.
fn l1_monotone<F: Fn(f64) -> f64>(f: F, c: f64, lo: f64, hi: f64) -> f64 {
    let (fl, fh) = (f(lo) - c, f(hi) - c);
    if fl * fh < 0.0 {
        let (mut a, mut b) = (lo, hi);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if (f(m) - c) * fl > 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        l1_piece(&f, c, lo, a) + l1_piece(&f, c, a, hi)
    } else {
        l1_piece(&f, c, lo, hi)
    }
}

/// `∫_lo^hi (|v_h − v| + |u_h − u|) dx` between a tracked slice and the
/// exact solution at the slice time.
pub fn l1_distance(slice: &Slice, exact: &ExactRiemann, lo: f64, hi: f64) -> f64 {
    let t = slice.t;
    let mut cuts: Vec<f64> = slice.fronts.iter().map(|f| f.x).collect();
    cuts.extend(exact.breakpoints(t));
    cuts.retain(|&x| x > lo && x < hi);
    cuts.push(lo);
    cuts.push(hi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let s = slice.state_at(0.5 * (w[0] + w[1]));
        total += l1_monotone(|x| exact.state(x, t).v, s.v, w[0], w[1]);
        total += l1_monotone(|x| exact.state(x, t).u, s.u, w[0], w[1]);
    }
    total
}
