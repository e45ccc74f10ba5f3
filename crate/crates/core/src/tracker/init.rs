//! Piecewise-constant approximation of the initial data and the fronts it
//! generates at time zero.

use serde::Serialize;

use crate::data::{variation, InitialData, Profile};
use crate::error::{Error, Result};
use crate::front::{Front, FrontKind, Region};
use crate::riemann::{lax_riemann, CompositeWave, FrontProto, ProtoKind};
use crate::waves::{two_wave_strength, ACoefficients, Family, State};

/// Upper bound on the number of sampling cells.
pub const MAX_CELLS: usize = 400_000;

/// A front at time zero together with the states on both sides.
#[derive(Debug, Clone, PartialEq)]
pub struct PlacedFront {
    pub front: Front,
    pub left: State,
    pub right: State,
}

/// Piecewise-constant data: `values[i]` holds on `(breaks[i-1], breaks[i])`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledData {
    pub breaks: Vec<f64>,
    pub states: Vec<State>,
}

impl SampledData {
    pub fn state_at(&self, x: f64) -> State {
        self.states[self.breaks.partition_point(|&b| b <= x)]
    }

    /// `TV(log p)` over the whole line.
    pub fn tv_log_p(&self) -> f64 {
        self.states.windows(2).map(|w| (w[1].p().ln() - w[0].p().ln()).abs()).sum()
    }
}

/// Output of [`approximate_initial_data`].
#[derive(Debug, Clone, PartialEq)]
pub struct InitialApprox {
    pub fronts: Vec<PlacedFront>,
    pub sampled: SampledData,
    /// `‖(v, u) − (v^ν, u^ν)‖_{L¹}`.
    pub l1_error: f64,
    pub tv_log_p_exact: f64,
    pub tv_log_p_sampled: f64,
}

/// Whole-line `TV(log p)` of the exact data, interface jumps included.
pub fn tv_log_p_exact(data: &InitialData, coeffs: &ACoefficients) -> f64 {
    let ph = &data.phases;
    let av = [coeffs.a_l, coeffs.a_m, coeffs.a_r];
    let mut tv = variation(&data.v, f64::NEG_INFINITY, ph.a, f64::ln)
        + variation(&data.v, ph.a, ph.b, f64::ln)
        + variation(&data.v, ph.b, f64::INFINITY, f64::ln);
    for (i, x) in [ph.a, ph.b].into_iter().enumerate() {
        let left = 2.0 * av[i].ln() - data.v.eval_left(x).ln();
        let right = 2.0 * av[i + 1].ln() - data.v.eval(x).ln();
        tv += (right - left).abs();
    }
    tv
}

fn piecewise_breaks(p: &Profile) -> Vec<f64> {
    if p.is_piecewise_constant() {
        p.knots()
    } else {
        Vec::new()
    }
}

/// Sample points and cut locations.
fn sampling_grid(data: &InitialData, nu: u32) -> Result<Vec<f64>> {
    let ph = &data.phases;
    let mut cuts: Vec<f64> = vec![ph.a, ph.b];
    cuts.extend(piecewise_breaks(&data.v));
    cuts.extend(piecewise_breaks(&data.u));
    let smooth: Vec<&Profile> = [&data.v, &data.u].into_iter().filter(|p| !p.is_piecewise_constant()).collect();
    if smooth.is_empty() {
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        return Ok(cuts);
    }
    let tv: f64 = smooth.iter().map(|p| variation(p, f64::NEG_INFINITY, f64::INFINITY, |x| x)).sum();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in &smooth {
        if let Some((l, h)) = p.support() {
            lo = lo.min(l);
            hi = hi.max(h);
        }
    }
    cuts.extend([lo, hi]);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    if tv == 0.0 {
        return Ok(cuts);
    }
    // Midpoint sampling errs by at most h·TV per unit, so this width gives
    // an L¹ error of at most 1/(2ν).
    let h = 1.0 / (2.0 * nu as f64 * tv);
    let mut grid = Vec::new();
    for w in cuts.windows(2) {
        grid.push(w[0]);
        if w[0] >= lo && w[1] <= hi {
            let n = ((w[1] - w[0]) / h).ceil() as usize;
            if grid.len() + n > MAX_CELLS {
                return Err(Error::Data(format!("sampling needs more than {MAX_CELLS} cells")));
            }
            for i in 1..n {
                grid.push(w[0] + (w[1] - w[0]) * i as f64 / n as f64);
            }
        }
    }
    grid.push(*cuts.last().unwrap());
    Ok(grid)
}

fn gauss_legendre_8() -> ([f64; 8], [f64; 8]) {
    (
        [
            -0.960_289_856_497_536_2,
            -0.796_666_477_413_626_7,
            -0.525_532_409_916_329,
            -0.183_434_642_495_649_8,
            0.183_434_642_495_649_8,
            0.525_532_409_916_329,
            0.796_666_477_413_626_7,
            0.960_289_856_497_536_2,
        ],
        [
            0.101_228_536_290_376_26,
            0.222_381_034_453_374_47,
            0.313_706_645_877_887_3,
            0.362_683_783_378_362,
            0.362_683_783_378_362,
            0.313_706_645_877_887_3,
            0.222_381_034_453_374_47,
            0.101_228_536_290_376_26,
        ],
    )
}

/// `∫_lo^hi |f(x) − c| dx` for `f` smooth on the interval.
pub fn l1_piece<F: Fn(f64) -> f64>(f: F, c: f64, lo: f64, hi: f64) -> f64 {
    if !(hi > lo) {
        return 0.0;
    }
    let (xs, ws) = gauss_legendre_8();
    let (m, r) = (0.5 * (lo + hi), 0.5 * (hi - lo));
    xs.iter().zip(ws).map(|(&x, w)| w * (f(m + r * x) - c).abs()).sum::<f64>() * r
}

fn l1_error(data: &InitialData, sampled: &SampledData) -> f64 {
    let mut knots: Vec<f64> = data.v.knots();
    knots.extend(data.u.knots());
    knots.extend(&sampled.breaks);
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    let mut err = 0.0;
    for w in knots.windows(2) {
        let s = sampled.state_at(0.5 * (w[0] + w[1]));
        err += l1_piece(|x| data.v.eval(x), s.v, w[0], w[1]);
        err += l1_piece(|x| data.u.eval(x), s.u, w[0], w[1]);
    }
    err
}

fn make_front(id: &mut u64, kind: FrontKind, x: f64, speed: f64, region: Region) -> Front {
    let f = Front {
        id: *id,
        kind,
        x0: x,
        t0: 0.0,
        speed,
        generation: 1,
        birth_time: 0.0,
        region,
    };
    *id += 1;
    f
}

/// Family of a moving prototype.
pub(crate) fn proto_family(p: &FrontProto) -> Family {
    match p.kind {
        ProtoKind::One => Family::One,
        _ => Family::Three,
    }
}

/// Splits a rarefaction of size `ε >= σ` into `⌊ε/σ⌋ + 1` equal pieces,
/// each travelling at the characteristic speed of its right state.
pub fn split_rarefaction(p: &FrontProto, sigma: f64) -> Vec<FrontProto> {
    if !(p.strength >= sigma) || p.kind == ProtoKind::Two {
        return vec![*p];
    }
    let family = proto_family(p);
    let n = (p.strength / sigma).floor() as usize + 1;
    let piece = p.strength / n as f64;
    let mut out = Vec::with_capacity(n);
    let mut left = p.left;
    for i in 0..n {
        let proto = if i + 1 == n {
            FrontProto::between(family, piece, &left, &p.right)
        } else {
            FrontProto::moving(family, piece, &left)
        };
        left = proto.right;
        out.push(proto);
    }
    out
}

fn push_protos(out: &mut Vec<PlacedFront>, id: &mut u64, protos: &[FrontProto], x: f64, sigma: f64, data: &InitialData) {
    for p in protos {
        for q in split_rarefaction(p, sigma) {
            let family = proto_family(&q);
            let region = Region::of(x, q.speed, data.phases.a, data.phases.b);
            let front = make_front(id, FrontKind::Wave { family, strength: q.strength }, x, q.speed, region);
            out.push(PlacedFront {
                front,
                left: q.left,
                right: q.right,
            });
        }
    }
}

/// Builds the piecewise-constant approximation and solves every jump.
///
/// Piecewise-constant data is used as is. Smooth built-ins are sampled at
/// cell midpoints on a grid aligned with the interfaces; the cell width is
/// chosen from the data variation so that the `L¹` error stays below `1/ν`.
/// At each interface the jump is replaced by a pure 2-wave followed, a
/// short distance to the right, by a Riemann problem inside the new phase.
pub fn approximate_initial_data(data: &InitialData, coeffs: &ACoefficients, nu: u32, sigma: f64) -> Result<InitialApprox> {
    data.validate()?;
    if nu == 0 {
        return Err(Error::Contract("ν must be at least 1".into()));
    }
    let grid = sampling_grid(data, nu)?;
    let ph = data.phases;
    let state_in = |x: f64| -> Result<State> {
        let v = data.v.eval(x);
        if v < data.v_lower {
            return Err(Error::Data(format!("sampled volume {v} at x = {x} is below the lower bound {}", data.v_lower)));
        }
        State::new(v, data.u.eval(x), ph.lambda_at(x), data.a_at(x, coeffs))
    };
    let mut states = Vec::with_capacity(grid.len() + 1);
    if grid.is_empty() {
        states.push(state_in(0.0)?);
    } else {
        states.push(state_in(grid[0] - 1.0)?);
        for w in grid.windows(2) {
            states.push(state_in(0.5 * (w[0] + w[1]))?);
        }
        states.push(state_in(grid[grid.len() - 1] + 1.0)?);
    }
    let sampled = SampledData {
        breaks: grid.clone(),
        states: states.clone(),
    };

    let mut fronts = Vec::new();
    let mut id = 0u64;
    for (j, &x) in grid.iter().enumerate() {
        let (left, right) = (states[j], states[j + 1]);
        if x == ph.a || x == ph.b {
            let delta = two_wave_strength(left.a, right.a);
            let mut mid = left.across_phase(right.lambda, right.a);
            // Pressure continuous up to roundoff: no Riemann problem behind.
            if mid.rel_dist(&right) < 1e-14 {
                mid = right;
            }
            let comp = CompositeWave::pure(delta, x);
            let front = make_front(&mut id, FrontKind::Composite(comp), x, 0.0, Region::M);
            fronts.push(PlacedFront { front, left, right: mid });
            if mid != right {
                let next_gap = grid.get(j + 1).map_or(1.0, |n| n - x);
                let kappa = 1e-3 * next_gap.min(1.0);
                let protos = lax_riemann(&mid, &right)?;
                push_protos(&mut fronts, &mut id, &protos, x + kappa, sigma, data);
            }
        } else if left.v != right.v || left.u != right.u {
            let protos = lax_riemann(&left, &right)?;
            push_protos(&mut fronts, &mut id, &protos, x, sigma, data);
        }
    }
    let l1 = l1_error(data, &sampled);
    Ok(InitialApprox {
        fronts,
        tv_log_p_exact: tv_log_p_exact(data, coeffs),
        tv_log_p_sampled: sampled.tv_log_p(),
        sampled,
        l1_error: l1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Builtin, PhaseLayout};

    fn layout() -> PhaseLayout {
        PhaseLayout {
            lambda_l: 0.1,
            lambda_m: 0.5,
            lambda_r: 0.9,
            a: -1.0,
            b: 1.0,
        }
    }

    #[test]
    fn constant_data_gives_two_composites() {
        let coeffs = ACoefficients::new(1.0, 1.0, 1.0).unwrap();
        let data = InitialData {
            v: Profile::constant(1.0),
            u: Profile::constant(0.0),
            phases: layout(),
            v_lower: 0.5,
        };
        let init = approximate_initial_data(&data, &coeffs, 1, 0.1).unwrap();
        assert_eq!(init.fronts.len(), 2);
        assert!(init.fronts.iter().all(|f| f.front.is_composite()));
        assert_eq!(init.l1_error, 0.0);
    }

    #[test]
    fn rarefaction_split_count() {
        let sigma = 0.1;
        let left = State::new(1.0, 0.0, 0.5, 1.0).unwrap();
        let p = FrontProto::moving(Family::One, 3.5 * sigma, &left);
        let parts = split_rarefaction(&p, sigma);
        assert_eq!(parts.len(), 4);
        for q in &parts {
            assert!((q.strength - 0.875 * sigma).abs() < 1e-15);
        }
        assert!(parts.windows(2).all(|w| w[0].speed < w[1].speed));
        assert_eq!(parts.last().unwrap().right, p.right);
    }

    #[test]
    fn smooth_sampling_respects_bounds() {
        let coeffs = ACoefficients::new(1.2, 1.0, 1.1).unwrap();
        let data = InitialData {
            v: Profile::Builtin(Builtin::Sine {
                start: -2.0,
                end: 2.0,
                base: 1.0,
                amplitude: 0.1,
                periods: 2.0,
            }),
            u: Profile::Builtin(Builtin::Bump {
                center: 0.3,
                width: 1.0,
                base: 0.0,
                amplitude: 0.05,
            }),
            phases: layout(),
            v_lower: 0.5,
        };
        for nu in [1, 2, 4] {
            let init = approximate_initial_data(&data, &coeffs, nu, 0.05).unwrap();
            assert!(init.l1_error <= 1.0 / nu as f64, "ν={nu}: {}", init.l1_error);
            assert!(init.tv_log_p_sampled <= init.tv_log_p_exact + 1e-12);
        }
    }
}
