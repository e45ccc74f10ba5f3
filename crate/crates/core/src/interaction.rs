//! Resolution of binary interactions.
//!
//! A moving wave can meet a composite wave (Accurate or Simplified solver),
//! another wave of its own family, or a wave of the other family. Each
//! resolution returns the outgoing fronts together with the constant states
//! between them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::riemann::{pre_riemann, solve_theta_system, CompositeWave, FrontProto, SolverKind};
use crate::roots;
use crate::waves::{apply, h, CurveKind, Family, State};

/// Which rule resolved an interaction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SolverUsed {
    Accurate,
    Simplified,
    SameFamily,
    CrossFamily,
}

impl SolverUsed {
    pub fn label(self) -> &'static str {
        match self {
            SolverUsed::Accurate => "accurate",
            SolverUsed::Simplified => "simplified",
            SolverUsed::SameFamily => "same_family",
            SolverUsed::CrossFamily => "cross_family",
        }
    }
}

/// An outgoing front: a moving wave or the (possibly updated) composite.
#[derive(Debug, Clone, PartialEq)]
pub enum Outgoing {
    Moving(FrontProto),
    Composite(CompositeWave),
}

/// Result of one interaction.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionOutcome {
    /// Outgoing fronts from left to right.
    pub outgoing: Vec<Outgoing>,
    /// Constant states, one more than `outgoing`.
    pub states: Vec<State>,
    /// Strength of the wave of the same family as the incoming one.
    pub transmitted_strength: f64,
    /// Strength of the wave of the other family (absorbed for Simplified).
    pub reflected_strength: f64,
    pub solver_used: SolverUsed,
    /// `|ε₀ − δ₀|`, the change of the composite wave.
    pub delta_composite: f64,
}

impl InteractionOutcome {
    /// The updated composite, if this interaction involved one.
    pub fn composite(&self) -> Option<&CompositeWave> {
        self.outgoing.iter().find_map(|o| match o {
            Outgoing::Composite(c) => Some(c),
            Outgoing::Moving(_) => None,
        })
    }
}

fn composite_states(comp: &CompositeWave, left: &State, right: &State) -> (State, State) {
    (
        apply(left, Family::One, CurveKind::Integral, comp.d1),
        apply(right, Family::Three, CurveKind::Integral, -comp.d3),
    )
}

fn check_threshold(inc: f64, rho: f64, accurate: bool) -> Result<()> {
    let ok = if accurate { inc.abs() >= rho } else { inc.abs() < rho };
    if ok {
        Ok(())
    } else {
        Err(Error::Contract(format!(
            "{} solver used for incident strength {inc} with threshold {rho}",
            if accurate { "accurate" } else { "simplified" }
        )))
    }
}

/// Accurate solver at a composite wave.
///
/// `left`/`right` are the extreme states of the local problem: for a 3-wave
/// coming from the left, `left` is the state before it and `right` the state
/// after the composite; symmetrically for a 1-wave from the right. Requires
/// `|inc_strength| >= rho`; pass `rho = 0` to skip the threshold.
pub fn interact_composite_accurate(
    comp: &CompositeWave,
    inc_family: Family,
    inc_strength: f64,
    left: &State,
    right: &State,
    rho: f64,
) -> Result<InteractionOutcome> {
    check_threshold(inc_strength, rho, true)?;
    let (tl, tr) = composite_states(comp, left, right);
    let t = pre_riemann(&tl, &tr, SolverKind::LL)?;
    let p = apply(left, Family::One, CurveKind::Lax, t.eps1);
    let q = comp.apply_to(&p, right.lambda, right.a);
    let (transmitted, reflected) = match inc_family {
        Family::Three => (t.eps3, t.eps1),
        Family::One => (t.eps1, t.eps3),
    };
    Ok(InteractionOutcome {
        outgoing: vec![
            Outgoing::Moving(FrontProto::between(Family::One, t.eps1, left, &p)),
            Outgoing::Composite(comp.clone()),
            Outgoing::Moving(FrontProto::between(Family::Three, t.eps3, &q, right)),
        ],
        states: vec![*left, p, q, *right],
        transmitted_strength: transmitted,
        reflected_strength: reflected,
        solver_used: SolverUsed::Accurate,
        delta_composite: 0.0,
    })
}

/// Simplified solver at a composite wave: the reflected wave is absorbed
/// into the composite along an integral curve. Requires
/// `|inc_strength| < rho`; pass `rho = f64::INFINITY` to skip the check.
///
/// Generation orders of the composite are left untouched; the tracker sets
/// them.
pub fn interact_composite_simplified(
    comp: &CompositeWave,
    inc_family: Family,
    inc_strength: f64,
    left: &State,
    right: &State,
    rho: f64,
) -> Result<InteractionOutcome> {
    check_threshold(inc_strength, rho, false)?;
    let (tl, tr) = composite_states(comp, left, right);
    let mut c = comp.clone();
    match inc_family {
        Family::Three => {
            let t = pre_riemann(&tl, &tr, SolverKind::IL)?;
            c.d1 += t.eps1;
            let q = c.apply_to(left, right.lambda, right.a);
            Ok(InteractionOutcome {
                outgoing: vec![
                    Outgoing::Composite(c),
                    Outgoing::Moving(FrontProto::between(Family::Three, t.eps3, &q, right)),
                ],
                states: vec![*left, q, *right],
                transmitted_strength: t.eps3,
                reflected_strength: t.eps1,
                solver_used: SolverUsed::Simplified,
                delta_composite: t.eps1.abs(),
            })
        }
        Family::One => {
            let t = pre_riemann(&tl, &tr, SolverKind::LI)?;
            c.d3 += t.eps3;
            let p = apply(left, Family::One, CurveKind::Lax, t.eps1);
            Ok(InteractionOutcome {
                outgoing: vec![
                    Outgoing::Moving(FrontProto::between(Family::One, t.eps1, left, &p)),
                    Outgoing::Composite(c),
                ],
                states: vec![*left, p, *right],
                transmitted_strength: t.eps1,
                reflected_strength: t.eps3,
                solver_used: SolverUsed::Simplified,
                delta_composite: t.eps3.abs(),
            })
        }
    }
}

/// Two waves of the same family: `alpha` on the left, `beta` on the right,
/// both in the phase of `left`.
pub fn interact_same_family(alpha: f64, beta: f64, family: Family, left: &State) -> Result<InteractionOutcome> {
    let a_big = match family {
        Family::Three => alpha + beta,
        Family::One => -(alpha + beta),
    };
    let b_big = left.a * (h(alpha) + h(beta));
    let (e1, e3) = solve_theta_system(a_big, b_big, left.a, left.a, SolverKind::LL.choice())?;
    let mid = apply(left, Family::One, CurveKind::Lax, e1);
    let right = apply(&mid, Family::Three, CurveKind::Lax, e3);
    let (transmitted, reflected) = match family {
        Family::Three => (e3, e1),
        Family::One => (e1, e3),
    };
    Ok(InteractionOutcome {
        outgoing: vec![
            Outgoing::Moving(FrontProto::between(Family::One, e1, left, &mid)),
            Outgoing::Moving(FrontProto::between(Family::Three, e3, &mid, &right)),
        ],
        states: vec![*left, mid, right],
        transmitted_strength: transmitted,
        reflected_strength: reflected,
        solver_used: SolverUsed::SameFamily,
        delta_composite: 0.0,
    })
}

/// A 3-wave (left) meets a 1-wave (right); they swap unchanged.
pub fn interact_cross_family(f1_strength: f64, f3_strength: f64, left: &State) -> InteractionOutcome {
    let mid = apply(left, Family::One, CurveKind::Lax, f1_strength);
    let right = apply(&mid, Family::Three, CurveKind::Lax, f3_strength);
    InteractionOutcome {
        outgoing: vec![
            Outgoing::Moving(FrontProto::between(Family::One, f1_strength, left, &mid)),
            Outgoing::Moving(FrontProto::between(Family::Three, f3_strength, &mid, &right)),
        ],
        states: vec![*left, mid, right],
        transmitted_strength: f1_strength,
        reflected_strength: f3_strength,
        solver_used: SolverUsed::CrossFamily,
        delta_composite: 0.0,
    }
}

/// `c(z) = (cosh z − 1)/(cosh z + 1) = tanh²(z/2)`.
pub fn damping_c(z: f64) -> f64 {
    let t = (0.5 * z).tanh();
    t * t
}

/// Inverse of [`damping_c`] on `[0, 1)`.
pub fn damping_c_inv(y: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&y) {
        return Err(Error::Domain(format!("c⁻¹ needs y in [0,1), got {y}")));
    }
    Ok(2.0 * y.sqrt().atanh())
}

/// `sinh x / x`, with the removable singularity handled.
pub fn sinhc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 + x2 / 6.0 * (1.0 + x2 / 20.0)
    } else {
        x.sinh() / x
    }
}

/// `C_o(ρ) = sinh ρ / ρ`.
pub fn c_o(rho: f64) -> f64 {
    sinhc(rho)
}

/// Inverse of [`c_o`] for values `>= 1`.
pub fn c_o_inv(y: f64) -> f64 {
    if y <= 1.0 {
        return 0.0;
    }
    let mut hi = 1.0;
    while c_o(hi) < y {
        hi *= 2.0;
    }
    roots::largest_true(|r| c_o(r) <= y, 0.0, hi)
}

/// `(2 + δ)/(2 − δ)`, the ratio `a₊/a₋` of a 2-wave of strength `δ`.
pub fn k_of_delta(delta: f64) -> f64 {
    (2.0 + delta) / (2.0 - delta)
}

/// Refined damping factor `Θ(δ, z) = (k+1)/(k + cosh z) · sinh z / z`.
pub fn theta_refined(delta: f64, z: f64) -> f64 {
    let k = k_of_delta(delta);
    if z > 300.0 {
        return (k + 1.0) / z;
    }
    (k + 1.0) / (k + z.cosh()) * sinhc(z)
}

/// Bound on the reflected strength of the Accurate solver.
pub fn accurate_bound(inc: f64, delta: f64) -> f64 {
    0.5 * (inc * delta).abs()
}

/// Bound on the absorbed strength of the Simplified solver; the `C_o`
/// branch applies to shocks heading into the lower sound speed.
pub fn simplified_bound(family: Family, inc: f64, delta: f64, rho: f64) -> f64 {
    let shock_branch = inc < 0.0 && ((family == Family::One && delta > 0.0) || (family == Family::Three && delta < 0.0));
    let base = 0.5 * (inc * delta).abs();
    if shock_branch {
        c_o(rho) * base
    } else {
        base
    }
}

/// Outcome of [`sharpness_probe`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sharpness {
    HoldsEverywhere,
    FailsNearZero,
}

/// Detailed result of a sharpness scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SharpnessScan {
    pub delta: f64,
    pub verdict: Sharpness,
    /// Largest observed `|ε₃| / (½ δ |δ₁|)`.
    pub max_ratio: f64,
    /// Smallest sample where the bound failed, if any.
    pub first_failure: Option<f64>,
    /// Leading coefficient of the small-`|δ₁|` expansion.
    pub a_k1: f64,
}

/// Leading expansion coefficient; negative exactly when `k > 2 + √5`.
pub fn a_k1(k: f64) -> f64 {
    -k * (k - 1.0) * (k * k - 4.0 * k - 1.0) / (6.0 * (k + 1.0).powi(3))
}

/// Absorbed strength `y = |ε₃|` for a 1-shock `x = |δ₁|` at a composite with
/// ratio `k`: root of `k y + sinh(x + y) − k sinh x = 0`.
pub fn absorbed_for_shock(k: f64, x: f64) -> Result<f64> {
    let f = |y: f64| k * y + (x + y).sinh() - k * x.sinh();
    let df = |y: f64| k + (x + y).cosh();
    roots::newton_bisect(f, df, 1e-17 * x * (k + 1.0))
}

/// Scans `|δ₁|` on 200 log-spaced points of `[1e-6, x_max]` and checks
/// `|ε₃| <= ½ δ |δ₁|` for 1-shocks at a composite of strength `delta`.
pub fn sharpness_scan(delta: f64, x_max: f64) -> Result<SharpnessScan> {
    if !(delta > 0.0 && delta < 2.0) {
        return Err(Error::Domain(format!("δ must lie in (0,2), got {delta}")));
    }
    let k = k_of_delta(delta);
    let n = 200;
    let (l0, l1) = (1e-6f64.ln(), x_max.ln());
    let mut max_ratio = 0.0f64;
    let mut first_failure = None;
    for i in 0..n {
        let x = (l0 + (l1 - l0) * i as f64 / (n - 1) as f64).exp();
        let y = absorbed_for_shock(k, x)?;
        let ratio = y / (0.5 * delta * x);
        max_ratio = max_ratio.max(ratio);
        if ratio > 1.0 + 1e-10 && first_failure.is_none() {
            first_failure = Some(x);
        }
    }
    let ak = a_k1(k);
    let analytic_fail = k > (2.0 + 5f64.sqrt()) * (1.0 + 1e-12);
    let verdict = if first_failure.is_some() || analytic_fail {
        Sharpness::FailsNearZero
    } else {
        Sharpness::HoldsEverywhere
    };
    Ok(SharpnessScan {
        delta,
        verdict,
        max_ratio,
        first_failure,
        a_k1: ak,
    })
}

/// Verdict of [`sharpness_scan`] over `[1e-6, 1]`.
pub fn sharpness_probe(delta: f64) -> Result<Sharpness> {
    Ok(sharpness_scan(delta, 1.0)?.verdict)
}
