//! States, the pressure law and the elementary wave curves.
//!
//! The system in Lagrangian coordinates is
//!
//! ```text
//! v_t - u_x = 0,   u_t + p(v, λ)_x = 0,   λ_t = 0,   p = a(λ)² / v.
//! ```
//!
//! Waves of families 1 and 3 are parameterized by signed strengths
//! (rarefactions positive, shocks negative); a 2-wave changes `a` while
//! keeping `p` and `u`.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A point of the state space together with the cached sound coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub v: f64,
    pub u: f64,
    pub lambda: f64,
    pub a: f64,
}

impl State {
    /// Builds a state, checking `v > 0`, `a > 0` and `0 <= λ <= 1`.
    pub fn new(v: f64, u: f64, lambda: f64, a: f64) -> Result<Self> {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Domain(format!("specific volume must be positive, got {v}")));
        }
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::Domain(format!("sound coefficient must be positive, got {a}")));
        }
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::Domain(format!("phase fraction must lie in [0,1], got {lambda}")));
        }
        if !u.is_finite() {
            return Err(Error::Domain("velocity must be finite".into()));
        }
        Ok(State { v, u, lambda, a })
    }

    /// State with prescribed pressure instead of volume.
    pub fn from_pressure(p: f64, u: f64, lambda: f64, a: f64) -> Result<Self> {
        if !(p > 0.0) {
            return Err(Error::Domain(format!("pressure must be positive, got {p}")));
        }
        State::new(a * a / p, u, lambda, a)
    }

    pub fn p(&self) -> f64 {
        self.a * self.a / self.v
    }

    /// Same pressure and velocity in another phase.
    pub fn across_phase(&self, lambda: f64, a: f64) -> State {
        State {
            v: self.v * (a / self.a) * (a / self.a),
            u: self.u,
            lambda,
            a,
        }
    }

    /// Relative distance in `(v, u)` used by closure checks.
    pub fn rel_dist(&self, other: &State) -> f64 {
        let dv = (self.v - other.v).abs() / self.v.abs().max(other.v.abs());
        let du = (self.u - other.u).abs() / self.u.abs().max(other.u.abs()).max(1.0);
        dv.max(du)
    }
}

/// Sound coefficients `a(λ_ℓ)`, `a(λ_m)`, `a(λ_r)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ACoefficients {
    pub a_l: f64,
    pub a_m: f64,
    pub a_r: f64,
}

impl ACoefficients {
    /// Requires positive values with `a_m <= min(a_l, a_r)`; equality is
    /// accepted so that single-phase data fits the same pipeline.
    pub fn new(a_l: f64, a_m: f64, a_r: f64) -> Result<Self> {
        if !(a_l > 0.0 && a_m > 0.0 && a_r > 0.0) {
            return Err(Error::Domain("sound coefficients must be positive".into()));
        }
        if a_m > a_l.min(a_r) {
            return Err(Error::Domain(format!(
                "middle coefficient {a_m} must not exceed min({a_l}, {a_r})"
            )));
        }
        Ok(ACoefficients { a_l, a_m, a_r })
    }

    /// Signed strength η of the left interface (≤ 0).
    pub fn eta(&self) -> f64 {
        two_wave_strength(self.a_l, self.a_m)
    }

    /// Signed strength ζ of the right interface (≥ 0).
    pub fn zeta(&self) -> f64 {
        two_wave_strength(self.a_m, self.a_r)
    }
}

/// Family of a moving wave.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    One,
    Three,
}

impl Family {
    pub fn index(self) -> u8 {
        match self {
            Family::One => 1,
            Family::Three => 3,
        }
    }
}

/// Which curve a 1- or 3-wave follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurveKind {
    Lax,
    Integral,
}

/// Wave family together with the curve kind where it applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveFamily {
    One(CurveKind),
    Two,
    Three(CurveKind),
}

/// `p = a² / v`.
pub fn pressure(v: f64, a: f64) -> Result<f64> {
    if !(v > 0.0 && a > 0.0) {
        return Err(Error::Domain(format!("pressure needs v > 0 and a > 0, got v={v}, a={a}")));
    }
    Ok(a * a / v)
}

/// Characteristic speeds `(-a/v, 0, a/v)`.
pub fn eigenvalues(s: &State) -> (f64, f64, f64) {
    let c = s.a / s.v;
    (-c, 0.0, c)
}

/// `h(ε) = ε` for `ε >= 0`, `sinh ε` otherwise.
pub fn h(eps: f64) -> f64 {
    if eps >= 0.0 {
        eps
    } else {
        eps.sinh()
    }
}

/// Derivative of [`h`].
pub fn h_prime(eps: f64) -> f64 {
    if eps >= 0.0 {
        1.0
    } else {
        eps.cosh()
    }
}

/// Strength of a 1- or 3-wave joining pressures `p_from -> p_to`.
pub fn strength_1_3(p_from: f64, p_to: f64, family: Family) -> Result<f64> {
    if !(p_from > 0.0 && p_to > 0.0) {
        return Err(Error::Domain("pressures must be positive".into()));
    }
    // Volume form: ε₁ = ½ log(v_to/v_from), ε₃ = ½ log(v_from/v_to), v ∝ 1/p.
    let half_log = 0.5 * (p_from / p_to).ln();
    Ok(match family {
        Family::One => half_log,
        Family::Three => -half_log,
    })
}

/// `2 (a₊ − a₋) / (a₊ + a₋)`.
pub fn two_wave_strength(a_minus: f64, a_plus: f64) -> f64 {
    2.0 * (a_plus - a_minus) / (a_plus + a_minus)
}

/// Inverse of [`two_wave_strength`] in its second argument.
pub fn two_wave_target(a_minus: f64, eps: f64) -> Result<f64> {
    if !(eps.abs() < 2.0) {
        return Err(Error::Domain(format!("2-wave strength {eps} not in (-2, 2)")));
    }
    Ok(a_minus * (2.0 + eps) / (2.0 - eps))
}

/// Moves `s` along the wave curve of `family` by strength `eps`.
///
/// A 2-wave keeps `λ` untouched; use [`State::across_phase`] when the
/// target phase is known.
pub fn apply_wave(s: &State, family: WaveFamily, eps: f64) -> Result<State> {
    let theta = |kind: CurveKind| match kind {
        CurveKind::Lax => h(eps),
        CurveKind::Integral => eps,
    };
    Ok(match family {
        WaveFamily::One(kind) => State {
            v: s.v * (2.0 * eps).exp(),
            u: s.u + 2.0 * s.a * theta(kind),
            ..*s
        },
        WaveFamily::Three(kind) => State {
            v: s.v * (-2.0 * eps).exp(),
            u: s.u + 2.0 * s.a * theta(kind),
            ..*s
        },
        WaveFamily::Two => {
            let a = two_wave_target(s.a, eps)?;
            s.across_phase(s.lambda, a)
        }
    })
}

/// Shorthand for a Lax or integral move of a moving family.
pub fn apply(s: &State, family: Family, kind: CurveKind, eps: f64) -> State {
    let wf = match family {
        Family::One => WaveFamily::One(kind),
        Family::Three => WaveFamily::Three(kind),
    };
    apply_wave(s, wf, eps).expect("families 1 and 3 are always realizable")
}

/// Rankine–Hugoniot speed of a shock joining `left` to `right` in one phase.
///
/// For `p = a²/v` the jump relation reduces to `|s| = a / sqrt(v₋ v₊)`.
pub fn shock_speed(left: &State, right: &State, family: Family) -> f64 {
    let c = left.a / (left.v * right.v).sqrt();
    match family {
        Family::One => -c,
        Family::Three => c,
    }
}

/// Characteristic speed of `family` at `s`.
pub fn char_speed(s: &State, family: Family) -> f64 {
    let (e1, _, e3) = eigenvalues(s);
    match family {
        Family::One => e1,
        Family::Three => e3,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(v: f64, u: f64, a: f64) -> State {
        State::new(v, u, 0.5, a).unwrap()
    }

    #[test]
    fn pressure_values() {
        assert_eq!(pressure(1.0, 1.0).unwrap(), 1.0);
        assert_eq!(pressure(2.0, 1.0).unwrap(), 0.5);
        assert_eq!(pressure(0.25, 0.5).unwrap(), 1.0);
        assert!(pressure(0.0, 1.0).is_err());
        assert!(pressure(1.0, -1.0).is_err());
    }

    #[test]
    fn eigenvalue_values() {
        assert_eq!(eigenvalues(&st(1.0, 0.0, 1.0)), (-1.0, 0.0, 1.0));
        assert_eq!(eigenvalues(&st(2.0, 0.0, 1.0)), (-0.5, 0.0, 0.5));
        assert_eq!(eigenvalues(&st(0.5, 0.0, 2.0)), (-4.0, 0.0, 4.0));
    }

    #[test]
    fn h_values() {
        assert_eq!(h(0.0), 0.0);
        assert_eq!(h(0.3), 0.3);
        assert!((h(-1.0) + 1.1752011936438014).abs() < 1e-15);
    }

    #[test]
    fn strengths() {
        let e2 = 1f64.exp().powi(2);
        assert_eq!(strength_1_3(2.0, 2.0, Family::Three).unwrap(), 0.0);
        // Pressure falls across a 3-shock read left to right, rises across a 1-shock.
        assert!((strength_1_3(e2, 1.0, Family::Three).unwrap() + 1.0).abs() < 1e-15);
        assert!((strength_1_3(1.0, e2, Family::One).unwrap() + 1.0).abs() < 1e-15);
        assert!((strength_1_3(1.0, e2, Family::Three).unwrap() - 1.0).abs() < 1e-15);
        assert!(strength_1_3(-1.0, 1.0, Family::One).is_err());
        assert_eq!(two_wave_strength(1.0, 1.0), 0.0);
        assert_eq!(two_wave_strength(1.0, 3.0), 1.0);
        assert_eq!(two_wave_strength(3.0, 1.0), -1.0);
    }

    #[test]
    fn apply_examples() {
        let u0 = st(1.0, 0.0, 1.0);
        let w = apply_wave(&u0, WaveFamily::Three(CurveKind::Lax), -1.0).unwrap();
        assert!((w.v - 1f64.exp().powi(2)).abs() < 1e-14);
        assert!((w.u - 2.0 * (-1f64).sinh()).abs() < 1e-15);
        let z = apply_wave(&st(1.0, 5.0, 1.0), WaveFamily::Two, 1.0).unwrap();
        assert!((z.a - 3.0).abs() < 1e-15);
        assert!((z.v - 9.0).abs() < 1e-13);
        assert_eq!(z.u, 5.0);
        assert!((z.p() - 1.0).abs() < 1e-15);
        assert!(apply_wave(&u0, WaveFamily::Two, 2.0).is_err());
        assert_eq!(apply_wave(&u0, WaveFamily::One(CurveKind::Lax), 0.0).unwrap(), u0);
    }

    #[test]
    fn strength_recovers_curve_parameter() {
        let l = st(1.3, 0.2, 1.7);
        for fam in [Family::One, Family::Three] {
            for kind in [CurveKind::Lax, CurveKind::Integral] {
                for eps in [-0.7, -0.1, 0.0, 0.4, 1.2] {
                    let r = apply(&l, fam, kind, eps);
                    assert!((strength_1_3(l.p(), r.p(), fam).unwrap() - eps).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn shock_speed_matches_jump_relation() {
        let l = st(1.3, 0.2, 1.7);
        for fam in [Family::One, Family::Three] {
            let r = apply(&l, fam, CurveKind::Lax, -0.4);
            let s = shock_speed(&l, &r, fam);
            // v_t - u_x = 0:  s [v] + [u] = 0
            assert!((s * (r.v - l.v) + (r.u - l.u)).abs() < 1e-14);
            // u_t + p_x = 0: s [u] = [p]
            assert!((s * (r.u - l.u) - (r.p() - l.p())).abs() < 1e-14);
        }
    }
}
