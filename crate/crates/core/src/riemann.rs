//! Riemann solvers built on the θ-systems.
//!
//! Every solver here reduces to the pair of equations
//!
//! ```text
//! ε₃ − ε₁ = A,          a₋ θ₁(ε₁) + a₊ θ₃(ε₃) = B,
//! A = ½ log(p₊/p₋),     B = (u₊ − u₋)/2,
//! ```
//!
//! with `θᵢ ∈ {id, h}`. Substituting `ε₃ = A + ε₁` leaves one increasing
//! scalar equation, solved by [`crate::roots::newton_bisect`].

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots;
use crate::waves::{self, apply, char_speed, h, h_prime, shock_speed, CurveKind, Family, State};

/// One of `θ = id` or `θ = h`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Theta {
    Identity,
    H,
}

impl Theta {
    pub fn eval(self, x: f64) -> f64 {
        match self {
            Theta::Identity => x,
            Theta::H => h(x),
        }
    }

    pub fn deriv(self, x: f64) -> f64 {
        match self {
            Theta::Identity => 1.0,
            Theta::H => h_prime(x),
        }
    }

    pub fn curve(self) -> CurveKind {
        match self {
            Theta::Identity => CurveKind::Integral,
            Theta::H => CurveKind::Lax,
        }
    }
}

/// Selection of `(θ₁, θ₃)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaChoice {
    pub theta1: Theta,
    pub theta3: Theta,
}

/// The four pre-Riemann solvers. The first letter names the 1-curve, the
/// second the 3-curve (`L` = Lax, `I` = integral).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SolverKind {
    LL,
    II,
    LI,
    IL,
}

impl SolverKind {
    pub const ALL: [SolverKind; 4] = [SolverKind::LL, SolverKind::II, SolverKind::LI, SolverKind::IL];

    pub fn choice(self) -> ThetaChoice {
        let (theta1, theta3) = match self {
            SolverKind::LL => (Theta::H, Theta::H),
            SolverKind::II => (Theta::Identity, Theta::Identity),
            SolverKind::LI => (Theta::H, Theta::Identity),
            SolverKind::IL => (Theta::Identity, Theta::H),
        };
        ThetaChoice { theta1, theta3 }
    }
}

/// Output `(ε₁, δ, ε₃)` of a pre-Riemann solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveTriple {
    pub eps1: f64,
    pub delta: f64,
    pub eps3: f64,
    pub kind: SolverKind,
}

impl WaveTriple {
    /// Applies the three waves to `left`, landing in phase `(lambda, a)`.
    pub fn reconstruct(&self, left: &State, lambda: f64, a: f64) -> State {
        let c = self.kind.choice();
        let s1 = apply(left, Family::One, c.theta1.curve(), self.eps1);
        let s2 = s1.across_phase(lambda, a);
        apply(&s2, Family::Three, c.theta3.curve(), self.eps3)
    }
}

/// Stationary wave made of a 2-wave and two integral-curve components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositeWave {
    pub d1: f64,
    pub delta: f64,
    pub d3: f64,
    pub gen1: u32,
    pub gen3: u32,
    pub position: f64,
    /// Mass absorbed so far, keyed by the generation order it was assigned.
    pub absorbed: BTreeMap<u32, f64>,
}

impl CompositeWave {
    /// Pure 2-wave of strength `delta` sitting at `position`.
    pub fn pure(delta: f64, position: f64) -> Self {
        CompositeWave {
            d1: 0.0,
            delta,
            d3: 0.0,
            gen1: 1,
            gen3: 1,
            position,
            absorbed: BTreeMap::new(),
        }
    }

    /// `|δ₀¹| + |δ₀³|`.
    pub fn size(&self) -> f64 {
        self.d1.abs() + self.d3.abs()
    }

    /// State on the right given the state on the left and the right phase.
    pub fn apply_to(&self, left: &State, lambda: f64, a: f64) -> State {
        let s1 = apply(left, Family::One, CurveKind::Integral, self.d1);
        let s2 = s1.across_phase(lambda, a);
        apply(&s2, Family::Three, CurveKind::Integral, self.d3)
    }
}

/// Solves the θ-system for `(ε₁, ε₃)`.
pub fn solve_theta_system(a_big: f64, b_big: f64, a_minus: f64, a_plus: f64, choice: ThetaChoice) -> Result<(f64, f64)> {
    if !(a_minus > 0.0 && a_plus > 0.0) {
        return Err(Error::Domain("sound coefficients must be positive".into()));
    }
    if !(a_big.is_finite() && b_big.is_finite()) {
        return Err(Error::Domain("θ-system data must be finite".into()));
    }
    let (t1, t3) = (choice.theta1, choice.theta3);
    if t1 == Theta::Identity && t3 == Theta::Identity {
        let e1 = (b_big - a_plus * a_big) / (a_minus + a_plus);
        return Ok((e1, a_big + e1));
    }
    let f = |x: f64| a_minus * t1.eval(x) + a_plus * t3.eval(a_big + x) - b_big;
    let df = |x: f64| a_minus * t1.deriv(x) + a_plus * t3.deriv(a_big + x);
    let tol = 1e-14 * b_big.abs().max(1.0);
    let e1 = roots::newton_bisect(f, df, tol)?;
    Ok((e1, a_big + e1))
}

/// Same system solved by plain bisection; kept as an independent reference.
pub fn solve_theta_system_bisection(a_big: f64, b_big: f64, a_minus: f64, a_plus: f64, choice: ThetaChoice) -> Result<(f64, f64)> {
    let (t1, t3) = (choice.theta1, choice.theta3);
    let e1 = roots::bisect(|x| a_minus * t1.eval(x) + a_plus * t3.eval(a_big + x) - b_big)?;
    Ok((e1, a_big + e1))
}

/// `(A, B)` of the θ-system for the pair `(U₋, U₊)`.
pub fn theta_data(left: &State, right: &State) -> (f64, f64) {
    (0.5 * (right.p() / left.p()).ln(), 0.5 * (right.u - left.u))
}

/// Pre-Riemann solver of the requested kind.
pub fn pre_riemann(left: &State, right: &State, kind: SolverKind) -> Result<WaveTriple> {
    let (a_big, b_big) = theta_data(left, right);
    let (eps1, eps3) = solve_theta_system(a_big, b_big, left.a, right.a, kind.choice())?;
    Ok(WaveTriple {
        eps1,
        delta: waves::two_wave_strength(left.a, right.a),
        eps3,
        kind,
    })
}

/// Composite wave joining `U₋` and `U₊` through the `II` solver.
pub fn composite_between(left: &State, right: &State) -> Result<CompositeWave> {
    let t = pre_riemann(left, right, SolverKind::II)?;
    let mut c = CompositeWave::pure(t.delta, 0.0);
    c.d1 = t.eps1;
    c.d3 = t.eps3;
    Ok(c)
}

/// Which elementary wave a prototype front carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProtoKind {
    One,
    Two,
    Three,
}

/// A front of the Lax solution before it is placed on the line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontProto {
    pub kind: ProtoKind,
    pub strength: f64,
    /// Tracking speed: Rankine–Hugoniot for shocks, right characteristic
    /// speed for rarefactions, zero for 2-waves.
    pub speed: f64,
    /// Exact fan `(left, right)` speeds; equal for shocks and 2-waves.
    pub speed_range: (f64, f64),
    pub left: State,
    pub right: State,
}

impl FrontProto {
    /// Prototype of a 1- or 3-wave of strength `eps` leaving `left`.
    pub fn moving(family: Family, eps: f64, left: &State) -> FrontProto {
        let right = apply(left, family, CurveKind::Lax, eps);
        FrontProto::between(family, eps, left, &right)
    }

    /// Prototype of a 1- or 3-wave with both sides known.
    pub fn between(family: Family, eps: f64, left: &State, right: &State) -> FrontProto {
        let (speed, speed_range) = if eps < 0.0 {
            let s = shock_speed(left, right, family);
            (s, (s, s))
        } else {
            let (sl, sr) = (char_speed(left, family), char_speed(right, family));
            (sr, (sl, sr))
        };
        FrontProto {
            kind: match family {
                Family::One => ProtoKind::One,
                Family::Three => ProtoKind::Three,
            },
            strength: eps,
            speed,
            speed_range,
            left: *left,
            right: *right,
        }
    }
}

/// Lax solution of the Riemann problem `(U₋, U₊)`.
///
/// Waves of zero strength are omitted.
pub fn lax_riemann(left: &State, right: &State) -> Result<Vec<FrontProto>> {
    let t = pre_riemann(left, right, SolverKind::LL)?;
    let mut out = Vec::with_capacity(3);
    let s1 = apply(left, Family::One, CurveKind::Lax, t.eps1);
    if t.eps1 != 0.0 {
        out.push(FrontProto::between(Family::One, t.eps1, left, &s1));
    }
    let s2 = s1.across_phase(right.lambda, right.a);
    if left.a != right.a || left.lambda != right.lambda {
        out.push(FrontProto {
            kind: ProtoKind::Two,
            strength: t.delta,
            speed: 0.0,
            speed_range: (0.0, 0.0),
            left: s1,
            right: s2,
        });
    }
    if t.eps3 != 0.0 {
        // Close on the given right state so that roundoff does not drift.
        out.push(FrontProto::between(Family::Three, t.eps3, &s2, right));
    }
    Ok(out)
}

/// Checks that two waves of one family commute within one phase.
pub fn commute_check(start: &State, family: Family, alpha: f64, kind_a: CurveKind, beta: f64, kind_b: CurveKind) -> bool {
    let ab = apply(&apply(start, family, kind_a, alpha), family, kind_b, beta);
    let ba = apply(&apply(start, family, kind_b, beta), family, kind_a, alpha);
    ab.rel_dist(&ba) <= 1e-12
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(p: f64, u: f64, a: f64) -> State {
        State::from_pressure(p, u, 0.5, a).unwrap()
    }

    #[test]
    fn zero_data() {
        for k in SolverKind::ALL {
            assert_eq!(solve_theta_system(0.0, 0.0, 1.0, 2.0, k.choice()).unwrap(), (0.0, 0.0));
        }
    }

    #[test]
    fn linear_case_closed_form() {
        let (e1, e3) = solve_theta_system(0.2, 0.3, 1.0, 2.0, SolverKind::II.choice()).unwrap();
        assert!((e1 + 0.1 / 3.0).abs() < 1e-15);
        assert!((e3 - (0.2 - 0.1 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn ll_against_bisection() {
        let c = SolverKind::LL.choice();
        let (e1, e3) = solve_theta_system(-0.5, 0.4, 1.0, 1.5, c).unwrap();
        let (b1, b3) = solve_theta_system_bisection(-0.5, 0.4, 1.0, 1.5, c).unwrap();
        assert!((e1 - b1).abs() < 1e-12 && (e3 - b3).abs() < 1e-12);
        assert!((e3 - e1 + 0.5).abs() < 1e-12);
        assert!((h(e1) + 1.5 * h(e3) - 0.4).abs() < 1e-12);
    }

    #[test]
    fn single_wave_is_recovered() {
        let l = st(1.3, 0.4, 1.1);
        let r = apply(&l, Family::Three, CurveKind::Lax, 0.7);
        let t = pre_riemann(&l, &r, SolverKind::LL).unwrap();
        assert!(t.eps1.abs() < 1e-14 && (t.eps3 - 0.7).abs() < 1e-14 && t.delta == 0.0);
        let t = pre_riemann(&l, &l, SolverKind::LI).unwrap();
        assert_eq!((t.eps1, t.delta, t.eps3), (0.0, 0.0, 0.0));
    }

    #[test]
    fn composite_pure_and_linear() {
        let l = State::from_pressure(1.0, 0.0, 0.2, 1.0).unwrap();
        let r = l.across_phase(0.8, 2.0);
        let c = composite_between(&l, &r).unwrap();
        assert_eq!((c.d1, c.d3), (0.0, 0.0));
        assert!((c.delta - 2.0 / 3.0).abs() < 1e-15);

        let r = State::from_pressure(0.4f64.exp(), 0.0, 0.8, 2.0).unwrap();
        let c = composite_between(&l, &r).unwrap();
        // a₋ d1 + a₊ (0.2 + d1) = 0
        assert!((c.d1 + 0.4 / 3.0).abs() < 1e-14);
        assert!((c.d3 - c.d1 - 0.2).abs() < 1e-14);
        let back = c.apply_to(&l, r.lambda, r.a);
        assert!(back.rel_dist(&r) < 1e-13);
    }

    #[test]
    fn lax_fans() {
        let l = st(1.0, 0.0, 1.0);
        assert!(lax_riemann(&l, &l).unwrap().is_empty());
        let r = l.across_phase(0.9, 1.4);
        let f = lax_riemann(&l, &r).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].kind, ProtoKind::Two);

        let m = apply(&l, Family::One, CurveKind::Lax, -0.3);
        let r = apply(&m, Family::Three, CurveKind::Lax, -0.4);
        let f = lax_riemann(&l, &r).unwrap();
        assert_eq!(f.len(), 2);
        assert!((f[0].strength + 0.3).abs() < 1e-10);
        assert!((f[1].strength + 0.4).abs() < 1e-10);
        assert!(f[0].speed < 0.0 && f[1].speed > 0.0);
    }

    #[test]
    fn commutation_examples() {
        let s = st(2.0, 1.0, 1.3);
        assert!(commute_check(&s, Family::Three, 0.4, CurveKind::Lax, 0.0, CurveKind::Integral));
        assert!(commute_check(&s, Family::Three, -0.5, CurveKind::Lax, -0.2, CurveKind::Integral));
    }
}
