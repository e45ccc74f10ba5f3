//! Initial data: volume and velocity profiles plus the phase layout.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::waves::ACoefficients;

/// Named smooth or step profiles, constant outside a bounded window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Builtin {
    /// `left` for `x < at`, `right` otherwise.
    Step { at: f64, left: f64, right: f64 },
    /// `base + amplitude·cos²(π (x − center)/width)` on `|x − center| < width/2`.
    Bump { center: f64, width: f64, base: f64, amplitude: f64 },
    /// `base + amplitude·sin(2π periods (x − start)/(end − start))` on `[start, end]`.
    Sine { start: f64, end: f64, base: f64, amplitude: f64, periods: f64 },
}

impl Builtin {
    fn sine_base(&self) -> f64 {
        match *self {
            Builtin::Sine { base, .. } => base,
            _ => unreachable!("not a sine profile"),
        }
    }

    /// Sine formula, also used for the left limit at `end`.
    fn sine_inner(&self, x: f64) -> f64 {
        match *self {
            Builtin::Sine { start, end, base, amplitude, periods } => {
                let ph = 2.0 * std::f64::consts::PI * periods * (x - start) / (end - start);
                base + amplitude * ph.sin()
            }
            _ => unreachable!("not a sine profile"),
        }
    }
}

/// A scalar profile on the real line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Profile {
    /// `values[i]` holds on `(breakpoints[i-1], breakpoints[i])`.
    Piecewise { breakpoints: Vec<f64>, values: Vec<f64> },
    Builtin(Builtin),
}

impl Profile {
    pub fn constant(c: f64) -> Profile {
        Profile::Piecewise {
            breakpoints: vec![],
            values: vec![c],
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Profile::Piecewise { breakpoints, values } => {
                if values.len() != breakpoints.len() + 1 {
                    return Err(Error::Data(format!(
                        "piecewise profile needs one more value than breakpoints ({} vs {})",
                        values.len(),
                        breakpoints.len()
                    )));
                }
                if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
                    return Err(Error::Data("breakpoints must be strictly increasing".into()));
                }
                if breakpoints.iter().chain(values).any(|x| !x.is_finite()) {
                    return Err(Error::Data("profile contains non-finite numbers".into()));
                }
            }
            Profile::Builtin(b) => {
                let ok = match *b {
                    Builtin::Step { at, left, right } => [at, left, right].iter().all(|x| x.is_finite()),
                    Builtin::Bump { center, width, base, amplitude } => {
                        width > 0.0 && [center, base, amplitude].iter().all(|x| x.is_finite())
                    }
                    Builtin::Sine { start, end, base, amplitude, periods } => {
                        end > start && periods > 0.0 && [base, amplitude].iter().all(|x| x.is_finite())
                    }
                };
                if !ok {
                    return Err(Error::Data(format!("invalid built-in profile {b:?}")));
                }
            }
        }
        Ok(())
    }

    /// Value at `x`; at a jump the right value is returned.
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Profile::Piecewise { breakpoints, values } => values[breakpoints.partition_point(|&b| b <= x)],
            Profile::Builtin(b) => match *b {
                Builtin::Step { at, left, right } => {
                    if x < at {
                        left
                    } else {
                        right
                    }
                }
                Builtin::Bump { center, width, base, amplitude } => {
                    let s = (x - center) / width;
                    if s.abs() < 0.5 {
                        let c = (std::f64::consts::PI * s).cos();
                        base + amplitude * c * c
                    } else {
                        base
                    }
                }
                Builtin::Sine { start, end, .. } => {
                    if x < start || x >= end {
                        b.sine_base()
                    } else {
                        b.sine_inner(x)
                    }
                }
            },
        }
    }

    /// Left limit at `x`.
    pub fn eval_left(&self, x: f64) -> f64 {
        match self {
            Profile::Piecewise { breakpoints, values } => values[breakpoints.partition_point(|&b| b < x)],
            Profile::Builtin(Builtin::Step { at, left, right }) => {
                if x <= *at {
                    *left
                } else {
                    *right
                }
            }
            Profile::Builtin(b @ Builtin::Sine { start, end, .. }) if x > *start && x <= *end => b.sine_inner(x),
            Profile::Builtin(_) => self.eval(x),
        }
    }

    /// Points between which the profile is continuous and monotone.
    pub fn knots(&self) -> Vec<f64> {
        match self {
            Profile::Piecewise { breakpoints, .. } => breakpoints.clone(),
            Profile::Builtin(b) => match *b {
                Builtin::Step { at, .. } => vec![at],
                Builtin::Bump { center, width, .. } => vec![center - width / 2.0, center, center + width / 2.0],
                Builtin::Sine { start, end, periods, .. } => {
                    let mut k = vec![start];
                    let quarter = (end - start) / (4.0 * periods);
                    let mut x = start + quarter;
                    while x < end {
                        k.push(x);
                        x += 2.0 * quarter;
                    }
                    k.push(end);
                    k
                }
            },
        }
    }

    /// Whether the profile is piecewise constant.
    pub fn is_piecewise_constant(&self) -> bool {
        matches!(self, Profile::Piecewise { .. } | Profile::Builtin(Builtin::Step { .. }))
    }

    /// Smallest interval outside which the profile is constant.
    pub fn support(&self) -> Option<(f64, f64)> {
        let k = self.knots();
        Some((*k.first()?, *k.last()?))
    }
}

/// Phase layout: `λ_ℓ` on `x < a`, `λ_m` on `a < x < b`, `λ_r` on `x > b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseLayout {
    pub lambda_l: f64,
    pub lambda_m: f64,
    pub lambda_r: f64,
    pub a: f64,
    pub b: f64,
}

impl PhaseLayout {
    pub fn lambda_at(&self, x: f64) -> f64 {
        if x < self.a {
            self.lambda_l
        } else if x < self.b {
            self.lambda_m
        } else {
            self.lambda_r
        }
    }
}

/// Full initial datum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialData {
    pub v: Profile,
    pub u: Profile,
    pub phases: PhaseLayout,
    pub v_lower: f64,
}

impl InitialData {
    pub fn validate(&self) -> Result<()> {
        self.v.validate()?;
        self.u.validate()?;
        let p = &self.phases;
        if !(p.a < p.b) {
            return Err(Error::Data(format!("interfaces must satisfy a < b, got {} and {}", p.a, p.b)));
        }
        if [p.lambda_l, p.lambda_m, p.lambda_r].iter().any(|l| !(0.0..=1.0).contains(l)) {
            return Err(Error::Data("phase fractions must lie in [0,1]".into()));
        }
        if !(self.v_lower > 0.0) {
            return Err(Error::Data("lower volume bound must be positive".into()));
        }
        let mut pts: Vec<f64> = self.v.knots();
        pts.extend([p.a, p.b]);
        let lo = pts.iter().cloned().fold(f64::INFINITY, f64::min) - 1.0;
        let hi = pts.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 1.0;
        let n = 4096;
        let min_v = (0..=n)
            .map(|i| lo + (hi - lo) * i as f64 / n as f64)
            .chain(pts.iter().flat_map(|&x| [x, x - 1e-12, x + 1e-12]))
            .map(|x| self.v.eval(x))
            .fold(f64::INFINITY, f64::min);
        if !(min_v >= self.v_lower) {
            return Err(Error::Data(format!("volume {min_v} falls below the lower bound {}", self.v_lower)));
        }
        Ok(())
    }

    /// Sound coefficient at `x`.
    pub fn a_at(&self, x: f64, coeffs: &ACoefficients) -> f64 {
        if x < self.phases.a {
            coeffs.a_l
        } else if x < self.phases.b {
            coeffs.a_m
        } else {
            coeffs.a_r
        }
    }

    /// Whether both profiles are piecewise constant.
    pub fn is_piecewise_constant(&self) -> bool {
        self.v.is_piecewise_constant() && self.u.is_piecewise_constant()
    }
}

/// Total variation of `g ∘ f` over the open interval `(lo, hi)`, exact for
/// profiles that are monotone between their knots.
pub fn variation<G: Fn(f64) -> f64>(f: &Profile, lo: f64, hi: f64, g: G) -> f64 {
    let mut knots: Vec<f64> = f.knots().into_iter().filter(|&k| k > lo && k < hi).collect();
    knots.sort_by(f64::total_cmp);
    let mut total = 0.0;
    let mut prev_x = lo;
    let mut prev_val = if lo.is_finite() { g(f.eval(lo)) } else { f64::NAN };
    for &k in &knots {
        let left = g(f.eval_left(k));
        let right = g(f.eval(k));
        if prev_val.is_finite() && prev_x < k {
            total += (left - prev_val).abs();
        }
        total += (right - left).abs();
        prev_x = k;
        prev_val = right;
    }
    if hi.is_finite() && prev_val.is_finite() {
        total += (g(f.eval_left(hi)) - prev_val).abs();
    }
    total
}
