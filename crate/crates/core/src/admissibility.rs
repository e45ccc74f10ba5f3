//! Stability domain, the threshold function and the choice of parameters.
//!
//! The pair of interface strengths `(|η|, |ζ|)` must lie in the domain
//! `D = {max((1+|ζ|/2)|η|/2, (1+|η|/2)|ζ|/2) < 1}`; the weighted total
//! variation of the data must then stay below `K(H(|η|, |ζ|))`.

use serde::Serialize;

use crate::data::{variation, InitialData};
use crate::error::{Error, Result};
use crate::functionals::{mu_of, Parameters};
use crate::interaction::{c_o, c_o_inv, damping_c};
use crate::roots::largest_true;
use crate::waves::ACoefficients;

/// Default rarefaction mesh before refinement.
pub const DEFAULT_SIGMA: f64 = 0.1;

/// Signed interface strengths, `η ≤ 0 ≤ ζ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhasePair {
    pub eta: f64,
    pub zeta: f64,
}

impl PhasePair {
    pub fn new(eta: f64, zeta: f64) -> Result<Self> {
        if !(eta <= 0.0 && zeta >= 0.0 && eta > -2.0 && zeta < 2.0) {
            return Err(Error::Domain(format!("need -2 < η <= 0 <= ζ < 2, got ({eta}, {zeta})")));
        }
        Ok(PhasePair { eta, zeta })
    }

    pub fn from_coeffs(c: &ACoefficients) -> Self {
        PhasePair {
            eta: c.eta(),
            zeta: c.zeta(),
        }
    }

    pub fn abs(&self) -> (f64, f64) {
        (self.eta.abs(), self.zeta.abs())
    }

    pub fn special_case(&self) -> SpecialCase {
        match (self.eta == 0.0, self.zeta == 0.0) {
            (true, true) => SpecialCase::BothZero,
            (true, false) => SpecialCase::EtaZeroImproved,
            _ => SpecialCase::General,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SpecialCase {
    General,
    /// `η = 0`: the left interface is invisible and everything left of `b`
    /// is weighted as the middle region.
    EtaZeroImproved,
    /// No interface: the threshold is `+∞`.
    BothZero,
}

impl SpecialCase {
    pub fn label(self) -> &'static str {
        match self {
            SpecialCase::General => "general",
            SpecialCase::EtaZeroImproved => "eta_zero_improved",
            SpecialCase::BothZero => "both_zero",
        }
    }
}

/// Result of checking initial data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    pub eta: f64,
    pub zeta: f64,
    pub stable: bool,
    pub h_value: f64,
    /// `K(H)`, or `+∞` when both interfaces vanish.
    pub k_threshold: f64,
    pub weighted_tv: f64,
    pub admissible: bool,
    /// `NaN` when the data is not admissible.
    pub chosen_m_o: f64,
    /// Full parameter set behind `chosen_m_o`.
    pub parameters: Option<Parameters>,
    /// Whether the left region shares the damped weight of the middle one.
    pub merge_left: bool,
    pub special_case: SpecialCase,
    /// `TV(log p) + TV(u/a)` over `x < a`, `a < x < b` and `x > b`; the
    /// interface jumps count in the region to their right.
    pub tv_by_region: [f64; 3],
    /// Half of the region variations: upper bounds for the initial wave sums.
    pub lbar_bounds: [f64; 3],
}

/// `max{(1+y/2)x/2, (1+x/2)y/2} < 1`.
pub fn stability_ok(abs_eta: f64, abs_zeta: f64) -> bool {
    stability_lhs(abs_eta, abs_zeta) < 1.0
}

fn stability_lhs(x: f64, y: f64) -> f64 {
    ((1.0 + 0.5 * y) * 0.5 * x).max((1.0 + 0.5 * x) * 0.5 * y)
}

/// `H(x, y) = max{y/(1 − (1+y/2)x/2), x/(1 − (1+x/2)y/2)}` on `D`.
pub fn h_func(abs_eta: f64, abs_zeta: f64) -> Result<f64> {
    let (x, y) = (abs_eta, abs_zeta);
    // On the axes H reduces to the other coordinate; this extends
    // continuously to the corners (0, 2) and (2, 0).
    if (x == 0.0 && (0.0..=2.0).contains(&y)) || (y == 0.0 && (0.0..=2.0).contains(&x)) {
        return Ok(x.max(y));
    }
    if !(x >= 0.0 && y >= 0.0) || !stability_ok(x, y) {
        return Err(Error::Domain(format!("({x}, {y}) lies outside the stability domain")));
    }
    let r1 = y / (1.0 - (1.0 + 0.5 * y) * 0.5 * x);
    let r2 = x / (1.0 - (1.0 + 0.5 * x) * 0.5 * y);
    Ok(r1.max(r2))
}

/// `K(r) = 2/(1+r) · log(1 + (2/r)(1 + √(1+r)))`.
pub fn k_func(r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("K(r) needs r > 0, got {r}")));
    }
    if r.is_infinite() {
        return Ok(0.0);
    }
    Ok(2.0 / (1.0 + r) * (2.0 / r * (1.0 + (1.0 + r).sqrt())).ln_1p())
}

/// `w(m) = 2/(cosh m − 1) = 1/c(m) − 1`.
pub fn w_func(m: f64) -> f64 {
    let s = (0.5 * m).sinh();
    1.0 / (s * s)
}

/// `z(m) = 2 m c(m)`.
pub fn z_func(m: f64) -> f64 {
    2.0 * m * damping_c(m)
}

/// Inverse of the decreasing map [`w_func`], by bisection.
pub fn w_inv(r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("w⁻¹ needs r > 0, got {r}")));
    }
    let mut hi = 1.0;
    while w_func(hi) > r {
        hi *= 2.0;
    }
    Ok(largest_true(|m| w_func(m) > r, 0.0, hi))
}

/// Inverse of the increasing map [`z_func`], by bisection.
pub fn z_inv(y: f64) -> Result<f64> {
    if !(y >= 0.0) || !y.is_finite() {
        return Err(Error::Domain(format!("z⁻¹ needs finite y >= 0, got {y}")));
    }
    let mut hi = 1.0;
    while z_func(hi) < y {
        hi *= 2.0;
    }
    Ok(largest_true(|m| z_func(m) < y, 0.0, hi))
}

/// Point `y` on the curved boundary of `D` above `x ∈ [0, 2)`.
pub fn stability_boundary(x: f64) -> f64 {
    largest_true(|y| stability_lhs(x, y) < 1.0, 0.0, 2.0)
}

/// Samples `(x, y)` of the level set `H = c`, for `x` on a uniform grid
/// of `[0, min(c, 2))`.
pub fn level_curve(c: f64, n: usize) -> Vec<(f64, f64)> {
    let x_end = c.min(2.0);
    (0..n)
        .map(|i| x_end * i as f64 / n as f64)
        .map(|x| {
            let yb = stability_boundary(x);
            let y = largest_true(|y| h_func(x, y).map_or(false, |h| h < c), 0.0, yb);
            (x, y)
        })
        .collect()
}

/// Weighted sum of wave sums in the global data bound; it must not exceed
/// `m c(m)`.
fn data_load(m: f64, lbar: [f64; 3], merge_left: bool) -> f64 {
    let c = damping_c(m);
    let wl = if merge_left { c } else { 1.0 };
    wl * lbar[0] + c * lbar[1] + lbar[2]
}

/// Smallest `m` satisfying the global data bound.
pub fn min_m_o(lbar: [f64; 3], merge_left: bool) -> f64 {
    if lbar.iter().all(|&l| l == 0.0) {
        return 0.0;
    }
    let ok = |m: f64| m * damping_c(m) >= data_load(m, lbar, merge_left);
    let mut hi = 1.0;
    while !ok(hi) {
        hi *= 2.0;
    }
    // The bound fails on a prefix and holds afterwards.
    largest_true(|m| !ok(m), 0.0, hi)
}

fn mid_or_above(lo: f64, hi: f64) -> f64 {
    if hi.is_finite() {
        0.5 * (lo + hi)
    } else {
        2.0 * lo + 1.0
    }
}

/// Cascade of intervals for a given `m_o`; every weight is the midpoint of
/// its admissible interval.
pub fn cascade(abs_eta: f64, abs_zeta: f64, m_o: f64) -> Result<Parameters> {
    let (eta, zeta) = (abs_eta, abs_zeta);
    let c = damping_c(m_o);
    if !(c > 0.0) {
        return Err(Error::Inadmissible(format!("m_o = {m_o} must be positive")));
    }
    let xi = if eta == 0.0 && zeta == 0.0 {
        1.0 / c
    } else {
        let h = h_func(eta, zeta)?;
        if !(c < 1.0 / (1.0 + h)) {
            return Err(Error::Inadmissible(format!("c(m_o) = {c} is not below 1/(1+H) = {}", 1.0 / (1.0 + h))));
        }
        0.5 * (1.0 + h + 1.0 / c)
    };
    let g = xi - 1.0;
    let ratio = |num: f64, den: f64| if den > 0.0 { num / den } else { f64::INFINITY };

    let k_eta_m = mid_or_above(0.5 * g, ratio(g - zeta, (1.0 + 0.5 * zeta) * eta));
    let k_zeta_m = mid_or_above(0.5 * g, ratio(g - eta, (1.0 + 0.5 * eta) * zeta));

    // K_η^r |η| ∈ [K_η^m (1+|ζ|/2)|η|, (ξ−1) − |ζ|), symmetrically for K_ζ^ℓ.
    let k_eta_r = if eta > 0.0 {
        0.5 * (k_eta_m * (1.0 + 0.5 * zeta) * eta + g - zeta) / eta
    } else {
        k_eta_m * (1.0 + 0.5 * zeta)
    };
    let k_zeta_l = if zeta > 0.0 {
        0.5 * (k_zeta_m * (1.0 + 0.5 * eta) * zeta + g - eta) / zeta
    } else {
        k_zeta_m * (1.0 + 0.5 * eta)
    };

    let k_zeta_r = mid_or_above(1.0, 1.0 + ratio(g - zeta - k_eta_r * eta, zeta));
    let k_eta_l = mid_or_above(1.0, 1.0 + ratio(g - eta - k_zeta_l * zeta, eta));

    let rho = 0.9 * c_o_inv(2.0 * xi / (xi + 1.0) * k_zeta_r.min(k_eta_l));
    let mut p = Parameters {
        m_o,
        xi,
        k_eta_l,
        k_zeta_l,
        k_eta_m,
        k_zeta_m,
        k_eta_r,
        k_zeta_r,
        rho,
        sigma: DEFAULT_SIGMA,
        mu: 0.0,
    };
    p.mu = mu_of(&p, eta, zeta);
    Ok(p)
}

/// Upper end of the `ξ` range that the selection explores.
const XI_CAP: f64 = 1e6;
const M_O_CANDIDATES: usize = 64;

/// Picks `m_o` and runs the cascade.
///
/// `lbar` bounds the initial wave sums per region. Among the `m_o` that
/// satisfy both the data bound and `c(m_o) < 1/(1+H)`, the one giving the
/// smallest contraction factor `μ` on a uniform grid is kept.
pub fn select_parameters(pair: PhasePair, lbar: [f64; 3], merge_left: bool) -> Result<Parameters> {
    if lbar.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
        return Err(Error::Inadmissible(format!("wave sums must be finite and nonnegative, got {lbar:?}")));
    }
    let (eta, zeta) = pair.abs();
    if !stability_ok(eta, zeta) {
        return Err(Error::Inadmissible(format!("(|η|, |ζ|) = ({eta}, {zeta}) violates the stability condition")));
    }
    let m_star = min_m_o(lbar, merge_left);
    if eta == 0.0 && zeta == 0.0 {
        return cascade(0.0, 0.0, (1.001 * m_star).max(1.0));
    }
    let h = h_func(eta, zeta)?;
    let m_max = w_inv(h)?;
    if !(m_star < m_max) {
        return Err(Error::Inadmissible(format!(
            "data bound needs m_o >= {m_star} but c(m_o) < 1/(1+H) needs m_o < {m_max}"
        )));
    }
    let m_cap = crate::interaction::damping_c_inv(1.0 / XI_CAP)?;
    let lo = if m_cap < m_max { m_star.max(m_cap) } else { m_star };
    let mut best: Option<Parameters> = None;
    for i in 0..M_O_CANDIDATES {
        let m = lo + (m_max - lo) * (i + 1) as f64 / (M_O_CANDIDATES + 1) as f64;
        let Ok(p) = cascade(eta, zeta, m) else { continue };
        if best.map_or(true, |b| p.mu < b.mu) {
            best = Some(p);
        }
    }
    let p = best.ok_or_else(|| Error::Inadmissible("no m_o candidate passed the cascade".into()))?;
    if let Some(name) = first_failure(&parameter_checks(&p, eta, zeta, Some((lbar, merge_left)))) {
        return Err(Error::Inadmissible(format!("selected parameters violate {name}")));
    }
    Ok(p)
}

/// Named inequalities the parameters must satisfy; `data` adds the global
/// data bound.
pub fn parameter_checks(p: &Parameters, abs_eta: f64, abs_zeta: f64, data: Option<([f64; 3], bool)>) -> Vec<(&'static str, bool)> {
    let (eta, zeta) = (abs_eta, abs_zeta);
    let g = p.xi - 1.0;
    let c = damping_c(p.m_o);
    let tol = 1e-12 * (1.0 + p.xi);
    let mut v = vec![
        ("xi >= 1", p.xi >= 1.0),
        ("K_zeta^r >= 1", p.k_zeta_r >= 1.0),
        ("K_eta^l >= 1", p.k_eta_l >= 1.0),
        ("K_eta^m > (xi-1)/2", p.k_eta_m > 0.5 * g),
        ("K_zeta^m > (xi-1)/2", p.k_zeta_m > 0.5 * g),
        ("K_eta^m |eta| <= xi-1", p.k_eta_m * eta <= g + tol),
        ("K_zeta^m |zeta| <= xi-1", p.k_zeta_m * zeta <= g + tol),
        (
            "K_eta^m (1+|zeta|/2)|eta| <= K_eta^r |eta| + (K_zeta^r - 1)|zeta|",
            p.k_eta_m * (1.0 + 0.5 * zeta) * eta <= p.k_eta_r * eta + (p.k_zeta_r - 1.0) * zeta + tol,
        ),
        (
            "K_zeta^m (1+|eta|/2)|zeta| <= K_zeta^l |zeta| + (K_eta^l - 1)|eta|",
            p.k_zeta_m * (1.0 + 0.5 * eta) * zeta <= p.k_zeta_l * zeta + (p.k_eta_l - 1.0) * eta + tol,
        ),
        (
            "C_o(rho) <= 2 xi/(xi+1) min(K_zeta^r, K_eta^l)",
            c_o(p.rho) <= 2.0 * p.xi / (p.xi + 1.0) * p.k_zeta_r.min(p.k_eta_l),
        ),
        ("xi <= 1/c(m_o)", p.xi * c <= 1.0 + 1e-12),
        ("K_eta^r |eta| + K_zeta^r |zeta| <= xi-1", p.k_eta_r * eta + p.k_zeta_r * zeta <= g + tol),
        ("K_eta^l |eta| + K_zeta^l |zeta| <= xi-1", p.k_eta_l * eta + p.k_zeta_l * zeta <= g + tol),
        ("rho > 0", p.rho > 0.0),
        ("sigma > 0", p.sigma > 0.0),
        ("mu < 1", mu_of(p, eta, zeta) < 1.0),
    ];
    if eta > 0.0 || zeta > 0.0 {
        let h = h_func(eta, zeta).unwrap_or(f64::INFINITY);
        v.push(("xi > 1 + H", p.xi > 1.0 + h));
    }
    if let Some((lbar, merge_left)) = data {
        v.push(("data bound", data_load(p.m_o, lbar, merge_left) <= p.m_o * c));
    }
    v
}

pub fn first_failure(checks: &[(&'static str, bool)]) -> Option<&'static str> {
    checks.iter().find(|(_, ok)| !ok).map(|(n, _)| *n)
}

/// Region variations of `(log p, u/a)`, interface jumps included in the
/// region to their right.
pub fn region_tv(data: &InitialData, coeffs: &ACoefficients) -> [f64; 3] {
    let ph = &data.phases;
    let av = [coeffs.a_l, coeffs.a_m, coeffs.a_r];
    let bounds = [(f64::NEG_INFINITY, ph.a), (ph.a, ph.b), (ph.b, f64::INFINITY)];
    let mut tv = [0.0; 3];
    for r in 0..3 {
        let (lo, hi) = bounds[r];
        // log p = 2 log a − log v, so inside one region its variation is that of log v.
        tv[r] = variation(&data.v, lo, hi, f64::ln) + variation(&data.u, lo, hi, |u| u / av[r]);
        if r > 0 {
            let log_p_left = 2.0 * av[r - 1].ln() - data.v.eval_left(lo).ln();
            let log_p_right = 2.0 * av[r].ln() - data.v.eval(lo).ln();
            tv[r] += (log_p_right - log_p_left).abs() + (data.u.eval(lo) - data.u.eval_left(lo)).abs() / av[r];
        }
    }
    tv
}

/// Checks the smallness condition on the initial data.
pub fn check_admissible(data: &InitialData, coeffs: &ACoefficients) -> Result<AdmissibilityReport> {
    data.validate()?;
    let pair = PhasePair::from_coeffs(coeffs);
    let (eta, zeta) = pair.abs();
    let special_case = pair.special_case();
    let tv = region_tv(data, coeffs);
    if tv.iter().any(|t| !t.is_finite()) {
        return Err(Error::Inadmissible(format!("initial variation is unbounded: {tv:?}")));
    }
    let lbar_bounds = tv.map(|t| 0.5 * t);
    let stable = stability_ok(eta, zeta);
    let (h_value, k_threshold, weighted_tv) = match special_case {
        SpecialCase::BothZero => (0.0, f64::INFINITY, tv.iter().sum()),
        SpecialCase::EtaZeroImproved => (zeta, k_func(zeta)?, (tv[0] + tv[1]) / (1.0 + zeta) + tv[2]),
        SpecialCase::General => {
            if stable {
                let h = h_func(eta, zeta)?;
                (h, k_func(h)?, tv[0] + tv[1] / (1.0 + h) + tv[2])
            } else {
                (f64::INFINITY, 0.0, tv[0] + tv[2] + tv[1])
            }
        }
    };
    let admissible = stable && weighted_tv < k_threshold;
    let merge_left = special_case == SpecialCase::EtaZeroImproved;
    let parameters = if admissible {
        Some(select_parameters(pair, lbar_bounds, merge_left)?)
    } else {
        None
    };
    let chosen_m_o = parameters.map_or(f64::NAN, |p| p.m_o);
    Ok(AdmissibilityReport {
        eta: pair.eta,
        zeta: pair.zeta,
        stable,
        h_value,
        k_threshold,
        weighted_tv,
        admissible,
        chosen_m_o,
        parameters,
        merge_left,
        special_case,
        tv_by_region: tv,
        lbar_bounds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{PhaseLayout, Profile};

    #[test]
    fn stability_examples() {
        assert!(stability_ok(0.0, 1.9));
        assert!(stability_ok(1.2, 1.2));
        assert!(!stability_ok(1.3, 1.3));
    }

    #[test]
    fn h_on_axes_and_level_two() {
        assert_eq!(h_func(0.0, 0.0).unwrap(), 0.0);
        assert_eq!(h_func(0.7, 0.0).unwrap(), 0.7);
        assert_eq!(h_func(0.0, 0.4).unwrap(), 0.4);
        for x in [0.2, 1.0, 1.8] {
            let y = 2.0 * (2.0 - x) / (2.0 + x);
            assert!((h_func(x, y).unwrap() - 2.0).abs() < 1e-12);
        }
        assert!(h_func(1.3, 1.3).is_err());
    }

    #[test]
    fn k_values() {
        let k2 = 2.0 * (2.0 + 3f64.sqrt()).ln() / 3.0;
        assert!((k_func(2.0).unwrap() - k2).abs() < 1e-14);
        assert!((k_func(2.0).unwrap() - 0.877_971_93).abs() < 1e-8);
        assert!((k_func(1.0).unwrap() - (3.0 + 2.0 * 2f64.sqrt()).ln()).abs() < 1e-14);
        assert!(k_func(0.0).is_err());
        for r in [1e-3, 0.1, 0.5, 1.0, 3.0, 10.0, 100.0] {
            let via_wz = z_func(w_inv(r).unwrap());
            assert!((k_func(r).unwrap() - via_wz).abs() < 1e-12, "r = {r}");
        }
    }

    #[test]
    fn w_z_round_trips() {
        assert!((w_func(3f64.acosh()) - 1.0).abs() < 1e-14);
        assert!((w_inv(w_func(1.7)).unwrap() - 1.7).abs() < 1e-12);
        assert!((z_inv(z_func(0.9)).unwrap() - 0.9).abs() < 1e-12);
        assert!(z_func(1e-6) / 1e-6 < 1e-11);
    }

    #[test]
    fn level_curve_point() {
        let pts = level_curve(2.0, 4);
        let (x, y) = pts[2];
        assert_eq!(x, 1.0);
        assert!((y - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn cascade_small_data() {
        let pair = PhasePair::new(-0.3, 0.4).unwrap();
        let p = select_parameters(pair, [0.01, 0.01, 0.01], false).unwrap();
        let checks = parameter_checks(&p, 0.3, 0.4, Some(([0.01; 3], false)));
        assert_eq!(first_failure(&checks), None, "{p:?}");
        assert!(p.mu < 1.0);
    }

    #[test]
    fn cascade_both_zero() {
        let pair = PhasePair::new(0.0, 0.0).unwrap();
        let p = select_parameters(pair, [0.5, 0.5, 0.5], false).unwrap();
        assert!((p.xi * damping_c(p.m_o) - 1.0).abs() < 1e-12);
        assert_eq!(first_failure(&parameter_checks(&p, 0.0, 0.0, Some(([0.5; 3], false)))), None);
    }

    #[test]
    fn cascade_near_threshold() {
        // On the level-2 curve with total variation just below K(2).
        let x = 1.0;
        let pair = PhasePair::new(-x, 2.0 * (2.0 - x) / (2.0 + x)).unwrap();
        let tv = 0.99 * k_func(2.0).unwrap();
        let p = select_parameters(pair, [0.5 * tv / 3.0, 0.5 * tv / 3.0 * 3.0, 0.5 * tv / 3.0], false).unwrap();
        assert!(p.mu < 1.0);
        let too_big = 1.02 * k_func(2.0).unwrap();
        assert!(select_parameters(pair, [0.5 * too_big, 0.0, 0.0], false).is_err());
    }

    fn layout() -> PhaseLayout {
        PhaseLayout {
            lambda_l: 0.2,
            lambda_m: 0.8,
            lambda_r: 0.3,
            a: -1.0,
            b: 1.0,
        }
    }

    #[test]
    fn constant_data_is_admissible() {
        let coeffs = ACoefficients::new(1.2, 1.0, 1.3).unwrap();
        let data = InitialData {
            v: Profile::constant(1.0),
            u: Profile::constant(0.0),
            phases: layout(),
            v_lower: 0.5,
        };
        // v constant but a jumps, so p jumps at both interfaces.
        let r = check_admissible(&data, &coeffs).unwrap();
        assert!(r.tv_by_region[1] > 0.0);
        let data = InitialData {
            v: Profile::Piecewise {
                breakpoints: vec![-1.0, 1.0],
                values: vec![1.44, 1.0, 1.69],
            },
            ..data
        };
        let r = check_admissible(&data, &coeffs).unwrap();
        assert!(r.weighted_tv.abs() < 1e-12, "{r:?}");
        assert!(r.admissible);
        assert!(r.chosen_m_o > 0.0);
    }

    #[test]
    fn both_zero_infinite_threshold() {
        let coeffs = ACoefficients::new(1.0, 1.0, 1.0).unwrap();
        let data = InitialData {
            v: Profile::Piecewise {
                breakpoints: vec![0.0],
                values: vec![1.0, 50.0],
            },
            u: Profile::constant(0.0),
            phases: layout(),
            v_lower: 0.5,
        };
        let r = check_admissible(&data, &coeffs).unwrap();
        assert_eq!(r.special_case, SpecialCase::BothZero);
        assert!(r.k_threshold.is_infinite() && r.admissible);
    }

    #[test]
    fn middle_jump_contribution() {
        let coeffs = ACoefficients::new(1.0, 1.0, 1.0).unwrap();
        let s = 0.3;
        let data = InitialData {
            v: Profile::Piecewise {
                breakpoints: vec![0.0],
                values: vec![1.0, (-2.0 * s as f64).exp()],
            },
            u: Profile::constant(0.0),
            phases: layout(),
            v_lower: 0.1,
        };
        let r = check_admissible(&data, &coeffs).unwrap();
        assert!((r.tv_by_region[1] - 2.0 * s).abs() < 1e-14);
        assert!((r.lbar_bounds[1] - s).abs() < 1e-14);
    }
}
