//! Linear and quadratic functionals of a front configuration.
//!
//! `F = L + Q + L⁰`: shocks count with weight `ξ` in `L`; `Q` weights waves
//! approaching an interface by the interface strength; `L⁰` is the mass of
//! the composite components. Every quantity is also resolved by generation
//! order.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::front::{Front, FrontKind, Region};
use crate::interaction::c_o;
use crate::waves::Family;

/// Weights and thresholds driving the scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    pub m_o: f64,
    pub xi: f64,
    pub k_eta_l: f64,
    pub k_zeta_l: f64,
    pub k_eta_m: f64,
    pub k_zeta_m: f64,
    pub k_eta_r: f64,
    pub k_zeta_r: f64,
    pub rho: f64,
    pub sigma: f64,
    pub mu: f64,
}

/// Interface strengths and the functional variant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionalSetup {
    pub params: Parameters,
    pub eta_abs: f64,
    pub zeta_abs: f64,
    /// Treat everything left of `b` as the middle region (variant for η = 0).
    pub merge_left: bool,
}

/// Values of the functionals at one time.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FunctionalSnapshot {
    pub l_by_region: [f64; 3],
    pub q_by_region: [f64; 3],
    pub l0: f64,
    pub f_total: f64,
    /// `F_k = L_k + Q_k + L⁰_k`, with `L⁰_k` the mass absorbed at order `k`.
    pub f_by_generation: BTreeMap<u32, f64>,
    /// Plain sums `Σ |δ|` of moving fronts per region.
    pub lbar_by_region: [f64; 3],
    /// Accumulated absorbed mass per generation.
    pub l0_by_generation: BTreeMap<u32, f64>,
}

impl FunctionalSnapshot {
    pub fn lbar(&self) -> f64 {
        self.lbar_by_region.iter().sum()
    }

    /// `Σ_k F_k`.
    pub fn f_generations_total(&self) -> f64 {
        self.f_by_generation.values().sum()
    }

    /// `F̃_k = Σ_{j >= k} F_j`.
    pub fn f_tail(&self, k: u32) -> f64 {
        self.f_by_generation.range(k..).map(|(_, v)| v).sum()
    }

    /// Largest generation present.
    pub fn max_generation(&self) -> u32 {
        self.f_by_generation.keys().next_back().copied().unwrap_or(0)
    }
}

/// Contribution `(L, Q)` of one moving wave.
pub fn wave_weights(setup: &FunctionalSetup, region: Region, family: Family, strength: f64) -> (f64, f64) {
    let p = &setup.params;
    let (eta, zeta) = (setup.eta_abs, setup.zeta_abs);
    let s = strength.abs();
    let shock = strength < 0.0;
    let l = if shock { p.xi * s } else { s };
    let region = if setup.merge_left && region == Region::L {
        Region::M
    } else {
        region
    };
    let q = match (region, family, shock) {
        (Region::L, Family::Three, false) => (p.k_eta_l * eta + p.k_zeta_l * zeta) * s,
        (Region::L, Family::Three, true) => p.xi * p.k_eta_l * eta * s,
        (Region::M, Family::One, false) => p.k_eta_m * eta * s,
        (Region::M, Family::Three, false) => p.k_zeta_m * zeta * s,
        (Region::R, Family::One, false) => (p.k_eta_r * eta + p.k_zeta_r * zeta) * s,
        (Region::R, Family::One, true) => p.xi * p.k_zeta_r * zeta * s,
        _ => 0.0,
    };
    (l, q)
}

/// Evaluates the functionals on any list of fronts (a full configuration
/// or just the fronts taking part in one interaction).
pub fn compute_snapshot<'a, I>(fronts: I, setup: &FunctionalSetup) -> FunctionalSnapshot
where
    I: IntoIterator<Item = &'a Front>,
{
    let mut s = FunctionalSnapshot::default();
    for f in fronts {
        match &f.kind {
            FrontKind::Wave { family, strength } => {
                let (l, q) = wave_weights(setup, f.region, *family, *strength);
                let r = f.region.index();
                s.l_by_region[r] += l;
                s.q_by_region[r] += q;
                s.lbar_by_region[r] += strength.abs();
                *s.f_by_generation.entry(f.generation).or_insert(0.0) += l + q;
            }
            FrontKind::Composite(c) => {
                s.l0 += c.size();
                for (&k, &m) in &c.absorbed {
                    *s.f_by_generation.entry(k).or_insert(0.0) += m;
                    *s.l0_by_generation.entry(k).or_insert(0.0) += m;
                }
            }
        }
    }
    s.f_total = s.l_by_region.iter().sum::<f64>() + s.q_by_region.iter().sum::<f64>() + s.l0;
    s
}

/// The contraction factor: the largest of ten ratios.
pub fn mu_of(p: &Parameters, eta_abs: f64, zeta_abs: f64) -> f64 {
    let co = c_o(p.rho);
    [
        1.0 / (2.0 * p.k_eta_l - 1.0),
        1.0 / (2.0 * p.k_zeta_r - 1.0),
        p.xi / (1.0 + 2.0 * p.k_eta_m),
        p.xi / (1.0 + 2.0 * p.k_zeta_m),
        (1.0 + p.k_eta_m * eta_abs) / p.xi,
        (1.0 + p.k_zeta_m * zeta_abs) / p.xi,
        (1.0 + p.k_eta_l * eta_abs + p.k_zeta_l * zeta_abs) / p.xi,
        (1.0 + p.k_eta_r * eta_abs + p.k_zeta_r * zeta_abs) / p.xi,
        co / (p.xi * (2.0 * p.k_eta_l - 1.0)),
        co / (p.xi * (2.0 * p.k_zeta_r - 1.0)),
    ]
    .into_iter()
    .fold(f64::NEG_INFINITY, f64::max)
}

/// One checked inequality.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    /// Amount by which the inequality is violated (positive on failure).
    pub excess: f64,
    /// Whether failing this check counts as a breach.
    pub required: bool,
}

/// Result of [`monitor_interaction`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonitorReport {
    pub delta_f: f64,
    pub delta_f_by_generation: BTreeMap<u32, f64>,
    pub h: Option<u32>,
    pub checks: Vec<Check>,
}

impl MonitorReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass || !c.required)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass && c.required)
    }

    pub fn delta(&self, k: u32) -> f64 {
        self.delta_f_by_generation.get(&k).copied().unwrap_or(0.0)
    }
}

fn check(name: &'static str, lhs: f64, rhs: f64, slack: f64, required: bool) -> Check {
    let excess = lhs - rhs;
    Check {
        name,
        pass: excess <= slack,
        excess,
        required,
    }
}

/// Compares the functionals before and after one interaction.
///
/// `h` is the generation of the interaction (incident order at a composite,
/// larger incoming order for same-family events) and `None` for waves of
/// different families crossing. Strict inequalities are tested with the
/// absolute `slack`.
pub fn monitor_interaction(before: &FunctionalSnapshot, after: &FunctionalSnapshot, h: Option<u32>, mu: f64, slack: f64) -> MonitorReport {
    let mut d = BTreeMap::new();
    for (&k, &v) in &after.f_by_generation {
        *d.entry(k).or_insert(0.0) += v;
    }
    for (&k, &v) in &before.f_by_generation {
        *d.entry(k).or_insert(0.0) -= v;
    }
    let delta_f = after.f_total - before.f_total;
    let get = |k: u32| d.get(&k).copied().unwrap_or(0.0);
    let mut checks = vec![check("dF<=0", delta_f, 0.0, slack, true)];
    match h {
        None => {
            let worst = d.values().fold(0.0f64, |m, v| m.max(v.abs()));
            checks.push(check("dF_k=0", worst, 0.0, slack, true));
        }
        Some(h) => {
            let dh = get(h);
            let dh1 = get(h + 1);
            let lower: f64 = d.range(..h).map(|(_, v)| v).sum();
            let higher = d.range(h + 2..).fold(0.0f64, |m, (_, v)| m.max(v.abs()));
            let neg_h = (-dh).max(0.0);
            checks.push(check("dF_h<0", dh, 0.0, slack, true));
            checks.push(check("dF_h+1>0", 0.0, dh1, slack, true));
            checks.push(check("dF_k=0,k>=h+2", higher, 0.0, slack, true));
            checks.push(check("gen_bound", dh1.max(0.0), mu * (neg_h - lower), slack, true));
            checks.push(check("strict_decrease", delta_f, -(1.0 - mu) * neg_h, slack, false));
        }
    }
    MonitorReport {
        delta_f,
        delta_f_by_generation: d,
        h,
        checks,
    }
}

/// `F̃_k(t) <= μ^{k−1} F₁(0) (1 + 1e-9)` for every snapshot and every `k`.
pub fn generation_decay_check(history: &[FunctionalSnapshot], f1_0: f64, mu: f64) -> bool {
    history.iter().all(|s| {
        (1..=s.max_generation().max(1)).all(|k| s.f_tail(k) <= mu.powi(k as i32 - 1) * f1_0 * (1.0 + 1e-9))
    })
}
