//! TOML run configuration.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{InitialData, PhaseLayout, Profile};
use crate::error::{Error, Result};
use crate::functionals::Parameters;
use crate::tracker::Strictness;
use crate::waves::ACoefficients;

/// Randomly placed jumps, drawn from the run seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomJumps {
    pub count: usize,
    pub window: [f64; 2],
    pub v_base: f64,
    /// Each jump in `log v` is uniform in `[-amp, amp]`.
    pub log_v_amp: f64,
    pub u_amp: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSection {
    pub v_lower: f64,
    pub v: Option<Profile>,
    pub u: Option<Profile>,
    pub random_jumps: Option<RandomJumps>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientSection {
    pub a_l: f64,
    pub a_m: f64,
    pub a_r: f64,
}

fn default_horizon() -> f64 {
    1.0
}
fn default_nu() -> Vec<u32> {
    vec![1]
}
fn default_sigma0() -> f64 {
    crate::admissibility::DEFAULT_SIGMA
}
fn default_strict() -> Strictness {
    Strictness::Fail
}
fn default_events_per_nu() -> usize {
    500_000
}
fn default_true() -> bool {
    true
}
fn default_passes() -> usize {
    8
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    #[serde(default = "default_nu")]
    pub nu: Vec<u32>,
    #[serde(default = "default_sigma0")]
    pub sigma0: f64,
    #[serde(default)]
    pub snapshots: Vec<f64>,
    #[serde(default = "default_strict")]
    pub strict: Strictness,
    #[serde(default)]
    pub seed: u64,
    /// The event cap is this number times ν.
    #[serde(default = "default_events_per_nu")]
    pub max_events_per_nu: usize,
    #[serde(default = "default_true")]
    pub choose_k_rho: bool,
    #[serde(default = "default_passes")]
    pub max_passes: usize,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            horizon: default_horizon(),
            nu: default_nu(),
            sigma0: default_sigma0(),
            snapshots: Vec::new(),
            strict: default_strict(),
            seed: 0,
            max_events_per_nu: default_events_per_nu(),
            choose_k_rho: true,
            max_passes: default_passes(),
        }
    }
}

/// Expert overrides of the selected parameters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub m_o: Option<f64>,
    pub xi: Option<f64>,
    pub rho: Option<f64>,
    pub k_eta_l: Option<f64>,
    pub k_zeta_l: Option<f64>,
    pub k_eta_m: Option<f64>,
    pub k_zeta_m: Option<f64>,
    pub k_eta_r: Option<f64>,
    pub k_zeta_r: Option<f64>,
}

impl Overrides {
    pub fn is_empty(&self) -> bool {
        *self == Overrides::default()
    }

    /// Copies every set field into `p`.
    pub fn apply(&self, p: &mut Parameters) {
        let pairs = [
            (self.m_o, &mut p.m_o),
            (self.xi, &mut p.xi),
            (self.rho, &mut p.rho),
            (self.k_eta_l, &mut p.k_eta_l),
            (self.k_zeta_l, &mut p.k_zeta_l),
            (self.k_eta_m, &mut p.k_eta_m),
            (self.k_zeta_m, &mut p.k_zeta_m),
            (self.k_eta_r, &mut p.k_eta_r),
            (self.k_zeta_r, &mut p.k_zeta_r),
        ];
        for (o, slot) in pairs {
            if let Some(v) = o {
                *slot = v;
            }
        }
    }
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}
fn default_grid() -> usize {
    8
}
fn default_levels() -> Vec<f64> {
    vec![1.0, 2.0, 3.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_out")]
    pub dir: PathBuf,
    /// Residual rectangles per axis.
    #[serde(default = "default_grid")]
    pub residual_grid: usize,
    /// Levels of `H` written by the admissibility command.
    #[serde(default = "default_levels")]
    pub levels: Vec<f64>,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: default_out(),
            residual_grid: default_grid(),
            levels: default_levels(),
        }
    }
}

/// Complete configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub data: DataSection,
    pub phases: PhaseLayout,
    pub coefficients: CoefficientSection,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub overrides: Overrides,
    #[serde(default)]
    pub output: OutputSection,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<RunConfig> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        RunConfig::from_toml(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    fn check(&self) -> Result<()> {
        let r = &self.run;
        if !(r.horizon > 0.0 && r.horizon.is_finite()) {
            return Err(Error::Config(format!("run.horizon must be positive, got {}", r.horizon)));
        }
        if r.nu.is_empty() || r.nu.contains(&0) {
            return Err(Error::Config("run.nu must list positive integers".into()));
        }
        if !(r.sigma0 > 0.0) {
            return Err(Error::Config("run.sigma0 must be positive".into()));
        }
        if self.data.random_jumps.is_none() && (self.data.v.is_none() || self.data.u.is_none()) {
            return Err(Error::Config("data needs both v and u, or random_jumps".into()));
        }
        if self.output.residual_grid == 0 {
            return Err(Error::Config("output.residual_grid must be positive".into()));
        }
        Ok(())
    }

    pub fn coefficients(&self) -> Result<ACoefficients> {
        let c = self.coefficients;
        ACoefficients::new(c.a_l, c.a_m, c.a_r).map_err(|e| Error::Config(format!("coefficients: {e}")))
    }

    /// Initial data; random jumps are drawn from `run.seed`.
    pub fn initial_data(&self) -> Result<InitialData> {
        let (v, u) = match &self.data.random_jumps {
            Some(rj) => random_profiles(rj, self.run.seed)?,
            None => (
                self.data.v.clone().expect("checked on load"),
                self.data.u.clone().expect("checked on load"),
            ),
        };
        let data = InitialData {
            v,
            u,
            phases: self.phases,
            v_lower: self.data.v_lower,
        };
        data.validate()?;
        Ok(data)
    }
}

/// Piecewise-constant profiles with `count` jumps at uniform random points.
pub fn random_profiles(rj: &RandomJumps, seed: u64) -> Result<(Profile, Profile)> {
    let [lo, hi] = rj.window;
    if !(lo < hi) || !(rj.v_base > 0.0) {
        return Err(Error::Config("random_jumps needs window[0] < window[1] and v_base > 0".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bps: Vec<f64> = (0..rj.count).map(|_| rng.gen_range(lo..hi)).collect();
    bps.sort_by(f64::total_cmp);
    bps.dedup();
    let mut lv = rj.v_base.ln();
    let mut v = vec![rj.v_base];
    let mut u = vec![0.0];
    for _ in 0..bps.len() {
        lv += rng.gen_range(-1.0..=1.0) * rj.log_v_amp;
        v.push(lv.exp());
        u.push(rng.gen_range(-1.0..=1.0) * rj.u_amp);
    }
    Ok((
        Profile::Piecewise {
            breakpoints: bps.clone(),
            values: v,
        },
        Profile::Piecewise { breakpoints: bps, values: u },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[data]
v_lower = 0.5
v = { breakpoints = [0.0], values = [1.0, 1.1] }
u = { kind = "sine", start = -1.0, end = 1.0, base = 0.0, amplitude = 0.02, periods = 1.0 }

[phases]
lambda_l = 0.2
lambda_m = 0.5
lambda_r = 0.3
a = -0.5
b = 0.5

[coefficients]
a_l = 1.2
a_m = 1.0
a_r = 1.1
"#;

    #[test]
    fn minimal_config_parses_with_defaults() {
        let c = RunConfig::from_toml(MINIMAL).unwrap();
        assert_eq!(c.run.nu, vec![1]);
        assert_eq!(c.run.strict, Strictness::Fail);
        assert!(c.overrides.is_empty());
        let d = c.initial_data().unwrap();
        assert_eq!(d.v.eval(0.5), 1.1);
    }

    #[test]
    fn unknown_field_is_a_config_error() {
        let bad = MINIMAL.replace("v_lower", "v_lowr");
        match RunConfig::from_toml(&bad) {
            Err(Error::Config(msg)) => assert!(msg.contains("v_lowr"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn random_jumps_are_seeded() {
        let rj = RandomJumps {
            count: 10,
            window: [-1.0, 1.0],
            v_base: 1.0,
            log_v_amp: 0.05,
            u_amp: 0.02,
        };
        assert_eq!(random_profiles(&rj, 7).unwrap(), random_profiles(&rj, 7).unwrap());
        assert_ne!(random_profiles(&rj, 7).unwrap(), random_profiles(&rj, 8).unwrap());
    }
}
