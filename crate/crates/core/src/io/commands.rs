//! The four commands behind the command-line tool.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::admissibility::{check_admissible, first_failure, level_curve, parameter_checks, stability_boundary, AdmissibilityReport};
use crate::data::{InitialData, Profile};
use crate::error::{Error, Result};
use crate::exact::{l1_distance, ExactRiemann};
use crate::functionals::{mu_of, Parameters};
use crate::interaction::{k_of_delta, sharpness_scan, theta_refined, Sharpness};
use crate::io::config::RunConfig;
use crate::io::output::{header_line, num, write_csv, write_forensic_dump, write_toml, write_trajectory};
use crate::io::residual::{auto_rectangles, residual_check, ResidualReport};
use crate::tracker::{run_consistent, sigma_nu, RunOptions, Scheme, Slice, Strictness, Tracker, Trajectory};
use crate::tracker::init::approximate_initial_data;
use crate::waves::State;

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CliOverrides {
    pub out: Option<PathBuf>,
    pub nu: Option<Vec<u32>>,
    pub horizon: Option<f64>,
    pub strict: Option<Strictness>,
    pub seed: Option<u64>,
}

impl CliOverrides {
    pub fn apply(&self, cfg: &mut RunConfig) -> Result<()> {
        if let Some(o) = &self.out {
            cfg.output.dir = o.clone();
        }
        if let Some(n) = &self.nu {
            if n.is_empty() || n.contains(&0) {
                return Err(Error::Config("--nu needs positive integers".into()));
            }
            cfg.run.nu = n.clone();
        }
        if let Some(h) = self.horizon {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::Config(format!("--horizon must be positive, got {h}")));
            }
            cfg.run.horizon = h;
        }
        if let Some(s) = self.strict {
            cfg.run.strict = s;
        }
        if let Some(s) = self.seed {
            cfg.run.seed = s;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------- admissibility

/// Result of `cmd_admissibility`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibilityOutcome {
    pub report: AdmissibilityReport,
    pub files: Vec<PathBuf>,
}

/// Checks the data, prints nothing, writes the report and the level sets.
pub fn cmd_admissibility(cfg: &RunConfig) -> Result<AdmissibilityOutcome> {
    let data = cfg.initial_data()?;
    let coeffs = cfg.coefficients()?;
    let report = check_admissible(&data, &coeffs)?;
    let dir = &cfg.output.dir;
    std::fs::create_dir_all(dir).map_err(|e| Error::Config(format!("cannot create {}: {e}", dir.display())))?;
    let mut files = Vec::new();

    let path = dir.join("admissibility.toml");
    write_toml(&path, &report)?;
    files.push(path);

    let path = dir.join("stability_boundary.csv");
    let n = 200;
    write_csv(
        &path,
        &header_line("stability_boundary", None, None),
        &["abs_eta", "abs_zeta"],
        (0..=n).map(|i| {
            let x = 2.0 * i as f64 / n as f64;
            vec![num(x), num(if i == n { 0.0 } else { stability_boundary(x) })]
        }),
    )?;
    files.push(path);

    let path = dir.join("level_sets.csv");
    let rows: Vec<Vec<String>> = cfg
        .output
        .levels
        .iter()
        .flat_map(|&c| level_curve(c, 100).into_iter().map(move |(x, y)| vec![num(c), num(x), num(y)]))
        .collect();
    write_csv(&path, &header_line("level_sets", None, None), &["c", "abs_eta", "abs_zeta"], rows)?;
    files.push(path);
    Ok(AdmissibilityOutcome { report, files })
}

// ---------------------------------------------------------------- run

/// Scheme for one ν, with overrides applied and checked.
pub fn prepare(cfg: &RunConfig, data: &InitialData, nu: u32) -> Result<(Scheme, AdmissibilityReport, Vec<&'static str>)> {
    let coeffs = cfg.coefficients()?;
    let report = check_admissible(data, &coeffs)?;
    let mut scheme = Scheme::from_report(&report, coeffs, data.phases, sigma_nu(cfg.run.sigma0, nu))?;
    let mut failed = Vec::new();
    if !cfg.overrides.is_empty() {
        cfg.overrides.apply(&mut scheme.params);
        let (eta, zeta) = scheme.pair().abs();
        scheme.params.mu = mu_of(&scheme.params, eta, zeta);
        let checks = parameter_checks(&scheme.params, eta, zeta, Some((report.lbar_bounds, report.merge_left)));
        failed = checks.iter().filter(|(_, ok)| !ok).map(|(n, _)| *n).collect();
        if cfg.run.strict == Strictness::Fail {
            if let Some(name) = first_failure(&checks) {
                return Err(Error::MonitorBreach(format!("overridden parameters violate {name}")));
            }
        }
    }
    Ok((scheme, report, failed))
}

/// Everything produced for one ν.
#[derive(Debug, Clone, PartialEq)]
pub struct NuRun {
    pub nu: u32,
    pub trajectory: Trajectory,
    /// Generation cut-off and ρ_ν when `choose_k_rho` is on.
    pub k: Option<u32>,
    pub rho: f64,
    pub passes: usize,
    pub residuals: Option<ResidualReport>,
    pub override_failures: Vec<&'static str>,
}

impl NuRun {
    pub fn clean(&self) -> bool {
        self.trajectory.clean()
    }
}

/// Run options shared by every ν.
pub fn run_options(cfg: &RunConfig, nu: u32) -> RunOptions {
    RunOptions {
        horizon: cfg.run.horizon,
        snapshot_times: cfg.run.snapshots.clone(),
        strictness: cfg.run.strict,
        max_events: cfg.run.max_events_per_nu.saturating_mul(nu as usize),
        drop_tol: 1e-14,
        record_segments: true,
        composite_bound: None,
    }
}

/// Runs one ν and evaluates the residuals.
pub fn execute(cfg: &RunConfig, data: &InitialData, nu: u32) -> Result<NuRun> {
    let (scheme, _, override_failures) = prepare(cfg, data, nu)?;
    let opts = run_options(cfg, nu);
    // Overrides accepted in warn mode may leave μ >= 1, where no
    // generation cut-off exists; such runs keep the overridden ρ.
    let (trajectory, k, rho, passes) = if cfg.run.choose_k_rho && scheme.params.mu < 1.0 {
        let r = run_consistent(data, nu, scheme, opts, cfg.run.max_passes)?;
        (r.trajectory, Some(r.k), r.rho, r.passes)
    } else {
        let rho = scheme.params.rho;
        let init = approximate_initial_data(data, &scheme.coeffs, nu, scheme.params.sigma)?;
        (Tracker::new(scheme, &init, nu, opts)?.run()?, None, rho, 1)
    };
    let residuals = if trajectory.aborted {
        None
    } else {
        Some(residual_check(&trajectory, &auto_rectangles(&trajectory, cfg.output.residual_grid))?)
    };
    Ok(NuRun {
        nu,
        trajectory,
        k,
        rho,
        passes,
        residuals,
        override_failures,
    })
}

/// Summary written next to the CSV files.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub schema: String,
    pub nu: u32,
    pub clean: bool,
    pub aborted: bool,
    pub events: usize,
    pub breaches: usize,
    pub k: Option<u32>,
    pub rho: f64,
    pub passes: usize,
    pub f0: f64,
    pub f1_0: f64,
    pub initial_fronts: usize,
    pub initial_l1_error: f64,
    pub tv_log_p_exact: f64,
    pub tv_log_p_sampled: f64,
    pub max_rarefaction: f64,
    pub max_shock: f64,
    pub composite_mass: f64,
    pub perturbations: usize,
    pub simultaneous_events: usize,
    pub max_residual: Option<f64>,
    pub override_failures: Vec<String>,
    pub parameters: Parameters,
}

impl RunSummary {
    pub fn of(r: &NuRun) -> RunSummary {
        let t = &r.trajectory;
        RunSummary {
            schema: crate::io::output::SCHEMA.to_string(),
            nu: r.nu,
            clean: t.clean(),
            aborted: t.aborted,
            events: t.events.len(),
            breaches: t.breaches.len(),
            k: r.k,
            rho: r.rho,
            passes: r.passes,
            f0: t.f0,
            f1_0: t.f1_0,
            initial_fronts: t.initial.fronts,
            initial_l1_error: t.initial.l1_error,
            tv_log_p_exact: t.initial.tv_log_p_exact,
            tv_log_p_sampled: t.initial.tv_log_p_sampled,
            max_rarefaction: t.max_rarefaction,
            max_shock: t.max_shock,
            composite_mass: t.composite_mass,
            perturbations: t.perturbations,
            simultaneous_events: t.simultaneous_events,
            max_residual: r.residuals.as_ref().map(|q| q.max_v.max(q.max_u)),
            override_failures: r.override_failures.iter().map(|s| s.to_string()).collect(),
            parameters: t.params,
        }
    }
}

/// Files written for one ν.
#[derive(Debug, Clone, PartialEq)]
pub struct RunArtifacts {
    pub dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub dump: Option<PathBuf>,
}

pub fn nu_dir(out: &Path, nu: u32) -> PathBuf {
    out.join(format!("nu_{nu}"))
}

/// Writes every artifact of one ν.
pub fn persist(out: &Path, r: &NuRun) -> Result<RunArtifacts> {
    let dir = nu_dir(out, r.nu);
    let mut files = write_trajectory(&dir, &r.trajectory, r.residuals.as_ref())?;
    let path = dir.join("summary.toml");
    write_toml(&path, &RunSummary::of(r))?;
    files.push(path);
    let dump = write_forensic_dump(&dir, &r.trajectory)?;
    Ok(RunArtifacts { dir, files, dump })
}

/// Result of `cmd_run`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub runs: Vec<(NuRun, RunArtifacts)>,
}

impl RunOutcome {
    pub fn clean(&self) -> bool {
        self.runs.iter().all(|(r, _)| r.clean())
    }

    pub fn first_dump(&self) -> Option<&Path> {
        self.runs.iter().find_map(|(_, a)| a.dump.as_deref())
    }
}

/// Runs every ν of the configuration, one after the other.
pub fn cmd_run(cfg: &RunConfig) -> Result<RunOutcome> {
    let data = cfg.initial_data()?;
    let mut runs = Vec::new();
    for &nu in &cfg.run.nu {
        let r = execute(cfg, &data, nu)?;
        let a = persist(&cfg.output.dir, &r)?;
        let stop = !r.clean() && cfg.run.strict == Strictness::Fail;
        runs.push((r, a));
        if stop {
            break;
        }
    }
    Ok(RunOutcome { runs })
}

// ---------------------------------------------------------------- converge

/// `∫ (|v₁ − v₂| + |u₁ − u₂|) dx` between two piecewise-constant slices.
pub fn slice_distance(a: &Slice, b: &Slice) -> f64 {
    let mut cuts: Vec<f64> = a.fronts.iter().chain(&b.fronts).map(|f| f.x).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts.windows(2)
        .map(|w| {
            let m = 0.5 * (w[0] + w[1]);
            let (p, q) = (a.state_at(m), b.state_at(m));
            ((p.v - q.v).abs() + (p.u - q.u).abs()) * (w[1] - w[0])
        })
        .sum()
}

/// Single jump in one phase, if the data is exactly that.
pub fn single_phase_riemann(data: &InitialData, cfg: &RunConfig) -> Option<ExactRiemann> {
    let c = cfg.coefficients;
    if !(c.a_l == c.a_m && c.a_m == c.a_r) {
        return None;
    }
    let mut knots: Vec<f64> = [&data.v, &data.u]
        .iter()
        .map(|p| match p {
            Profile::Piecewise { breakpoints, .. } => Some(breakpoints.clone()),
            Profile::Builtin(crate::data::Builtin::Step { at, .. }) => Some(vec![*at]),
            Profile::Builtin(_) => None,
        })
        .collect::<Option<Vec<_>>>()?
        .concat();
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    let &[x0] = knots.as_slice() else { return None };
    let lambda = data.phases.lambda_at(x0);
    let left = State::new(data.v.eval_left(x0), data.u.eval_left(x0), lambda, c.a_m).ok()?;
    let right = State::new(data.v.eval(x0), data.u.eval(x0), lambda, c.a_m).ok()?;
    ExactRiemann::new(x0, left, right).ok()
}

/// One row of the convergence table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergeRow {
    pub nu: u32,
    pub initial_l1: f64,
    pub one_over_nu: f64,
    /// Distance at the final time to the next ν of the list.
    pub distance_to_next: Option<f64>,
    pub composite_mass: f64,
    pub max_residual: Option<f64>,
    /// Distance to the exact solution, for single-phase Riemann data.
    pub exact_l1: Option<f64>,
    pub events: usize,
    pub clean: bool,
}

/// Result of `cmd_converge`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergeOutcome {
    pub rows: Vec<ConvergeRow>,
    /// `d_{i+1} <= 1.5 d_i` along the table.
    pub trend_ok: bool,
    pub runs: Vec<(NuRun, RunArtifacts)>,
    pub table: PathBuf,
}

impl ConvergeOutcome {
    pub fn clean(&self) -> bool {
        self.runs.iter().all(|(r, _)| r.clean())
    }
}

/// Nonincreasing up to the factor `slack`.
pub fn trend_nonincreasing(d: &[f64], slack: f64) -> bool {
    d.windows(2).all(|w| w[1] <= slack * w[0] || w[1] <= 1e-14)
}

/// Runs every ν concurrently and tabulates the convergence indicators.
pub fn cmd_converge(cfg: &RunConfig) -> Result<ConvergeOutcome> {
    if cfg.run.nu.len() < 2 {
        return Err(Error::Config("converge needs at least two values of ν".into()));
    }
    let data = cfg.initial_data()?;
    let mut nus = cfg.run.nu.clone();
    nus.sort_unstable();
    nus.dedup();
    let results: Vec<Result<(NuRun, RunArtifacts)>> = std::thread::scope(|s| {
        let handles: Vec<_> = nus
            .iter()
            .map(|&nu| {
                let data = &data;
                s.spawn(move || {
                    let r = execute(cfg, data, nu)?;
                    let a = persist(&cfg.output.dir, &r)?;
                    Ok((r, a))
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("run thread panicked")).collect()
    });
    let runs = results.into_iter().collect::<Result<Vec<_>>>()?;
    let exact = single_phase_riemann(&data, cfg);
    let mut rows = Vec::new();
    for (i, (r, _)) in runs.iter().enumerate() {
        let t = &r.trajectory;
        let fin = t.final_slice();
        let distance_to_next = runs.get(i + 1).map(|(q, _)| slice_distance(fin, q.trajectory.final_slice()));
        let exact_l1 = exact.as_ref().map(|e| {
            let span: Vec<f64> = fin.fronts.iter().map(|f| f.x).chain(e.breakpoints(fin.t)).collect();
            let lo = span.iter().cloned().fold(e.x0, f64::min) - 1.0;
            let hi = span.iter().cloned().fold(e.x0, f64::max) + 1.0;
            l1_distance(fin, e, lo, hi)
        });
        rows.push(ConvergeRow {
            nu: r.nu,
            initial_l1: t.initial.l1_error,
            one_over_nu: 1.0 / r.nu as f64,
            distance_to_next,
            composite_mass: t.composite_mass,
            max_residual: r.residuals.as_ref().map(|q| q.max_off_composite()),
            exact_l1,
            events: t.events.len(),
            clean: t.clean(),
        });
    }
    let d: Vec<f64> = rows.iter().filter_map(|r| r.distance_to_next).collect();
    let trend_ok = trend_nonincreasing(&d, 1.5);
    let table = cfg.output.dir.join("converge.csv");
    let opt = |x: Option<f64>| x.map_or(String::new(), num);
    write_csv(
        &table,
        &header_line("converge", None, None),
        &["nu", "initial_l1", "one_over_nu", "distance_to_next", "composite_mass", "max_residual", "exact_l1", "events", "clean"],
        rows.iter().map(|r| {
            vec![
                r.nu.to_string(),
                num(r.initial_l1),
                num(r.one_over_nu),
                opt(r.distance_to_next),
                num(r.composite_mass),
                opt(r.max_residual),
                opt(r.exact_l1),
                r.events.to_string(),
                r.clean.to_string(),
            ]
        }),
    )?;
    Ok(ConvergeOutcome {
        rows,
        trend_ok,
        runs,
        table,
    })
}

// ---------------------------------------------------------------- probe-appendix

/// One row of the sharpness table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeRow {
    pub delta: f64,
    pub k: f64,
    pub a_k1: f64,
    pub max_ratio: f64,
    pub first_failure: Option<f64>,
    pub verdict: Sharpness,
    pub expected: Sharpness,
}

/// Result of `cmd_probe_appendix`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeOutcome {
    pub rows: Vec<ProbeRow>,
    /// `max Θ(2/3, z)` over the grid on `(0, 5]`.
    pub theta_two_thirds_max: f64,
    /// Some `z₀ < 0.01` with `Θ(0.8, z₀) > 1`.
    pub theta_exceed_at: Option<f64>,
    pub files: Vec<PathBuf>,
}

impl ProbeOutcome {
    pub fn all_expected(&self) -> bool {
        self.rows.iter().all(|r| r.verdict == r.expected) && self.theta_two_thirds_max <= 1.0 && self.theta_exceed_at.is_some()
    }
}

/// δ grid `0.1, 0.2, …, 1.9` plus `√5 − 1`.
pub fn probe_grid() -> Vec<f64> {
    let mut g: Vec<f64> = (1..=19).map(|i| i as f64 / 10.0).collect();
    g.push(5f64.sqrt() - 1.0);
    g.sort_by(f64::total_cmp);
    g
}

/// Sharpness table for the absorbed-wave bound and the Θ checks.
pub fn cmd_probe_appendix(out: &Path) -> Result<ProbeOutcome> {
    let critical = 5f64.sqrt() - 1.0;
    let mut rows = Vec::new();
    for delta in probe_grid() {
        let s = sharpness_scan(delta, 1.0)?;
        rows.push(ProbeRow {
            delta,
            k: k_of_delta(delta),
            a_k1: s.a_k1,
            max_ratio: s.max_ratio,
            first_failure: s.first_failure,
            verdict: s.verdict,
            expected: if delta <= critical {
                Sharpness::HoldsEverywhere
            } else {
                Sharpness::FailsNearZero
            },
        });
    }
    let zs: Vec<f64> = (1..=500).map(|i| 5.0 * i as f64 / 500.0).collect();
    let theta_two_thirds_max = zs.iter().map(|&z| theta_refined(2.0 / 3.0, z)).fold(0.0, f64::max);
    let small: Vec<f64> = (1..100).map(|i| 1e-4 * i as f64).collect();
    let theta_exceed_at = small.iter().copied().find(|&z| theta_refined(0.8, z) > 1.0);

    std::fs::create_dir_all(out).map_err(|e| Error::Config(format!("cannot create {}: {e}", out.display())))?;
    let mut files = Vec::new();
    let path = out.join("appendix_sharpness.csv");
    write_csv(
        &path,
        &header_line("appendix_sharpness", None, None),
        &["delta", "k", "a_k1", "max_ratio", "first_failure", "verdict", "expected"],
        rows.iter().map(|r| {
            vec![
                num(r.delta),
                num(r.k),
                num(r.a_k1),
                num(r.max_ratio),
                r.first_failure.map_or(String::new(), num),
                format!("{:?}", r.verdict),
                format!("{:?}", r.expected),
            ]
        }),
    )?;
    files.push(path);
    let path = out.join("appendix_theta.csv");
    write_csv(
        &path,
        &header_line("appendix_theta", None, None),
        &["delta", "z", "theta"],
        [2.0 / 3.0, 0.8]
            .into_iter()
            .flat_map(|d| small.iter().chain(&zs).map(move |&z| vec![num(d), num(z), num(theta_refined(d, z))])),
    )?;
    files.push(path);
    Ok(ProbeOutcome {
        rows,
        theta_two_thirds_max,
        theta_exceed_at,
        files,
    })
}
