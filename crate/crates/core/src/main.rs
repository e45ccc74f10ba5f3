use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use phasefront::error::Error;
use phasefront::io::commands::{cmd_admissibility, cmd_converge, cmd_probe_appendix, cmd_run, CliOverrides};
use phasefront::io::config::RunConfig;
use phasefront::tracker::Strictness;

#[derive(Parser)]
#[command(name = "phasefront", version, about = "Front tracking for two-phase isothermal flow with stationary interfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the initial data against the stability domain and threshold.
    Admissibility(Common),
    /// Run the front-tracking scheme for each ν.
    Run(Common),
    /// Run several ν concurrently and tabulate convergence indicators.
    Converge(Common),
    /// Tabulate the sharpness of the absorbed-wave bound.
    ProbeAppendix {
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Strict {
    Warn,
    Fail,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated list, e.g. `1,2,4`.
    #[arg(long, value_delimiter = ',')]
    nu: Option<Vec<u32>>,
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long, value_enum)]
    strict: Option<Strict>,
    #[arg(long)]
    seed: Option<u64>,
}

impl Common {
    fn load(&self) -> Result<RunConfig, Error> {
        let mut cfg = RunConfig::load(&self.config)?;
        CliOverrides {
            out: self.out.clone(),
            nu: self.nu.clone(),
            horizon: self.horizon,
            strict: self.strict.map(|s| match s {
                Strict::Warn => Strictness::Warn,
                Strict::Fail => Strictness::Fail,
            }),
            seed: self.seed,
        }
        .apply(&mut cfg)?;
        Ok(cfg)
    }
}

fn opt(x: Option<f64>) -> String {
    x.map_or("-".to_string(), |v| format!("{v:.3e}"))
}

fn dispatch(cmd: Command) -> Result<u8, Error> {
    match cmd {
        Command::Admissibility(c) => {
            let cfg = c.load()?;
            let o = cmd_admissibility(&cfg)?;
            let r = &o.report;
            println!("eta = {}, zeta = {} ({})", r.eta, r.zeta, r.special_case.label());
            println!("stable: {}", r.stable);
            println!("H = {}, K(H) = {}", r.h_value, r.k_threshold);
            println!("weighted TV = {}", r.weighted_tv);
            println!("admissible: {}", r.admissible);
            if r.admissible {
                println!("m_o = {}", r.chosen_m_o);
            }
            for f in &o.files {
                println!("wrote {}", f.display());
            }
            Ok(if r.admissible { 0 } else { 2 })
        }
        Command::Run(c) => {
            let cfg = c.load()?;
            let o = cmd_run(&cfg)?;
            for (r, a) in &o.runs {
                for f in &r.override_failures {
                    eprintln!("warning: nu = {}: overridden parameters violate {f}", r.nu);
                }
                let t = &r.trajectory;
                println!(
                    "nu = {}: {} events, {} breaches, composite mass {:.3e}, max residual {} -> {}",
                    r.nu,
                    t.events.len(),
                    t.breaches.len(),
                    t.composite_mass,
                    opt(r.residuals.as_ref().map(|q| q.max_v.max(q.max_u))),
                    a.dir.display()
                );
            }
            if let Some(d) = o.first_dump() {
                eprintln!("monitor breach, forensic dump: {}", d.display());
            }
            Ok(if o.clean() { 0 } else { 3 })
        }
        Command::Converge(c) => {
            let cfg = c.load()?;
            let o = cmd_converge(&cfg)?;
            println!("{:>4} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10} {:>8}", "nu", "init_l1", "1/nu", "dist_next", "composite", "residual", "exact_l1", "events");
            for r in &o.rows {
                println!(
                    "{:>4} {:>10.3e} {:>10.3e} {:>10} {:>10.3e} {:>10} {:>10} {:>8}",
                    r.nu,
                    r.initial_l1,
                    r.one_over_nu,
                    opt(r.distance_to_next),
                    r.composite_mass,
                    opt(r.max_residual),
                    opt(r.exact_l1),
                    r.events
                );
            }
            println!("distance trend nonincreasing (slack 1.5): {}", o.trend_ok);
            println!("wrote {}", o.table.display());
            let strict = cfg.run.strict == Strictness::Fail;
            Ok(if !o.clean() || (strict && !o.trend_ok) { 3 } else { 0 })
        }
        Command::ProbeAppendix { out } => {
            let o = cmd_probe_appendix(&out)?;
            println!("{:>10} {:>10} {:>12} {:>10}  verdict", "delta", "k", "a_k1", "max_ratio");
            for r in &o.rows {
                println!("{:>10.6} {:>10.6} {:>12.4e} {:>10.6}  {:?}", r.delta, r.k, r.a_k1, r.max_ratio, r.verdict);
            }
            println!("max Theta(2/3, z) on (0,5]: {}", o.theta_two_thirds_max);
            println!("Theta(0.8, z) > 1 at z = {}", opt(o.theta_exceed_at));
            for f in &o.files {
                println!("wrote {}", f.display());
            }
            Ok(if o.all_expected() { 0 } else { 3 })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
