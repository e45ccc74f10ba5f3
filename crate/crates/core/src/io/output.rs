//! CSV and TOML artifacts.
//!
//! Every CSV file starts with one comment line holding the schema version
//! and the parameters of the run, followed by a header row.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::front::FrontKind;
use crate::functionals::Parameters;
use crate::io::residual::ResidualReport;
use crate::tracker::{Slice, Trajectory};

pub const SCHEMA: &str = "phasefront-csv/1";

/// Shortest decimal that reads back to the same `f64`.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Config(format!("cannot write {}: {e}", path.display()))
}

/// Comment line with the schema and the parameters.
pub fn header_line(file: &str, nu: Option<u32>, p: Option<&Parameters>) -> String {
    let mut s = format!("# schema={SCHEMA} file={file}");
    if let Some(nu) = nu {
        s += &format!(" nu={nu}");
    }
    if let Some(p) = p {
        for (k, v) in [
            ("m_o", p.m_o),
            ("xi", p.xi),
            ("k_eta_l", p.k_eta_l),
            ("k_zeta_l", p.k_zeta_l),
            ("k_eta_m", p.k_eta_m),
            ("k_zeta_m", p.k_zeta_m),
            ("k_eta_r", p.k_eta_r),
            ("k_zeta_r", p.k_zeta_r),
            ("rho", p.rho),
            ("sigma", p.sigma),
            ("mu", p.mu),
        ] {
            s += &format!(" {k}={}", num(v));
        }
    }
    s
}

/// Writes one CSV file: comment line, header, rows.
pub fn write_csv(path: &Path, comment: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    writeln!(w, "{comment}").map_err(|e| io_err(path, e))?;
    let mut csv = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    csv.write_record(header).map_err(|e| io_err(path, e))?;
    for r in rows {
        csv.write_record(&r).map_err(|e| io_err(path, e))?;
    }
    csv.flush().map_err(|e| io_err(path, e))?;
    Ok(())
}

pub fn write_toml<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = toml::to_string(value).map_err(|e| io_err(path, e))?;
    std::fs::write(path, text).map_err(|e| io_err(path, e))
}

fn kind_fields(k: &FrontKind) -> (String, String) {
    match k {
        FrontKind::Wave { family, strength } => (format!("{}", family.index()), num(*strength)),
        FrontKind::Composite(c) => ("C".to_string(), num(c.size())),
    }
}

fn slice_rows(s: &Slice) -> Vec<Vec<String>> {
    let mut rows = Vec::with_capacity(s.states.len());
    for (i, st) in s.states.iter().enumerate() {
        let lo = if i == 0 { f64::NEG_INFINITY } else { s.fronts[i - 1].x };
        let hi = s.fronts.get(i).map_or(f64::INFINITY, |f| f.x);
        rows.push(vec![num(s.t), num(lo), num(hi), num(st.v), num(st.u), num(st.lambda), num(st.p())]);
    }
    rows
}

/// Writes the artifacts of one run into `dir`; returns the written paths.
pub fn write_trajectory(dir: &Path, t: &Trajectory, residuals: Option<&ResidualReport>) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let p = Some(&t.params);
    let nu = Some(t.nu);
    let mut written = Vec::new();

    let path = dir.join("events.csv");
    write_csv(
        &path,
        &header_line("events", nu, p),
        &[
            "time", "x", "id_l", "family_l", "strength_l", "gen_l", "id_r", "family_r", "strength_r", "gen_r", "solver", "h",
            "delta_f", "delta_f_h", "delta_f_h1", "delta_f_lower", "transmitted", "reflected", "monitors_ok", "outgoing",
        ],
        t.events.iter().map(|e| {
            let [a, b] = &e.incoming;
            vec![
                num(e.time),
                num(e.x),
                a.id.to_string(),
                a.family.to_string(),
                num(a.strength),
                a.generation.to_string(),
                b.id.to_string(),
                b.family.to_string(),
                num(b.strength),
                b.generation.to_string(),
                e.solver.label().to_string(),
                e.h.map_or(String::new(), |h| h.to_string()),
                num(e.delta_f),
                num(e.delta_f_h),
                num(e.delta_f_h1),
                num(e.delta_f_lower),
                num(e.transmitted),
                num(e.reflected),
                e.monitors_ok.to_string(),
                e.outgoing.iter().map(u64::to_string).collect::<Vec<_>>().join(" "),
            ]
        }),
    )?;
    written.push(path);

    let path = dir.join("slices.csv");
    write_csv(
        &path,
        &header_line("slices", nu, p),
        &["t", "x_left", "x_right", "v", "u", "lambda", "p"],
        t.slices.iter().flat_map(slice_rows),
    )?;
    written.push(path);

    let path = dir.join("fronts.csv");
    write_csv(
        &path,
        &header_line("fronts", nu, p),
        &["t", "id", "x", "family", "strength", "generation", "region"],
        t.slices.iter().flat_map(|s| {
            s.fronts.iter().map(move |f| {
                let (fam, st) = kind_fields(&f.kind);
                vec![num(s.t), f.id.to_string(), num(f.x), fam, st, f.generation.to_string(), format!("{:?}", f.region)]
            })
        }),
    )?;
    written.push(path);

    let path = dir.join("functionals.csv");
    write_csv(
        &path,
        &header_line("functionals", nu, p),
        &["t", "F", "L_l", "L_m", "L_r", "Q_l", "Q_m", "Q_r", "L0", "Lbar", "tv_log_p"],
        t.slices.iter().map(|s| {
            let f = &s.functionals;
            vec![
                num(s.t),
                num(f.f_total),
                num(f.l_by_region[0]),
                num(f.l_by_region[1]),
                num(f.l_by_region[2]),
                num(f.q_by_region[0]),
                num(f.q_by_region[1]),
                num(f.q_by_region[2]),
                num(f.l0),
                num(f.lbar()),
                num(s.tv_log_p()),
            ]
        }),
    )?;
    written.push(path);

    let path = dir.join("generations.csv");
    write_csv(
        &path,
        &header_line("generations", nu, p),
        &["t", "k", "F_k", "F_tail_k"],
        t.slices.iter().flat_map(|s| {
            let f = &s.functionals;
            f.f_by_generation
                .iter()
                .map(|(&k, &v)| vec![num(s.t), k.to_string(), num(v), num(f.f_tail(k))])
                .collect::<Vec<_>>()
        }),
    )?;
    written.push(path);

    let path = dir.join("breaches.csv");
    write_csv(
        &path,
        &header_line("breaches", nu, p),
        &["check", "time", "x", "event", "excess", "detail"],
        t.breaches.iter().map(|b| {
            vec![
                b.check.clone(),
                num(b.time),
                num(b.x),
                b.event.map_or(String::new(), |e| e.to_string()),
                num(b.excess),
                b.detail.clone(),
            ]
        }),
    )?;
    written.push(path);

    if let Some(r) = residuals {
        let path = dir.join("residuals.csv");
        write_csv(
            &path,
            &header_line("residuals", nu, p),
            &["x1", "x2", "t1", "t2", "res_v", "res_u", "res_lambda", "local_tv", "composite", "shocks_only"],
            r.rects.iter().map(|q| {
                vec![
                    num(q.rect.x1),
                    num(q.rect.x2),
                    num(q.rect.t1),
                    num(q.rect.t2),
                    num(q.res_v),
                    num(q.res_u),
                    num(q.res_lambda),
                    num(q.local_tv),
                    q.contains_composite.to_string(),
                    q.shocks_only.to_string(),
                ]
            }),
        )?;
        written.push(path);
    }
    Ok(written)
}

/// Human-readable dump around the first breach; returns its path.
pub fn write_forensic_dump(dir: &Path, t: &Trajectory) -> Result<Option<PathBuf>> {
    let Some(b) = t.breaches.first() else { return Ok(None) };
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let path = dir.join("breach_dump.txt");
    let mut s = String::new();
    s += &format!("first breach: {b:#?}\n\n");
    s += &format!("parameters: {:#?}\n\n", t.params);
    if let Some(i) = b.event {
        let lo = i.saturating_sub(5);
        let hi = (i + 1).min(t.events.len());
        for (j, e) in t.events[lo..hi].iter().enumerate() {
            let mark = if lo + j == i { ">>" } else { "  " };
            s += &format!("{mark} event {}: {e:#?}\n", lo + j);
        }
    }
    s += &format!("\nall breaches ({}):\n", t.breaches.len());
    for b in t.breaches.iter().take(100) {
        s += &format!("  {} t={} x={} excess={:e} {}\n", b.check, b.time, b.x, b.excess, b.detail);
    }
    std::fs::write(&path, s).map_err(|e| io_err(&path, e))?;
    Ok(Some(path))
}
