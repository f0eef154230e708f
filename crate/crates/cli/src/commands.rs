//! Subcommand bodies. Each returns the process exit code on success.

use crate::config::RunConfig;
use mhd_core::blocks::Profile;
use mhd_core::diagnostics::{diagnose_state, write_csv};
use mhd_core::geometry::{
    eps_u, lambda_b, lambda_u, m_star, WaveVectorFrame, GAMMA_B_AT_ZERO, N_LAMBDA,
};
use mhd_core::io::{read_checkpoint, read_manifest, run_levels, RunOptions, RunSummary};
use mhd_core::iteration::StepOptions;
use mhd_core::params::{derive_scales, nyquist_report, validate_regime};
use mhd_core::selfcheck::{run_all, FrameTables, OracleConfig};
use mhd_core::spectral::Spectral;
use mhd_core::{Error, Result};
use std::io::{self, Write};
use std::path::Path;

/// Regime table for every level the config would build. Returns whether an
/// asymptotic margin failed; numeric margins at the configured `a` are
/// reported only.
fn print_regime(cfg: &RunConfig, out: &mut impl Write) -> Result<bool> {
    let params = cfg.params();
    let mut failed = false;
    writeln!(out, "config_hash {}", cfg.hash())?;
    writeln!(
        out,
        "q name log_margin exponent_margin numeric asymptotic statement"
    )?;
    let pass = |b: bool| if b { "pass" } else { "fail" };
    for q in 0..params.q_max.max(1) {
        for r in validate_regime(&params, q) {
            failed |= !r.asymptotic_pass;
            writeln!(
                out,
                "{q} {} {:.6e} {:.6e} {} {} {}",
                r.name,
                r.log_margin,
                r.exponent_margin,
                pass(r.numeric_pass),
                pass(r.asymptotic_pass),
                r.statement
            )?;
        }
    }
    writeln!(
        out,
        "q lambda_q lambda_q1 delta_q1 ell r r_lambda active_frequency nyquist resolved"
    )?;
    for q in 0..params.q_max.max(1) {
        match derive_scales(&params, q) {
            Ok(s) => {
                let n = nyquist_report(&params, q, |r| Profile::shared().effective_bandwidth(r));
                writeln!(
                    out,
                    "{q} {:e} {:e} {:e} {:e} {:e} {:e} {:e} {} {}",
                    s.lambda_q,
                    s.lambda_q1,
                    s.delta_q1,
                    s.ell,
                    s.r,
                    s.r_lambda,
                    n.max_active_frequency,
                    n.nyquist,
                    n.resolved
                )?;
            }
            Err(e) => writeln!(out, "{q} {e}")?,
        }
    }
    Ok(failed)
}

pub fn validate(path: &Path) -> Result<u8> {
    let cfg = RunConfig::load(path)?;
    cfg.ensure_output_dir()?;
    let failed = print_regime(&cfg, &mut io::stdout().lock())?;
    Ok(if failed && cfg.strict_regime { 2 } else { 0 })
}

fn options(cfg: &RunConfig) -> RunOptions {
    RunOptions {
        params: cfg.params(),
        step: StepOptions {
            force_unresolved: cfg.force_unresolved,
        },
        strict_products: cfg.strict_products,
        dump_fields: cfg.dump_fields,
        emit_vtk: cfg.emit_vtk,
        config_hash: cfg.hash(),
        resume_from: None,
    }
}

fn print_summary(cfg: &RunConfig, s: &RunSummary, out: &mut impl Write) -> Result<()> {
    writeln!(
        out,
        "q dir residual_slices residual_over_tolerance helicity_max_deviation"
    )?;
    for l in &s.levels {
        let over = l
            .residuals
            .iter()
            .filter(|r| {
                r.velocity > cfg.residual_tolerance_factor * r.velocity_tolerance()
                    || r.magnetic > cfg.residual_tolerance_factor * r.magnetic_tolerance()
            })
            .count();
        let dev = l.helicity.iter().map(|h| h.deviation()).fold(0.0, f64::max);
        writeln!(
            out,
            "{} {} {} {} {:.6e}",
            l.q,
            l.dir.display(),
            l.residuals.len(),
            over,
            dev
        )?;
    }
    writeln!(out, "q margin measured bound holds")?;
    for (q, m) in s.margins() {
        writeln!(
            out,
            "{q} {} {:.6e} {:.6e} {}",
            m.name,
            m.measured,
            m.bound,
            m.holds()
        )?;
    }
    Ok(())
}

fn strict_gate(cfg: &RunConfig) -> Result<Option<u8>> {
    if !cfg.strict_regime {
        return Ok(None);
    }
    let mut sink = Vec::new();
    if print_regime(cfg, &mut sink)? {
        io::stderr().write_all(&sink)?;
        eprintln!("mhd: regime check failed under strict_regime");
        return Ok(Some(2));
    }
    Ok(None)
}

pub fn run(path: &Path, resume: Option<&Path>) -> Result<u8> {
    let cfg = RunConfig::load(path)?;
    cfg.ensure_output_dir()?;
    if let Some(code) = strict_gate(&cfg)? {
        return Ok(code);
    }
    let mut opts = options(&cfg);
    opts.resume_from = resume.map(Path::to_path_buf);
    let summary = run_levels(&opts, &cfg.output_dir)?;
    print_summary(&cfg, &summary, &mut io::stdout().lock())?;
    Ok(0)
}

pub fn step(path: &Path, checkpoint: &Path) -> Result<u8> {
    let cfg = RunConfig::load(path)?;
    cfg.ensure_output_dir()?;
    if let Some(code) = strict_gate(&cfg)? {
        return Ok(code);
    }
    let manifest = read_manifest(checkpoint)?;
    let q: usize = manifest
        .get("q")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::Format("checkpoint manifest has no level".into()))?;
    let mut opts = options(&cfg);
    opts.params.q_max = q + 1;
    opts.resume_from = Some(checkpoint.to_path_buf());
    let summary = run_levels(&opts, &cfg.output_dir)?;
    print_summary(&cfg, &summary, &mut io::stdout().lock())?;
    Ok(0)
}

pub fn oracles(path: Option<&Path>) -> Result<u8> {
    let cfg = match path {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let oc = OracleConfig {
        seed: cfg.oracle_seed,
        identity_tolerance: cfg.identity_tolerance_abs,
        slope_tolerance: cfg.oracle_slope_tolerance,
        ..OracleConfig::default()
    };
    let results = run_all(&oc, &FrameTables::standard())?;
    let mut out = io::stdout().lock();
    writeln!(out, "name measured expected tolerance result")?;
    for r in &results {
        writeln!(out, "{r}")?;
    }
    let failed = results.iter().filter(|r| !r.pass).count();
    writeln!(
        out,
        "summary {} passed {} failed",
        results.len() - failed,
        failed
    )?;
    Ok(0)
}

fn frame_line(out: &mut impl Write, set: &str, i: usize, f: &WaveVectorFrame) -> io::Result<()> {
    let v = |a: [i64; 3]| format!("{},{},{}", a[0], a[1], a[2]);
    writeln!(out, "{set} {i} {} {} {}", v(f.k), v(f.k1), v(f.k2))
}

pub fn dump_tables() -> Result<u8> {
    let mut out = io::stdout().lock();
    writeln!(out, "# frames in units of 1/{N_LAMBDA}: set index k k1 k2")?;
    for (i, f) in lambda_b().iter().enumerate() {
        frame_line(&mut out, "magnetic", i, f)?;
    }
    for (i, f) in lambda_u().iter().enumerate() {
        frame_line(&mut out, "velocity", i, f)?;
    }
    let g = GAMMA_B_AT_ZERO.map(|x| format!("{x:.17}"));
    writeln!(out, "skew_weights_at_zero {}", g.join(" "))?;
    writeln!(out, "symmetric_ball_radius {:.17}", eps_u())?;
    writeln!(out, "weight_c1_sum {:.17}", m_star())?;
    writeln!(
        out,
        "profile_effective_bandwidth_r1 {:.17}",
        Profile::shared().effective_bandwidth(1.0)
    )?;
    Ok(0)
}

pub fn diagnose(checkpoint: &Path) -> Result<u8> {
    let (state, manifest) = read_checkpoint(checkpoint)?;
    let sp = Spectral::new(state.u.slices[0].grid.n)?;
    let rows = diagnose_state(&sp, &state)?;
    let hash = manifest
        .get("config_hash")
        .cloned()
        .unwrap_or_else(|| "unknown".into());
    let mut out = io::stdout().lock();
    write_csv(&mut out, &hash, &rows)?;
    out.flush()?;
    Ok(0)
}
