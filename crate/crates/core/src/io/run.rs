//! Level-by-level driver: initial data, steps, checkpoints and reports.

use super::checkpoint::{read_checkpoint, write_checkpoint};
use super::field::{write_field, FieldData};
use super::vtk::write_vtk;
use crate::diagnostics::{
    diagnose_state, helicity_growth_report, weak_residual, write_csv, HelicityRow, ResidualRow,
};
use crate::error::{Error, Result};
use crate::iteration::{initial_state, step, MarginRow, State, StepOptions, StepReport};
use crate::params::{derive_scales, ParamSet};
use crate::spectral::Spectral;
use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub params: ParamSet,
    pub step: StepOptions,
    pub strict_products: bool,
    /// Also dump the increments `u_{q+1} − u_q`, `B_{q+1} − B_q`.
    pub dump_fields: bool,
    pub emit_vtk: bool,
    pub config_hash: String,
    /// Continue from this checkpoint instead of the initial data.
    pub resume_from: Option<PathBuf>,
}

#[derive(Clone, Debug)]
pub struct LevelSummary {
    pub q: usize,
    pub dir: PathBuf,
    pub step: Option<StepReport>,
    pub residuals: Vec<ResidualRow>,
    pub helicity: Vec<HelicityRow>,
}

#[derive(Clone, Debug)]
pub struct RunSummary {
    pub levels: Vec<LevelSummary>,
}

impl RunSummary {
    pub fn margins(&self) -> impl Iterator<Item = (usize, &MarginRow)> {
        self.levels
            .iter()
            .filter_map(|l| l.step.as_ref().map(|s| (l.q, s)))
            .flat_map(|(q, s)| s.margins.iter().map(move |m| (q, m)))
    }
}

fn level_dir(out: &Path, q: usize) -> PathBuf {
    out.join(format!("level_{q}"))
}

fn manifest_extra(params: &ParamSet, q: usize, hash: &str) -> Vec<(String, String)> {
    let mut v = vec![("config_hash".to_string(), hash.to_string())];
    if let Ok(s) = derive_scales(params, q) {
        v.push(("lambda_q".into(), s.lambda_q.to_string()));
        v.push(("delta_q".into(), s.delta_q.to_string()));
        v.push(("lambda_q1".into(), s.lambda_q1.to_string()));
        v.push(("delta_q1".into(), s.delta_q1.to_string()));
        v.push(("ell".into(), s.ell.to_string()));
        v.push(("r".into(), s.r.to_string()));
    }
    v
}

fn summary_text(
    hash: &str,
    q: usize,
    step: Option<&StepReport>,
    res: &[ResidualRow],
    hel: &[HelicityRow],
) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "MHDDIAG v1 summary config_hash={hash}");
    let _ = writeln!(s, "level {q}");
    if let Some(r) = step {
        let _ = writeln!(
            s,
            "step from level {}: lambda_q1={} delta_q1={} ell={} r={} resolved={} (active {:.3e} vs nyquist {})",
            r.q, r.scales.lambda_q1, r.scales.delta_q1, r.scales.ell, r.scales.r, r.nyquist.resolved, r.nyquist.max_active_frequency, r.nyquist.nyquist
        );
        let _ = writeln!(s, "inductive bounds (reported, not asserted):");
        for m in &r.margins {
            let _ = writeln!(
                s,
                "  {:<16} measured {:>12.5e}  bound {:>12.5e}  holds {}",
                m.name,
                m.measured,
                m.bound,
                m.holds()
            );
        }
        let worst = |f: fn(&crate::iteration::SliceReport) -> f64| {
            r.slices.iter().map(f).fold(0.0f64, f64::max)
        };
        let _ = writeln!(
            s,
            "max div u {:.3e}  max div B {:.3e}",
            worst(|x| x.div_u),
            worst(|x| x.div_b)
        );
        let _ = writeln!(
            s,
            "max structure defect R_u {:.3e}  R_B {:.3e}",
            worst(|x| x.structure_u),
            worst(|x| x.structure_b)
        );
        let _ = writeln!(
            s,
            "zero-mode audit defect {:.3e}",
            worst(|x| x.zero_mode_defect)
        );
    }
    let _ = writeln!(
        s,
        "residuals (t, velocity, magnetic, velocity tolerance, magnetic tolerance):"
    );
    for r in res {
        let _ = writeln!(
            s,
            "  {} {:.5e} {:.5e} {:.5e} {:.5e}",
            r.t,
            r.velocity,
            r.magnetic,
            r.velocity_tolerance(),
            r.magnetic_tolerance()
        );
    }
    let _ = writeln!(
        s,
        "magnetic helicity (t, H, H_initial, |H - H_initial|, bound):"
    );
    for h in hel {
        let _ = writeln!(
            s,
            "  {} {:.10e} {:.10e} {:.3e} {:.3e}",
            h.t,
            h.helicity,
            h.initial,
            h.deviation(),
            h.bound
        );
    }
    s
}

fn emit_level(
    sp: &Spectral,
    opts: &RunOptions,
    out: &Path,
    s: &State,
    prev: Option<&State>,
    report: Option<StepReport>,
) -> Result<LevelSummary> {
    let dir = level_dir(out, s.q);
    write_checkpoint(
        &dir,
        s,
        &manifest_extra(&opts.params, s.q, &opts.config_hash),
    )?;
    let rows = diagnose_state(sp, s)?;
    let mut w = BufWriter::new(fs::File::create(dir.join("diagnostics.csv"))?);
    write_csv(&mut w, &opts.config_hash, &rows)?;
    w.flush()?;
    let residuals = if s.u.len() >= 5 {
        weak_residual(sp, s)?
    } else {
        Vec::new()
    };
    let helicity = helicity_growth_report(sp, opts.params.a as f64, std::slice::from_ref(s))?;
    fs::write(
        dir.join("summary.txt"),
        summary_text(
            &opts.config_hash,
            s.q,
            report.as_ref(),
            &residuals,
            &helicity,
        ),
    )?;
    if opts.dump_fields {
        if let Some(prev) = prev {
            let inc = dir.join("increments");
            fs::create_dir_all(&inc)?;
            for i in 0..s.u.len() {
                let t = s.u.time(i);
                let Some(j) = prev.u.index_of(t) else {
                    continue;
                };
                for (name, a, b) in [
                    ("du", &s.u.slices[i], &prev.u.slices[j]),
                    ("db", &s.b.slices[i], &prev.b.slices[j]),
                ] {
                    let mut w =
                        BufWriter::new(fs::File::create(inc.join(format!("{name}_{i:04}.bin")))?);
                    write_field(&mut w, &FieldData::Vector(a.sub(b)), t)?;
                    w.flush()?;
                }
            }
        }
    }
    if opts.emit_vtk {
        for i in s.interior_slices() {
            let mut w = BufWriter::new(fs::File::create(dir.join(format!("slice_{i:04}.vtk")))?);
            let title = format!(
                "level {} t={} config_hash={}",
                s.q,
                s.u.time(i),
                opts.config_hash
            );
            write_vtk(
                &mut w,
                &title,
                &[("p", &s.p.slices[i])],
                &[("u", &s.u.slices[i]), ("B", &s.b.slices[i])],
            )?;
            w.flush()?;
        }
    }
    Ok(LevelSummary {
        q: s.q,
        dir,
        step: report,
        residuals,
        helicity,
    })
}

/// Build levels `0..=q_max` (or continue a checkpoint) and write each level
/// under `out/level_q/`.
pub fn run_levels(opts: &RunOptions, out: &Path) -> Result<RunSummary> {
    let p = &opts.params;
    p.check()?;
    fs::create_dir_all(out)?;
    let sp = Spectral::new(p.grid_n)?.with_strict_products(opts.strict_products);
    let mut levels = Vec::new();
    let mut state = match &opts.resume_from {
        Some(dir) => {
            let (s, m) = read_checkpoint(dir)?;
            if s.u.slices[0].grid.n != p.grid_n {
                return Err(Error::GridMismatch(s.u.slices[0].grid.n, p.grid_n));
            }
            if m.get("config_hash").map(String::as_str) != Some(opts.config_hash.as_str()) {
                return Err(Error::Config(
                    "checkpoint was written under a different configuration".into(),
                ));
            }
            s
        }
        None => {
            let (s, _) = initial_state(p)?;
            levels.push(emit_level(&sp, opts, out, &s, None, None)?);
            s
        }
    };
    while state.q < p.q_max {
        let (next, report) = step(&sp, p, &state, opts.step).map_err(|e| Error::AtLevel {
            q: state.q,
            source: Box::new(e),
        })?;
        levels.push(emit_level(
            &sp,
            opts,
            out,
            &next,
            Some(&state),
            Some(report),
        )?);
        state = next;
    }
    Ok(RunSummary { levels })
}
