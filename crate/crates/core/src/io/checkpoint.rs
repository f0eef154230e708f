//! Checkpoint directory: one dump per field per slice plus `manifest.txt`.

use super::field::{read_field, write_field, FieldData};
use crate::error::{Error, Result};
use crate::iteration::State;
use crate::spectral::TimeSeries;
use std::collections::BTreeMap;
use std::fs;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

pub const CHECKPOINT_FORMAT: &str = "MHDCKPT v1";

/// `key = value` lines, written in key order.
pub type Manifest = BTreeMap<String, String>;

const FIELDS: [&str; 5] = ["u", "b", "p", "r_u", "r_b"];

fn file_name(field: &str, i: usize) -> String {
    format!("{field}_{i:04}.bin")
}

/// Write `s` into `dir` (created if needed). `extra` entries are added to the
/// manifest.
pub fn write_checkpoint(dir: &Path, s: &State, extra: &[(String, String)]) -> Result<()> {
    fs::create_dir_all(dir)?;
    for i in 0..s.u.len() {
        let t = s.u.time(i);
        let items = [
            FieldData::Vector(s.u.slices[i].clone()),
            FieldData::Vector(s.b.slices[i].clone()),
            FieldData::Scalar(s.p.slices[i].clone()),
            FieldData::Tensor(s.r_u.slices[i].clone()),
            FieldData::Tensor(s.r_b.slices[i].clone()),
        ];
        for (name, f) in FIELDS.iter().zip(&items) {
            let mut w = BufWriter::new(fs::File::create(dir.join(file_name(name, i)))?);
            write_field(&mut w, f, t)?;
            w.flush()?;
        }
    }
    let mut m = Manifest::new();
    m.insert("format".into(), CHECKPOINT_FORMAT.into());
    m.insert("q".into(), s.q.to_string());
    m.insert("grid_n".into(), s.u.slices[0].grid.n.to_string());
    m.insert("time_n".into(), s.u.len().to_string());
    m.insert("t0".into(), s.u.t0.to_string());
    m.insert("dt".into(), s.u.dt.to_string());
    m.insert("interior_lo".into(), s.u.interior.0.to_string());
    m.insert("interior_hi".into(), s.u.interior.1.to_string());
    for (k, v) in extra {
        m.insert(k.clone(), v.clone());
    }
    let mut text = String::new();
    for (k, v) in &m {
        text.push_str(&format!("{k} = {v}\n"));
    }
    fs::write(dir.join("manifest.txt"), text)?;
    Ok(())
}

pub fn read_manifest(dir: &Path) -> Result<Manifest> {
    let text = fs::read_to_string(dir.join("manifest.txt"))?;
    let mut m = Manifest::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let (k, v) = line
            .split_once(" = ")
            .ok_or_else(|| Error::Format(format!("bad manifest line {line:?}")))?;
        m.insert(k.to_string(), v.to_string());
    }
    if m.get("format").map(String::as_str) != Some(CHECKPOINT_FORMAT) {
        return Err(Error::Format("not a checkpoint manifest".into()));
    }
    Ok(m)
}

fn get<T: std::str::FromStr>(m: &Manifest, k: &str) -> Result<T> {
    m.get(k)
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::Format(format!("manifest key {k} missing or invalid")))
}

pub fn read_checkpoint(dir: &Path) -> Result<(State, Manifest)> {
    let m = read_manifest(dir)?;
    let nt: usize = get(&m, "time_n")?;
    let t0: f64 = get(&m, "t0")?;
    let dt: f64 = get(&m, "dt")?;
    let interior = (get(&m, "interior_lo")?, get(&m, "interior_hi")?);
    let mut cols: Vec<Vec<FieldData>> = vec![Vec::with_capacity(nt); FIELDS.len()];
    for i in 0..nt {
        for (name, col) in FIELDS.iter().zip(cols.iter_mut()) {
            let mut r = BufReader::new(fs::File::open(dir.join(file_name(name, i)))?);
            let (f, t) = read_field(&mut r)?;
            if (t - (t0 + i as f64 * dt)).abs() > 1e-12 * dt {
                return Err(Error::Format(format!("{name} slice {i} has time {t}")));
            }
            col.push(f);
        }
    }
    let mut it = cols.into_iter();
    let wrong = || Error::Format("field kind does not match its slot".into());
    let vecs = |c: Vec<FieldData>| {
        c.into_iter()
            .map(|f| {
                if let FieldData::Vector(v) = f {
                    Ok(v)
                } else {
                    Err(wrong())
                }
            })
            .collect::<Result<Vec<_>>>()
    };
    let tens = |c: Vec<FieldData>| {
        c.into_iter()
            .map(|f| {
                if let FieldData::Tensor(v) = f {
                    Ok(v)
                } else {
                    Err(wrong())
                }
            })
            .collect::<Result<Vec<_>>>()
    };
    let scal = |c: Vec<FieldData>| {
        c.into_iter()
            .map(|f| {
                if let FieldData::Scalar(v) = f {
                    Ok(v)
                } else {
                    Err(wrong())
                }
            })
            .collect::<Result<Vec<_>>>()
    };
    let u = TimeSeries {
        t0,
        dt,
        slices: vecs(it.next().unwrap())?,
        interior,
    };
    let s = State {
        q: get(&m, "q")?,
        b: u.with_slices(vecs(it.next().unwrap())?),
        p: u.with_slices(scal(it.next().unwrap())?),
        r_u: u.with_slices(tens(it.next().unwrap())?),
        r_b: u.with_slices(tens(it.next().unwrap())?),
        u,
    };
    Ok((s, m))
}
