//! `MHDFIELD v1 <kind> <n> <time>` header line followed by little-endian
//! `f64` components, component-major.

use crate::error::{Error, Result};
use crate::spectral::{Grid3, ScalarField, Structure, TensorField, VectorField};
use std::io::{BufRead, Read, Write};

pub const FIELD_MAGIC: &str = "MHDFIELD v1";

#[derive(Clone, Debug, PartialEq)]
pub enum FieldData {
    Scalar(ScalarField),
    Vector(VectorField),
    Tensor(TensorField),
}

impl FieldData {
    fn kind(&self) -> &'static str {
        match self {
            FieldData::Scalar(_) => "scalar",
            FieldData::Vector(v) if v.solenoidal => "vector-solenoidal",
            FieldData::Vector(_) => "vector",
            FieldData::Tensor(t) => match t.structure {
                Structure::General => "tensor",
                Structure::SymmetricTraceless => "tensor-symmetric-traceless",
                Structure::Skew => "tensor-skew",
            },
        }
    }

    fn grid(&self) -> Grid3 {
        match self {
            FieldData::Scalar(f) => f.grid,
            FieldData::Vector(f) => f.grid,
            FieldData::Tensor(f) => f.grid,
        }
    }

    fn components(&self) -> Vec<&[f64]> {
        match self {
            FieldData::Scalar(f) => vec![&f.data],
            FieldData::Vector(f) => f.c.iter().map(|c| c.as_slice()).collect(),
            FieldData::Tensor(f) => f.c.iter().flatten().map(|c| c.as_slice()).collect(),
        }
    }
}

pub fn write_field<W: Write>(out: &mut W, field: &FieldData, time: f64) -> Result<()> {
    writeln!(
        out,
        "{FIELD_MAGIC} {} {} {time}",
        field.kind(),
        field.grid().n
    )?;
    for comp in field.components() {
        let mut buf = Vec::with_capacity(comp.len() * 8);
        for v in comp {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        out.write_all(&buf)?;
    }
    Ok(())
}

fn read_component<R: Read>(inp: &mut R, len: usize) -> Result<Vec<f64>> {
    let mut buf = vec![0u8; len * 8];
    inp.read_exact(&mut buf)?;
    Ok(buf
        .chunks_exact(8)
        .map(|b| f64::from_le_bytes(b.try_into().expect("8 bytes")))
        .collect())
}

/// Read one dump; returns the field and its time stamp.
pub fn read_field<R: BufRead>(inp: &mut R) -> Result<(FieldData, f64)> {
    let mut line = String::new();
    inp.read_line(&mut line)?;
    let parts: Vec<&str> = line.trim_end().split(' ').collect();
    let bad = || Error::Format(format!("bad field header {:?}", line.trim_end()));
    if parts.len() != 5 || format!("{} {}", parts[0], parts[1]) != FIELD_MAGIC {
        return Err(bad());
    }
    let n: usize = parts[3].parse().map_err(|_| bad())?;
    let time: f64 = parts[4].parse().map_err(|_| bad())?;
    let grid = Grid3::new(n)?;
    let len = grid.len();
    let field = match parts[2] {
        "scalar" => FieldData::Scalar(ScalarField::from_data(grid, read_component(inp, len)?)),
        k @ ("vector" | "vector-solenoidal") => {
            let c = [
                read_component(inp, len)?,
                read_component(inp, len)?,
                read_component(inp, len)?,
            ];
            FieldData::Vector(VectorField {
                grid,
                c,
                solenoidal: k == "vector-solenoidal",
            })
        }
        k @ ("tensor" | "tensor-symmetric-traceless" | "tensor-skew") => {
            let mut c: [[Vec<f64>; 3]; 3] = Default::default();
            for row in c.iter_mut() {
                for e in row.iter_mut() {
                    *e = read_component(inp, len)?;
                }
            }
            let structure = match k {
                "tensor" => Structure::General,
                "tensor-skew" => Structure::Skew,
                _ => Structure::SymmetricTraceless,
            };
            FieldData::Tensor(TensorField { grid, c, structure })
        }
        _ => return Err(bad()),
    };
    Ok((field, time))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_bitwise() {
        let g = Grid3::new(4).unwrap();
        let fields = [
            FieldData::Scalar(ScalarField::from_fn(g, |x| x[0].sin() / 3.0)),
            FieldData::Vector(
                VectorField::from_fn(g, |x| [x[1], x[2].cos(), 1e-300]).with_solenoidal(true),
            ),
            FieldData::Tensor(TensorField::from_fn(g, Structure::Skew, |x| {
                [[0.0, x[0], 0.1], [-x[0], 0.0, 0.2], [-0.1, -0.2, 0.0]]
            })),
        ];
        for f in fields {
            let mut buf = Vec::new();
            write_field(&mut buf, &f, 0.1 + 0.2).unwrap();
            let (back, t) = read_field(&mut buf.as_slice()).unwrap();
            assert_eq!(back, f);
            assert_eq!(t, 0.1 + 0.2);
        }
    }

    #[test]
    fn rejects_bad_header() {
        let mut data: &[u8] = b"MHDFIELD v2 scalar 4 0\n";
        assert!(read_field(&mut data).is_err());
    }
}
