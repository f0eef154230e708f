//! Legacy ASCII VTK structured-points output.

use crate::error::Result;
use crate::spectral::{ScalarField, VectorField};
use std::f64::consts::PI;
use std::io::Write;

/// Write scalar and vector fields on one grid. `title` goes on the header line.
pub fn write_vtk<W: Write>(
    out: &mut W,
    title: &str,
    scalars: &[(&str, &ScalarField)],
    vectors: &[(&str, &VectorField)],
) -> Result<()> {
    let grid = scalars
        .first()
        .map(|s| s.1.grid)
        .or_else(|| vectors.first().map(|v| v.1.grid));
    let Some(grid) = grid else { return Ok(()) };
    let n = grid.n;
    let h = grid.spacing();
    writeln!(out, "# vtk DataFile Version 3.0")?;
    writeln!(out, "{}", title.replace('\n', " "))?;
    writeln!(out, "ASCII\nDATASET STRUCTURED_POINTS")?;
    writeln!(
        out,
        "DIMENSIONS {n} {n} {n}\nORIGIN {0} {0} {0}\nSPACING {h} {h} {h}",
        -PI
    )?;
    writeln!(out, "POINT_DATA {}", grid.len())?;
    // VTK orders points with x₁ fastest; the flat index has x₃ fastest.
    let order = |f: &mut dyn FnMut(usize) -> std::io::Result<()>| -> std::io::Result<()> {
        for k in 0..n {
            for j in 0..n {
                for i in 0..n {
                    f((i * n + j) * n + k)?;
                }
            }
        }
        Ok(())
    };
    for (name, s) in scalars {
        writeln!(out, "SCALARS {name} double 1\nLOOKUP_TABLE default")?;
        order(&mut |idx| writeln!(out, "{:e}", s.data[idx]))?;
    }
    for (name, v) in vectors {
        writeln!(out, "VECTORS {name} double")?;
        order(&mut |idx| writeln!(out, "{:e} {:e} {:e}", v.c[0][idx], v.c[1][idx], v.c[2][idx]))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid3;

    #[test]
    fn header_and_point_count() {
        let g = Grid3::new(4).unwrap();
        let s = ScalarField::from_fn(g, |x| x[0]);
        let v = VectorField::from_fn(g, |x| [x[0], x[1], x[2]]);
        let mut buf = Vec::new();
        write_vtk(&mut buf, "t", &[("p", &s)], &[("u", &v)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(
            "# vtk DataFile Version 3.0\nt\nASCII\nDATASET STRUCTURED_POINTS\nDIMENSIONS 4 4 4"
        ));
        assert_eq!(text.lines().count(), 10 + 64 + 1 + 64);
        // First two points differ along x₁.
        let lines: Vec<&str> = text.lines().collect();
        assert_ne!(lines[10], lines[11]);
    }
}
