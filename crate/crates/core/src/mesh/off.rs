//! Visualisation export: OFF geometry plus a per-vertex CSV.

use std::io::{self, Write};

use super::SurfaceMesh;
use crate::scalar::Real;

pub fn write_off<T: Real, W: Write>(mesh: &SurfaceMesh<T>, mut w: W) -> io::Result<()> {
    writeln!(w, "OFF")?;
    writeln!(w, "{} {} 0", mesh.num_vertices(), mesh.num_triangles())?;
    for v in mesh.vertices() {
        writeln!(w, "{:.16e} {:.16e} {:.16e}", v[0], v[1], v[2])?;
    }
    for t in mesh.triangles() {
        writeln!(w, "3 {} {} {}", t[0], t[1], t[2])?;
    }
    w.flush()
}

/// CSV with a `vertex` index column followed by one column per named field.
pub fn write_vertex_scalars<T: Real, W: Write>(mut w: W, names: &[&str], columns: &[&[T]]) -> io::Result<()> {
    if names.len() != columns.len() {
        return Err(io::Error::new(
            io::ErrorKind::InvalidInput,
            "one name per column required",
        ));
    }
    let n = columns.first().map_or(0, |c| c.len());
    if columns.iter().any(|c| c.len() != n) {
        return Err(io::Error::new(io::ErrorKind::InvalidInput, "columns differ in length"));
    }
    write!(w, "vertex")?;
    for name in names {
        write!(w, ",{name}")?;
    }
    writeln!(w)?;
    for i in 0..n {
        write!(w, "{i}")?;
        for c in columns {
            write!(w, ",{:.16e}", c[i])?;
        }
        writeln!(w)?;
    }
    w.flush()
}
