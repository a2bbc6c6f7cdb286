//! OBJ and CSV export of surface grids.

use std::io::{BufRead, Write};

use crate::algebra::AlgebraVector;
use crate::error::{Error, Result};
use crate::frame::SurfaceGrid;
use crate::painleve::{fmt17, read_csv_rows};

/// Vertices in row-major order over kept nodes; each cell with four kept
/// corners becomes two triangles.
pub fn write_obj<W: Write>(surface: &SurfaceGrid, mut w: W) -> Result<()> {
    let spec = &surface.spec;
    let mut vertex = vec![0usize; surface.nodes.len()];
    let mut next = 1;
    for (k, node) in surface.nodes.iter().enumerate() {
        if let Some(n) = node {
            writeln!(w, "v {} {} {}", fmt17(n.f.c1), fmt17(n.f.c2), fmt17(n.f.c3))?;
            vertex[k] = next;
            next += 1;
        }
    }
    for i in 0..spec.n_t.saturating_sub(1) {
        for j in 0..spec.n_lambda.saturating_sub(1) {
            let corners = [spec.index(i, j), spec.index(i + 1, j), spec.index(i + 1, j + 1), spec.index(i, j + 1)];
            if corners.iter().any(|k| surface.nodes[*k].is_none()) {
                continue;
            }
            let [a, b, c, d] = corners.map(|k| vertex[k]);
            writeln!(w, "f {a} {b} {c}")?;
            writeln!(w, "f {a} {c} {d}")?;
        }
    }
    Ok(())
}

pub fn write_csv<W: Write>(surface: &SurfaceGrid, mut w: W) -> Result<()> {
    writeln!(w, "t,lambda,F1,F2,F3")?;
    for i in 0..surface.spec.n_t {
        for j in 0..surface.spec.n_lambda {
            if let Some(n) = surface.node(i, j) {
                let row = [surface.t[i], surface.lambda[j], n.f.c1, n.f.c2, n.f.c3].map(fmt17);
                writeln!(w, "{}", row.join(","))?;
            }
        }
    }
    Ok(())
}

/// One row of a surface CSV.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurfacePoint {
    pub t: f64,
    pub lambda: f64,
    pub f: AlgebraVector,
}

pub fn read_csv<R: BufRead>(r: R) -> Result<Vec<SurfacePoint>> {
    read_csv_rows(r, &["t", "lambda", "F1", "F2", "F3"])?
        .into_iter()
        .map(|row| match row[..] {
            [t, lambda, c1, c2, c3] => Ok(SurfacePoint { t, lambda, f: AlgebraVector::new(c1, c2, c3) }),
            _ => Err(Error::Parse("surface CSV rows need 5 fields".into())),
        })
        .collect()
}
