//! Grid exports: per-sample invariants as CSV, and a triangulated OBJ mesh
//! of a 3D projection.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use nalgebra::{Matrix3x4, SVD};

use crate::error::{Error, Result};
use crate::minkowski::{inner, Vec4M};
use crate::surface::{point_data, PointData, SurfacePatch};
use crate::verification::GridSpec;

pub const CSV_HEADER: &str = "u,v,x1,x2,x3,x4,E,F,G,L,M,N,k,kappa,K,H1,H2,H3,H4,HdotH";

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

/// The numeric columns of one CSV row, in header order.
pub fn csv_fields(p: &PointData) -> [f64; 20] {
    [
        p.u,
        p.v,
        p.z.x1,
        p.z.x2,
        p.z.x3,
        p.z.x4,
        p.E,
        p.F,
        p.G,
        p.L,
        p.M,
        p.N,
        p.k,
        p.kappa_normal,
        p.K,
        p.H.x1,
        p.H.x2,
        p.H.x3,
        p.H.x4,
        inner(p.H, p.H),
    ]
}

/// Writes the header and one row per grid point (u outer, v inner); returns the row count.
pub fn write_grid_csv<W: Write>(patch: &SurfacePatch, grid: &GridSpec, mut w: W) -> Result<usize> {
    grid.check_patch(patch)?;
    writeln!(w, "{CSV_HEADER}")?;
    let mut rows = 0;
    for (u, v) in grid.points() {
        let p = point_data(patch, u, v)?;
        let line: Vec<String> = csv_fields(&p).iter().map(|&x| fmt_real(x)).collect();
        writeln!(w, "{}", line.join(","))?;
        rows += 1;
    }
    w.flush()?;
    Ok(rows)
}

pub fn export_grid_csv(patch: &SurfacePatch, grid: &GridSpec, path: &Path) -> Result<usize> {
    write_grid_csv(patch, grid, BufWriter::new(File::create(path)?))
}

/// Linear map `R^4 -> R^3` used to place vertices.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Projection {
    rows: [[f64; 4]; 3],
}

impl Projection {
    pub fn new(rows: [[f64; 4]; 3]) -> Result<Self> {
        let m = Matrix3x4::from_fn(|i, j| rows[i][j]);
        let svd = SVD::new(m, false, false);
        let s = svd.singular_values;
        let smax = s.iter().copied().fold(0.0f64, f64::max);
        let rank = s.iter().filter(|&&x| x.is_finite() && x > 1e-12 * smax.max(f64::MIN_POSITIVE)).count();
        if rank < 3 || !rows.iter().flatten().all(|x| x.is_finite()) {
            return Err(Error::SingularProjection { rank });
        }
        Ok(Self { rows })
    }

    /// `(x1, x2, x3)`.
    pub fn drop_x4() -> Self {
        Self { rows: [[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]] }
    }

    pub fn rows(&self) -> [[f64; 4]; 3] {
        self.rows
    }

    pub fn apply(&self, z: Vec4M) -> [f64; 3] {
        let a = z.to_array();
        self.rows.map(|r| r[0] * a[0] + r[1] * a[1] + r[2] * a[2] + r[3] * a[3])
    }
}

impl Default for Projection {
    fn default() -> Self {
        Self::drop_x4()
    }
}

/// Vertices for every grid point and two triangles per grid cell (1-based
/// indices); returns `(vertex count, face count)`.
pub fn write_obj<W: Write>(patch: &SurfacePatch, grid: &GridSpec, projection: &Projection, mut w: W) -> Result<(usize, usize)> {
    grid.check_patch(patch)?;
    let (nu, nv) = (grid.u_samples, grid.v_samples);
    writeln!(w, "# {} ({nu} x {nv} samples)", patch.label)?;
    for (u, v) in grid.points() {
        let [x, y, z] = projection.apply(patch.position(u, v)?);
        writeln!(w, "v {} {} {}", fmt_real(x), fmt_real(y), fmt_real(z))?;
    }
    let idx = |i: usize, j: usize| i * nv + j + 1;
    let mut faces = 0;
    for i in 0..nu - 1 {
        for j in 0..nv - 1 {
            let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            writeln!(w, "f {a} {b} {c}")?;
            writeln!(w, "f {a} {c} {d}")?;
            faces += 2;
        }
    }
    w.flush()?;
    Ok((nu * nv, faces))
}

pub fn export_obj(patch: &SurfacePatch, grid: &GridSpec, projection: &Projection, path: &Path) -> Result<(usize, usize)> {
    write_obj(patch, grid, projection, BufWriter::new(File::create(path)?))
}
