//! Stereographic projection to ℝ³ and mesh/CSV/report serialization.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rayon::prelude::*;

use crate::ambient::{AmbientPoint, BergerParams, Vec3, Vec4};
use crate::error::{Error, Result};
use crate::helix::Surface;
use crate::verify::normal::angle_function;
use crate::verify::report::GridSpec;

/// Points closer than this (Euclidean) to the pole are not projected.
pub const POLE_PROXIMITY: f64 = 1e-9;

/// Projection pole `s · e_axis`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pole {
    /// Zero-based coordinate index.
    pub axis: usize,
    pub negative: bool,
}

impl Default for Pole {
    fn default() -> Self {
        Pole { axis: 3, negative: true }
    }
}

impl Pole {
    pub fn new(axis: usize, negative: bool) -> Result<Self> {
        if axis > 3 {
            return Err(Error::Config(format!("pole axis must be 0..=3, got {axis}")));
        }
        Ok(Pole { axis, negative })
    }

    pub fn sign(self) -> f64 {
        if self.negative {
            -1.0
        } else {
            1.0
        }
    }

    pub fn point(self) -> Vec4 {
        let mut p = Vec4::zeros();
        p[self.axis] = self.sign();
        p
    }

    fn others(self) -> [usize; 3] {
        let mut out = [0; 3];
        let mut k = 0;
        for i in (0..4).filter(|&i| i != self.axis) {
            out[k] = i;
            k += 1;
        }
        out
    }
}

impl FromStr for Pole {
    type Err = Error;

    /// `4-`, `1+`, ... (one-based axis followed by a sign).
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("invalid pole `{s}` (expected {{1,2,3,4}}{{+,-}}, e.g. 4-)"));
        let mut chars = s.trim().chars();
        let axis = chars.next().and_then(|c| c.to_digit(10)).ok_or_else(bad)? as usize;
        let negative = match chars.next() {
            Some('+') => false,
            Some('-') => true,
            _ => return Err(bad()),
        };
        if chars.next().is_some() || !(1..=4).contains(&axis) {
            return Err(bad());
        }
        Pole::new(axis - 1, negative)
    }
}

impl fmt::Display for Pole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.axis + 1, if self.negative { '-' } else { '+' })
    }
}

/// `x_i / (1 − s x_axis)` over the three remaining coordinates.
pub fn stereographic(p: &AmbientPoint, pole: Pole) -> Result<Vec3> {
    let x = p.coords();
    let distance = (x - pole.point()).norm();
    if distance < POLE_PROXIMITY {
        return Err(Error::Domain(format!("point lies within {distance:e} of the projection pole {pole}")));
    }
    let denom = 1.0 - pole.sign() * x[pole.axis];
    let [a, b, c] = pole.others();
    Ok(Vec3::new(x[a], x[b], x[c]) / denom)
}

pub fn inverse_stereographic(y: &Vec3, pole: Pole) -> Result<AmbientPoint> {
    let r2 = y.norm_squared();
    let mut x = Vec4::zeros();
    for (k, i) in pole.others().into_iter().enumerate() {
        x[i] = 2.0 * y[k] / (1.0 + r2);
    }
    x[pole.axis] = pole.sign() * (r2 - 1.0) / (r2 + 1.0);
    AmbientPoint::normalized(x)
}

/// Sampled surface: ambient and projected vertices plus quad faces.
#[derive(Clone, Debug)]
pub struct MeshGrid {
    pub grid: GridSpec,
    pub pole: Pole,
    /// `(u, v)` for every grid vertex, row-major.
    pub parameters: Vec<(f64, f64)>,
    pub ambient: Vec<Vec4>,
    pub nu: Vec<Option<f64>>,
    /// Projected positions of the kept vertices.
    pub vertices: Vec<Vec3>,
    /// For each grid vertex, its index in `vertices` (None when dropped near the pole).
    pub vertex_index: Vec<Option<usize>>,
    /// Quads in `vertices` indices, counter-clockwise in `(u, v)`.
    pub faces: Vec<[usize; 4]>,
    pub dropped: usize,
}

/// Samples the surface over `grid` and projects it from `pole`.
pub fn sample_mesh<S: Surface + ?Sized>(surface: &S, params: &BergerParams, grid: &GridSpec, pole: Pole) -> Result<MeshGrid> {
    if grid.nu < 2 || grid.nv < 2 {
        return Err(Error::Config(format!(
            "mesh grid needs at least 2x2 vertices, got {}x{}",
            grid.nu, grid.nv
        )));
    }
    let parameters: Vec<(f64, f64)> = grid.points().collect();
    let samples: Vec<(Vec4, Option<f64>, Option<Vec3>)> = parameters
        .par_iter()
        .map(|&(u, v)| {
            let jet = surface.jet(u, v)?;
            let nu = match angle_function(&jet, params) {
                Ok(nu) => Some(nu),
                Err(e) if e.is_degenerate() => None,
                Err(e) => return Err(e),
            };
            Ok((*jet.position(), nu, stereographic(&jet.f, pole).ok()))
        })
        .collect::<Result<_>>()?;

    let mut vertices = Vec::new();
    let mut vertex_index = Vec::with_capacity(samples.len());
    let mut ambient = Vec::with_capacity(samples.len());
    let mut nus = Vec::with_capacity(samples.len());
    for (x, nu, projected) in samples {
        ambient.push(x);
        nus.push(nu);
        vertex_index.push(projected.map(|y| {
            vertices.push(y);
            vertices.len() - 1
        }));
    }
    let dropped = vertex_index.iter().filter(|i| i.is_none()).count();
    let mut faces = Vec::new();
    let at = |i: usize, j: usize| vertex_index[j * grid.nu + i];
    for j in 0..grid.nv - 1 {
        for i in 0..grid.nu - 1 {
            if let (Some(a), Some(b), Some(c), Some(d)) = (at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)) {
                faces.push([a, b, c, d]);
            }
        }
    }
    Ok(MeshGrid {
        grid: *grid,
        pole,
        parameters,
        ambient,
        nu: nus,
        vertices,
        vertex_index,
        faces,
        dropped,
    })
}

/// Output formats of `sample_and_export`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Format {
    Obj,
    Ply,
    Csv,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Obj => "obj",
            Format::Ply => "ply",
            Format::Csv => "csv",
        }
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "obj" => Ok(Format::Obj),
            "ply" => Ok(Format::Ply),
            "csv" => Ok(Format::Csv),
            other => Err(Error::Config(format!("unknown format `{other}` (expected obj, ply or csv)"))),
        }
    }
}

pub fn write_obj<W: Write>(mesh: &MeshGrid, mut w: W) -> io::Result<()> {
    writeln!(w, "# stereographic projection from pole {}", mesh.pole)?;
    writeln!(w, "# grid {}x{}, dropped vertices {}", mesh.grid.nu, mesh.grid.nv, mesh.dropped)?;
    for y in &mesh.vertices {
        writeln!(w, "v {:.12} {:.12} {:.12}", y.x, y.y, y.z)?;
    }
    for f in &mesh.faces {
        writeln!(w, "f {} {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1, f[3] + 1)?;
    }
    Ok(())
}

pub fn write_ply<W: Write>(mesh: &MeshGrid, mut w: W) -> io::Result<()> {
    writeln!(w, "ply")?;
    writeln!(w, "format ascii 1.0")?;
    writeln!(w, "comment stereographic projection from pole {}", mesh.pole)?;
    writeln!(w, "element vertex {}", mesh.vertices.len())?;
    for axis in ["x", "y", "z"] {
        writeln!(w, "property double {axis}")?;
    }
    writeln!(w, "element face {}", mesh.faces.len())?;
    writeln!(w, "property list uchar int vertex_indices")?;
    writeln!(w, "end_header")?;
    for y in &mesh.vertices {
        writeln!(w, "{:.12} {:.12} {:.12}", y.x, y.y, y.z)?;
    }
    for f in &mesh.faces {
        writeln!(w, "4 {} {} {} {}", f[0], f[1], f[2], f[3])?;
    }
    Ok(())
}

/// One row per grid vertex; `nu` is `nan` at degenerate points.
pub fn write_csv<W: Write>(mesh: &MeshGrid, mut w: W) -> io::Result<()> {
    writeln!(w, "u,v,F1,F2,F3,F4,nu")?;
    for (((u, v), x), nu) in mesh.parameters.iter().zip(&mesh.ambient).zip(&mesh.nu) {
        write!(w, "{u:.12},{v:.12},{:.12},{:.12},{:.12},{:.12},", x[0], x[1], x[2], x[3])?;
        match nu {
            Some(nu) => writeln!(w, "{nu:.12}")?,
            None => writeln!(w, "nan")?,
        }
    }
    Ok(())
}

pub fn write_mesh<W: Write>(mesh: &MeshGrid, format: Format, w: W) -> io::Result<()> {
    match format {
        Format::Obj => write_obj(mesh, w),
        Format::Ply => write_ply(mesh, w),
        Format::Csv => write_csv(mesh, w),
    }
}
