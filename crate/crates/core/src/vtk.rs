//! Legacy ASCII VTK output of polygonal meshes with nodal and cell fields.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::mesh::PolyMesh;

/// VTK cell type of a generic polygon.
const VTK_POLYGON: u8 = 7;

/// Renders the file contents. Values are printed at full precision, so the
/// output is byte-stable for identical inputs.
pub fn vtk_string(mesh: &PolyMesh, point_data: &[(&str, &[f64])], cell_data: &[(&str, &[f64])]) -> Result<String> {
    for (name, v) in point_data {
        if v.len() != mesh.num_nodes() {
            return Err(Error::Validation(vec![format!(
                "point field '{name}' has {} values for {} nodes",
                v.len(),
                mesh.num_nodes()
            )]));
        }
    }
    for (name, v) in cell_data {
        if v.len() != mesh.num_cells() {
            return Err(Error::Validation(vec![format!(
                "cell field '{name}' has {} values for {} cells",
                v.len(),
                mesh.num_cells()
            )]));
        }
    }
    let mut s = String::new();
    s.push_str("# vtk DataFile Version 3.0\npolyseep\nASCII\nDATASET UNSTRUCTURED_GRID\n");
    let _ = writeln!(s, "POINTS {} double", mesh.num_nodes());
    for p in mesh.vertices() {
        let _ = writeln!(s, "{:?} {:?} 0", p.x, p.y);
    }
    let size: usize = mesh.cells().iter().map(|c| c.vertices.len() + 1).sum();
    let _ = writeln!(s, "CELLS {} {}", mesh.num_cells(), size);
    for c in mesh.cells() {
        let _ = write!(s, "{}", c.vertices.len());
        for v in &c.vertices {
            let _ = write!(s, " {v}");
        }
        s.push('\n');
    }
    let _ = writeln!(s, "CELL_TYPES {}", mesh.num_cells());
    for _ in mesh.cells() {
        let _ = writeln!(s, "{VTK_POLYGON}");
    }
    let scalars = |s: &mut String, name: &str, v: &[f64]| {
        let _ = writeln!(s, "SCALARS {name} double 1\nLOOKUP_TABLE default");
        for x in v {
            let _ = writeln!(s, "{x:?}");
        }
    };
    if !point_data.is_empty() {
        let _ = writeln!(s, "POINT_DATA {}", mesh.num_nodes());
        for (name, v) in point_data {
            scalars(&mut s, name, v);
        }
    }
    if !cell_data.is_empty() {
        let _ = writeln!(s, "CELL_DATA {}", mesh.num_cells());
        for (name, v) in cell_data {
            scalars(&mut s, name, v);
        }
    }
    Ok(s)
}

pub fn write_vtk(
    mesh: &PolyMesh,
    point_data: &[(&str, &[f64])],
    cell_data: &[(&str, &[f64])],
    path: impl AsRef<Path>,
) -> Result<()> {
    std::fs::write(path, vtk_string(mesh, point_data, cell_data)?)?;
    Ok(())
}

/// Contents of a legacy VTK file as written by [`vtk_string`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct VtkData {
    pub points: Vec<Point2>,
    pub cells: Vec<Vec<usize>>,
    pub point_data: Vec<(String, Vec<f64>)>,
    pub cell_data: Vec<(String, Vec<f64>)>,
}

/// Reads back the subset of the legacy format that [`vtk_string`] emits.
pub fn parse_vtk(text: &str) -> Result<VtkData> {
    let lines: Vec<&str> = text.lines().collect();
    let err = |line: usize, msg: &str| Error::Parse { line: line + 1, msg: msg.to_string() };
    let num = |line: usize, tok: Option<&str>| -> Result<f64> {
        tok.and_then(|t| t.parse().ok()).ok_or_else(|| err(line, "expected a number"))
    };
    let mut out = VtkData::default();
    let mut i = 0;
    let mut section_len = 0;
    let mut in_cells = false;
    while i < lines.len() {
        let mut tok = lines[i].split_whitespace();
        match tok.next() {
            Some("POINTS") => {
                let n = num(i, tok.next())? as usize;
                for k in 0..n {
                    let l = i + 1 + k;
                    let mut t = lines.get(l).ok_or_else(|| err(l, "missing point"))?.split_whitespace();
                    out.points.push(Point2::new(num(l, t.next())?, num(l, t.next())?));
                }
                i += n;
            }
            Some("CELLS") => {
                let n = num(i, tok.next())? as usize;
                for k in 0..n {
                    let l = i + 1 + k;
                    let vals: Vec<usize> = lines
                        .get(l)
                        .ok_or_else(|| err(l, "missing cell"))?
                        .split_whitespace()
                        .map(|t| t.parse().map_err(|_| err(l, "bad index")))
                        .collect::<Result<_>>()?;
                    if vals.is_empty() || vals[0] + 1 != vals.len() {
                        return Err(err(l, "cell size does not match its index count"));
                    }
                    out.cells.push(vals[1..].to_vec());
                }
                i += n;
            }
            Some("POINT_DATA") => {
                section_len = num(i, tok.next())? as usize;
                in_cells = false;
            }
            Some("CELL_DATA") => {
                section_len = num(i, tok.next())? as usize;
                in_cells = true;
            }
            Some("SCALARS") => {
                let name = tok.next().ok_or_else(|| err(i, "missing array name"))?.to_string();
                let start = i + 2;
                let vals = (start..start + section_len)
                    .map(|l| num(l, lines.get(l).and_then(|s| s.split_whitespace().next())))
                    .collect::<Result<Vec<f64>>>()?;
                if in_cells {
                    out.cell_data.push((name, vals));
                } else {
                    out.point_data.push((name, vals));
                }
                i = start + section_len - 1;
            }
            _ => {}
        }
        i += 1;
    }
    Ok(out)
}
