//! Mesh and nodal-field I/O.
//!
//! Two formats are supported:
//!
//! * legacy VTK ASCII `UNSTRUCTURED_GRID`: triangles are cell type 5, boundary
//!   edges are appended as line cells (type 3); optional point scalars follow
//!   in a `POINT_DATA` block.
//! * a plain-text node/element format:
//!
//! ```text
//! # chdbc mesh v1
//! radius <R>
//! nodes <N>
//! <x> <y> <is_boundary 0|1>     (N lines)
//! triangles <T>
//! <i> <j> <k>                   (T lines)
//! boundary_edges <E>
//! <i> <j>                       (E lines, in cycle order)
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::Mesh2D;
use crate::error::{Error, Result};

const VTK_TRIANGLE: u8 = 5;
const VTK_LINE: u8 = 3;

/// Renders the mesh with optional nodal scalar fields as legacy VTK ASCII.
pub fn vtk_string(mesh: &Mesh2D, title: &str, fields: &[(&str, &[f64])]) -> Result<String> {
    let n = mesh.n_nodes();
    for (name, values) in fields {
        if values.len() != n {
            return Err(Error::InvalidArgument(format!("field `{name}` has {} values for {n} nodes", values.len())));
        }
    }
    let n_tri = mesh.triangles.len();
    let n_lines = mesh.boundary_edges.len();
    let mut s = String::new();
    // Writing into a String cannot fail.
    let _ = writeln!(s, "# vtk DataFile Version 3.0");
    let _ = writeln!(s, "{}", title.lines().next().unwrap_or("chdbc"));
    let _ = writeln!(s, "ASCII");
    let _ = writeln!(s, "DATASET UNSTRUCTURED_GRID");
    let _ = writeln!(s, "FIELD FieldData 1");
    let _ = writeln!(s, "RADIUS 1 1 double");
    let _ = writeln!(s, "{:e}", mesh.radius);
    let _ = writeln!(s, "POINTS {n} double");
    for p in &mesh.nodes {
        let _ = writeln!(s, "{:e} {:e} 0", p[0], p[1]);
    }
    let _ = writeln!(s, "CELLS {} {}", n_tri + n_lines, 4 * n_tri + 3 * n_lines);
    for t in &mesh.triangles {
        let _ = writeln!(s, "3 {} {} {}", t[0], t[1], t[2]);
    }
    for e in &mesh.boundary_edges {
        let _ = writeln!(s, "2 {} {}", e[0], e[1]);
    }
    let _ = writeln!(s, "CELL_TYPES {}", n_tri + n_lines);
    for _ in 0..n_tri {
        let _ = writeln!(s, "{VTK_TRIANGLE}");
    }
    for _ in 0..n_lines {
        let _ = writeln!(s, "{VTK_LINE}");
    }
    if !fields.is_empty() {
        let _ = writeln!(s, "POINT_DATA {n}");
        for (name, values) in fields {
            let _ = writeln!(s, "SCALARS {name} double 1");
            let _ = writeln!(s, "LOOKUP_TABLE default");
            for v in values.iter() {
                let _ = writeln!(s, "{v:e}");
            }
        }
    }
    Ok(s)
}

pub fn write_vtk(path: &Path, mesh: &Mesh2D, title: &str, fields: &[(&str, &[f64])]) -> Result<()> {
    fs::write(path, vtk_string(mesh, title, fields)?)?;
    Ok(())
}

struct Tokens<'a> {
    path: &'a Path,
    items: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn new(path: &'a Path, text: &'a str) -> Self {
        let items = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim_start().starts_with('#'))
            .flat_map(|(i, l)| l.split_whitespace().map(move |w| (i + 1, w)))
            .collect();
        Tokens { path, items, pos: 0 }
    }

    fn line(&self) -> usize {
        self.items.get(self.pos.min(self.items.len().saturating_sub(1))).map_or(0, |t| t.0)
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse { path: self.path.to_path_buf(), line: self.line(), message: message.into() }
    }

    fn next(&mut self) -> Result<&'a str> {
        let tok = self.items.get(self.pos).map(|t| t.1).ok_or_else(|| self.err("unexpected end of file"))?;
        self.pos += 1;
        Ok(tok)
    }

    fn expect(&mut self, word: &str) -> Result<()> {
        let tok = self.next()?;
        if tok.eq_ignore_ascii_case(word) {
            Ok(())
        } else {
            self.pos -= 1;
            Err(self.err(format!("expected `{word}`, found `{tok}`")))
        }
    }

    fn parse<T: std::str::FromStr>(&mut self) -> Result<T> {
        let tok = self.next()?;
        tok.parse().map_err(|_| {
            self.pos -= 1;
            self.err(format!("cannot parse `{tok}`"))
        })
    }

    fn skip_line_of(&mut self, line: usize) {
        while self.items.get(self.pos).is_some_and(|t| t.0 == line) {
            self.pos += 1;
        }
    }
}

/// Reads a mesh written by [`write_vtk`]. Point data blocks are ignored.
pub fn read_vtk(path: &Path) -> Result<Mesh2D> {
    let text = fs::read_to_string(path)?;
    parse_vtk(path, &text)
}

fn parse_vtk(path: &Path, text: &str) -> Result<Mesh2D> {
    let mut tk = Tokens::new(path, text);
    // Line 1 is the `# vtk` comment, line 2 the free-text title.
    tk.skip_line_of(2);
    tk.expect("ASCII")?;
    tk.expect("DATASET")?;
    tk.expect("UNSTRUCTURED_GRID")?;
    let mut radius = None;
    if tk.expect("FIELD").is_ok() {
        let _name = tk.next()?;
        let count: usize = tk.parse()?;
        for _ in 0..count {
            let name = tk.next()?;
            let comps: usize = tk.parse()?;
            let tuples: usize = tk.parse()?;
            let _ty = tk.next()?;
            let mut values = Vec::with_capacity(comps * tuples);
            for _ in 0..comps * tuples {
                values.push(tk.parse::<f64>()?);
            }
            if name == "RADIUS" {
                radius = values.first().copied();
            }
        }
    }
    tk.expect("POINTS")?;
    let n: usize = tk.parse()?;
    let _ty = tk.next()?;
    let mut nodes = Vec::with_capacity(n);
    for _ in 0..n {
        let x: f64 = tk.parse()?;
        let y: f64 = tk.parse()?;
        let _z: f64 = tk.parse()?;
        nodes.push([x, y]);
    }
    tk.expect("CELLS")?;
    let n_cells: usize = tk.parse()?;
    let _size: usize = tk.parse()?;
    let mut cells = Vec::with_capacity(n_cells);
    for _ in 0..n_cells {
        let k: usize = tk.parse()?;
        let mut ids = Vec::with_capacity(k);
        for _ in 0..k {
            let id: usize = tk.parse()?;
            if id >= n {
                return Err(tk.err(format!("cell references node {id} of {n}")));
            }
            ids.push(id);
        }
        cells.push(ids);
    }
    tk.expect("CELL_TYPES")?;
    let n_types: usize = tk.parse()?;
    if n_types != n_cells {
        return Err(tk.err("CELL_TYPES count differs from CELLS count"));
    }
    let mut triangles = Vec::new();
    let mut boundary_edges = Vec::new();
    for ids in cells {
        let ty: u8 = tk.parse()?;
        match (ty, ids.as_slice()) {
            (VTK_TRIANGLE, &[a, b, c]) => triangles.push([a, b, c]),
            (VTK_LINE, &[a, b]) => boundary_edges.push([a, b]),
            _ => return Err(tk.err(format!("unsupported cell type {ty}"))),
        }
    }
    let mut boundary_mask = vec![false; n];
    for e in &boundary_edges {
        boundary_mask[e[0]] = true;
        boundary_mask[e[1]] = true;
    }
    let radius = radius.unwrap_or_else(|| boundary_edges.first().map_or(0.0, |e| super::norm(nodes[e[0]])));
    let mesh = Mesh2D { nodes, triangles, boundary_edges, boundary_mask, radius };
    mesh.validate()?;
    Ok(mesh)
}

pub fn text_string(mesh: &Mesh2D) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# chdbc mesh v1");
    let _ = writeln!(s, "radius {:e}", mesh.radius);
    let _ = writeln!(s, "nodes {}", mesh.n_nodes());
    for (p, &b) in mesh.nodes.iter().zip(&mesh.boundary_mask) {
        let _ = writeln!(s, "{:e} {:e} {}", p[0], p[1], u8::from(b));
    }
    let _ = writeln!(s, "triangles {}", mesh.triangles.len());
    for t in &mesh.triangles {
        let _ = writeln!(s, "{} {} {}", t[0], t[1], t[2]);
    }
    let _ = writeln!(s, "boundary_edges {}", mesh.boundary_edges.len());
    for e in &mesh.boundary_edges {
        let _ = writeln!(s, "{} {}", e[0], e[1]);
    }
    s
}

pub fn write_text(path: &Path, mesh: &Mesh2D) -> Result<()> {
    fs::write(path, text_string(mesh))?;
    Ok(())
}

pub fn read_text(path: &Path) -> Result<Mesh2D> {
    let text = fs::read_to_string(path)?;
    parse_text(path, &text)
}

fn parse_text(path: &Path, text: &str) -> Result<Mesh2D> {
    let mut tk = Tokens::new(path, text);
    tk.expect("radius")?;
    let radius: f64 = tk.parse()?;
    tk.expect("nodes")?;
    let n: usize = tk.parse()?;
    let mut nodes = Vec::with_capacity(n);
    let mut boundary_mask = Vec::with_capacity(n);
    for _ in 0..n {
        let line = tk.line();
        let x: f64 = tk.parse()?;
        let y: f64 = tk.parse()?;
        let b: u8 = tk.parse()?;
        if b > 1 {
            return Err(tk.err(format!("boundary flag must be 0 or 1, got {b}")));
        }
        nodes.push([x, y]);
        boundary_mask.push(b == 1);
        tk.skip_line_of(line);
    }
    tk.expect("triangles")?;
    let t: usize = tk.parse()?;
    let mut triangles = Vec::with_capacity(t);
    for _ in 0..t {
        triangles.push([tk.parse()?, tk.parse()?, tk.parse()?]);
    }
    tk.expect("boundary_edges")?;
    let e: usize = tk.parse()?;
    let mut boundary_edges = Vec::with_capacity(e);
    for _ in 0..e {
        boundary_edges.push([tk.parse()?, tk.parse()?]);
    }
    let mesh = Mesh2D { nodes, triangles, boundary_edges, boundary_mask, radius };
    mesh.validate()?;
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generate_disk_mesh;

    #[test]
    fn vtk_round_trip() {
        let mesh = generate_disk_mesh(2.0, 0.7).unwrap().refine();
        let u: Vec<f64> = mesh.nodes.iter().map(|p| p[0] * p[1]).collect();
        let text = vtk_string(&mesh, "test", &[("u", &u)]).unwrap();
        assert!(text.contains("CELL_TYPES"));
        assert!(text.contains("SCALARS u double 1"));
        let back = parse_vtk(Path::new("mem.vtk"), &text).unwrap();
        assert_eq!(back.triangles, mesh.triangles);
        assert_eq!(back.boundary_edges, mesh.boundary_edges);
        assert_eq!(back.boundary_mask, mesh.boundary_mask);
        assert_eq!(back.radius, mesh.radius);
        for (p, q) in back.nodes.iter().zip(&mesh.nodes) {
            assert!((p[0] - q[0]).abs() < 1e-15 && (p[1] - q[1]).abs() < 1e-15);
        }
    }

    #[test]
    fn text_round_trip() {
        let mesh = generate_disk_mesh(1.0, 0.4).unwrap();
        let back = parse_text(Path::new("mem.txt"), &text_string(&mesh)).unwrap();
        assert_eq!(back, mesh);
    }

    #[test]
    fn field_length_is_checked() {
        let mesh = generate_disk_mesh(1.0, 0.5).unwrap();
        assert!(vtk_string(&mesh, "t", &[("u", &[1.0])]).is_err());
    }

    #[test]
    fn text_errors_carry_line_numbers() {
        let text = "radius 1\nnodes 1\n0 0 7\n";
        match parse_text(Path::new("bad.txt"), text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }
}
