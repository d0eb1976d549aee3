//! Structured triangulations of a disk with boundary vertices on the circle.

mod io;

pub use io::{read_text, read_vtk, write_text, write_vtk};

use std::collections::{HashMap, HashSet};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::field::Point;

/// Triangulation of a disk `|x| <= radius` together with its boundary polygon.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh2D {
    pub nodes: Vec<Point>,
    /// Counter-clockwise oriented node triples.
    pub triangles: Vec<[usize; 3]>,
    /// Boundary edges in cycle order, oriented counter-clockwise.
    pub boundary_edges: Vec<[usize; 2]>,
    pub boundary_mask: Vec<bool>,
    pub radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshMetrics {
    /// Longest edge over all triangles.
    pub h: f64,
    pub n_nodes: usize,
    pub n_boundary_nodes: usize,
    pub n_triangles: usize,
    pub area: f64,
    pub perimeter: f64,
}

pub(crate) fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

pub(crate) fn norm(a: Point) -> f64 {
    a[0].hypot(a[1])
}

pub(crate) fn dist(a: Point, b: Point) -> f64 {
    norm(sub(a, b))
}

/// Twice the signed area of the triangle `(a, b, c)`.
pub(crate) fn cross(a: Point, b: Point, c: Point) -> f64 {
    let u = sub(b, a);
    let v = sub(c, a);
    u[0] * v[1] - u[1] * v[0]
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Number of rings the concentric generator uses for a target width.
pub fn rings_for_width(radius: f64, target_h: f64) -> usize {
    ((radius / target_h).ceil() as usize).max(1)
}

/// Node count of the concentric mesh with `rings` rings: `1 + 3 n (n + 1)`.
pub fn ring_node_count(rings: usize) -> usize {
    1 + 3 * rings * (rings + 1)
}

/// Ring count whose node count is closest to `target_nodes`.
pub fn rings_for_node_count(target_nodes: usize) -> usize {
    (1..=4096).min_by_key(|&n| ring_node_count(n).abs_diff(target_nodes)).unwrap_or(1)
}

/// Concentric-ring triangulation of the disk of the given radius.
///
/// Ring `i` (of `n = ceil(radius / target_h)`) sits at radius `i * radius / n`
/// and carries `6 i` equally spaced nodes; consecutive rings are stitched by a
/// zipper sweep in angle. The outermost ring lies exactly on the circle.
pub fn generate_disk_mesh(radius: f64, target_h: f64) -> Result<Mesh2D> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {radius}")));
    }
    if !(target_h > 0.0) || !target_h.is_finite() {
        return Err(Error::InvalidArgument(format!("target_h must be positive, got {target_h}")));
    }
    if target_h >= radius {
        return Err(Error::InvalidArgument(format!(
            "target_h ({target_h}) must be smaller than the radius ({radius})"
        )));
    }
    ring_mesh(radius, rings_for_width(radius, target_h))
}

/// Concentric-ring triangulation with the ring count chosen so that the node
/// count is as close as possible to `target_nodes`.
pub fn disk_mesh_with_nodes(radius: f64, target_nodes: usize) -> Result<Mesh2D> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {radius}")));
    }
    if target_nodes < 7 {
        return Err(Error::InvalidArgument(format!("at least 7 nodes are required, got {target_nodes}")));
    }
    ring_mesh(radius, rings_for_node_count(target_nodes))
}

/// Concentric-ring triangulation with exactly `rings` rings.
pub fn ring_mesh(radius: f64, rings: usize) -> Result<Mesh2D> {
    if rings == 0 {
        return Err(Error::InvalidArgument("at least one ring is required".into()));
    }
    let n = rings;
    let ring_start = |i: usize| if i == 0 { 0 } else { 1 + 3 * (i - 1) * i };

    let mut nodes = Vec::with_capacity(ring_node_count(n));
    nodes.push([0.0, 0.0]);
    for i in 1..=n {
        let r = if i == n { radius } else { radius * i as f64 / n as f64 };
        let m = 6 * i;
        for k in 0..m {
            let theta = 2.0 * PI * k as f64 / m as f64;
            nodes.push([r * theta.cos(), r * theta.sin()]);
        }
    }

    let mut triangles = Vec::with_capacity(6 * n * n);
    for k in 0..6 {
        triangles.push([0, 1 + k, 1 + (k + 1) % 6]);
    }
    for i in 2..=n {
        let (m_in, m_out) = (6 * (i - 1), 6 * i);
        let (s_in, s_out) = (ring_start(i - 1), ring_start(i));
        let inner = |k: usize| s_in + k % m_in;
        let outer = |k: usize| s_out + k % m_out;
        let (mut a, mut b) = (0usize, 0usize);
        while a < m_in || b < m_out {
            let next_in = (a + 1) as f64 / m_in as f64;
            let next_out = (b + 1) as f64 / m_out as f64;
            if b < m_out && (a == m_in || next_out <= next_in) {
                triangles.push([inner(a), outer(b), outer(b + 1)]);
                b += 1;
            } else {
                triangles.push([inner(a), outer(b), inner(a + 1)]);
                a += 1;
            }
        }
    }

    let s = ring_start(n);
    let m = 6 * n;
    let boundary_edges = (0..m).map(|k| [s + k, s + (k + 1) % m]).collect();
    let mut boundary_mask = vec![false; nodes.len()];
    boundary_mask[s..].iter_mut().for_each(|b| *b = true);

    Ok(Mesh2D { nodes, triangles, boundary_edges, boundary_mask, radius })
}

impl Mesh2D {
    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn boundary_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.boundary_mask.iter().enumerate().filter_map(|(i, &b)| b.then_some(i))
    }

    pub fn triangle_points(&self, t: &[usize; 3]) -> [Point; 3] {
        [self.nodes[t[0]], self.nodes[t[1]], self.nodes[t[2]]]
    }

    pub fn signed_area(&self, t: &[usize; 3]) -> f64 {
        let [a, b, c] = self.triangle_points(t);
        0.5 * cross(a, b, c)
    }

    pub fn edge_length(&self, e: &[usize; 2]) -> f64 {
        dist(self.nodes[e[0]], self.nodes[e[1]])
    }

    /// Red refinement: every triangle is split into four through its edge
    /// midpoints. Midpoints of boundary edges are projected radially onto the
    /// circle; all other nodes keep their coordinates.
    pub fn refine(&self) -> Mesh2D {
        let boundary: HashSet<(usize, usize)> = self.boundary_edges.iter().map(|e| edge_key(e[0], e[1])).collect();

        let mut nodes = self.nodes.clone();
        let mut boundary_mask = self.boundary_mask.clone();
        let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
        let radius = self.radius;
        let mut midpoint = |a: usize, b: usize, nodes: &mut Vec<Point>, mask: &mut Vec<bool>| {
            let key = edge_key(a, b);
            *midpoints.entry(key).or_insert_with(|| {
                let (p, q) = (nodes[a], nodes[b]);
                let mut m = [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])];
                let on_boundary = boundary.contains(&key);
                if on_boundary {
                    let r = norm(m);
                    m = [radius * m[0] / r, radius * m[1] / r];
                }
                nodes.push(m);
                mask.push(on_boundary);
                nodes.len() - 1
            })
        };

        let mut triangles = Vec::with_capacity(4 * self.triangles.len());
        for &[a, b, c] in &self.triangles {
            let ab = midpoint(a, b, &mut nodes, &mut boundary_mask);
            let bc = midpoint(b, c, &mut nodes, &mut boundary_mask);
            let ca = midpoint(c, a, &mut nodes, &mut boundary_mask);
            triangles.push([a, ab, ca]);
            triangles.push([ab, b, bc]);
            triangles.push([ca, bc, c]);
            triangles.push([ab, bc, ca]);
        }

        let mut boundary_edges = Vec::with_capacity(2 * self.boundary_edges.len());
        for &[a, b] in &self.boundary_edges {
            let m = midpoint(a, b, &mut nodes, &mut boundary_mask);
            boundary_edges.push([a, m]);
            boundary_edges.push([m, b]);
        }

        Mesh2D { nodes, triangles, boundary_edges, boundary_mask, radius }
    }

    /// `levels` successive red refinements.
    pub fn refined(&self, levels: usize) -> Mesh2D {
        let mut mesh = self.clone();
        for _ in 0..levels {
            mesh = mesh.refine();
        }
        mesh
    }

    /// Maximal mesh width: the longest triangle edge.
    pub fn mesh_width(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                let [a, b, c] = self.triangle_points(t);
                dist(a, b).max(dist(b, c)).max(dist(c, a))
            })
            .fold(0.0, f64::max)
    }

    pub fn metrics(&self) -> MeshMetrics {
        MeshMetrics {
            h: self.mesh_width(),
            n_nodes: self.nodes.len(),
            n_boundary_nodes: self.boundary_mask.iter().filter(|&&b| b).count(),
            n_triangles: self.triangles.len(),
            area: self.triangles.iter().map(|t| self.signed_area(t)).sum(),
            perimeter: self.boundary_edges.iter().map(|e| self.edge_length(e)).sum(),
        }
    }

    /// Ratio of the largest element diameter to the smallest inscribed-circle
    /// diameter.
    pub fn quasi_uniformity(&self) -> f64 {
        let mut max_diam: f64 = 0.0;
        let mut min_inscribed = f64::INFINITY;
        for t in &self.triangles {
            let [a, b, c] = self.triangle_points(t);
            let (l0, l1, l2) = (dist(a, b), dist(b, c), dist(c, a));
            max_diam = max_diam.max(l0.max(l1).max(l2));
            let area = 0.5 * cross(a, b, c).abs();
            min_inscribed = min_inscribed.min(4.0 * area / (l0 + l1 + l2));
        }
        max_diam / min_inscribed
    }

    /// Checks the structural invariants of the triangulation.
    pub fn validate(&self) -> Result<()> {
        let n = self.nodes.len();
        let bad = |msg: String| Err(Error::InvalidMesh(msg));
        if !(self.radius > 0.0) {
            return bad(format!("radius must be positive, got {}", self.radius));
        }
        if self.boundary_mask.len() != n {
            return bad(format!("boundary mask has {} entries for {n} nodes", self.boundary_mask.len()));
        }

        let mut edge_count: HashMap<(usize, usize), usize> = HashMap::new();
        for (k, t) in self.triangles.iter().enumerate() {
            if t.iter().any(|&i| i >= n) {
                return bad(format!("triangle {k} references a missing node"));
            }
            let area = self.signed_area(t);
            if !(area > 0.0) {
                return bad(format!("triangle {k} has non-positive signed area {area}"));
            }
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                *edge_count.entry(edge_key(a, b)).or_default() += 1;
            }
        }

        let mut seen = vec![false; n];
        let m = self.boundary_edges.len();
        if m < 3 {
            return bad("boundary needs at least three edges".into());
        }
        for (k, e) in self.boundary_edges.iter().enumerate() {
            if e[0] >= n || e[1] >= n {
                return bad(format!("boundary edge {k} references a missing node"));
            }
            let next = self.boundary_edges[(k + 1) % m];
            if e[1] != next[0] {
                return bad(format!("boundary edges {k} and {} are not chained", (k + 1) % m));
            }
            if seen[e[0]] {
                return bad(format!("boundary node {} visited twice", e[0]));
            }
            seen[e[0]] = true;
            if edge_count.get(&edge_key(e[0], e[1])) != Some(&1) {
                return bad(format!("boundary edge {k} is not an edge of exactly one triangle"));
            }
        }
        if seen != self.boundary_mask {
            return bad("boundary cycle does not match the boundary mask".into());
        }

        let boundary: HashSet<(usize, usize)> = self.boundary_edges.iter().map(|e| edge_key(e[0], e[1])).collect();
        for (edge, &count) in &edge_count {
            if !boundary.contains(edge) && count != 2 {
                return bad(format!("interior edge {edge:?} belongs to {count} triangles"));
            }
        }

        let tol = 1e-12 * self.radius;
        for i in self.boundary_nodes() {
            let off = (norm(self.nodes[i]) - self.radius).abs();
            if off > tol {
                return bad(format!("boundary node {i} is {off:e} off the circle"));
            }
        }
        Ok(())
    }
}
