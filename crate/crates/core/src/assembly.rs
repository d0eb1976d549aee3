//! Bulk-surface P1 assembly.
//!
//! Every bilinear form is the sum of a bulk integral over the triangles of
//! `Ω_h` and a boundary integral over the edges of `Γ_h`; boundary basis
//! functions are traces of the bulk hat functions. Matrices are exact for P1.
//! Loads with nonlinear or analytic integrands use the degree-2 triangle rule
//! and two-point Gauss on edges; the Ritz right-hand side uses the degree-5
//! rule and three-point Gauss.

use std::sync::OnceLock;

use crate::error::{check_len, Result};
use crate::field::{AnalyticField, Point};
use crate::linalg::SpdSolver;
use crate::mesh::{cross, dist, Mesh2D};
use crate::potentials::PotentialPair;
use crate::quadrature::{seg_gauss2, seg_gauss3, tri_deg5, TRI_DEG2};
use crate::sparse::{CsrMatrix, SparseSym};

/// Area and barycentric-coordinate gradients of a P1 triangle.
#[derive(Debug, Clone, Copy)]
pub struct P1Triangle {
    pub area: f64,
    pub grads: [Point; 3],
}

impl P1Triangle {
    pub fn new(p: [Point; 3]) -> Self {
        let twice_area = cross(p[0], p[1], p[2]);
        let inv = 1.0 / twice_area;
        let grad = |j: usize, k: usize| [(p[j][1] - p[k][1]) * inv, (p[k][0] - p[j][0]) * inv];
        P1Triangle { area: 0.5 * twice_area.abs(), grads: [grad(1, 2), grad(2, 0), grad(0, 1)] }
    }
}

pub(crate) fn bary_point(p: &[Point; 3], l: &[f64; 3]) -> Point {
    [l[0] * p[0][0] + l[1] * p[1][0] + l[2] * p[2][0], l[0] * p[0][1] + l[1] * p[1][1] + l[2] * p[2][1]]
}

pub(crate) fn seg_point(a: Point, b: Point, s: f64) -> Point {
    [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]
}

/// Exact P1 element mass matrix: `area / 12 * [[2,1,1],[1,2,1],[1,1,2]]`.
pub fn element_mass(p: [Point; 3]) -> [[f64; 3]; 3] {
    let a = P1Triangle::new(p).area / 12.0;
    let mut m = [[a; 3]; 3];
    (0..3).for_each(|i| m[i][i] = 2.0 * a);
    m
}

pub fn element_stiffness(p: [Point; 3]) -> [[f64; 3]; 3] {
    let el = P1Triangle::new(p);
    let mut k = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let (gi, gj) = (el.grads[i], el.grads[j]);
            k[i][j] = el.area * (gi[0] * gj[0] + gi[1] * gj[1]);
        }
    }
    k
}

/// 1D P1 mass on a straight edge of length `l`.
pub fn edge_mass(l: f64) -> [[f64; 2]; 2] {
    [[l / 3.0, l / 6.0], [l / 6.0, l / 3.0]]
}

/// Tangential stiffness on a straight edge of length `l`.
pub fn edge_stiffness(l: f64) -> [[f64; 2]; 2] {
    [[1.0 / l, -1.0 / l], [-1.0 / l, 1.0 / l]]
}

fn assemble(
    mesh: &Mesh2D,
    bulk: impl Fn([Point; 3]) -> [[f64; 3]; 3],
    surf: impl Fn(f64) -> [[f64; 2]; 2],
) -> SparseSym {
    let mut t = Vec::with_capacity(9 * mesh.triangles.len() + 4 * mesh.boundary_edges.len());
    for tri in &mesh.triangles {
        let local = bulk(mesh.triangle_points(tri));
        for i in 0..3 {
            for j in 0..3 {
                t.push((tri[i], tri[j], local[i][j]));
            }
        }
    }
    for e in &mesh.boundary_edges {
        let local = surf(mesh.edge_length(e));
        for i in 0..2 {
            for j in 0..2 {
                t.push((e[i], e[j], local[i][j]));
            }
        }
    }
    CsrMatrix::from_triplets(mesh.n_nodes(), &t)
}

/// `M_ij = ∫_{Ω_h} φ_j φ_i + ∫_{Γ_h} φ_j φ_i`.
pub fn assemble_mass(mesh: &Mesh2D) -> SparseSym {
    assemble(mesh, element_mass, edge_mass)
}

/// `A_ij = ∫_{Ω_h} ∇φ_j·∇φ_i + ∫_{Γ_h} ∇_{Γ_h}φ_j·∇_{Γ_h}φ_i`.
pub fn assemble_stiffness(mesh: &Mesh2D) -> SparseSym {
    assemble(mesh, element_stiffness, edge_stiffness)
}

/// Load vector `∫_{Ω_h} g_Ω(u_h) φ_i + ∫_{Γ_h} g_Γ(u_h) φ_i` for pointwise
/// maps of the P1 function `u_h`.
pub fn pointwise_load(
    mesh: &Mesh2D,
    u: &[f64],
    bulk: impl Fn(f64) -> f64,
    surf: impl Fn(f64) -> f64,
) -> Result<Vec<f64>> {
    check_len(mesh.n_nodes(), u.len())?;
    let mut out = vec![0.0; u.len()];
    for tri in &mesh.triangles {
        let area = mesh.signed_area(tri);
        let uk = [u[tri[0]], u[tri[1]], u[tri[2]]];
        for (l, w) in &TRI_DEG2 {
            let uq = l[0] * uk[0] + l[1] * uk[1] + l[2] * uk[2];
            let g = w * area * bulk(uq);
            for i in 0..3 {
                out[tri[i]] += g * l[i];
            }
        }
    }
    for e in &mesh.boundary_edges {
        let len = mesh.edge_length(e);
        let (ua, ub) = (u[e[0]], u[e[1]]);
        for (s, w) in seg_gauss2() {
            let g = w * len * surf(ua + s * (ub - ua));
            out[e[0]] += g * (1.0 - s);
            out[e[1]] += g * s;
        }
    }
    Ok(out)
}

/// Integral `∫_{Ω_h} g_Ω(u_h) + ∫_{Γ_h} g_Γ(u_h)` with the load quadrature.
pub fn pointwise_integral(
    mesh: &Mesh2D,
    u: &[f64],
    bulk: impl Fn(f64) -> f64,
    surf: impl Fn(f64) -> f64,
) -> Result<f64> {
    check_len(mesh.n_nodes(), u.len())?;
    let mut total = 0.0;
    for tri in &mesh.triangles {
        let area = mesh.signed_area(tri);
        let uk = [u[tri[0]], u[tri[1]], u[tri[2]]];
        for (l, w) in &TRI_DEG2 {
            total += w * area * bulk(l[0] * uk[0] + l[1] * uk[1] + l[2] * uk[2]);
        }
    }
    for e in &mesh.boundary_edges {
        let len = mesh.edge_length(e);
        let (ua, ub) = (u[e[0]], u[e[1]]);
        for (s, w) in seg_gauss2() {
            total += w * len * surf(ua + s * (ub - ua));
        }
    }
    Ok(total)
}

/// Nonlinear term `m_h(W'(u_h), φ_i)` with `W_Ω'` in the bulk and `W_Γ'` on
/// the boundary.
pub fn assemble_nonlinear_load(mesh: &Mesh2D, pot: &PotentialPair, u: &[f64]) -> Result<Vec<f64>> {
    pointwise_load(mesh, u, |v| pot.bulk.dw(v), |v| pot.surface.dw(v))
}

/// `∫_{Ω_h} f_bulk(·,t) φ_i + ∫_{Γ_h} f_surf(·,t) φ_i`.
pub fn assemble_forcing(mesh: &Mesh2D, f_bulk: &AnalyticField, f_surf: &AnalyticField, t: f64) -> Vec<f64> {
    let mut out = vec![0.0; mesh.n_nodes()];
    for tri in &mesh.triangles {
        let p = mesh.triangle_points(tri);
        let area = mesh.signed_area(tri);
        for (l, w) in &TRI_DEG2 {
            let g = w * area * f_bulk.value(bary_point(&p, l), t);
            for i in 0..3 {
                out[tri[i]] += g * l[i];
            }
        }
    }
    for e in &mesh.boundary_edges {
        let (a, b) = (mesh.nodes[e[0]], mesh.nodes[e[1]]);
        let len = dist(a, b);
        for (s, w) in seg_gauss2() {
            let g = w * len * f_surf.value(seg_point(a, b, s), t);
            out[e[0]] += g * (1.0 - s);
            out[e[1]] += g * s;
        }
    }
    out
}

/// Nodal interpolation.
pub fn interpolate(mesh: &Mesh2D, v: &AnalyticField, t: f64) -> Vec<f64> {
    mesh.nodes.iter().map(|&x| v.value(x, t)).collect()
}

/// Right-hand side `a*(v, φ_i)` of the Ritz map, integrated over `Ω_h` and
/// `Γ_h` with the exact `v`, `∇v`, and the tangential gradient taken with the
/// exact circle normal.
pub fn ritz_rhs(mesh: &Mesh2D, v: &AnalyticField, t: f64) -> Vec<f64> {
    let mut out = vec![0.0; mesh.n_nodes()];
    let rule = tri_deg5();
    for tri in &mesh.triangles {
        let p = mesh.triangle_points(tri);
        let el = P1Triangle::new(p);
        for (l, w) in &rule {
            let x = bary_point(&p, l);
            let (val, g) = (v.value(x, t), v.gradient(x, t));
            let wa = w * el.area;
            for i in 0..3 {
                let gi = el.grads[i];
                out[tri[i]] += wa * (g[0] * gi[0] + g[1] * gi[1] + val * l[i]);
            }
        }
    }
    for e in &mesh.boundary_edges {
        let (a, b) = (mesh.nodes[e[0]], mesh.nodes[e[1]]);
        let len = dist(a, b);
        let tangent = [(b[0] - a[0]) / len, (b[1] - a[1]) / len];
        for (s, w) in seg_gauss3() {
            let x = seg_point(a, b, s);
            let val = v.value(x, t);
            let g = v.circle_tangential_gradient(x, t);
            // Arc-length derivative of φ_b is 1/len and of φ_a is -1/len.
            let gt = (g[0] * tangent[0] + g[1] * tangent[1]) / len;
            out[e[0]] += w * len * (-gt + val * (1.0 - s));
            out[e[1]] += w * len * (gt + val * s);
        }
    }
    out
}

/// Mesh together with its assembled mass and stiffness matrices and cached
/// factorisations of `M` and `A + M`.
pub struct Discretisation {
    pub mesh: Mesh2D,
    pub mass: SparseSym,
    pub stiffness: SparseSym,
    h1: SparseSym,
    mass_solver: OnceLock<SpdSolver>,
    h1_solver: OnceLock<SpdSolver>,
}

impl std::fmt::Debug for Discretisation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Discretisation").field("n_nodes", &self.mesh.n_nodes()).field("nnz", &self.mass.nnz()).finish()
    }
}

impl Discretisation {
    pub fn new(mesh: Mesh2D) -> Result<Self> {
        mesh.validate()?;
        let mass = assemble_mass(&mesh);
        let stiffness = assemble_stiffness(&mesh);
        let h1 = stiffness.add_scaled(1.0, &mass, 1.0)?;
        Ok(Discretisation { mesh, mass, stiffness, h1, mass_solver: OnceLock::new(), h1_solver: OnceLock::new() })
    }

    pub fn n(&self) -> usize {
        self.mesh.n_nodes()
    }

    /// `A + M`, the matrix of the discrete `H¹`-type inner product.
    pub fn h1_matrix(&self) -> &SparseSym {
        &self.h1
    }

    pub fn mass_solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        self.mass_solver.get_or_init(|| SpdSolver::new(&self.mass, "mass matrix")).solve(rhs)
    }

    pub fn h1_solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        self.h1_solver.get_or_init(|| SpdSolver::new(&self.h1, "A + M")).solve(rhs)
    }

    pub fn nonlinear_load(&self, pot: &PotentialPair, u: &[f64]) -> Result<Vec<f64>> {
        assemble_nonlinear_load(&self.mesh, pot, u)
    }

    pub fn forcing(&self, f_bulk: &AnalyticField, f_surf: &AnalyticField, t: f64) -> Vec<f64> {
        assemble_forcing(&self.mesh, f_bulk, f_surf, t)
    }

    pub fn interpolate(&self, v: &AnalyticField, t: f64) -> Vec<f64> {
        interpolate(&self.mesh, v, t)
    }

    /// Ritz map: solves `(A + M) r = a*(v, φ)`.
    pub fn ritz_map(&self, v: &AnalyticField, t: f64) -> Result<Vec<f64>> {
        self.h1_solve(&ritz_rhs(&self.mesh, v, t))
    }
}
