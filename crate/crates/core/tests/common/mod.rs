//! Dense reference implementations used as oracles by the integration tests.
//! Everything here is written from the element formulas directly and shares
//! no code with the library's assembly or solvers.
#![allow(dead_code)]

use chdbc::{AnalyticField, Mesh2D, Potential};
use nalgebra::{DMatrix, DVector};

pub struct Dense {
    pub m: DMatrix<f64>,
    pub a: DMatrix<f64>,
}

fn tri_area(p: &[[f64; 2]; 3]) -> f64 {
    0.5 * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]))
}

fn grads(p: &[[f64; 2]; 3]) -> [[f64; 2]; 3] {
    let d = 2.0 * tri_area(p);
    let mut g = [[0.0; 2]; 3];
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        g[i] = [(p[j][1] - p[k][1]) / d, (p[k][0] - p[j][0]) / d];
    }
    g
}

fn pts(mesh: &Mesh2D, t: &[usize; 3]) -> [[f64; 2]; 3] {
    [mesh.nodes[t[0]], mesh.nodes[t[1]], mesh.nodes[t[2]]]
}

fn len(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt()
}

pub fn dense_matrices(mesh: &Mesh2D) -> Dense {
    let n = mesh.nodes.len();
    let mut m = DMatrix::zeros(n, n);
    let mut a = DMatrix::zeros(n, n);
    for t in &mesh.triangles {
        let p = pts(mesh, t);
        let area = tri_area(&p).abs();
        let g = grads(&p);
        for i in 0..3 {
            for j in 0..3 {
                m[(t[i], t[j])] += area * if i == j { 2.0 } else { 1.0 } / 12.0;
                a[(t[i], t[j])] += area * (g[i][0] * g[j][0] + g[i][1] * g[j][1]);
            }
        }
    }
    for e in &mesh.boundary_edges {
        let l = len(mesh.nodes[e[0]], mesh.nodes[e[1]]);
        for i in 0..2 {
            for j in 0..2 {
                m[(e[i], e[j])] += l * if i == j { 2.0 } else { 1.0 } / 6.0;
                a[(e[i], e[j])] += if i == j { 1.0 } else { -1.0 } / l;
            }
        }
    }
    Dense { m, a }
}

/// Midpoint-free three-point interior rule, exact for quadratics.
const TRI3: [[f64; 3]; 3] = [[4.0, 1.0, 1.0], [1.0, 4.0, 1.0], [1.0, 1.0, 4.0]];

fn gauss2() -> [f64; 2] {
    let g = 1.0 / (2.0 * 3f64.sqrt());
    [0.5 - g, 0.5 + g]
}

/// Load `∫ g(u_h, x) φ_i` over bulk and boundary with quadratic-exact rules.
pub fn dense_load(
    mesh: &Mesh2D,
    u: &[f64],
    bulk: impl Fn(f64, [f64; 2]) -> f64,
    surf: impl Fn(f64, [f64; 2]) -> f64,
) -> DVector<f64> {
    let mut out = DVector::zeros(mesh.nodes.len());
    for t in &mesh.triangles {
        let p = pts(mesh, t);
        let area = tri_area(&p).abs();
        for l6 in TRI3 {
            let l = [l6[0] / 6.0, l6[1] / 6.0, l6[2] / 6.0];
            let x =
                [l[0] * p[0][0] + l[1] * p[1][0] + l[2] * p[2][0], l[0] * p[0][1] + l[1] * p[1][1] + l[2] * p[2][1]];
            let uq = l[0] * u[t[0]] + l[1] * u[t[1]] + l[2] * u[t[2]];
            let v = bulk(uq, x) * area / 3.0;
            for i in 0..3 {
                out[t[i]] += v * l[i];
            }
        }
    }
    for e in &mesh.boundary_edges {
        let (a, b) = (mesh.nodes[e[0]], mesh.nodes[e[1]]);
        let l = len(a, b);
        for s in gauss2() {
            let x = [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
            let uq = (1.0 - s) * u[e[0]] + s * u[e[1]];
            let v = surf(uq, x) * l / 2.0;
            out[e[0]] += v * (1.0 - s);
            out[e[1]] += v * s;
        }
    }
    out
}

pub fn dense_nonlinear(mesh: &Mesh2D, bulk: &Potential, surf: &Potential, u: &[f64]) -> DVector<f64> {
    dense_load(mesh, u, |v, _| bulk.dw(v), |v, _| surf.dw(v))
}

pub fn dense_forcing(mesh: &Mesh2D, fb: &AnalyticField, fs: &AnalyticField, t: f64) -> DVector<f64> {
    let zero = vec![0.0; mesh.nodes.len()];
    dense_load(mesh, &zero, |_, x| fb.value(x, t), |_, x| fs.value(x, t))
}

/// Gauss–Legendre nodes/weights on [0, 1] with `n` points (n ≤ 4).
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let raw: Vec<(f64, f64)> = match n {
        3 => vec![(-(0.6f64).sqrt(), 5.0 / 9.0), (0.0, 8.0 / 9.0), ((0.6f64).sqrt(), 5.0 / 9.0)],
        4 => {
            let a = (3.0 / 7.0 - 2.0 / 7.0 * (6.0f64 / 5.0).sqrt()).sqrt();
            let b = (3.0 / 7.0 + 2.0 / 7.0 * (6.0f64 / 5.0).sqrt()).sqrt();
            let wa = (18.0 + 30f64.sqrt()) / 36.0;
            let wb = (18.0 - 30f64.sqrt()) / 36.0;
            vec![(-b, wb), (-a, wa), (a, wa), (b, wb)]
        }
        _ => panic!("unsupported"),
    };
    raw.into_iter().map(|(x, w)| (0.5 * (x + 1.0), 0.5 * w)).collect()
}

/// Ritz right-hand side with a collapsed 4×4 Gauss product rule in the bulk
/// (exact to degree 7) and three-point Gauss on edges.
pub fn dense_ritz_rhs(mesh: &Mesh2D, v: &AnalyticField, t: f64) -> DVector<f64> {
    let mut out = DVector::zeros(mesh.nodes.len());
    let g4 = gauss_legendre(4);
    for tri in &mesh.triangles {
        let p = pts(mesh, tri);
        let area = tri_area(&p).abs();
        let g = grads(&p);
        for &(xi, wx) in &g4 {
            for &(eta, we) in &g4 {
                // Duffy map of the unit square onto the reference triangle.
                let l1 = xi;
                let l2 = (1.0 - xi) * eta;
                let l0 = 1.0 - l1 - l2;
                let w = wx * we * (1.0 - xi) * 2.0 * area;
                let l = [l0, l1, l2];
                let x = [
                    l[0] * p[0][0] + l[1] * p[1][0] + l[2] * p[2][0],
                    l[0] * p[0][1] + l[1] * p[1][1] + l[2] * p[2][1],
                ];
                let (val, gv) = (v.value(x, t), v.gradient(x, t));
                for i in 0..3 {
                    out[tri[i]] += w * (gv[0] * g[i][0] + gv[1] * g[i][1] + val * l[i]);
                }
            }
        }
    }
    for e in &mesh.boundary_edges {
        let (a, b) = (mesh.nodes[e[0]], mesh.nodes[e[1]]);
        let l = len(a, b);
        let tan = [(b[0] - a[0]) / l, (b[1] - a[1]) / l];
        for (s, w) in gauss_legendre(3) {
            let x = [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
            let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
            let nu = [x[0] / r, x[1] / r];
            let gv = v.gradient(x, t);
            let gn = gv[0] * nu[0] + gv[1] * nu[1];
            let gt = [gv[0] - gn * nu[0], gv[1] - gn * nu[1]];
            let d = (gt[0] * tan[0] + gt[1] * tan[1]) / l;
            let val = v.value(x, t);
            out[e[0]] += w * l * (-d + val * (1.0 - s));
            out[e[1]] += w * l * (d + val * s);
        }
    }
    out
}

pub fn solve(mat: &DMatrix<f64>, rhs: &DVector<f64>) -> DVector<f64> {
    mat.clone().lu().solve(rhs).expect("dense oracle matrix is regular")
}

pub fn dense_ritz(d: &Dense, mesh: &Mesh2D, v: &AnalyticField, t: f64) -> DVector<f64> {
    solve(&(&d.a + &d.m), &dense_ritz_rhs(mesh, v, t))
}

/// `sup_φ rᵀφ / √(φᵀ(A+M)φ)` from the eigen-decomposition of `A + M`.
pub fn dense_dual_norm(d: &Dense, r: &DVector<f64>) -> f64 {
    let eig = (&d.a + &d.m).symmetric_eigen();
    let mut s = 0.0;
    for i in 0..r.len() {
        let c = eig.eigenvectors.column(i).dot(r);
        s += c * c / eig.eigenvalues[i];
    }
    s.sqrt()
}

pub fn rel_diff(a: &[f64], b: &DVector<f64>) -> f64 {
    let num: f64 = a.iter().zip(b.iter()).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    if den > 0.0 {
        num / den
    } else {
        num
    }
}

pub fn to_vec(v: &DVector<f64>) -> Vec<f64> {
    v.iter().copied().collect()
}

pub fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}
