//! Discrete norms, the Ginzburg–Landau energy, errors against analytic
//! solutions, defect dual norms and convergence orders.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use crate::assembly::{bary_point, pointwise_integral, seg_point, Discretisation, P1Triangle};
use crate::error::{check_len, Error, Result};
use crate::field::AnalyticField;
use crate::mesh::{dist, Mesh2D};
use crate::potentials::{Potential, PotentialPair};
use crate::quadrature::{seg_gauss3, tri_deg5};
use crate::timestepping::{FieldForcing, FieldState};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscreteNorms {
    pub l2: f64,
    pub h1: f64,
    pub seminorm: f64,
}

/// `√(vᵀMv)`, `√(vᵀ(A+M)v)` and `√(vᵀAv)`.
pub fn discrete_norms(disc: &Discretisation, v: &[f64]) -> Result<DiscreteNorms> {
    check_len(disc.n(), v.len())?;
    let m = disc.mass.quad_form(v).max(0.0);
    let a = disc.stiffness.quad_form(v).max(0.0);
    Ok(DiscreteNorms { l2: m.sqrt(), h1: (m + a).sqrt(), seminorm: a.sqrt() })
}

/// `E_h(u) = ½ uᵀAu + ∫_{Ω_h} W_Ω(u_h) + ∫_{Γ_h} W_Γ(u_h)`.
pub fn energy(disc: &Discretisation, pot: &PotentialPair, u: &[f64]) -> Result<f64> {
    let potential = pointwise_integral(&disc.mesh, u, |v| pot.bulk.w(v), |v| pot.surface.w(v))?;
    Ok(0.5 * disc.stiffness.quad_form(u) + potential)
}

/// Energy samples `(t, E_h)` with strictly increasing times.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EnergyTrace {
    points: Vec<(f64, f64)>,
}

impl EnergyTrace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, t: f64, e: f64) -> Result<()> {
        if let Some(&(last, _)) = self.points.last() {
            if t <= last {
                return Err(Error::InvalidArgument(format!("energy times must increase ({t} after {last})")));
            }
        }
        self.points.push((t, e));
        Ok(())
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// Largest single-step increase `E(t_{k+1}) − E(t_k)`, or `-inf` for
    /// fewer than two samples.
    pub fn max_increase(&self) -> f64 {
        self.points.windows(2).map(|p| p[1].1 - p[0].1).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,energy\n");
        for (t, e) in &self.points {
            let _ = writeln!(s, "{t:.12e},{e:.12e}");
        }
        s
    }
}

/// Analytic solution of the forced system together with its source terms.
#[derive(Debug, Clone)]
pub struct ExactSolution {
    /// Carries `∂u/∂t` as its time derivative.
    pub u: AnalyticField,
    pub w: AnalyticField,
    pub f_u_bulk: AnalyticField,
    pub f_u_surf: AnalyticField,
    pub f_w_bulk: AnalyticField,
    pub f_w_surf: AnalyticField,
}

impl ExactSolution {
    pub fn forcing(&self) -> FieldForcing {
        FieldForcing {
            u_bulk: self.f_u_bulk.clone(),
            u_surf: self.f_u_surf.clone(),
            w_bulk: self.f_w_bulk.clone(),
            w_surf: self.f_w_surf.clone(),
        }
    }
}

fn scaled_xy(c: f64) -> AnalyticField {
    AnalyticField::new(
        move |x, t| c * (-t).exp() * x[0] * x[1],
        move |x, t| [c * (-t).exp() * x[1], c * (-t).exp() * x[0]],
    )
}

fn xy_minus_potential(c: f64, p: Potential) -> AnalyticField {
    let q = p.clone();
    AnalyticField::new(
        move |x, t| {
            let s = (-t).exp() * x[0] * x[1];
            c * s - p.dw(s)
        },
        move |x, t| {
            let e = (-t).exp();
            let k = c - q.d2w(e * x[0] * x[1]);
            [k * e * x[1], k * e * x[0]]
        },
    )
}

/// `u = w = e^{−t} x₁x₂` on the unit disk with the sources that make it solve
/// the forced system. With `s = e^{−t}x₁x₂`, `Δs = 0`, and on the unit circle
/// `∂_ν s = 2s`, `Δ_Γ s = −4s`, so the sources are `f_u = −s`,
/// `f_w = s − W_Ω'(s)` in the bulk and `f_u = 5s`, `f_w = −5s − W_Γ'(s)` on
/// the boundary.
pub fn manufactured_solution_xy(pot: &PotentialPair) -> ExactSolution {
    ExactSolution {
        u: scaled_xy(1.0).with_time_derivative(scaled_xy(-1.0)),
        w: scaled_xy(1.0).with_time_derivative(scaled_xy(-1.0)),
        f_u_bulk: scaled_xy(-1.0),
        f_u_surf: scaled_xy(5.0),
        f_w_bulk: xy_minus_potential(1.0, pot.bulk.clone()),
        f_w_surf: xy_minus_potential(-5.0, pot.surface.clone()),
    }
}

/// Bulk and surface `L²` and full `H¹` errors of one variable.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FieldErrors {
    pub l2_bulk: f64,
    pub l2_surf: f64,
    pub h1_bulk: f64,
    pub h1_surf: f64,
}

impl FieldErrors {
    fn max_with(&mut self, o: &FieldErrors) {
        self.l2_bulk = self.l2_bulk.max(o.l2_bulk);
        self.l2_surf = self.l2_surf.max(o.l2_surf);
        self.h1_bulk = self.h1_bulk.max(o.h1_bulk);
        self.h1_surf = self.h1_surf.max(o.h1_surf);
    }

    /// Bulk plus surface `(L², H¹)`.
    pub fn combined(&self) -> (f64, f64) {
        (self.l2_bulk + self.l2_surf, self.h1_bulk + self.h1_surf)
    }
}

/// Errors of a P1 function against `v(·, t)`, integrated over `Ω_h` and `Γ_h`.
/// Surface gradients compare the exact tangential gradient (with respect to
/// the circle through the quadrature point) against the edge derivative.
pub fn field_errors(mesh: &Mesh2D, vh: &[f64], v: &AnalyticField, t: f64) -> Result<FieldErrors> {
    check_len(mesh.n_nodes(), vh.len())?;
    let (mut l2b, mut gb) = (0.0, 0.0);
    for tri in &mesh.triangles {
        let p = mesh.triangle_points(tri);
        let el = P1Triangle::new(p);
        let vk = [vh[tri[0]], vh[tri[1]], vh[tri[2]]];
        let mut grad = [0.0; 2];
        for i in 0..3 {
            grad[0] += vk[i] * el.grads[i][0];
            grad[1] += vk[i] * el.grads[i][1];
        }
        for (l, w) in &tri_deg5() {
            let x = bary_point(&p, l);
            let e = v.value(x, t) - (l[0] * vk[0] + l[1] * vk[1] + l[2] * vk[2]);
            let g = v.gradient(x, t);
            l2b += w * el.area * e * e;
            gb += w * el.area * ((g[0] - grad[0]).powi(2) + (g[1] - grad[1]).powi(2));
        }
    }
    let (mut l2s, mut gs) = (0.0, 0.0);
    for e in &mesh.boundary_edges {
        let (a, b) = (mesh.nodes[e[0]], mesh.nodes[e[1]]);
        let len = dist(a, b);
        let tangent = [(b[0] - a[0]) / len, (b[1] - a[1]) / len];
        let (va, vb) = (vh[e[0]], vh[e[1]]);
        let slope = (vb - va) / len;
        for (s, w) in seg_gauss3() {
            let x = seg_point(a, b, s);
            let err = v.value(x, t) - (va + s * (vb - va));
            let g = v.circle_tangential_gradient(x, t);
            l2s += w * len * err * err;
            gs += w * len * ((g[0] - slope * tangent[0]).powi(2) + (g[1] - slope * tangent[1]).powi(2));
        }
    }
    Ok(FieldErrors { l2_bulk: l2b.sqrt(), l2_surf: l2s.sqrt(), h1_bulk: (l2b + gb).sqrt(), h1_surf: (l2s + gs).sqrt() })
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StateErrors {
    pub u: FieldErrors,
    pub w: FieldErrors,
}

impl StateErrors {
    /// Columns in the order of [`ERRORS_CSV_HEADER`] after `h,tau`.
    pub fn as_array(&self) -> [f64; 8] {
        [
            self.u.l2_bulk,
            self.u.l2_surf,
            self.u.h1_bulk,
            self.u.h1_surf,
            self.w.l2_bulk,
            self.w.l2_surf,
            self.w.h1_bulk,
            self.w.h1_surf,
        ]
    }
}

pub fn error_vs_exact(mesh: &Mesh2D, state: &FieldState, exact: &ExactSolution) -> Result<StateErrors> {
    Ok(StateErrors {
        u: field_errors(mesh, &state.u, &exact.u, state.t)?,
        w: field_errors(mesh, &state.w, &exact.w, state.t)?,
    })
}

pub const ERRORS_CSV_HEADER: &str =
    "h,tau,err_u_L2_bulk,err_u_L2_surf,err_u_H1_bulk,err_u_H1_surf,err_w_L2_bulk,err_w_L2_surf,err_w_H1_bulk,err_w_H1_surf";

/// Maximum over recorded times of the errors of one run. `combined` holds
/// the maxima of bulk + surface sums, ordered `u L², u H¹, w L², w H¹`.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub h: f64,
    pub tau: f64,
    pub n_nodes: usize,
    pub max: StateErrors,
    pub combined: [f64; 4],
    pub samples: usize,
    pub eoc: Option<Vec<f64>>,
}

impl ErrorReport {
    pub fn new(h: f64, tau: f64, n_nodes: usize) -> Self {
        ErrorReport { h, tau, n_nodes, max: StateErrors::default(), combined: [0.0; 4], samples: 0, eoc: None }
    }

    pub fn record(&mut self, e: &StateErrors) -> Result<()> {
        if !e.as_array().iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite error value".into()));
        }
        self.max.u.max_with(&e.u);
        self.max.w.max_with(&e.w);
        let (ul2, uh1) = e.u.combined();
        let (wl2, wh1) = e.w.combined();
        for (c, v) in self.combined.iter_mut().zip([ul2, uh1, wl2, wh1]) {
            *c = c.max(v);
        }
        self.samples += 1;
        Ok(())
    }

    pub fn csv_row(&self) -> String {
        let mut s = format!("{:.10e},{:.10e}", self.h, self.tau);
        for v in self.max.as_array() {
            let _ = write!(s, ",{v:.10e}");
        }
        s
    }
}

/// Residual vectors `r_u = M u̇* + A w* − F_u` and
/// `r_w = M w* − A u* − nl(u*) − F_w` of the Ritz maps of the exact solution.
pub fn defect_residuals(
    disc: &Discretisation,
    pot: &PotentialPair,
    exact: &ExactSolution,
    t: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let u_dot = exact
        .u
        .time_derivative()
        .ok_or_else(|| Error::InvalidArgument("exact u needs a time derivative for defects".into()))?;
    let u_star = disc.ritz_map(&exact.u, t)?;
    let w_star = disc.ritz_map(&exact.w, t)?;
    let ud_star = disc.ritz_map(u_dot, t)?;
    let f = exact.forcing();
    let fu = disc.forcing(&f.u_bulk, &f.u_surf, t);
    let fw = disc.forcing(&f.w_bulk, &f.w_surf, t);
    let nl = disc.nonlinear_load(pot, &u_star)?;
    let (mud, aw) = (disc.mass.mul_vec(&ud_star), disc.stiffness.mul_vec(&w_star));
    let (mw, au) = (disc.mass.mul_vec(&w_star), disc.stiffness.mul_vec(&u_star));
    let r_u = (0..disc.n()).map(|i| mud[i] + aw[i] - fu[i]).collect();
    let r_w = (0..disc.n()).map(|i| mw[i] - au[i] - nl[i] - fw[i]).collect();
    Ok((r_u, r_w))
}

/// Dual norm `sup_φ rᵀφ / ‖φ‖_h = √(rᵀ(A+M)⁻¹r)`.
pub fn dual_norm(disc: &Discretisation, r: &[f64]) -> Result<f64> {
    let z = disc.h1_solve(r)?;
    Ok(r.iter().zip(&z).map(|(a, b)| a * b).sum::<f64>().max(0.0).sqrt())
}

/// Dual norms `(‖d_u‖_{*,h}, ‖d_w‖_{*,h})` of the defects at time `t`.
pub fn defect_dual_norms(
    disc: &Discretisation,
    pot: &PotentialPair,
    exact: &ExactSolution,
    t: f64,
) -> Result<(f64, f64)> {
    let (r_u, r_w) = defect_residuals(disc, pot, exact, t)?;
    Ok((dual_norm(disc, &r_u)?, dual_norm(disc, &r_w)?))
}

/// `log(e_i/e_{i+1}) / log(h_i/h_{i+1})` for consecutive pairs.
pub fn eoc(values: &[f64], hs: &[f64]) -> Result<Vec<f64>> {
    if values.len() != hs.len() || values.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "eoc needs two equally long lists of length >= 2 (got {} and {})",
            values.len(),
            hs.len()
        )));
    }
    if values.iter().chain(hs).any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidArgument("eoc entries must be positive and finite".into()));
    }
    if hs.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("mesh widths must be strictly decreasing".into()));
    }
    Ok(values.windows(2).zip(hs.windows(2)).map(|(e, h)| (e[0] / e[1]).ln() / (h[0] / h[1]).ln()).collect())
}

pub fn write_text(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut f = std::fs::File::create(path)?;
    f.write_all(contents.as_bytes())?;
    Ok(())
}
