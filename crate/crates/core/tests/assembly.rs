mod common;

use chdbc::assembly::*;
use chdbc::mesh::ring_mesh;
use chdbc::{AnalyticField, Discretisation, Mesh2D, Potential, PotentialPair};
use common::*;
use proptest::prelude::*;

/// Ring mesh with interior nodes moved by up to `jitter` times the ring spacing.
fn jittered(radius: f64, rings: usize, shifts: &[(f64, f64)], jitter: f64) -> Mesh2D {
    let mut mesh = ring_mesh(radius, rings).unwrap();
    let dr = radius / rings as f64;
    for (i, p) in mesh.nodes.iter_mut().enumerate() {
        if !mesh.boundary_mask[i] {
            let (a, b) = shifts[i % shifts.len()];
            p[0] += jitter * dr * a;
            p[1] += jitter * dr * b;
        }
    }
    mesh
}

fn mesh_strategy() -> impl Strategy<Value = Mesh2D> {
    (0.5f64..3.0, 1usize..4, prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 8), 0.0f64..0.2)
        .prop_map(|(r, n, s, j)| jittered(r, n, &s, j))
}

fn max_dense_diff(sparse: &chdbc::sparse::SparseSym, dense: &nalgebra::DMatrix<f64>) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..dense.nrows() {
        for j in 0..dense.ncols() {
            worst = worst.max((sparse.get(i, j) - dense[(i, j)]).abs());
        }
    }
    worst
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn matrices_match_dense_oracle(mesh in mesh_strategy()) {
        prop_assume!(mesh.validate().is_ok());
        let dense = dense_matrices(&mesh);
        let m = assemble_mass(&mesh);
        let a = assemble_stiffness(&mesh);
        let scale = dense.a.amax().max(dense.m.amax());
        prop_assert!(max_dense_diff(&m, &dense.m) <= 1e-13 * scale);
        prop_assert!(max_dense_diff(&a, &dense.a) <= 1e-13 * scale);
        prop_assert!(m.max_asymmetry() <= 1e-14 * scale);
        prop_assert!(a.max_asymmetry() <= 1e-14 * scale);
    }

    #[test]
    fn constants_are_in_the_kernel_and_mass_measures_the_domain(mesh in mesh_strategy()) {
        prop_assume!(mesh.validate().is_ok());
        let ones = vec![1.0; mesh.n_nodes()];
        let a = assemble_stiffness(&mesh);
        prop_assert!(a.mul_vec(&ones).iter().all(|v| v.abs() < 1e-10));
        let metrics = mesh.metrics();
        let total = assemble_mass(&mesh).quad_form(&ones);
        prop_assert!((total - metrics.area - metrics.perimeter).abs() < 1e-12 * total);
    }

    #[test]
    fn stiffness_is_positive_semidefinite(
        mesh in mesh_strategy(),
        coeffs in prop::collection::vec(-5.0f64..5.0, 40),
    ) {
        prop_assume!(mesh.validate().is_ok());
        let v: Vec<f64> = (0..mesh.n_nodes()).map(|i| coeffs[i % coeffs.len()]).collect();
        prop_assert!(assemble_stiffness(&mesh).quad_form(&v) >= -1e-12);
        prop_assert!(assemble_mass(&mesh).quad_form(&v) > 0.0);
    }

    #[test]
    fn loads_match_dense_oracle(
        mesh in mesh_strategy(),
        coeffs in prop::collection::vec(-1.5f64..1.5, 40),
        t in 0.0f64..1.0,
    ) {
        prop_assume!(mesh.validate().is_ok());
        let u: Vec<f64> = (0..mesh.n_nodes()).map(|i| coeffs[i % coeffs.len()]).collect();
        let pot = PotentialPair::new(Potential::double_well(0.7).unwrap(), Potential::quadratic(1.3).unwrap());
        let nl = assemble_nonlinear_load(&mesh, &pot, &u).unwrap();
        prop_assert!(rel_diff(&nl, &dense_nonlinear(&mesh, &pot.bulk, &pot.surface, &u)) < 1e-12);

        let fb = AnalyticField::new(|x, t| (x[0] - t).sin() + x[1], |x, t| [(x[0] - t).cos(), 1.0]);
        let fs = AnalyticField::new(|x, t| x[0] * x[1] * t, |x, t| [x[1] * t, x[0] * t]);
        let f = assemble_forcing(&mesh, &fb, &fs, t);
        prop_assert!(rel_diff(&f, &dense_forcing(&mesh, &fb, &fs, t)) < 1e-12);
    }

    #[test]
    fn ritz_map_matches_dense_oracle_and_reproduces_constants(mesh in mesh_strategy(), c in -2.0f64..2.0) {
        prop_assume!(mesh.validate().is_ok());
        let d = Discretisation::new(mesh.clone()).unwrap();
        let dense = dense_matrices(&mesh);
        // Quadratic data are integrated exactly by both quadrature rules.
        let f = AnalyticField::new(
            |x, t| x[0] * x[0] - x[0] * x[1] + 0.5 * x[1] + t,
            |x, _| [2.0 * x[0] - x[1], 0.5 - x[0]],
        );
        let ours = d.ritz_map(&f, 0.3).unwrap();
        prop_assert!(rel_diff(&ours, &dense_ritz(&dense, &mesh, &f, 0.3)) < 1e-9);
        let k = d.ritz_map(&AnalyticField::constant(c), 0.0).unwrap();
        prop_assert!(k.iter().all(|v| (v - c).abs() < 1e-10));
    }
}

#[test]
fn mismatched_lengths_are_rejected() {
    let mesh = ring_mesh(1.0, 2).unwrap();
    assert!(assemble_nonlinear_load(&mesh, &PotentialPair::zero(), &[0.0; 3]).is_err());
    let d = Discretisation::new(mesh).unwrap();
    assert!(d.mass_solve(&[1.0]).is_err());
}

#[test]
fn interpolation_is_nodal() {
    let mesh = ring_mesh(2.0, 3).unwrap();
    let f = AnalyticField::new(|x, t| x[0] * x[0] + t, |x, _| [2.0 * x[0], 0.0]);
    let v = interpolate(&mesh, &f, 0.5);
    for (p, val) in mesh.nodes.iter().zip(&v) {
        assert_eq!(*val, p[0] * p[0] + 0.5);
    }
}
