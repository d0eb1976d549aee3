//! Fixtures shared by the benchmarks.

use chdbc::mesh::generate_disk_mesh;
use chdbc::{Discretisation, Mesh2D, Potential, PotentialPair};

/// Refinement depth `level` of the unit-disk convergence family.
pub fn convergence_mesh(level: usize) -> Mesh2D {
    generate_disk_mesh(1.0, 0.5).expect("valid base mesh").refined(level)
}

pub fn convergence_disc(level: usize) -> Discretisation {
    Discretisation::new(convergence_mesh(level)).expect("valid mesh")
}

pub fn double_well(scale: f64) -> PotentialPair {
    PotentialPair::uniform(Potential::double_well(scale).expect("positive scale"))
}

/// Smooth nodal data in `[-1, 1]`.
pub fn smooth_field(mesh: &Mesh2D) -> Vec<f64> {
    mesh.nodes.iter().map(|p| (3.0 * p[0]).sin() * (2.0 * p[1]).cos()).collect()
}
