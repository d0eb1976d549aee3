//! Bulk-surface P1 finite elements for the Cahn-Hilliard equation with
//! Cahn-Hilliard-type dynamic boundary conditions on a disk, advanced in time
//! by linearly implicit BDF methods.
//!
//! The unknowns are the phase field `u` and the chemical potential `w`, both
//! represented by nodal coefficient vectors over one P1 space whose traces
//! carry the boundary dynamics. The semi-discrete system in matrix form is
//!
//! ```text
//! M u' + A w = F_u
//! M w - A u  = W'(u) + M theta + F_w
//! ```
//!
//! where `M` and `A` combine bulk and boundary mass and stiffness.

pub mod assembly;
pub mod diagnostics;
pub mod error;
pub mod experiments;
pub mod field;
pub mod linalg;
pub mod mesh;
pub mod potentials;
pub mod quadrature;
pub mod scenario;
pub mod sparse;
pub mod timestepping;

pub use assembly::Discretisation;
pub use diagnostics::{EnergyTrace, ErrorReport, ExactSolution};
pub use error::{Error, Result};
pub use field::{AnalyticField, Point};
pub use mesh::{Mesh2D, MeshMetrics};
pub use potentials::{Potential, PotentialPair};
pub use scenario::Scenario;
pub use sparse::{CsrMatrix, SparseSym};
pub use timestepping::{BdfScheme, FieldState, History, Problem};
