//! Energy-stable continuous Galerkin SBP-SAT discretization of the
//! two-dimensional incompressible Navier-Stokes equations.
//!
//! The pipeline is `mesh -> operators -> system -> march`:
//!
//! ```no_run
//! use sbp_ins::prelude::*;
//!
//! let re = ReferenceElement::new(4)?;
//! let edges = cosine_stretched_edges(13)?;
//! let mesh = build_mesh(&edges, &edges, &re)?;
//! let ops = mesh.operators()?;
//! let mut segments: Vec<_> = [Segment::South, Segment::East, Segment::West]
//!     .iter()
//!     .map(|&s| BoundarySegmentSpec::wall(&mesh, &ops, s))
//!     .collect();
//! segments.push(BoundarySegmentSpec::new(
//!     &mesh,
//!     &ops,
//!     Segment::North,
//!     BoundaryKind::DirichletVelocity,
//!     BoundaryData::Constant(1.0, 0.0),
//! ));
//! let sys = BlockSystem::new(mesh, ops, 0.01, segments)?;
//! let result = march(&sys, &MarchConfig::default(), StateVector::zeros(sys.n_nodes()))?;
//! assert!(result.steady);
//! # Ok::<(), sbp_ins::Error>(())
//! ```

pub mod basis;
pub mod boundary;
pub mod cases;
pub mod error;
pub mod linsolve;
pub mod mesh;
pub mod mms;
pub mod sbp;
pub mod sparse;
pub mod state;
pub mod system;
pub mod time;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::basis::ReferenceElement;
    pub use crate::boundary::{BoundaryData, BoundaryKind, BoundarySegmentSpec};
    pub use crate::error::{Error, Result};
    pub use crate::mesh::{build_mesh, cosine_stretched_edges, uniform_edges, Mesh2D};
    pub use crate::sbp::{Operators2D, SecondDerivative, Segment};
    pub use crate::state::StateVector;
    pub use crate::system::BlockSystem;
    pub use crate::time::{march, MarchConfig, NewtonSettings};
}
