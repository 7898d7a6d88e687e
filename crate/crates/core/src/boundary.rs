//! Boundary segment descriptions: where a condition acts and what it imposes.

use std::fmt;
use std::sync::Arc;

use crate::sbp::{BoundaryRestriction, Operators2D, Segment};
use crate::mesh::Mesh2D;

/// Pointwise boundary data `(x, y, t) -> (a, b)`.
pub type BoundaryFn = Arc<dyn Fn(f64, f64, f64) -> (f64, f64) + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    /// Weakly imposed velocity; data is the Cartesian velocity `(u, v)`.
    DirichletVelocity,
    /// Open boundary driving the traction `p n - eps dU/dn` towards the data
    /// (Cartesian components, usually zero).
    OutflowNatural,
}

#[derive(Clone)]
pub enum BoundaryData {
    Zero,
    Constant(f64, f64),
    Function(BoundaryFn),
}

impl BoundaryData {
    pub fn function<F>(f: F) -> Self
    where
        F: Fn(f64, f64, f64) -> (f64, f64) + Send + Sync + 'static,
    {
        BoundaryData::Function(Arc::new(f))
    }

    pub fn eval(&self, x: f64, y: f64, t: f64) -> (f64, f64) {
        match self {
            BoundaryData::Zero => (0.0, 0.0),
            BoundaryData::Constant(a, b) => (*a, *b),
            BoundaryData::Function(f) => f(x, y, t),
        }
    }
}

impl fmt::Debug for BoundaryData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryData::Zero => write!(f, "Zero"),
            BoundaryData::Constant(a, b) => write!(f, "Constant({a}, {b})"),
            BoundaryData::Function(_) => write!(f, "Function(..)"),
        }
    }
}

/// A condition together with the discrete objects it acts through.
#[derive(Debug, Clone)]
pub struct BoundarySegmentSpec {
    pub segment: Segment,
    pub kind: BoundaryKind,
    pub data: BoundaryData,
    /// Segment nodes and their boundary quadrature weights.
    pub restriction: BoundaryRestriction,
    /// Outward unit normal, constant along the segment.
    pub normal: (f64, f64),
    /// Coordinates of the segment nodes, aligned with `restriction.nodes`.
    pub coords: Vec<(f64, f64)>,
}

impl BoundarySegmentSpec {
    pub fn new(mesh: &Mesh2D, ops: &Operators2D, segment: Segment, kind: BoundaryKind, data: BoundaryData) -> Self {
        let restriction = ops.restriction(segment);
        let coords = restriction.nodes.iter().map(|&g| mesh.coords(g)).collect();
        Self {
            segment,
            kind,
            data,
            restriction,
            normal: segment.normal(),
            coords,
        }
    }

    pub fn wall(mesh: &Mesh2D, ops: &Operators2D, segment: Segment) -> Self {
        Self::new(mesh, ops, segment, BoundaryKind::DirichletVelocity, BoundaryData::Zero)
    }

    /// Data at every segment node at time `t`.
    pub fn data_at(&self, t: f64) -> Vec<(f64, f64)> {
        self.coords.iter().map(|&(x, y)| self.data.eval(x, y, t)).collect()
    }

    /// Boundary-data normal and tangential velocity `(g_n, g_t)` with the
    /// tangent `t = (-n_y, n_x)`; only meaningful for velocity data.
    pub fn normal_tangential(&self, (a, b): (f64, f64)) -> (f64, f64) {
        let (nx, ny) = self.normal;
        (nx * a + ny * b, -ny * a + nx * b)
    }

    /// `sum_l w_l g_n` at time `t`: the prescribed outward volume flux.
    pub fn prescribed_flux(&self, t: f64) -> f64 {
        self.data_at(t)
            .into_iter()
            .zip(&self.restriction.weights)
            .map(|(g, w)| w * self.normal_tangential(g).0)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::ReferenceElement;
    use crate::mesh::{build_mesh, uniform_edges};

    #[test]
    fn normals_are_unit_and_data_rotates() {
        let re = ReferenceElement::new(2).unwrap();
        let mesh = build_mesh(&uniform_edges(2, 0.0, 1.0).unwrap(), &uniform_edges(1, 0.0, 1.0).unwrap(), &re).unwrap();
        let ops = mesh.operators().unwrap();
        for s in Segment::ALL {
            let spec = BoundarySegmentSpec::wall(&mesh, &ops, s);
            let (nx, ny) = spec.normal;
            assert_eq!(nx * nx + ny * ny, 1.0);
            assert_eq!(spec.coords.len(), spec.restriction.nodes.len());
        }
        let north = BoundarySegmentSpec::new(
            &mesh,
            &ops,
            Segment::North,
            BoundaryKind::DirichletVelocity,
            BoundaryData::Constant(1.0, 0.0),
        );
        // A lid moving in +x has tangential component -1 for t = (-n_y, n_x).
        assert_eq!(north.normal_tangential((1.0, 0.0)), (0.0, -1.0));
        assert!(north.coords.iter().all(|&(_, y)| y == 1.0));
        assert_eq!(north.prescribed_flux(0.0), 0.0);
    }
}
