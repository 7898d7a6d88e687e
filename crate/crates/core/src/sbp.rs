//! Summation-by-parts operators: element level, globally assembled in one
//! dimension, and the two-dimensional Kronecker extension.
//!
//! # Node ordering
//!
//! Two-dimensional fields are flattened x-major: the node at x-index `i`
//! (`0..M`) and y-index `j` (`0..N`) lives at `i * N + j`. This is the ordering
//! implied by `P = Px ⊗ Py`, so `Dx = Dx1 ⊗ I_N` and `Dy = I_M ⊗ Dy1`. Every
//! block operator, boundary restriction and exported field uses it.

use std::fmt;
use std::str::FromStr;

use sprs::TriMat;

use crate::basis::ReferenceElement;
use crate::error::{Error, Result};
use crate::sparse::{self, SparseMatrix};

/// Mass, weak derivative and boundary operators of one element.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementOperators {
    /// Diagonal of `P^e`, in physical length units.
    pub mass: Vec<f64>,
    /// Dense `Q_x^e`; independent of the element length.
    pub qx: Vec<Vec<f64>>,
    /// Diagonal of `B^e = diag(-1, 0, ..., 0, 1)`.
    pub boundary: Vec<f64>,
    /// `|J|`, half the element length.
    pub jacobian: f64,
}

impl ElementOperators {
    pub fn degree(&self) -> usize {
        self.mass.len() - 1
    }
}

pub fn build_element_operators(
    reference: &ReferenceElement,
    element_length: f64,
) -> Result<ElementOperators> {
    if !(element_length > 0.0 && element_length.is_finite()) {
        return Err(Error::invalid(format!(
            "element length must be positive, got {element_length}"
        )));
    }
    let jacobian = 0.5 * element_length;
    let n = reference.n_nodes();
    let mass = reference.weights.iter().map(|w| w * jacobian).collect();
    // Collocated GL quadrature of L (dL/dxi)^T; the Jacobians cancel.
    let qx = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| reference.weights[a] * reference.diff_matrix[a][b])
                .collect()
        })
        .collect();
    let mut boundary = vec![0.0; n];
    boundary[0] = -1.0;
    boundary[n - 1] = 1.0;
    Ok(ElementOperators {
        mass,
        qx,
        boundary,
        jacobian,
    })
}

/// Assembled one-dimensional operators on `M = M_el * k + 1` nodes.
#[derive(Debug, Clone)]
pub struct GlobalOperators1D {
    pub degree: usize,
    pub n_elements: usize,
    /// Diagonal of `P`.
    pub mass: Vec<f64>,
    pub qx: SparseMatrix,
    pub dx: SparseMatrix,
    /// `B Dx - Dx^T P Dx` from the global first derivative.
    pub qxx: SparseMatrix,
    pub dxx: SparseMatrix,
    /// `B Dx - sum_e (D^e)^T P^e D^e`: element second derivatives summed
    /// with the interior interface fluxes cancelling.
    pub qxx_assembled: SparseMatrix,
    pub dxx_assembled: SparseMatrix,
    /// Diagonal of `B = diag(-1, 0, ..., 0, 1)`.
    pub boundary: Vec<f64>,
}

/// Which second-derivative operator the viscous term uses.
///
/// Both share the boundary flux `B Dx` and a symmetric negative
/// semidefinite interior part, so either gives an energy estimate. They
/// differ at element interfaces: `Global` couples neighbours of neighbours
/// through the averaged interface derivative, `Assembled` is the compact
/// continuous Galerkin stiffness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SecondDerivative {
    #[default]
    Assembled,
    Global,
}

impl SecondDerivative {
    pub fn name(self) -> &'static str {
        match self {
            SecondDerivative::Assembled => "assembled",
            SecondDerivative::Global => "global",
        }
    }
}

impl fmt::Display for SecondDerivative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SecondDerivative {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "assembled" => Ok(SecondDerivative::Assembled),
            "global" => Ok(SecondDerivative::Global),
            other => Err(Error::invalid(format!(
                "unknown second derivative '{other}' (expected 'assembled' or 'global')"
            ))),
        }
    }
}

impl GlobalOperators1D {
    /// `Dxx` of the requested form.
    pub fn second_derivative(&self, form: SecondDerivative) -> &SparseMatrix {
        match form {
            SecondDerivative::Assembled => &self.dxx_assembled,
            SecondDerivative::Global => &self.dxx,
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.mass.len()
    }

    /// Largest entry of `|Qx + Qx^T - B|`.
    pub fn sbp_defect(&self) -> f64 {
        let qt = sparse::transpose(&self.qx);
        let sum = &self.qx + &qt;
        sparse::max_abs_diff(&sum, &sparse::diag(&self.boundary))
    }

    /// Largest entry of `|Qxx - (B Dx - Dx^T P Dx)|`.
    pub fn second_derivative_defect(&self) -> f64 {
        let reference = second_derivative_identity(&self.dx, &self.mass, &self.boundary);
        sparse::max_abs_diff(&self.qxx, &reference)
    }
}

fn second_derivative_identity(dx: &SparseMatrix, mass: &[f64], boundary: &[f64]) -> SparseMatrix {
    let bdx = sparse::scale_rows(dx, boundary);
    let pdx = sparse::scale_rows(dx, mass);
    let dtpd = &sparse::transpose(dx) * &pdx;
    &bdx - &dtpd
}

/// `Qxx = B Dx - Dx^T P Dx` and `Dxx = P^{-1} Qxx` from the global first
/// derivative; the element-wise second derivative is never assembled.
pub fn build_qxx_global(dx: &SparseMatrix, mass: &[f64], boundary: &[f64]) -> (SparseMatrix, SparseMatrix) {
    let qxx = second_derivative_identity(dx, mass, boundary);
    let inv: Vec<f64> = mass.iter().map(|m| 1.0 / m).collect();
    let dxx = sparse::scale_rows(&qxx, &inv);
    (qxx, dxx)
}

/// `B Dx - sum_e (D^e)^T P^e D^e` and its `P^{-1}` scaling.
pub fn build_qxx_assembled(
    elements: &[ElementOperators],
    dx: &SparseMatrix,
    mass: &[f64],
    boundary: &[f64],
) -> (SparseMatrix, SparseMatrix) {
    let n = mass.len();
    let mut tri = TriMat::new((n, n));
    for (&v, (i, j)) in sparse::scale_rows(dx, boundary).iter() {
        tri.add_triplet(i, j, v);
    }
    for (e, op) in elements.iter().enumerate() {
        let k = op.degree();
        let off = e * k;
        let d: Vec<Vec<f64>> = (0..=k)
            .map(|a| (0..=k).map(|b| op.qx[a][b] / op.mass[a]).collect())
            .collect();
        for a in 0..=k {
            for b in 0..=k {
                let v: f64 = (0..=k).map(|c| d[c][a] * op.mass[c] * d[c][b]).sum();
                tri.add_triplet(off + a, off + b, -v);
            }
        }
    }
    let qxx: SparseMatrix = tri.to_csr();
    let inv: Vec<f64> = mass.iter().map(|m| 1.0 / m).collect();
    let dxx = sparse::scale_rows(&qxx, &inv);
    (qxx, dxx)
}

/// Sums element matrices into global ones, sharing interface nodes.
pub fn assemble_global(elements: &[ElementOperators]) -> Result<GlobalOperators1D> {
    let first = elements
        .first()
        .ok_or_else(|| Error::invalid("cannot assemble an empty element list"))?;
    let k = first.degree();
    if let Some(e) = elements.iter().find(|e| e.degree() != k) {
        return Err(Error::invalid(format!(
            "mixed element degrees {k} and {} in one direction",
            e.degree()
        )));
    }
    let n = elements.len() * k + 1;
    let mut mass = vec![0.0; n];
    let mut qx = TriMat::new((n, n));
    for (e, op) in elements.iter().enumerate() {
        let off = e * k;
        for a in 0..=k {
            mass[off + a] += op.mass[a];
            for b in 0..=k {
                let v = op.qx[a][b];
                if v != 0.0 {
                    qx.add_triplet(off + a, off + b, v);
                }
            }
        }
    }
    let qx: SparseMatrix = qx.to_csr();
    let inv: Vec<f64> = mass.iter().map(|m| 1.0 / m).collect();
    let dx = sparse::scale_rows(&qx, &inv);
    let mut boundary = vec![0.0; n];
    boundary[0] = -1.0;
    boundary[n - 1] = 1.0;
    let (qxx, dxx) = build_qxx_global(&dx, &mass, &boundary);
    let (qxx_assembled, dxx_assembled) = build_qxx_assembled(elements, &dx, &mass, &boundary);
    Ok(GlobalOperators1D {
        degree: k,
        n_elements: elements.len(),
        mass,
        qx,
        dx,
        qxx,
        dxx,
        qxx_assembled,
        dxx_assembled,
        boundary,
    })
}

/// Operators on an arbitrary (e.g. stretched) set of element edges.
///
/// Each element is mapped affinely, so it carries its own `|J|` in the mass
/// matrix while `Q_x^e` is unchanged.
pub fn metric_scaled_operators(reference: &ReferenceElement, edges: &[f64]) -> Result<GlobalOperators1D> {
    if edges.len() < 2 {
        return Err(Error::invalid("at least two element edges are required"));
    }
    if let Some(w) = edges.windows(2).find(|w| !(w[1] > w[0])) {
        return Err(Error::invalid(format!(
            "element edges must be strictly increasing (found {} then {})",
            w[0], w[1]
        )));
    }
    let elements = edges
        .windows(2)
        .map(|w| build_element_operators(reference, w[1] - w[0]))
        .collect::<Result<Vec<_>>>()?;
    assemble_global(&elements)
}

/// One of the four sides of a rectangular domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Segment {
    North,
    South,
    East,
    West,
}

impl Segment {
    pub const ALL: [Segment; 4] = [Segment::North, Segment::South, Segment::East, Segment::West];

    /// Outward unit normal `(n_x, n_y)`.
    pub fn normal(self) -> (f64, f64) {
        match self {
            Segment::North => (0.0, 1.0),
            Segment::South => (0.0, -1.0),
            Segment::East => (1.0, 0.0),
            Segment::West => (-1.0, 0.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Segment::North => "north",
            Segment::South => "south",
            Segment::East => "east",
            Segment::West => "west",
        }
    }
}

impl std::str::FromStr for Segment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "north" | "n" => Ok(Segment::North),
            "south" | "s" => Ok(Segment::South),
            "east" | "e" => Ok(Segment::East),
            "west" | "w" => Ok(Segment::West),
            other => Err(Error::invalid(format!("unknown boundary segment '{other}'"))),
        }
    }
}

/// Nonzero part of a boundary-restricted mass matrix: the segment's node
/// indices and the one-dimensional quadrature weight at each.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryRestriction {
    pub segment: Segment,
    pub nodes: Vec<usize>,
    pub weights: Vec<f64>,
}

/// Two-dimensional operators on an `M x N` tensor-product grid.
#[derive(Debug, Clone)]
pub struct Operators2D {
    pub x: GlobalOperators1D,
    pub y: GlobalOperators1D,
    /// Diagonal of `P = Px ⊗ Py`.
    pub mass: Vec<f64>,
    pub dx: SparseMatrix,
    pub dy: SparseMatrix,
    /// Second derivatives of the form in `second_derivative`.
    pub dxx: SparseMatrix,
    pub dyy: SparseMatrix,
    pub second_derivative: SecondDerivative,
}

impl Operators2D {
    pub fn nx(&self) -> usize {
        self.x.n_nodes()
    }

    pub fn ny(&self) -> usize {
        self.y.n_nodes()
    }

    pub fn n_nodes(&self) -> usize {
        self.mass.len()
    }

    /// Flattened index of grid node `(i, j)`.
    #[inline]
    pub fn node(&self, i: usize, j: usize) -> usize {
        i * self.ny() + j
    }

    /// `P^l` for one boundary segment.
    pub fn restriction(&self, segment: Segment) -> BoundaryRestriction {
        let (m, n) = (self.nx(), self.ny());
        let (nodes, weights): (Vec<usize>, Vec<f64>) = match segment {
            Segment::North => (0..m).map(|i| (self.node(i, n - 1), self.x.mass[i])).unzip(),
            Segment::South => (0..m).map(|i| (self.node(i, 0), self.x.mass[i])).unzip(),
            Segment::East => (0..n).map(|j| (self.node(m - 1, j), self.y.mass[j])).unzip(),
            Segment::West => (0..n).map(|j| (self.node(0, j), self.y.mass[j])).unzip(),
        };
        BoundaryRestriction {
            segment,
            nodes,
            weights,
        }
    }

    /// Outward normal derivative `n_x Dx + n_y Dy` for a segment (all rows).
    pub fn normal_derivative(&self, segment: Segment) -> &SparseMatrix {
        match segment {
            Segment::East | Segment::West => &self.dx,
            Segment::North | Segment::South => &self.dy,
        }
    }

    /// Sign multiplying [`Self::normal_derivative`]'s matrix.
    pub fn normal_sign(segment: Segment) -> f64 {
        let (nx, ny) = segment.normal();
        nx + ny
    }
}

/// Kronecker extension with the default second-derivative form.
pub fn build_operators_2d(x: GlobalOperators1D, y: GlobalOperators1D) -> Operators2D {
    build_operators_2d_with(x, y, SecondDerivative::default())
}

pub fn build_operators_2d_with(x: GlobalOperators1D, y: GlobalOperators1D, form: SecondDerivative) -> Operators2D {
    let (m, n) = (x.n_nodes(), y.n_nodes());
    let ix = sparse::identity(m);
    let iy = sparse::identity(n);
    let dx = sparse::kron(&x.dx, &iy);
    let dy = sparse::kron(&ix, &y.dx);
    let dxx = sparse::kron(x.second_derivative(form), &iy);
    let dyy = sparse::kron(&ix, y.second_derivative(form));
    let mut mass = Vec::with_capacity(m * n);
    for &px in &x.mass {
        for &py in &y.mass {
            mass.push(px * py);
        }
    }
    Operators2D {
        x,
        y,
        mass,
        dx,
        dy,
        dxx,
        dyy,
        second_derivative: form,
    }
}
