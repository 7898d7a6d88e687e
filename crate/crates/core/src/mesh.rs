//! Tensor-product meshes of Gauss-Lobatto elements.

use std::f64::consts::PI;
use std::fmt;

use crate::basis::ReferenceElement;
use crate::error::{Error, Result};
use crate::sbp::{build_operators_2d_with, metric_scaled_operators, Operators2D, SecondDerivative};

/// `n_el + 1` equispaced edges on `[a, b]`.
pub fn uniform_edges(n_el: usize, a: f64, b: f64) -> Result<Vec<f64>> {
    if n_el == 0 {
        return Err(Error::invalid("at least one element is required"));
    }
    if !(b > a) {
        return Err(Error::invalid(format!("interval [{a}, {b}] is empty")));
    }
    let h = (b - a) / n_el as f64;
    let mut edges: Vec<f64> = (0..=n_el).map(|i| a + h * i as f64).collect();
    edges[n_el] = b;
    Ok(edges)
}

/// Edges `(1 - cos(pi i / (n_points - 1))) / 2` on `[0, 1]`, clustered at both ends.
pub fn cosine_stretched_edges(n_points: usize) -> Result<Vec<f64>> {
    if n_points < 2 {
        return Err(Error::invalid(format!(
            "stretched grid needs at least 2 edge points, got {n_points}"
        )));
    }
    let m = (n_points - 1) as f64;
    let mut edges: Vec<f64> = (0..n_points)
        .map(|i| 0.5 * (1.0 - (PI * i as f64 / m).cos()))
        .collect();
    // Pin the symmetric pairs and endpoints so the edge set is exactly
    // mirror-symmetric in floating point.
    for i in 0..n_points / 2 {
        edges[n_points - 1 - i] = 1.0 - edges[i];
    }
    if n_points % 2 == 1 {
        edges[n_points / 2] = 0.5;
    }
    edges[0] = 0.0;
    edges[n_points - 1] = 1.0;
    Ok(edges)
}

/// Affine map of the cosine-stretched edges onto `[a, b]`.
pub fn cosine_stretched_edges_on(n_el: usize, a: f64, b: f64) -> Result<Vec<f64>> {
    if !(b > a) {
        return Err(Error::invalid(format!("interval [{a}, {b}] is empty")));
    }
    Ok(cosine_stretched_edges(n_el + 1)?
        .into_iter()
        .map(|s| a + (b - a) * s)
        .collect())
}

/// Global nodes of a one-dimensional CG space; interface nodes appear once.
pub fn global_nodes(reference: &ReferenceElement, edges: &[f64]) -> Vec<f64> {
    let mut nodes = Vec::with_capacity((edges.len() - 1) * reference.degree + 1);
    nodes.push(edges[0]);
    for w in edges.windows(2) {
        let (xl, xr) = (w[0], w[1]);
        let k = reference.degree;
        for xi in &reference.nodes[1..k] {
            nodes.push(0.5 * (xr - xl) * xi + 0.5 * (xr + xl));
        }
        nodes.push(xr);
    }
    nodes
}

#[derive(Debug, Clone)]
pub struct Mesh2D {
    pub degree: usize,
    pub x_edges: Vec<f64>,
    pub y_edges: Vec<f64>,
    pub x_nodes: Vec<f64>,
    pub y_nodes: Vec<f64>,
    pub reference: ReferenceElement,
}

pub fn build_mesh(x_edges: &[f64], y_edges: &[f64], reference: &ReferenceElement) -> Result<Mesh2D> {
    for (name, edges) in [("x", x_edges), ("y", y_edges)] {
        if edges.len() < 2 {
            return Err(Error::invalid(format!("{name}: at least two edges are required")));
        }
        if edges.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid(format!("{name}: edges must be strictly increasing")));
        }
    }
    Ok(Mesh2D {
        degree: reference.degree,
        x_nodes: global_nodes(reference, x_edges),
        y_nodes: global_nodes(reference, y_edges),
        x_edges: x_edges.to_vec(),
        y_edges: y_edges.to_vec(),
        reference: reference.clone(),
    })
}

impl Mesh2D {
    pub fn nx(&self) -> usize {
        self.x_nodes.len()
    }

    pub fn ny(&self) -> usize {
        self.y_nodes.len()
    }

    pub fn n_nodes(&self) -> usize {
        self.nx() * self.ny()
    }

    pub fn elements(&self) -> (usize, usize) {
        (self.x_edges.len() - 1, self.y_edges.len() - 1)
    }

    pub fn domain(&self) -> (f64, f64, f64, f64) {
        (
            self.x_edges[0],
            *self.x_edges.last().unwrap(),
            self.y_edges[0],
            *self.y_edges.last().unwrap(),
        )
    }

    /// Coordinates of flattened node `g` (x-major, `g = i * ny + j`).
    pub fn coords(&self, g: usize) -> (f64, f64) {
        let n = self.ny();
        (self.x_nodes[g / n], self.y_nodes[g % n])
    }

    /// Evaluates `f(x, y)` at every node in flattened order.
    pub fn sample<F: FnMut(f64, f64) -> f64>(&self, mut f: F) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_nodes());
        for &x in &self.x_nodes {
            for &y in &self.y_nodes {
                out.push(f(x, y));
            }
        }
        out
    }

    /// Smallest and largest element width over both directions.
    pub fn element_size_range(&self) -> (f64, f64) {
        self.x_edges
            .windows(2)
            .chain(self.y_edges.windows(2))
            .map(|w| w[1] - w[0])
            .fold((f64::INFINITY, 0.0), |(lo, hi), h| (lo.min(h), hi.max(h)))
    }

    pub fn operators(&self) -> Result<Operators2D> {
        self.operators_with(SecondDerivative::default())
    }

    pub fn operators_with(&self, form: SecondDerivative) -> Result<Operators2D> {
        let gx = metric_scaled_operators(&self.reference, &self.x_edges)?;
        let gy = metric_scaled_operators(&self.reference, &self.y_edges)?;
        Ok(build_operators_2d_with(gx, gy, form))
    }
}

impl fmt::Display for Mesh2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (ex, ey) = self.elements();
        let (hmin, hmax) = self.element_size_range();
        write!(
            f,
            "{ex}x{ey} elements of degree {}, {}x{} = {} nodes, element size {hmin:.4e}..{hmax:.4e}",
            self.degree,
            self.nx(),
            self.ny(),
            self.n_nodes()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mesh(ex: usize, ey: usize, k: usize) -> Mesh2D {
        let re = ReferenceElement::new(k).unwrap();
        build_mesh(
            &uniform_edges(ex, 0.0, 1.0).unwrap(),
            &uniform_edges(ey, 0.0, 1.0).unwrap(),
            &re,
        )
        .unwrap()
    }

    #[test]
    fn uniform_edges_examples() {
        assert_eq!(uniform_edges(2, 0.0, 1.0).unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(uniform_edges(1, 0.0, 1.0).unwrap(), vec![0.0, 1.0]);
        assert!(uniform_edges(2, 1.0, 1.0).is_err());
        assert!(uniform_edges(0, 0.0, 1.0).is_err());
    }

    #[test]
    fn linear_elements_give_coarse_mms_grid() {
        assert_eq!(mesh(12, 12, 1).nx(), 13);
    }

    #[test]
    fn cosine_edges_examples() {
        assert_eq!(cosine_stretched_edges(3).unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(cosine_stretched_edges(2).unwrap(), vec![0.0, 1.0]);
        assert!(cosine_stretched_edges(1).is_err());
        let e = cosine_stretched_edges(26).unwrap();
        for i in 0..e.len() {
            assert!((e[i] + e[e.len() - 1 - i] - 1.0).abs() < 1e-14);
            let direct = 0.5 * (1.0 - (PI * i as f64 / 25.0).cos());
            assert!((e[i] - direct).abs() < 1e-15);
        }
    }

    #[test]
    fn benchmark_node_counts() {
        let re = ReferenceElement::new(4).unwrap();
        let cavity = build_mesh(
            &cosine_stretched_edges(26).unwrap(),
            &cosine_stretched_edges(26).unwrap(),
            &re,
        )
        .unwrap();
        assert_eq!((cavity.nx(), cavity.ny()), (101, 101));
        let bfs = build_mesh(
            &uniform_edges(100, 0.0, 30.0).unwrap(),
            &uniform_edges(14, 0.0, 1.0).unwrap(),
            &re,
        )
        .unwrap();
        assert_eq!((bfs.nx(), bfs.ny(), bfs.n_nodes()), (401, 57, 22857));
    }

    #[test]
    fn single_linear_element() {
        let m = mesh(1, 1, 1);
        assert_eq!(m.x_nodes, vec![0.0, 1.0]);
        assert_eq!(m.y_nodes, vec![0.0, 1.0]);
        assert_eq!(m.coords(1), (0.0, 1.0));
        assert_eq!(m.coords(2), (1.0, 0.0));
    }

    #[test]
    fn bad_edges_rejected() {
        let re = ReferenceElement::new(2).unwrap();
        assert!(build_mesh(&[0.0, 1.0, 0.5], &[0.0, 1.0], &re).is_err());
        assert!(build_mesh(&[0.0], &[0.0, 1.0], &re).is_err());
    }

    proptest! {
        #[test]
        fn node_layout_invariants(k in 1usize..=5, n_el in 1usize..12, stretched: bool) {
            let re = ReferenceElement::new(k).unwrap();
            let edges = if stretched {
                cosine_stretched_edges_on(n_el, -0.5, 2.0).unwrap()
            } else {
                uniform_edges(n_el, -0.5, 2.0).unwrap()
            };
            let nodes = global_nodes(&re, &edges);
            prop_assert_eq!(nodes.len(), n_el * k + 1);
            prop_assert!(nodes.windows(2).all(|w| w[1] > w[0]));
            prop_assert_eq!(nodes[0], -0.5);
            prop_assert_eq!(*nodes.last().unwrap(), 2.0);
            for (e, w) in edges.windows(2).enumerate() {
                // Element e owns nodes e*k ..= (e+1)*k; its ends are the edges.
                prop_assert_eq!(nodes[e * k], w[0]);
                prop_assert_eq!(nodes[(e + 1) * k], w[1]);
                for a in 1..k {
                    let x = nodes[e * k + a];
                    prop_assert!(x > w[0] && x < w[1]);
                }
            }
        }
    }
}
