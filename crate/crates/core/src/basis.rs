//! Gauss-Lobatto quadrature and the Lagrange basis collocated at its nodes,
//! all on the reference interval [-1, 1].

use crate::error::{Error, Result};

pub const MIN_DEGREE: usize = 1;
/// Degrees above 4 are supported but only exercised by the unit tests.
pub const MAX_DEGREE: usize = 8;

const NEWTON_TOL: f64 = 1e-14;
const NEWTON_MAX_ITERS: usize = 100;

/// Nodes, weights and nodal differentiation matrix of a degree-`k` element.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceElement {
    pub degree: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// `diff_matrix[i][j]` is the derivative of the j-th Lagrange polynomial at node i.
    pub diff_matrix: Vec<Vec<f64>>,
}

impl ReferenceElement {
    pub fn new(degree: usize) -> Result<Self> {
        let (nodes, weights) = gl_nodes_weights(degree)?;
        let diff_matrix = lagrange_diff_matrix(&nodes)?;
        Ok(Self {
            degree,
            nodes,
            weights,
            diff_matrix,
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.degree + 1
    }

    /// Value of the j-th cardinal basis function at `xi`.
    pub fn eval(&self, j: usize, xi: f64) -> Result<f64> {
        lagrange_eval(&self.nodes, j, xi)
    }
}

/// Legendre polynomial `P_n(x)` and its first derivative.
pub fn legendre(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p_prev, mut p) = (1.0, x);
    let (mut dp_prev, mut dp) = (0.0, 1.0);
    for m in 1..n {
        let mf = m as f64;
        let p_next = ((2.0 * mf + 1.0) * x * p - mf * p_prev) / (mf + 1.0);
        // P'_{m+1} = P'_{m-1} + (2m+1) P_m
        let dp_next = dp_prev + (2.0 * mf + 1.0) * p;
        p_prev = p;
        p = p_next;
        dp_prev = dp;
        dp = dp_next;
    }
    (p, dp)
}

/// Gauss-Lobatto nodes and weights with `k + 1` points on [-1, 1].
///
/// Interior nodes are the roots of `P_k'`, found by Newton iteration started
/// from the Chebyshev-Gauss-Lobatto points. Weights are `2 / (k(k+1) P_k(x)^2)`.
pub fn gl_nodes_weights(k: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(MIN_DEGREE..=MAX_DEGREE).contains(&k) {
        return Err(Error::UnsupportedDegree(k));
    }
    let kf = k as f64;
    let mut nodes = vec![0.0; k + 1];
    nodes[0] = -1.0;
    nodes[k] = 1.0;
    for (j, node) in nodes.iter_mut().enumerate().take(k).skip(1) {
        let mut x = -(std::f64::consts::PI * j as f64 / kf).cos();
        for _ in 0..NEWTON_MAX_ITERS {
            let (p, dp) = legendre(k, x);
            // Legendre ODE gives P'' without another recurrence.
            let ddp = (2.0 * x * dp - kf * (kf + 1.0) * p) / (1.0 - x * x);
            let step = dp / ddp;
            x -= step;
            if step.abs() < NEWTON_TOL {
                break;
            }
        }
        *node = x;
    }
    // Symmetrize to remove rounding asymmetry between mirrored roots.
    for j in 0..=k / 2 {
        let avg = 0.5 * (nodes[k - j] - nodes[j]);
        nodes[j] = -avg;
        nodes[k - j] = avg;
    }
    if k % 2 == 0 {
        nodes[k / 2] = 0.0;
    }
    let weights = nodes
        .iter()
        .map(|&x| {
            let (p, _) = legendre(k, x);
            2.0 / (kf * (kf + 1.0) * p * p)
        })
        .collect();
    Ok((nodes, weights))
}

fn barycentric_weights(nodes: &[f64]) -> Vec<f64> {
    nodes
        .iter()
        .enumerate()
        .map(|(j, &xj)| {
            let prod: f64 = nodes
                .iter()
                .enumerate()
                .filter(|&(m, _)| m != j)
                .map(|(_, &xm)| xj - xm)
                .product();
            1.0 / prod
        })
        .collect()
}

fn check_strictly_increasing(nodes: &[f64]) -> Result<()> {
    if nodes.len() < 2 {
        return Err(Error::invalid("at least two interpolation nodes are required"));
    }
    if let Some(w) = nodes.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::invalid(format!(
            "interpolation nodes must be strictly increasing and distinct (found {} then {})",
            w[0], w[1]
        )));
    }
    Ok(())
}

/// Nodal differentiation matrix of the Lagrange basis through `nodes`.
///
/// Off-diagonal entries use the barycentric form; each diagonal entry is the
/// negative row sum so that constants are differentiated to exactly zero.
pub fn lagrange_diff_matrix(nodes: &[f64]) -> Result<Vec<Vec<f64>>> {
    check_strictly_increasing(nodes)?;
    let lambda = barycentric_weights(nodes);
    let n = nodes.len();
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        let mut row_sum = 0.0;
        for j in 0..n {
            if i != j {
                let v = lambda[j] / lambda[i] / (nodes[i] - nodes[j]);
                d[i][j] = v;
                row_sum += v;
            }
        }
        d[i][i] = -row_sum;
    }
    Ok(d)
}

/// Value of the j-th Lagrange polynomial through `nodes` at `xi`.
///
/// Evaluation is restricted to the node interval; there is no extrapolation.
pub fn lagrange_eval(nodes: &[f64], j: usize, xi: f64) -> Result<f64> {
    check_strictly_increasing(nodes)?;
    if j >= nodes.len() {
        return Err(Error::invalid(format!(
            "basis index {j} out of range for {} nodes",
            nodes.len()
        )));
    }
    let (lo, hi) = (nodes[0], nodes[nodes.len() - 1]);
    if !(lo..=hi).contains(&xi) {
        return Err(Error::invalid(format!(
            "evaluation point {xi} outside [{lo}, {hi}]"
        )));
    }
    if let Some(i) = nodes.iter().position(|&x| (x - xi).abs() <= 8.0 * f64::EPSILON) {
        return Ok(if i == j { 1.0 } else { 0.0 });
    }
    let lambda = barycentric_weights(nodes);
    let denom: f64 = lambda
        .iter()
        .zip(nodes)
        .map(|(&l, &x)| l / (xi - x))
        .sum();
    Ok(lambda[j] / (xi - nodes[j]) / denom)
}

/// All basis values at `xi` in one pass.
pub(crate) fn lagrange_eval_all(nodes: &[f64], xi: f64) -> Vec<f64> {
    if let Some(i) = nodes.iter().position(|&x| (x - xi).abs() <= 8.0 * f64::EPSILON) {
        let mut out = vec![0.0; nodes.len()];
        out[i] = 1.0;
        return out;
    }
    let lambda = barycentric_weights(nodes);
    let terms: Vec<f64> = lambda
        .iter()
        .zip(nodes)
        .map(|(&l, &x)| l / (xi - x))
        .collect();
    let denom: f64 = terms.iter().sum();
    terms.into_iter().map(|t| t / denom).collect()
}
