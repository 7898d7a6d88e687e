//! Manufactured-solution verification.
//!
//! With `a = 3 pi x - 0.4 t` and `b = 3 pi y - 0.4 t`:
//!
//! ```text
//! u = 1 + 0.1 sin(a) sin(b)
//! v = 1 + 0.1 cos(a) cos(b)
//! p = cos(a) cos(b)
//! ```
//!
//! The velocity is divergence free; the forcing is the strong residual of
//! the momentum equations at this field, evaluated in closed form.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;

use crate::basis::ReferenceElement;
use crate::boundary::{BoundaryData, BoundaryKind, BoundarySegmentSpec};
use crate::error::{Error, Result};
use crate::mesh::{build_mesh, uniform_edges};
use crate::sbp::Segment;
use crate::state::StateVector;
use crate::system::BlockSystem;
use crate::time::{march, MarchConfig, NewtonSettings};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MmsField {
    pub amplitude: f64,
    pub wavenumber: f64,
    pub phase_speed: f64,
    pub epsilon: f64,
}

impl Default for MmsField {
    fn default() -> Self {
        Self {
            amplitude: 0.1,
            wavenumber: 3.0 * PI,
            phase_speed: 0.4,
            epsilon: 0.1,
        }
    }
}

/// Field values and first derivatives at one point.
#[derive(Debug, Clone, Copy)]
struct Jet {
    u: f64,
    v: f64,
    p: f64,
    ut: f64,
    ux: f64,
    uy: f64,
    vt: f64,
    vx: f64,
    vy: f64,
    px: f64,
    py: f64,
    lap_u: f64,
    lap_v: f64,
}

impl MmsField {
    fn jet(&self, x: f64, y: f64, t: f64) -> Jet {
        let (amp, k, c) = (self.amplitude, self.wavenumber, self.phase_speed);
        let a = k * x - c * t;
        let b = k * y - c * t;
        let (sa, ca) = a.sin_cos();
        let (sb, cb) = b.sin_cos();
        let sab = (a + b).sin();
        Jet {
            u: 1.0 + amp * sa * sb,
            v: 1.0 + amp * ca * cb,
            p: ca * cb,
            ut: -amp * c * sab,
            ux: amp * k * ca * sb,
            uy: amp * k * sa * cb,
            vt: amp * c * sab,
            vx: -amp * k * sa * cb,
            vy: -amp * k * ca * sb,
            px: -k * sa * cb,
            py: -k * ca * sb,
            lap_u: -2.0 * k * k * amp * sa * sb,
            lap_v: -2.0 * k * k * amp * ca * cb,
        }
    }

    pub fn eval(&self, x: f64, y: f64, t: f64) -> (f64, f64, f64) {
        let j = self.jet(x, y, t);
        (j.u, j.v, j.p)
    }

    /// `∂u/∂x + ∂v/∂y`, identically zero.
    pub fn divergence(&self, x: f64, y: f64, t: f64) -> f64 {
        let j = self.jet(x, y, t);
        j.ux + j.vy
    }

    /// `(f_u, f_v, f_p)` making the field an exact solution.
    pub fn forcing(&self, x: f64, y: f64, t: f64) -> (f64, f64, f64) {
        let j = self.jet(x, y, t);
        let eps = self.epsilon;
        (
            j.ut + j.u * j.ux + j.v * j.uy + j.px - eps * j.lap_u,
            j.vt + j.u * j.vx + j.v * j.vy + j.py - eps * j.lap_v,
            j.ux + j.vy,
        )
    }
}

/// `(0.1, 3 pi, 0.4)` field at `(x, y, t)`.
pub fn mms_eval(x: f64, y: f64, t: f64) -> (f64, f64, f64) {
    MmsField::default().eval(x, y, t)
}

pub fn mms_forcing(x: f64, y: f64, t: f64, epsilon: f64) -> (f64, f64, f64) {
    MmsField {
        epsilon,
        ..MmsField::default()
    }
    .forcing(x, y, t)
}

/// Per-field `P`-norm errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldErrors {
    pub u: f64,
    pub v: f64,
    /// Pressure error after removing the weighted mean of the difference.
    pub p: f64,
}

pub fn p_norm_error(mass: &[f64], numeric: &StateVector, exact: &StateVector) -> Result<FieldErrors> {
    if numeric.len() != exact.len() {
        return Err(Error::DimensionMismatch {
            expected: exact.len(),
            actual: numeric.len(),
        });
    }
    if numeric.n_nodes() != mass.len() {
        return Err(Error::DimensionMismatch {
            expected: mass.len(),
            actual: numeric.n_nodes(),
        });
    }
    let err = |a: &[f64], b: &[f64], shift: f64| -> f64 {
        a.iter()
            .zip(b)
            .zip(mass)
            .map(|((x, y), m)| m * (x - y - shift).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    let area: f64 = mass.iter().sum();
    let p_shift = numeric
        .p()
        .iter()
        .zip(exact.p())
        .zip(mass)
        .map(|((x, y), m)| m * (x - y))
        .sum::<f64>()
        / area;
    Ok(FieldErrors {
        u: err(numeric.u(), exact.u(), 0.0),
        v: err(numeric.v(), exact.v(), 0.0),
        p: err(numeric.p(), exact.p(), p_shift),
    })
}

/// `(log E2 - log E1) / (log N1 - log N2)`.
pub fn convergence_order(e1: f64, n1: f64, e2: f64, n2: f64) -> Result<f64> {
    if !(e1 > 0.0 && e2 > 0.0 && n1 > 0.0 && n2 > 0.0) {
        return Err(Error::invalid("convergence order needs positive errors and node counts"));
    }
    if n1 == n2 {
        return Err(Error::invalid("convergence order needs two different node counts"));
    }
    Ok((e2.log10() - e1.log10()) / (n1.log10() - n2.log10()))
}

/// Unit-square system with exact Dirichlet data on every side and the
/// manufactured forcing.
pub fn mms_system(field: MmsField, degree: usize, n_el: usize) -> Result<BlockSystem> {
    let re = ReferenceElement::new(degree)?;
    let edges = uniform_edges(n_el, 0.0, 1.0)?;
    let mesh = build_mesh(&edges, &edges, &re)?;
    let ops = mesh.operators()?;
    let data = BoundaryData::function(move |x, y, t| {
        let (u, v, _) = field.eval(x, y, t);
        (u, v)
    });
    let segments = Segment::ALL
        .iter()
        .map(|&s| BoundarySegmentSpec::new(&mesh, &ops, s, BoundaryKind::DirichletVelocity, data.clone()))
        .collect();
    let sys = BlockSystem::new(mesh, ops, field.epsilon, segments)?;
    Ok(sys.with_forcing(Arc::new(move |x, y, t| {
        let (a, b, c) = field.forcing(x, y, t);
        [a, b, c]
    })))
}

/// Exact field sampled at the nodes of `sys`.
pub fn exact_state(sys: &BlockSystem, field: &MmsField, t: f64) -> StateVector {
    let n = sys.n_nodes();
    let mut w = StateVector::zeros(n);
    let (u, v, p) = w.fields_mut();
    for (g, &(x, y)) in sys.coords().iter().enumerate() {
        (u[g], v[g], p[g]) = field.eval(x, y, t);
    }
    w
}

/// Elements per direction giving `nodes` grid points at degree `k`.
pub fn elements_for_nodes(degree: usize, nodes: usize) -> Result<usize> {
    if degree == 0 || nodes < 2 || (nodes - 1) % degree != 0 {
        return Err(Error::invalid(format!(
            "{nodes} nodes per direction cannot be built from degree-{degree} elements"
        )));
    }
    Ok((nodes - 1) / degree)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MmsRunSettings {
    pub dt: f64,
    pub end_time: f64,
    pub newton: NewtonSettings,
}

impl Default for MmsRunSettings {
    fn default() -> Self {
        Self {
            dt: 6.4e-5,
            end_time: 0.1,
            newton: NewtonSettings::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MmsRun {
    pub degree: usize,
    pub nodes: usize,
    pub elements: usize,
    /// Time actually reached (a whole number of steps).
    pub time: f64,
    pub steps: usize,
    pub errors: FieldErrors,
    pub state: StateVector,
}

/// Marches the manufactured solution from its exact initial state.
pub fn run_mms(field: MmsField, degree: usize, nodes: usize, settings: &MmsRunSettings) -> Result<MmsRun> {
    let elements = elements_for_nodes(degree, nodes)?;
    let sys = mms_system(field, degree, elements)?;
    let config = MarchConfig {
        dt: settings.dt,
        t0: 0.0,
        end_time: Some(settings.end_time),
        steady_tol: None,
        newton: settings.newton,
        log_every: 0,
        ..MarchConfig::default()
    };
    let out = march(&sys, &config, exact_state(&sys, &field, 0.0))?;
    let exact = exact_state(&sys, &field, out.time);
    let errors = p_norm_error(sys.mass(), &out.state, &exact)?;
    log::info!(
        "mms k={degree} N={nodes}: t={:.6} steps={} E_u={:.4e} E_v={:.4e} E_p={:.4e}",
        out.time,
        out.steps,
        errors.u,
        errors.v,
        errors.p
    );
    Ok(MmsRun {
        degree,
        nodes,
        elements,
        time: out.time,
        steps: out.steps,
        errors,
        state: out.state,
    })
}

/// One line of a convergence table; orders are relative to the previous
/// (coarser) row of the same degree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub degree: usize,
    pub nodes: usize,
    pub error_u: f64,
    pub error_v: f64,
    pub order_u: Option<f64>,
    pub order_v: Option<f64>,
}

/// Runs every `(degree, nodes)` pair in parallel and tabulates orders.
pub fn convergence_sweep(
    field: MmsField,
    degrees: &[usize],
    node_counts: &[usize],
    settings: &MmsRunSettings,
) -> Result<Vec<ConvergenceRow>> {
    let jobs: Vec<(usize, usize)> = degrees
        .iter()
        .flat_map(|&k| node_counts.iter().map(move |&n| (k, n)))
        .collect();
    for &(k, n) in &jobs {
        elements_for_nodes(k, n)?;
    }
    let runs = jobs
        .par_iter()
        .map(|&(k, n)| run_mms(field, k, n, settings))
        .collect::<Result<Vec<_>>>()?;
    convergence_table(&runs)
}

pub fn convergence_table(runs: &[MmsRun]) -> Result<Vec<ConvergenceRow>> {
    let mut sorted: Vec<&MmsRun> = runs.iter().collect();
    sorted.sort_by_key(|r| (r.degree, r.nodes));
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(runs.len());
    for (i, r) in sorted.iter().enumerate() {
        let prev = (i > 0 && sorted[i - 1].degree == r.degree).then(|| sorted[i - 1]);
        let order = |e1: f64, e2: f64, p: &MmsRun| convergence_order(e1, p.nodes as f64, e2, r.nodes as f64);
        let (order_u, order_v) = match prev {
            Some(p) => (Some(order(p.errors.u, r.errors.u, p)?), Some(order(p.errors.v, r.errors.v, p)?)),
            None => (None, None),
        };
        rows.push(ConvergenceRow {
            degree: r.degree,
            nodes: r.nodes,
            error_u: r.errors.u,
            error_v: r.errors.v,
            order_u,
            order_v,
        });
    }
    Ok(rows)
}

/// CSV with header `degree,nodes,error_u,error_v,order_u,order_v`.
pub fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    let mut out = String::from("degree,nodes,error_u,error_v,order_u,order_v\n");
    let fmt = |o: Option<f64>| o.map_or(String::new(), |v| format!("{v:.2}"));
    for r in rows {
        out.push_str(&format!(
            "{},{},{:.3e},{:.3e},{},{}\n",
            r.degree,
            r.nodes,
            r.error_u,
            r.error_v,
            fmt(r.order_u),
            fmt(r.order_v)
        ));
    }
    out
}
