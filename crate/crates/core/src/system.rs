//! The semi-discrete three-field system `I~ dW/dt + D(W) W = SAT + F`.
//!
//! `D(W) = ½(A Dx + Dx A + B Dy + Dy B) - eps I~ (Dxx + Dyy)` where `A` and
//! `B` carry `diag(u)`, `diag(v)` velocity blocks and identity couplings to
//! the pressure. The residual is `D(W) W - SAT(W, t) - F(t)`.
//!
//! Dirichlet penalties use `P^-1 R^T (S1 + eps S2) (I_3 ⊗ P^l)(H W - G)`.
//! With a constant unit normal `n` the rotation `R` is orthogonal, so the
//! velocity rows collapse to Cartesian form:
//!
//! ```text
//! SAT_u = P^-1 [ ½ U_n P^l (u - g_u) - eps D_n^T P^l (u - g_u) ]
//! SAT_v = P^-1 [ ½ U_n P^l (v - g_v) - eps D_n^T P^l (v - g_v) ]
//! SAT_p = P^-1 P^l (U_n - g_n)
//! ```

use std::sync::Arc;

use sprs::TriMat;

use crate::boundary::{BoundaryKind, BoundarySegmentSpec};
use crate::error::{Error, Result};
use crate::mesh::Mesh2D;
use crate::sbp::{Operators2D, Segment};
use crate::sparse::{self, SparseMatrix};
use crate::state::{field_norm_sq, StateVector};

/// Volume forcing `(x, y, t) -> [f_u, f_v, f_p]`.
pub type ForcingFn = Arc<dyn Fn(f64, f64, f64) -> [f64; 3] + Send + Sync>;

#[derive(Clone)]
pub struct BlockSystem {
    pub mesh: Mesh2D,
    pub ops: Operators2D,
    pub epsilon: f64,
    pub segments: Vec<BoundarySegmentSpec>,
    forcing: Option<ForcingFn>,
    laplacian: SparseMatrix,
    inv_mass: Vec<f64>,
    coords: Vec<(f64, f64)>,
}

impl std::fmt::Debug for BlockSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BlockSystem")
            .field("mesh", &format_args!("{}", self.mesh))
            .field("epsilon", &self.epsilon)
            .field("segments", &self.segments)
            .field("forced", &self.forcing.is_some())
            .finish()
    }
}

impl BlockSystem {
    /// Builds the system; every side of the rectangle needs exactly one
    /// condition.
    pub fn new(mesh: Mesh2D, ops: Operators2D, epsilon: f64, segments: Vec<BoundarySegmentSpec>) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::invalid(format!("epsilon must be positive, got {epsilon}")));
        }
        for s in Segment::ALL {
            let count = segments.iter().filter(|b| b.segment == s).count();
            if count != 1 {
                return Err(Error::invalid(format!(
                    "{} boundary has {count} conditions, expected exactly one",
                    s.name()
                )));
            }
        }
        if ops.n_nodes() != mesh.n_nodes() {
            return Err(Error::DimensionMismatch {
                expected: mesh.n_nodes(),
                actual: ops.n_nodes(),
            });
        }
        let laplacian = &ops.dxx + &ops.dyy;
        let inv_mass = ops.mass.iter().map(|m| 1.0 / m).collect();
        let coords = (0..mesh.n_nodes()).map(|g| mesh.coords(g)).collect();
        Ok(Self {
            mesh,
            ops,
            epsilon,
            segments,
            forcing: None,
            laplacian,
            inv_mass,
            coords,
        })
    }

    pub fn with_forcing(mut self, forcing: ForcingFn) -> Self {
        self.forcing = Some(forcing);
        self
    }

    pub fn n_nodes(&self) -> usize {
        self.ops.n_nodes()
    }

    pub fn n_unknowns(&self) -> usize {
        3 * self.n_nodes()
    }

    pub fn mass(&self) -> &[f64] {
        &self.ops.mass
    }

    /// Pressure is determined only up to a constant unless some segment
    /// involves it.
    pub fn pressure_is_floating(&self) -> bool {
        self.segments.iter().all(|s| s.kind == BoundaryKind::DirichletVelocity)
    }

    /// `I~ W`: zeroes the pressure block.
    pub fn itilde(&self, w: &StateVector) -> StateVector {
        let mut out = w.clone();
        out.fields_mut().2.fill(0.0);
        out
    }

    /// `D(W) W`.
    pub fn apply_spatial_operator(&self, w: &StateVector) -> StateVector {
        let n = self.n_nodes();
        let (u, v, p) = w.fields();
        let (dx, dy) = (&self.ops.dx, &self.ops.dy);
        let ux = sparse::matvec(dx, u);
        let uy = sparse::matvec(dy, u);
        let vx = sparse::matvec(dx, v);
        let vy = sparse::matvec(dy, v);
        let uu: Vec<f64> = u.iter().map(|a| a * a).collect();
        let uv: Vec<f64> = u.iter().zip(v).map(|(a, b)| a * b).collect();
        let vv: Vec<f64> = v.iter().map(|a| a * a).collect();

        let mut out = StateVector::zeros(n);
        let (ru, rv, rp) = out.fields_mut();
        for i in 0..n {
            ru[i] = 0.5 * (u[i] * ux[i] + v[i] * uy[i]);
            rv[i] = 0.5 * (u[i] * vx[i] + v[i] * vy[i]);
            rp[i] = ux[i] + vy[i];
        }
        sparse::matvec_acc(dx, &uu, 0.5, ru);
        sparse::matvec_acc(dy, &uv, 0.5, ru);
        sparse::matvec_acc(dx, p, 1.0, ru);
        sparse::matvec_acc(&self.laplacian, u, -self.epsilon, ru);
        sparse::matvec_acc(dx, &uv, 0.5, rv);
        sparse::matvec_acc(dy, &vv, 0.5, rv);
        sparse::matvec_acc(dy, p, 1.0, rv);
        sparse::matvec_acc(&self.laplacian, v, -self.epsilon, rv);
        out
    }

    /// Advective part `½(A Dx + Dx A + B Dy + Dy B) W` alone, without the
    /// pressure couplings.
    pub fn advection(&self, w: &StateVector) -> StateVector {
        let n = self.n_nodes();
        let zero_p = StateVector::from_fields(w.u(), w.v(), &vec![0.0; n]).expect("equal lengths");
        let mut out = self.apply_spatial_operator(&zero_p);
        let (ru, rv, rp) = out.fields_mut();
        sparse::matvec_acc(&self.laplacian, w.u(), self.epsilon, ru);
        sparse::matvec_acc(&self.laplacian, w.v(), self.epsilon, rv);
        rp.fill(0.0);
        out
    }

    /// Penalty contribution of one segment.
    pub fn segment_sat(&self, spec: &BoundarySegmentSpec, w: &StateVector, t: f64) -> StateVector {
        let mut out = StateVector::zeros(self.n_nodes());
        self.add_segment_sat(spec, w, t, &mut out);
        out
    }

    fn add_segment_sat(&self, spec: &BoundarySegmentSpec, w: &StateVector, t: f64, out: &mut StateVector) {
        let (u, v, p) = w.fields();
        let (su, sv, sp) = out.fields_mut();
        let (nx, ny) = spec.normal;
        let dmat = self.ops.normal_derivative(spec.segment);
        let sign = Operators2D::normal_sign(spec.segment);
        let eps = self.epsilon;
        let data = spec.data_at(t);
        let nodes = &spec.restriction.nodes;
        let weights = &spec.restriction.weights;
        match spec.kind {
            BoundaryKind::DirichletVelocity => {
                for ((&g, &wl), &(gu, gv)) in nodes.iter().zip(weights).zip(&data) {
                    let un = nx * u[g] + ny * v[g];
                    let (eu, ev) = (u[g] - gu, v[g] - gv);
                    let gn = nx * gu + ny * gv;
                    su[g] += self.inv_mass[g] * 0.5 * un * wl * eu;
                    sv[g] += self.inv_mass[g] * 0.5 * un * wl * ev;
                    sp[g] += self.inv_mass[g] * wl * (un - gn);
                    // -eps P^-1 D_n^T P^l e: row g of D_n scattered to its columns.
                    let scale = -eps * sign * wl;
                    for (c, &d) in dmat.outer_view(g).expect("row in range").iter() {
                        su[c] += self.inv_mass[c] * scale * d * eu;
                        sv[c] += self.inv_mass[c] * scale * d * ev;
                    }
                }
            }
            BoundaryKind::OutflowNatural => {
                for ((&g, &wl), &(tx, ty)) in nodes.iter().zip(weights).zip(&data) {
                    let row = dmat.outer_view(g).expect("row in range");
                    let (mut dnu, mut dnv) = (0.0, 0.0);
                    for (c, &d) in row.iter() {
                        dnu += d * u[c];
                        dnv += d * v[c];
                    }
                    dnu *= sign;
                    dnv *= sign;
                    su[g] += self.inv_mass[g] * wl * (nx * p[g] - eps * dnu - tx);
                    sv[g] += self.inv_mass[g] * wl * (ny * p[g] - eps * dnv - ty);
                }
            }
        }
    }

    /// Sum of all segment penalties.
    pub fn sat(&self, w: &StateVector, t: f64) -> StateVector {
        let mut out = StateVector::zeros(self.n_nodes());
        for spec in &self.segments {
            self.add_segment_sat(spec, w, t, &mut out);
        }
        out
    }

    /// Nodal forcing `F(t)`, zero when the system is unforced.
    pub fn forcing(&self, t: f64) -> StateVector {
        let n = self.n_nodes();
        let mut out = StateVector::zeros(n);
        if let Some(f) = &self.forcing {
            let (fu, fv, fp) = out.fields_mut();
            for (g, &(x, y)) in self.coords.iter().enumerate() {
                let [a, b, c] = f(x, y, t);
                fu[g] = a;
                fv[g] = b;
                fp[g] = c;
            }
        }
        out
    }

    /// Spatial residual `D(W) W - SAT(W, t) - F(t)`.
    pub fn residual(&self, w: &StateVector, t: f64) -> StateVector {
        let mut r = self.apply_spatial_operator(w);
        let sat = self.sat(w, t);
        r.axpy(-1.0, &sat);
        if self.forcing.is_some() {
            r.axpy(-1.0, &self.forcing(t));
        }
        r
    }

    /// Exact Jacobian of `bdf_scale I~ W + residual(W, t)` in CSR form.
    pub fn jacobian(&self, w: &StateVector, t: f64, bdf_scale: f64) -> SparseMatrix {
        let n3 = self.n_unknowns();
        let mut tri = TriMat::new((n3, n3));
        self.jacobian_triplets(w, t, bdf_scale, &mut tri);
        tri.to_csr()
    }

    /// Pushes the Jacobian entries into `tri` (duplicates are summed on
    /// conversion). The pattern depends only on the mesh and segments, never
    /// on the state, so symbolic factorizations can be reused.
    pub fn jacobian_triplets(&self, w: &StateVector, t: f64, bdf_scale: f64, tri: &mut TriMat<f64>) {
        let n = self.n_nodes();
        let (u, v, _) = w.fields();
        let (dx, dy) = (&self.ops.dx, &self.ops.dy);
        let eps = self.epsilon;
        let ux = sparse::matvec(dx, u);
        let uy = sparse::matvec(dy, u);
        let vx = sparse::matvec(dx, v);
        let vy = sparse::matvec(dy, v);
        let (bu, bv, bp) = (0, n, 2 * n);

        // d r_u / d u
        push_diag(tri, bu, bu, n, |i| 0.5 * ux[i] + bdf_scale);
        push_scaled(tri, dx, bu, bu, 0.5, Some(u), None);
        push_scaled(tri, dx, bu, bu, 1.0, None, Some(u));
        push_scaled(tri, dy, bu, bu, 0.5, Some(v), None);
        push_scaled(tri, dy, bu, bu, 0.5, None, Some(v));
        push_scaled(tri, &self.laplacian, bu, bu, -eps, None, None);
        // d r_u / d v
        push_diag(tri, bu, bv, n, |i| 0.5 * uy[i]);
        push_scaled(tri, dy, bu, bv, 0.5, None, Some(u));
        // d r_u / d p
        push_scaled(tri, dx, bu, bp, 1.0, None, None);
        // d r_v / d u
        push_diag(tri, bv, bu, n, |i| 0.5 * vx[i]);
        push_scaled(tri, dx, bv, bu, 0.5, None, Some(v));
        // d r_v / d v
        push_diag(tri, bv, bv, n, |i| 0.5 * vy[i] + bdf_scale);
        push_scaled(tri, dx, bv, bv, 0.5, Some(u), None);
        push_scaled(tri, dx, bv, bv, 0.5, None, Some(u));
        push_scaled(tri, dy, bv, bv, 0.5, Some(v), None);
        push_scaled(tri, dy, bv, bv, 1.0, None, Some(v));
        push_scaled(tri, &self.laplacian, bv, bv, -eps, None, None);
        // d r_v / d p
        push_scaled(tri, dy, bv, bp, 1.0, None, None);
        // d r_p / d (u, v)
        push_scaled(tri, dx, bp, bu, 1.0, None, None);
        push_scaled(tri, dy, bp, bv, 1.0, None, None);

        for spec in &self.segments {
            self.sat_jacobian_triplets(spec, w, t, tri);
        }
    }

    /// Entries of `-dSAT/dW` for one segment.
    fn sat_jacobian_triplets(&self, spec: &BoundarySegmentSpec, w: &StateVector, t: f64, tri: &mut TriMat<f64>) {
        let n = self.n_nodes();
        let (u, v, _) = w.fields();
        let (bu, bv, bp) = (0, n, 2 * n);
        let (nx, ny) = spec.normal;
        let dmat = self.ops.normal_derivative(spec.segment);
        let sign = Operators2D::normal_sign(spec.segment);
        let eps = self.epsilon;
        let nodes = &spec.restriction.nodes;
        let weights = &spec.restriction.weights;
        match spec.kind {
            BoundaryKind::DirichletVelocity => {
                let data = spec.data_at(t);
                for ((&g, &wl), &(gu, gv)) in nodes.iter().zip(weights).zip(&data) {
                    let s = self.inv_mass[g] * wl;
                    let un = nx * u[g] + ny * v[g];
                    let (eu, ev) = (u[g] - gu, v[g] - gv);
                    tri.add_triplet(bu + g, bu + g, -0.5 * s * (un + nx * eu));
                    tri.add_triplet(bu + g, bv + g, -0.5 * s * ny * eu);
                    tri.add_triplet(bv + g, bu + g, -0.5 * s * nx * ev);
                    tri.add_triplet(bv + g, bv + g, -0.5 * s * (un + ny * ev));
                    tri.add_triplet(bp + g, bu + g, -s * nx);
                    tri.add_triplet(bp + g, bv + g, -s * ny);
                    let scale = eps * sign * wl;
                    for (c, &d) in dmat.outer_view(g).expect("row in range").iter() {
                        let val = self.inv_mass[c] * scale * d;
                        tri.add_triplet(bu + c, bu + g, val);
                        tri.add_triplet(bv + c, bv + g, val);
                    }
                }
            }
            BoundaryKind::OutflowNatural => {
                for (&g, &wl) in nodes.iter().zip(weights) {
                    let s = self.inv_mass[g] * wl;
                    tri.add_triplet(bu + g, bp + g, -s * nx);
                    tri.add_triplet(bv + g, bp + g, -s * ny);
                    for (c, &d) in dmat.outer_view(g).expect("row in range").iter() {
                        let val = s * eps * sign * d;
                        tri.add_triplet(bu + g, bu + c, val);
                        tri.add_triplet(bv + g, bv + c, val);
                    }
                }
            }
        }
    }

    /// `W^T I~ P W`.
    pub fn discrete_energy(&self, w: &StateVector) -> f64 {
        field_norm_sq(self.mass(), w.u()) + field_norm_sq(self.mass(), w.v())
    }

    /// `2 eps sum_f f^T K f` over both velocity components, where
    /// `K = (B Dx - Qxx) ⊗ Py + Px ⊗ (B Dy - Qyy)` is the stiffness of the
    /// second-derivative form in use (`|Dx f|^2 + |Dy f|^2` for the global
    /// form).
    pub fn dissipation(&self, w: &StateVector) -> f64 {
        let m = self.mass();
        let mut total = 0.0;
        for f in [w.u(), w.v()] {
            let lf = sparse::matvec(&self.laplacian, f);
            total -= f.iter().zip(&lf).zip(m).map(|((a, b), p)| a * p * b).sum::<f64>();
            for seg in Segment::ALL {
                let r = self.ops.restriction(seg);
                let dmat = self.ops.normal_derivative(seg);
                let sign = Operators2D::normal_sign(seg);
                for (&g, &wl) in r.nodes.iter().zip(&r.weights) {
                    let dn: f64 = dmat.outer_view(g).expect("row in range").iter().map(|(c, &d)| d * f[c]).sum();
                    total += wl * f[g] * sign * dn;
                }
            }
        }
        2.0 * self.epsilon * total
    }

    /// Boundary term produced by the SBP identities in the energy rate:
    /// `-sum_l [U_n P^l (U_n^2 + U_t^2 + 2p)] + 2 eps sum_l [U_n P^l D_n U_n + U_t P^l D_n U_t]`.
    pub fn boundary_term(&self, w: &StateVector) -> f64 {
        let (u, v, p) = w.fields();
        let mut total = 0.0;
        for spec in &self.segments {
            let (nx, ny) = spec.normal;
            let dmat = self.ops.normal_derivative(spec.segment);
            let sign = Operators2D::normal_sign(spec.segment);
            for (&g, &wl) in spec.restriction.nodes.iter().zip(&spec.restriction.weights) {
                let un = nx * u[g] + ny * v[g];
                let ut = -ny * u[g] + nx * v[g];
                total -= wl * un * (un * un + ut * ut + 2.0 * p[g]);
                let (mut dnu, mut dnv) = (0.0, 0.0);
                for (c, &d) in dmat.outer_view(g).expect("row in range").iter() {
                    dnu += d * u[c];
                    dnv += d * v[c];
                }
                let dn_un = sign * (nx * dnu + ny * dnv);
                let dn_ut = sign * (-ny * dnu + nx * dnv);
                total += 2.0 * self.epsilon * wl * (un * dn_un + ut * dn_ut);
            }
        }
        total
    }

    /// `BC = BT + 2 W^T P SAT(W, t)`; the energy rate equals
    /// `BC - dissipation` for an unforced system.
    pub fn boundary_form(&self, w: &StateVector, t: f64) -> f64 {
        let sat = self.sat(w, t);
        let m = self.mass();
        let n = self.n_nodes();
        let wp: f64 = w
            .as_slice()
            .iter()
            .zip(sat.as_slice())
            .enumerate()
            .map(|(i, (a, b))| m[i % n] * a * b)
            .sum();
        self.boundary_term(w) + 2.0 * wp
    }

    /// `omega = Dx v - Dy u`.
    pub fn vorticity(&self, w: &StateVector) -> Vec<f64> {
        let mut out = sparse::matvec(&self.ops.dx, w.v());
        sparse::matvec_acc(&self.ops.dy, w.u(), -1.0, &mut out);
        out
    }

    /// Node coordinates in flattened order.
    pub fn coords(&self) -> &[(f64, f64)] {
        &self.coords
    }
}

fn push_diag(tri: &mut TriMat<f64>, r0: usize, c0: usize, n: usize, f: impl Fn(usize) -> f64) {
    for i in 0..n {
        tri.add_triplet(r0 + i, c0 + i, f(i));
    }
}

/// Pushes `alpha * diag(rs) * a * diag(cs)` at block offset `(r0, c0)`.
fn push_scaled(
    tri: &mut TriMat<f64>,
    a: &SparseMatrix,
    r0: usize,
    c0: usize,
    alpha: f64,
    rs: Option<&[f64]>,
    cs: Option<&[f64]>,
) {
    for (i, row) in a.outer_iterator().enumerate() {
        let ri = alpha * rs.map_or(1.0, |s| s[i]);
        for (j, &val) in row.iter() {
            let cj = cs.map_or(1.0, |s| s[j]);
            tri.add_triplet(r0 + i, c0 + j, ri * val * cj);
        }
    }
}

/// The block matrices `A` and `B` of the split advection form at state `W`.
pub fn build_advection_blocks(w: &StateVector) -> (SparseMatrix, SparseMatrix) {
    let n = w.n_nodes();
    let (u, v, _) = w.fields();
    let mut a = TriMat::new((3 * n, 3 * n));
    let mut b = TriMat::new((3 * n, 3 * n));
    for i in 0..n {
        a.add_triplet(i, i, u[i]);
        a.add_triplet(n + i, n + i, u[i]);
        a.add_triplet(i, 2 * n + i, 1.0);
        a.add_triplet(2 * n + i, i, 1.0);
        b.add_triplet(i, i, v[i]);
        b.add_triplet(n + i, n + i, v[i]);
        b.add_triplet(n + i, 2 * n + i, 1.0);
        b.add_triplet(2 * n + i, n + i, 1.0);
    }
    (a.to_csr(), b.to_csr())
}

/// One interval of an energy history.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyRateSample {
    pub time: f64,
    pub energy: f64,
    /// Finite-difference `dE/dt` over the interval ending at `time`.
    pub rate: f64,
    pub dissipation: f64,
}

/// Energy, its finite-difference rate and the viscous dissipation along a
/// sequence of `(t, W)` snapshots.
pub fn energy_rate_report(sys: &BlockSystem, snapshots: &[(f64, StateVector)]) -> Result<Vec<EnergyRateSample>> {
    if snapshots.len() < 2 {
        return Err(Error::invalid("an energy rate needs at least two snapshots"));
    }
    let energies: Vec<f64> = snapshots.iter().map(|(_, w)| sys.discrete_energy(w)).collect();
    Ok(snapshots
        .windows(2)
        .zip(energies.windows(2))
        .map(|(s, e)| EnergyRateSample {
            time: s[1].0,
            energy: e[1],
            rate: (e[1] - e[0]) / (s[1].0 - s[0].0),
            dissipation: sys.dissipation(&s[1].1),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::ReferenceElement;
    use crate::boundary::BoundaryData;
    use crate::mesh::{build_mesh, uniform_edges};

    fn walls(ex: usize, ey: usize, k: usize) -> BlockSystem {
        let re = ReferenceElement::new(k).unwrap();
        let mesh = build_mesh(&uniform_edges(ex, 0.0, 1.0).unwrap(), &uniform_edges(ey, 0.0, 1.0).unwrap(), &re).unwrap();
        let ops = mesh.operators().unwrap();
        let segs = Segment::ALL.iter().map(|&s| BoundarySegmentSpec::wall(&mesh, &ops, s)).collect();
        BlockSystem::new(mesh, ops, 0.1, segs).unwrap()
    }

    #[test]
    fn rejects_bad_configuration() {
        let sys = walls(1, 1, 1);
        assert!(BlockSystem::new(sys.mesh.clone(), sys.ops.clone(), 0.0, sys.segments.clone()).is_err());
        let mut segs = sys.segments.clone();
        segs.pop();
        assert!(BlockSystem::new(sys.mesh.clone(), sys.ops.clone(), 0.1, segs).is_err());
    }

    #[test]
    fn zero_state_zero_residual() {
        let sys = walls(2, 2, 2);
        let w = StateVector::zeros(sys.n_nodes());
        assert!(sys.residual(&w, 0.0).as_slice().iter().all(|&r| r == 0.0));
        assert_eq!(sys.discrete_energy(&w), 0.0);
    }

    #[test]
    fn advection_blocks_at_zero_and_uniform_flow() {
        let n = 3;
        let (a, _) = build_advection_blocks(&StateVector::zeros(n));
        let d = sparse::to_dense(&a);
        for i in 0..n {
            assert_eq!(d[i][i], 0.0);
            assert_eq!(d[i][2 * n + i], 1.0);
            assert_eq!(d[2 * n + i][i], 1.0);
        }
        let w = StateVector::from_fields(&[1.0; 3], &[0.0; 3], &[0.5, 1.0, 2.0]).unwrap();
        let (a, b) = build_advection_blocks(&w);
        let aw = sparse::matvec(&a, w.as_slice());
        assert_eq!(&aw[..n], &[1.5, 2.0, 3.0]);
        let dense = sparse::to_dense(&b);
        for i in 0..3 * n {
            for j in 0..3 * n {
                assert_eq!(dense[i][j], dense[j][i]);
            }
        }
    }

    #[test]
    fn energy_of_unit_flow_is_area_and_ignores_pressure() {
        let sys = walls(2, 3, 2);
        let n = sys.n_nodes();
        let w = StateVector::from_fields(&vec![1.0; n], &vec![0.0; n], &vec![3.0; n]).unwrap();
        assert!((sys.discrete_energy(&w) - 1.0).abs() < 1e-13);
        let w2 = StateVector::from_fields(&vec![1.0; n], &vec![0.0; n], &vec![-7.0; n]).unwrap();
        assert_eq!(sys.discrete_energy(&w), sys.discrete_energy(&w2));
        assert!(sys.itilde(&w).p().iter().all(|&p| p == 0.0));
    }

    #[test]
    fn constant_state_interior_rows_vanish() {
        let sys = walls(2, 2, 3);
        let n = sys.n_nodes();
        let w = StateVector::from_fields(&vec![0.3; n], &vec![-0.2; n], &vec![1.0; n]).unwrap();
        let d = sys.apply_spatial_operator(&w);
        assert!(d.as_slice().iter().all(|v| v.abs() < 1e-11));
    }

    #[test]
    fn rigid_rotation_vorticity() {
        let sys = walls(2, 2, 2);
        let u = sys.mesh.sample(|_, y| -y);
        let v = sys.mesh.sample(|x, _| x);
        let w = StateVector::from_fields(&u, &v, &vec![0.0; u.len()]).unwrap();
        assert!(sys.vorticity(&w).iter().all(|o| (o - 2.0).abs() < 1e-10));
    }

    #[test]
    fn sat_vanishes_when_data_is_met() {
        let re = ReferenceElement::new(2).unwrap();
        let mesh = build_mesh(&uniform_edges(2, 0.0, 1.0).unwrap(), &uniform_edges(2, 0.0, 1.0).unwrap(), &re).unwrap();
        let ops = mesh.operators().unwrap();
        let field = |x: f64, y: f64| (x * y + 0.3, x - y * y);
        let data = BoundaryData::function(move |x, y, _| field(x, y));
        let segs = Segment::ALL
            .iter()
            .map(|&s| BoundarySegmentSpec::new(&mesh, &ops, s, BoundaryKind::DirichletVelocity, data.clone()))
            .collect();
        let sys = BlockSystem::new(mesh, ops, 0.05, segs).unwrap();
        let u = sys.mesh.sample(|x, y| field(x, y).0);
        let v = sys.mesh.sample(|x, y| field(x, y).1);
        let w = StateVector::from_fields(&u, &v, &sys.mesh.sample(|x, _| x)).unwrap();
        assert!(sys.sat(&w, 0.0).as_slice().iter().all(|s| s.abs() < 1e-12));
    }

    #[test]
    fn energy_report_needs_two_snapshots() {
        let sys = walls(1, 1, 2);
        let w = StateVector::zeros(sys.n_nodes());
        assert!(energy_rate_report(&sys, &[(0.0, w.clone())]).is_err());
        let rep = energy_rate_report(&sys, &[(0.0, w.clone()), (0.1, w.clone()), (0.2, w)]).unwrap();
        assert_eq!(rep.len(), 2);
        assert!(rep.iter().all(|s| s.energy == 0.0 && s.rate == 0.0 && s.dissipation == 0.0));
    }
}
