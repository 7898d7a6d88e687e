//! Kinetic energy of a vortical flow in a closed box: with no-slip walls and
//! no forcing the discrete energy can only decrease, and its rate matches
//! minus the viscous dissipation.
//!
//! cargo run --release --example energy_stability

use sbp_ins::prelude::*;

fn main() -> Result<()> {
    let re = ReferenceElement::new(3)?;
    let edges = uniform_edges(4, 0.0, 1.0)?;
    let mesh = build_mesh(&edges, &edges, &re)?;
    let ops = mesh.operators()?;
    let segs = Segment::ALL.iter().map(|&s| BoundarySegmentSpec::wall(&mesh, &ops, s)).collect();
    let sys = BlockSystem::new(mesh, ops, 0.01, segs)?;

    // Velocity from the stream function psi = 40 (x (1 - x) y (1 - y))^2.
    let g = |s: f64| (s * (1.0 - s)).powi(2);
    let dg = |s: f64| 2.0 * s * (1.0 - s) * (1.0 - 2.0 * s);
    let u = sys.mesh.sample(|x, y| 40.0 * g(x) * dg(y));
    let v = sys.mesh.sample(|x, y| -40.0 * dg(x) * g(y));
    let w0 = StateVector::from_fields(&u, &v, &vec![0.0; u.len()])?;

    let cfg = MarchConfig {
        dt: 0.05,
        end_time: Some(2.0),
        steady_tol: None,
        snapshot_every: Some(4),
        log_every: 0,
        ..MarchConfig::default()
    };
    let out = march(&sys, &cfg, w0)?;
    println!("{:>6} {:>12} {:>12} {:>12}", "t", "energy", "-dissip", "BC");
    for (t, w) in &out.snapshots {
        println!(
            "{t:6.2} {:12.6e} {:12.4e} {:12.1e}",
            sys.discrete_energy(w),
            -sys.dissipation(w),
            sys.boundary_form(w, *t)
        );
    }
    let rises = out.energy.windows(2).filter(|p| p[1].1 > p[0].1).count();
    println!("steps with an energy increase: {rises} of {}", out.steps);
    Ok(())
}
