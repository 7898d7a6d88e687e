//! Field post-processing and CSV output.

use std::fmt::Write as _;
use std::path::Path;

use crate::cases::reference::{LineProfile, LineSpec};
use crate::error::{Error, Result};
use crate::sbp::Segment;
use crate::state::StateVector;
use crate::system::BlockSystem;

/// `omega = dv/dx - du/dy` at every node.
pub fn vorticity_field(sys: &BlockSystem, w: &StateVector) -> Vec<f64> {
    sys.vorticity(w)
}

/// Outward volume flux `sum_l w_l U_n` through one side.
pub fn segment_flux(sys: &BlockSystem, w: &StateVector, segment: Segment) -> f64 {
    let r = sys.ops.restriction(segment);
    let (nx, ny) = segment.normal();
    r.nodes
        .iter()
        .zip(&r.weights)
        .map(|(&g, &wl)| wl * (nx * w.u()[g] + ny * w.v()[g]))
        .sum()
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Writes `x,y,u,v,p,vorticity,speed` rows in node order (`g = i * ny + j`,
/// x-index outer) with 17 significant digits.
pub fn export_fields(sys: &BlockSystem, w: &StateVector, path: &Path) -> Result<()> {
    if w.n_nodes() != sys.n_nodes() {
        return Err(Error::DimensionMismatch {
            expected: sys.n_nodes(),
            actual: w.n_nodes(),
        });
    }
    let omega = vorticity_field(sys, w);
    let (u, v, p) = w.fields();
    let mut out = String::with_capacity(w.n_nodes() * 180);
    out.push_str("x,y,u,v,p,vorticity,speed\n");
    for (g, &(x, y)) in sys.coords().iter().enumerate() {
        let speed = (u[g] * u[g] + v[g] * v[g]).sqrt();
        writeln!(
            out,
            "{x:.16e},{y:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{speed:.16e}",
            u[g], v[g], p[g], omega[g]
        )
        .expect("writing to a string");
    }
    write_file(path, &out)
}

/// Nodal coordinates and state read back from [`export_fields`] output.
pub fn read_fields(path: &Path) -> Result<(Vec<(f64, f64)>, StateVector)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate();
    let header = lines.next().map(|(_, l)| l).unwrap_or("");
    let cols: Vec<&str> = header.split(',').collect();
    if cols.len() < 5 || cols[..5] != ["x", "y", "u", "v", "p"] {
        return Err(err(1, format!("unexpected header '{header}'")));
    }
    let (mut coords, mut u, mut v, mut p) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let vals = line
            .split(',')
            .take(5)
            .map(|s| s.trim().parse::<f64>().map_err(|_| err(idx + 1, format!("'{s}' is not a number"))))
            .collect::<Result<Vec<f64>>>()?;
        if vals.len() != 5 {
            return Err(err(idx + 1, "expected at least 5 columns".into()));
        }
        coords.push((vals[0], vals[1]));
        u.push(vals[2]);
        v.push(vals[3]);
        p.push(vals[4]);
    }
    Ok((coords, StateVector::from_fields(&u, &v, &p)?))
}

pub fn write_profile(profile: &LineProfile, path: &Path) -> Result<()> {
    let mut out = format!("# quantity: {}\n# line: {}\ncoordinate,value\n", profile.quantity, profile.line);
    for (s, v) in profile.abscissa.iter().zip(&profile.values) {
        writeln!(out, "{s:.16e},{v:.16e}").expect("writing to a string");
    }
    write_file(path, &out)
}

pub fn write_energy(series: &[(f64, f64)], path: &Path) -> Result<()> {
    let mut out = String::from("time,energy\n");
    for (t, e) in series {
        writeln!(out, "{t:.10e},{e:.16e}").expect("writing to a string");
    }
    write_file(path, &out)
}

/// File-name fragment for a line, e.g. `x0.5`.
pub fn line_tag(line: &LineSpec) -> String {
    match line.axis {
        crate::cases::reference::Axis::X => format!("x{}", line.coordinate),
        crate::cases::reference::Axis::Y => format!("y{}", line.coordinate),
    }
}

/// Largest relative deviation of a channel profile `u(y)` from the fully
/// developed parabola `6 ū s (1 - s)` with the same mean `ū`, sampled at
/// the profile nodes and measured against the parabola's peak `1.5 ū`.
pub fn parabola_deviation(profile: &LineProfile) -> Result<(f64, f64)> {
    let ys = &profile.abscissa;
    let (y0, y1) = (ys[0], *ys.last().unwrap());
    let h = y1 - y0;
    // Mean from the same interpolant the deviation is measured on.
    let quad = 400;
    let mut integral = 0.0;
    for q in 0..quad {
        let (a, b) = (y0 + h * q as f64 / quad as f64, y0 + h * (q + 1) as f64 / quad as f64);
        let mid = 0.5 * (a + b);
        let (d, r) = (0.5 * (b - a) / 3f64.sqrt(), 0.5 * (b - a));
        integral += r * (profile.interpolate(mid - d)? + profile.interpolate(mid + d)?);
    }
    let mean = integral / h;
    if mean.abs() < f64::EPSILON {
        return Err(Error::invalid("profile has zero mean flux"));
    }
    let peak = 1.5 * mean;
    let dev = ys
        .iter()
        .zip(&profile.values)
        .map(|(&y, &u)| {
            let s = (y - y0) / h;
            (u - 6.0 * mean * s * (1.0 - s)).abs() / peak.abs()
        })
        .fold(0.0, f64::max);
    Ok((dev, mean))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::ReferenceElement;
    use crate::boundary::BoundarySegmentSpec;
    use crate::cases::reference::{extract_line_profile, Quantity};
    use crate::mesh::{build_mesh, uniform_edges};

    fn channel() -> BlockSystem {
        let re = ReferenceElement::new(2).unwrap();
        let mesh = build_mesh(&uniform_edges(3, 0.0, 3.0).unwrap(), &uniform_edges(2, 0.0, 1.0).unwrap(), &re).unwrap();
        let ops = mesh.operators().unwrap();
        let segs = Segment::ALL.iter().map(|&s| BoundarySegmentSpec::wall(&mesh, &ops, s)).collect();
        BlockSystem::new(mesh, ops, 0.01, segs).unwrap()
    }

    #[test]
    fn poiseuille_vorticity_and_flux() {
        let sys = channel();
        let u = sys.mesh.sample(|_, y| 6.0 * y * (1.0 - y));
        let w = StateVector::from_fields(&u, &vec![0.0; u.len()], &vec![0.0; u.len()]).unwrap();
        for (o, &(_, y)) in vorticity_field(&sys, &w).iter().zip(sys.coords()) {
            assert!((o + 6.0 * (1.0 - 2.0 * y)).abs() < 1e-10);
        }
        assert!((segment_flux(&sys, &w, Segment::East) - 1.0).abs() < 1e-13);
        assert!((segment_flux(&sys, &w, Segment::West) + 1.0).abs() < 1e-13);
        let prof = extract_line_profile(&u, &sys.mesh, Quantity::U, LineSpec::x(3.0)).unwrap();
        let (dev, mean) = parabola_deviation(&prof).unwrap();
        assert!(dev < 1e-12 && (mean - 1.0).abs() < 1e-12);
    }

    #[test]
    fn export_round_trip_is_exact() {
        let sys = channel();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("fields.csv");
        let u = sys.mesh.sample(|x, y| (x * 1.234567).sin() / 3.0 + y);
        let p = sys.mesh.sample(|x, y| 1e-9 * x - y.exp());
        let w = StateVector::from_fields(&u, &p, &p).unwrap();
        export_fields(&sys, &w, &path).unwrap();
        let (coords, back) = read_fields(&path).unwrap();
        assert_eq!(back, w);
        assert_eq!(coords, sys.coords());
        assert_eq!(back.len() / 3, sys.n_nodes());

        let zero = StateVector::zeros(sys.n_nodes());
        export_fields(&sys, &zero, &path).unwrap();
        let (_, back) = read_fields(&path).unwrap();
        assert!(back.as_slice().iter().all(|&x| x == 0.0));
    }
}
