//! Reference line profiles: loading, sampling computed fields along a line
//! and comparing the two.
//!
//! Reference files are CSV with `#` metadata comments followed by a
//! `coordinate,value` header:
//!
//! ```text
//! # source: Ghia, Ghia & Shin (1982), Table I
//! # quantity: u
//! # line: x = 0.5
//! coordinate,value
//! 0.0000,0.00000
//! ...
//! ```
//!
//! `line: x = c` is a vertical line (abscissa `y`), `line: y = c` a
//! horizontal one (abscissa `x`).

use std::fmt;
use std::path::{Path, PathBuf};

use crate::basis::{lagrange_eval_all, ReferenceElement};
use crate::error::{Error, Result};
use crate::mesh::Mesh2D;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    U,
    V,
    Vorticity,
}

impl std::str::FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "u" => Ok(Quantity::U),
            "v" => Ok(Quantity::V),
            "vorticity" | "omega" => Ok(Quantity::Vorticity),
            other => Err(Error::invalid(format!("unknown quantity '{other}'"))),
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Quantity::U => "u",
            Quantity::V => "v",
            Quantity::Vorticity => "vorticity",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// The line `axis = coordinate`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSpec {
    pub axis: Axis,
    pub coordinate: f64,
}

impl LineSpec {
    pub fn x(coordinate: f64) -> Self {
        Self {
            axis: Axis::X,
            coordinate,
        }
    }

    pub fn y(coordinate: f64) -> Self {
        Self {
            axis: Axis::Y,
            coordinate,
        }
    }

    fn same_as(&self, other: &LineSpec) -> bool {
        self.axis == other.axis && (self.coordinate - other.coordinate).abs() < 1e-9
    }
}

impl std::str::FromStr for LineSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (lhs, rhs) = s
            .split_once('=')
            .ok_or_else(|| Error::invalid(format!("line '{s}' is not of the form 'x = c' or 'y = c'")))?;
        let coordinate: f64 = rhs
            .trim()
            .parse()
            .map_err(|_| Error::invalid(format!("line coordinate '{}' is not a number", rhs.trim())))?;
        match lhs.trim() {
            "x" => Ok(LineSpec::x(coordinate)),
            "y" => Ok(LineSpec::y(coordinate)),
            other => Err(Error::invalid(format!("line axis '{other}' must be x or y"))),
        }
    }
}

impl fmt::Display for LineSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = match self.axis {
            Axis::X => "x",
            Axis::Y => "y",
        };
        write!(f, "{a} = {}", self.coordinate)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceProfile {
    pub source: String,
    pub quantity: Quantity,
    pub line: LineSpec,
    pub abscissa: Vec<f64>,
    pub values: Vec<f64>,
}

pub fn load_reference(path: &Path) -> Result<ReferenceProfile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_reference(&text, path)
}

pub fn parse_reference(text: &str, path: &Path) -> Result<ReferenceProfile> {
    let err = |line: usize, message: String| Error::Parse {
        path: PathBuf::from(path),
        line,
        message,
    };
    if text.trim().is_empty() {
        return Err(err(0, "file is empty".into()));
    }
    let mut source = String::from("unknown");
    let mut quantity = None;
    let mut line_spec = None;
    let mut header_seen = false;
    let mut abscissa = Vec::new();
    let mut values = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(meta) = line.strip_prefix('#') {
            if let Some((key, value)) = meta.split_once(':') {
                let value = value.trim();
                match key.trim() {
                    "source" => source = value.to_string(),
                    "quantity" => quantity = Some(value.parse().map_err(|e: Error| err(lineno, e.to_string()))?),
                    "line" => line_spec = Some(value.parse().map_err(|e: Error| err(lineno, e.to_string()))?),
                    _ => {}
                }
            }
            continue;
        }
        if !header_seen {
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if cols != ["coordinate", "value"] {
                return Err(err(lineno, format!("expected header 'coordinate,value', found '{line}'")));
            }
            header_seen = true;
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != 2 {
            return Err(err(lineno, format!("expected 2 columns, found {}", cols.len())));
        }
        let parse = |s: &str| s.parse::<f64>().map_err(|_| err(lineno, format!("'{s}' is not a number")));
        let (a, v) = (parse(cols[0])?, parse(cols[1])?);
        if let Some(&prev) = abscissa.last() {
            if !(a > prev) {
                return Err(err(lineno, format!("coordinate {a} does not increase (previous {prev})")));
            }
        }
        abscissa.push(a);
        values.push(v);
    }
    if !header_seen {
        return Err(err(0, "missing 'coordinate,value' header".into()));
    }
    if abscissa.is_empty() {
        return Err(err(0, "no data rows".into()));
    }
    Ok(ReferenceProfile {
        source,
        quantity: quantity.ok_or_else(|| err(0, "missing '# quantity:' metadata".into()))?,
        line: line_spec.ok_or_else(|| err(0, "missing '# line:' metadata".into()))?,
        abscissa,
        values,
    })
}

/// Nodal values of a field along a mesh line, interpolated exactly within
/// elements in both directions.
#[derive(Debug, Clone)]
pub struct LineProfile {
    pub quantity: Quantity,
    pub line: LineSpec,
    /// Global node coordinates along the line.
    pub abscissa: Vec<f64>,
    pub values: Vec<f64>,
    edges: Vec<f64>,
    reference: ReferenceElement,
}

/// Element containing `s` and the reference coordinate of `s` within it.
fn locate(edges: &[f64], s: f64) -> Result<(usize, f64)> {
    let (lo, hi) = (edges[0], *edges.last().unwrap());
    let tol = 1e-12 * (hi - lo);
    if s < lo - tol || s > hi + tol {
        return Err(Error::invalid(format!("coordinate {s} outside [{lo}, {hi}]")));
    }
    let s = s.clamp(lo, hi);
    let e = edges.partition_point(|&x| x <= s).saturating_sub(1).min(edges.len() - 2);
    let (a, b) = (edges[e], edges[e + 1]);
    let xi = ((2.0 * s - a - b) / (b - a)).clamp(-1.0, 1.0);
    Ok((e, xi))
}

impl LineProfile {
    /// Value at `s` along the line by Lagrange interpolation.
    pub fn interpolate(&self, s: f64) -> Result<f64> {
        let (e, xi) = locate(&self.edges, s)?;
        let k = self.reference.degree;
        let basis = lagrange_eval_all(&self.reference.nodes, xi);
        Ok((0..=k).map(|a| basis[a] * self.values[e * k + a]).sum())
    }
}

/// Samples a nodal field along `line`.
pub fn extract_line_profile(field: &[f64], mesh: &Mesh2D, quantity: Quantity, line: LineSpec) -> Result<LineProfile> {
    if field.len() != mesh.n_nodes() {
        return Err(Error::DimensionMismatch {
            expected: mesh.n_nodes(),
            actual: field.len(),
        });
    }
    let (m, n) = (mesh.nx(), mesh.ny());
    let k = mesh.degree;
    let (across_edges, along_edges, along_nodes) = match line.axis {
        Axis::X => (&mesh.x_edges, &mesh.y_edges, &mesh.y_nodes),
        Axis::Y => (&mesh.y_edges, &mesh.x_edges, &mesh.x_nodes),
    };
    let (e, xi) = locate(across_edges, line.coordinate)
        .map_err(|_| Error::invalid(format!("line {line} lies outside the domain")))?;
    let basis = lagrange_eval_all(&mesh.reference.nodes, xi);
    let values = (0..along_nodes.len())
        .map(|t| {
            (0..=k)
                .filter(|&a| basis[a] != 0.0)
                .map(|a| {
                    let c = e * k + a;
                    let g = match line.axis {
                        Axis::X => c * n + t,
                        Axis::Y => t * n + c,
                    };
                    basis[a] * field[g]
                })
                .sum()
        })
        .collect();
    debug_assert!(m > 0);
    Ok(LineProfile {
        quantity,
        line,
        abscissa: along_nodes.clone(),
        values,
        edges: along_edges.clone(),
        reference: mesh.reference.clone(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub quantity: Quantity,
    pub line: LineSpec,
    pub points: usize,
    pub max_abs_deviation: f64,
    pub mean_abs_deviation: f64,
    /// Abscissa of the largest deviation.
    pub worst_at: f64,
    /// `(abscissa, reference, computed)` at every reference point.
    pub samples: Vec<(f64, f64, f64)>,
}

impl fmt::Display for ComparisonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} along {}: {} points, max |dev| {:.4e} at {:.4}, mean |dev| {:.4e}",
            self.quantity, self.line, self.points, self.max_abs_deviation, self.worst_at, self.mean_abs_deviation
        )
    }
}

pub fn compare_to_reference(profile: &LineProfile, reference: &ReferenceProfile) -> Result<ComparisonReport> {
    if profile.quantity != reference.quantity {
        return Err(Error::invalid(format!(
            "quantity mismatch: computed {} but reference holds {}",
            profile.quantity, reference.quantity
        )));
    }
    if !profile.line.same_as(&reference.line) {
        return Err(Error::invalid(format!(
            "line mismatch: computed along {} but reference is along {}",
            profile.line, reference.line
        )));
    }
    let mut samples = Vec::with_capacity(reference.abscissa.len());
    for (&s, &r) in reference.abscissa.iter().zip(&reference.values) {
        let c = profile
            .interpolate(s)
            .map_err(|_| Error::invalid(format!("reference abscissa {s} outside the computed range")))?;
        samples.push((s, r, c));
    }
    let (mut max, mut worst, mut sum) = (0.0_f64, reference.abscissa[0], 0.0);
    for &(s, r, c) in &samples {
        let d = (c - r).abs();
        sum += d;
        if d > max {
            max = d;
            worst = s;
        }
    }
    Ok(ComparisonReport {
        quantity: reference.quantity,
        line: reference.line,
        points: samples.len(),
        max_abs_deviation: max,
        mean_abs_deviation: sum / samples.len() as f64,
        worst_at: worst,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_mesh, cosine_stretched_edges, uniform_edges};

    const SAMPLE: &str = "# source: test\n# quantity: u\n# line: x = 0.5\ncoordinate,value\n0.0,0.0\n0.5,0.25\n1.0,1.0\n";

    #[test]
    fn parses_metadata_and_rows() {
        let r = parse_reference(SAMPLE, Path::new("t.csv")).unwrap();
        assert_eq!(r.quantity, Quantity::U);
        assert_eq!(r.line, LineSpec::x(0.5));
        assert_eq!(r.abscissa, vec![0.0, 0.5, 1.0]);
        assert_eq!(r.source, "test");
    }

    #[test]
    fn rejects_bad_files() {
        let p = Path::new("bad.csv");
        assert!(parse_reference("", p).is_err());
        let header_only = "# quantity: u\n# line: x = 0.5\ncoordinate,value\n";
        let e = parse_reference(header_only, p).unwrap_err().to_string();
        assert!(e.contains("no data rows"), "{e}");
        let non_monotone = "# quantity: u\n# line: x = 0.5\ncoordinate,value\n0.5,1\n0.4,2\n";
        let e = parse_reference(non_monotone, p).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 5, .. }), "{e}");
        let garbage = "# quantity: u\n# line: x = 0.5\ncoordinate,value\n0.1,abc\n";
        assert!(matches!(parse_reference(garbage, p).unwrap_err(), Error::Parse { line: 4, .. }));
    }

    fn mesh() -> Mesh2D {
        let re = ReferenceElement::new(3).unwrap();
        build_mesh(&cosine_stretched_edges(4).unwrap(), &uniform_edges(3, 0.0, 1.0).unwrap(), &re).unwrap()
    }

    #[test]
    fn nodal_sampling_is_exact() {
        let m = mesh();
        let f = m.sample(|x, y| (3.0 * x).sin() + y * y);
        let i = 4;
        let line = LineSpec::x(m.x_nodes[i]);
        let prof = extract_line_profile(&f, &m, Quantity::U, line).unwrap();
        for j in 0..m.ny() {
            assert_eq!(prof.values[j], f[i * m.ny() + j]);
            assert_eq!(prof.interpolate(m.y_nodes[j]).unwrap(), f[i * m.ny() + j]);
        }
    }

    #[test]
    fn cubic_field_reproduced_off_nodes() {
        let m = mesh();
        let exact = |x: f64, y: f64| x * x * x - 2.0 * x * y + y * y * y;
        let f = m.sample(exact);
        let prof = extract_line_profile(&f, &m, Quantity::V, LineSpec::y(0.37)).unwrap();
        for s in [0.0, 0.11, 0.5, 0.93, 1.0] {
            assert!((prof.interpolate(s).unwrap() - exact(s, 0.37)).abs() < 1e-12);
        }
        assert!(extract_line_profile(&f, &m, Quantity::V, LineSpec::y(1.5)).is_err());
    }

    #[test]
    fn comparison_against_identical_and_mismatched_reference() {
        let m = mesh();
        let f = m.sample(|_, y| y * y);
        let prof = extract_line_profile(&f, &m, Quantity::U, LineSpec::x(0.5)).unwrap();
        let reference = parse_reference(SAMPLE, Path::new("t.csv")).unwrap();
        let rep = compare_to_reference(&prof, &reference).unwrap();
        assert!(rep.max_abs_deviation < 1e-14);
        let mut wrong = reference.clone();
        wrong.quantity = Quantity::V;
        assert!(compare_to_reference(&prof, &wrong).is_err());
        let mut outside = reference;
        outside.abscissa[2] = 1.5;
        assert!(compare_to_reference(&prof, &outside).is_err());
    }
}
