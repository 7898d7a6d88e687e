//! Turning a [`CaseConfig`] into a simulation and its output directory.
//!
//! A run directory holds:
//!
//! - `run.toml`: case metadata, mesh edges and march statistics
//! - `fields.csv`: nodal fields, see [`export_fields`]
//! - `profile_<q>_<line>.csv`: centerline or station profiles
//! - `energy.csv`: discrete kinetic energy per step

use std::path::{Path, PathBuf};
use std::sync::Arc;

use log::{info, warn};
use serde::{Deserialize, Serialize};

use crate::basis::ReferenceElement;
use crate::boundary::{BoundaryData, BoundaryKind, BoundarySegmentSpec};
use crate::cases::config::{BoundaryCondition, CaseConfig, CaseKind, MeshKind};
use crate::cases::post::{export_fields, line_tag, read_fields, segment_flux, write_energy, write_profile};
use crate::cases::reference::{compare_to_reference, extract_line_profile, load_reference, ComparisonReport, LineProfile, LineSpec, Quantity, ReferenceProfile};
use crate::error::{Error, Result};
use crate::mesh::{build_mesh, cosine_stretched_edges_on, uniform_edges, Mesh2D};
use crate::mms::{exact_state, p_norm_error, FieldErrors, MmsField};
use crate::sbp::Segment;
use crate::state::StateVector;
use crate::system::BlockSystem;
use crate::time::{march, MarchResult};

fn edges(kind: MeshKind, n: usize, a: f64, b: f64) -> Result<Vec<f64>> {
    match kind {
        MeshKind::Uniform => uniform_edges(n, a, b),
        MeshKind::CosineStretched => cosine_stretched_edges_on(n, a, b),
    }
}

pub fn build_case_mesh(cfg: &CaseConfig) -> Result<Mesh2D> {
    let re = ReferenceElement::new(cfg.degree)?;
    let (x0, x1, y0, y1) = cfg.domain;
    build_mesh(
        &edges(cfg.mesh, cfg.elements.0, x0, x1)?,
        &edges(cfg.mesh, cfg.elements.1, y0, y1)?,
        &re,
    )
}

fn mms_field(cfg: &CaseConfig) -> MmsField {
    MmsField {
        epsilon: cfg.epsilon,
        ..MmsField::default()
    }
}

/// Velocity data for one side.
fn boundary_data(cfg: &CaseConfig, segment: Segment, bc: BoundaryCondition) -> (BoundaryKind, BoundaryData) {
    let (_, _, y0, y1) = cfg.domain;
    match bc {
        BoundaryCondition::Wall => (BoundaryKind::DirichletVelocity, BoundaryData::Zero),
        BoundaryCondition::Lid(s) => {
            let data = match segment {
                Segment::North | Segment::South => BoundaryData::Constant(s, 0.0),
                Segment::East | Segment::West => BoundaryData::Constant(0.0, s),
            };
            (BoundaryKind::DirichletVelocity, data)
        }
        BoundaryCondition::Velocity(a, b) => (BoundaryKind::DirichletVelocity, BoundaryData::Constant(a, b)),
        BoundaryCondition::StepInflow => {
            let h = y1 - y0;
            let data = BoundaryData::function(move |_, y, _| {
                let s = (y - y0) / h;
                if s <= 0.5 {
                    (24.0 * s * (0.5 - s), 0.0)
                } else {
                    (0.0, 0.0)
                }
            });
            (BoundaryKind::DirichletVelocity, data)
        }
        BoundaryCondition::Outflow => (BoundaryKind::OutflowNatural, BoundaryData::Zero),
        BoundaryCondition::Exact => {
            let field = mms_field(cfg);
            let data = BoundaryData::function(move |x, y, t| {
                let (u, v, _) = field.eval(x, y, t);
                (u, v)
            });
            (BoundaryKind::DirichletVelocity, data)
        }
    }
}

/// System and initial state described by `cfg`. Fields start at rest
/// except for manufactured-solution runs, which start from the exact field.
pub fn build_case(cfg: &CaseConfig) -> Result<(BlockSystem, StateVector)> {
    let problems = cfg.problems();
    if !problems.is_empty() {
        return Err(Error::InvalidConfig(problems));
    }
    for w in cfg.warnings() {
        warn!("{w}");
    }
    let mesh = build_case_mesh(cfg)?;
    let ops = mesh.operators_with(cfg.second_derivative)?;
    let segments = Segment::ALL
        .iter()
        .map(|&s| {
            let (kind, data) = boundary_data(cfg, s, cfg.boundaries[&s]);
            BoundarySegmentSpec::new(&mesh, &ops, s, kind, data)
        })
        .collect();
    let mut sys = BlockSystem::new(mesh, ops, cfg.epsilon, segments)?;
    let initial = if cfg.kind == CaseKind::Mms {
        let field = mms_field(cfg);
        sys = sys.with_forcing(Arc::new(move |x, y, t| {
            let (a, b, c) = field.forcing(x, y, t);
            [a, b, c]
        }));
        exact_state(&sys, &field, 0.0)
    } else {
        StateVector::zeros(sys.n_nodes())
    };
    Ok((sys, initial))
}

#[derive(Debug, Clone)]
pub struct CaseOutcome {
    pub sys: BlockSystem,
    pub march: MarchResult,
}

/// Builds and marches a case without touching the file system.
pub fn simulate(cfg: &CaseConfig) -> Result<CaseOutcome> {
    let (sys, initial) = build_case(cfg)?;
    info!("{}: {}, Re = {:.1}", kind_name(cfg.kind), sys.mesh, cfg.reynolds());
    let result = march(&sys, &cfg.march_config(), initial)?;
    if let (None, Some(tol)) = (cfg.end_time, cfg.steady_tol) {
        if !result.steady {
            return Err(Error::NotSteady {
                steps: result.steps,
                last_change: result.last_change,
                tolerance: tol,
            });
        }
    }
    Ok(CaseOutcome { sys, march: result })
}

fn kind_name(kind: CaseKind) -> &'static str {
    match kind {
        CaseKind::Mms => "mms",
        CaseKind::Cavity => "cavity",
        CaseKind::Bfs => "bfs",
        CaseKind::Custom => "custom",
    }
}

/// Lines sampled for each case kind.
pub fn default_lines(cfg: &CaseConfig) -> Vec<(Quantity, LineSpec)> {
    let (x0, x1, y0, y1) = cfg.domain;
    match cfg.kind {
        CaseKind::Bfs => {
            let mut lines: Vec<_> = [7.0, 15.0]
                .into_iter()
                .filter(|&x| x > x0 && x < x1)
                .map(|x| (Quantity::U, LineSpec::x(x)))
                .collect();
            lines.push((Quantity::U, LineSpec::x(x1)));
            lines
        }
        _ => vec![
            (Quantity::U, LineSpec::x(0.5 * (x0 + x1))),
            (Quantity::V, LineSpec::y(0.5 * (y0 + y1))),
        ],
    }
}

pub fn line_profile(sys: &BlockSystem, w: &StateVector, quantity: Quantity, line: LineSpec) -> Result<LineProfile> {
    let field = match quantity {
        Quantity::U => w.u().to_vec(),
        Quantity::V => w.v().to_vec(),
        Quantity::Vorticity => sys.vorticity(w),
    };
    extract_line_profile(&field, &sys.mesh, quantity, line)
}

/// Contents of `run.toml`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunMetadata {
    pub case: String,
    pub degree: usize,
    pub epsilon: f64,
    pub reynolds: f64,
    pub second_derivative: String,
    pub dt: f64,
    pub steps: usize,
    pub time: f64,
    pub steady: bool,
    pub last_change: f64,
    pub node_order: String,
    pub boundaries: Vec<String>,
    pub x_edges: Vec<f64>,
    pub y_edges: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inflow_flux: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outflow_flux: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mms_error_u: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mms_error_v: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mms_error_p: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub dir: PathBuf,
    pub metadata: RunMetadata,
    pub comparisons: Vec<ComparisonReport>,
    pub outcome: CaseOutcome,
}

/// Errors against the manufactured solution at the final time.
pub fn mms_errors(cfg: &CaseConfig, outcome: &CaseOutcome) -> Result<FieldErrors> {
    let exact = exact_state(&outcome.sys, &mms_field(cfg), outcome.march.time);
    p_norm_error(outcome.sys.mass(), &outcome.march.state, &exact)
}

/// Writes every requested output of a finished run.
pub fn write_outputs(cfg: &CaseConfig, outcome: &CaseOutcome, dir: &Path) -> Result<RunMetadata> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let (sys, res) = (&outcome.sys, &outcome.march);
    let w = &res.state;
    let flux = |s| segment_flux(sys, w, s);
    let (inflow_flux, outflow_flux) = if cfg.kind == CaseKind::Bfs {
        (Some(-flux(Segment::West)), Some(flux(Segment::East)))
    } else {
        (None, None)
    };
    let errors = if cfg.kind == CaseKind::Mms {
        Some(mms_errors(cfg, outcome)?)
    } else {
        None
    };
    let metadata = RunMetadata {
        case: kind_name(cfg.kind).to_string(),
        degree: cfg.degree,
        epsilon: cfg.epsilon,
        reynolds: cfg.reynolds(),
        second_derivative: cfg.second_derivative.to_string(),
        dt: cfg.dt,
        steps: res.steps,
        time: res.time,
        steady: res.steady,
        last_change: if res.last_change.is_finite() { res.last_change } else { 0.0 },
        node_order: "x-major: row g = i * ny + j".into(),
        boundaries: Segment::ALL
            .iter()
            .map(|s| format!("{}={}", s.name(), cfg.boundaries[s]))
            .collect(),
        x_edges: sys.mesh.x_edges.clone(),
        y_edges: sys.mesh.y_edges.clone(),
        inflow_flux,
        outflow_flux,
        mms_error_u: errors.map(|e| e.u),
        mms_error_v: errors.map(|e| e.v),
        mms_error_p: errors.map(|e| e.p),
    };
    let text = toml::to_string(&metadata).map_err(|e| Error::invalid(e.to_string()))?;
    let meta_path = dir.join("run.toml");
    std::fs::write(&meta_path, text).map_err(|e| Error::io(&meta_path, e))?;
    if cfg.outputs.fields {
        export_fields(sys, w, &dir.join("fields.csv"))?;
    }
    if cfg.outputs.centerlines {
        for (q, line) in default_lines(cfg) {
            let prof = line_profile(sys, w, q, line)?;
            write_profile(&prof, &dir.join(format!("profile_{q}_{}.csv", line_tag(&line))))?;
        }
    }
    if cfg.outputs.energy {
        write_energy(&res.energy, &dir.join("energy.csv"))?;
    }
    Ok(metadata)
}

/// Simulates, writes outputs and compares against configured references.
pub fn run_case(cfg: &CaseConfig) -> Result<RunSummary> {
    // Reject unreadable references before spending time on the run.
    let references = cfg
        .reference_data
        .iter()
        .map(|p| load_reference(p))
        .collect::<Result<Vec<_>>>()?;
    let outcome = simulate(cfg)?;
    let metadata = write_outputs(cfg, &outcome, &cfg.output_dir)?;
    let comparisons = references
        .iter()
        .map(|r| compare_state(&outcome.sys, &outcome.march.state, r))
        .collect::<Result<Vec<_>>>()?;
    for c in &comparisons {
        info!("{c}");
    }
    Ok(RunSummary {
        dir: cfg.output_dir.clone(),
        metadata,
        comparisons,
        outcome,
    })
}

pub fn compare_state(sys: &BlockSystem, w: &StateVector, reference: &ReferenceProfile) -> Result<ComparisonReport> {
    let prof = line_profile(sys, w, reference.quantity, reference.line)?;
    compare_to_reference(&prof, reference)
}

/// Reloads a run directory and compares it with a reference profile.
pub fn compare_run(dir: &Path, reference: &Path) -> Result<ComparisonReport> {
    let meta_path = dir.join("run.toml");
    let text = std::fs::read_to_string(&meta_path).map_err(|e| Error::io(&meta_path, e))?;
    let meta: RunMetadata = toml::from_str(&text).map_err(|e| Error::Parse {
        path: meta_path.clone(),
        line: 0,
        message: e.to_string(),
    })?;
    let re = ReferenceElement::new(meta.degree)?;
    let mesh = build_mesh(&meta.x_edges, &meta.y_edges, &re)?;
    let fields_path = dir.join("fields.csv");
    let (coords, w) = read_fields(&fields_path)?;
    if w.n_nodes() != mesh.n_nodes() {
        return Err(Error::DimensionMismatch {
            expected: mesh.n_nodes(),
            actual: w.n_nodes(),
        });
    }
    if coords.iter().enumerate().any(|(g, &c)| {
        let e = mesh.coords(g);
        (c.0 - e.0).abs() > 1e-12 || (c.1 - e.1).abs() > 1e-12
    }) {
        return Err(Error::invalid(format!(
            "{} does not match the mesh recorded in run.toml",
            fields_path.display()
        )));
    }
    let ops = mesh.operators()?;
    let segments = Segment::ALL.iter().map(|&s| BoundarySegmentSpec::wall(&mesh, &ops, s)).collect();
    let sys = BlockSystem::new(mesh, ops, meta.epsilon, segments)?;
    compare_state(&sys, &w, &load_reference(reference)?)
}
