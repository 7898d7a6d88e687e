//! Declarative run configuration.
//!
//! Config files are flat TOML. Every key is optional; `case` selects a
//! preset and the remaining keys override it:
//!
//! | key | meaning |
//! |-----|---------|
//! | `case` | `cavity`, `bfs`, `mms` or `custom` |
//! | `degree` | polynomial degree `k` (1..=8) |
//! | `elements_x`, `elements_y` | elements per direction |
//! | `mesh` | `uniform` or `cosine_stretched` |
//! | `x_min`, `x_max`, `y_min`, `y_max` | domain bounds |
//! | `re` / `epsilon` | Reynolds number or its inverse (give one) |
//! | `dt`, `end_time`, `steady_tol`, `max_steps` | time marching |
//! | `newton_tol`, `max_newton_iters`, `reuse_jacobian` | Newton control |
//! | `second_derivative` | viscous operator, `assembled` (default) or `global` |
//! | `bc_north`, `bc_south`, `bc_east`, `bc_west` | boundary conditions |
//! | `outputs` | any of `fields`, `centerlines`, `energy` |
//! | `output_dir` | run directory |
//! | `reference_data` | reference CSV files compared after the run |
//!
//! Boundary conditions are written as `wall`, `lid:<speed>`,
//! `velocity:<u>:<v>`, `step_inflow`, `outflow` or `exact` (manufactured
//! solution data).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::basis::{MAX_DEGREE, MIN_DEGREE};
use crate::error::{Error, Result};
use crate::sbp::{SecondDerivative, Segment};
use crate::time::{MarchConfig, NewtonSettings};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseKind {
    Mms,
    Cavity,
    Bfs,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeshKind {
    Uniform,
    CosineStretched,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryCondition {
    Wall,
    /// Tangential wall motion along `+x` (north/south) or `+y` (east/west).
    Lid(f64),
    Velocity(f64, f64),
    /// Parabolic inflow `u = 24 s (1/2 - s)` on the lower half of the side
    /// (`s` = height fraction), wall above.
    StepInflow,
    Outflow,
    /// Manufactured-solution velocity.
    Exact,
}

impl std::str::FromStr for BoundaryCondition {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("'{t}' is not a number"));
        match parts.as_slice() {
            ["wall"] => Ok(BoundaryCondition::Wall),
            ["lid"] => Ok(BoundaryCondition::Lid(1.0)),
            ["lid", v] => Ok(BoundaryCondition::Lid(num(v)?)),
            ["velocity", a, b] => Ok(BoundaryCondition::Velocity(num(a)?, num(b)?)),
            ["step_inflow"] => Ok(BoundaryCondition::StepInflow),
            ["outflow"] => Ok(BoundaryCondition::Outflow),
            ["exact"] => Ok(BoundaryCondition::Exact),
            _ => Err(format!(
                "unknown boundary condition '{s}' (expected wall, lid:<speed>, velocity:<u>:<v>, step_inflow, outflow or exact)"
            )),
        }
    }
}

impl std::fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BoundaryCondition::Wall => write!(f, "wall"),
            BoundaryCondition::Lid(s) => write!(f, "lid:{s}"),
            BoundaryCondition::Velocity(a, b) => write!(f, "velocity:{a}:{b}"),
            BoundaryCondition::StepInflow => write!(f, "step_inflow"),
            BoundaryCondition::Outflow => write!(f, "outflow"),
            BoundaryCondition::Exact => write!(f, "exact"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Outputs {
    pub fields: bool,
    pub centerlines: bool,
    pub energy: bool,
}

impl Outputs {
    pub fn all() -> Self {
        Self {
            fields: true,
            centerlines: true,
            energy: true,
        }
    }
}

/// Fully resolved and validated description of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseConfig {
    pub kind: CaseKind,
    pub degree: usize,
    pub elements: (usize, usize),
    pub mesh: MeshKind,
    /// `(x_min, x_max, y_min, y_max)`
    pub domain: (f64, f64, f64, f64),
    pub epsilon: f64,
    pub dt: f64,
    pub end_time: Option<f64>,
    pub steady_tol: Option<f64>,
    pub max_steps: usize,
    pub newton: NewtonSettings,
    pub second_derivative: SecondDerivative,
    pub boundaries: BTreeMap<Segment, BoundaryCondition>,
    pub outputs: Outputs,
    pub output_dir: PathBuf,
    pub reference_data: Vec<PathBuf>,
}

/// The file format: every field optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub case: Option<String>,
    pub degree: Option<i64>,
    pub elements_x: Option<i64>,
    pub elements_y: Option<i64>,
    pub mesh: Option<String>,
    pub x_min: Option<f64>,
    pub x_max: Option<f64>,
    pub y_min: Option<f64>,
    pub y_max: Option<f64>,
    pub re: Option<f64>,
    pub epsilon: Option<f64>,
    pub dt: Option<f64>,
    pub end_time: Option<f64>,
    pub steady_tol: Option<f64>,
    pub max_steps: Option<i64>,
    pub newton_tol: Option<f64>,
    pub max_newton_iters: Option<i64>,
    pub reuse_jacobian: Option<bool>,
    pub second_derivative: Option<String>,
    pub bc_north: Option<String>,
    pub bc_south: Option<String>,
    pub bc_east: Option<String>,
    pub bc_west: Option<String>,
    pub outputs: Option<Vec<String>>,
    pub output_dir: Option<String>,
    pub reference_data: Option<Vec<String>>,
}

impl CaseConfig {
    /// Lid-driven cavity on the unit square at desk scale: 12x12 stretched
    /// elements of degree 4.
    pub fn cavity(re: f64) -> Self {
        let mut boundaries = walls();
        boundaries.insert(Segment::North, BoundaryCondition::Lid(1.0));
        Self {
            kind: CaseKind::Cavity,
            degree: 4,
            elements: (12, 12),
            mesh: MeshKind::CosineStretched,
            domain: (0.0, 1.0, 0.0, 1.0),
            epsilon: 1.0 / re,
            dt: 0.1,
            end_time: None,
            steady_tol: Some(1e-8),
            max_steps: 20_000,
            newton: NewtonSettings {
                reuse_jacobian: true,
                ..NewtonSettings::default()
            },
            second_derivative: SecondDerivative::default(),
            boundaries,
            outputs: Outputs::all(),
            output_dir: PathBuf::from("runs/cavity"),
            reference_data: Vec::new(),
        }
    }

    /// Backward-facing step on a shortened channel `[0, 15] x [0, 1]`.
    pub fn bfs(re: f64) -> Self {
        let mut boundaries = walls();
        boundaries.insert(Segment::West, BoundaryCondition::StepInflow);
        boundaries.insert(Segment::East, BoundaryCondition::Outflow);
        Self {
            kind: CaseKind::Bfs,
            degree: 4,
            elements: (40, 8),
            mesh: MeshKind::Uniform,
            domain: (0.0, 15.0, 0.0, 1.0),
            epsilon: 1.0 / re,
            dt: 0.1,
            end_time: None,
            steady_tol: Some(1e-8),
            max_steps: 20_000,
            newton: NewtonSettings {
                reuse_jacobian: true,
                ..NewtonSettings::default()
            },
            second_derivative: SecondDerivative::default(),
            boundaries,
            outputs: Outputs::all(),
            output_dir: PathBuf::from("runs/bfs"),
            reference_data: Vec::new(),
        }
    }

    /// Manufactured solution on `[0, 1]^2` with exact data on every side.
    pub fn mms(degree: usize, elements: usize) -> Self {
        let boundaries = Segment::ALL.iter().map(|&s| (s, BoundaryCondition::Exact)).collect();
        Self {
            kind: CaseKind::Mms,
            degree,
            elements: (elements, elements),
            mesh: MeshKind::Uniform,
            domain: (0.0, 1.0, 0.0, 1.0),
            epsilon: 0.1,
            dt: 6.4e-5,
            end_time: Some(0.1),
            steady_tol: None,
            max_steps: usize::MAX,
            newton: NewtonSettings {
                reuse_jacobian: true,
                ..NewtonSettings::default()
            },
            second_derivative: SecondDerivative::default(),
            boundaries,
            outputs: Outputs {
                fields: true,
                centerlines: false,
                energy: true,
            },
            output_dir: PathBuf::from("runs/mms"),
            reference_data: Vec::new(),
        }
    }

    /// Switches to the resolutions used for the published benchmark runs:
    /// 25x25 elements for the cavity, a `[0, 30]` channel with 100x14
    /// elements for the step.
    pub fn paper_scale(mut self) -> Self {
        match self.kind {
            CaseKind::Cavity => self.elements = (25, 25),
            CaseKind::Bfs => {
                self.elements = (100, 14);
                self.domain.1 = self.domain.0 + 30.0;
            }
            CaseKind::Mms | CaseKind::Custom => {}
        }
        self
    }

    pub fn reynolds(&self) -> f64 {
        1.0 / self.epsilon
    }

    pub fn march_config(&self) -> MarchConfig {
        MarchConfig {
            dt: self.dt,
            t0: 0.0,
            end_time: self.end_time,
            steady_tol: self.steady_tol,
            max_steps: self.max_steps,
            newton: self.newton,
            snapshot_every: None,
            log_every: 50,
        }
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml_str(&text)?;
        // Relative reference paths are taken relative to the config file.
        if let Some(dir) = path.parent() {
            for r in &mut cfg.reference_data {
                if r.is_relative() {
                    *r = dir.join(&*r);
                }
            }
        }
        Ok(cfg)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::InvalidConfig(vec![e.to_string()]))?;
        Self::from_raw(raw)
    }

    /// Applies overrides to the selected preset, collecting every problem
    /// before failing.
    pub fn from_raw(raw: RawConfig) -> Result<Self> {
        let mut problems = Vec::new();
        let kind = match raw.case.as_deref().unwrap_or("custom") {
            "cavity" => CaseKind::Cavity,
            "bfs" => CaseKind::Bfs,
            "mms" => CaseKind::Mms,
            "custom" => CaseKind::Custom,
            other => {
                problems.push(format!("case: unknown case '{other}' (expected cavity, bfs, mms or custom)"));
                CaseKind::Custom
            }
        };
        let mut cfg = match kind {
            CaseKind::Cavity => Self::cavity(100.0),
            CaseKind::Bfs => Self::bfs(100.0),
            CaseKind::Mms => Self::mms(4, 6),
            CaseKind::Custom => Self {
                kind: CaseKind::Custom,
                output_dir: PathBuf::from("runs/custom"),
                ..Self::cavity(100.0)
            },
        };

        let mut count = |name: &str, v: Option<i64>, min: i64| -> Option<usize> {
            match v {
                Some(x) if x >= min => Some(x as usize),
                Some(x) => {
                    problems.push(format!("{name}: must be at least {min}, got {x}"));
                    None
                }
                None => None,
            }
        };
        if let Some(k) = count("degree", raw.degree, 0) {
            cfg.degree = k;
        }
        if let Some(e) = count("elements_x", raw.elements_x, 1) {
            cfg.elements.0 = e;
        }
        if let Some(e) = count("elements_y", raw.elements_y, 1) {
            cfg.elements.1 = e;
        }
        if let Some(m) = count("max_steps", raw.max_steps, 1) {
            cfg.max_steps = m;
        }
        if let Some(m) = count("max_newton_iters", raw.max_newton_iters, 1) {
            cfg.newton.max_iters = m;
        }
        if let Some(m) = raw.mesh.as_deref() {
            match m {
                "uniform" => cfg.mesh = MeshKind::Uniform,
                "cosine_stretched" | "stretched" => cfg.mesh = MeshKind::CosineStretched,
                other => problems.push(format!("mesh: unknown mesh kind '{other}' (expected uniform or cosine_stretched)")),
            }
        }
        let d = &mut cfg.domain;
        for (slot, v) in [(&mut d.0, raw.x_min), (&mut d.1, raw.x_max), (&mut d.2, raw.y_min), (&mut d.3, raw.y_max)] {
            if let Some(v) = v {
                *slot = v;
            }
        }
        match (raw.re, raw.epsilon) {
            (Some(_), Some(_)) => problems.push("re and epsilon are mutually exclusive; give one".into()),
            (Some(re), None) if re > 0.0 && re.is_finite() => cfg.epsilon = 1.0 / re,
            (Some(re), None) => problems.push(format!("re: must be positive, got {re}")),
            (None, Some(e)) if e > 0.0 && e.is_finite() => cfg.epsilon = e,
            (None, Some(e)) => problems.push(format!("epsilon: must be positive, got {e}")),
            (None, None) => {}
        }
        if let Some(dt) = raw.dt {
            cfg.dt = dt;
        }
        if raw.end_time.is_some() {
            cfg.end_time = raw.end_time;
            if raw.steady_tol.is_none() {
                cfg.steady_tol = None;
            }
        }
        if raw.steady_tol.is_some() {
            cfg.steady_tol = raw.steady_tol;
        }
        if let Some(t) = raw.newton_tol {
            cfg.newton.tol = t;
        }
        if let Some(r) = raw.reuse_jacobian {
            cfg.newton.reuse_jacobian = r;
        }
        if let Some(f) = raw.second_derivative.as_deref() {
            match f.parse() {
                Ok(form) => cfg.second_derivative = form,
                Err(e) => problems.push(format!("second_derivative: {e}")),
            }
        }
        for (seg, text) in [
            (Segment::North, &raw.bc_north),
            (Segment::South, &raw.bc_south),
            (Segment::East, &raw.bc_east),
            (Segment::West, &raw.bc_west),
        ] {
            if let Some(t) = text {
                match t.parse::<BoundaryCondition>() {
                    Ok(bc) => {
                        cfg.boundaries.insert(seg, bc);
                    }
                    Err(e) => problems.push(format!("bc_{}: {e}", seg.name())),
                }
            }
        }
        if let Some(list) = &raw.outputs {
            let mut o = Outputs::default();
            for item in list {
                match item.as_str() {
                    "fields" => o.fields = true,
                    "centerlines" => o.centerlines = true,
                    "energy" => o.energy = true,
                    other => problems.push(format!("outputs: unknown output '{other}' (expected fields, centerlines or energy)")),
                }
            }
            cfg.outputs = o;
        }
        if let Some(dir) = raw.output_dir {
            cfg.output_dir = PathBuf::from(dir);
        }
        if let Some(refs) = raw.reference_data {
            cfg.reference_data = refs.into_iter().map(PathBuf::from).collect();
        }

        problems.extend(cfg.problems());
        if problems.is_empty() {
            Ok(cfg)
        } else {
            Err(Error::InvalidConfig(problems))
        }
    }

    /// Every inconsistency in an assembled config.
    pub fn problems(&self) -> Vec<String> {
        let mut p = Vec::new();
        if !(MIN_DEGREE..=MAX_DEGREE).contains(&self.degree) {
            p.push(format!("degree: {} outside the supported range {MIN_DEGREE}..={MAX_DEGREE}", self.degree));
        }
        if self.elements.0 == 0 || self.elements.1 == 0 {
            p.push("elements_x and elements_y must be at least 1".into());
        }
        let (x0, x1, y0, y1) = self.domain;
        if !(x1 > x0) || !x0.is_finite() || !x1.is_finite() {
            p.push(format!("x_min/x_max: empty interval [{x0}, {x1}]"));
        }
        if !(y1 > y0) || !y0.is_finite() || !y1.is_finite() {
            p.push(format!("y_min/y_max: empty interval [{y0}, {y1}]"));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            p.push(format!("epsilon: must be positive, got {}", self.epsilon));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            p.push(format!("dt: must be positive, got {}", self.dt));
        }
        if let Some(t) = self.end_time {
            if !(t >= 0.0 && t.is_finite()) {
                p.push(format!("end_time: must be non-negative, got {t}"));
            }
        }
        if let Some(t) = self.steady_tol {
            if !(t > 0.0) {
                p.push(format!("steady_tol: must be positive, got {t}"));
            }
        }
        if self.end_time.is_none() && self.steady_tol.is_none() {
            p.push("one of end_time or steady_tol is required".into());
        }
        if !(self.newton.tol > 0.0) {
            p.push(format!("newton_tol: must be positive, got {}", self.newton.tol));
        }
        for s in Segment::ALL {
            match self.boundaries.get(&s) {
                None => p.push(format!("bc_{}: missing", s.name())),
                Some(BoundaryCondition::Exact) if self.kind != CaseKind::Mms => {
                    p.push(format!("bc_{}: exact data is only available for the mms case", s.name()))
                }
                Some(BoundaryCondition::StepInflow) if s != Segment::West => {
                    p.push(format!("bc_{}: step_inflow is only defined on the west side", s.name()))
                }
                Some(_) => {}
            }
        }
        if self.kind == CaseKind::Mms && self.boundaries.values().any(|b| *b != BoundaryCondition::Exact) {
            p.push("mms case requires exact data on every boundary".into());
        }
        p
    }

    /// Non-fatal remarks about unusual but valid setups.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        for (s, bc) in &self.boundaries {
            if *bc == BoundaryCondition::Outflow && self.kind == CaseKind::Bfs && *s != Segment::East {
                w.push(format!("outflow condition on the {} side of a step case", s.name()));
            }
        }
        w
    }
}

fn walls() -> BTreeMap<Segment, BoundaryCondition> {
    Segment::ALL.iter().map(|&s| (s, BoundaryCondition::Wall)).collect()
}
