//! Implicit BDF time marching with Newton iterations.
//!
//! Each step solves `I~ (alpha W - h) + residual(W, t_new) = 0` where
//! `alpha = 1/dt, h = W^n/dt` for the backward-Euler start-up step and
//! `alpha = 3/(2 dt), h = (4 W^n - W^{n-1})/(2 dt)` for BDF2.

use log::{debug, info};
use sprs::TriMat;

use crate::error::{Error, Result};
use crate::linsolve::{SolveError, SparseLu};
use crate::state::{p_norm_sq, StateVector};
use crate::system::BlockSystem;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonSettings {
    /// Bound on the squared `P`-norm of the Newton update.
    pub tol: f64,
    pub max_iters: usize,
    /// Keep a factorization across iterations and steps until contraction
    /// slows down.
    pub reuse_jacobian: bool,
}

impl Default for NewtonSettings {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iters: 25,
            reuse_jacobian: false,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct NewtonReport {
    pub iterations: usize,
    /// Squared `P`-norm of every update.
    pub update_norms: Vec<f64>,
    /// `P`-norm of the residual before every update.
    pub residual_norms: Vec<f64>,
}

/// Time discretization of one step.
#[derive(Debug, Clone)]
struct BdfStage {
    alpha: f64,
    /// History term `h`, velocity blocks only are used.
    history: StateVector,
}

impl BdfStage {
    fn bdf1(w_curr: &StateVector, dt: f64) -> Self {
        let mut history = w_curr.clone();
        history.as_mut_slice().iter_mut().for_each(|v| *v /= dt);
        Self { alpha: 1.0 / dt, history }
    }

    fn bdf2(w_curr: &StateVector, w_prev: &StateVector, dt: f64) -> Self {
        let data = w_curr
            .as_slice()
            .iter()
            .zip(w_prev.as_slice())
            .map(|(c, p)| (4.0 * c - p) / (2.0 * dt))
            .collect();
        Self {
            alpha: 1.5 / dt,
            history: StateVector::from_vec(data).expect("same length as the state"),
        }
    }

    fn residual(&self, sys: &BlockSystem, w: &StateVector, t: f64) -> StateVector {
        let mut r = sys.residual(w, t);
        let n = sys.n_nodes();
        let (rs, ws, hs) = (r.as_mut_slice(), w.as_slice(), self.history.as_slice());
        for i in 0..2 * n {
            rs[i] += self.alpha * ws[i] - hs[i];
        }
        r
    }
}

/// `I~ (3 W^{n+1} - 4 W^n + W^{n-1}) / (2 dt) + residual(W^{n+1}, t_new)`.
pub fn bdf2_residual(
    sys: &BlockSystem,
    w_new: &StateVector,
    w_curr: &StateVector,
    w_prev: &StateVector,
    dt: f64,
    t_new: f64,
) -> StateVector {
    BdfStage::bdf2(w_curr, w_prev, dt).residual(sys, w_new, t_new)
}

/// Iterations allowed on one factorization before it is refreshed.
const MAX_STALE_ITERS: usize = 4;

/// Newton solver state that survives between steps (factorization cache).
#[derive(Debug, Default)]
pub struct NewtonSolver {
    settings: NewtonSettings,
    lu: SparseLu,
    factored_alpha: Option<f64>,
}

impl NewtonSolver {
    pub fn new(settings: NewtonSettings) -> Self {
        Self {
            settings,
            lu: SparseLu::new(),
            factored_alpha: None,
        }
    }

    pub fn settings(&self) -> &NewtonSettings {
        &self.settings
    }

    pub fn factorizations(&self) -> usize {
        self.lu.factorizations()
    }

    fn factorize(&mut self, sys: &BlockSystem, w: &StateVector, t: f64, alpha: f64) -> std::result::Result<(), SolveError> {
        let n3 = sys.n_unknowns();
        let gauge = sys.pressure_is_floating();
        let dim = if gauge { n3 + 1 } else { n3 };
        let mut tri = TriMat::new((dim, dim));
        sys.jacobian_triplets(w, t, alpha, &mut tri);
        if gauge {
            // Bordered system: fix the first pressure node of the update and
            // let the multiplier absorb the compatibility defect of the
            // constant-pressure null space.
            let k = 2 * sys.n_nodes();
            tri.add_triplet(k, n3, 1.0);
            tri.add_triplet(n3, k, 1.0);
        }
        self.lu.factorize(&tri)?;
        self.factored_alpha = Some(alpha);
        Ok(())
    }

    fn solve_step(
        &mut self,
        sys: &BlockSystem,
        stage: &BdfStage,
        guess: StateVector,
        t_new: f64,
        step: usize,
    ) -> Result<(StateVector, NewtonReport)> {
        let mut w = guess;
        let mut report = NewtonReport::default();
        let mass = sys.mass();
        let n3 = sys.n_unknowns();
        let gauge = sys.pressure_is_floating();
        let singular = |detail: String, iteration: usize| Error::SingularJacobian {
            step,
            iteration,
            detail,
        };
        let mut stale_iters = 0;
        for it in 1..=self.settings.max_iters {
            let r = stage.residual(sys, &w, t_new);
            report.residual_norms.push(p_norm_sq(mass, r.as_slice()).sqrt());
            let slow = report
                .update_norms
                .windows(2)
                .last()
                .is_some_and(|p| p[1] > 0.25 * p[0]);
            let refactor = !self.settings.reuse_jacobian
                || !self.lu.is_factorized()
                || self.factored_alpha != Some(stage.alpha)
                || slow
                || stale_iters >= MAX_STALE_ITERS;
            if refactor {
                self.factorize(sys, &w, t_new, stage.alpha)
                    .map_err(|e| singular(e.to_string(), it))?;
                stale_iters = 0;
            }
            stale_iters += 1;
            let mut rhs: Vec<f64> = r.as_slice().iter().map(|v| -v).collect();
            if gauge {
                rhs.push(0.0);
            }
            self.lu.solve(&mut rhs).map_err(|e| singular(e.to_string(), it))?;
            rhs.truncate(n3);
            let delta = StateVector::from_vec(rhs).expect("3n entries");
            w.axpy(1.0, &delta);
            let norm = p_norm_sq(mass, delta.as_slice());
            report.update_norms.push(norm);
            report.iterations = it;
            if !norm.is_finite() || !w.is_finite() {
                return Err(Error::NonFinite { step, time: t_new });
            }
            if norm < self.settings.tol {
                return Ok((w, report));
            }
        }
        Err(Error::NewtonDiverged {
            step,
            time: t_new,
            iterations: self.settings.max_iters,
            last_update: report.update_norms.last().copied().unwrap_or(f64::NAN),
        })
    }
}

/// One BDF2 step from `(w_prev, w_curr)` with `w_curr` as the initial guess.
pub fn newton_solve(
    sys: &BlockSystem,
    solver: &mut NewtonSolver,
    w_curr: &StateVector,
    w_prev: &StateVector,
    dt: f64,
    t_new: f64,
) -> Result<(StateVector, NewtonReport)> {
    let stage = BdfStage::bdf2(w_curr, w_prev, dt);
    solver.solve_step(sys, &stage, w_curr.clone(), t_new, 0)
}

/// Backward-Euler step producing the second starting level for BDF2.
pub fn startup_step(
    sys: &BlockSystem,
    solver: &mut NewtonSolver,
    w_initial: &StateVector,
    dt: f64,
    t0: f64,
) -> Result<(StateVector, NewtonReport)> {
    let stage = BdfStage::bdf1(w_initial, dt);
    solver.solve_step(sys, &stage, w_initial.clone(), t0 + dt, 1)
}

/// Fixed state of a march in progress.
#[derive(Debug, Clone)]
pub struct TimeStepperState {
    pub w_prev: Option<StateVector>,
    pub w_curr: StateVector,
    pub dt: f64,
    pub step_index: usize,
    pub time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarchConfig {
    pub dt: f64,
    pub t0: f64,
    /// Stop after reaching this time (rounded to a whole number of steps).
    pub end_time: Option<f64>,
    /// Stop once `|W^{n+1} - W^n|_P` falls below this.
    pub steady_tol: Option<f64>,
    pub max_steps: usize,
    pub newton: NewtonSettings,
    /// Keep every `k`-th state (and the final one).
    pub snapshot_every: Option<usize>,
    /// Emit an info log line every this many steps.
    pub log_every: usize,
}

impl Default for MarchConfig {
    fn default() -> Self {
        Self {
            dt: 0.1,
            t0: 0.0,
            end_time: None,
            steady_tol: Some(1e-8),
            max_steps: 100_000,
            newton: NewtonSettings::default(),
            snapshot_every: None,
            log_every: 100,
        }
    }
}

impl MarchConfig {
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            problems.push(format!("dt must be positive, got {}", self.dt));
        }
        if let Some(t) = self.end_time {
            if !(t >= 0.0 && t.is_finite()) {
                problems.push(format!("end_time must be non-negative, got {t}"));
            }
        }
        if let Some(s) = self.steady_tol {
            if !(s > 0.0) {
                problems.push(format!("steady_tol must be positive, got {s}"));
            }
        }
        if self.end_time.is_none() && self.steady_tol.is_none() {
            problems.push("either end_time or steady_tol is required".into());
        }
        if !(self.newton.tol > 0.0) {
            problems.push(format!("newton_tol must be positive, got {}", self.newton.tol));
        }
        if self.newton.max_iters == 0 {
            problems.push("max_newton_iters must be at least 1".into());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(problems))
        }
    }

    fn step_limit(&self) -> usize {
        match self.end_time {
            Some(t) => ((t / self.dt) - 1e-9).ceil().max(0.0) as usize,
            None => self.max_steps,
        }
        .min(self.max_steps)
    }
}

#[derive(Debug, Clone)]
pub struct MarchResult {
    pub state: StateVector,
    pub time: f64,
    pub steps: usize,
    /// Whether the steady criterion was met.
    pub steady: bool,
    /// `|W^{n+1} - W^n|_P` of the last step.
    pub last_change: f64,
    /// `(t, energy)` including the initial state.
    pub energy: Vec<(f64, f64)>,
    pub newton_iterations: Vec<usize>,
    pub snapshots: Vec<(f64, StateVector)>,
}

/// Marches from `initial` until the end time or the steady criterion.
pub fn march(sys: &BlockSystem, config: &MarchConfig, initial: StateVector) -> Result<MarchResult> {
    config.validate()?;
    if initial.len() != sys.n_unknowns() {
        return Err(Error::DimensionMismatch {
            expected: sys.n_unknowns(),
            actual: initial.len(),
        });
    }
    let mass = sys.mass();
    let limit = config.step_limit();
    let mut solver = NewtonSolver::new(config.newton);
    let mut stepper = TimeStepperState {
        w_prev: None,
        w_curr: initial,
        dt: config.dt,
        step_index: 0,
        time: config.t0,
    };
    let mut out = MarchResult {
        state: stepper.w_curr.clone(),
        time: config.t0,
        steps: 0,
        steady: false,
        last_change: f64::NAN,
        energy: vec![(config.t0, sys.discrete_energy(&stepper.w_curr))],
        newton_iterations: Vec::new(),
        snapshots: Vec::new(),
    };
    if config.snapshot_every.is_some() {
        out.snapshots.push((config.t0, stepper.w_curr.clone()));
    }
    while stepper.step_index < limit {
        let step = stepper.step_index + 1;
        let t_new = config.t0 + step as f64 * config.dt;
        let stage = match &stepper.w_prev {
            None => BdfStage::bdf1(&stepper.w_curr, config.dt),
            Some(prev) => BdfStage::bdf2(&stepper.w_curr, prev, config.dt),
        };
        let (w_new, report) = solver.solve_step(sys, &stage, stepper.w_curr.clone(), t_new, step)?;
        let diff: Vec<f64> = w_new
            .as_slice()
            .iter()
            .zip(stepper.w_curr.as_slice())
            .map(|(a, b)| a - b)
            .collect();
        let change = p_norm_sq(mass, &diff).sqrt();
        let energy = sys.discrete_energy(&w_new);
        debug!(
            "step {step} t={t_new:.6} newton={} update={:.3e} change={change:.3e} energy={energy:.10e}",
            report.iterations,
            report.update_norms.last().copied().unwrap_or(0.0)
        );
        if config.log_every > 0 && step % config.log_every == 0 {
            info!(
                "step {step} t={t_new:.4} newton={} residual={:.3e} change={change:.3e} energy={energy:.6e}",
                report.iterations,
                report.residual_norms.last().copied().unwrap_or(0.0)
            );
        }
        out.energy.push((t_new, energy));
        out.newton_iterations.push(report.iterations);
        stepper.w_prev = Some(std::mem::replace(&mut stepper.w_curr, w_new));
        stepper.step_index = step;
        stepper.time = t_new;
        out.last_change = change;
        if let Some(k) = config.snapshot_every {
            if step % k.max(1) == 0 {
                out.snapshots.push((t_new, stepper.w_curr.clone()));
            }
        }
        if config.steady_tol.is_some_and(|tol| change < tol) {
            out.steady = true;
            break;
        }
    }
    if let Some(k) = config.snapshot_every {
        if stepper.step_index % k.max(1) != 0 {
            out.snapshots.push((stepper.time, stepper.w_curr.clone()));
        }
    }
    info!(
        "march finished: {} steps, t={:.6}, steady={}, last change {:.3e}, {} factorizations",
        stepper.step_index,
        stepper.time,
        out.steady,
        out.last_change,
        solver.factorizations()
    );
    out.state = stepper.w_curr;
    out.time = stepper.time;
    out.steps = stepper.step_index;
    Ok(out)
}
