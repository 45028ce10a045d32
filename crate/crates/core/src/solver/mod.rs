//! Time integration of the coupled system
//!
//! ```text
//! u_t = (g(θ) u_x + h(θ) θ_t)_x
//! θ_tt + (γ1 − h²/g) θ_t = c (c θ_x)_x − h J,   J = u_x + (h/g) θ_t
//! ```
//!
//! The wave part is evolved in the Riemann invariants `R = θ_t + c θ_x` and
//! `S = θ_t − c θ_x` by upwind transport (see [`Transport`]); the heat part by a semi-implicit three-point scheme. One step is a
//! plain splitting: evaluate `J`, advance `(θ, R, S)`, then advance `u`.

mod heat;
mod wave;

use alloc::vec;
use alloc::vec::Vec;

use crate::diagnostics::{
    self, blowup_bound_t, detect_blowup, BlowupReport, CharacteristicTracer, DiagnosticsRecord,
    InitialReport, TriggerRule,
};
use crate::initial_data::{build_initial_state, InitialProfile};
use crate::material::{Coefficients, LeslieMaterial, MaterialBounds};
use crate::Error;

/// Uniform 1-D mesh with `nx` nodes on `[x_min, x_max]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, nx: usize) -> Result<Self, Error> {
        if nx < 16 {
            return Err(Error::InvalidParameter {
                name: "nx",
                value: nx as f64,
            });
        }
        if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
            return Err(Error::InvalidParameter {
                name: "x_max - x_min",
                value: x_max - x_min,
            });
        }
        Ok(Grid { x_min, x_max, nx })
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    /// Index of the node nearest to `x`, clamped to the mesh.
    pub fn nearest(&self, x: f64) -> usize {
        let s = libm::round((x - self.x_min) / self.dx());
        if s <= 0.0 {
            0
        } else {
            (s as usize).min(self.nx - 1)
        }
    }
}

/// Fields at time `t`. `θ_t = (R + S)/2` and `c(θ) θ_x = (R − S)/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    pub t: f64,
    pub theta: Vec<f64>,
    pub u: Vec<f64>,
    pub r: Vec<f64>,
    pub s: Vec<f64>,
}

impl State {
    pub fn zeros(grid: &Grid, theta: f64) -> Self {
        let n = grid.nx;
        State {
            t: 0.0,
            theta: vec![theta; n],
            u: vec![0.0; n],
            r: vec![0.0; n],
            s: vec![0.0; n],
        }
    }

    pub fn theta_t(&self, i: usize) -> f64 {
        0.5 * (self.r[i] + self.s[i])
    }

    /// `θ_x = (R − S) / (2c)` for the given wave speed at node `i`.
    pub fn theta_x(&self, i: usize, c: f64) -> f64 {
        0.5 * (self.r[i] - self.s[i]) / c
    }

    pub fn first_non_finite(&self) -> Option<(&'static str, usize)> {
        let fields: [(&'static str, &[f64]); 4] = [
            ("theta", &self.theta),
            ("u", &self.u),
            ("R", &self.r),
            ("S", &self.s),
        ];
        fields
            .into_iter()
            .find_map(|(name, v)| v.iter().position(|x| !x.is_finite()).map(|i| (name, i)))
    }
}

/// Spatial discretisation of the transport terms in the wave step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Transport {
    /// First-order upwind with the explicit midpoint rule.
    #[default]
    Upwind1,
    /// Fifth-order upwind-biased stencil with three-stage SSP Runge-Kutta.
    Upwind5,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    /// Courant number, in `(0, 0.9]`.
    pub cfl: f64,
    pub t_end: f64,
    /// Steps between stored snapshots; 0 keeps only the first and last.
    pub snapshot_stride: usize,
    /// `sup|S|` trigger; `None` means `blowup_factor · sup|S(·, 0)|`.
    pub blowup_threshold: Option<f64>,
    pub blowup_factor: f64,
    /// Stop when `sup|θ_x| > 1 / (K dx)`.
    pub gradient_resolution_factor: f64,
    /// Implicitness of the diffusion step: 0.5 is Crank–Nicolson, 1 is
    /// implicit Euler.
    pub heat_weight: f64,
    /// Foot of the traced forward characteristic.
    pub trace_start: f64,
    pub transport: Transport,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            cfl: 0.4,
            t_end: 1.0,
            snapshot_stride: 0,
            blowup_threshold: None,
            blowup_factor: 50.0,
            gradient_resolution_factor: 8.0,
            heat_weight: 0.5,
            trace_start: 0.0,
            transport: Transport::Upwind1,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), Error> {
        let checks: [(&'static str, f64, bool); 6] = [
            ("cfl", self.cfl, self.cfl > 0.0 && self.cfl <= 0.9),
            (
                "t_end",
                self.t_end,
                self.t_end > 0.0 && self.t_end.is_finite(),
            ),
            (
                "blowup_factor",
                self.blowup_factor,
                self.blowup_factor > 0.0,
            ),
            (
                "gradient_resolution_factor",
                self.gradient_resolution_factor,
                self.gradient_resolution_factor > 0.0,
            ),
            (
                "heat_weight",
                self.heat_weight,
                (0.5..=1.0).contains(&self.heat_weight),
            ),
            (
                "trace_start",
                self.trace_start,
                self.trace_start.is_finite(),
            ),
        ];
        for (name, value, ok) in checks {
            if !ok {
                return Err(Error::InvalidParameter { name, value });
            }
        }
        match self.blowup_threshold {
            Some(v) if !(v > 0.0) => Err(Error::InvalidParameter {
                name: "blowup_threshold",
                value: v,
            }),
            _ => Ok(()),
        }
    }
}

/// Full-field dump. `j` is `J` evaluated from the same fields.
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub step: usize,
    pub t: f64,
    pub theta: Vec<f64>,
    pub u: Vec<f64>,
    pub r: Vec<f64>,
    pub s: Vec<f64>,
    pub j: Vec<f64>,
}

impl Snapshot {
    pub fn capture(step: usize, state: &State, j: &[f64]) -> Self {
        Snapshot {
            step,
            t: state.t,
            theta: state.theta.clone(),
            u: state.u.clone(),
            r: state.r.clone(),
            s: state.s.clone(),
            j: j.to_vec(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub initial: InitialReport,
    /// One record per step, starting with `t = 0`.
    pub records: Vec<DiagnosticsRecord>,
    pub snapshots: Vec<Snapshot>,
    pub report: BlowupReport,
    /// Last state with finite fields.
    pub final_state: State,
}

/// Owns the material, mesh, configuration and scratch buffers of a run.
#[derive(Clone, Debug)]
pub struct Solver {
    pub material: LeslieMaterial,
    pub grid: Grid,
    pub config: SolverConfig,
    pub bounds: MaterialBounds,
    j: Vec<f64>,
    /// Coefficients of the `θ` last passed to [`Self::refresh_j`] or
    /// produced by a step.
    coefs: Vec<Coefficients>,
    wave: wave::Scratch,
    heat: heat::Scratch,
}

impl Solver {
    pub fn new(material: LeslieMaterial, grid: Grid, config: SolverConfig) -> Result<Self, Error> {
        config.validate()?;
        let bounds = material.default_bounds()?;
        Ok(Solver {
            material,
            grid,
            config,
            bounds,
            j: vec![0.0; grid.nx],
            coefs: vec![material.coefficients(0.0); grid.nx],
            wave: wave::Scratch::new(grid.nx),
            heat: heat::Scratch::new(grid.nx),
        })
    }

    /// `cfl · dx / max_i c(θ_i)`, capped by `0.5 / max(γ1 − h²/g)` and by
    /// the time left to `t_end`.
    pub fn cfl_dt(&self, state: &State) -> f64 {
        let c_max = state
            .theta
            .iter()
            .map(|&th| self.material.coefficients(th).c)
            .fold(0.0, f64::max);
        self.dt_for(c_max, state.t)
    }

    fn dt_for(&self, c_max: f64, t: f64) -> f64 {
        let mut dt = self.config.cfl * self.grid.dx() / c_max;
        dt = dt.min(0.5 / self.bounds.damping_sup);
        let left = self.config.t_end - t;
        if left > 0.0 && left < dt {
            dt = left;
        }
        dt
    }

    /// Advances `(θ, R, S)` by `dt` with `J` held fixed.
    pub fn wave_substep(&mut self, state: &mut State, j: &[f64], dt: f64) -> Result<(), Error> {
        self.load_coefficients(state);
        self.wave_from_cache(state, j, dt)
    }

    fn wave_from_cache(&mut self, state: &mut State, j: &[f64], dt: f64) -> Result<(), Error> {
        let scheme = self.config.transport;
        wave::advance(
            &mut self.wave,
            scheme,
            &self.material,
            &self.coefs,
            self.grid.dx(),
            state,
            j,
            dt,
        )
    }

    /// Advances `u` by `dt` using the current `θ` and `θ_t`.
    pub fn heat_substep(&mut self, state: &mut State, dt: f64) -> Result<(), Error> {
        self.load_coefficients(state);
        self.heat_from_cache(state, dt)
    }

    fn heat_from_cache(&mut self, state: &mut State, dt: f64) -> Result<(), Error> {
        let dx = self.grid.dx();
        heat::advance(
            &mut self.heat,
            &self.coefs,
            dx,
            state,
            dt,
            self.config.heat_weight,
        )
    }

    fn load_coefficients(&mut self, state: &State) {
        for (slot, &th) in self.coefs.iter_mut().zip(&state.theta) {
            *slot = self.material.coefficients(th);
        }
    }

    /// `J` evaluated from the fields of the last call to [`Self::refresh_j`]
    /// or [`Self::step`].
    pub fn j(&self) -> &[f64] {
        &self.j
    }

    pub fn refresh_j(&mut self, state: &State) {
        self.load_coefficients(state);
        diagnostics::compute_j_from(state, &self.coefs, &self.grid, &mut self.j);
    }

    /// One splitting step of size `dt`; leaves [`Self::j`] consistent with
    /// the new fields.
    pub fn step_by(&mut self, state: &mut State, dt: f64) -> Result<(), Error> {
        self.refresh_j(state);
        self.step_synced(state, dt)
    }

    /// As [`Self::step_by`] for a state whose coefficients and `J` are
    /// already cached.
    fn step_synced(&mut self, state: &mut State, dt: f64) -> Result<(), Error> {
        let j = core::mem::take(&mut self.j);
        let wave = self.wave_from_cache(state, &j, dt);
        self.j = j;
        wave?;
        self.load_coefficients(state);
        self.heat_from_cache(state, dt)?;
        state.t += dt;
        if let Some((field, index)) = state.first_non_finite() {
            return Err(Error::NonFinite { field, index });
        }
        diagnostics::compute_j_from(state, &self.coefs, &self.grid, &mut self.j);
        Ok(())
    }

    /// One step at the CFL time step. Returns the step size used.
    pub fn step(&mut self, state: &mut State) -> Result<f64, Error> {
        let dt = self.cfl_dt(state);
        self.step_by(state, dt)?;
        Ok(dt)
    }

    fn cached_dt(&self, t: f64) -> f64 {
        self.dt_for(self.coefs.iter().map(|k| k.c).fold(0.0, f64::max), t)
    }

    fn record(
        &self,
        state: &State,
        step: usize,
        dt: f64,
        tracer: &CharacteristicTracer,
    ) -> DiagnosticsRecord {
        let gamma1 = self.material.gamma1;
        diagnostics::record_from(
            state,
            gamma1,
            &self.coefs,
            &self.grid,
            &self.j,
            step,
            dt,
            tracer,
        )
    }
}

/// Integrates `profile` until `t_end` or a blowup trigger.
pub fn run<P: InitialProfile + ?Sized>(
    profile: &P,
    material: &LeslieMaterial,
    grid: &Grid,
    config: &SolverConfig,
) -> Result<RunResult, Error> {
    run_with(profile, material, grid, config, |_, _| {})
}

/// As [`run`], calling `observer` after every recorded step (including the
/// initial state).
pub fn run_with<P, F>(
    profile: &P,
    material: &LeslieMaterial,
    grid: &Grid,
    config: &SolverConfig,
    mut observer: F,
) -> Result<RunResult, Error>
where
    P: InitialProfile + ?Sized,
    F: FnMut(&State, &DiagnosticsRecord),
{
    let mut solver = Solver::new(*material, *grid, *config)?;
    let (mut state, initial) = build_initial_state(profile, material, grid, config.t_end)?;
    let rule = TriggerRule::new(config, grid, initial.sup_abs_s);

    solver.refresh_j(&state);
    let mut tracer = CharacteristicTracer::new(config.trace_start, &state, material, grid)?;
    let mut records = Vec::new();
    let first = solver.record(&state, 0, 0.0, &tracer);
    observer(&state, &first);
    records.push(first);
    let mut snapshots = vec![Snapshot::capture(0, &state, solver.j())];

    let mut step = 0;
    let mut last_good = state.clone();
    while state.t < config.t_end * (1.0 - 1e-14) {
        let dt = solver.cached_dt(state.t);
        tracer.predict(&state, dt, material, grid)?;
        step += 1;
        match solver.step_synced(&mut state, dt) {
            Ok(()) => {}
            Err(Error::NonFinite { .. }) => {
                let mut rec = *records.last().expect("initial record");
                rec.step = step;
                rec.t = state.t;
                rec.dt = dt;
                rec.sup_abs_s = f64::NAN;
                records.push(rec);
                break;
            }
            Err(e) => return Err(e),
        }
        tracer.correct(&state, material, grid)?;
        let rec = solver.record(&state, step, dt, &tracer);
        observer(&state, &rec);
        records.push(rec);
        let stride_hit = config.snapshot_stride > 0 && step % config.snapshot_stride == 0;
        if rule.check(&rec).is_some() {
            snapshots.push(Snapshot::capture(step, &state, solver.j()));
            break;
        }
        last_good.clone_from(&state);
        if stride_hit {
            snapshots.push(Snapshot::capture(step, &state, solver.j()));
        }
    }
    let final_state = if state.first_non_finite().is_none() {
        state
    } else {
        last_good
    };
    let last_step = records.len() - 1;
    let final_finite = records
        .last()
        .map(DiagnosticsRecord::is_finite)
        .unwrap_or(false);
    if final_finite && snapshots.last().map(|s| s.step) != Some(last_step) {
        solver.refresh_j(&final_state);
        snapshots.push(Snapshot::capture(last_step, &final_state, solver.j()));
    }

    let r_cap = 10.0 * initial.sup_abs_r + 1.0;
    let report = detect_blowup(&records, &rule, blowup_bound_t(material)?, r_cap);
    Ok(RunResult {
        initial,
        records,
        snapshots,
        report,
        final_state,
    })
}
