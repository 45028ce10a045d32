//! Observables of a run: the energy
//!
//! ```text
//! E(t) = ½ ∫ θ_t² + c(θ)² θ_x² + u² dx,      dE/dt = −D,
//! D(t) = ∫ b(θ) u_x² + γ1 (θ_t + (h/γ1) u_x)² dx,   b = g − h²/γ1,
//! ```
//!
//! the combination `J = u_x + (h/g) θ_t`, the forward characteristic
//! `dξ/dt = c(θ(ξ, t))` from `ξ(0) = 0` with `S̃ = e^p S`,
//! `p = ½ ∫ (γ1 − h²/g) dt` along it, the blowup bound
//! `T = min{2 ln 2 / ‖γ1 − h²/g‖∞, 1}`, and blowup detection.

use alloc::vec::Vec;
use core::f64::consts::LN_2;
use core::fmt;

use crate::material::{Coefficients, LeslieMaterial};
use crate::numerics::{interpolate, trapezoid};
use crate::solver::{Grid, Snapshot, SolverConfig, State};
use crate::Error;

/// `u_x` at node `i`: central inside, one-sided at the ends.
#[inline]
fn u_x(u: &[f64], i: usize, dx: f64) -> f64 {
    let n = u.len();
    if i == 0 {
        (u[1] - u[0]) / dx
    } else if i + 1 == n {
        (u[n - 1] - u[n - 2]) / dx
    } else {
        (u[i + 1] - u[i - 1]) / (2.0 * dx)
    }
}

pub fn energy(state: &State, material: &LeslieMaterial, grid: &Grid) -> f64 {
    let _ = material;
    let density: Vec<f64> = (0..grid.nx)
        .map(|i| {
            let (r, s, u) = (state.r[i], state.s[i], state.u[i]);
            0.5 * (0.5 * (r * r + s * s) + u * u)
        })
        .collect();
    trapezoid(&density, grid.dx())
}

/// `D ≥ 0`, so that `dE/dt = −D`.
pub fn dissipation(state: &State, material: &LeslieMaterial, grid: &Grid) -> f64 {
    let dx = grid.dx();
    let density: Vec<f64> = (0..grid.nx)
        .map(|i| {
            dissipation_density(
                material,
                state.theta[i],
                state.theta_t(i),
                u_x(&state.u, i, dx),
            )
        })
        .collect();
    trapezoid(&density, dx)
}

#[inline]
fn dissipation_density(material: &LeslieMaterial, theta: f64, theta_t: f64, ux: f64) -> f64 {
    let h = material.h(theta);
    let g = material.g(theta);
    let gamma1 = material.gamma1;
    let b = g - h * h / gamma1;
    let mixed = theta_t + h / gamma1 * ux;
    b * ux * ux + gamma1 * mixed * mixed
}

pub fn compute_j(state: &State, material: &LeslieMaterial, grid: &Grid) -> Vec<f64> {
    let mut j = alloc::vec![0.0; grid.nx];
    compute_j_into(state, material, grid, &mut j);
    j
}

pub fn compute_j_into(state: &State, material: &LeslieMaterial, grid: &Grid, out: &mut [f64]) {
    let dx = grid.dx();
    for (i, slot) in out.iter_mut().enumerate() {
        let k = material.coefficients(state.theta[i]);
        *slot = u_x(&state.u, i, dx) + k.h / k.g * state.theta_t(i);
    }
}

/// As [`compute_j_into`] with the coefficients of `state.theta` given.
pub fn compute_j_from(state: &State, coefs: &[Coefficients], grid: &Grid, out: &mut [f64]) {
    let dx = grid.dx();
    for (i, slot) in out.iter_mut().enumerate() {
        let k = coefs[i];
        *slot = u_x(&state.u, i, dx) + k.h / k.g * state.theta_t(i);
    }
}

/// `T = min{2 ln 2 / max(γ1 − h²/g), 1}`.
pub fn blowup_bound_t(material: &LeslieMaterial) -> Result<f64, Error> {
    let bounds = material.default_bounds()?;
    Ok(bound_from_damping_sup(bounds.damping_sup))
}

pub fn bound_from_damping_sup(damping_sup: f64) -> f64 {
    (2.0 * LN_2 / damping_sup).min(1.0)
}

/// Diagnostics of the sampled initial data.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InitialReport {
    pub energy: f64,
    pub sup_abs_j: f64,
    pub sup_abs_r: f64,
    pub sup_abs_s: f64,
    /// `S(0, 0)` by linear interpolation (NaN if 0 is outside the mesh).
    pub s_at_origin: f64,
    /// `∫ R² + S² dx`.
    pub riemann_l2: f64,
}

pub fn initial_report(state: &State, material: &LeslieMaterial, grid: &Grid) -> InitialReport {
    let j = compute_j(state, material, grid);
    let sup = |v: &[f64]| v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let squares: Vec<f64> = state
        .r
        .iter()
        .zip(&state.s)
        .map(|(r, s)| r * r + s * s)
        .collect();
    InitialReport {
        energy: energy(state, material, grid),
        sup_abs_j: sup(&j),
        sup_abs_r: sup(&state.r),
        sup_abs_s: sup(&state.s),
        s_at_origin: interpolate(&state.s, grid.x_min, grid.dx(), 0.0).unwrap_or(f64::NAN),
        riemann_l2: trapezoid(&squares, grid.dx()),
    }
}

/// Per-step scalars.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiagnosticsRecord {
    pub step: usize,
    pub t: f64,
    /// Step size that led to this record (0 for the initial record).
    pub dt: f64,
    pub energy: f64,
    pub dissipation: f64,
    pub sup_abs_s: f64,
    pub sup_abs_r: f64,
    pub sup_abs_j: f64,
    pub sup_abs_theta_x: f64,
    pub max_theta_t: f64,
    pub argmax_theta_t: usize,
    pub min_theta_x: f64,
    pub argmin_theta_x: usize,
    pub xi: f64,
    pub s_on_xi: f64,
    pub tilde_s_on_xi: f64,
    pub p_on_xi: f64,
}

impl DiagnosticsRecord {
    pub fn is_finite(&self) -> bool {
        [
            self.energy,
            self.dissipation,
            self.sup_abs_s,
            self.sup_abs_r,
            self.sup_abs_j,
            self.sup_abs_theta_x,
        ]
        .iter()
        .all(|v| v.is_finite())
    }
}

/// Computes a full record in one pass over the mesh.
pub fn record(
    state: &State,
    material: &LeslieMaterial,
    grid: &Grid,
    j: &[f64],
    step: usize,
    dt: f64,
    tracer: &CharacteristicTracer,
) -> DiagnosticsRecord {
    let coefs: Vec<Coefficients> = state
        .theta
        .iter()
        .map(|&th| material.coefficients(th))
        .collect();
    record_from(state, material.gamma1, &coefs, grid, j, step, dt, tracer)
}

/// As [`record`] with the coefficients of `state.theta` given.
#[allow(clippy::too_many_arguments)]
pub fn record_from(
    state: &State,
    gamma1: f64,
    coefs: &[Coefficients],
    grid: &Grid,
    j: &[f64],
    step: usize,
    dt: f64,
    tracer: &CharacteristicTracer,
) -> DiagnosticsRecord {
    let dx = grid.dx();
    let n = grid.nx;
    let mut rec = DiagnosticsRecord {
        step,
        t: state.t,
        dt,
        energy: 0.0,
        dissipation: 0.0,
        sup_abs_s: 0.0,
        sup_abs_r: 0.0,
        sup_abs_j: 0.0,
        sup_abs_theta_x: 0.0,
        max_theta_t: f64::NEG_INFINITY,
        argmax_theta_t: 0,
        min_theta_x: f64::INFINITY,
        argmin_theta_x: 0,
        xi: tracer.xi,
        s_on_xi: tracer.s_on_xi,
        tilde_s_on_xi: tracer.tilde_s_on_xi,
        p_on_xi: tracer.p,
    };
    for i in 0..n {
        let (r, s, u) = (state.r[i], state.s[i], state.u[i]);
        let k = coefs[i];
        let theta_t = 0.5 * (r + s);
        let theta_x = 0.5 * (r - s) / k.c;
        let ux = u_x(&state.u, i, dx);
        let w = if i == 0 || i + 1 == n { 0.5 } else { 1.0 };

        rec.energy += w * 0.5 * (0.5 * (r * r + s * s) + u * u);
        let mixed = theta_t + k.h / gamma1 * ux;
        rec.dissipation += w * ((k.g - k.h * k.h / gamma1) * ux * ux + gamma1 * mixed * mixed);

        rec.sup_abs_s = rec.sup_abs_s.max(s.abs());
        rec.sup_abs_r = rec.sup_abs_r.max(r.abs());
        rec.sup_abs_j = rec.sup_abs_j.max(j[i].abs());
        rec.sup_abs_theta_x = rec.sup_abs_theta_x.max(theta_x.abs());
        if theta_t > rec.max_theta_t {
            rec.max_theta_t = theta_t;
            rec.argmax_theta_t = i;
        }
        if theta_x < rec.min_theta_x {
            rec.min_theta_x = theta_x;
            rec.argmin_theta_x = i;
        }
    }
    rec.energy *= dx;
    rec.dissipation *= dx;
    // f64::max drops NaN, so propagate it explicitly
    if state.first_non_finite().is_some() {
        rec.sup_abs_s = f64::NAN;
    }
    rec
}

/// Forward characteristic `dξ/dt = c(θ(ξ, t))`, advanced by the explicit
/// midpoint rule with `θ` interpolated linearly in space and time. The
/// damping integral `p` is accumulated by the trapezoid rule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CharacteristicTracer {
    pub t: f64,
    pub xi: f64,
    pub p: f64,
    pub s_on_xi: f64,
    pub tilde_s_on_xi: f64,
    pending: Option<Pending>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Pending {
    dt: f64,
    xi_half: f64,
    theta_half_old: f64,
    rate_old: f64,
}

/// One point of a traced characteristic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TracePoint {
    pub t: f64,
    pub xi: f64,
    pub s_on_xi: f64,
    pub tilde_s_on_xi: f64,
    pub p: f64,
}

fn sample(values: &[f64], grid: &Grid, x: f64, t: f64) -> Result<f64, Error> {
    interpolate(values, grid.x_min, grid.dx(), x).ok_or(Error::CharacteristicLeftDomain { t, x })
}

impl CharacteristicTracer {
    pub fn new(
        start: f64,
        state: &State,
        material: &LeslieMaterial,
        grid: &Grid,
    ) -> Result<Self, Error> {
        let _ = material;
        let s = sample(&state.s, grid, start, state.t)?;
        Ok(CharacteristicTracer {
            t: state.t,
            xi: start,
            p: 0.0,
            s_on_xi: s,
            tilde_s_on_xi: s,
            pending: None,
        })
    }

    pub fn point(&self) -> TracePoint {
        TracePoint {
            t: self.t,
            xi: self.xi,
            s_on_xi: self.s_on_xi,
            tilde_s_on_xi: self.tilde_s_on_xi,
            p: self.p,
        }
    }

    /// First half of a step, evaluated on the state at the old time.
    pub fn predict(
        &mut self,
        state: &State,
        dt: f64,
        material: &LeslieMaterial,
        grid: &Grid,
    ) -> Result<(), Error> {
        let theta = sample(&state.theta, grid, self.xi, state.t)?;
        let k = material.coefficients(theta);
        let xi_half = self.xi + 0.5 * dt * k.c;
        let theta_half_old = sample(&state.theta, grid, xi_half, state.t)?;
        self.pending = Some(Pending {
            dt,
            xi_half,
            theta_half_old,
            rate_old: 0.5 * k.damping,
        });
        Ok(())
    }

    /// Completes the step on the state at the new time.
    pub fn correct(
        &mut self,
        state: &State,
        material: &LeslieMaterial,
        grid: &Grid,
    ) -> Result<(), Error> {
        let Some(pending) = self.pending.take() else {
            return Ok(());
        };
        let theta_half_new = sample(&state.theta, grid, pending.xi_half, state.t)?;
        let theta_mid = 0.5 * (pending.theta_half_old + theta_half_new);
        self.xi += pending.dt * material.coefficients(theta_mid).c;
        let theta = sample(&state.theta, grid, self.xi, state.t)?;
        let rate_new = 0.5 * material.coefficients(theta).damping;
        self.p += 0.5 * pending.dt * (pending.rate_old + rate_new);
        self.s_on_xi = sample(&state.s, grid, self.xi, state.t)?;
        self.tilde_s_on_xi = libm::exp(self.p) * self.s_on_xi;
        self.t = state.t;
        Ok(())
    }
}

/// Traces the forward characteristic from `start` through a sequence of
/// snapshots. Consecutive snapshots must be less than one cell apart along
/// the characteristic.
pub fn trace_characteristic(
    snapshots: &[Snapshot],
    material: &LeslieMaterial,
    grid: &Grid,
    start: f64,
) -> Result<Vec<TracePoint>, Error> {
    let as_state = |snap: &Snapshot| State {
        t: snap.t,
        theta: snap.theta.clone(),
        u: snap.u.clone(),
        r: snap.r.clone(),
        s: snap.s.clone(),
    };
    let Some(first) = snapshots.first() else {
        return Ok(Vec::new());
    };
    let mut prev = as_state(first);
    let mut tracer = CharacteristicTracer::new(start, &prev, material, grid)?;
    let mut path = alloc::vec![tracer.point()];
    for snap in &snapshots[1..] {
        let dt = snap.t - prev.t;
        let c_max = prev
            .theta
            .iter()
            .map(|&th| material.coefficients(th).c)
            .fold(0.0, f64::max);
        let cells = c_max * dt / grid.dx();
        if cells >= 1.0 {
            return Err(Error::SnapshotsTooSparse {
                cells_per_interval: cells,
            });
        }
        tracer.predict(&prev, dt, material, grid)?;
        let next = as_state(snap);
        tracer.correct(&next, material, grid)?;
        path.push(tracer.point());
        prev = next;
    }
    Ok(path)
}

/// Why a run stopped early.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Trigger {
    /// `sup|S|` exceeded the threshold.
    SThreshold,
    /// `sup|θ_x|` exceeded `1 / (K dx)`.
    GradientResolution,
    NonFinite,
}

impl Trigger {
    pub fn name(self) -> &'static str {
        match self {
            Trigger::SThreshold => "s-threshold",
            Trigger::GradientResolution => "gradient-resolution",
            Trigger::NonFinite => "non-finite",
        }
    }
}

impl fmt::Display for Trigger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Resolved stopping criteria.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TriggerRule {
    pub s_threshold: f64,
    pub theta_x_limit: f64,
}

impl TriggerRule {
    pub fn new(config: &SolverConfig, grid: &Grid, initial_sup_s: f64) -> Self {
        TriggerRule {
            s_threshold: config
                .blowup_threshold
                .unwrap_or(config.blowup_factor * initial_sup_s),
            theta_x_limit: 1.0 / (config.gradient_resolution_factor * grid.dx()),
        }
    }

    pub fn check(&self, rec: &DiagnosticsRecord) -> Option<Trigger> {
        if !rec.is_finite() {
            Some(Trigger::NonFinite)
        } else if rec.sup_abs_s > self.s_threshold {
            Some(Trigger::SThreshold)
        } else if rec.sup_abs_theta_x > self.theta_x_limit {
            Some(Trigger::GradientResolution)
        } else {
            None
        }
    }
}

/// Joint growth of `max θ_t` and `−min θ_x` at detection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CuspSignature {
    pub theta_t_growth: f64,
    pub theta_x_growth: f64,
    pub separation_cells: usize,
}

impl CuspSignature {
    pub const MIN_GROWTH: f64 = 10.0;
    pub const MAX_SEPARATION: usize = 5;

    pub fn holds(&self) -> bool {
        self.theta_t_growth >= Self::MIN_GROWTH
            && self.theta_x_growth >= Self::MIN_GROWTH
            && self.separation_cells <= Self::MAX_SEPARATION
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlowupReport {
    pub detected: bool,
    pub t0: Option<f64>,
    pub t_bound: f64,
    pub trigger: Option<Trigger>,
    pub trigger_step: Option<usize>,
    pub s_threshold: f64,
    pub theta_x_limit: f64,
    pub initial_sup_s: f64,
    pub max_sup_s: f64,
    pub initial_sup_r: f64,
    pub max_sup_r: f64,
    pub r_cap: f64,
    pub max_sup_j: f64,
    pub cusp: Option<CuspSignature>,
    /// `(t, sup|S|)` up to the trigger.
    pub sup_s_history: Vec<(f64, f64)>,
    /// `(t, sup|R|)` up to the trigger.
    pub sup_r_history: Vec<(f64, f64)>,
}

impl BlowupReport {
    /// `sup|R|` stayed within the cap up to the trigger.
    pub fn r_bounded(&self) -> bool {
        self.max_sup_r <= self.r_cap
    }

    pub fn before_bound(&self) -> bool {
        self.t0.map(|t| t < self.t_bound).unwrap_or(false)
    }
}

/// Scans `records` (in time order) for the earliest trigger.
pub fn detect_blowup(
    records: &[DiagnosticsRecord],
    rule: &TriggerRule,
    t_bound: f64,
    r_cap: f64,
) -> BlowupReport {
    let hit = records
        .iter()
        .enumerate()
        .find_map(|(i, r)| rule.check(r).map(|t| (i, t)));
    let end = hit.map(|(i, _)| i + 1).unwrap_or(records.len());
    let window = &records[..end];
    let finite: Vec<&DiagnosticsRecord> = window.iter().filter(|r| r.is_finite()).collect();
    let fold_max =
        |f: fn(&DiagnosticsRecord) -> f64| finite.iter().fold(0.0_f64, |m, r| m.max(f(r)));

    let first = records.first();
    let cusp = match (hit, first, finite.last()) {
        (Some(_), Some(first), Some(last)) => Some(CuspSignature {
            theta_t_growth: last.max_theta_t / first.max_theta_t,
            theta_x_growth: last.min_theta_x / first.min_theta_x,
            separation_cells: last.argmax_theta_t.abs_diff(last.argmin_theta_x),
        }),
        _ => None,
    };
    BlowupReport {
        detected: hit.is_some(),
        t0: hit.map(|(i, _)| records[i].t),
        t_bound,
        trigger: hit.map(|(_, t)| t),
        trigger_step: hit.map(|(i, _)| records[i].step),
        s_threshold: rule.s_threshold,
        theta_x_limit: rule.theta_x_limit,
        initial_sup_s: first.map(|r| r.sup_abs_s).unwrap_or(0.0),
        max_sup_s: fold_max(|r| r.sup_abs_s),
        initial_sup_r: first.map(|r| r.sup_abs_r).unwrap_or(0.0),
        max_sup_r: fold_max(|r| r.sup_abs_r),
        r_cap,
        max_sup_j: fold_max(|r| r.sup_abs_j),
        cusp,
        sup_s_history: window.iter().map(|r| (r.t, r.sup_abs_s)).collect(),
        sup_r_history: window.iter().map(|r| (r.t, r.sup_abs_r)).collect(),
    }
}

/// Signed residuals `E(t_n) − E(0) + Σ D dt` with `D` integrated by the
/// trapezoid rule in time.
pub fn energy_budget_residuals(records: &[DiagnosticsRecord]) -> Vec<f64> {
    let Some(first) = records.first() else {
        return Vec::new();
    };
    let mut dissipated = 0.0;
    let mut out = alloc::vec![0.0];
    for pair in records.windows(2) {
        dissipated += 0.5 * pair[1].dt * (pair[0].dissipation + pair[1].dissipation);
        out.push(pair[1].energy - first.energy + dissipated);
    }
    out
}

/// First record whose energy exceeds its predecessor's by more than `tol`,
/// with the increase.
pub fn first_energy_increase(records: &[DiagnosticsRecord], tol: f64) -> Option<(usize, f64)> {
    records
        .windows(2)
        .enumerate()
        .map(|(i, w)| (i + 1, w[1].energy - w[0].energy))
        .find(|&(_, inc)| inc > tol)
}

/// Discrete residual of
/// `(S² + R²)_t + (c(S² − R²))_x = (h²/g − γ1)(R + S)² − 2hJ(R + S)`
/// integrated over the mesh between two states (trapezoid in time for the
/// right side, boundary fluxes at the mesh ends).
pub fn divergence_residual(
    prev: &State,
    next: &State,
    material: &LeslieMaterial,
    grid: &Grid,
) -> f64 {
    let dt = next.t - prev.t;
    let mass = |st: &State| {
        let v: Vec<f64> = st.r.iter().zip(&st.s).map(|(r, s)| r * r + s * s).collect();
        trapezoid(&v, grid.dx())
    };
    let source = |st: &State| {
        let j = compute_j(st, material, grid);
        let v: Vec<f64> = (0..grid.nx)
            .map(|i| {
                let k = material.coefficients(st.theta[i]);
                let sum = st.r[i] + st.s[i];
                -k.damping * sum * sum - 2.0 * k.h * j[i] * sum
            })
            .collect();
        trapezoid(&v, grid.dx())
    };
    let flux = |st: &State, i: usize| {
        let c = material.coefficients(st.theta[i]).c;
        c * (st.s[i] * st.s[i] - st.r[i] * st.r[i])
    };
    let n = grid.nx - 1;
    let boundary = 0.5 * (flux(prev, n) - flux(prev, 0) + flux(next, n) - flux(next, 0));
    (mass(next) - mass(prev)) / dt + boundary - 0.5 * (source(prev) + source(next))
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let lx: Vec<f64> = xs.iter().map(|x| libm::log(*x)).collect();
    let ly: Vec<f64> = ys.iter().map(|y| libm::log(*y)).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    slope.is_finite().then_some(slope)
}

impl fmt::Display for BlowupReport {
    /// Flat `key = value` block.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opt = |v: Option<f64>| {
            v.map(|x| alloc::format!("{x}"))
                .unwrap_or_else(|| "none".into())
        };
        writeln!(f, "detected = {}", self.detected)?;
        writeln!(f, "t0 = {}", opt(self.t0))?;
        writeln!(f, "t_bound = {}", self.t_bound)?;
        writeln!(f, "before_bound = {}", self.before_bound())?;
        writeln!(
            f,
            "trigger = {}",
            self.trigger.map(Trigger::name).unwrap_or("none")
        )?;
        writeln!(
            f,
            "trigger_step = {}",
            self.trigger_step
                .map(|s| alloc::format!("{s}"))
                .unwrap_or_else(|| "none".into())
        )?;
        writeln!(f, "s_threshold = {}", self.s_threshold)?;
        writeln!(f, "theta_x_limit = {}", self.theta_x_limit)?;
        writeln!(f, "initial_sup_s = {}", self.initial_sup_s)?;
        writeln!(f, "max_sup_s = {}", self.max_sup_s)?;
        writeln!(f, "initial_sup_r = {}", self.initial_sup_r)?;
        writeln!(f, "max_sup_r = {}", self.max_sup_r)?;
        writeln!(f, "r_cap = {}", self.r_cap)?;
        writeln!(f, "r_bounded = {}", self.r_bounded())?;
        writeln!(f, "max_sup_j = {}", self.max_sup_j)?;
        match &self.cusp {
            Some(c) => {
                writeln!(f, "cusp_theta_t_growth = {}", c.theta_t_growth)?;
                writeln!(f, "cusp_theta_x_growth = {}", c.theta_x_growth)?;
                writeln!(f, "cusp_separation_cells = {}", c.separation_cells)?;
                writeln!(f, "cusp_signature = {}", c.holds())
            }
            None => writeln!(f, "cusp_signature = none"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn grid() -> Grid {
        Grid::new(-1.0, 1.0, 201).unwrap()
    }

    #[test]
    fn equilibrium_has_no_energy() {
        let g = grid();
        let m = LeslieMaterial::general();
        let st = State::zeros(&g, 0.7);
        assert_eq!(energy(&st, &m, &g), 0.0);
        assert_eq!(dissipation(&st, &m, &g), 0.0);
        assert!(compute_j(&st, &m, &g).iter().all(|&j| j == 0.0));
    }

    #[test]
    fn dissipation_without_flow() {
        let g = grid();
        let m = LeslieMaterial::general();
        let mut st = State::zeros(&g, 0.3);
        for i in 0..g.nx {
            let x = g.x(i);
            st.theta[i] = 0.3 + 0.2 * x;
            st.r[i] = libm::cos(x);
            st.s[i] = libm::cos(x);
        }
        let direct: Vec<f64> = (0..g.nx)
            .map(|i| m.gamma1 * st.theta_t(i) * st.theta_t(i))
            .collect();
        let expected = trapezoid(&direct, g.dx());
        assert!((dissipation(&st, &m, &g) - expected).abs() < 1e-12);
    }

    #[test]
    fn j_cancels_for_balanced_flow() {
        let g = grid();
        let m = LeslieMaterial::special();
        let mut st = State::zeros(&g, 0.5);
        // h/g = 1: u = −x² gives u_x = −2x exactly under central differences
        for i in 0..g.nx {
            let x = g.x(i);
            st.u[i] = -x * x;
            st.r[i] = 2.0 * x;
            st.s[i] = 2.0 * x;
        }
        let j = compute_j(&st, &m, &g);
        assert!(j[1..g.nx - 1].iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn theorem_bounds() {
        let t_general = blowup_bound_t(&LeslieMaterial::general()).unwrap();
        assert!((t_general - 6.0 * LN_2 / 7.0).abs() < 1e-12);
        assert!((t_general - 0.59412).abs() < 1e-5);
        assert_eq!(blowup_bound_t(&LeslieMaterial::special()).unwrap(), 1.0);
        assert_eq!(bound_from_damping_sup(2.0 * LN_2), 1.0);
    }

    #[test]
    fn budget_and_monotonicity_helpers() {
        let mk = |t: f64, dt: f64, e: f64, d: f64| {
            let mut r = blank();
            r.t = t;
            r.dt = dt;
            r.energy = e;
            r.dissipation = d;
            r
        };
        let recs = [
            mk(0.0, 0.0, 1.0, 2.0),
            mk(0.1, 0.1, 0.8, 2.0),
            mk(0.2, 0.1, 0.7, 2.0),
        ];
        let res = energy_budget_residuals(&recs);
        assert_eq!(res.len(), 3);
        assert!((res[1] - 0.0).abs() < 1e-15);
        assert!((res[2] - 0.1).abs() < 1e-15);
        assert_eq!(first_energy_increase(&recs, 0.0), None);
        let up = [mk(0.0, 0.0, 1.0, 0.0), mk(0.1, 0.1, 1.5, 0.0)];
        assert_eq!(first_energy_increase(&up, 1e-6), Some((1, 0.5)));
    }

    #[test]
    fn no_trigger_means_no_blowup() {
        let rule = TriggerRule {
            s_threshold: 10.0,
            theta_x_limit: 100.0,
        };
        let recs = vec![blank(), blank()];
        let report = detect_blowup(&recs, &rule, 0.5, 1.0);
        assert!(!report.detected);
        assert_eq!(report.t0, None);
        assert!(report.cusp.is_none());
        let mut hot = blank();
        hot.t = 0.2;
        hot.sup_abs_s = 11.0;
        let report = detect_blowup(&[blank(), hot, hot], &rule, 0.5, 1.0);
        assert_eq!(report.trigger, Some(Trigger::SThreshold));
        assert_eq!(report.t0, Some(0.2));
        assert_eq!(report.sup_s_history.len(), 2);
    }

    #[test]
    fn slope_of_power_law() {
        let xs = [0.2, 0.1, 0.05];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * libm::pow(*x, 0.5)).collect();
        assert!((log_log_slope(&xs, &ys).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(log_log_slope(&[1.0], &[1.0]), None);
    }

    fn blank() -> DiagnosticsRecord {
        DiagnosticsRecord {
            step: 0,
            t: 0.0,
            dt: 0.0,
            energy: 0.0,
            dissipation: 0.0,
            sup_abs_s: 1.0,
            sup_abs_r: 0.0,
            sup_abs_j: 0.0,
            sup_abs_theta_x: 0.0,
            max_theta_t: 1.0,
            argmax_theta_t: 0,
            min_theta_x: -1.0,
            argmin_theta_x: 0,
            xi: 0.0,
            s_on_xi: 0.0,
            tilde_s_on_xi: 0.0,
            p_on_xi: 0.0,
        }
    }
}
