use std::fmt::Write as _;
use std::path::Path;

use nematic_core::diagnostics;
use nematic_core::initial_data::{build_initial_state, InitialProfile};
use nematic_core::solver::run;
use nematic_core::{Grid, RunResult, SmoothData, TheoremData};

use crate::config::{Expectation, ProfileKind, RunConfig};
use crate::error::LabError;
use crate::output;

/// Initial data selected by a config.
#[derive(Clone, Debug)]
pub enum Profile {
    Theorem(Box<TheoremData>),
    Smooth(SmoothData),
}

impl Profile {
    pub fn new(cfg: &RunConfig) -> Result<Self, LabError> {
        Ok(match cfg.profile {
            ProfileKind::Theorem => {
                Profile::Theorem(Box::new(TheoremData::new(cfg.spec(), cfg.material)?))
            }
            ProfileKind::Smooth => Profile::Smooth(SmoothData {
                theta_star: cfg.theta_star,
                amplitude: cfg.smooth_amplitude,
                half_width: cfg.smooth_half_width,
            }),
        })
    }

    pub fn as_profile(&self) -> &dyn InitialProfile {
        match self {
            Profile::Theorem(d) => d.as_ref(),
            Profile::Smooth(d) => d,
        }
    }

    /// Analytic bound on `sup|J(·, 0)|` for theorem data.
    pub fn initial_j_bound(&self) -> Option<f64> {
        match self {
            Profile::Theorem(d) => Some(d.initial_j_bound()),
            Profile::Smooth(_) => None,
        }
    }
}

/// A finished run together with what produced it.
#[derive(Clone, Debug)]
pub struct Execution {
    pub config: RunConfig,
    pub profile: Profile,
    pub result: RunResult,
}

impl Execution {
    pub fn grid(&self) -> &Grid {
        &self.config.grid
    }
}

/// Integrates the scenario without touching the file system.
pub fn execute(cfg: &RunConfig) -> Result<Execution, LabError> {
    let profile = Profile::new(cfg)?;
    let grid = Grid::new(cfg.grid.x_min, cfg.grid.x_max, cfg.grid.nx)?;
    let result = run(profile.as_profile(), &cfg.material, &grid, &cfg.solver)?;
    Ok(Execution {
        config: cfg.clone(),
        profile,
        result,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunStatus {
    Completed,
    BlowupDetected,
}

impl RunStatus {
    pub fn exit_code(self) -> i32 {
        match self {
            RunStatus::Completed => 0,
            RunStatus::BlowupDetected => 2,
        }
    }
}

/// Maps the report onto the config's expectation. A blowup on a run that
/// was expected to complete is an error.
pub fn status(exec: &Execution) -> Result<RunStatus, LabError> {
    let report = &exec.result.report;
    match (report.detected, exec.config.expect) {
        (false, _) => Ok(RunStatus::Completed),
        (true, Expectation::Blowup | Expectation::Any) => Ok(RunStatus::BlowupDetected),
        (true, Expectation::Complete) => Err(LabError::Unexpected(format!(
            "blowup detected at t = {} on a run expected to complete",
            report.t0.unwrap_or(f64::NAN)
        ))),
    }
}

/// Report text: the blowup report followed by run-level context.
pub fn report_text(exec: &Execution) -> String {
    let mut out = exec.result.report.to_string();
    let cfg = &exec.config;
    let init = &exec.result.initial;
    let last = exec.result.records.last().map(|r| r.t).unwrap_or(0.0);
    let _ = writeln!(out, "expect = {}", cfg.expect.name());
    let _ = writeln!(out, "t_final = {last}");
    let _ = writeln!(
        out,
        "steps = {}",
        exec.result.records.len().saturating_sub(1)
    );
    let _ = writeln!(out, "initial_energy = {}", init.energy);
    let _ = writeln!(out, "initial_sup_j = {}", init.sup_abs_j);
    match exec.profile.initial_j_bound() {
        Some(b) => {
            let _ = writeln!(out, "initial_j_bound = {b}");
        }
        None => {
            let _ = writeln!(out, "initial_j_bound = none");
        }
    }
    let _ = writeln!(out, "s_at_origin = {}", init.s_at_origin);
    out
}

/// Writes `timeseries.csv`, `initial_profile.csv`, `snapshots/NNNN.csv`,
/// `blowup_report.txt` and `resolved_config.txt` into `dir`.
pub fn write_artifacts(exec: &Execution, dir: &Path) -> Result<(), LabError> {
    let cfg = &exec.config;
    let grid = exec.grid();
    let snapshots = dir.join("snapshots");
    output::create_dir(&snapshots)?;
    output::write(&dir.join("resolved_config.txt"), &cfg.to_text())?;
    output::write(
        &dir.join("timeseries.csv"),
        &output::timeseries_csv(&exec.result.records),
    )?;
    output::write(&dir.join("blowup_report.txt"), &report_text(exec))?;

    let (state, _) = build_initial_state(
        exec.profile.as_profile(),
        &cfg.material,
        grid,
        cfg.solver.t_end,
    )?;
    let j0 = diagnostics::compute_j(&state, &cfg.material, grid);
    output::write(
        &dir.join("initial_profile.csv"),
        &output::initial_csv(exec.profile.as_profile(), &state, &j0, grid),
    )?;
    for (k, snap) in exec.result.snapshots.iter().enumerate() {
        let path = snapshots.join(format!("{k:04}.csv"));
        output::write(&path, &output::snapshot_csv(snap, &cfg.material, grid))?;
    }
    Ok(())
}

/// Runs `cfg` and writes its artifacts to `cfg.output_dir`.
pub fn run_scenario(cfg: &RunConfig) -> Result<(Execution, RunStatus), LabError> {
    let exec = execute(cfg)?;
    write_artifacts(&exec, Path::new(&cfg.output_dir))?;
    let status = status(&exec)?;
    Ok((exec, status))
}
