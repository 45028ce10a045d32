//! Parameter sweeps over `ε` and grid refinement studies. Entries run on
//! scoped threads; each writes into its own subdirectory and the summary is
//! assembled after all of them finish.

use std::path::Path;
use std::thread;

use nematic_core::diagnostics::{energy_budget_residuals, log_log_slope};
use nematic_core::State;

use crate::config::{ProfileKind, RunConfig};
use crate::error::LabError;
use crate::output::{self, push_row};
use crate::scenario::{execute, write_artifacts, Execution};

/// One row of an `ε` sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub epsilon: f64,
    pub initial_energy: f64,
    /// Maximum over the run of `sup|J|`.
    pub max_sup_j: f64,
    pub detected: bool,
    pub t0: Option<f64>,
    pub max_sup_r: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSummary {
    pub rows: Vec<SweepRow>,
    /// Log-log slope of `E(0)` against `ε`.
    pub energy_slope: f64,
    /// Log-log slope of the run maximum of `sup|J|` against `ε`.
    pub j_slope: f64,
}

impl SweepSummary {
    /// Whether the run maximum of `sup|J|` strictly decreases with `ε`.
    pub fn j_decreasing(&self) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[1].max_sup_j < w[0].max_sup_j)
    }

    /// Summary CSV with a trailing `slope` row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("epsilon,E0,max_sup_J,detected,t0,max_sup_R\n");
        for r in &self.rows {
            let detected = if r.detected { 1.0 } else { 0.0 };
            push_row(
                &mut out,
                &[
                    r.epsilon,
                    r.initial_energy,
                    r.max_sup_j,
                    detected,
                    r.t0.unwrap_or(f64::NAN),
                    r.max_sup_r,
                ],
            );
        }
        out.push_str(&format!(
            "slope,{},{},,,\n",
            self.energy_slope, self.j_slope
        ));
        out
    }
}

fn run_all(configs: &[RunConfig]) -> Result<Vec<Execution>, LabError> {
    thread::scope(|scope| {
        let handles: Vec<_> = configs
            .iter()
            .map(|cfg| scope.spawn(move || execute(cfg)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|p| std::panic::resume_unwind(p)))
            .collect()
    })
}

fn eps_dir(root: &Path, eps: f64) -> std::path::PathBuf {
    root.join(format!("eps_{eps}"))
}

/// Runs `base` at every `ε` of `eps_list` (strictly decreasing, at least
/// three entries). When `out` is given each run's artifacts go to
/// `out/eps_<ε>/` and the summary to `out/sweep_summary.csv`.
pub fn epsilon_sweep(
    base: &RunConfig,
    eps_list: &[f64],
    out: Option<&Path>,
) -> Result<SweepSummary, LabError> {
    if eps_list.len() < 3 {
        return Err(LabError::Precondition(format!(
            "epsilon sweep needs at least 3 values, got {}",
            eps_list.len()
        )));
    }
    if !eps_list.windows(2).all(|w| w[1] < w[0])
        || !eps_list.iter().all(|&e| e > 0.0 && e.is_finite())
    {
        return Err(LabError::Precondition(
            "epsilon values must be positive and strictly decreasing".into(),
        ));
    }
    let configs: Vec<RunConfig> = eps_list
        .iter()
        .map(|&epsilon| RunConfig {
            epsilon,
            output_dir: out
                .map(|o| eps_dir(o, epsilon).display().to_string())
                .unwrap_or_default(),
            ..base.clone()
        })
        .collect();
    let runs = run_all(&configs)?;
    let rows: Vec<SweepRow> = runs
        .iter()
        .map(|e| SweepRow {
            epsilon: e.config.epsilon,
            initial_energy: e.result.initial.energy,
            max_sup_j: e.result.report.max_sup_j,
            detected: e.result.report.detected,
            t0: e.result.report.t0,
            max_sup_r: e.result.report.max_sup_r,
        })
        .collect();
    let eps: Vec<f64> = rows.iter().map(|r| r.epsilon).collect();
    let energies: Vec<f64> = rows.iter().map(|r| r.initial_energy).collect();
    let js: Vec<f64> = rows.iter().map(|r| r.max_sup_j).collect();
    let summary = SweepSummary {
        energy_slope: log_log_slope(&eps, &energies).unwrap_or(f64::NAN),
        j_slope: log_log_slope(&eps, &js).unwrap_or(f64::NAN),
        rows,
    };
    if let Some(root) = out {
        output::create_dir(root)?;
        for e in &runs {
            write_artifacts(e, Path::new(&e.config.output_dir))?;
        }
        output::write(&root.join("sweep_summary.csv"), &summary.to_csv())?;
    }
    Ok(summary)
}

/// One refinement level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Level {
    pub nx: usize,
    pub dx: f64,
    pub t_final: f64,
    /// `|E(t) − E(0) + Σ D dt|` at the final time.
    pub energy_residual: f64,
    /// Max-norm difference to the next finer level on shared nodes.
    pub diff_theta: Option<f64>,
    pub diff_u: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RefinementTable {
    pub levels: Vec<Level>,
    /// `log2` ratios of consecutive differences.
    pub order_theta: Vec<f64>,
    pub order_u: Vec<f64>,
    /// Ratios of consecutive energy residuals.
    pub residual_ratio: Vec<f64>,
}

impl RefinementTable {
    pub const MIN_ORDER: f64 = 0.8;

    pub fn min_order(&self) -> f64 {
        self.order_theta
            .iter()
            .chain(&self.order_u)
            .fold(f64::INFINITY, |m, &o| m.min(o))
    }

    pub fn passed(&self) -> bool {
        self.min_order() >= Self::MIN_ORDER
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "nx,dx,t_final,energy_residual,diff_theta,diff_u,order_theta,order_u,residual_ratio\n",
        );
        for (k, l) in self.levels.iter().enumerate() {
            let pick = |v: &Vec<f64>, i: usize| v.get(i).copied().unwrap_or(f64::NAN);
            let order_at = |v: &Vec<f64>| if k >= 1 { pick(v, k - 1) } else { f64::NAN };
            push_row(
                &mut out,
                &[
                    l.nx as f64,
                    l.dx,
                    l.t_final,
                    l.energy_residual,
                    l.diff_theta.unwrap_or(f64::NAN),
                    l.diff_u.unwrap_or(f64::NAN),
                    order_at(&self.order_theta),
                    order_at(&self.order_u),
                    if k >= 1 {
                        pick(&self.residual_ratio, k - 1)
                    } else {
                        f64::NAN
                    },
                ],
            );
        }
        out
    }
}

fn max_diff_on_shared_nodes(coarse: &[f64], fine: &[f64]) -> f64 {
    coarse
        .iter()
        .enumerate()
        .fold(0.0, |m, (i, &c)| m.max((fine[2 * i] - c).abs()))
}

/// Runs `base` at `nx_k = (nx_0 − 1)·2^k + 1` for `k < levels` with the
/// smooth profile and compares consecutive levels on shared nodes.
pub fn refinement_study(
    base: &RunConfig,
    levels: usize,
    out: Option<&Path>,
) -> Result<RefinementTable, LabError> {
    if levels < 3 {
        return Err(LabError::Precondition(format!(
            "refinement study needs at least 3 levels, got {levels}"
        )));
    }
    if base.profile != ProfileKind::Smooth {
        return Err(LabError::Precondition(
            "refinement study needs `profile = smooth`".into(),
        ));
    }
    let configs: Vec<RunConfig> = (0..levels)
        .map(|k| {
            let mut cfg = base.clone();
            cfg.grid.nx = (base.grid.nx - 1) * (1 << k) + 1;
            if let Some(o) = out {
                cfg.output_dir = o.join(format!("nx_{}", cfg.grid.nx)).display().to_string();
            }
            cfg
        })
        .collect();
    let runs = run_all(&configs)?;
    for e in &runs {
        if e.result.report.detected {
            return Err(LabError::Unexpected(format!(
                "refinement level nx = {} triggered blowup detection",
                e.config.grid.nx
            )));
        }
    }
    let finals: Vec<&State> = runs.iter().map(|e| &e.result.final_state).collect();
    let mut table = RefinementTable {
        levels: Vec::new(),
        order_theta: Vec::new(),
        order_u: Vec::new(),
        residual_ratio: Vec::new(),
    };
    for (k, e) in runs.iter().enumerate() {
        let next = finals.get(k + 1);
        let residual = energy_budget_residuals(&e.result.records)
            .last()
            .copied()
            .unwrap_or(0.0)
            .abs();
        table.levels.push(Level {
            nx: e.config.grid.nx,
            dx: e.config.grid.dx(),
            t_final: finals[k].t,
            energy_residual: residual,
            diff_theta: next.map(|f| max_diff_on_shared_nodes(&finals[k].theta, &f.theta)),
            diff_u: next.map(|f| max_diff_on_shared_nodes(&finals[k].u, &f.u)),
        });
    }
    for w in table.levels.windows(2) {
        table
            .residual_ratio
            .push(w[0].energy_residual / w[1].energy_residual);
        if let (Some(a), Some(b)) = (w[0].diff_theta, w[1].diff_theta) {
            table.order_theta.push((a / b).log2());
        }
        if let (Some(a), Some(b)) = (w[0].diff_u, w[1].diff_u) {
            table.order_u.push((a / b).log2());
        }
    }
    if let Some(root) = out {
        output::create_dir(root)?;
        for e in &runs {
            write_artifacts(e, Path::new(&e.config.output_dir))?;
        }
        output::write(&root.join("refinement.csv"), &table.to_csv())?;
    }
    Ok(table)
}
