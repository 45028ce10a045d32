//! CSV and report writers. Floats use Rust's shortest round-trip formatting,
//! so identical runs give byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nematic_core::diagnostics::DiagnosticsRecord;
use nematic_core::initial_data::InitialProfile;
use nematic_core::solver::Snapshot;
use nematic_core::{Grid, LeslieMaterial, State};

use crate::error::LabError;

pub const TIMESERIES_HEADER: &str = "t,E,D,sup_abs_S,sup_abs_R,sup_abs_J,xi,S_on_xi,tildeS_on_xi";
pub const SNAPSHOT_HEADER: &str = "x,theta,u,R,S,J,theta_x,theta_t";
pub const INITIAL_HEADER: &str = "x,theta0,theta1,u0,R0,S0,J0";

/// Writes one comma-separated row.
pub fn push_row(out: &mut String, values: &[f64]) {
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{v}");
    }
    out.push('\n');
}

pub fn timeseries_csv(records: &[DiagnosticsRecord]) -> String {
    let mut out = String::with_capacity(records.len() * 160);
    out.push_str(TIMESERIES_HEADER);
    out.push('\n');
    for r in records {
        push_row(
            &mut out,
            &[
                r.t,
                r.energy,
                r.dissipation,
                r.sup_abs_s,
                r.sup_abs_r,
                r.sup_abs_j,
                r.xi,
                r.s_on_xi,
                r.tilde_s_on_xi,
            ],
        );
    }
    out
}

pub fn snapshot_csv(snapshot: &Snapshot, material: &LeslieMaterial, grid: &Grid) -> String {
    let mut out = String::with_capacity(grid.nx * 180);
    out.push_str(SNAPSHOT_HEADER);
    out.push('\n');
    for i in 0..grid.nx {
        let (r, s) = (snapshot.r[i], snapshot.s[i]);
        let c = material.coefficients(snapshot.theta[i]).c;
        push_row(
            &mut out,
            &[
                grid.x(i),
                snapshot.theta[i],
                snapshot.u[i],
                r,
                s,
                snapshot.j[i],
                0.5 * (r - s) / c,
                0.5 * (r + s),
            ],
        );
    }
    out
}

/// The sampled initial profile; `state` and `j` are the initial state and
/// its `J`.
pub fn initial_csv<P: InitialProfile + ?Sized>(
    profile: &P,
    state: &State,
    j: &[f64],
    grid: &Grid,
) -> String {
    let mut out = String::with_capacity(grid.nx * 160);
    out.push_str(INITIAL_HEADER);
    out.push('\n');
    for i in 0..grid.nx {
        let x = grid.x(i);
        push_row(
            &mut out,
            &[
                x,
                state.theta[i],
                profile.theta1(x),
                state.u[i],
                state.r[i],
                state.s[i],
                j[i],
            ],
        );
    }
    out
}

pub fn write(path: &Path, contents: &str) -> Result<(), LabError> {
    fs::write(path, contents).map_err(|e| LabError::io(path, e))
}

pub fn create_dir(path: &Path) -> Result<(), LabError> {
    fs::create_dir_all(path).map_err(|e| LabError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_round_trip_floats() {
        let mut out = String::new();
        let values = [0.1 + 0.2, -1e-300, 6.0 * core::f64::consts::LN_2 / 7.0, 2.0];
        push_row(&mut out, &values);
        let parsed: Vec<f64> = out
            .trim_end()
            .split(',')
            .map(|s| s.parse().unwrap())
            .collect();
        assert_eq!(parsed, values);
        assert!(out.ends_with(",2\n"));
    }
}
