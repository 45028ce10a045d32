//! Semi-implicit step for `u_t = (g(θ) u_x + h(θ) θ_t)_x` with `u = 0` at
//! both ends. Diffusion uses the three-point flux stencil with `g` averaged
//! to cell faces and weight `w` on the new level (`w = ½` is Crank–Nicolson);
//! the drive `(h θ_t)_x` is a central difference taken at the old level.

use alloc::vec;
use alloc::vec::Vec;

use crate::material::Coefficients;
use crate::numerics::thomas_solve;
use crate::solver::State;
use crate::Error;

#[derive(Clone, Debug)]
pub(super) struct Scratch {
    g_face: Vec<f64>,
    drive: Vec<f64>,
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
    rhs: Vec<f64>,
}

impl Scratch {
    pub(super) fn new(n: usize) -> Self {
        let m = n.saturating_sub(2);
        Scratch {
            g_face: vec![0.0; n - 1],
            drive: vec![0.0; n],
            lower: vec![0.0; m],
            diag: vec![0.0; m],
            upper: vec![0.0; m],
            rhs: vec![0.0; m],
        }
    }
}

pub(super) fn advance(
    w: &mut Scratch,
    coefs: &[Coefficients],
    dx: f64,
    state: &mut State,
    dt: f64,
    weight: f64,
) -> Result<(), Error> {
    let n = state.u.len();
    let mut g_prev = 0.0;
    for i in 0..n {
        let k = coefs[i];
        w.drive[i] = k.h * state.theta_t(i);
        if i > 0 {
            w.g_face[i - 1] = 0.5 * (g_prev + k.g);
        }
        g_prev = k.g;
    }

    let mu = dt / (dx * dx);
    let u = &state.u;
    for row in 0..n - 2 {
        let i = row + 1;
        let (gl, gr) = (w.g_face[i - 1], w.g_face[i]);
        let laplacian = gr * (u[i + 1] - u[i]) - gl * (u[i] - u[i - 1]);
        let drive = (w.drive[i + 1] - w.drive[i - 1]) / (2.0 * dx);
        w.lower[row] = -weight * mu * gl;
        w.upper[row] = -weight * mu * gr;
        w.diag[row] = 1.0 + weight * mu * (gl + gr);
        w.rhs[row] = u[i] + (1.0 - weight) * mu * laplacian + dt * drive;
    }
    thomas_solve(&w.lower, &w.diag, &mut w.upper, &mut w.rhs)?;
    state.u[0] = 0.0;
    state.u[n - 1] = 0.0;
    state.u[1..n - 1].copy_from_slice(&w.rhs);
    Ok(())
}
