//! Upwind transport of the Riemann invariants,
//!
//! ```text
//! S_t + c S_x =  (c′/4c)(S² − R²) + ½(h²/g − γ1)(R + S) − hJ
//! R_t − c R_x = −(c′/4c)(S² − R²) + ½(h²/g − γ1)(R + S) − hJ
//! θ_t = (R + S)/2
//! ```
//!
//! advanced together with `J` frozen. `S` moves right and `R` moves left.
//! The first-order scheme differences `S` backward and `R` forward and steps
//! with the explicit midpoint rule; the fifth-order scheme uses the
//! upwind-biased six-point stencil with a three-stage SSP Runge–Kutta step
//! and falls back to first order within three nodes of either end. At the
//! inflow end of each invariant the transport term is dropped (zero-gradient
//! extrapolation).

use alloc::vec;
use alloc::vec::Vec;

use crate::material::{Coefficients, LeslieMaterial};
use crate::solver::{State, Transport};
use crate::Error;

#[derive(Clone, Debug)]
pub(super) struct Scratch {
    theta: Vec<f64>,
    r: Vec<f64>,
    s: Vec<f64>,
    d_theta: Vec<f64>,
    d_r: Vec<f64>,
    d_s: Vec<f64>,
}

impl Scratch {
    pub(super) fn new(n: usize) -> Self {
        Scratch {
            theta: vec![0.0; n],
            r: vec![0.0; n],
            s: vec![0.0; n],
            d_theta: vec![0.0; n],
            d_r: vec![0.0; n],
            d_s: vec![0.0; n],
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn rates(
    scheme: Transport,
    material: &LeslieMaterial,
    cached: Option<&[Coefficients]>,
    dx: f64,
    theta: &[f64],
    r: &[f64],
    s: &[f64],
    j: &[f64],
    d_theta: &mut [f64],
    d_r: &mut [f64],
    d_s: &mut [f64],
) {
    let n = theta.len();
    for i in 0..n {
        let k = match cached {
            Some(coefs) => coefs[i],
            None => material.coefficients(theta[i]),
        };
        let (ri, si) = (r[i], s[i]);
        let (s_x, r_x) = if scheme == Transport::Upwind5 && i >= 3 && i + 3 < n {
            (
                (-2.0 * s[i - 3] + 15.0 * s[i - 2] - 60.0 * s[i - 1] + 20.0 * si + 30.0 * s[i + 1]
                    - 3.0 * s[i + 2])
                    / (60.0 * dx),
                (3.0 * r[i - 2] - 30.0 * r[i - 1] - 20.0 * ri + 60.0 * r[i + 1] - 15.0 * r[i + 2]
                    + 2.0 * r[i + 3])
                    / (60.0 * dx),
            )
        } else {
            (
                if i == 0 { 0.0 } else { (si - s[i - 1]) / dx },
                if i + 1 == n {
                    0.0
                } else {
                    (r[i + 1] - ri) / dx
                },
            )
        };
        let quadratic = k.c_prime / (4.0 * k.c) * (si * si - ri * ri);
        let linear = -0.5 * k.damping * (ri + si) - k.h * j[i];
        d_s[i] = -k.c * s_x + quadratic + linear;
        d_r[i] = k.c * r_x - quadratic + linear;
        d_theta[i] = 0.5 * (ri + si);
    }
}

pub(super) fn advance(
    w: &mut Scratch,
    scheme: Transport,
    material: &LeslieMaterial,
    coefs: &[Coefficients],
    dx: f64,
    state: &mut State,
    j: &[f64],
    dt: f64,
) -> Result<(), Error> {
    let n = state.theta.len();
    rates(
        scheme,
        material,
        Some(coefs),
        dx,
        &state.theta,
        &state.r,
        &state.s,
        j,
        &mut w.d_theta,
        &mut w.d_r,
        &mut w.d_s,
    );
    match scheme {
        Transport::Upwind1 => {
            let half = 0.5 * dt;
            for i in 0..n {
                w.theta[i] = state.theta[i] + half * w.d_theta[i];
                w.r[i] = state.r[i] + half * w.d_r[i];
                w.s[i] = state.s[i] + half * w.d_s[i];
            }
            rates(
                scheme,
                material,
                None,
                dx,
                &w.theta,
                &w.r,
                &w.s,
                j,
                &mut w.d_theta,
                &mut w.d_r,
                &mut w.d_s,
            );
            for i in 0..n {
                state.theta[i] += dt * w.d_theta[i];
                state.r[i] += dt * w.d_r[i];
                state.s[i] += dt * w.d_s[i];
            }
        }
        Transport::Upwind5 => {
            // Shu-Osher three-stage SSP Runge-Kutta.
            for i in 0..n {
                w.theta[i] = state.theta[i] + dt * w.d_theta[i];
                w.r[i] = state.r[i] + dt * w.d_r[i];
                w.s[i] = state.s[i] + dt * w.d_s[i];
            }
            rates(
                scheme,
                material,
                None,
                dx,
                &w.theta,
                &w.r,
                &w.s,
                j,
                &mut w.d_theta,
                &mut w.d_r,
                &mut w.d_s,
            );
            for i in 0..n {
                w.theta[i] = 0.75 * state.theta[i] + 0.25 * (w.theta[i] + dt * w.d_theta[i]);
                w.r[i] = 0.75 * state.r[i] + 0.25 * (w.r[i] + dt * w.d_r[i]);
                w.s[i] = 0.75 * state.s[i] + 0.25 * (w.s[i] + dt * w.d_s[i]);
            }
            rates(
                scheme,
                material,
                None,
                dx,
                &w.theta,
                &w.r,
                &w.s,
                j,
                &mut w.d_theta,
                &mut w.d_r,
                &mut w.d_s,
            );
            let (a, b) = (1.0 / 3.0, 2.0 / 3.0);
            for i in 0..n {
                state.theta[i] = a * state.theta[i] + b * (w.theta[i] + dt * w.d_theta[i]);
                state.r[i] = a * state.r[i] + b * (w.r[i] + dt * w.d_r[i]);
                state.s[i] = a * state.s[i] + b * (w.s[i] + dt * w.d_s[i]);
            }
        }
    }
    let fields: [(&'static str, &[f64]); 3] =
        [("theta", &state.theta), ("R", &state.r), ("S", &state.s)];
    for (field, values) in fields {
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { field, index });
        }
    }
    Ok(())
}
