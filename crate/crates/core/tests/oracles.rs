//! Single-step comparisons against independent oracles: an adaptive
//! Dormand–Prince integrator for the spatially uniform wave dynamics, the
//! discrete eigenmode decay of the diffusion step, and closed forms.

use nematic_core::diagnostics::CharacteristicTracer;
use nematic_core::{Grid, LeslieMaterial, Solver, SolverConfig, State, Transport};
use ode_solvers::{Dopri5, System, Vector1, Vector4};

const SCHEMES: [Transport; 2] = [Transport::Upwind1, Transport::Upwind5];

fn uniform(grid: &Grid, theta: f64, r: f64, s: f64) -> State {
    let mut st = State::zeros(grid, theta);
    st.r.iter_mut().for_each(|v| *v = r);
    st.s.iter_mut().for_each(|v| *v = s);
    st
}

fn solver(material: LeslieMaterial, grid: Grid, transport: Transport) -> Solver {
    Solver::new(
        material,
        grid,
        SolverConfig {
            transport,
            ..SolverConfig::default()
        },
    )
    .unwrap()
}

/// `ds/dt = a s² + b s` with frozen coefficients.
struct Riccati {
    a: f64,
    b: f64,
}

impl System<f64, Vector1<f64>> for Riccati {
    fn system(&self, _t: f64, y: &Vector1<f64>, dy: &mut Vector1<f64>) {
        dy[0] = self.a * y[0] * y[0] + self.b * y[0];
    }
}

/// Output spacing for the integrator. Its dense output is only accurate
/// close to the last accepted step, so the spacing is kept small.
fn out_step(t: f64) -> f64 {
    t.min(1e-4)
}

fn riccati_oracle(a: f64, b: f64, s0: f64, t: f64) -> f64 {
    let mut stepper = Dopri5::new(
        Riccati { a, b },
        0.0,
        t,
        out_step(t),
        Vector1::new(s0),
        1e-13,
        1e-13,
    );
    stepper.integrate().unwrap();
    stepper.y_out().last().unwrap()[0]
}

/// Uniform `(θ, R, S, p)` dynamics with `J = 0` and the true coefficients.
struct UniformWave {
    material: LeslieMaterial,
}

impl System<f64, Vector4<f64>> for UniformWave {
    fn system(&self, _t: f64, y: &Vector4<f64>, dy: &mut Vector4<f64>) {
        let k = self.material.coefficients(y[0]);
        let (r, s) = (y[1], y[2]);
        let quad = k.c_prime / (4.0 * k.c) * (s * s - r * r);
        let lin = -0.5 * k.damping * (r + s);
        dy[0] = 0.5 * (r + s);
        dy[1] = -quad + lin;
        dy[2] = quad + lin;
        dy[3] = 0.5 * k.damping;
    }
}

fn uniform_oracle(material: LeslieMaterial, y0: [f64; 4], t: f64) -> Vector4<f64> {
    let y0 = Vector4::new(y0[0], y0[1], y0[2], y0[3]);
    let mut stepper = Dopri5::new(
        UniformWave { material },
        0.0,
        t,
        out_step(t),
        y0,
        1e-13,
        1e-13,
    );
    stepper.integrate().unwrap();
    *stepper.y_out().last().unwrap()
}

#[test]
fn wave_step_matches_riccati_oracle() {
    // θ is frozen in the oracle, so amplitudes stay small enough that it
    // barely moves within one step
    let grid = Grid::new(-1.0, 1.0, 201).unwrap();
    let theta = core::f64::consts::FRAC_PI_4;
    for material in [LeslieMaterial::general(), LeslieMaterial::special()] {
        let k = material.coefficients(theta);
        let (a, b) = (k.c_prime / (4.0 * k.c), -0.5 * k.damping);
        for scheme in SCHEMES {
            for s0 in [1.0, 10.0, 30.0] {
                let mut sv = solver(material, grid, scheme);
                let mut st = uniform(&grid, theta, 0.0, s0);
                let dt = sv.cfl_dt(&st);
                let j = vec![0.0; grid.nx];
                sv.wave_substep(&mut st, &j, dt).unwrap();
                let oracle = riccati_oracle(a, b, s0, dt);
                let rel = (st.s[100] - oracle).abs() / oracle.abs();
                assert!(rel < 1e-3, "{scheme:?} s0 = {s0}: rel {rel:e}");
                assert!(
                    st.s.iter().all(|&v| (v - st.s[0]).abs() <= 1e-12 * s0),
                    "uniform state stays uniform"
                );
            }
        }
    }
}

#[test]
fn wave_step_matches_uniform_system_oracle() {
    let grid = Grid::new(-1.0, 1.0, 101).unwrap();
    let material = LeslieMaterial::general();
    let (theta, r0, s0) = (0.6, -3.0, 50.0);
    let error = |scheme, dt: f64| {
        let mut sv = solver(material, grid, scheme);
        let mut st = uniform(&grid, theta, r0, s0);
        sv.wave_substep(&mut st, &vec![0.0; grid.nx], dt).unwrap();
        let y = uniform_oracle(material, [theta, r0, s0, 0.0], dt);
        [st.theta[50] - y[0], st.r[50] - y[1], st.s[50] - y[2]]
            .iter()
            .fold(0.0_f64, |m, e| m.max(e.abs()))
    };
    // local error orders 3 and 4
    for (scheme, tol, min_ratio) in [
        (Transport::Upwind1, 2e-3, 7.0),
        (Transport::Upwind5, 1e-4, 14.0),
    ] {
        let coarse = error(scheme, 4e-3);
        let fine = error(scheme, 2e-3);
        assert!(coarse < tol, "{scheme:?}: error {coarse:e}");
        assert!(
            coarse / fine > min_ratio,
            "{scheme:?}: ratio {}",
            coarse / fine
        );
    }
}

#[test]
fn linear_decay_reproduces_midpoint_rule() {
    // c′ = 0 and γ1 − h²/g = 1, so R = S = s obeys s′ = −s
    let grid = Grid::new(0.0, 1.0, 65).unwrap();
    let material = LeslieMaterial::constant_speed();
    let mut sv = solver(material, grid, Transport::Upwind1);
    let mut st = uniform(&grid, 0.3, 2.0, 2.0);
    let dt = 0.01;
    sv.wave_substep(&mut st, &vec![0.0; grid.nx], dt).unwrap();
    let midpoint = 2.0 * (1.0 - dt + 0.5 * dt * dt);
    for i in 0..grid.nx {
        assert!((st.s[i] - midpoint).abs() < 1e-14);
        assert!((st.r[i] - midpoint).abs() < 1e-14);
    }
    let exact = 2.0 * (-dt).exp();
    assert!((st.s[0] - exact).abs() < dt * dt * dt);
}

#[test]
fn zero_state_is_a_fixed_point() {
    let grid = Grid::new(-1.0, 1.0, 129).unwrap();
    for scheme in SCHEMES {
        let mut sv = solver(LeslieMaterial::general(), grid, scheme);
        let mut st = State::zeros(&grid, 0.0);
        for _ in 0..10 {
            sv.step(&mut st).unwrap();
        }
        assert!(st
            .theta
            .iter()
            .chain(&st.u)
            .chain(&st.r)
            .chain(&st.s)
            .all(|&v| v == 0.0));
        assert!(sv.j().iter().all(|&v| v == 0.0));
    }
}

#[test]
fn heat_step_matches_discrete_eigenmode_decay() {
    // special coefficients: g ≡ 1; θ_t = 0 removes the drive
    let grid = Grid::new(-1.0, 1.0, 129).unwrap();
    let material = LeslieMaterial::special();
    let length = grid.x_max - grid.x_min;
    let dx = grid.dx();
    for mode in [1_u32, 3, 17] {
        for dt in [1e-4, 1e-2, 0.5] {
            let mut sv = solver(material, grid, Transport::Upwind1);
            let mut st = State::zeros(&grid, 0.4);
            let k = f64::from(mode) * std::f64::consts::PI / length;
            for i in 0..grid.nx {
                st.u[i] = (k * (grid.x(i) - grid.x_min)).sin();
            }
            let before = st.u.clone();
            sv.heat_substep(&mut st, dt).unwrap();
            let lambda = 4.0 / (dx * dx) * (0.5 * k * dx).sin().powi(2);
            let factor = (1.0 - 0.5 * lambda * dt) / (1.0 + 0.5 * lambda * dt);
            for i in 1..grid.nx - 1 {
                let err = (st.u[i] - factor * before[i]).abs();
                assert!(err < 1e-12, "mode {mode}, dt {dt}, node {i}: {err:e}");
            }
        }
    }
}

#[test]
fn implicit_heat_step_obeys_maximum_principle() {
    let grid = Grid::new(-2.0, 2.0, 201).unwrap();
    let config = SolverConfig {
        heat_weight: 1.0,
        ..SolverConfig::default()
    };
    let mut sv = Solver::new(LeslieMaterial::general(), grid, config).unwrap();
    let mut st = State::zeros(&grid, 1.1);
    for i in 0..grid.nx {
        let x = grid.x(i);
        st.u[i] = if x.abs() < 1.0 {
            (1.0 - x * x).powi(2) * (3.0 * x).cos()
        } else {
            0.0
        };
    }
    let (lo, hi) =
        st.u.iter()
            .fold((0.0_f64, 0.0_f64), |(l, h), &v| (l.min(v), h.max(v)));
    for _ in 0..50 {
        sv.heat_substep(&mut st, 0.05).unwrap();
        assert!(st.u.iter().all(|&v| v >= lo - 1e-15 && v <= hi + 1e-15));
    }
    assert!(st.u.iter().fold(0.0_f64, |m, v| m.max(v.abs())) < hi);
}

#[test]
fn zero_flux_keeps_velocity_at_rest() {
    // θ_t = 0 with a varying θ: the flux g u_x + h θ_t vanishes identically
    let grid = Grid::new(-1.0, 1.0, 101).unwrap();
    let material = LeslieMaterial::general();
    let mut sv = solver(material, grid, Transport::Upwind1);
    let mut st = State::zeros(&grid, 0.0);
    for i in 0..grid.nx {
        let x = grid.x(i);
        st.theta[i] = 0.5 + 0.3 * x;
        let c = material.coefficients(st.theta[i]).c;
        st.r[i] = 0.3 * c;
        st.s[i] = -0.3 * c;
    }
    sv.heat_substep(&mut st, 0.01).unwrap();
    assert!(st.u.iter().all(|&v| v == 0.0));
}

#[test]
fn cfl_examples() {
    let grid = Grid::new(0.0, 1.0, 101).unwrap();
    let sv = solver(LeslieMaterial::constant_speed(), grid, Transport::Upwind1);
    let dt = sv.cfl_dt(&State::zeros(&grid, 0.2));
    assert!((dt - 0.004).abs() < 1e-15);

    let sv = solver(LeslieMaterial::general(), grid, Transport::Upwind1);
    let dt = sv.cfl_dt(&State::zeros(&grid, core::f64::consts::FRAC_PI_2));
    assert!((dt - 0.4 * 0.01 / 2.0_f64.sqrt()).abs() < 1e-15);

    // running max over nodes, not the global bound
    let mut st = State::zeros(&grid, 0.0);
    st.theta[7] = 0.5;
    let c = LeslieMaterial::general().coefficients(0.5).c;
    assert!((sv.cfl_dt(&st) - 0.004 / c).abs() < 1e-15);
}

#[test]
fn characteristic_at_unit_speed_is_exact() {
    let grid = Grid::new(-1.0, 3.0, 401).unwrap();
    let material = LeslieMaterial::constant_speed();
    let mut sv = solver(material, grid, Transport::Upwind1);
    let mut st = State::zeros(&grid, 0.2);
    for i in 0..grid.nx {
        let x = grid.x(i);
        st.s[i] = (-(x * x)).exp();
        st.r[i] = -st.s[i];
    }
    let mut tracer = CharacteristicTracer::new(0.0, &st, &material, &grid).unwrap();
    for _ in 0..100 {
        let dt = sv.cfl_dt(&st);
        tracer.predict(&st, dt, &material, &grid).unwrap();
        sv.step_by(&mut st, dt).unwrap();
        tracer.correct(&st, &material, &grid).unwrap();
        assert!((tracer.xi - st.t).abs() < 1e-12);
    }
}

#[test]
fn traced_tilde_s_matches_uniform_oracle() {
    let grid = Grid::new(-1.0, 2.0, 301).unwrap();
    let material = LeslieMaterial::general();
    let theta0 = core::f64::consts::FRAC_PI_4;
    let s0 = 8.0;
    for scheme in SCHEMES {
        let mut sv = solver(material, grid, scheme);
        let mut st = uniform(&grid, theta0, 0.0, s0);
        let j = vec![0.0; grid.nx];
        let mut tracer = CharacteristicTracer::new(0.0, &st, &material, &grid).unwrap();
        while st.t < 0.5 {
            let dt = sv.cfl_dt(&st);
            tracer.predict(&st, dt, &material, &grid).unwrap();
            sv.wave_substep(&mut st, &j, dt).unwrap();
            st.t += dt;
            tracer.correct(&st, &material, &grid).unwrap();
        }
        let y = uniform_oracle(material, [theta0, 0.0, s0, 0.0], st.t);
        let want = y[3].exp() * y[2];
        let rel = (tracer.tilde_s_on_xi - want).abs() / want.abs();
        assert!(rel < 1e-2, "{scheme:?}: {} vs {want}", tracer.tilde_s_on_xi);
    }
}
