use nematic_core::diagnostics::{
    compute_j, divergence_residual, energy, energy_budget_residuals, first_energy_increase,
    log_log_slope,
};
use nematic_core::initial_data::{
    build_initial_state, InitialDataSpec, InitialProfile, DEFAULT_THETA_STAR,
};
use nematic_core::solver::run;
use nematic_core::{Grid, LeslieMaterial, SmoothData, Solver, SolverConfig, TheoremData};
use proptest::prelude::*;

fn presets() -> [LeslieMaterial; 3] {
    [
        LeslieMaterial::special(),
        LeslieMaterial::general(),
        LeslieMaterial::constant_speed(),
    ]
}

fn theorem(material: LeslieMaterial, epsilon: f64) -> TheoremData {
    let spec =
        InitialDataSpec::with_auto_amplitude(&material, epsilon, DEFAULT_THETA_STAR, 1.1).unwrap();
    TheoremData::new(spec, material).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn h_forms_agree(preset in 0usize..3, theta in -10.0f64..10.0) {
        let m = presets()[preset];
        let (a, b) = (m.h(theta), m.h_from_gammas(theta));
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn coefficients_within_bounds(preset in 0usize..3, theta in -10.0f64..10.0) {
        let m = presets()[preset];
        let bd = m.default_bounds().unwrap();
        let k = m.coefficients(theta);
        let slack = 1e-6;
        prop_assert!(k.g >= bd.g_lower - slack && k.g <= bd.g_upper + slack);
        prop_assert!(k.h >= bd.h_lower - slack && k.h <= bd.h_upper + slack);
        prop_assert!(k.c >= bd.c_lower - slack && k.c <= bd.c_upper + slack);
        prop_assert!(k.damping >= bd.damping_margin - slack && k.damping <= bd.damping_sup + slack);
        prop_assert!(m.b(theta) > 0.0);
    }

    #[test]
    fn coefficients_have_period_pi(preset in 0usize..3, theta in -3.0f64..3.0) {
        let m = presets()[preset];
        let (a, b) = (m.coefficients(theta), m.coefficients(theta + core::f64::consts::PI));
        prop_assert!((a.c - b.c).abs() < 1e-12 && (a.h - b.h).abs() < 1e-12 && (a.g - b.g).abs() < 1e-12);
    }

    #[test]
    fn c_prime_matches_central_difference(preset in 0usize..3, theta in -4.0f64..4.0) {
        let m = presets()[preset];
        let step = 1e-5;
        let fd = (m.c(theta + step).unwrap() - m.c(theta - step).unwrap()) / (2.0 * step);
        prop_assert!((m.c_prime(theta) - fd).abs() < 1e-6);
    }

    #[test]
    fn riemann_data_closed_forms(special in any::<bool>(), epsilon in 0.01f64..0.2, a in -1.0f64..1.0) {
        let m = if special { LeslieMaterial::special() } else { LeslieMaterial::general() };
        let d = theorem(m, epsilon);
        let x = a * epsilon;
        let p = d.theta0_prime(x);
        let c = m.coefficients(d.theta0(x)).c;
        let r0 = d.theta1(x) + c * p;
        let s0 = d.theta1(x) - c * p;
        prop_assert!((r0 - epsilon * p).abs() <= 1e-12 * p.abs().max(1.0));
        prop_assert!((s0 - (epsilon - 2.0 * c) * p).abs() <= 1e-10 * p.abs().max(1.0));
        prop_assert!(d.theta1(3.0 * epsilon) == 0.0 && d.theta0(-2.0 * epsilon) == DEFAULT_THETA_STAR);
    }

    #[test]
    fn chi_meets_constraints_and_slope_bound(special in any::<bool>(), epsilon in 0.01f64..0.2) {
        let m = if special { LeslieMaterial::special() } else { LeslieMaterial::general() };
        let d = theorem(m, epsilon);
        let (lo, hi) = (epsilon, epsilon + 2.0);
        let tol = 1e-12 * d.chi_integral.value.abs().max(1.0);
        prop_assert!((d.chi.value(lo) - d.chi_integral.value).abs() <= tol);
        prop_assert!(d.chi.value(hi).abs() <= tol);
        prop_assert!(d.chi.slope(lo).abs() <= tol && d.chi.slope(hi).abs() <= tol);
        let bound = d.chi_slope_bound();
        let n = 10_000;
        for k in 0..=n {
            let x = lo + (hi - lo) * k as f64 / n as f64;
            prop_assert!(d.chi.slope(x).abs() <= bound, "χ′({x}) = {} > {bound}", d.chi.slope(x));
        }
    }
}

#[test]
fn initial_j_within_bound() {
    for material in [LeslieMaterial::special(), LeslieMaterial::general()] {
        for epsilon in [0.2, 0.05, 0.01] {
            let d = theorem(material, epsilon);
            // the cancellation in J needs the bump resolved
            let nx = (9.0 / (epsilon / 200.0)) as usize + 1;
            let grid = Grid::new(-4.0, 5.0, nx).unwrap();
            let (state, report) = build_initial_state(&d, &material, &grid, 1.0).unwrap();
            let sup = compute_j(&state, &material, &grid)
                .iter()
                .fold(0.0_f64, |m, j| m.max(j.abs()));
            assert_eq!(sup, report.sup_abs_j);
            assert!(
                sup <= d.initial_j_bound(),
                "ε = {epsilon}: {sup} > {}",
                d.initial_j_bound()
            );
        }
    }
}

#[test]
fn initial_energy_is_linear_in_epsilon() {
    for material in [LeslieMaterial::special(), LeslieMaterial::general()] {
        let eps = [0.2, 0.1, 0.05, 0.025];
        let grid = Grid::new(-4.0, 5.0, 32769).unwrap();
        let energies: Vec<f64> = eps
            .iter()
            .map(|&e| {
                build_initial_state(&theorem(material, e), &material, &grid, 1.0)
                    .unwrap()
                    .1
                    .energy
            })
            .collect();
        let slope = log_log_slope(&eps, &energies).unwrap();
        assert!((0.8..=1.2).contains(&slope), "slope {slope}");
    }
}

fn smooth_run(nx: usize, t_end: f64) -> nematic_core::RunResult {
    let material = LeslieMaterial::general();
    let grid = Grid::new(-4.5, 4.5, nx).unwrap();
    let config = SolverConfig {
        t_end,
        ..SolverConfig::default()
    };
    run(&SmoothData::default(), &material, &grid, &config).unwrap()
}

#[test]
fn energy_decays_on_smooth_data() {
    let result = smooth_run(1025, 0.5);
    assert!(!result.report.detected);
    assert!(result.records.iter().all(|r| r.dissipation >= 0.0));
    assert_eq!(first_energy_increase(&result.records, 1e-10), None);
    let last = result.records.last().unwrap();
    assert!(last.energy < result.records[0].energy);
}

#[test]
fn energy_budget_residual_is_first_order() {
    let residual = |nx| {
        let r = smooth_run(nx, 0.5);
        energy_budget_residuals(&r.records).last().unwrap().abs()
    };
    let (coarse, fine) = (residual(513), residual(1025));
    let ratio = coarse / fine;
    assert!((1.6..2.6).contains(&ratio), "ratio {ratio}");
}

#[test]
fn divergence_residual_shrinks_under_refinement() {
    let material = LeslieMaterial::general();
    let worst = |nx: usize| {
        let grid = Grid::new(-4.5, 4.5, nx).unwrap();
        let config = SolverConfig {
            t_end: 0.25,
            ..SolverConfig::default()
        };
        let (mut state, _) =
            build_initial_state(&SmoothData::default(), &material, &grid, config.t_end).unwrap();
        let mut solver = Solver::new(material, grid, config).unwrap();
        let scale = energy(&state, &material, &grid);
        let mut worst = 0.0_f64;
        while state.t < 0.25 - 1e-12 {
            let prev = state.clone();
            solver.step(&mut state).unwrap();
            worst = worst.max(divergence_residual(&prev, &state, &material, &grid).abs() / scale);
        }
        worst
    };
    let (coarse, fine) = (worst(513), worst(1025));
    let ratio = coarse / fine;
    assert!(ratio > 1.6, "ratio {ratio} ({coarse:e} → {fine:e})");
}
