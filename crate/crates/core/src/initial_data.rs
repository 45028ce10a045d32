//! Initial data.
//!
//! [`TheoremData`] is the cusp-forming family
//!
//! ```text
//! θ0(x) = θ* + ε φ(x/ε)
//! θ1(x) = (−c(θ0(x)) + ε) φ′(x/ε)
//! u0(x) = ∫_{−ε}^{x} (h/g) c(θ0) θ0′ da   on [−ε, ε]
//!       = χ(x)                             on (ε, ε + 2)
//!       = 0                                elsewhere
//! ```
//!
//! with the bump `φ(a) = −M a (1 − a²)²` on `|a| ≤ 1` and `χ` the cubic
//! Hermite connector that makes `u0` C¹. [`SmoothData`] is a low-amplitude
//! family used for convergence studies.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_4, LN_2, PI};

use crate::diagnostics::{self, InitialReport};
use crate::material::{LeslieMaterial, MaterialBounds};
use crate::numerics::{simpson_to_tolerance, Quadrature};
use crate::solver::{Grid, State};
use crate::Error;

/// `∫_{−1}^{1} (φ′(a)/M)² da = 256/315` for the chosen bump.
pub const PROFILE_ENERGY: f64 = 256.0 / 315.0;

/// Tolerance for every quadrature performed while building initial data.
pub const QUADRATURE_TOLERANCE: f64 = 1e-10;

pub const DEFAULT_EPSILON: f64 = 0.05;
pub const DEFAULT_AMPLITUDE_SLACK: f64 = 1.1;
pub const DEFAULT_THETA_STAR: f64 = FRAC_PI_4;

/// Something that can be sampled into an initial [`State`].
pub trait InitialProfile {
    fn theta0(&self, x: f64) -> f64;
    fn theta0_prime(&self, x: f64) -> f64;
    fn theta1(&self, x: f64) -> f64;
    fn u0(&self, x: f64) -> f64;
    /// Interval outside which the data equal their far-field values.
    fn support(&self) -> (f64, f64);
}

/// Parameters of the cusp-forming family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InitialDataSpec {
    pub epsilon: f64,
    pub theta_star: f64,
    /// `M = −φ′(0)`.
    pub amplitude: f64,
    pub amplitude_slack: f64,
    /// When false, the amplitude threshold and the sign of `c′(θ*)` are not
    /// enforced (control runs with small fixed amplitude).
    pub enforce_hypotheses: bool,
}

impl InitialDataSpec {
    /// Spec with `M = ⌈slack · M_min⌉`.
    pub fn with_auto_amplitude(
        material: &LeslieMaterial,
        epsilon: f64,
        theta_star: f64,
        amplitude_slack: f64,
    ) -> Result<Self, Error> {
        let bounds = material.default_bounds()?;
        let threshold = amplitude_threshold(material, &bounds, theta_star)?;
        Ok(InitialDataSpec {
            epsilon,
            theta_star,
            amplitude: libm::ceil(amplitude_slack * threshold),
            amplitude_slack,
            enforce_hypotheses: true,
        })
    }

    /// Bound on `|φ′|`; equals `M` for the chosen bump.
    pub fn c2(&self) -> f64 {
        self.amplitude
    }

    /// Budget constant for `∫φ′²`.
    pub fn k0(&self) -> f64 {
        2.0 * self.amplitude * self.amplitude * PROFILE_ENERGY + 1.0
    }

    pub fn phi(&self, a: f64) -> f64 {
        if a.abs() > 1.0 {
            return 0.0;
        }
        let w = 1.0 - a * a;
        -self.amplitude * a * w * w
    }

    pub fn phi_prime(&self, a: f64) -> f64 {
        if a.abs() > 1.0 {
            return 0.0;
        }
        -self.amplitude * (1.0 - a * a) * (1.0 - 5.0 * a * a)
    }

    fn check_parameters(&self) -> Result<(), Error> {
        let positive = [("epsilon", self.epsilon), ("amplitude", self.amplitude)];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter { name, value });
            }
        }
        if !self.theta_star.is_finite() {
            return Err(Error::InvalidParameter {
                name: "theta_star",
                value: self.theta_star,
            });
        }
        if !(self.amplitude_slack >= 1.0 && self.amplitude_slack.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "amplitude_slack",
                value: self.amplitude_slack,
            });
        }
        Ok(())
    }
}

/// Right side of the amplitude condition on `−φ′(0)`:
/// `max{16 C_U ‖γ1 − h²/g‖ / (c′(θ*) C_L ln 2), exp(‖γ1 − h²/g‖) / C_L}`.
pub fn amplitude_threshold(
    material: &LeslieMaterial,
    bounds: &MaterialBounds,
    theta_star: f64,
) -> Result<f64, Error> {
    let c_prime = material.c_prime(theta_star);
    if !(c_prime > 0.0) {
        return Err(Error::NonIncreasingSpeed {
            theta_star,
            c_prime,
        });
    }
    let norm = bounds.damping_sup.abs().max(bounds.damping_margin.abs());
    let riccati = 16.0 * bounds.c_upper * norm / (c_prime * bounds.c_lower * LN_2);
    let damping = libm::exp(norm) / bounds.c_lower;
    Ok(riccati.max(damping))
}

/// Cubic `c3 x³ + c2 x² + c1 x + c0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChiCoefficients {
    pub c3: f64,
    pub c2: f64,
    pub c1: f64,
    pub c0: f64,
}

impl ChiCoefficients {
    /// Solves the four Hermite conditions `χ(a) = va`, `χ′(a) = da`,
    /// `χ(b) = vb`, `χ′(b) = db` in the monomial basis.
    pub fn hermite(a: f64, va: f64, da: f64, b: f64, vb: f64, db: f64) -> Self {
        let mut m = [
            [a * a * a, a * a, a, 1.0, va],
            [3.0 * a * a, 2.0 * a, 1.0, 0.0, da],
            [b * b * b, b * b, b, 1.0, vb],
            [3.0 * b * b, 2.0 * b, 1.0, 0.0, db],
        ];
        for col in 0..4 {
            let pivot = (col..4)
                .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
                .unwrap_or(col);
            m.swap(col, pivot);
            for row in col + 1..4 {
                let f = m[row][col] / m[col][col];
                for k in col..5 {
                    m[row][k] -= f * m[col][k];
                }
            }
        }
        let mut x = [0.0; 4];
        for row in (0..4).rev() {
            let tail: f64 = (row + 1..4).map(|k| m[row][k] * x[k]).sum();
            x[row] = (m[row][4] - tail) / m[row][row];
        }
        ChiCoefficients {
            c3: x[0],
            c2: x[1],
            c1: x[2],
            c0: x[3],
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        ((self.c3 * x + self.c2) * x + self.c1) * x + self.c0
    }

    pub fn slope(&self, x: f64) -> f64 {
        (3.0 * self.c3 * x + 2.0 * self.c2) * x + self.c1
    }
}

/// The cusp-forming data, with its hypotheses checked.
#[derive(Clone, Debug)]
pub struct TheoremData {
    pub spec: InitialDataSpec,
    pub material: LeslieMaterial,
    pub bounds: MaterialBounds,
    /// `M_min`, when `c′(θ*) > 0`.
    pub threshold: Option<f64>,
    /// `∫_{−ε}^{ε} (h/g) c(θ0) θ0′ da`.
    pub chi_integral: Quadrature,
    pub chi: ChiCoefficients,
}

impl TheoremData {
    pub fn new(spec: InitialDataSpec, material: LeslieMaterial) -> Result<Self, Error> {
        spec.check_parameters()?;
        let bounds = material.default_bounds()?;
        let threshold = match amplitude_threshold(&material, &bounds, spec.theta_star) {
            Ok(m) => Some(m),
            Err(e) if spec.enforce_hypotheses => return Err(e),
            Err(_) => None,
        };
        if spec.enforce_hypotheses {
            let required = spec.amplitude_slack * threshold.unwrap_or(0.0);
            if spec.amplitude < required {
                return Err(Error::AmplitudeTooSmall {
                    amplitude: spec.amplitude,
                    required,
                });
            }
        }

        let mut data = TheoremData {
            spec,
            material,
            bounds,
            threshold,
            chi_integral: Quadrature {
                value: 0.0,
                error_estimate: 0.0,
                panels: 0,
            },
            chi: ChiCoefficients {
                c3: 0.0,
                c2: 0.0,
                c1: 0.0,
                c0: 0.0,
            },
        };
        let eps = spec.epsilon;
        data.chi_integral =
            simpson_to_tolerance(|a| data.u0_integrand(a), -eps, eps, QUADRATURE_TOLERANCE);
        data.chi = ChiCoefficients::hermite(eps, data.chi_integral.value, 0.0, eps + 2.0, 0.0, 0.0);

        if spec.enforce_hypotheses && eps < data.wave_speed(spec.theta_star) {
            let s00 = data.s_at_origin();
            let norm = bounds.damping_sup;
            let c_prime = material.c_prime(spec.theta_star);
            let required = (16.0 * bounds.c_upper * norm / (c_prime * LN_2)).max(libm::exp(norm));
            if !(s00 > required) {
                return Err(Error::AmplitudeTooSmall {
                    amplitude: s00,
                    required,
                });
            }
        }
        Ok(data)
    }

    fn wave_speed(&self, theta: f64) -> f64 {
        self.material.coefficients(theta).c
    }

    fn u0_integrand(&self, a: f64) -> f64 {
        let k = self.material.coefficients(self.theta0(a));
        k.h / k.g * k.c * self.theta0_prime(a)
    }

    /// `S(0, 0) = (2c(θ*) − ε) M`.
    pub fn s_at_origin(&self) -> f64 {
        (2.0 * self.wave_speed(self.spec.theta_star) - self.spec.epsilon) * self.spec.amplitude
    }

    /// `max |χ′|` allowed: `(3/2) sup|h/g| C_U C2 ε`.
    pub fn chi_slope_bound(&self) -> f64 {
        1.5 * self.bounds.h_over_g_sup * self.bounds.c_upper * self.spec.c2() * self.spec.epsilon
    }

    /// Analytic bound on `sup|J(·, 0)|`: `sup(h/g) max(1, (3/2) C_U) M ε`.
    pub fn initial_j_bound(&self) -> f64 {
        self.bounds.h_over_g_sup
            * 1.0_f64.max(1.5 * self.bounds.c_upper)
            * self.spec.amplitude
            * self.spec.epsilon
    }

    pub fn u0_prime(&self, x: f64) -> f64 {
        let eps = self.spec.epsilon;
        if (-eps..=eps).contains(&x) {
            self.u0_integrand(x)
        } else if x > eps && x < eps + 2.0 {
            self.chi.slope(x)
        } else {
            0.0
        }
    }
}

impl InitialProfile for TheoremData {
    fn theta0(&self, x: f64) -> f64 {
        let eps = self.spec.epsilon;
        self.spec.theta_star + eps * self.spec.phi(x / eps)
    }

    fn theta0_prime(&self, x: f64) -> f64 {
        self.spec.phi_prime(x / self.spec.epsilon)
    }

    fn theta1(&self, x: f64) -> f64 {
        (-self.wave_speed(self.theta0(x)) + self.spec.epsilon) * self.theta0_prime(x)
    }

    fn u0(&self, x: f64) -> f64 {
        let eps = self.spec.epsilon;
        if (-eps..=eps).contains(&x) {
            simpson_to_tolerance(|a| self.u0_integrand(a), -eps, x, 1e-12).value
        } else if x > eps && x < eps + 2.0 {
            self.chi.value(x)
        } else {
            0.0
        }
    }

    fn support(&self) -> (f64, f64) {
        (-self.spec.epsilon, self.spec.epsilon + 2.0)
    }
}

/// `θ0 = θ* + A sin²(πx/L)` on `|x| ≤ L`, `θ1 = 0`, `u0 = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmoothData {
    pub theta_star: f64,
    pub amplitude: f64,
    pub half_width: f64,
}

impl Default for SmoothData {
    fn default() -> Self {
        SmoothData {
            theta_star: DEFAULT_THETA_STAR,
            amplitude: 0.1,
            half_width: 2.0,
        }
    }
}

impl InitialProfile for SmoothData {
    fn theta0(&self, x: f64) -> f64 {
        if x.abs() > self.half_width {
            return self.theta_star;
        }
        let s = libm::sin(PI * x / self.half_width);
        self.theta_star + self.amplitude * s * s
    }

    fn theta0_prime(&self, x: f64) -> f64 {
        if x.abs() > self.half_width {
            return 0.0;
        }
        self.amplitude * PI / self.half_width * libm::sin(2.0 * PI * x / self.half_width)
    }

    fn theta1(&self, _x: f64) -> f64 {
        0.0
    }

    fn u0(&self, _x: f64) -> f64 {
        0.0
    }

    fn support(&self) -> (f64, f64) {
        (-self.half_width, self.half_width)
    }
}

/// Samples `profile` on `grid` and reports the initial diagnostics. The
/// domain must contain the support widened by `C_U · t_end + 1` each side.
pub fn build_initial_state<P: InitialProfile + ?Sized>(
    profile: &P,
    material: &LeslieMaterial,
    grid: &Grid,
    t_end: f64,
) -> Result<(State, InitialReport), Error> {
    let bounds = material.default_bounds()?;
    let margin = bounds.c_upper * t_end + 1.0;
    let (lo, hi) = profile.support();
    let required = (lo - margin, hi + margin);
    if grid.x_min > required.0 || grid.x_max < required.1 {
        return Err(Error::DomainTooSmall {
            required,
            actual: (grid.x_min, grid.x_max),
        });
    }

    let n = grid.nx;
    let mut theta = Vec::with_capacity(n);
    let mut u = Vec::with_capacity(n);
    let mut r = Vec::with_capacity(n);
    let mut s = Vec::with_capacity(n);
    for i in 0..n {
        let x = grid.x(i);
        let th = profile.theta0(x);
        let c_theta_x = material.coefficients(th).c * profile.theta0_prime(x);
        let theta_t = profile.theta1(x);
        theta.push(th);
        u.push(profile.u0(x));
        r.push(theta_t + c_theta_x);
        s.push(theta_t - c_theta_x);
    }
    let state = State {
        t: 0.0,
        theta,
        u,
        r,
        s,
    };
    let report = diagnostics::initial_report(&state, material, grid);
    Ok((state, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn general_spec() -> InitialDataSpec {
        InitialDataSpec::with_auto_amplitude(
            &LeslieMaterial::general(),
            DEFAULT_EPSILON,
            DEFAULT_THETA_STAR,
            DEFAULT_AMPLITUDE_SLACK,
        )
        .unwrap()
    }

    #[test]
    fn bump_values() {
        let spec = general_spec();
        assert_eq!(spec.phi(0.0), 0.0);
        assert_eq!(spec.phi_prime(0.0), -spec.amplitude);
        for a in [-1.0, 1.0] {
            assert_eq!(spec.phi(a), 0.0);
            assert_eq!(spec.phi_prime(a), 0.0);
        }
        assert_eq!(spec.phi(1.5), 0.0);
        for i in 0..=2000 {
            let a = -1.0 + i as f64 / 1000.0;
            assert!(spec.phi_prime(a).abs() <= spec.c2() * (1.0 + 1e-15));
        }
    }

    #[test]
    fn auto_amplitudes() {
        assert_eq!(general_spec().amplitude, 206.0);
        let special = InitialDataSpec::with_auto_amplitude(
            &LeslieMaterial::special(),
            DEFAULT_EPSILON,
            DEFAULT_THETA_STAR,
            DEFAULT_AMPLITUDE_SLACK,
        )
        .unwrap();
        assert_eq!(special.amplitude, 88.0);
    }

    #[test]
    fn threshold_needs_increasing_speed() {
        let m = LeslieMaterial::constant_speed();
        let b = m.default_bounds().unwrap();
        assert!(matches!(
            amplitude_threshold(&m, &b, DEFAULT_THETA_STAR),
            Err(Error::NonIncreasingSpeed { .. })
        ));
        let spec = InitialDataSpec {
            epsilon: 0.05,
            theta_star: DEFAULT_THETA_STAR,
            amplitude: 5.0,
            amplitude_slack: 1.1,
            enforce_hypotheses: true,
        };
        assert!(TheoremData::new(spec, m).is_err());
        let relaxed = InitialDataSpec {
            enforce_hypotheses: false,
            ..spec
        };
        assert!(TheoremData::new(relaxed, m).unwrap().threshold.is_none());
    }

    #[test]
    fn small_amplitude_is_rejected() {
        let spec = InitialDataSpec {
            amplitude: 150.0,
            ..general_spec()
        };
        assert!(matches!(
            TheoremData::new(spec, LeslieMaterial::general()),
            Err(Error::AmplitudeTooSmall { .. })
        ));
        let bad_eps = InitialDataSpec {
            epsilon: -1.0,
            ..general_spec()
        };
        assert!(matches!(
            TheoremData::new(bad_eps, LeslieMaterial::general()),
            Err(Error::InvalidParameter {
                name: "epsilon",
                ..
            })
        ));
    }

    #[test]
    fn chi_meets_endpoint_constraints() {
        let data = TheoremData::new(general_spec(), LeslieMaterial::general()).unwrap();
        let eps = data.spec.epsilon;
        let integral = data.chi_integral.value;
        assert!(data.chi_integral.error_estimate < QUADRATURE_TOLERANCE);
        assert!((data.chi.value(eps) - integral).abs() < 1e-9);
        assert!(data.chi.slope(eps).abs() < 1e-9);
        assert!(data.chi.value(eps + 2.0).abs() < 1e-9);
        assert!(data.chi.slope(eps + 2.0).abs() < 1e-9);
        assert!((data.chi.slope(eps + 1.0) + 0.75 * integral).abs() < 1e-9);
    }

    #[test]
    fn u0_is_continuous_at_junctions() {
        let data = TheoremData::new(general_spec(), LeslieMaterial::general()).unwrap();
        let eps = data.spec.epsilon;
        assert!((data.u0(eps) - data.chi.value(eps)).abs() < 1e-9);
        assert!((data.u0_prime(eps) - data.chi.slope(eps)).abs() < 1e-9);
        assert!(data.u0(-eps).abs() < 1e-15);
        assert!(data.u0(eps + 2.0).abs() < 1e-9);
        assert_eq!(data.u0(-1.0), 0.0);
    }

    #[test]
    fn theta1_at_origin() {
        let spec = InitialDataSpec {
            amplitude: 200.0,
            amplitude_slack: 1.0,
            ..general_spec()
        };
        let data = TheoremData::new(spec, LeslieMaterial::general()).unwrap();
        let expected = (libm::sqrt(1.5) - 0.05) * 200.0;
        assert!((data.theta1(0.0) - expected).abs() < 1e-12);
        assert!((expected - 234.9489742783178).abs() < 1e-9);
        assert_eq!(data.theta0(0.0), DEFAULT_THETA_STAR);
        assert_eq!(data.theta0(3.0), DEFAULT_THETA_STAR);
        assert_eq!(data.theta1(-0.2), 0.0);
    }

    #[test]
    fn smooth_data_is_c1_at_edges() {
        let d = SmoothData::default();
        assert!((d.theta0(2.0) - d.theta_star).abs() < 1e-15);
        assert!(d.theta0_prime(2.0).abs() < 1e-15);
        assert!((d.theta0(1.0) - d.theta_star - 0.1).abs() < 1e-15);
    }
}
