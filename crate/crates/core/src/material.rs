//! Leslie viscosity coefficients, Oseen–Frank elastic constants and the
//! coefficient functions of the Poiseuille-flow system
//!
//! ```text
//! g(θ) = α1 sin²θ cos²θ + (α5 − α2)/2 sin²θ + (α3 + α6)/2 cos²θ + α4/2
//! h(θ) = α3 cos²θ − α2 sin²θ = (γ1 + γ2 cos 2θ)/2
//! c²(θ) = K1 cos²θ + K3 sin²θ
//! ```
//!
//! All coefficient functions are π-periodic in θ.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use core::fmt;

use crate::Error;

/// Relative tolerance used for the equality relations among the coefficients.
pub const EQUALITY_TOLERANCE: f64 = 1e-12;

/// Number of equispaced samples used by [`LeslieMaterial::default_bounds`].
pub const DEFAULT_BOUND_SAMPLES: usize = 4096;

/// Leslie coefficients `α1..α6`, `γ1`, `γ2` and elastic constants `K1`, `K3`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LeslieMaterial {
    pub alpha: [f64; 6],
    pub gamma1: f64,
    pub gamma2: f64,
    pub k1: f64,
    pub k3: f64,
}

/// Named relations checked by [`LeslieMaterial::validate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Finite,
    Gamma1Compatibility,
    Gamma2Compatibility,
    Parodi,
    Alpha4Positive,
    BulkViscosityPositive,
    Gamma1Positive,
    ShearViscosityPositive,
    CouplingDiscriminant,
    K1Positive,
    K3Positive,
}

impl Relation {
    pub fn name(self) -> &'static str {
        match self {
            Relation::Finite => "finite",
            Relation::Gamma1Compatibility => "gamma1 = alpha3 - alpha2",
            Relation::Gamma2Compatibility => "gamma2 = alpha6 - alpha5",
            Relation::Parodi => "parodi: alpha2 + alpha3 = alpha6 - alpha5",
            Relation::Alpha4Positive => "alpha4 > 0",
            Relation::BulkViscosityPositive => "2 alpha1 + 3 alpha4 + 2 alpha5 + 2 alpha6 > 0",
            Relation::Gamma1Positive => "gamma1 > 0",
            Relation::ShearViscosityPositive => "2 alpha4 + alpha5 + alpha6 > 0",
            Relation::CouplingDiscriminant => {
                "4 gamma1 (2 alpha4 + alpha5 + alpha6) > (alpha2 + alpha3 + gamma2)^2"
            }
            Relation::K1Positive => "K1 > 0",
            Relation::K3Positive => "K3 > 0",
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One violated relation. For equalities `slack` is `lhs − rhs`; for strict
/// inequalities `lhs > rhs` it is `lhs − rhs` (so `≤ 0` on violation).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Violation {
    pub relation: Relation,
    pub slack: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violates(&self, relation: Relation) -> bool {
        self.violations.iter().any(|v| v.relation == relation)
    }
}

/// All coefficient functions at one angle, from a single `sincos`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coefficients {
    pub g: f64,
    pub h: f64,
    pub c: f64,
    pub c_prime: f64,
    /// `γ1 − h²/g`, the effective damping rate.
    pub damping: f64,
}

/// Extrema of the coefficient functions over one period.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MaterialBounds {
    pub g_lower: f64,
    pub g_upper: f64,
    pub h_lower: f64,
    pub h_upper: f64,
    pub c_lower: f64,
    pub c_upper: f64,
    /// `max |h/g|`.
    pub h_over_g_sup: f64,
    /// `min (γ1 − h²/g)`.
    pub damping_margin: f64,
    /// `max (γ1 − h²/g)`, the sup-norm entering the blowup bound.
    pub damping_sup: f64,
}

impl LeslieMaterial {
    pub const fn new(alpha: [f64; 6], gamma1: f64, gamma2: f64, k1: f64, k3: f64) -> Self {
        LeslieMaterial {
            alpha,
            gamma1,
            gamma2,
            k1,
            k3,
        }
    }

    /// Builds a material taking `γ1 = α3 − α2` and `γ2 = α6 − α5`.
    pub fn from_alphas(alpha: [f64; 6], k1: f64, k3: f64) -> Self {
        Self::new(alpha, alpha[2] - alpha[1], alpha[5] - alpha[4], k1, k3)
    }

    /// `g = h = 1`, `γ1 = 2`, `K1 = 1`, `K3 = 2`.
    pub const fn special() -> Self {
        Self::new([0.0, -1.0, 1.0, 1.0, 0.0, 0.0], 2.0, 0.0, 1.0, 2.0)
    }

    /// `g = 3/2 + sin²θ`, `h = 1 + sin²θ`, `γ1 = 3`, `c² = 1 + sin²θ`.
    pub const fn general() -> Self {
        Self::new([0.0, -2.0, 1.0, 2.0, 1.0, 0.0], 3.0, -1.0, 1.0, 2.0)
    }

    /// The special coefficients with `K1 = K3 = 1`, so `c ≡ 1`.
    pub const fn constant_speed() -> Self {
        Self::new([0.0, -1.0, 1.0, 1.0, 0.0, 0.0], 2.0, 0.0, 1.0, 1.0)
    }

    pub const PRESET_NAMES: [&'static str; 3] = ["special", "general", "constant-speed"];

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "special" => Some(Self::special()),
            "general" => Some(Self::general()),
            "constant-speed" => Some(Self::constant_speed()),
            _ => None,
        }
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let [a1, a2, a3, a4, a5, a6] = self.alpha;
        let all = [
            a1,
            a2,
            a3,
            a4,
            a5,
            a6,
            self.gamma1,
            self.gamma2,
            self.k1,
            self.k3,
        ];
        if let Some(bad) = all.iter().find(|v| !v.is_finite()) {
            report.violations.push(Violation {
                relation: Relation::Finite,
                slack: *bad,
            });
            return report;
        }

        let mut equal = |relation, lhs: f64, rhs: f64| {
            let scale = lhs.abs().max(rhs.abs());
            if (lhs - rhs).abs() > EQUALITY_TOLERANCE * scale {
                report.violations.push(Violation {
                    relation,
                    slack: lhs - rhs,
                });
            }
        };
        equal(Relation::Gamma1Compatibility, self.gamma1, a3 - a2);
        equal(Relation::Gamma2Compatibility, self.gamma2, a6 - a5);
        equal(Relation::Parodi, a2 + a3, a6 - a5);

        let shear = 2.0 * a4 + a5 + a6;
        let coupling = a2 + a3 + self.gamma2;
        let strict = [
            (Relation::Alpha4Positive, a4),
            (
                Relation::BulkViscosityPositive,
                2.0 * a1 + 3.0 * a4 + 2.0 * a5 + 2.0 * a6,
            ),
            (Relation::Gamma1Positive, self.gamma1),
            (Relation::ShearViscosityPositive, shear),
            (
                Relation::CouplingDiscriminant,
                4.0 * self.gamma1 * shear - coupling * coupling,
            ),
            (Relation::K1Positive, self.k1),
            (Relation::K3Positive, self.k3),
        ];
        for (relation, slack) in strict {
            if !(slack > 0.0) {
                report.violations.push(Violation { relation, slack });
            }
        }
        report
    }

    pub fn g(&self, theta: f64) -> f64 {
        let (s, c) = libm::sincos(theta);
        self.g_from(s * s, c * c)
    }

    fn g_from(&self, sin2: f64, cos2: f64) -> f64 {
        let [a1, a2, a3, a4, a5, a6] = self.alpha;
        a1 * sin2 * cos2 + 0.5 * (a5 - a2) * sin2 + 0.5 * (a3 + a6) * cos2 + 0.5 * a4
    }

    /// `h = α3 cos²θ − α2 sin²θ`.
    pub fn h(&self, theta: f64) -> f64 {
        let (s, c) = libm::sincos(theta);
        self.alpha[2] * c * c - self.alpha[1] * s * s
    }

    /// `h = (γ1 + γ2 cos 2θ)/2`; equal to [`Self::h`] when the compatibility
    /// relations hold.
    pub fn h_from_gammas(&self, theta: f64) -> f64 {
        0.5 * (self.gamma1 + self.gamma2 * libm::cos(2.0 * theta))
    }

    pub fn c_squared(&self, theta: f64) -> f64 {
        let (s, c) = libm::sincos(theta);
        self.k1 * c * c + self.k3 * s * s
    }

    /// Wave speed `c(θ)`, rejecting a non-positive radicand.
    pub fn c(&self, theta: f64) -> Result<f64, Error> {
        let radicand = self.c_squared(theta);
        if radicand > 0.0 {
            Ok(libm::sqrt(radicand))
        } else {
            Err(Error::NonPositiveRadicand { theta, radicand })
        }
    }

    /// `c′(θ) = (K3 − K1) sinθ cosθ / c(θ)`.
    pub fn c_prime(&self, theta: f64) -> f64 {
        let (s, c) = libm::sincos(theta);
        (self.k3 - self.k1) * s * c / libm::sqrt(self.k1 * c * c + self.k3 * s * s)
    }

    /// `b(θ) = g − h²/γ1`.
    pub fn b(&self, theta: f64) -> f64 {
        let h = self.h(theta);
        self.g(theta) - h * h / self.gamma1
    }

    /// `γ1 − h²/g`.
    pub fn damping(&self, theta: f64) -> f64 {
        let h = self.h(theta);
        self.gamma1 - h * h / self.g(theta)
    }

    /// Evaluates every coefficient at `theta`. Assumes a valid material
    /// (positive radicand).
    #[inline]
    pub fn coefficients(&self, theta: f64) -> Coefficients {
        let (s, co) = libm::sincos(theta);
        let (sin2, cos2) = (s * s, co * co);
        let g = self.g_from(sin2, cos2);
        let h = self.alpha[2] * cos2 - self.alpha[1] * sin2;
        let c = libm::sqrt(self.k1 * cos2 + self.k3 * sin2);
        Coefficients {
            g,
            h,
            c,
            c_prime: (self.k3 - self.k1) * s * co / c,
            damping: self.gamma1 - h * h / g,
        }
    }

    /// Extrema by sampling `n_samples` equispaced angles in `[0, π)` plus
    /// `0`, `π/4`, `π/2`.
    pub fn bounds(&self, n_samples: usize) -> Result<MaterialBounds, Error> {
        if n_samples < 64 {
            return Err(Error::TooFewSamples(n_samples));
        }
        let mut b = MaterialBounds {
            g_lower: f64::INFINITY,
            g_upper: f64::NEG_INFINITY,
            h_lower: f64::INFINITY,
            h_upper: f64::NEG_INFINITY,
            c_lower: f64::INFINITY,
            c_upper: f64::NEG_INFINITY,
            h_over_g_sup: 0.0,
            damping_margin: f64::INFINITY,
            damping_sup: f64::NEG_INFINITY,
        };
        let samples = (0..n_samples)
            .map(|i| PI * i as f64 / n_samples as f64)
            .chain([0.0, FRAC_PI_4, FRAC_PI_2]);
        for theta in samples {
            let radicand = self.c_squared(theta);
            if !(radicand > 0.0) {
                return Err(Error::NonPositiveRadicand { theta, radicand });
            }
            let k = self.coefficients(theta);
            b.g_lower = b.g_lower.min(k.g);
            b.g_upper = b.g_upper.max(k.g);
            b.h_lower = b.h_lower.min(k.h);
            b.h_upper = b.h_upper.max(k.h);
            b.c_lower = b.c_lower.min(k.c);
            b.c_upper = b.c_upper.max(k.c);
            b.h_over_g_sup = b.h_over_g_sup.max((k.h / k.g).abs());
            b.damping_margin = b.damping_margin.min(k.damping);
            b.damping_sup = b.damping_sup.max(k.damping);
        }
        if !(b.damping_margin > 0.0) {
            return Err(Error::NoDampingMargin {
                margin: b.damping_margin,
            });
        }
        Ok(b)
    }

    pub fn default_bounds(&self) -> Result<MaterialBounds, Error> {
        self.bounds(DEFAULT_BOUND_SAMPLES)
    }
}
