use core::fmt;

/// Failures raised by the numerical core.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// `K1 cos²θ + K3 sin²θ` was not positive.
    NonPositiveRadicand { theta: f64, radicand: f64 },
    /// `min(γ1 − h²/g)` over θ is not positive.
    NoDampingMargin { margin: f64 },
    /// Fewer than 64 samples requested for the coefficient bounds.
    TooFewSamples(usize),
    /// `c′(θ*) ≤ 0`, so no cusp can form from the base angle.
    NonIncreasingSpeed { theta_star: f64, c_prime: f64 },
    /// Profile amplitude below the required threshold.
    AmplitudeTooSmall { amplitude: f64, required: f64 },
    /// A scalar parameter is outside its admissible range.
    InvalidParameter { name: &'static str, value: f64 },
    /// The grid does not cover the data support plus the wave margin.
    DomainTooSmall {
        required: (f64, f64),
        actual: (f64, f64),
    },
    /// The tridiagonal heat system lost strict diagonal dominance.
    NotDiagonallyDominant { row: usize },
    /// A field became NaN or infinite.
    NonFinite { field: &'static str, index: usize },
    /// A traced characteristic left the computational domain.
    CharacteristicLeftDomain { t: f64, x: f64 },
    /// Snapshots are too sparse in time to trace a characteristic.
    SnapshotsTooSparse { cells_per_interval: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonPositiveRadicand { theta, radicand } => {
                write!(f, "c²({theta}) = {radicand} is not positive")
            }
            Error::NoDampingMargin { margin } => {
                write!(f, "min over θ of γ1 − h²/g is {margin}, must be positive")
            }
            Error::TooFewSamples(n) => write!(f, "{n} samples requested, at least 64 required"),
            Error::NonIncreasingSpeed {
                theta_star,
                c_prime,
            } => {
                write!(
                    f,
                    "c′(θ*) = {c_prime} at θ* = {theta_star}, must be positive"
                )
            }
            Error::AmplitudeTooSmall {
                amplitude,
                required,
            } => {
                write!(f, "amplitude {amplitude} is below the required {required}")
            }
            Error::InvalidParameter { name, value } => write!(f, "invalid {name}: {value}"),
            Error::DomainTooSmall { required, actual } => write!(
                f,
                "domain [{}, {}] does not contain [{}, {}]",
                actual.0, actual.1, required.0, required.1
            ),
            Error::NotDiagonallyDominant { row } => {
                write!(
                    f,
                    "heat system is not strictly diagonally dominant at row {row}"
                )
            }
            Error::NonFinite { field, index } => {
                write!(f, "non-finite value in {field} at node {index}")
            }
            Error::CharacteristicLeftDomain { t, x } => {
                write!(f, "characteristic left the domain at t = {t} (x = {x})")
            }
            Error::SnapshotsTooSparse { cells_per_interval } => write!(
                f,
                "characteristic moves {cells_per_interval} cells between snapshots, must be < 1"
            ),
        }
    }
}

impl core::error::Error for Error {}
