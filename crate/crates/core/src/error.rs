use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Operands of an algebra operation were built with different ħ.
    HbarMismatch {
        lhs: f64,
        rhs: f64,
    },
    /// The adjoint-action series did not settle within the term budget.
    SeriesNotConverged {
        terms: usize,
    },
    /// Two independent evaluation routes disagreed beyond tolerance.
    RouteMismatch {
        what: &'static str,
        deviation: f64,
    },
    /// The Wigner generator is not first order in the conjugate momenta.
    NonTransportGenerator {
        pi_degree: u32,
    },
    /// `α = ω = 0`: the steady-state antiderivative of the drive is undefined.
    UndefinedAntiderivative,
    UnsupportedFrame(&'static str),
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },
    Domain(&'static str),
    DegenerateState {
        mass: f64,
    },
    InsufficientData {
        required: f64,
        available: f64,
    },
    /// Free undamped DC response.
    Divergent,
    UnsupportedField(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::HbarMismatch { lhs, rhs } => {
                write!(f, "operands carry different hbar ({lhs} vs {rhs})")
            }
            Error::SeriesNotConverged { terms } => {
                write!(f, "commutator series did not converge within {terms} terms")
            }
            Error::RouteMismatch { what, deviation } => {
                write!(f, "{what}: independent routes disagree (deviation {deviation:e})")
            }
            Error::NonTransportGenerator { pi_degree } => write!(
                f,
                "non-transport generator: degree {pi_degree} in the conjugate momenta; \
                 use the residual-check path instead"
            ),
            Error::UndefinedAntiderivative => {
                write!(f, "undefined antiderivative normalization (alpha = omega = 0)")
            }
            Error::UnsupportedFrame(why) => write!(f, "unsupported frame: {why}"),
            Error::InvalidParameter { name, reason } => {
                write!(f, "invalid parameter `{name}`: {reason}")
            }
            Error::Domain(why) => write!(f, "domain error: {why}"),
            Error::DegenerateState { mass } => {
                write!(f, "degenerate state: total mass {mass:e} is not positive")
            }
            Error::InsufficientData { required, available } => {
                write!(f, "insufficient data: fit window needs length {required}, have {available}")
            }
            Error::Divergent => write!(f, "divergent response: undamped DC conductivity is unbounded"),
            Error::UnsupportedField(why) => write!(f, "unsupported transport field: {why}"),
        }
    }
}

impl core::error::Error for Error {}
