use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A model parameter is outside its admissible range.
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    /// An argument lies outside the domain of the operation.
    Domain(&'static str),
    /// A quantity that only exists in another parameter regime was requested.
    NotDefined(&'static str),
    /// A theorem hypothesis required by the operation does not hold.
    Hypothesis(&'static str),
    /// An iterative method ran out of iterations.
    NoConvergence {
        method: &'static str,
        iterations: usize,
    },
    /// Analytic continuation of an equilibrium in the handling parameter failed.
    ContinuationFailure(&'static str),
    /// The integrator step size violates its precondition.
    StepSize { h: f64, limit: f64 },
    /// The integrated state stopped being finite.
    NonFinite { time: f64 },
    /// The characteristic function vanishes (numerically) on the contour.
    RootOnContour { at_re: f64, at_im: f64 },
    /// Nonresonance fails: an eigenvalue sits on `2kπi/ω`.
    Resonance { k: i64 },
    /// A periodic-orbit candidate left the nonnegative quadrant.
    PositivityLoss,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter {
                name,
                value,
                reason,
            } => write!(f, "invalid parameter {name} = {value}: {reason}"),
            Error::Domain(what) => write!(f, "domain violation: {what}"),
            Error::NotDefined(what) => write!(f, "not defined: {what}"),
            Error::Hypothesis(what) => write!(f, "hypothesis violated: {what}"),
            Error::NoConvergence { method, iterations } => {
                write!(f, "{method} did not converge in {iterations} iterations")
            }
            Error::ContinuationFailure(what) => write!(f, "continuation failure: {what}"),
            Error::StepSize { h, limit } => {
                write!(f, "step size h = {h} exceeds the admissible limit {limit}")
            }
            Error::NonFinite { time } => write!(f, "state became non-finite at t = {time}"),
            Error::RootOnContour { at_re, at_im } => write!(
                f,
                "characteristic function vanishes near {at_re}{at_im:+}i on the contour"
            ),
            Error::Resonance { k } => write!(f, "resonance at k = {k}"),
            Error::PositivityLoss => write!(f, "periodic-orbit candidate lost positivity"),
        }
    }
}

impl core::error::Error for Error {}
