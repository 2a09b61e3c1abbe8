use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} = {value} is outside {expected}")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("probabilities sum to {sum}, not 1")]
    InvalidSimplex { sum: f64 },

    #[error("probability {prob} at index {index} is negative or not finite")]
    BadProbability { index: usize, prob: f64 },

    #[error("distribution has empty support")]
    EmptySupport,

    #[error("unit-variance scale is undefined: radicand {radicand} is not positive")]
    Construction { radicand: f64 },

    #[error("fading variance is zero; treat the channel as unfaded")]
    Degenerate,

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("point is off the correlation manifold (radicand {radicand})")]
    OffManifold { radicand: f64 },

    #[error("output grid captures mass {mass} at x={x}, s={s}, a={a}; widen y_span")]
    Coverage { mass: f64, x: f64, s: f64, a: f64 },

    #[error("search needs {needed} objective evaluations, budget is {budget}")]
    Budget { needed: u128, budget: u128 },

    #[error("no admissible value up to {limit}")]
    SearchExhausted { limit: u64 },

    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("configuration: {0}")]
    Config(String),

    #[error("bad distribution spec at `{path}`: {message}")]
    Spec { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(name: &'static str, value: f64, expected: &'static str) -> Error {
    Error::Domain {
        name,
        value,
        expected,
    }
}
