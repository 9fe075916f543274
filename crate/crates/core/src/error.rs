use crate::half_int::HalfInt;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid spin label s={s}, m={m}")]
    InvalidSpinLabel { s: HalfInt, m: HalfInt },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("sector s={s_star} has probability {probability:e}, too small to condition on")]
    DegenerateSector { s_star: HalfInt, probability: f64 },

    #[error("internal consistency failure: probability {value:e} at {context}")]
    NegativeProbability { value: f64, context: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
