use thiserror::Error;

/// Usage errors raised by the algebra and the explorer.
///
/// Law violations are never errors: they are reported as failing checks.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PcmError {
    #[error("element `{element}` is not in the carrier of `{pcm}`")]
    NotInCarrier { pcm: String, element: String },

    #[error("carrier mismatch: expected `{expected}`, found `{found}`")]
    CarrierMismatch { expected: String, found: String },

    #[error("join of `{element}` with a carrier element leaves the carrier of `{pcm}`")]
    NotClosed { pcm: String, element: String },

    #[error("`{relation}` is not a separating relation (fails {law})")]
    NotSeparatingRelation { relation: String, law: String },

    #[error("operation `{op}` is undefined on top")]
    TopInput { op: String },

    #[error("ticket bound {bound} exceeded: {requested} tickets requested")]
    BoundExceeded { bound: u32, requested: u32 },

    #[error("invalid structure: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, PcmError>;
