use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("numeric failure: {0}")]
    NumericFailure(String),
    #[error("face {face} is not monotone along its boundary edge")]
    NonMonotoneFace { face: usize },
    #[error("subface holds {have} points, need at least {need}")]
    InsufficientPoints { have: usize, need: usize },
    #[error("backbone perturbation failed: {0}")]
    PerturbationFailure(String),
    #[error("region holds {points} points but the subtree has {nodes} nodes")]
    CountMismatch { points: usize, nodes: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid instance: {0}")]
    Validation(String),
    #[error("instance generation failed: {0}")]
    GenerationFailure(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
