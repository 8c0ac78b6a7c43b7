use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown point id {0}")]
    UnknownPoint(usize),
    #[error("invalid space: {0}")]
    InvalidSpace(String),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("parameter {0} collides with an existing sample parameter")]
    ParamCollision(f64),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("invalid cover: {0}")]
    InvalidCover(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("distance between {0} and {1} is infinite")]
    InfiniteDistance(usize, usize),
    #[error("no approximate midpoint for ({a}, {b}) at level {level} (slack {slack})")]
    MidpointNotFound {
        a: usize,
        b: usize,
        level: u32,
        slack: f64,
    },
    #[error("step bound violated between {a} and {b} at level {level}: {step} > {bound}")]
    StepBound {
        a: usize,
        b: usize,
        level: u32,
        step: f64,
        bound: f64,
    },
    #[error("field {member} is not 1-Lipschitz: |f({x}) - f({y})| = {diff} > d = {dist}")]
    NotLipschitz {
        member: usize,
        x: usize,
        y: usize,
        diff: f64,
        dist: f64,
    },
    #[error("point {0} is at infinite distance from the extension domain")]
    Unreachable(usize),
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("grid sample is empty")]
    EmptySample,
    #[error("trial function {kind} exceeds the gradient bound on edge ({u}, {v})")]
    GradientBound { kind: String, u: usize, v: usize },
    #[error("d_Γ/ρ_ℓ bracket failed at ({x}, {y}): lower {lower}, upper {upper}")]
    BracketMismatch {
        x: usize,
        y: usize,
        lower: f64,
        upper: f64,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
