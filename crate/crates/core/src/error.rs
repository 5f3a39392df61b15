use alloc::string::String;

/// Errors raised by the reconstruction stages.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("point is at or behind the camera plane (depth {depth})")]
    BehindCamera { depth: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("degenerate segment (length {length:e})")]
    DegenerateSegment { length: f64 },

    #[error("invalid camera: {0}")]
    InvalidCamera(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("ray accumulated too little surface mass ({mass:.4} < {required})")]
    NoSurface { mass: f64, required: f64 },

    #[error("ray target has no ground-truth edge to associate with")]
    NoAssociation,

    #[error("SDF gradient is degenerate (norm {norm:e})")]
    DegenerateGradient { norm: f64 },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
