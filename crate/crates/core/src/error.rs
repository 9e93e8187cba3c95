use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("projector annihilates seed spinor")]
    DegenerateProjector,

    #[error("no closed-form mode for this configuration")]
    UnsupportedPauliConfiguration,

    #[error("stencil evaluation failed")]
    StencilEvaluation,

    #[error("current {current} is not defined on {equation} fields")]
    IncompatibleCurrent { current: String, equation: &'static str },

    #[error("aliased quadrature: grid_n = {grid_n}, band limit needs at least {required}")]
    AliasedQuadrature { grid_n: usize, required: usize },

    #[error("field momenta are not on the periodic-box lattice")]
    OffLattice,

    #[error("degenerate sampling: {0}")]
    DegenerateSampling(String),

    #[error("ill-separated nullspace, increase sampling (gap {gap:.3e})")]
    IllSeparatedNullspace { gap: f64 },

    #[error("unsupported ansatz degree {0}, expected 1 or 2")]
    UnsupportedDegree(u32),

    #[error("invalid physical constants: {0}")]
    InvalidConstants(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
