//! Crate-wide error type. Every fallible operation funnels into [`Error`];
//! numerical checks that merely *fail* (residual above tolerance) are not
//! errors — they come back as reports with `pass == false`.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A point or grid has the wrong number of coordinates for the family.
    #[error("dimension mismatch: expected {expected} coordinate(s), got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// An evaluation landed exactly on a singular point (e.g. the origin of
    /// an inverse-square potential).
    #[error("evaluation at singular point ({x}, {y})")]
    SingularPoint { x: f64, y: f64 },

    /// A sampled or computed value is NaN or infinite.
    #[error("non-finite value encountered at node {index} ({context})")]
    NonFinite { index: usize, context: String },

    /// An axis has too few nodes for the requested stencil.
    #[error(
        "grid too small: axis {axis} has {n} node(s), order-{order} stencil needs at least {min}"
    )]
    GridTooSmall {
        axis: usize,
        n: usize,
        order: usize,
        min: usize,
    },

    /// The interior mask excludes every node.
    #[error("interior mask excludes every node (margin {margin})")]
    EmptyInterior { margin: usize },

    /// A refinement sequence is not a proper doubling ladder.
    #[error("inconsistent refinement grids: {0}")]
    InconsistentGrids(String),

    /// Momentum quadrature too coarse for the spatial domain (aliasing).
    #[error("quadrature too coarse: {0}")]
    QuadratureTooCoarse(String),

    /// Probability reached the domain boundary during propagation.
    #[error(
        "boundary leak at step {step}: |psi| = {amplitude:.3e} at the edge exceeds {limit:.3e}"
    )]
    BoundaryLeak {
        step: usize,
        amplitude: f64,
        limit: f64,
    },

    /// A constructor argument violates a family or job invariant.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Run configuration could not be parsed or validated.
    #[error("config: {0}")]
    ConfigParse(String),

    /// A job inside a run failed to execute (distinct from failing a check).
    #[error("job `{name}` failed: {message}")]
    JobFailure { name: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
