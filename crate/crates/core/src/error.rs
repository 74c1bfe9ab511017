use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),
    #[error("points are not collinear")]
    NotCollinear,
    #[error("lines are not concurrent")]
    NotConcurrent,
    #[error("quadruple is not in general position: {0}")]
    DegeneratePosition(&'static str),
    #[error("degenerate configuration at vertex {index}: {what}")]
    DegenerateConfiguration { index: i64, what: &'static str },
    #[error("degenerate corner invariants: {0}")]
    DegenerateInvariants(String),
    #[error("monodromy could not be recovered from the final frame")]
    MonodromyFailure,
    #[error("polygon is not {k}-nice at index {index}")]
    NotKNice { k: usize, index: i64 },
    #[error("coordinate map is singular: denominator for slot {index} vanishes")]
    SingularOrbitPoint { index: usize },
    #[error("vertex {index} is not in the affine patch")]
    NonAffineVertex { index: i64 },
    #[error("quantity F{quantity} undefined at step {step}")]
    UndefinedQuantity { step: usize, quantity: usize },
    #[error("bound violation at step {step}, slot {index}: value {value}")]
    BoundViolation { step: usize, index: usize, value: f64 },
    #[error("projection failed at step {step}")]
    ProjectionFailure { step: usize },
    #[error("trajectory terminated early; bounds need a completed orbit")]
    IncompleteTrajectory,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
