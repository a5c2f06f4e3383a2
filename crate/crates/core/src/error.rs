use thiserror::Error;

/// Errors raised by the model, solvers, oracle and sampler.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unsupported activity graph `{0}`: only `wand` and `hinge` have known edge sets")]
    UnsupportedGraph(String),

    #[error("invalid adjacency matrix: {0}")]
    InvalidAdjacency(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("singular field: child denominator a00 + a01*z1 + a02*z2 vanishes")]
    SingularField,

    #[error("enumeration budget exceeded: volume needs 3^{vertices} = {required} configurations, budget is {budget}")]
    BudgetExceeded {
        vertices: usize,
        required: u128,
        budget: u128,
    },

    #[error("vertex {vertex} is outside a volume of {size} vertices")]
    UnknownVertex { vertex: usize, size: usize },

    #[error("configuration has {got} entries but the volume has {expected} vertices")]
    ConfigurationSize { expected: usize, got: usize },

    #[error(
        "fields are not a fixed point of the recursion (residual {residual:e} > {threshold:e})"
    )]
    NotFixedPoint { residual: f64, threshold: f64 },

    #[error("polynomial error: {0}")]
    Polynomial(String),
}

pub type Result<T> = std::result::Result<T, Error>;
