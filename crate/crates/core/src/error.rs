use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("order {required} needed but the data is only known to order {available}")]
    Order { required: usize, available: usize },
    #[error("implicit equation is singular: the coefficient of y vanishes")]
    SingularImplicit,
    #[error("linear part is not in nilpotent form: {0}")]
    LinearPart(String),
    #[error("the z eigenvalue vanishes")]
    ZeroLambda,
    #[error("change of frame failed: {0}")]
    Frame(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("degenerate case: {0}")]
    Degenerate(String),
    #[error("expected a homogeneous polynomial of degree {0}")]
    Inhomogeneous(u32),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
    #[error("requested tolerance not reached: {0}")]
    Tolerance(String),
    #[error("outside the domain of the computation: {0}")]
    Domain(String),
    #[error("coefficient is not numeric: {0}")]
    NotNumeric(String),
}
