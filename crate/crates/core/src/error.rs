use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("characteristic 2 is not supported (p = {0})")]
    EvenCharacteristic(u32),
    #[error("{0} is not a prime")]
    NotPrime(u32),
    #[error("field order p^(2f) = {order} exceeds the bound {bound}")]
    FieldTooLarge { order: u64, bound: u64 },
    #[error("polynomial {0} is reducible")]
    ReducibleModulus(String),
    #[error("zero is not a unit")]
    ZeroInput,
    #[error("element {0} is outside the domain of {1}")]
    NotInDomain(u32, &'static str),
    #[error("{what}: size {size} exceeds bound {bound}")]
    BoundExceeded { what: &'static str, size: u128, bound: u128 },
    #[error("generator closure reached {reached} elements, expected {expected}")]
    ClosureIncomplete { reached: usize, expected: u128 },
    #[error("trace value {0} does not lie in the base field")]
    TraceOutsideBase(u32),
    #[error("function is not constant on conjugacy classes of the subgroup (deviation {0:.3e})")]
    NotAClassFunction(f64),
    #[error("inner product {0} is not a nonnegative integer within tolerance")]
    NonIntegral(String),
    #[error("class algebra eigenvalues stayed degenerate after {0} attempts")]
    Degenerate(usize),
    #[error("character table failed validation: {0}")]
    TableValidation(String),
    #[error("twisting character is not fixed by the acting group")]
    TwistNotFixed,
    #[error("convention self-test failed: {0}")]
    Convention(String),
    #[error("element is outside the acting subgroups: {0}")]
    NotActing(String),
    #[error("malformed parameter: {0}")]
    Malformed(String),
    #[error("missing sign for basis element `{0}`")]
    MissingSign(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("internal consistency failure: {0}")]
    Inconsistent(String),
    #[error("cache: {0}")]
    Cache(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
