use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("subgroup to be killed is infinite")]
    InfiniteKernel,
    #[error("exact division left a remainder")]
    NotDivisible,
    #[error("polynomial has a half-integer exponent")]
    HalfIntegerExponent,
    #[error("reassembled coefficient is not rational")]
    NonRationalReassembly,
    #[error("element is outside the domain of the extended character: {0}")]
    NotInDomain(String),
    #[error("direction does not generate the free quotient")]
    DirectionNotPrimitive,
    #[error("charge has wrong parity at component {index}")]
    BadParity { index: usize },
    #[error("normalized Conway function is not integral (table and charge disagree)")]
    ParityMismatch,
    #[error("Conway table has no entry for sublink {0}")]
    IncompleteTable(String),
    #[error("link is not algebraically split")]
    NotSplit,
    #[error("b1 = 1 and no canonical direction; pass one explicitly")]
    NeedsDirection,
    #[error("character is trivial on H_1(M)")]
    TrivialCharacter,
    #[error("H_1(M) is infinite; an enumeration window is required")]
    InfiniteEnumeration,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("b1(M) = 0")]
    NotPositiveB1,
    #[error("malformed PD code: {0}")]
    MalformedPD(String),
    #[error("degenerate diagram: {0}")]
    DegenerateDiagram(String),
    #[error("Torres identity cannot be satisfied: {0}")]
    TorresInconsistent(String),
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("internal assertion failed: {0}")]
    Assertion(String),
}

impl Error {
    /// Failures that point at bad input rather than at a broken identity.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Assertion(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! ensure {
    ($cond:expr, $($arg:tt)*) => {
        if !$cond {
            return Err($crate::error::Error::Assertion(format!($($arg)*)));
        }
    };
}
pub(crate) use ensure;
