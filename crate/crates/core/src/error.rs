use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("degree {degree} out of range 0..={max}")]
    DegreeOutOfRange { degree: usize, max: usize },
    #[error("structure constants violate {0}")]
    NotLieAlgebra(String),
    #[error("|det| = {0} is not the square of a rational; rescale the metric by a square factor")]
    NonSquareDeterminant(String),
    #[error("degenerate {0}")]
    Degenerate(String),
    #[error("both operands are algebra-valued")]
    BothAlgebraValued,
    #[error("expected an algebra-valued form")]
    ScalarValued,
    #[error("expected a scalar-valued form")]
    AlgebraValued,
    #[error("form is not homogeneous of degree {0}")]
    NotHomogeneous(usize),
    #[error("chart has no integration box")]
    MissingBox,
    #[error("{0:?} is not a listed simplex")]
    NotSimplex(alloc::vec::Vec<usize>),
    #[error("cochain is not closed at simplex {0:?}")]
    NotClosed(alloc::vec::Vec<usize>),
    #[error("not a cocycle")]
    NotCocycle,
    #[error("family does not glue on simplex {0:?}")]
    NotGlobal(alloc::vec::Vec<usize>),
    #[error("transition determinant vanishes at a sample point of {0:?}")]
    SingularTransition(alloc::vec::Vec<usize>),
    #[error("kernel is not orientable")]
    NotOrientable,
    #[error("supplied inverse of g_{0}{1} is wrong")]
    BadInverse(usize, usize),
    #[error("invalid input: {0}")]
    Invalid(String),
}
