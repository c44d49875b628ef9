//! Exact computation with generalized differential forms on transitive Lie
//! algebroids, expressed through local trivializations `TLA(U, g)`.
//!
//! Everything is exact: scalars are Gaussian rationals, coefficients are
//! polynomials in the chart coordinates. The crate is `no_std` and needs
//! only `alloc`.

#![no_std]

extern crate alloc;

pub mod atiyah;
pub mod blade;
pub mod ce;
pub mod cech;
pub mod error;
pub mod fixtures;
pub mod gluing;
pub mod lie;
pub mod linalg;
pub mod poly;
pub mod random;
pub mod scalar;
pub mod tla;

pub use error::{Error, Result};
pub use lie::LieAlgebra;
pub use linalg::Matrix;
pub use poly::{Monomial, Poly, Var};
pub use scalar::Scalar;
pub use tla::{TlaForm, ValueKind};
