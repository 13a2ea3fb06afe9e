//! Exact spectral analysis and intertwiner calculus for Cayley graphs of finite abelian
//! groups.

pub mod cayley;
pub mod cyclotomic;
pub mod dsl;
pub mod error;
pub mod families;
pub mod fixture;
pub mod functor;
pub mod guard;
pub mod hamming;
pub mod intertwiner;
pub mod lemmas;
pub mod partition;
pub mod partlin;
pub mod poly;
pub mod group;
pub mod scalar;
pub mod tensor;
pub mod verify;
pub mod wedge;
pub mod wreath;

pub use error::{Error, Result};

use num_rational::BigRational;

/// Exact element of a cyclotomic field with rational coefficients.
pub type Cyclo = cyclotomic::Cyclotomic<BigRational>;

/// Exact rational scalar.
pub type Rational = BigRational;

/// Sparse tensor with cyclotomic entries.
pub type Tensor = tensor::SparseTensor<Cyclo>;

/// Sparse tensor with rational entries.
pub type QTensor = tensor::SparseTensor<BigRational>;
