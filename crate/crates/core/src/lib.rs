pub mod analysis;
pub mod builders;
pub mod composites;
pub mod error;
pub mod hermitian;
pub mod lp;
pub mod matrix;
pub mod model;
pub mod perm;
pub mod polyhedral;
pub mod quotient;
pub mod report;
pub mod scalar;
pub mod spec;
pub mod spinforms;
pub mod testspace;
pub mod verdict;

pub use error::{Error, Result};
pub use scalar::{Rational, Scalar};
