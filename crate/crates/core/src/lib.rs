pub mod cli;
pub mod cmdeg;
pub mod error;
pub mod inequalities;
pub mod laplace;
pub mod laurent;
pub mod precision;
pub mod specfun;

pub use error::{Error, Result};
pub use precision::WorkingPrecision;
