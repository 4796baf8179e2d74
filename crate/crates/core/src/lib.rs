pub mod error;
pub mod exactmath;

pub use error::{Error, Result};
pub mod diffpoly;
pub mod functionals;
pub mod operators;
pub mod linsolve;
pub mod miura;
pub mod report;
pub mod hierarchy;
pub mod drformulas;
pub mod expr;
pub mod sampling;
