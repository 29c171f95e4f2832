pub mod error;
pub mod numerics;
pub mod precision;

pub use error::{Error, Result};
pub use precision::PrecisionContext;
pub mod theta;
pub mod lambda;
pub mod zeros;
pub mod hadamard;
pub mod xray;
