mod error;
pub mod asymptotics;
pub mod geometry;
pub mod jump_operator;
pub mod spectral_det;
pub mod verify;
pub mod specfun;

pub use error::{Error, Result};
