pub mod cli;
pub mod error;
pub mod heun;
pub mod models;
pub mod numerics;
pub mod verify;

pub use error::{Error, Result};
