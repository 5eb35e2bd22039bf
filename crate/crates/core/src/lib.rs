pub mod catalysis;
pub mod circuit;
pub mod error;
pub mod fock;
pub mod optimize;
pub mod probe;
pub mod qcrb;
pub mod series;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};
