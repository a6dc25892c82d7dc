pub mod batch;
pub mod budget;
pub mod error;
pub mod harness;
pub mod lil;
pub mod model;
pub mod optimize;
pub mod racing;

pub use error::{Error, Result};
