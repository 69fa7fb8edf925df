pub mod characters;
pub mod domain;
pub mod error;
pub mod experiments;
pub mod groups;
pub mod hilbert;
pub mod io;
pub mod linalg;
pub mod models;
pub mod poly;

pub use error::{Error, Result};
