pub mod cli;
pub mod complexity;
pub mod error;
pub mod group_algebra;
pub mod lie;
pub mod linalg;
pub mod perm;
pub mod variety;

pub use error::{CacheError, Error, Result};
