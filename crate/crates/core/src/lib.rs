//! Parent Hamiltonians of matrix product states and the intersection
//! property that certifies their ground spaces.

pub mod budget;
pub mod error;
pub mod intersect;
pub mod linalg;
pub mod models;
pub mod mps;
pub mod parent;
pub mod scan;
pub mod spinalg;

pub use error::{Error, Result};
