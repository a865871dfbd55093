//! Computable two-part code model selection over binary data.

pub mod bits;
pub mod codes;
pub mod complexity;
pub mod error;
pub mod math;
pub mod models;
pub mod prediction;
pub mod randomness;
pub mod report;
pub mod selection;
pub mod structure;

pub use bits::BitString;
pub use error::{MdlError, Result};
