#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coupling_ops;
pub mod error;
pub mod exact;
pub mod generators;
pub mod laplacian;
mod linalg;
pub mod mmspace;
pub mod regularity;
pub mod transport;
pub mod weyl;

pub use error::{Error, Result};
pub use mmspace::io::FORMAT_VERSION;
pub use mmspace::{MMSpace, Metric};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
