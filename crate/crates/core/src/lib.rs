pub mod arith;
pub mod bounds;
pub mod code;
mod combin;
pub mod equiv;
pub mod error;
pub mod gf;
pub mod io;
pub mod locality;
pub mod matrix;
pub mod mr;
pub mod repro;

pub use code::{CodeMeta, Distance, LinearCode, RootSet};
pub use error::{Error, Result};
pub use gf::{Fe, Field};
pub use matrix::Matrix;
