pub mod angular;
pub mod classify;
pub mod config;
pub mod error;
pub mod half;
pub mod hyper;
pub mod io;
pub mod qhj;
pub mod quad;
pub mod special;
pub mod spectrum;
pub mod trig;
pub mod verify;

pub use config::{TopConfig, TopKind};
pub use error::{Error, Result};
pub use half::HalfInt;
