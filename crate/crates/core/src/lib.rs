//! Character-level bidirectional-GRU post encoder trained by hashtag
//! prediction, plus the word-level baseline that shares its architecture.

pub mod checkpoint;
pub mod cli;
pub mod data;
pub mod error;
pub mod eval;
pub mod layers;
pub mod model;
pub mod objective;
pub mod optimizer;
pub mod tensor;

pub use error::{Error, Result};
