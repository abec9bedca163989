//! Minimal dense tensor engine with reverse-mode differentiation and Adam.

pub mod adam;
pub mod element;
pub mod gradcheck;
pub mod ops;
pub mod tape;
pub mod tensor;

pub use adam::{AdamConfig, AdamState};
pub use element::{Dtype, Element};
pub use tape::{Gradients, Tape, ValueId};
pub use tensor::Tensor;
