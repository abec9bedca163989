//! Contrastive representation learning for single-cell microscopy profiles.
//!
//! The crate covers the full desk-scale pipeline: a small tensor engine
//! with reverse-mode differentiation ([`ndcore`]), stochastic two-view
//! augmentation ([`augment`]), a residual encoder with projection head
//! ([`model`]), the normalized temperature-scaled contrastive loss and its
//! training loop ([`contrastive`]), treatment-profile aggregation with
//! whitening/CORAL post-processing ([`profiles`]), and 1-NN
//! mechanism-of-action evaluation ([`evalmoa`]). [`dataio`] holds the
//! on-disk containers and a synthetic dataset generator; [`pipeline`] wires
//! the stages behind the CLI and the C API.

pub mod error;

pub mod augment;
pub mod config;
pub mod contrastive;
pub mod dataio;
pub mod evalmoa;
pub mod linalg;
pub mod model;
pub mod ndcore;
pub mod pipeline;
pub mod profiles;
pub mod rng;

pub use error::{Error, Result};
