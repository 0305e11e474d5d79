//! Eigenvalue localization sets, diagonal-dominance classes and
//! positive-definiteness certificates for higher-order tensors.

pub mod cli;
pub mod dominance;
pub mod eig;
pub mod error;
pub mod io;
pub mod regions;
pub mod tensor;

pub use error::{Error, Result};
pub use tensor::{Block, RadiiCache, Side, SubsetPartition, Tensor};
