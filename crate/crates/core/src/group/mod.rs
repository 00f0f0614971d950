//! Finite permutation groups and kG-modules given by generator matrices.

mod map;
mod module;
mod perm;

use thiserror::Error;

use crate::ff::LinalgError;

pub use map::{image_kernel, ImageKernel, ModuleMap, Quotient, Submodule};
pub use module::{DirectSum, Module};
pub use perm::{group_bound, GroupData, GroupDescriptor, GroupPreset, DEFAULT_GROUP_BOUND};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("group order exceeds the bound {bound}")]
    GroupTooLarge { bound: usize },
    #[error("unrecognised group preset {0:?}")]
    BadPreset(String),
    #[error("bad permutation data: {0}")]
    BadPermutation(String),
    #[error("bad word {0}")]
    BadWord(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModuleError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("not a representation: {0}")]
    NotARepresentation(String),
    #[error("not equivariant: {0}")]
    NotEquivariant(String),
    #[error("mismatch: {0}")]
    Mismatch(String),
}
