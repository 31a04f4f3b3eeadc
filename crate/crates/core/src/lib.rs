//! Exact lattice preprocessing, heuristic Graver-direction extraction and
//! multi-start augmentation for linearly constrained integer programs.

pub mod augmentation;
pub mod cli;
pub mod extraction;
pub mod graver;
pub mod lattice;
pub mod model;
