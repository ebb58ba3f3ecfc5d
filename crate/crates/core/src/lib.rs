//! Isoperimetry, ℓp spectral constants and transport patterns on finite and
//! lazily generated graphs.

pub mod counterexample;
pub mod error;
pub mod graph;
pub mod isoperimetry;
pub mod lazy;
pub mod linalg;
pub mod operators;
pub mod spectral;
pub mod subsets;
pub mod suite;
pub mod transport;
pub mod walks;

pub use error::{Error, Result};
pub use graph::{Adjacency, EdgeSet, Family, FiniteGraph, VertexSubset};
