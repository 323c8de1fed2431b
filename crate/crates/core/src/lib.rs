//! Equivariant quantum convolutional neural networks on an exact
//! statevector simulator.
//!
//! Images are amplitude embedded (optionally through a basis permutation
//! that changes how the reflection or 180° rotation symmetry is represented),
//! processed by convolution and pooling layers built from two-qubit ansatze,
//! and classified by the expectation value of a single-qubit Pauli observable.

pub mod ansatz;
pub mod data;
pub mod embedding;
pub mod error;
pub mod model;
pub mod statevec;
pub mod symmetry;
pub mod train;

pub use error::{Error, Result};
