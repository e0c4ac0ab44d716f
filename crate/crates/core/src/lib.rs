//! Numerical toolkit for squeezed Gaussian states on a discrete N x N
//! phase space with odd N: theta-series kernels, a displacement-operator
//! basis, quasiprobability distributions, entropy functionals, and a
//! scattering-circuit simulator that measures them.

pub mod circuit;
pub mod entropy;
pub mod error;
pub mod kernels;
pub mod lattice;
pub mod linalg;
pub mod numerics;
pub mod operators;
pub mod phase_space;
pub mod states;
pub mod validate;

pub use circuit::{CircuitResult, ScanMode};
pub use entropy::{EntropyReport, MinReference, ScanSettings};
pub use error::{Error, Result};
pub use kernels::{KernelKind, KernelTable, SqueezeParam};
pub use lattice::LatticeDims;
pub use operators::{DensityMatrix, KernelOrder};
pub use states::{StateSpec, StateVector};
pub use validate::{ValidationLevel, ValidationReport};
