//! Holstein–Jaynes–Cummings simulator for a molecular ensemble coupled to a
//! single cavity mode.
//!
//! * [`model`]: parameters and the truncated one-excitation basis
//! * [`quantum_ops`]: displacement-operator elements, Franck–Condon factors
//! * [`hamiltonian`]: sparse Hamiltonian in the `(k, q)` basis, P/Q projectors
//! * [`solver`]: lowest eigenpairs (dense or thick-restart Krylov)
//! * [`polaron`]: dressed states and the decoupling metric `P₀`
//! * [`disorder`]: Gaussian site disorder and `P₀` ensembles
//! * [`etrate`]: electron-transfer rates in free space and in the cavity

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod disorder;
pub mod error;
pub mod etrate;
pub mod hamiltonian;
pub mod model;
pub mod polaron;
pub mod quantum_ops;
pub mod solver;
pub mod sparse;

pub use error::{Error, Result};
pub use hamiltonian::{build_hjc, Detunings};
pub use model::{Basis, BasisIndex, BasisState, Electronic, ModelParams, Truncation};
pub use solver::{lowest_eigenpairs, EigenResult, SolverOptions};
pub use sparse::SparseHermitian;
