//! Simulation and certification of parallel self-testing experiments.
//!
//! A single-copy Bell experiment (shared state plus local measurements) is
//! composed into an `n`-copy experiment under one of two input schemes:
//! broadcast (one input per party, applied to every copy) or per-copy (one
//! input per copy). The resulting correlation tables are then checked with
//! conditional and averaged Bell functionals whose simultaneous maximality
//! certifies a tensor product of the single-copy reference states.
//!
//! Module map:
//! - [`qcore`]: dense complex matrices, states, POVMs, Born rule, eigen-oracle
//! - [`strategies`]: reference strategies, noise, composition, adversaries
//! - [`bell`]: Bell expressions, correlation tables, functionals, bounds
//! - [`certify`]: protocol verdicts and noise sweeps
//! - [`io`]: JSON/CSV file formats shared with the command-line tool

pub mod bell;
pub mod certify;
pub mod error;
pub mod io;
pub mod numfmt;
pub mod par;
pub mod qcore;
pub mod radix;
pub mod strategies;
pub mod tol;

pub use bell::{BellExpression, BoundResult, CorrelationTable, Witness};
pub use certify::{CertificationReport, CopyResult, ProtocolKind, ProtocolSpec, Verdict};
pub use error::{Error, Result};
pub use qcore::{ComplexMatrix, DensityMatrix, Ket, Povm};
pub use strategies::{NoiseSpec, SchemeKind, SingleCopyStrategy};
