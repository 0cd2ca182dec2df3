//! Sparse-state simulator for a bucket-brigade quantum RAM built from
//! two-state routers and Rydberg-atom memory cells.

pub mod cell;
pub mod dense;
pub mod error;
pub mod noise;
pub mod qstate;
pub mod routing;
pub mod scenario;

pub use error::{QramError, Result};
pub use qstate::{Amplitude, BranchLabel, PhotonSite, Qubit, SparseState};
