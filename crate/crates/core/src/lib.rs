//! Ramanujan-sum filter banks on `Z_N`.
//!
//! The crate builds filter banks from Ramanujan sums `c_q`, decides whether they form
//! frames through the Zak transform and polyphase matrices, works with the Ramanujan
//! subspaces and their erasure behaviour, and recovers signals from incomplete or
//! corrupted filter-bank data by l1 minimisation.

pub mod cli;
pub mod error;
pub mod experiments;
pub mod filterbank;
pub mod frame;
pub mod io;
pub mod linalg;
pub mod lp;
pub mod number_theory;
pub mod random;
pub mod recovery;
pub mod signal;
pub mod subspace;
pub mod zak;

pub use error::{Error, Result};
pub use filterbank::{analyze, synthesize, Channel, RamanujanFilterBank};
pub use signal::Signal;
