//! Adaptive combinatorial group testing with a pool oracle.
//!
//! The zig-zag strategies, their splitting subroutines, lower and upper
//! bounds on the worst-case number of tests, an analyzer for up-zig-zag
//! transcripts and an exhaustive worst-case harness.

pub mod algorithm;
pub mod analysis;
pub mod bounds;
pub mod error;
pub mod harness;
pub mod instance;
pub mod splitseq;
pub mod symmetric;
pub mod transcript;
pub mod upzigzag;
pub mod zigzag;

pub use algorithm::{Algorithm, Strategy};
pub use error::{Error, Result};
pub use instance::{Instance, Item, Label, Outcome, PoolOracle};
pub use transcript::{finalize, RunResult, Session, TestKind, TestRecord, Transcript};
