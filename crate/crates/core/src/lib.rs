//! Shifted primes with large common prime factors: exact counters, sieve-bound
//! numerics for simultaneous linear forms, weighted tuple sums, Dickman's ρ and
//! the experiment drivers that tie them together.

pub mod dickman;
pub mod error;
pub mod exact;
pub mod experiments;
pub mod forms;
pub mod persist;
pub mod primes;
pub mod shifted;
pub mod summation;
pub mod wsum;

pub use dickman::RhoTable;
pub use error::{Error, Result};
pub use experiments::{ExperimentRecord, Value};
pub use forms::{AbelEvaluation, LinearForm, PrimeWindow, ShiftSystem, StepCountFunction};
pub use primes::{Factorization, PrimeTables, SieveCache, SpfTable};
pub use shifted::{Method, Theta, TupleCount};
pub use summation::CompensatedSum;
pub use wsum::{HolderDiagnostics, MomentSums};
