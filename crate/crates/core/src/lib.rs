//! Probability of failure on demand (PFD) for M-out-of-N safety systems whose
//! components are proof tested by a mix of partial and full tests.
//!
//! Each component is modelled as two exponential failure modes in series: a
//! fraction `E` of the failure rate is revealed by every test (partial or
//! full), the remaining `1 - E` only by the full test that closes the test
//! interval. Between tests, failures accumulate; at each test the revealed
//! failures are repaired instantly.
//!
//! The crate is organised as:
//!
//! - [`model`]: validated system, schedule and policy types, time units.
//! - [`combinatorics`]: exact binomials and the alternating `S(M, N, x)` weights.
//! - [`analytic`]: closed-form availability, per-interval and average PFD.
//! - [`estimate`]: failure rate / test-effectiveness estimators from test counts.
//! - [`optimize`]: placement of partial tests minimising the average PFD.
//! - [`simulate`]: a discrete-event Monte Carlo oracle for all of the above.
//! - [`sil`]: informative IEC 61508 low-demand SIL banding.

pub mod analytic;
pub mod combinatorics;
mod error;
pub mod estimate;
pub mod model;
mod numeric;
pub mod optimize;
pub mod sil;
pub mod simulate;

pub use error::{Error, Result};
