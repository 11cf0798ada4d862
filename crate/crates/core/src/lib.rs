//! Exact simulation of a three-party quantum secret sharing scheme built on
//! the three-qubit phase-flip repetition code, with closed-form reference
//! states, exact adversary-branch enumeration, and a nine-qubit Shor-code
//! extension that recovers from arbitrary single-qubit interference.
//!
//! All math is generic over the [`Real`] scalar; the `*64` aliases below are
//! the double-precision instantiations used by the CLI and tests.

pub mod error;
pub mod oracle;
pub mod protocol;
pub mod scalar;
pub mod shor;
pub mod statevec;

pub use error::{Error, Result};
pub use num_complex::Complex;
pub use scalar::Real;

pub type Complex64 = Complex<f64>;
pub type PureState64 = statevec::PureState<f64>;
pub type PureState32 = statevec::PureState<f32>;
pub type Basis64 = statevec::SingleQubitBasis<f64>;
pub type Secret64 = protocol::Secret<f64>;
pub type Secret32 = protocol::Secret<f32>;
pub type CheatModel64 = protocol::CheatModel<f64>;
pub type Transcript64 = protocol::ProtocolTranscript<f64>;
pub type ExactDistribution64 = oracle::ExactDistribution<f64>;
pub type DiscrepancyReport64 = oracle::DiscrepancyReport<f64>;
pub type ShorCodeword64 = shor::ShorCodeword<f64>;
pub type ErrorSpec64 = shor::ErrorSpec<f64>;
