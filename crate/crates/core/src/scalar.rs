//! Scalar abstraction over the floating-point type used for amplitudes.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar backing every amplitude, probability and fidelity.
///
/// The two tolerances mirror the precision budget of the engine: `EXACT_TOL`
/// for checks that should hold to round-off on short computations, and
/// `CHAIN_TOL` for long gate chains and comparisons against closed forms.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Default
    + Sum
    + Send
    + Sync
    + 'static
{
    const EXACT_TOL: Self;
    const CHAIN_TOL: Self;

    /// Converts an `f64` literal. Every value this crate feeds through here
    /// is finite, so the conversion cannot fail for `f32`/`f64`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const EXACT_TOL: f64 = 1e-10;
    const CHAIN_TOL: f64 = 1e-9;
}

impl Real for f32 {
    const EXACT_TOL: f32 = 1e-5;
    const CHAIN_TOL: f32 = 1e-4;
}
