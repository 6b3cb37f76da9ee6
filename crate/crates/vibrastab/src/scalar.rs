//! Scalar abstraction for the numeric core.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Floating-point scalar the whole crate is generic over.
///
/// `f32` works for quick exploration; every tolerance quoted in the
/// documentation assumes `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Shorthand for converting an `f64` literal.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("literal not representable")
    }

    /// Shorthand for converting a count.
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("count not representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}
