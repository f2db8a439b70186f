//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign};
use serde::Serialize;

/// Real floating-point scalar the kernels, polynomials and chains are generic over.
///
/// Implemented for `f32` and `f64`. Tolerances throughout the crate are
/// written in `f64` and converted with [`Scalar::of`], so `f32` runs work but
/// with correspondingly coarser guarantees.
pub trait Scalar:
    Float + FromPrimitive + NumAssign + Sum + Debug + Display + Serialize + Send + Sync + 'static
{
    /// Converts an `f64` literal or tolerance into this scalar type.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 is representable in every Scalar")
    }

    /// Lossy conversion used by reports and samplers.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Converts a count.
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize is representable in every Scalar")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `|a - b| <= rel * max(|a|, |b|) + abs`.
pub fn approx_eq<T: Scalar>(a: T, b: T, rel: f64, abs: f64) -> bool {
    let diff = (a - b).abs();
    diff <= T::of(rel) * a.abs().max(b.abs()) + T::of(abs)
}

/// `lhs <= rhs` up to a relative slack on the right-hand side.
pub fn leq_rel<T: Scalar>(lhs: T, rhs: T, rel: f64) -> bool {
    lhs <= rhs + T::of(rel) * lhs.abs().max(rhs.abs())
}
