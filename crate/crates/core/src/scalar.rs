//! Floating-point abstraction. Everything numeric in this crate is generic
//! over [`Scalar`]; pick `f64` (the file formats' native precision) or `f32`.

use std::fmt::{Debug, Display};
use std::num::ParseFloatError;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating-point scalar the toolkit operates on.
///
/// `Display` and `FromStr` must round-trip exactly; Rust's float formatting
/// emits the shortest decimal that parses back to the same value, so `f32`
/// and `f64` both qualify. Text persistence relies on this.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + FromStr<Err = ParseFloatError>
    + Display
    + Debug
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Pull an `f64` constant into the working scalar type.
pub(crate) fn cast<S: Scalar>(value: f64) -> S {
    S::from_f64(value).expect("f64 constant representable in scalar type")
}
