//! Scalar abstraction for the ground field.
//!
//! All algorithms in this crate are written against [`Scalar`], a field of
//! characteristic zero with decidable equality. Rank, kernel and solve
//! decisions test entries against exact zero, so the intended instantiations
//! are exact types such as [`crate::Rat`].

use std::fmt::{Debug, Display};

use num_traits::{FromPrimitive, Num, Signed};

/// Field scalar with exact equality, negation and conversion from integers.
///
/// `FromPrimitive` supplies the embedding of the integers needed for the
/// factorials and binomials of the gauge and Baker-Campbell-Hausdorff
/// series; characteristic zero is assumed throughout.
pub trait Scalar: Num + Signed + FromPrimitive + Clone + PartialEq + Debug + Display {
    /// The scalar `n/1`.
    fn from_int(n: i64) -> Self {
        Self::from_i64(n).expect("integer embeds into the scalar field")
    }

    /// The scalar `1/n` for `n != 0`.
    fn inv_int(n: i64) -> Self {
        Self::one() / Self::from_int(n)
    }
}

impl<T> Scalar for T where T: Num + Signed + FromPrimitive + Clone + PartialEq + Debug + Display {}

/// The Koszul sign `(-1)^k` as a scalar.
pub fn parity_sign<S: Scalar>(k: i64) -> S {
    if k.rem_euclid(2) == 0 {
        S::one()
    } else {
        -S::one()
    }
}
