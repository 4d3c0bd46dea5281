//! Floating-point abstraction shared by the numeric modules.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real scalar the estimators and persistence code are generic over.
///
/// Implemented for `f32` and `f64`. Exact arithmetic for the homology oracle
/// lives behind [`crate::simplicial::ExactField`] instead.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + Serialize + DeserializeOwned + 'static
{
    /// Converts an `f64` literal, saturating through the target precision.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Denominator guard for the kernel-weighted averages.
    #[inline]
    fn division_guard() -> Self {
        // 1e-300 underflows to zero in f32; fall back to the smallest positive normal.
        let g = Self::lit(1e-300);
        if g > Self::zero() {
            g
        } else {
            Self::min_positive_value()
        }
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn guard_is_positive_for_both_widths() {
        assert!(f64::division_guard() > 0.0);
        assert!(f32::division_guard() > 0.0);
        assert_eq!(f64::division_guard(), 1e-300);
    }
}
