//! Compactly supported kernel shapes and their first derivatives.
//!
//! Shapes are unnormalized with `K(0) = 1`; every quantity the pipeline
//! computes is a ratio of kernel sums, so the normalizing constant cancels.
//! Both families are truncated to `[-1, 1]` and are bounded away from zero
//! on that support, with a hard drop to zero outside it.

use serde::{Deserialize, Serialize};

use crate::error::KernelError;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelFamily {
    /// `exp(-u^2 / 2)` on `[-1, 1]`.
    TruncatedGaussian,
    /// `1 / (1 + u^2)` on `[-1, 1]`.
    TruncatedCauchy,
}

impl KernelFamily {
    /// Infimum of the shape over its support.
    pub fn delta<T: Scalar>(self) -> T {
        match self {
            KernelFamily::TruncatedGaussian => T::lit(-0.5).exp(),
            KernelFamily::TruncatedCauchy => T::lit(0.5),
        }
    }

    /// Supremum of `|K'|` over the support.
    ///
    /// Gaussian: `u exp(-u^2/2)` increases on `[0, 1]`, so the bound sits at
    /// `u = 1`. Cauchy: `2u / (1 + u^2)^2` peaks at `u = 1/sqrt(3)` with
    /// value `3 sqrt(3) / 8`.
    pub fn tau<T: Scalar>(self) -> T {
        match self {
            KernelFamily::TruncatedGaussian => T::lit(-0.5).exp(),
            KernelFamily::TruncatedCauchy => T::lit(3.0) * T::lit(3.0).sqrt() / T::lit(8.0),
        }
    }

    #[inline]
    fn shape<T: Scalar>(self, u: T) -> T {
        match self {
            KernelFamily::TruncatedGaussian => (-(u * u) / T::lit(2.0)).exp(),
            KernelFamily::TruncatedCauchy => T::one() / (T::one() + u * u),
        }
    }

    #[inline]
    fn shape_deriv<T: Scalar>(self, u: T) -> T {
        match self {
            KernelFamily::TruncatedGaussian => -u * (-(u * u) / T::lit(2.0)).exp(),
            KernelFamily::TruncatedCauchy => {
                let d = T::one() + u * u;
                -(u + u) / (d * d)
            }
        }
    }
}

/// A kernel family together with its bandwidth and the constants the
/// consistency bound needs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec<T> {
    pub family: KernelFamily,
    pub bandwidth: T,
    pub delta: T,
    pub tau: T,
}

impl<T: Scalar> KernelSpec<T> {
    pub fn new(family: KernelFamily, bandwidth: T) -> Result<Self, KernelError> {
        if !(bandwidth > T::zero()) || !bandwidth.is_finite() {
            return Err(KernelError::NonPositiveBandwidth(bandwidth.to_f64_lossy()));
        }
        Ok(Self {
            family,
            bandwidth,
            delta: family.delta(),
            tau: family.tau(),
        })
    }

    pub fn gaussian(bandwidth: T) -> Result<Self, KernelError> {
        Self::new(KernelFamily::TruncatedGaussian, bandwidth)
    }

    pub fn cauchy(bandwidth: T) -> Result<Self, KernelError> {
        Self::new(KernelFamily::TruncatedCauchy, bandwidth)
    }

    /// Same family with a different bandwidth.
    pub fn with_bandwidth(&self, bandwidth: T) -> Result<Self, KernelError> {
        Self::new(self.family, bandwidth)
    }

    /// `K(u)`: zero for `|u| > 1`.
    #[inline]
    pub fn eval(&self, u: T) -> T {
        if u.abs() > T::one() || u.is_nan() {
            T::zero()
        } else {
            self.family.shape(u)
        }
    }

    /// `K'(u)`: zero for `|u| > 1`.
    #[inline]
    pub fn deriv(&self, u: T) -> T {
        if u.abs() > T::one() || u.is_nan() {
            T::zero()
        } else {
            self.family.shape_deriv(u)
        }
    }

    /// Returns `(K_h(x - xi), K_{1,h}(x - xi))` where
    /// `K_{1,h}(z) = d/dz K(z/h) = K'(z/h) / h`.
    #[inline]
    pub fn scaled(&self, x: T, xi: T) -> (T, T) {
        let u = (x - xi) / self.bandwidth;
        (self.eval(u), self.deriv(u) / self.bandwidth)
    }
}

/// Free-function form of [`KernelSpec::eval`].
pub fn kernel_eval<T: Scalar>(spec: &KernelSpec<T>, u: T) -> T {
    spec.eval(u)
}

/// Free-function form of [`KernelSpec::deriv`].
pub fn kernel_deriv_eval<T: Scalar>(spec: &KernelSpec<T>, u: T) -> T {
    spec.deriv(u)
}

/// Checked form of [`KernelSpec::scaled`].
pub fn scaled_eval<T: Scalar>(spec: &KernelSpec<T>, x: T, xi: T) -> Result<(T, T), KernelError> {
    if !(spec.bandwidth > T::zero()) {
        return Err(KernelError::NonPositiveBandwidth(spec.bandwidth.to_f64_lossy()));
    }
    Ok(spec.scaled(x, xi))
}
