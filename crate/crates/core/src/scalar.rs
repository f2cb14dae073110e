use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point element type of embeddings, features and centroids: `f32` or `f64`.
///
/// Reductions (dot products, norms, distances, centroid sums) always accumulate in `f64`
/// regardless of the element type, so results do not depend on how work is split.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    #[inline]
    fn as_f64(self) -> f64 {
        // Float -> f64 never fails for f32/f64.
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).unwrap_or_else(Self::nan)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Squared Euclidean distance, accumulated in `f64` in dimension order.
#[inline]
pub(crate) fn sq_dist<S: Scalar>(a: &[S], b: &[S]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = x.as_f64() - y.as_f64();
            d * d
        })
        .sum()
}

#[inline]
pub(crate) fn dot<S: Scalar>(a: &[S], b: &[S]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| x.as_f64() * y.as_f64()).sum()
}

#[inline]
pub(crate) fn norm<S: Scalar>(a: &[S]) -> f64 {
    dot(a, a).sqrt()
}
