//! Finite metric spaces with exact rational distances.
//!
//! Any type implementing [`MetricSpace`] can be validated, measured and fed
//! to the Gromov-Hausdorff machinery. Spaces that can express every distance
//! as an integer over one shared denominator advertise it through
//! [`MetricSpace::common_denominator`]; the algorithms then run on machine
//! integers and only build a [`Rational`] for the final answer.

mod ambient;
mod ops;
mod space;

pub use ambient::{hausdorff_distance, AmbientPointSet};
pub use ops::{
    covering_radius, diameter, min_positive_distance, product_space, validate_metric,
    ValidationReport, Violation,
};
pub use space::FiniteMetricSpace;

pub(crate) use ambient::directed_sorted;

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::rational::Rational;

/// A finite metric space indexed by `0..len()`.
///
/// When [`is_squared`](MetricSpace::is_squared) is true every value returned
/// by [`distance`](MetricSpace::distance) is the square of the actual
/// distance; comparisons on such spaces are made on squares.
pub trait MetricSpace {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn label(&self, i: usize) -> String;

    fn is_squared(&self) -> bool {
        false
    }

    fn distance(&self, i: usize, j: usize) -> Rational;

    /// `Some(d)` when `distance(i, j) * d` is an `i64` for every pair.
    fn common_denominator(&self) -> Option<u64> {
        None
    }

    /// `distance(i, j) * common_denominator()`.
    fn scaled_distance(&self, _i: usize, _j: usize) -> Option<i64> {
        None
    }
}

impl<T: MetricSpace + ?Sized> MetricSpace for &T {
    fn len(&self) -> usize {
        (**self).len()
    }
    fn label(&self, i: usize) -> String {
        (**self).label(i)
    }
    fn is_squared(&self) -> bool {
        (**self).is_squared()
    }
    fn distance(&self, i: usize, j: usize) -> Rational {
        (**self).distance(i, j)
    }
    fn common_denominator(&self) -> Option<u64> {
        (**self).common_denominator()
    }
    fn scaled_distance(&self, i: usize, j: usize) -> Option<i64> {
        (**self).scaled_distance(i, j)
    }
}

/// Exact ordered values the generic kernels run on.
pub(crate) trait Scalar: Clone + Ord + Debug + Send + Sync {
    fn zero() -> Self;
    fn abs_diff(&self, other: &Self) -> Self;
}

impl Scalar for i128 {
    fn zero() -> Self {
        0
    }
    fn abs_diff(&self, other: &Self) -> Self {
        (self - other).abs()
    }
}

impl Scalar for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
    fn abs_diff(&self, other: &Self) -> Self {
        (self - other).abs()
    }
}

/// `value / den` as a rational.
pub(crate) fn unscale(value: i128, den: u128) -> Rational {
    Rational::new(value, den).expect("positive denominator")
}

/// Integer matrix of `x` rescaled to denominator `target`, if it fits.
pub(crate) fn rescaled_matrix<S: MetricSpace + ?Sized>(s: &S, target: u128) -> Option<Vec<i128>> {
    let den = s.common_denominator()? as u128;
    let factor = (target / den) as i128;
    let n = s.len();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            out.push((s.scaled_distance(i, j)? as i128).checked_mul(factor)?);
        }
    }
    Some(out)
}

/// Least common denominator of two integer-form spaces, with headroom for
/// differences and sums of rescaled entries.
pub(crate) fn joint_denominator<A, B>(x: &A, y: &B) -> Option<u128>
where
    A: MetricSpace + ?Sized,
    B: MetricSpace + ?Sized,
{
    let a = x.common_denominator()? as u128;
    let b = y.common_denominator()? as u128;
    let l = a.lcm(&b);
    // keep rescaled |entries| below 2^125
    if l.checked_mul(1u128 << 63)? > (1u128 << 125) {
        return None;
    }
    Some(l)
}

/// Common-denominator integer form of a list of rationals, if every
/// numerator fits in an `i64` after rescaling.
pub(crate) fn common_scale<'a, I>(values: I) -> Option<(u64, Vec<i64>)>
where
    I: IntoIterator<Item = &'a Rational>,
    I::IntoIter: Clone,
{
    let it = values.into_iter();
    let mut den = BigInt::from(1);
    for v in it.clone() {
        den = den.lcm(v.denom());
    }
    let den_u = den.to_u64()?;
    let mut out = Vec::new();
    for v in it {
        let factor = &den / v.denom();
        out.push((v.numer() * factor).to_i64()?);
    }
    Some((den_u, out))
}

pub(crate) fn check_index(index: usize, len: usize) -> crate::Result<()> {
    if index >= len {
        Err(crate::Error::IndexOutOfRange { index, len })
    } else {
        Ok(())
    }
}
