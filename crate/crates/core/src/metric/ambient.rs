use std::collections::BTreeSet;

use super::{common_scale, unscale, Scalar};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Distinct points on the real line, e.g. the image of `[n] ↦ n0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmbientPointSet {
    points: Vec<Rational>,
}

impl AmbientPointSet {
    pub fn new(points: Vec<Rational>) -> Result<Self> {
        let distinct: BTreeSet<&Rational> = points.iter().collect();
        if distinct.len() != points.len() {
            return Err(Error::InvalidArgument("ambient points must be pairwise distinct".into()));
        }
        Ok(AmbientPointSet { points })
    }

    /// Image of Z/pZ under the canonical-representative embedding into ℝ.
    pub fn ring_image(p: u64) -> Result<Self> {
        if p < 2 {
            return Err(Error::InvalidModulus(p as i128));
        }
        Ok(AmbientPointSet { points: (0..p).map(Rational::from).collect() })
    }

    pub fn points(&self) -> &[Rational] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `max_{x in a} min_{y in b} |x - y|` for sorted, nonempty inputs.
pub(crate) fn directed_sorted<T: Scalar>(a: &[T], b: &[T]) -> T {
    let mut worst = T::zero();
    let mut j = 0;
    for x in a {
        while j + 1 < b.len() && &b[j + 1] <= x {
            j += 1;
        }
        let mut near = x.abs_diff(&b[j]);
        if j + 1 < b.len() {
            let right = x.abs_diff(&b[j + 1]);
            if right < near {
                near = right;
            }
        }
        if near > worst {
            worst = near;
        }
    }
    worst
}

pub(crate) fn hausdorff_sorted<T: Scalar>(a: &[T], b: &[T]) -> T {
    let ab = directed_sorted(a, b);
    let ba = directed_sorted(b, a);
    ab.max(ba)
}

/// Hausdorff distance between two point sets on the line.
pub fn hausdorff_distance(a: &AmbientPointSet, b: &AmbientPointSet) -> Result<Rational> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Empty("Hausdorff distance needs nonempty sets"));
    }
    if let Some((den, all)) = common_scale(a.points.iter().chain(b.points.iter())) {
        let mut xs: Vec<i128> = all[..a.len()].iter().map(|&v| v as i128).collect();
        let mut ys: Vec<i128> = all[a.len()..].iter().map(|&v| v as i128).collect();
        xs.sort_unstable();
        ys.sort_unstable();
        return Ok(unscale(hausdorff_sorted(&xs, &ys), den as u128));
    }
    let mut xs = a.points.clone();
    let mut ys = b.points.clone();
    xs.sort();
    ys.sort();
    Ok(hausdorff_sorted(&xs, &ys))
}
