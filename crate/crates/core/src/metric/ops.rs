use num_integer::Integer;
use serde::Serialize;

use super::{check_index, unscale, FiniteMetricSpace, MetricSpace, Scalar};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// A broken metric axiom with the indices that witness it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "axiom", rename_all = "snake_case")]
pub enum Violation {
    NonzeroDiagonal { i: usize },
    Negative { i: usize, j: usize },
    Asymmetric { i: usize, j: usize },
    /// Distinct points at distance zero.
    Separation { i: usize, j: usize },
    /// `d(i, k) > d(i, j) + d(j, k)`.
    Triangle { i: usize, j: usize, k: usize },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every metric axiom. For squared spaces the triangle inequality is
/// checked on square roots, exactly.
pub fn validate_metric<S: MetricSpace + ?Sized>(s: &S) -> ValidationReport {
    let n = s.len();
    let mut violations = Vec::new();
    let d = |i, j| s.distance(i, j);

    for i in 0..n {
        if !d(i, i).is_zero() {
            violations.push(Violation::NonzeroDiagonal { i });
        }
    }
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let dij = d(i, j);
            if dij.is_negative() {
                violations.push(Violation::Negative { i, j });
            }
            if i < j {
                if dij != d(j, i) {
                    violations.push(Violation::Asymmetric { i, j });
                }
                if dij.is_zero() {
                    violations.push(Violation::Separation { i, j });
                }
            }
        }
    }

    let broken = |ik: &Rational, ij: &Rational, jk: &Rational| -> bool {
        if !s.is_squared() {
            return ik > &(ij + jk);
        }
        if ij.is_negative() || jk.is_negative() {
            return true;
        }
        // sqrt(ik) <= sqrt(ij) + sqrt(jk)  <=>  t <= 0 or t^2 <= 4 ij jk
        let t = &(ik - ij) - jk;
        t.is_positive() && &t * &t > &(&Rational::from(4) * ij) * jk
    };
    for i in 0..n {
        for k in i + 1..n {
            let ik = d(i, k);
            for j in 0..n {
                if j == i || j == k {
                    continue;
                }
                if broken(&ik, &d(i, j), &d(j, k)) {
                    violations.push(Violation::Triangle { i, j, k });
                }
            }
        }
    }
    ValidationReport { violations }
}

fn pairs_extreme<S, T, F>(s: &S, get: F, want_max: bool) -> Option<T>
where
    S: MetricSpace + ?Sized,
    T: Scalar,
    F: Fn(usize, usize) -> T,
{
    let n = s.len();
    let mut best: Option<T> = None;
    for i in 0..n {
        for j in i + 1..n {
            let v = get(i, j);
            best = Some(match best {
                None => v,
                Some(b) if (want_max && v > b) || (!want_max && v < b) => v,
                Some(b) => b,
            });
        }
    }
    best
}

fn extreme<S: MetricSpace + ?Sized>(s: &S, want_max: bool) -> Option<Rational> {
    match s.common_denominator() {
        Some(den) => pairs_extreme(
            s,
            |i, j| s.scaled_distance(i, j).expect("integer form") as i128,
            want_max,
        )
        .map(|v| unscale(v, den as u128)),
        None => pairs_extreme(s, |i, j| s.distance(i, j), want_max),
    }
}

/// Largest pairwise distance; zero for a one-point space.
pub fn diameter<S: MetricSpace + ?Sized>(s: &S) -> Result<Rational> {
    if s.is_empty() {
        return Err(Error::Empty("diameter of an empty space"));
    }
    Ok(extreme(s, true).unwrap_or_else(Rational::zero))
}

/// Smallest distance between distinct points.
pub fn min_positive_distance<S: MetricSpace + ?Sized>(s: &S) -> Result<Rational> {
    extreme(s, false).ok_or(Error::TooFewPoints { needed: 2, got: s.len() })
}

/// `max_x min_{c in subset} d(x, c)`; the subset is an ε-net iff this is ≤ ε.
pub fn covering_radius<S: MetricSpace + ?Sized>(s: &S, subset: &[usize]) -> Result<Rational> {
    if subset.is_empty() {
        return Err(Error::Empty("covering radius of an empty subset"));
    }
    for &c in subset {
        check_index(c, s.len())?;
    }
    fn run<T: Scalar>(n: usize, subset: &[usize], get: impl Fn(usize, usize) -> T) -> T {
        (0..n)
            .map(|x| subset.iter().map(|&c| get(x, c)).min().expect("nonempty subset"))
            .max()
            .unwrap_or_else(T::zero)
    }
    Ok(match s.common_denominator() {
        Some(den) => unscale(
            run(s.len(), subset, |i, j| s.scaled_distance(i, j).expect("integer form") as i128),
            den as u128,
        ),
        None => run(s.len(), subset, |i, j| s.distance(i, j)),
    })
}

/// Cartesian product with the Euclidean product metric, stored squared.
///
/// Points are ordered lexicographically with the last factor varying
/// fastest. Squared factors contribute their entries as-is.
pub fn product_space(factors: &[&dyn MetricSpace]) -> Result<FiniteMetricSpace> {
    if factors.is_empty() {
        return Err(Error::Empty("product of no factors"));
    }
    if factors.iter().any(|f| f.is_empty()) {
        return Err(Error::Empty("product with an empty factor"));
    }
    let sizes: Vec<usize> = factors.iter().map(|f| f.len()).collect();
    let total = sizes.iter().try_fold(1usize, |acc, &s| acc.checked_mul(s)).ok_or(
        Error::CapExceeded { what: "product space", size: u128::MAX, cap: usize::MAX as u128 },
    )?;
    let coords = |mut idx: usize| -> Vec<usize> {
        let mut c = vec![0; sizes.len()];
        for k in (0..sizes.len()).rev() {
            c[k] = idx % sizes[k];
            idx /= sizes[k];
        }
        c
    };
    let labels: Vec<String> = (0..total)
        .map(|idx| {
            let parts: Vec<String> =
                coords(idx).iter().zip(factors).map(|(&c, f)| f.label(c)).collect();
            format!("({})", parts.join(","))
        })
        .collect();
    let all_coords: Vec<Vec<usize>> = (0..total).map(coords).collect();

    if let Some(space) = integer_product(factors, &all_coords, &labels) {
        return Ok(space);
    }
    let mut flat = Vec::with_capacity(total * total);
    for a in &all_coords {
        for b in &all_coords {
            let v: Rational = factors
                .iter()
                .enumerate()
                .map(|(k, f)| {
                    let d = f.distance(a[k], b[k]);
                    if f.is_squared() {
                        d
                    } else {
                        &d * &d
                    }
                })
                .sum();
            flat.push(v);
        }
    }
    FiniteMetricSpace::from_exact(labels, flat, true)
}

fn integer_product(
    factors: &[&dyn MetricSpace],
    all_coords: &[Vec<usize>],
    labels: &[String],
) -> Option<FiniteMetricSpace> {
    // squared entries of factor k have denominator den_k^2 (or den_k if already squared)
    let mut dens = Vec::with_capacity(factors.len());
    for f in factors {
        let d = f.common_denominator()? as u128;
        dens.push(if f.is_squared() { d } else { d.checked_mul(d)? });
    }
    let l = dens.iter().try_fold(1u128, |acc, d| {
        let v = acc.lcm(d);
        (v <= i64::MAX as u128).then_some(v)
    })?;
    let mults: Vec<i128> = dens.iter().map(|d| (l / d) as i128).collect();
    let mut numer = Vec::with_capacity(all_coords.len() * all_coords.len());
    for a in all_coords {
        for b in all_coords {
            let mut acc: i128 = 0;
            for (k, f) in factors.iter().enumerate() {
                let v = f.scaled_distance(a[k], b[k])? as i128;
                let sq = if f.is_squared() { v } else { v.checked_mul(v)? };
                acc = acc.checked_add(sq.checked_mul(mults[k])?)?;
            }
            numer.push(i64::try_from(acc).ok()?);
        }
    }
    FiniteMetricSpace::from_scaled(labels.to_vec(), l as u64, numer, true).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(rows: Vec<Vec<i64>>) -> FiniteMetricSpace {
        let n = rows.len();
        FiniteMetricSpace::new(
            (0..n).map(|i| i.to_string()).collect(),
            rows.into_iter().map(|r| r.into_iter().map(Rational::from).collect()).collect(),
            false,
        )
        .unwrap()
    }

    #[test]
    fn separation_violation_reported() {
        let s = space(vec![vec![0, 0], vec![0, 0]]);
        assert_eq!(validate_metric(&s).violations, vec![Violation::Separation { i: 0, j: 1 }]);
    }

    #[test]
    fn triangle_violation_reported() {
        let s = space(vec![vec![0, 1, 5], vec![1, 0, 1], vec![5, 1, 0]]);
        assert_eq!(
            validate_metric(&s).violations,
            vec![Violation::Triangle { i: 0, j: 1, k: 2 }]
        );
    }

    #[test]
    fn asymmetry_and_diagonal() {
        let s = space(vec![vec![1, 2], vec![3, 0]]);
        let v = validate_metric(&s).violations;
        assert!(v.contains(&Violation::NonzeroDiagonal { i: 0 }));
        assert!(v.contains(&Violation::Asymmetric { i: 0, j: 1 }));
    }

    #[test]
    fn one_point_space() {
        let s = space(vec![vec![0]]);
        assert_eq!(diameter(&s).unwrap(), Rational::zero());
        assert!(matches!(min_positive_distance(&s), Err(Error::TooFewPoints { .. })));
        assert_eq!(covering_radius(&s, &[0]).unwrap(), Rational::zero());
    }

    #[test]
    fn empty_space_errors() {
        let s = space(vec![]);
        assert!(diameter(&s).is_err());
        assert!(covering_radius(&space(vec![vec![0]]), &[]).is_err());
        assert!(covering_radius(&space(vec![vec![0]]), &[3]).is_err());
        assert!(product_space(&[]).is_err());
    }

    #[test]
    fn squared_triangle_uses_square_roots() {
        // 0, 1, 2 on a line stored squared: 4 <= 1 + 1 + 2*sqrt(1)
        let s = FiniteMetricSpace::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![
                vec![0.into(), 1.into(), 4.into()],
                vec![1.into(), 0.into(), 1.into()],
                vec![4.into(), 1.into(), 0.into()],
            ],
            true,
        )
        .unwrap();
        assert!(validate_metric(&s).is_valid());
        // 5 > (1 + 1)^2 breaks it
        let bad = FiniteMetricSpace::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![
                vec![0.into(), 1.into(), 5.into()],
                vec![1.into(), 0.into(), 1.into()],
                vec![5.into(), 1.into(), 0.into()],
            ],
            true,
        )
        .unwrap();
        assert!(!validate_metric(&bad).is_valid());
    }

    #[test]
    fn exact_fallback_matches_integer_path() {
        let s = space(vec![vec![0, 3, 4], vec![3, 0, 5], vec![4, 5, 0]]);
        let huge: Rational = "100000000000000000000000000".parse().unwrap();
        let big = s.scaled_by(&huge.recip().unwrap());
        assert_eq!(big.common_denominator(), None);
        assert_eq!(diameter(&big).unwrap(), &Rational::from(5) / &huge);
        assert_eq!(min_positive_distance(&big).unwrap(), &Rational::from(3) / &huge);
        assert_eq!(covering_radius(&big, &[0]).unwrap(), &Rational::from(4) / &huge);
    }
}
