//! Z/pZ as an ordered metric space.
//!
//! Classes are represented by their canonical representative in
//! `0..p`. Distances are `scale(kind, p) * |n0 - m0|`, so every ring is
//! isometric to a scaled copy of `{0, .., p-1}` on the real line; the
//! structural helpers here lean on that picture.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::caps::SizeCaps;
use crate::error::{Error, Result};
use crate::metric::{product_space, FiniteMetricSpace, MetricSpace};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    /// `|n0 - m0|`
    Raw,
    /// `|n0 - m0| / (p - 1)`
    Normalized,
    /// `|n0 - m0| / (p - 1)^2`
    SquaredNormalized,
}

impl MetricKind {
    pub fn scale(self, p: u64) -> Rational {
        let d = Rational::from(p - 1);
        match self {
            MetricKind::Raw => Rational::one(),
            MetricKind::Normalized => d.recip().expect("p >= 2"),
            MetricKind::SquaredNormalized => (&d * &d).recip().expect("p >= 2"),
        }
    }

    /// Denominator of [`scale`](Self::scale) when it fits in a `u64`.
    pub fn denominator(self, p: u64) -> Option<u64> {
        match self {
            MetricKind::Raw => Some(1),
            MetricKind::Normalized => Some(p - 1),
            MetricKind::SquaredNormalized => (p - 1).checked_mul(p - 1),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MetricKind::Raw => "raw",
            MetricKind::Normalized => "normalized",
            MetricKind::SquaredNormalized => "squared_normalized",
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn check_modulus(p: impl Into<i128>) -> Result<u64> {
    let p = p.into();
    if p < 2 || p > u64::MAX as i128 {
        return Err(Error::InvalidModulus(p));
    }
    Ok(p as u64)
}

/// The class `[n]` modulo `p`, held by its representative in `0..p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ResidueClass {
    representative: u64,
    modulus: u64,
}

impl ResidueClass {
    pub fn representative(&self) -> u64 {
        self.representative
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }
}

impl fmt::Display for ResidueClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.representative)
    }
}

/// Canonical class of `n` modulo `p`, correct for negative `n`.
pub fn reduce(n: i128, p: u64) -> Result<ResidueClass> {
    let p = check_modulus(p)?;
    Ok(ResidueClass { representative: n.rem_euclid(p as i128) as u64, modulus: p })
}

fn same_modulus(a: &ResidueClass, b: &ResidueClass) -> Result<u64> {
    if a.modulus != b.modulus {
        return Err(Error::ModulusMismatch(a.modulus, b.modulus));
    }
    Ok(a.modulus)
}

pub fn ring_add(a: &ResidueClass, b: &ResidueClass) -> Result<ResidueClass> {
    let p = same_modulus(a, b)?;
    reduce(a.representative as i128 + b.representative as i128, p)
}

pub fn ring_mul(a: &ResidueClass, b: &ResidueClass) -> Result<ResidueClass> {
    let p = same_modulus(a, b)?;
    let prod = (a.representative as u128 * b.representative as u128) % p as u128;
    Ok(ResidueClass { representative: prod as u64, modulus: p })
}

/// Multiplicative inverse via the extended Euclidean algorithm.
pub fn ring_inv(a: &ResidueClass) -> Result<ResidueClass> {
    let p = a.modulus as i128;
    let (mut r0, mut r1) = (p, a.representative as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return Err(Error::NoInverse { value: a.representative, modulus: a.modulus });
    }
    reduce(t0, a.modulus)
}

/// Order by canonical representatives.
pub fn compare(a: &ResidueClass, b: &ResidueClass) -> Result<Ordering> {
    same_modulus(a, b)?;
    Ok(a.representative.cmp(&b.representative))
}

/// Angle of `exp(2πi n0/p)` as a fraction of a full turn, in `[0, 1)`.
pub fn circle_embed(a: &ResidueClass) -> Rational {
    Rational::new(a.representative, a.modulus).expect("modulus >= 2")
}

/// The same angle in units of `1/p` of a turn.
pub fn circle_angle_units(a: &ResidueClass) -> u64 {
    a.representative
}

/// Z/pZ with one of the three metrics. Distances are computed on demand;
/// use [`FiniteMetricSpace::materialize`] for a dense copy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuotientRingSpace {
    p: u64,
    kind: MetricKind,
}

pub fn make_ring(p: u64, kind: MetricKind) -> Result<QuotientRingSpace> {
    Ok(QuotientRingSpace { p: check_modulus(p)?, kind })
}

impl QuotientRingSpace {
    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn kind(&self) -> MetricKind {
        self.kind
    }

    pub fn class(&self, n: i128) -> ResidueClass {
        reduce(n, self.p).expect("valid modulus")
    }

    pub fn scale(&self) -> Rational {
        self.kind.scale(self.p)
    }

    pub fn class_distance(&self, a: &ResidueClass, b: &ResidueClass) -> Result<Rational> {
        if a.modulus != self.p {
            return Err(Error::ModulusMismatch(a.modulus, self.p));
        }
        same_modulus(a, b)?;
        Ok(self.distance(a.representative as usize, b.representative as usize))
    }

    /// Diameter read off the line picture: scale times (largest minus
    /// smallest representative).
    pub fn line_diameter(&self) -> Rational {
        &self.scale() * &Rational::from(self.p - 1)
    }

    /// Smallest positive distance from the line picture: adjacent
    /// representatives are one unit apart.
    pub fn line_min_distance(&self) -> Rational {
        self.scale()
    }

    /// Covering radius of a set of representatives, from the gaps between
    /// consecutive net points on the line.
    pub fn line_covering_radius(&self, net: &[u64]) -> Result<Rational> {
        Ok(&self.scale() * &Rational::from(self.line_covering_units(net)?))
    }

    /// Unscaled covering radius: the answer in units of one step.
    pub fn line_covering_units(&self, net: &[u64]) -> Result<u64> {
        if net.is_empty() {
            return Err(Error::Empty("covering radius of an empty subset"));
        }
        let mut pts = net.to_vec();
        pts.sort_unstable();
        pts.dedup();
        if let Some(&bad) = pts.iter().find(|&&v| v >= self.p) {
            return Err(Error::IndexOutOfRange { index: bad as usize, len: self.p as usize });
        }
        let first = pts[0];
        let last = self.p - 1 - pts[pts.len() - 1];
        let inner = pts.windows(2).map(|w| (w[1] - w[0]) / 2).max().unwrap_or(0);
        Ok(first.max(last).max(inner))
    }

    /// JSON: the shared metric-space object plus `p` and `kind`.
    pub fn to_json_value(&self) -> serde_json::Value {
        let mut v = FiniteMetricSpace::materialize(self).expect("ring labels are distinct").to_json_value();
        let obj = v.as_object_mut().expect("object");
        obj.insert("p".into(), self.p.into());
        obj.insert("kind".into(), self.kind.name().into());
        v
    }
}

impl MetricSpace for QuotientRingSpace {
    fn len(&self) -> usize {
        self.p as usize
    }

    fn label(&self, i: usize) -> String {
        format!("[{i}]")
    }

    fn distance(&self, i: usize, j: usize) -> Rational {
        &self.scale() * &Rational::from(i.abs_diff(j))
    }

    fn common_denominator(&self) -> Option<u64> {
        self.kind.denominator(self.p)
    }

    fn scaled_distance(&self, i: usize, j: usize) -> Option<i64> {
        i64::try_from(i.abs_diff(j)).ok()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RingOp {
    Add,
    Mul,
}

impl RingOp {
    pub fn apply(self, a: u64, b: u64, p: u64) -> u64 {
        let (a, b, p) = (a as u128, b as u128, p as u128);
        (match self {
            RingOp::Add => (a + b) % p,
            RingOp::Mul => (a * b) % p,
        }) as u64
    }

    pub fn name(self) -> &'static str {
        match self {
            RingOp::Add => "add",
            RingOp::Mul => "mul",
        }
    }
}

/// The graph `{([n], [m], [n∘m])}` of a ring operation in (Z/pZ)^3 with the
/// Euclidean product of normalized metrics, stored squared.
///
/// Triple `i` is `(i / p, i % p, (i / p) ∘ (i % p))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OperationGraph {
    p: u64,
    op: RingOp,
}

pub fn operation_graph(p: u64, op: RingOp, caps: &SizeCaps) -> Result<OperationGraph> {
    let p = check_modulus(p)?;
    let size = p as u128 * p as u128;
    if size > caps.max_points as u128 {
        return Err(Error::cap("operation graph", size, caps.max_points));
    }
    Ok(OperationGraph { p, op })
}

impl OperationGraph {
    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn op(&self) -> RingOp {
        self.op
    }

    pub fn triple(&self, i: usize) -> (u64, u64, u64) {
        let n = i as u64 / self.p;
        let m = i as u64 % self.p;
        (n, m, self.op.apply(n, m, self.p))
    }

    /// Index of the triple whose first two components are `(n, m)`.
    pub fn index_of(&self, n: u64, m: u64) -> usize {
        (n * self.p + m) as usize
    }

    /// Projection onto component `k` (0, 1 or 2) of triple `i`.
    pub fn project(&self, k: usize, i: usize) -> ResidueClass {
        let (a, b, c) = self.triple(i);
        let v = [a, b, c][k];
        ResidueClass { representative: v, modulus: self.p }
    }

    /// Sum of squared componentwise representative gaps, the numerator of
    /// the squared distance over `(p - 1)^2`.
    pub fn squared_units(&self, i: usize, j: usize) -> u64 {
        let (a0, a1, a2) = self.triple(i);
        let (b0, b1, b2) = self.triple(j);
        let sq = |x: u64, y: u64| x.abs_diff(y).pow(2);
        sq(a0, b0) + sq(a1, b1) + sq(a2, b2)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let mut v = FiniteMetricSpace::materialize(self).expect("distinct labels").to_json_value();
        let obj = v.as_object_mut().expect("object");
        obj.insert("p".into(), self.p.into());
        obj.insert("kind".into(), MetricKind::Normalized.name().into());
        obj.insert("op".into(), self.op.name().into());
        v
    }
}

impl MetricSpace for OperationGraph {
    fn len(&self) -> usize {
        (self.p * self.p) as usize
    }

    fn label(&self, i: usize) -> String {
        let (a, b, c) = self.triple(i);
        format!("([{a}],[{b}],[{c}])")
    }

    fn is_squared(&self) -> bool {
        true
    }

    fn distance(&self, i: usize, j: usize) -> Rational {
        let d = Rational::from(self.p - 1);
        &Rational::from(self.squared_units(i, j)) / &(&d * &d)
    }

    fn common_denominator(&self) -> Option<u64> {
        (self.p - 1).checked_mul(self.p - 1)
    }

    fn scaled_distance(&self, i: usize, j: usize) -> Option<i64> {
        i64::try_from(self.squared_units(i, j)).ok()
    }
}

/// Product of rings with the Euclidean product metric, stored squared.
pub fn lattice(moduli: &[u64], kind: MetricKind, caps: &SizeCaps) -> Result<FiniteMetricSpace> {
    if moduli.is_empty() {
        return Err(Error::Empty("lattice with no factors"));
    }
    let mut size: u128 = 1;
    for &p in moduli {
        check_modulus(p)?;
        size = size.saturating_mul(p as u128);
    }
    if size > caps.max_points as u128 {
        return Err(Error::cap("lattice", size, caps.max_points));
    }
    let rings: Vec<QuotientRingSpace> =
        moduli.iter().map(|&p| make_ring(p, kind)).collect::<Result<_>>()?;
    let factors: Vec<&dyn MetricSpace> = rings.iter().map(|r| r as &dyn MetricSpace).collect();
    product_space(&factors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{diameter, validate_metric};

    #[test]
    fn reduce_examples() {
        assert_eq!(reduce(7, 5).unwrap().representative(), 2);
        assert_eq!(reduce(-1, 5).unwrap().representative(), 4);
        assert_eq!(reduce(0, 2).unwrap().representative(), 0);
        assert!(matches!(reduce(3, 1), Err(Error::InvalidModulus(1))));
    }

    #[test]
    fn arithmetic_examples() {
        let c = |n| reduce(n, 5).unwrap();
        assert_eq!(ring_add(&c(3), &c(4)).unwrap(), c(2));
        assert_eq!(ring_mul(&c(3), &c(4)).unwrap(), c(2));
        for k in 0..5 {
            assert_eq!(ring_mul(&c(0), &c(k)).unwrap(), c(0));
        }
        let other = reduce(1, 7).unwrap();
        assert!(matches!(ring_add(&c(1), &other), Err(Error::ModulusMismatch(5, 7))));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(ring_inv(&reduce(3, 7).unwrap()).unwrap().representative(), 5);
        assert!(matches!(ring_inv(&reduce(2, 4).unwrap()), Err(Error::NoInverse { .. })));
        assert!(ring_inv(&reduce(0, 7).unwrap()).is_err());
        for p in [2, 3, 10, 97] {
            assert_eq!(ring_inv(&reduce(1, p).unwrap()).unwrap().representative(), 1);
        }
        // units of a composite modulus still invert
        assert_eq!(ring_inv(&reduce(3, 10).unwrap()).unwrap().representative(), 7);
    }

    #[test]
    fn compare_examples() {
        let c = |n| reduce(n, 7).unwrap();
        assert_eq!(compare(&c(2), &c(3)).unwrap(), Ordering::Less);
        assert_eq!(compare(&c(4), &c(4)).unwrap(), Ordering::Equal);
        assert_eq!(compare(&c(6), &c(0)).unwrap(), Ordering::Greater);
    }

    #[test]
    fn make_ring_examples() {
        let raw = make_ring(5, MetricKind::Raw).unwrap();
        assert_eq!(raw.class_distance(&raw.class(1), &raw.class(4)).unwrap(), Rational::from(3));
        let norm = make_ring(5, MetricKind::Normalized).unwrap();
        assert_eq!(norm.class_distance(&norm.class(0), &norm.class(4)).unwrap(), Rational::one());
        let sq = make_ring(5, MetricKind::SquaredNormalized).unwrap();
        assert_eq!(diameter(&sq).unwrap(), Rational::frac(1, 4));
        assert_eq!(sq.line_diameter(), Rational::frac(1, 4));
        assert!(make_ring(1, MetricKind::Raw).is_err());
        assert!(make_ring(0, MetricKind::Raw).is_err());
    }

    #[test]
    fn circle_examples() {
        assert_eq!(circle_embed(&reduce(1, 4).unwrap()), Rational::frac(1, 4));
        assert_eq!(circle_embed(&reduce(0, 9).unwrap()), Rational::zero());
        assert_eq!(circle_embed(&reduce(3, 6).unwrap()), Rational::frac(1, 2));
    }

    #[test]
    fn operation_graph_examples() {
        let caps = SizeCaps::default();
        let g = operation_graph(2, RingOp::Add, &caps).unwrap();
        let triples: Vec<_> = (0..g.len()).map(|i| g.triple(i)).collect();
        assert_eq!(triples, vec![(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)]);
        // (0,0,0) vs (1,1,0)
        assert_eq!(g.distance(0, 3), Rational::from(2));

        let m = operation_graph(3, RingOp::Mul, &caps).unwrap();
        assert_eq!(m.len(), 9);
        for i in 0..9 {
            let (a, b, c) = m.triple(i);
            assert_eq!(c, (a * b) % 3);
        }
        assert!(matches!(
            operation_graph(101, RingOp::Add, &caps),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn lattice_examples() {
        let caps = SizeCaps::default();
        let l = lattice(&[2, 2], MetricKind::Normalized, &caps).unwrap();
        assert_eq!(l.len(), 4);
        assert!(l.is_squared());
        assert_eq!(diameter(&l).unwrap(), Rational::from(2));
        assert_eq!(lattice(&[2, 3], MetricKind::Normalized, &caps).unwrap().len(), 6);
        let l33 = lattice(&[3, 3], MetricKind::Normalized, &caps).unwrap();
        // (0,0) is index 0, (2,2) is index 8
        assert_eq!(l33.label(8), "([2],[2])");
        assert_eq!(l33.distance(0, 8), Rational::from(2));
        assert!(validate_metric(&l33).is_valid());
        assert!(lattice(&[200, 200], MetricKind::Raw, &caps).is_err());
    }
}
