//! Gromov-Hausdorff distance between finite metric spaces.
//!
//! Convention: `d_GH(X, Y) = ½ · min over correspondences R of dis(R)`,
//! where `dis(R) = max |d_X(x, x') - d_Y(y, y')|` over pairs in `R`.
//! For squared spaces the same formula is applied to the stored squares.
//!
//! The closed-form expressions for rings (`closed_form_gh_*`) are reference
//! values only; they are never substituted for a computed distance.

mod search;

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::caps::SizeCaps;
use crate::error::{Error, Result};
use crate::metric::{
    diameter, joint_denominator, rescaled_matrix, unscale, MetricSpace, Scalar,
};
use crate::rational::Rational;
use crate::rings::{make_ring, MetricKind};

use search::Problem;

/// A relation between `0..nx` and `0..ny` covering both sides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Correspondence {
    nx: usize,
    ny: usize,
    pairs: Vec<(usize, usize)>,
}

impl Correspondence {
    pub fn new(nx: usize, ny: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let set: BTreeSet<(usize, usize)> = pairs.into_iter().collect();
        let mut seen_x = vec![false; nx];
        let mut seen_y = vec![false; ny];
        for &(i, j) in &set {
            if i >= nx || j >= ny {
                return Err(Error::NotTotal(format!("pair ({i}, {j}) outside {nx}×{ny}")));
            }
            seen_x[i] = true;
            seen_y[j] = true;
        }
        if let Some(i) = seen_x.iter().position(|s| !s) {
            return Err(Error::NotTotal(format!("x-point {i} is unmatched")));
        }
        if let Some(j) = seen_y.iter().position(|s| !s) {
            return Err(Error::NotTotal(format!("y-point {j} is unmatched")));
        }
        Ok(Correspondence { nx, ny, pairs: set.into_iter().collect() })
    }

    pub fn identity(n: usize) -> Self {
        Correspondence { nx: n, ny: n, pairs: (0..n).map(|i| (i, i)).collect() }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn sizes(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn transpose(&self) -> Self {
        Correspondence::new(self.ny, self.nx, self.pairs.iter().map(|&(i, j)| (j, i)))
            .expect("transpose of a total relation is total")
    }
}

/// Certified bounds on a Gromov-Hausdorff distance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GhEstimate {
    pub lower: Rational,
    pub upper: Rational,
    pub exact: bool,
    pub nodes: u64,
    pub witness: Option<Correspondence>,
}

impl Serialize for GhEstimate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("GhEstimate", 5)?;
        st.serialize_field("lower", &self.lower)?;
        st.serialize_field("upper", &self.upper)?;
        st.serialize_field("exact", &self.exact)?;
        st.serialize_field("nodes", &self.nodes)?;
        match &self.witness {
            Some(w) => {
                let pairs: Vec<[usize; 2]> = w.pairs.iter().map(|&(i, j)| [i, j]).collect();
                st.serialize_field("witness", &pairs)?;
            }
            None => st.skip_field("witness")?,
        }
        st.end()
    }
}

fn check_pair<X, Y>(x: &X, y: &Y) -> Result<()>
where
    X: MetricSpace + ?Sized,
    Y: MetricSpace + ?Sized,
{
    if x.is_empty() || y.is_empty() {
        return Err(Error::Empty("Gromov-Hausdorff needs nonempty spaces"));
    }
    if x.is_squared() != y.is_squared() {
        return Err(Error::MixedSquared);
    }
    Ok(())
}

/// Both distance matrices in one exact number type, plus the denominator
/// that turns results back into rationals.
enum Joint {
    Int { den: u128, dx: Vec<i128>, dy: Vec<i128> },
    Exact { dx: Vec<Rational>, dy: Vec<Rational> },
}

impl Joint {
    fn of<X, Y>(x: &X, y: &Y) -> Self
    where
        X: MetricSpace + ?Sized,
        Y: MetricSpace + ?Sized,
    {
        if let Some(den) = joint_denominator(x, y) {
            if let (Some(dx), Some(dy)) = (rescaled_matrix(x, den), rescaled_matrix(y, den)) {
                return Joint::Int { den, dx, dy };
            }
        }
        let dense = |s: &dyn Fn(usize, usize) -> Rational, n: usize| {
            (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| s(i, j)).collect()
        };
        Joint::Exact {
            dx: dense(&|i, j| x.distance(i, j), x.len()),
            dy: dense(&|i, j| y.distance(i, j), y.len()),
        }
    }
}

fn distortion_kernel<T, FX, FY>(pairs: &[(usize, usize)], dx: FX, dy: FY) -> T
where
    T: Scalar,
    FX: Fn(usize, usize) -> T + Sync,
    FY: Fn(usize, usize) -> T + Sync,
{
    pairs
        .par_iter()
        .map(|&(i, j)| {
            pairs
                .iter()
                .map(|&(i2, j2)| dx(i, i2).abs_diff(&dy(j, j2)))
                .max()
                .unwrap_or_else(T::zero)
        })
        .max()
        .unwrap_or_else(T::zero)
}

/// `max |d_X(i, i') - d_Y(j, j')|` over all pairs of pairs in `c`.
///
/// Streams over the pairs without materializing either space.
pub fn distortion<X, Y>(c: &Correspondence, x: &X, y: &Y) -> Result<Rational>
where
    X: MetricSpace + Sync + ?Sized,
    Y: MetricSpace + Sync + ?Sized,
{
    check_pair(x, y)?;
    if c.nx != x.len() || c.ny != y.len() {
        return Err(Error::NotTotal(format!(
            "correspondence is {}×{} but spaces have {} and {} points",
            c.nx,
            c.ny,
            x.len(),
            y.len()
        )));
    }
    if let Some(den) = joint_denominator(x, y) {
        let fx = (den / x.common_denominator().expect("int form") as u128) as i128;
        let fy = (den / y.common_denominator().expect("int form") as u128) as i128;
        let worst = distortion_kernel(
            &c.pairs,
            |i, j| x.scaled_distance(i, j).expect("int form") as i128 * fx,
            |i, j| y.scaled_distance(i, j).expect("int form") as i128 * fy,
        );
        return Ok(unscale(worst, den));
    }
    Ok(distortion_kernel(&c.pairs, |i, j| x.distance(i, j), |i, j| y.distance(i, j)))
}

/// Sorted, deduplicated values of a distance matrix.
fn value_set<T: Scalar>(d: &[T]) -> Vec<T> {
    let mut v = d.to_vec();
    v.sort();
    v.dedup();
    v
}

/// Lower bound in distortion units: any correspondence of distortion δ
/// matches every distance of one space to a distance of the other within
/// δ, and matches the diameters within δ.
fn distortion_floor<T: Scalar>(dx: &[T], dy: &[T]) -> T {
    let sx = value_set(dx);
    let sy = value_set(dy);
    let diam = sx.last().expect("nonempty").abs_diff(sy.last().expect("nonempty"));
    let hd = crate::metric::directed_sorted(&sx, &sy).max(crate::metric::directed_sorted(&sy, &sx));
    diam.max(hd)
}

/// `max(½|diam X − diam Y|, ½ d_H(dist(X), dist(Y)))`, where `dist(·)` is the
/// set of pairwise distances (zero included).
pub fn gh_lower_bound<X, Y>(x: &X, y: &Y) -> Result<Rational>
where
    X: MetricSpace + ?Sized,
    Y: MetricSpace + ?Sized,
{
    check_pair(x, y)?;
    let half = Rational::frac(1, 2);
    Ok(match Joint::of(x, y) {
        Joint::Int { den, dx, dy } => &unscale(distortion_floor(&dx, &dy), den) * &half,
        Joint::Exact { dx, dy } => &distortion_floor(&dx, &dy) * &half,
    })
}

/// Extends a total map `f: X → Y` to a correspondence: every `y` outside the
/// image is paired with the preimage of its nearest covered point (ties go
/// to the smaller index, as does the choice of preimage).
pub fn complete_map<Y: MetricSpace + ?Sized>(nx: usize, y: &Y, f: &[usize]) -> Result<Correspondence> {
    if nx == 0 || y.is_empty() {
        return Err(Error::Empty("map completion needs nonempty spaces"));
    }
    if f.len() != nx {
        return Err(Error::NotTotal(format!("map defined on {} of {} points", f.len(), nx)));
    }
    let ny = y.len();
    let mut preimage: Vec<Option<usize>> = vec![None; ny];
    for (i, &j) in f.iter().enumerate() {
        crate::metric::check_index(j, ny)?;
        preimage[j].get_or_insert(i);
    }
    let covered: Vec<usize> = (0..ny).filter(|&j| preimage[j].is_some()).collect();
    let mut pairs: Vec<(usize, usize)> = f.iter().copied().enumerate().collect();
    for j in 0..ny {
        if preimage[j].is_some() {
            continue;
        }
        let nearest = covered
            .iter()
            .copied()
            .min_by(|&a, &b| y.distance(j, a).cmp(&y.distance(j, b)).then(a.cmp(&b)))
            .expect("f is nonempty");
        pairs.push((preimage[nearest].expect("covered"), j));
    }
    Correspondence::new(nx, ny, pairs)
}

/// Half the distortion of [`complete_map`]`(f)`.
pub fn gh_upper_bound_from_map<X, Y>(x: &X, y: &Y, f: &[usize]) -> Result<Rational>
where
    X: MetricSpace + Sync + ?Sized,
    Y: MetricSpace + Sync + ?Sized,
{
    check_pair(x, y)?;
    let c = complete_map(x.len(), y, f)?;
    Ok(&distortion(&c, x, y)? * &Rational::frac(1, 2))
}

/// `round(n (q-1)/(p-1))` with ties rounding up.
pub fn canonical_image(n: u64, p: u64, q: u64) -> u64 {
    let (n, p, q) = (n as u128, p as u128, q as u128);
    ((2 * n * (q - 1) + (p - 1)) / (2 * (p - 1))) as u64
}

/// Endpoint-preserving rescaling of Z/pZ onto Z/qZ, completed on the
/// uncovered classes of Z/qZ.
pub fn canonical_correspondence(p: u64, q: u64) -> Result<Correspondence> {
    let target = make_ring(q, MetricKind::Raw)?;
    make_ring(p, MetricKind::Raw)?;
    let f: Vec<usize> = (0..p).map(|n| canonical_image(n, p, q) as usize).collect();
    complete_map(p as usize, &target, &f)
}

/// Exact distance by branch-and-bound; falls back to certified bounds with
/// `exact = false` when the node budget runs out.
pub fn gh_exact<X, Y>(x: &X, y: &Y, caps: &SizeCaps) -> Result<GhEstimate>
where
    X: MetricSpace + ?Sized,
    Y: MetricSpace + ?Sized,
{
    check_pair(x, y)?;
    let size = x.len() as u128 * y.len() as u128;
    if size > caps.exact_pairs as u128 {
        return Err(Error::cap("exact Gromov-Hausdorff search (|X|·|Y|)", size, caps.exact_pairs));
    }
    // the larger space is the one assigned first
    let swap = y.len() > x.len();
    match Joint::of(x, y) {
        Joint::Int { den, dx, dy } => Ok(run_search(dx, x.len(), dy, y.len(), swap, caps, |v| {
            unscale(v, den)
        })),
        Joint::Exact { dx, dy } => Ok(run_search(dx, x.len(), dy, y.len(), swap, caps, |v| v)),
    }
}

fn run_search<T: Scalar>(
    dx: Vec<T>,
    nx: usize,
    dy: Vec<T>,
    ny: usize,
    swap: bool,
    caps: &SizeCaps,
    to_rational: impl Fn(T) -> Rational,
) -> GhEstimate {
    let floor = distortion_floor(&dx, &dy);
    let problem = if swap {
        Problem { na: ny, nb: nx, da: dy, db: dx }
    } else {
        Problem { na: nx, nb: ny, da: dx, db: dy }
    };

    let greedy = search::greedy(&problem);
    let full: Vec<(usize, usize)> =
        (0..problem.na).flat_map(|a| (0..problem.nb).map(move |b| (a, b))).collect();
    let (g, f) = (problem.distortion(&greedy), problem.distortion(&full));
    let start = if g <= f { (g, greedy) } else { (f, full) };

    let out = search::solve(&problem, start, floor.clone(), caps.node_budget);
    let half = Rational::frac(1, 2);
    let upper = &to_rational(out.best) * &half;
    let pairs = out.pairs.into_iter().map(|(a, b)| if swap { (b, a) } else { (a, b) });
    let witness = Correspondence::new(nx, ny, pairs).expect("search keeps totality");
    let lower = if out.complete { upper.clone() } else { &to_rational(floor) * &half };
    GhEstimate { lower, upper, exact: out.complete, nodes: out.nodes, witness: Some(witness) }
}

fn closed_form_args(p1: u64, p2: u64) -> Result<(Rational, Rational)> {
    for p in [p1, p2] {
        if p < 2 {
            return Err(Error::InvalidModulus(p as i128));
        }
    }
    Ok((Rational::from(p1.abs_diff(p2)), Rational::from(p1.min(p2) - 1)))
}

/// `|p1 - p2|`: the closed form for the raw metric.
pub fn closed_form_gh_raw(p1: u64, p2: u64) -> Result<Rational> {
    Ok(closed_form_args(p1, p2)?.0)
}

/// `|p1 - p2| / min(p1 - 1, p2 - 1)`: the closed form for the normalized metric.
pub fn closed_form_gh_normalized(p1: u64, p2: u64) -> Result<Rational> {
    let (gap, m) = closed_form_args(p1, p2)?;
    Ok(&gap / &m)
}

/// `|p1 - p2| / min(p1 - 1, p2 - 1)^2`: the closed form for the squared-normalized metric.
pub fn closed_form_gh_squared(p1: u64, p2: u64) -> Result<Rational> {
    let (gap, m) = closed_form_args(p1, p2)?;
    Ok(&gap / &(&m * &m))
}

pub fn closed_form_gh(kind: MetricKind, p1: u64, p2: u64) -> Result<Rational> {
    match kind {
        MetricKind::Raw => closed_form_gh_raw(p1, p2),
        MetricKind::Normalized => closed_form_gh_normalized(p1, p2),
        MetricKind::SquaredNormalized => closed_form_gh_squared(p1, p2),
    }
}

/// Half the distortion of the canonical correspondence between two rings.
pub fn canonical_upper_bound(p: u64, q: u64, kind: MetricKind) -> Result<Rational> {
    let x = make_ring(p, kind)?;
    let y = make_ring(q, kind)?;
    let c = canonical_correspondence(p, q)?;
    Ok(&distortion(&c, &x, &y)? * &Rational::frac(1, 2))
}

/// Diameter gap bound alone, exposed for reports.
pub fn half_diameter_gap<X, Y>(x: &X, y: &Y) -> Result<Rational>
where
    X: MetricSpace + ?Sized,
    Y: MetricSpace + ?Sized,
{
    Ok(&(&diameter(x)? - &diameter(y)?).abs() * &Rational::frac(1, 2))
}
