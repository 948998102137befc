use num_integer::Integer;
use serde::Serialize;

use super::sequence::{generate_sequence, SequenceSpec};
use crate::caps::SizeCaps;
use crate::error::{Error, Result};
use crate::gh::{canonical_correspondence, canonical_upper_bound, closed_form_gh, gh_exact};
use crate::metric::MetricSpace;
use crate::rational::Rational;
use crate::report::write_csv;
use crate::rings::{make_ring, operation_graph, MetricKind, OperationGraph, RingOp};

/// Canonical upper bounds are evaluated only while the larger ring has at
/// most this many classes.
pub const CANONICAL_BOUND_LIMIT: u64 = 500;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConvergenceRow {
    pub p: u64,
    pub q: u64,
    /// `|p - q| / s(min(p, q))` for the sequence's metric kind.
    pub closed_form: Rational,
    pub canonical_upper: Option<Rational>,
    pub exact_gh: Option<Rational>,
    /// Diameter and smallest positive distance of the ring at `p`.
    pub diameter: Rational,
    pub min_dist: Rational,
    /// Whether the row lies in the flagged tail.
    pub in_tail: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum DiameterVerdict {
    Constant { value: Rational },
    TendsToZero { last: Rational },
    Unbounded { last: Rational },
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiameterRow {
    pub p: u64,
    pub diameter: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiameterLimit {
    pub kind: MetricKind,
    pub rows: Vec<DiameterRow>,
    pub verdict: DiameterVerdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConvergenceReport {
    pub spec: SequenceSpec,
    pub tolerance: Rational,
    pub rows: Vec<ConvergenceRow>,
    /// First `p` from which every successive closed-form value is below the
    /// tolerance.
    pub tail_start: Option<u64>,
    pub cauchy_like: bool,
    pub diameter: DiameterVerdict,
}

impl ConvergenceReport {
    pub fn max_tail_value(&self) -> Option<&Rational> {
        self.rows.iter().filter(|r| r.in_tail).map(|r| &r.closed_form).max()
    }

    pub fn to_csv(&self) -> Result<String> {
        let opt = |v: &Option<Rational>| v.as_ref().map(|r| r.to_string()).unwrap_or_default();
        write_csv(
            &["p", "q", "closed_form", "canonical_upper", "exact_gh", "diameter", "min_dist", "flag"],
            self.rows.iter().map(|r| {
                vec![
                    r.p.to_string(),
                    r.q.to_string(),
                    r.closed_form.to_string(),
                    opt(&r.canonical_upper),
                    opt(&r.exact_gh),
                    r.diameter.to_string(),
                    r.min_dist.to_string(),
                    r.in_tail.to_string(),
                ]
            }),
        )
    }
}

/// Index of the first element of the longest suffix satisfying `ok`.
fn suffix_start<T>(items: &[T], ok: impl Fn(&T) -> bool) -> Option<usize> {
    let bad = items.iter().rposition(|x| !ok(x));
    match bad {
        None if items.is_empty() => None,
        None => Some(0),
        Some(i) if i + 1 < items.len() => Some(i + 1),
        Some(_) => None,
    }
}

/// Successive closed-form distances along the sequence, with canonical
/// upper bounds and exact values where the spaces are small enough.
pub fn cauchy_diagnostics(
    spec: &SequenceSpec,
    tolerance: &Rational,
    caps: &SizeCaps,
) -> Result<ConvergenceReport> {
    if !tolerance.is_positive() {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tolerance}")));
    }
    let moduli = generate_sequence(spec, caps)?;
    if moduli.len() < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: moduli.len() });
    }
    let kind = spec.kind;
    let mut rows = Vec::with_capacity(moduli.len() - 1);
    for w in moduli.windows(2) {
        let (p, q) = (w[0], w[1]);
        let ring = make_ring(p, kind)?;
        let canonical_upper = if q <= CANONICAL_BOUND_LIMIT {
            Some(canonical_upper_bound(p, q, kind)?)
        } else {
            None
        };
        let exact_gh = if p as u128 * q as u128 <= caps.exact_pairs as u128 {
            let e = gh_exact(&ring, &make_ring(q, kind)?, caps)?;
            e.exact.then_some(e.upper)
        } else {
            None
        };
        rows.push(ConvergenceRow {
            p,
            q,
            closed_form: closed_form_gh(kind, p, q)?,
            canonical_upper,
            exact_gh,
            diameter: ring.line_diameter(),
            min_dist: ring.line_min_distance(),
            in_tail: false,
        });
    }
    let start = suffix_start(&rows, |r| &r.closed_form < tolerance);
    if let Some(s) = start {
        rows[s..].iter_mut().for_each(|r| r.in_tail = true);
    }
    Ok(ConvergenceReport {
        spec: *spec,
        tolerance: tolerance.clone(),
        tail_start: start.map(|s| rows[s].p),
        cauchy_like: start.is_some(),
        diameter: diameter_verdict(kind, &diameter_rows(&moduli, kind)?),
        rows,
    })
}

fn diameter_rows(moduli: &[u64], kind: MetricKind) -> Result<Vec<DiameterRow>> {
    moduli
        .iter()
        .map(|&p| Ok(DiameterRow { p, diameter: make_ring(p, kind)?.line_diameter() }))
        .collect()
}

fn diameter_verdict(kind: MetricKind, rows: &[DiameterRow]) -> DiameterVerdict {
    let Some(DiameterRow { diameter: last, .. }) = rows.last() else {
        return DiameterVerdict::Inconclusive;
    };
    let strictly =
        |ord: std::cmp::Ordering| rows.windows(2).all(|w| w[0].diameter.cmp(&w[1].diameter) == ord);
    match kind {
        MetricKind::Normalized if rows.iter().all(|r| &r.diameter == last) => {
            DiameterVerdict::Constant { value: last.clone() }
        }
        MetricKind::SquaredNormalized if strictly(std::cmp::Ordering::Greater) => {
            DiameterVerdict::TendsToZero { last: last.clone() }
        }
        MetricKind::Raw if strictly(std::cmp::Ordering::Less) => {
            DiameterVerdict::Unbounded { last: last.clone() }
        }
        _ => DiameterVerdict::Inconclusive,
    }
}

/// Per-step diameters and their limiting behaviour.
pub fn diameter_limit(spec: &SequenceSpec, caps: &SizeCaps) -> Result<DiameterLimit> {
    let moduli = generate_sequence(spec, caps)?;
    let rows = diameter_rows(&moduli, spec.kind)?;
    Ok(DiameterLimit { kind: spec.kind, verdict: diameter_verdict(spec.kind, &rows), rows })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TailCheck {
    pub p: u64,
    /// Supremum of the closed-form distance from `p` to the later moduli.
    pub tail_sup: Option<Rational>,
    pub qualifies: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EpsilonApproximation {
    pub epsilon: Rational,
    pub last_modulus: u64,
    pub qualifying: Option<u64>,
    pub evidence: Vec<TailCheck>,
}

/// Smallest `p` whose closed-form distance to every later modulus in the
/// sequence is below `epsilon`. The closed form grows with `q`, so the
/// supremum over the tail is the value at the last modulus.
pub fn epsilon_approximation(
    spec: &SequenceSpec,
    epsilon: &Rational,
    caps: &SizeCaps,
) -> Result<EpsilonApproximation> {
    if !epsilon.is_positive() {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    let moduli = generate_sequence(spec, caps)?;
    let last = *moduli.last().expect("nonempty sequence");
    let evidence = moduli
        .iter()
        .map(|&p| {
            if p == last {
                return Ok(TailCheck { p, tail_sup: None, qualifies: false });
            }
            let sup = closed_form_gh(spec.kind, p, last)?;
            Ok(TailCheck { p, qualifies: &sup < epsilon, tail_sup: Some(sup) })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EpsilonApproximation {
        epsilon: epsilon.clone(),
        last_modulus: last,
        qualifying: evidence.iter().find(|t| t.qualifies).map(|t| t.p),
        evidence,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OpGraphRow {
    pub p: u64,
    pub q: u64,
    /// Half the largest gap between squared distances under the lifted
    /// canonical correspondence.
    pub squared_bound: Rational,
    /// `sqrt(2 * squared_bound) / 2`, an upper bound on the unsquared
    /// distance, in floating point.
    pub real_upper_approx: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OpGraphReport {
    pub op: RingOp,
    pub rows: Vec<OpGraphRow>,
    pub non_increasing: bool,
    pub ends_below_start: bool,
}

/// Canonical correspondence between `Z/pZ` and `Z/qZ` lifted to the
/// operation graphs: `(n, m, n∘m) ~ (n', m', n'∘m')` whenever `n ~ n'` and
/// `m ~ m'`.
pub fn lifted_correspondence(
    x: &OperationGraph,
    y: &OperationGraph,
) -> Result<crate::gh::Correspondence> {
    let base = canonical_correspondence(x.modulus(), y.modulus())?;
    let pairs = base.pairs().iter().flat_map(|&(n, n2)| {
        base.pairs()
            .iter()
            .map(move |&(m, m2)| (x.index_of(n as u64, m as u64), y.index_of(n2 as u64, m2 as u64)))
    });
    crate::gh::Correspondence::new(x.len(), y.len(), pairs)
}

/// Distortion of the lifted correspondence on squared distances, in units
/// of `1 / lcm((p-1)^2, (q-1)^2)`.
fn lifted_squared_distortion(x: &OperationGraph, y: &OperationGraph) -> Result<Rational> {
    let c = lifted_correspondence(x, y)?;
    let (p1, q1) = ((x.modulus() - 1) as i128, (y.modulus() - 1) as i128);
    let den = (p1 * p1).lcm(&(q1 * q1));
    let (fx, fy) = (den / (p1 * p1), den / (q1 * q1));
    let coords: Vec<([i64; 3], [i64; 3])> = c
        .pairs()
        .iter()
        .map(|&(i, j)| {
            let (a, b, c) = x.triple(i);
            let (d, e, f) = y.triple(j);
            ([a as i64, b as i64, c as i64], [d as i64, e as i64, f as i64])
        })
        .collect();
    let sq = |u: &[i64; 3], v: &[i64; 3]| -> i128 {
        u.iter().zip(v).map(|(a, b)| ((a - b) * (a - b)) as i128).sum()
    };
    let mut worst = 0i128;
    for (k, (ux, uy)) in coords.iter().enumerate() {
        for (vx, vy) in &coords[k + 1..] {
            let gap = (sq(ux, vx) * fx - sq(uy, vy) * fy).abs();
            worst = worst.max(gap);
        }
    }
    Rational::new(worst, den as u128)
}

/// Squared upper bound between the operation graphs at `p` and `q`.
pub fn op_graph_bound(p: u64, q: u64, op: RingOp, caps: &SizeCaps) -> Result<Rational> {
    let x = operation_graph(p, op, caps)?;
    let y = operation_graph(q, op, caps)?;
    Ok(&lifted_squared_distortion(&x, &y)? * &Rational::frac(1, 2))
}

/// Lifted canonical bounds between successive operation graphs.
pub fn op_graph_convergence(spec: &SequenceSpec, op: RingOp, caps: &SizeCaps) -> Result<OpGraphReport> {
    let moduli = generate_sequence(spec, caps)?;
    if moduli.len() < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: moduli.len() });
    }
    let largest = *moduli.last().expect("nonempty");
    operation_graph(largest, op, caps)?;
    let rows = moduli
        .windows(2)
        .map(|w| {
            let bound = op_graph_bound(w[0], w[1], op, caps)?;
            let real = (2.0 * bound.to_f64()).sqrt() / 2.0;
            Ok(OpGraphRow { p: w[0], q: w[1], squared_bound: bound, real_upper_approx: real })
        })
        .collect::<Result<Vec<_>>>()?;
    let non_increasing = rows.windows(2).all(|w| w[1].squared_bound <= w[0].squared_bound);
    let ends_below_start =
        rows.last().expect("nonempty").squared_bound < rows[0].squared_bound;
    Ok(OpGraphReport { op, rows, non_increasing, ends_below_start })
}

impl OpGraphReport {
    pub fn to_csv(&self) -> Result<String> {
        write_csv(
            &["p", "q", "squared_bound", "real_upper_approx"],
            self.rows.iter().map(|r| {
                vec![
                    r.p.to_string(),
                    r.q.to_string(),
                    r.squared_bound.to_string(),
                    format!("{:.9}", r.real_upper_approx),
                ]
            }),
        )
    }
}
