//! ε-nets in normalized rings and uniform total-boundedness certificates.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gh::canonical_image;
use crate::rational::Rational;
use crate::report::write_csv;
use crate::rings::{make_ring, MetricKind, ResidueClass};

/// A net in `(Z/p'Z, normalized)` with its exact covering radius.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EpsilonNet {
    pub modulus: u64,
    #[serde(serialize_with = "reps")]
    pub points: Vec<ResidueClass>,
    /// The radius the construction guarantees, `1/(k-1)`.
    pub epsilon: Rational,
    /// The covering radius actually achieved.
    pub radius: Rational,
}

fn reps<S: serde::Serializer>(v: &[ResidueClass], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|c| c.representative()))
}

impl EpsilonNet {
    pub fn size(&self) -> usize {
        self.points.len()
    }
}

fn check_net_args(p_prime: u64, k: u64) -> Result<()> {
    if p_prime < 2 {
        return Err(Error::InvalidModulus(p_prime as i128));
    }
    if k < 2 || k > p_prime {
        return Err(Error::InvalidArgument(format!(
            "net size {k} must lie in 2..={p_prime}"
        )));
    }
    Ok(())
}

/// The `k` classes `round(i (p'-1)/(k-1))`, `i = 0..k`, both endpoints
/// included. With `k = p'` this is the whole ring.
pub fn equidistant_net(p_prime: u64, k: u64) -> Result<EpsilonNet> {
    check_net_args(p_prime, k)?;
    let ring = make_ring(p_prime, MetricKind::Normalized)?;
    let reps: Vec<u64> = (0..k).map(|i| canonical_image(i, k, p_prime)).collect();
    let radius = ring.line_covering_radius(&reps)?;
    Ok(EpsilonNet {
        modulus: p_prime,
        points: reps.iter().map(|&r| ring.class(r as i128)).collect(),
        epsilon: radius_bound(p_prime, k)?,
        radius,
    })
}

/// `1/(k-1)`, the covering radius an equidistant `k`-point net never exceeds.
pub fn radius_bound(p_prime: u64, k: u64) -> Result<Rational> {
    check_net_args(p_prime, k)?;
    Rational::from(k - 1).recip()
}

/// `N(ε) = ⌈1/ε⌉ + 1`, the smallest `k ≥ 2` with `1/(k-1) ≤ ε`.
pub fn net_size_for(epsilon: &Rational) -> Result<u64> {
    if !epsilon.is_positive() {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    let k = epsilon.recip()?.ceil() + num_bigint::BigInt::from(1);
    let k: u64 = k
        .try_into()
        .map_err(|_| Error::InvalidArgument(format!("net size for {epsilon} overflows")))?;
    Ok(k.max(2))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CellStatus {
    Verified { net_size: u64, radius: Rational },
    /// `p < N(ε)`: the ring is too small to host the net.
    Excluded,
    Failed { net_size: u64, radius: Rational },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertificateCell {
    pub p: u64,
    pub epsilon: Rational,
    /// `1/(p-1) < ε`, membership in the tail class for this ε.
    pub in_class: bool,
    #[serde(flatten)]
    pub status: CellStatus,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NetSizeEntry {
    pub epsilon: Rational,
    pub net_size: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UtbCertificate {
    /// Largest diameter over the range.
    pub delta: Rational,
    /// Largest tabulated ε; members are the `p` with `1/(p-1) < epsilon0`.
    pub epsilon0: Rational,
    pub table: Vec<NetSizeEntry>,
    pub cells: Vec<CertificateCell>,
}

impl UtbCertificate {
    /// Every cell either verified or legitimately excluded, and `delta == 1`.
    pub fn holds(&self) -> bool {
        self.delta == Rational::one()
            && self.cells.iter().all(|c| !matches!(c.status, CellStatus::Failed { .. }))
    }

    pub fn excluded(&self, epsilon: &Rational) -> Vec<u64> {
        self.cells
            .iter()
            .filter(|c| &c.epsilon == epsilon && c.status == CellStatus::Excluded)
            .map(|c| c.p)
            .collect()
    }

    pub fn to_csv(&self) -> Result<String> {
        write_csv(
            &["p", "epsilon", "in_class", "status", "net_size", "radius"],
            self.cells.iter().map(|c| {
                let (status, size, radius) = match &c.status {
                    CellStatus::Verified { net_size, radius } => {
                        ("verified", net_size.to_string(), radius.to_string())
                    }
                    CellStatus::Excluded => ("excluded", String::new(), String::new()),
                    CellStatus::Failed { net_size, radius } => {
                        ("failed", net_size.to_string(), radius.to_string())
                    }
                };
                vec![
                    c.p.to_string(),
                    c.epsilon.to_string(),
                    c.in_class.to_string(),
                    status.to_string(),
                    size,
                    radius,
                ]
            }),
        )
    }
}

/// Checks the normalized diameter bound and, for each ε, that the
/// equidistant net of size `N(ε)` covers every ring in the range that is
/// large enough to hold it.
pub fn utb_certificate(p_range: &[u64], epsilons: &[Rational]) -> Result<UtbCertificate> {
    if p_range.is_empty() {
        return Err(Error::Empty("certificate over an empty range"));
    }
    if epsilons.is_empty() {
        return Err(Error::Empty("certificate with no epsilons"));
    }
    let rings = p_range
        .iter()
        .map(|&p| make_ring(p, MetricKind::Normalized))
        .collect::<Result<Vec<_>>>()?;
    let table = epsilons
        .iter()
        .map(|e| Ok(NetSizeEntry { epsilon: e.clone(), net_size: net_size_for(e)? }))
        .collect::<Result<Vec<_>>>()?;
    let delta = rings.iter().map(|r| r.line_diameter()).max().expect("nonempty range");
    let epsilon0 = epsilons.iter().max().expect("nonempty").clone();

    let jobs: Vec<(u64, &NetSizeEntry)> =
        p_range.iter().flat_map(|&p| table.iter().map(move |t| (p, t))).collect();
    let cells = jobs
        .par_iter()
        .map(|&(p, entry)| {
            let in_class = Rational::from(p - 1).recip()? < entry.epsilon;
            let status = if p < entry.net_size {
                CellStatus::Excluded
            } else {
                let net = equidistant_net(p, entry.net_size)?;
                if net.radius <= entry.epsilon && net.size() as u64 <= entry.net_size {
                    CellStatus::Verified { net_size: entry.net_size, radius: net.radius }
                } else {
                    CellStatus::Failed { net_size: entry.net_size, radius: net.radius }
                }
            };
            Ok(CertificateCell { p, epsilon: entry.epsilon.clone(), in_class, status })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(UtbCertificate { delta, epsilon0, table, cells })
}
