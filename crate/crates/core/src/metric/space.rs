use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{common_scale, MetricSpace};
use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Entries {
    /// entry = numer / den
    Scaled { den: u64, numer: Vec<i64> },
    Exact(Vec<Rational>),
}

/// A dense, labeled distance matrix.
///
/// Construction only checks shape and label uniqueness; use
/// [`validate_metric`](super::validate_metric) for the metric axioms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    entries: Entries,
    squared: bool,
}

#[derive(Serialize, Deserialize)]
struct Wire {
    labels: Vec<String>,
    dist: Vec<Vec<Rational>>,
    squared: bool,
}

impl FiniteMetricSpace {
    pub fn new(labels: Vec<String>, dist: Vec<Vec<Rational>>, squared: bool) -> Result<Self> {
        let n = labels.len();
        if dist.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{} labels but {} matrix rows",
                n,
                dist.len()
            )));
        }
        if let Some((i, row)) = dist.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "row {} has {} entries, expected {}",
                i,
                row.len(),
                n
            )));
        }
        check_labels(&labels)?;
        let flat: Vec<Rational> = dist.into_iter().flatten().collect();
        let entries = match common_scale(flat.iter()) {
            Some((den, numer)) => Entries::Scaled { den, numer },
            None => Entries::Exact(flat),
        };
        Ok(FiniteMetricSpace { labels, entries, squared })
    }

    /// Builds from integer numerators over a shared denominator.
    pub(crate) fn from_scaled(
        labels: Vec<String>,
        den: u64,
        numer: Vec<i64>,
        squared: bool,
    ) -> Result<Self> {
        let n = labels.len();
        if numer.len() != n * n {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for {} labels",
                numer.len(),
                n
            )));
        }
        if den == 0 {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        check_labels(&labels)?;
        Ok(FiniteMetricSpace { labels, entries: Entries::Scaled { den, numer }, squared })
    }

    pub(crate) fn from_exact(labels: Vec<String>, flat: Vec<Rational>, squared: bool) -> Result<Self> {
        let n = labels.len();
        let dist = flat.chunks(n.max(1)).map(|c| c.to_vec()).collect::<Vec<_>>();
        let dist = if n == 0 { Vec::new() } else { dist };
        Self::new(labels, dist, squared)
    }

    /// Dense copy of any metric space.
    pub fn materialize<S: MetricSpace + ?Sized>(s: &S) -> Result<Self> {
        let n = s.len();
        let labels: Vec<String> = (0..n).map(|i| s.label(i)).collect();
        if let Some(den) = s.common_denominator() {
            let numer: Option<Vec<i64>> = (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .map(|(i, j)| s.scaled_distance(i, j))
                .collect();
            if let Some(numer) = numer {
                return Self::from_scaled(labels, den, numer, s.is_squared());
            }
        }
        let flat = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| s.distance(i, j));
        Self::from_exact(labels, flat.collect(), s.is_squared())
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn matrix(&self) -> Vec<Vec<Rational>> {
        let n = self.len();
        (0..n).map(|i| (0..n).map(|j| self.distance(i, j)).collect()).collect()
    }

    /// A copy with every distance multiplied by `c`.
    pub fn scaled_by(&self, c: &Rational) -> Self {
        let n = self.len();
        let flat = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| &self.distance(i, j) * c)
            .collect();
        Self::from_exact(self.labels.clone(), flat, self.squared).expect("same shape")
    }

    /// A copy with points reordered: point `k` of the result is point
    /// `order[k]` of `self`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let n = self.len();
        let mut seen = vec![false; n];
        if order.len() != n {
            return Err(Error::DimensionMismatch("permutation length".into()));
        }
        for &o in order {
            super::check_index(o, n)?;
            if std::mem::replace(&mut seen[o], true) {
                return Err(Error::InvalidArgument("not a permutation".into()));
            }
        }
        let labels = order.iter().map(|&o| self.labels[o].clone()).collect();
        let flat = order
            .iter()
            .flat_map(|&a| order.iter().map(move |&b| (a, b)))
            .map(|(a, b)| self.distance(a, b))
            .collect();
        Self::from_exact(labels, flat, self.squared)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(Wire {
            labels: self.labels.clone(),
            dist: self.matrix(),
            squared: self.squared,
        })
        .expect("plain data")
    }

    pub fn to_json(&self) -> String {
        self.to_json_value().to_string()
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let w: Wire = serde_json::from_str(s)?;
        Self::new(w.labels, w.dist, w.squared)
    }

    pub fn from_json_value(v: &serde_json::Value) -> Result<Self> {
        let w: Wire = serde_json::from_value(v.clone())?;
        Self::new(w.labels, w.dist, w.squared)
    }
}

fn check_labels(labels: &[String]) -> Result<()> {
    let mut seen = HashSet::with_capacity(labels.len());
    for l in labels {
        if !seen.insert(l.as_str()) {
            return Err(Error::DuplicateLabel(l.clone()));
        }
    }
    Ok(())
}

impl MetricSpace for FiniteMetricSpace {
    fn len(&self) -> usize {
        self.labels.len()
    }

    fn label(&self, i: usize) -> String {
        self.labels[i].clone()
    }

    fn is_squared(&self) -> bool {
        self.squared
    }

    fn distance(&self, i: usize, j: usize) -> Rational {
        let n = self.len();
        match &self.entries {
            Entries::Scaled { den, numer } => {
                Rational::new(numer[i * n + j], *den).expect("nonzero denominator")
            }
            Entries::Exact(v) => v[i * n + j].clone(),
        }
    }

    fn common_denominator(&self) -> Option<u64> {
        match &self.entries {
            Entries::Scaled { den, .. } => Some(*den),
            Entries::Exact(_) => None,
        }
    }

    fn scaled_distance(&self, i: usize, j: usize) -> Option<i64> {
        match &self.entries {
            Entries::Scaled { numer, .. } => Some(numer[i * self.len() + j]),
            Entries::Exact(_) => None,
        }
    }
}
