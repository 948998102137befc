use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::sieve::primes_between;
use crate::caps::SizeCaps;
use crate::error::{Error, Result};
use crate::rings::MetricKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    AllIntegers,
    Primes,
    /// Primes `≡ b (mod a)`.
    Dirichlet { a: u64, b: u64 },
}

/// How far a sequence runs: a number of terms or a largest modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Extent {
    Count(u64),
    UpTo(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceSpec {
    #[serde(flatten)]
    pub family: Family,
    pub start: u64,
    pub extent: Extent,
    pub kind: MetricKind,
}

impl SequenceSpec {
    pub fn new(family: Family, start: u64, extent: Extent, kind: MetricKind) -> Self {
        SequenceSpec { family, start, extent, kind }
    }

    pub fn primes(extent: Extent, kind: MetricKind) -> Self {
        Self::new(Family::Primes, 2, extent, kind)
    }

    pub fn integers(start: u64, extent: Extent, kind: MetricKind) -> Self {
        Self::new(Family::AllIntegers, start, extent, kind)
    }

    pub fn with_kind(self, kind: MetricKind) -> Self {
        SequenceSpec { kind, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if let Family::Dirichlet { a, b } = self.family {
            if a == 0 {
                return Err(Error::InvalidArgument("progression step must be positive".into()));
            }
            if a.gcd(&b) != 1 {
                return Err(Error::InvalidArgument(format!(
                    "progression {a}n+{b} needs gcd({a}, {b}) = 1"
                )));
            }
        }
        if self.extent == Extent::Count(0) {
            return Err(Error::InvalidArgument("sequence count must be positive".into()));
        }
        Ok(())
    }

    fn accepts(&self, n: u64) -> bool {
        match self.family {
            Family::AllIntegers | Family::Primes => true,
            Family::Dirichlet { a, b } => n % a == b % a,
        }
    }
}

/// Moduli of the sequence, strictly increasing and all at least 2.
pub fn generate_sequence(spec: &SequenceSpec, caps: &SizeCaps) -> Result<Vec<u64>> {
    spec.validate()?;
    let lo = spec.start.max(2);
    let limit = caps.sieve_limit;
    let out = match (spec.family, spec.extent) {
        (Family::AllIntegers, Extent::Count(n)) => {
            if n > limit {
                return Err(Error::cap("sequence length", n, limit));
            }
            (lo..lo + n).collect()
        }
        (Family::AllIntegers, Extent::UpTo(hi)) => {
            if hi > limit {
                return Err(Error::cap("sequence bound", hi, limit));
            }
            (lo..=hi).collect()
        }
        (_, Extent::UpTo(hi)) => {
            if hi > limit {
                return Err(Error::cap("sieve bound", hi, limit));
            }
            primes_between(lo, hi).into_iter().filter(|&p| spec.accepts(p)).collect()
        }
        (_, Extent::Count(n)) => {
            let mut hi = lo.saturating_mul(2).max(64).min(limit);
            loop {
                let mut found: Vec<u64> =
                    primes_between(lo, hi).into_iter().filter(|&p| spec.accepts(p)).collect();
                if found.len() as u64 >= n {
                    found.truncate(n as usize);
                    break found;
                }
                if hi >= limit {
                    return Err(Error::cap("sieve bound", hi.saturating_add(1), limit));
                }
                hi = hi.saturating_mul(2).min(limit);
            }
        }
    };
    if out.is_empty() {
        return Err(Error::Empty("sequence has no terms"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limits::sieve::is_prime_trial;

    fn gen(spec: SequenceSpec) -> Vec<u64> {
        generate_sequence(&spec, &SizeCaps::default()).unwrap()
    }

    #[test]
    fn examples() {
        let raw = MetricKind::Raw;
        assert_eq!(gen(SequenceSpec::primes(Extent::Count(5), raw)), vec![2, 3, 5, 7, 11]);
        assert_eq!(gen(SequenceSpec::integers(2, Extent::Count(3), raw)), vec![2, 3, 4]);
        assert_eq!(gen(SequenceSpec::integers(0, Extent::UpTo(4), raw)), vec![2, 3, 4]);
        let d = SequenceSpec::new(Family::Dirichlet { a: 4, b: 1 }, 2, Extent::Count(4), raw);
        assert_eq!(gen(d), vec![5, 13, 17, 29]);
        let d = SequenceSpec::new(Family::Dirichlet { a: 4, b: 3 }, 2, Extent::Count(4), raw);
        assert_eq!(gen(d), vec![3, 7, 11, 19]);
    }

    #[test]
    fn dirichlet_against_trial_division() {
        for (a, b) in [(4, 1), (4, 3), (6, 5), (10, 7), (3, 2)] {
            let spec =
                SequenceSpec::new(Family::Dirichlet { a, b }, 2, Extent::UpTo(5_000), MetricKind::Raw);
            let want: Vec<u64> = (2..=5_000).filter(|&n| is_prime_trial(n) && n % a == b).collect();
            assert_eq!(gen(spec), want);
        }
    }

    #[test]
    fn count_grows_past_start() {
        let spec = SequenceSpec::new(Family::Primes, 1_000, Extent::Count(3), MetricKind::Raw);
        assert_eq!(gen(spec), vec![1009, 1013, 1019]);
    }

    #[test]
    fn invalid_specs() {
        let caps = SizeCaps::default();
        let raw = MetricKind::Raw;
        let bad = SequenceSpec::new(Family::Dirichlet { a: 4, b: 2 }, 2, Extent::Count(3), raw);
        assert!(matches!(generate_sequence(&bad, &caps), Err(Error::InvalidArgument(_))));
        let zero = SequenceSpec::primes(Extent::Count(0), raw);
        assert!(generate_sequence(&zero, &caps).is_err());
        let empty = SequenceSpec::primes(Extent::UpTo(1), raw);
        assert!(generate_sequence(&empty, &caps).is_err());
        let tight = SizeCaps { sieve_limit: 100, ..caps };
        let far = SequenceSpec::primes(Extent::Count(1_000), raw);
        assert!(matches!(generate_sequence(&far, &tight), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn spec_round_trips_through_json() {
        let spec = SequenceSpec::new(
            Family::Dirichlet { a: 4, b: 1 },
            5,
            Extent::UpTo(100),
            MetricKind::SquaredNormalized,
        );
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<SequenceSpec>(&text).unwrap(), spec);
    }
}
