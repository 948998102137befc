use serde::Serialize;

use super::sequence::{generate_sequence, SequenceSpec};
use crate::caps::SizeCaps;
use crate::error::{Error, Result};
use crate::rings::{reduce, ring_add, ring_mul, ResidueClass, RingOp};

/// An integer `n` carried as `[n]_p` in every ring of a sequence with
/// modulus above `n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilizedElement {
    anchor: u64,
    #[serde(skip)]
    sequence: Vec<u64>,
    #[serde(serialize_with = "pairs")]
    representation: Vec<ResidueClass>,
}

fn pairs<S: serde::Serializer>(v: &[ResidueClass], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|c| (c.modulus(), c.representative())))
}

impl StabilizedElement {
    pub fn over(anchor: u64, sequence: &[u64]) -> Result<Self> {
        let representation = sequence
            .iter()
            .filter(|&&p| p > anchor)
            .map(|&p| reduce(anchor as i128, p))
            .collect::<Result<Vec<_>>>()?;
        if representation.is_empty() {
            return Err(Error::NoAdmissibleModulus(anchor as u128));
        }
        Ok(StabilizedElement { anchor, sequence: sequence.to_vec(), representation })
    }

    pub fn anchor(&self) -> u64 {
        self.anchor
    }

    pub fn sequence(&self) -> &[u64] {
        &self.sequence
    }

    /// `[n]_p` for each modulus `p > n`, in sequence order.
    pub fn representation(&self) -> &[ResidueClass] {
        &self.representation
    }

    pub fn first_modulus(&self) -> u64 {
        self.representation[0].modulus()
    }

    pub fn at(&self, p: u64) -> Option<&ResidueClass> {
        self.representation.iter().find(|c| c.modulus() == p)
    }
}

pub fn make_stabilized(n: u64, spec: &SequenceSpec, caps: &SizeCaps) -> Result<StabilizedElement> {
    StabilizedElement::over(n, &generate_sequence(spec, caps)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OperationRow {
    pub p: u64,
    pub componentwise: u64,
    /// `p` does not exceed the result anchor, so wraparound may occur.
    pub below_tail: bool,
    pub agrees: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilizedOperation {
    pub op: RingOp,
    pub result: StabilizedElement,
    /// One row per modulus where both operands are represented.
    pub rows: Vec<OperationRow>,
}

impl StabilizedOperation {
    /// Componentwise results equal the anchor on every modulus above it.
    pub fn commutes_on_tail(&self) -> bool {
        self.rows.iter().filter(|r| !r.below_tail).all(|r| r.agrees)
    }
}

fn combine(a: &StabilizedElement, b: &StabilizedElement, op: RingOp) -> Result<StabilizedOperation> {
    if a.sequence != b.sequence {
        return Err(Error::DimensionMismatch("stabilized elements over different sequences".into()));
    }
    let anchor = match op {
        RingOp::Add => a.anchor.checked_add(b.anchor),
        RingOp::Mul => a.anchor.checked_mul(b.anchor),
    }
    .ok_or_else(|| Error::InvalidArgument(format!("anchor of {} overflows", op.name())))?;
    let result = StabilizedElement::over(anchor, &a.sequence)?;
    let mut rows = Vec::new();
    for x in &a.representation {
        let Some(y) = b.at(x.modulus()) else { continue };
        let c = match op {
            RingOp::Add => ring_add(x, y)?,
            RingOp::Mul => ring_mul(x, y)?,
        };
        rows.push(OperationRow {
            p: x.modulus(),
            componentwise: c.representative(),
            below_tail: x.modulus() <= anchor,
            agrees: c.representative() == anchor,
        });
    }
    Ok(StabilizedOperation { op, result, rows })
}

pub fn stabilized_add(a: &StabilizedElement, b: &StabilizedElement) -> Result<StabilizedOperation> {
    combine(a, b, RingOp::Add)
}

pub fn stabilized_mul(a: &StabilizedElement, b: &StabilizedElement) -> Result<StabilizedOperation> {
    combine(a, b, RingOp::Mul)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limits::sequence::{Extent, Family};
    use crate::rings::MetricKind;

    #[test]
    fn make_examples() {
        let caps = SizeCaps::default();
        let spec = SequenceSpec::new(Family::Primes, 5, Extent::UpTo(50), MetricKind::Raw);
        let e = make_stabilized(3, &spec, &caps).unwrap();
        assert_eq!(e.first_modulus(), 5);
        assert!(e.representation().iter().all(|c| c.representative() == 3));

        let z = make_stabilized(0, &spec, &caps).unwrap();
        assert!(z.representation().iter().all(|c| c.representative() == 0));
        assert_eq!(z.representation().len(), e.representation().len());

        let small = SequenceSpec::primes(Extent::UpTo(7), MetricKind::Raw);
        assert_eq!(make_stabilized(10, &small, &caps), Err(Error::NoAdmissibleModulus(10)));
    }

    #[test]
    fn operation_examples() {
        let seq: Vec<u64> = vec![3, 5, 7, 11, 13];
        let two = StabilizedElement::over(2, &seq).unwrap();
        let three = StabilizedElement::over(3, &seq).unwrap();

        let s = stabilized_add(&two, &three).unwrap();
        assert_eq!(s.result.anchor(), 5);
        assert_eq!(s.result.first_modulus(), 7);
        assert!(s.commutes_on_tail());
        assert!(s.rows.iter().filter(|r| r.p > 5).all(|r| r.componentwise == 5));

        let m = stabilized_mul(&two, &three).unwrap();
        assert_eq!(m.result.anchor(), 6);
        assert!(m.commutes_on_tail());

        let four = StabilizedElement::over(4, &seq).unwrap();
        let s = stabilized_add(&four, &four).unwrap();
        let at7 = s.rows.iter().find(|r| r.p == 7).unwrap();
        assert_eq!(at7.componentwise, 1);
        assert!(at7.below_tail && !at7.agrees);
        assert!(s.commutes_on_tail());
        assert_eq!(s.result.first_modulus(), 11);
    }

    #[test]
    fn mismatched_or_unreachable() {
        let a = StabilizedElement::over(2, &[3, 5]).unwrap();
        let b = StabilizedElement::over(2, &[3, 7]).unwrap();
        assert!(stabilized_add(&a, &b).is_err());
        let c = StabilizedElement::over(4, &[3, 5]).unwrap();
        assert_eq!(stabilized_mul(&c, &c), Err(Error::NoAdmissibleModulus(16)));
    }
}
