use std::cmp::Ordering;

use serde::Serialize;

use super::sequence::{generate_sequence, SequenceSpec};
use crate::caps::SizeCaps;
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::rings::{circle_angle_units, compare, reduce};

/// Value of the characteristic order function `f([m],[n])_p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Characteristic {
    /// `[m] > [n]`
    One,
    /// `[m] < [n]`
    Zero,
    /// `[m] = [n]`, where both branches of the definition apply.
    Eq,
}

impl Characteristic {
    pub fn as_str(self) -> &'static str {
        match self {
            Characteristic::One => "1",
            Characteristic::Zero => "0",
            Characteristic::Eq => "EQ",
        }
    }
}

/// `f([m],[n])_p`, comparing canonical representatives in `Z/pZ`.
pub fn characteristic(n: u64, m: u64, p: u64) -> Result<Characteristic> {
    let a = reduce(m as i128, p)?;
    let b = reduce(n as i128, p)?;
    Ok(match compare(&a, &b)? {
        Ordering::Greater => Characteristic::One,
        Ordering::Less => Characteristic::Zero,
        Ordering::Equal => Characteristic::Eq,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrderRecord {
    pub n: u64,
    pub m: u64,
    /// Smallest modulus in the sequence exceeding `max(n, m)`.
    pub first_modulus: u64,
    pub value: Characteristic,
    pub evaluated: usize,
    /// Moduli above `max(n, m)` where the value differs from the first one.
    pub flips: Vec<u64>,
}

impl OrderRecord {
    pub fn stable(&self) -> bool {
        self.flips.is_empty()
    }
}

/// Evaluates `f([m],[n])_p` on every modulus above `max(n, m)`.
pub fn order_stability_over(n: u64, m: u64, moduli: &[u64]) -> Result<OrderRecord> {
    let top = n.max(m);
    let admissible: Vec<u64> = moduli.iter().copied().filter(|&p| p > top).collect();
    let Some(&first_modulus) = admissible.first() else {
        return Err(Error::NoAdmissibleModulus(top as u128));
    };
    let value = characteristic(n, m, first_modulus)?;
    let mut flips = Vec::new();
    for &p in &admissible[1..] {
        if characteristic(n, m, p)? != value {
            flips.push(p);
        }
    }
    Ok(OrderRecord { n, m, first_modulus, value, evaluated: admissible.len(), flips })
}

pub fn order_stability(n: u64, m: u64, spec: &SequenceSpec, caps: &SizeCaps) -> Result<OrderRecord> {
    order_stability_over(n, m, &generate_sequence(spec, caps)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LimitProbe {
    pub value: Rational,
    /// First `p` of the tail that stays within ε of `value`.
    pub from: u64,
}

fn probe_tail(samples: &[(u64, Rational)], epsilon: &Rational, value: &Rational) -> Option<LimitProbe> {
    let close = |v: &Rational| &(v - value).abs() < epsilon;
    let start = match samples.iter().rposition(|(_, v)| !close(v)) {
        None => 0,
        Some(i) => i + 1,
    };
    // a tail needs at least two samples to say anything
    (samples.len() >= start + 2).then(|| LimitProbe { value: value.clone(), from: samples[start].0 })
}

fn check_samples(samples: &[(u64, Rational)], epsilon: &Rational) -> Result<()> {
    if samples.is_empty() {
        return Err(Error::Empty("limit probe without samples"));
    }
    if !epsilon.is_positive() {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    if samples.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(Error::InvalidArgument("samples must be strictly ordered by p".into()));
    }
    Ok(())
}

/// The final sample value, if some tail of at least two samples stays
/// within ε of it.
pub fn limit_function_probe(samples: &[(u64, Rational)], epsilon: &Rational) -> Result<Option<LimitProbe>> {
    check_samples(samples, epsilon)?;
    let last = samples.last().expect("nonempty").1.clone();
    Ok(probe_tail(samples, epsilon, &last))
}

/// Like [`limit_function_probe`], against a proposed limit value.
pub fn limit_function_probe_towards(
    samples: &[(u64, Rational)],
    epsilon: &Rational,
    value: &Rational,
) -> Result<Option<LimitProbe>> {
    check_samples(samples, epsilon)?;
    Ok(probe_tail(samples, epsilon, value))
}

/// Largest gap, as a fraction of a turn, between consecutive images of
/// `Z/pZ` on the unit circle.
pub fn embedding_density(p: u64) -> Result<Rational> {
    if p < 2 {
        return Err(Error::InvalidModulus(p as i128));
    }
    let mut units: Vec<u64> = (0..p as i128)
        .map(|n| reduce(n, p).map(|c| circle_angle_units(&c)))
        .collect::<Result<_>>()?;
    units.sort_unstable();
    let wrap = p - units.last().expect("p >= 2") + units[0];
    let widest = units.windows(2).map(|w| w[1] - w[0]).fold(wrap, u64::max);
    Rational::new(widest, p)
}
