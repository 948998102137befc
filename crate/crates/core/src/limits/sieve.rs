//! Segmented sieve of Eratosthenes.

const SEGMENT: u64 = 1 << 16;

fn small_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// Primes in `[lo, hi]`, ascending.
pub fn primes_between(lo: u64, hi: u64) -> Vec<u64> {
    let lo = lo.max(2);
    if hi < lo {
        return Vec::new();
    }
    let base = small_primes(hi.isqrt());
    let mut out = Vec::new();
    let mut seg_lo = lo;
    let mut composite = vec![false; SEGMENT as usize];
    while seg_lo <= hi {
        let seg_hi = hi.min(seg_lo + SEGMENT - 1);
        let len = (seg_hi - seg_lo + 1) as usize;
        composite[..len].fill(false);
        for &q in &base {
            if q * q > seg_hi {
                break;
            }
            let mut m = (seg_lo.div_ceil(q) * q).max(q * q);
            while m <= seg_hi {
                composite[(m - seg_lo) as usize] = true;
                m += q;
            }
        }
        out.extend((0..len).filter(|&i| !composite[i]).map(|i| seg_lo + i as u64));
        seg_lo = seg_hi + 1;
    }
    out
}

pub fn primes_up_to(limit: u64) -> Vec<u64> {
    primes_between(2, limit)
}

pub fn is_prime_trial(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}
