//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits nonzero if any fails.

use std::time::{Duration, Instant};

use quotient_metric::gh::{
    canonical_upper_bound, closed_form_gh_raw, distortion, gh_exact, gh_lower_bound, Correspondence,
};
use quotient_metric::limits::sieve::primes_up_to;
use quotient_metric::limits::{
    cauchy_diagnostics, characteristic, diameter_limit, embedding_density, op_graph_bound,
    op_graph_convergence, order_stability_over, stabilized_add, stabilized_mul, Characteristic,
    DiameterVerdict, Extent, Family, SequenceSpec, StabilizedElement,
};
use quotient_metric::metric::{
    covering_radius, diameter, hausdorff_distance, min_positive_distance, AmbientPointSet,
    FiniteMetricSpace, MetricSpace,
};
use quotient_metric::nets::{equidistant_net, utb_certificate, CellStatus};
use quotient_metric::rings::{make_ring, MetricKind, QuotientRingSpace, RingOp};
use quotient_metric::{Error, Rational, SizeCaps};

type Check = Result<String, String>;
type Criterion = (&'static str, u64, fn() -> Check);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: Error) -> String {
    e.to_string()
}

fn c1_metric_properties() -> Check {
    for p in 2..=200u64 {
        let raw = make_ring(p, MetricKind::Raw).map_err(err)?;
        let norm = make_ring(p, MetricKind::Normalized).map_err(err)?;
        let d = diameter(&raw).map_err(err)?;
        ensure(d == Rational::from(p - 1), || format!("diam Z/{p}Z = {d}"))?;
        let m = min_positive_distance(&raw).map_err(err)?;
        ensure(m == Rational::one(), || format!("min distance in Z/{p}Z = {m}"))?;
        let nd = diameter(&norm).map_err(err)?;
        ensure(nd == Rational::one(), || format!("normalized diam Z/{p}Z = {nd}"))?;
    }
    Ok("p = 2..200: diam = p-1, min distance = 1, normalized diam = 1".into())
}

fn c2_hausdorff() -> Check {
    let images: Vec<AmbientPointSet> =
        (0..=100u64).map(|p| AmbientPointSet::ring_image(p.max(2))).collect::<Result<_, _>>().map_err(err)?;
    for p1 in 2..=100u64 {
        for p2 in 2..=100u64 {
            let h = hausdorff_distance(&images[p1 as usize], &images[p2 as usize]).map_err(err)?;
            ensure(h == Rational::from(p1.abs_diff(p2)), || format!("d_H({p1}, {p2}) = {h}"))?;
        }
    }
    Ok("9801 pairs with d_H = |p1 - p2|".into())
}

fn raw(p: u64) -> QuotientRingSpace {
    make_ring(p, MetricKind::Raw).expect("valid modulus")
}

fn exact(x: &(dyn MetricSpace + Sync), y: &(dyn MetricSpace + Sync)) -> Result<Rational, String> {
    let e = gh_exact(&x, &y, &SizeCaps::default()).map_err(err)?;
    ensure(e.exact, || "search budget exhausted".into())?;
    Ok(e.upper)
}

fn c3_gh_sandwich() -> Check {
    let mut table = vec![vec![Rational::zero(); 11]; 11];
    for p in 2..=10u64 {
        for q in 2..=10u64 {
            let (x, y) = (raw(p), raw(q));
            let lower = gh_lower_bound(&x, &y).map_err(err)?;
            let value = exact(&x, &y)?;
            let canon = canonical_upper_bound(p, q, MetricKind::Raw).map_err(err)?;
            let cap = canon.clone().min(Rational::from(p.abs_diff(q)));
            ensure(lower <= value && value <= cap, || {
                format!("({p},{q}): lower {lower}, exact {value}, canonical {canon}")
            })?;
            if p == q {
                ensure(value.is_zero(), || format!("gh(Z/{p}Z, Z/{p}Z) = {value}"))?;
            }
            // rotated and reversed point order
            let order: Vec<usize> = (0..p as usize).rev().map(|i| (i + 1) % p as usize).collect();
            let permuted = FiniteMetricSpace::materialize(&x).map_err(err)?.permuted(&order).map_err(err)?;
            let again = exact(&permuted, &y)?;
            ensure(again == value, || format!("({p},{q}) changes under permutation: {again} vs {value}"))?;
            table[p as usize][q as usize] = value;
        }
    }
    for a in 2..=7 {
        for b in 2..=7 {
            for c in 2..=7 {
                let lhs = &table[a][c];
                let rhs = &table[a][b] + &table[b][c];
                ensure(lhs <= &rhs, || format!("triangle ({a},{b},{c}): {lhs} > {rhs}"))?;
            }
        }
    }
    Ok("81 pairs sandwiched, identity 0, 216 triangles, permutation invariant".into())
}

/// Minimum distortion over every subset of X×Y covering both sides.
fn enumerate_gh(x: &(dyn MetricSpace + Sync), y: &(dyn MetricSpace + Sync)) -> Rational {
    let cells: Vec<(usize, usize)> =
        (0..x.len()).flat_map(|i| (0..y.len()).map(move |j| (i, j))).collect();
    let mut best: Option<Rational> = None;
    for mask in 1u32..(1 << cells.len()) {
        let chosen: Vec<(usize, usize)> =
            (0..cells.len()).filter(|k| mask >> k & 1 == 1).map(|k| cells[k]).collect();
        let Ok(c) = Correspondence::new(x.len(), y.len(), chosen) else { continue };
        let d = distortion(&c, &x, &y).expect("same kind");
        if best.as_ref().is_none_or(|b| &d < b) {
            best = Some(d);
        }
    }
    &best.expect("some correspondence") * &Rational::frac(1, 2)
}

fn c4_closed_form_discrepancy() -> Check {
    let (x, y) = (raw(2), raw(3));
    let enumerated = enumerate_gh(&x, &y);
    let searched = exact(&x, &y)?;
    let formula = closed_form_gh_raw(2, 3).map_err(err)?;
    ensure(enumerated == Rational::frac(1, 2), || format!("enumeration gives {enumerated}"))?;
    ensure(searched == enumerated, || format!("search gives {searched}"))?;
    ensure(formula == Rational::one(), || format!("closed form gives {formula}"))?;
    Ok(format!("Z/2Z vs Z/3Z: exact {searched} (enumerated {enumerated}), closed form |p-q| = {formula}"))
}

fn c5_nets() -> Check {
    let mut nets = 0u64;
    for p in 2..=500u64 {
        for k in 2..=p {
            let net = equidistant_net(p, k).map_err(err)?;
            let bound = Rational::from(k - 1).recip().map_err(err)?;
            ensure(net.radius <= bound, || format!("p'={p} k={k}: radius {} > {bound}", net.radius))?;
            nets += 1;
        }
    }
    // the line-gap radius against a full scan on the smaller rings
    for p in 2..=60u64 {
        let ring = make_ring(p, MetricKind::Normalized).map_err(err)?;
        for k in 2..=p {
            let net = equidistant_net(p, k).map_err(err)?;
            let idx: Vec<usize> = net.points.iter().map(|c| c.representative() as usize).collect();
            let scanned = covering_radius(&ring, &idx).map_err(err)?;
            ensure(scanned == net.radius, || format!("p'={p} k={k}: scan {scanned} vs {}", net.radius))?;
        }
    }
    Ok(format!("{nets} nets within 1/(k-1)"))
}

fn c6_certificate() -> Check {
    let primes = primes_up_to(1_000);
    let eps = [Rational::frac(1, 2), Rational::frac(1, 4), Rational::frac(1, 10)];
    let cert = utb_certificate(&primes, &eps).map_err(err)?;
    ensure(cert.delta == Rational::one(), || format!("delta = {}", cert.delta))?;
    ensure(cert.holds(), || "a net check failed".into())?;
    let mut boundary = Vec::new();
    for e in &eps {
        let excluded = cert.excluded(e);
        let too_small: Vec<u64> = primes
            .iter()
            .copied()
            .filter(|&p| Rational::from(p - 1).recip().unwrap() > *e)
            .collect();
        ensure(excluded == too_small, || format!("ε={e}: excluded {excluded:?}, expected {too_small:?}"))?;
        for cell in cert.cells.iter().filter(|c| &c.epsilon == e) {
            let member = Rational::from(cell.p - 1).recip().unwrap() < *e;
            ensure(cell.in_class == member, || format!("ε={e} p={}: class flag wrong", cell.p))?;
            if member {
                ensure(matches!(cell.status, CellStatus::Verified { .. }), || {
                    format!("ε={e} p={} is a member but not verified", cell.p)
                })?;
            } else if matches!(cell.status, CellStatus::Verified { .. }) {
                boundary.push(format!("p={} at ε={e}", cell.p));
            }
        }
    }
    Ok(format!(
        "delta = 1, {} cells, exclusions exactly p with 1/(p-1) > ε; verified on the boundary 1/(p-1) = ε: {}",
        cert.cells.len(),
        boundary.join(", ")
    ))
}

fn c7_prime_gaps() -> Check {
    let primes = primes_up_to(1_000_100);
    let mut worst = Rational::zero();
    let mut at = 0;
    for w in primes.windows(2) {
        if w[0] < 100_000 || w[0] >= 1_000_000 {
            continue;
        }
        let v = Rational::new(w[1] - w[0], w[0] - 1).map_err(err)?;
        if v > worst {
            worst = v;
            at = w[0];
        }
    }
    ensure(worst < Rational::frac(1, 100), || format!("gap ratio {worst} at {at}"))?;
    let spec = SequenceSpec::primes(Extent::UpTo(1_000_000), MetricKind::Normalized);
    let report = cauchy_diagnostics(&spec, &Rational::frac(1, 100), &SizeCaps::default()).map_err(err)?;
    let start = report.tail_start.ok_or("no Cauchy-like tail flagged")?;
    ensure(start <= 100_000, || format!("tail starts at {start}"))?;
    Ok(format!("max (next - p)/(p - 1) on [1e5, 1e6) = {worst} at p = {at}; tail from p = {start}"))
}

fn c8_squared_collapse() -> Check {
    let spec = SequenceSpec::primes(Extent::UpTo(10_000), MetricKind::SquaredNormalized);
    let d = diameter_limit(&spec, &SizeCaps::default()).map_err(err)?;
    for r in &d.rows {
        let want = Rational::from(r.p - 1).recip().map_err(err)?;
        ensure(r.diameter == want, || format!("p={}: {}", r.p, r.diameter))?;
    }
    ensure(d.rows.windows(2).all(|w| w[1].diameter < w[0].diameter), || "not strictly decreasing".into())?;
    let last = &d.rows.last().expect("rows").diameter;
    ensure(last < &Rational::frac(1, 9_000), || format!("final diameter {last}"))?;
    ensure(matches!(d.verdict, DiameterVerdict::TendsToZero { .. }), || format!("{:?}", d.verdict))?;
    // spot-check the line formula against a full scan
    for p in [2u64, 3, 5, 7, 11, 13, 97] {
        let full = diameter(&make_ring(p, MetricKind::SquaredNormalized).map_err(err)?).map_err(err)?;
        ensure(full == Rational::from(p - 1).recip().unwrap(), || format!("scan p={p}: {full}"))?;
    }
    Ok(format!("{} primes, strictly decreasing, last = {last}", d.rows.len()))
}

fn c9_order() -> Check {
    let moduli: Vec<u64> = (2..=1_000).collect();
    let mut evaluations = 0;
    for n in 0..=100u64 {
        for m in n + 1..=100 {
            let r = order_stability_over(n, m, &moduli).map_err(err)?;
            ensure(r.value == Characteristic::One && r.stable(), || {
                format!("f([{m}],[{n}]) = {:?}, flips at {:?}", r.value, r.flips)
            })?;
            ensure(r.evaluated == (1_000 - m) as usize, || format!("({n},{m}) evaluated {}", r.evaluated))?;
            evaluations += r.evaluated;
        }
    }
    ensure(characteristic(5, 5, 7).map_err(err)? == Characteristic::Eq, || "equality not EQ".into())?;
    Ok(format!("5050 pairs, {evaluations} evaluations, all 1"))
}

fn c10_operation_graphs() -> Check {
    let caps = SizeCaps::default().with_max_points(20_000);
    let spec = SequenceSpec::new(Family::Primes, 11, Extent::UpTo(101), MetricKind::Normalized);
    let r = op_graph_convergence(&spec, RingOp::Add, &caps).map_err(err)?;
    let (first, last) = (&r.rows[0], r.rows.last().expect("rows"));
    ensure((first.p, last.q) == (11, 101), || "wrong range".into())?;
    ensure(r.ends_below_start, || format!("end {} not below start {}", last.squared_bound, first.squared_bound))?;
    ensure(r.rows.iter().all(|row| row.squared_bound.is_positive()), || "zero bound with p != q".into())?;
    for p in [11u64, 13, 17, 19, 23] {
        let b = op_graph_bound(p, p, RingOp::Add, &caps).map_err(err)?;
        ensure(b.is_zero(), || format!("bound({p},{p}) = {b}"))?;
    }
    Ok(format!(
        "start {} ({:.5}), end {} ({:.5}); non-increasing at every step: {}",
        first.squared_bound,
        first.squared_bound.to_f64(),
        last.squared_bound,
        last.squared_bound.to_f64(),
        r.non_increasing
    ))
}

fn c11_stabilized() -> Check {
    let moduli: Vec<u64> = (2..=200).collect();
    let elems: Vec<StabilizedElement> =
        (0..=30).map(|a| StabilizedElement::over(a, &moduli)).collect::<Result<_, _>>().map_err(err)?;
    let (mut checked, mut vacuous) = (0usize, 0usize);
    for a in 0..=30u64 {
        for b in 0..=30u64 {
            for (op, f) in [(RingOp::Add, stabilized_add as fn(_, _) -> _), (RingOp::Mul, stabilized_mul)] {
                let anchor = match op {
                    RingOp::Add => a + b,
                    RingOp::Mul => a * b,
                };
                match f(&elems[a as usize], &elems[b as usize]) {
                    Ok(r) => {
                        for row in &r.rows {
                            let direct = op.apply(a % row.p, b % row.p, row.p);
                            ensure(row.componentwise == direct, || format!("{a},{b} at {}", row.p))?;
                            if row.p > anchor {
                                ensure(row.agrees && direct == anchor, || {
                                    format!("{a} {} {b} at {} gives {direct}", op.name(), row.p)
                                })?;
                                checked += 1;
                            }
                        }
                    }
                    Err(Error::NoAdmissibleModulus(_)) if anchor >= 200 => vacuous += 1,
                    Err(e) => return Err(err(e)),
                }
            }
        }
    }
    Ok(format!("{checked} tail rows agree; {vacuous} products exceed every modulus"))
}

fn c12_embedding() -> Check {
    let mut prev: Option<Rational> = None;
    for p in 2..=10_000u64 {
        let g = embedding_density(p).map_err(err)?;
        ensure(g == Rational::new(1, p).unwrap(), || format!("p={p}: gap {g}"))?;
        if let Some(prev) = &prev {
            ensure(&g < prev, || format!("not decreasing at {p}"))?;
        }
        prev = Some(g);
    }
    Ok("max gap = 1/p for p = 2..10000, strictly decreasing".into())
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("metric properties", 1, c1_metric_properties),
        ("Hausdorff distance of ring images", 1, c2_hausdorff),
        ("GH sandwich and solver soundness", 60, c3_gh_sandwich),
        ("closed-form discrepancy at (2, 3)", 1, c4_closed_form_discrepancy),
        ("equidistant ε-nets", 30, c5_nets),
        ("total-boundedness certificate", 10, c6_certificate),
        ("Cauchy-like tail along primes", 30, c7_prime_gaps),
        ("squared-metric collapse", 1, c8_squared_collapse),
        ("order stabilization", 10, c9_order),
        ("operation-graph trend", 60, c10_operation_graphs),
        ("stabilized arithmetic", 10, c11_stabilized),
        ("embedding density", 1, c12_embedding),
    ];
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = check();
        let took = t.elapsed();
        let in_time = took <= Duration::from_secs(*limit);
        let (status, detail) = match (&outcome, in_time) {
            (Ok(d), true) => ("PASS", d.clone()),
            (Ok(d), false) => ("FAIL", format!("too slow; {d}")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!(
            "[{status}] {:>2}. {name} ({:.2} s, limit {limit} s): {detail}",
            i + 1,
            took.as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
