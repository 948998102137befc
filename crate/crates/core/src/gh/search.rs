//! Branch-and-bound over correspondences.
//!
//! Every correspondence contains one of the form `graph(f) ∪ {(g(b), b) :
//! b ∉ im f}` with `f: A → B`, and distortion only grows with inclusion, so
//! searching those is exact. Points of `A` are assigned first, by
//! decreasing eccentricity; then every point of `B` that is still uncovered
//! gets a partner in `A`.
//!
//! `cost[a * nb + b]` holds the distortion that adding the pair `(a, b)`
//! would contribute against the pairs already chosen. A node is pruned when
//! some point that must still be covered has no partner of cost below the
//! incumbent.

use crate::metric::Scalar;

pub(crate) struct Problem<T> {
    pub na: usize,
    pub nb: usize,
    pub da: Vec<T>,
    pub db: Vec<T>,
}

pub(crate) struct Outcome<T> {
    pub best: T,
    pub pairs: Vec<(usize, usize)>,
    pub nodes: u64,
    pub complete: bool,
}

impl<T: Scalar> Problem<T> {
    fn a(&self, i: usize, j: usize) -> &T {
        &self.da[i * self.na + j]
    }

    fn b(&self, i: usize, j: usize) -> &T {
        &self.db[i * self.nb + j]
    }

    fn eccentricities(d: &[T], n: usize) -> Vec<T> {
        (0..n)
            .map(|i| d[i * n..(i + 1) * n].iter().max().cloned().unwrap_or_else(T::zero))
            .collect()
    }

    /// Distortion of an arbitrary set of pairs.
    pub fn distortion(&self, pairs: &[(usize, usize)]) -> T {
        let mut worst = T::zero();
        for &(a, b) in pairs {
            for &(a2, b2) in pairs {
                let v = self.a(a, a2).abs_diff(self.b(b, b2));
                if v > worst {
                    worst = v;
                }
            }
        }
        worst
    }

    fn initial_cost(&self) -> Vec<T> {
        let mut cost = Vec::with_capacity(self.na * self.nb);
        for a in 0..self.na {
            for b in 0..self.nb {
                cost.push(self.a(a, a).abs_diff(self.b(b, b)));
            }
        }
        cost
    }

    fn absorb(&self, cost: &mut [T], a_new: usize, b_new: usize) {
        for a in 0..self.na {
            let da = self.a(a, a_new);
            for b in 0..self.nb {
                let v = da.abs_diff(self.b(b, b_new));
                let slot = &mut cost[a * self.nb + b];
                if v > *slot {
                    *slot = v;
                }
            }
        }
    }
}

struct Search<'p, T> {
    problem: &'p Problem<T>,
    order_a: Vec<usize>,
    order_b: Vec<usize>,
    ecc_a: Vec<T>,
    ecc_b: Vec<T>,
    floor: T,
    budget: u64,
    best: T,
    best_pairs: Vec<(usize, usize)>,
    nodes: u64,
    aborted: bool,
    done: bool,
    pairs: Vec<(usize, usize)>,
    assigned_a: Vec<bool>,
    cover_b: Vec<u32>,
    levels: Vec<Vec<T>>,
}

impl<'p, T: Scalar> Search<'p, T> {
    fn new(problem: &'p Problem<T>, start: (T, Vec<(usize, usize)>), floor: T, budget: u64) -> Self {
        let ecc_a = Problem::eccentricities(&problem.da, problem.na);
        let ecc_b = Problem::eccentricities(&problem.db, problem.nb);
        let by_ecc = |ecc: &[T]| {
            let mut o: Vec<usize> = (0..ecc.len()).collect();
            o.sort_by(|&i, &j| ecc[j].cmp(&ecc[i]).then(i.cmp(&j)));
            o
        };
        let depth = problem.na + problem.nb + 2;
        Search {
            order_a: by_ecc(&ecc_a),
            order_b: by_ecc(&ecc_b),
            ecc_a,
            ecc_b,
            floor,
            budget,
            best: start.0,
            best_pairs: start.1,
            nodes: 0,
            aborted: false,
            done: false,
            pairs: Vec::with_capacity(depth),
            assigned_a: vec![false; problem.na],
            cover_b: vec![0; problem.nb],
            levels: vec![Vec::new(); depth],
            problem,
        }
    }

    /// Candidates for the open side, cheapest first, then by eccentricity
    /// similarity, then by index.
    fn candidates(&self, cost: &[T], fixed: usize, fixed_is_a: bool) -> Vec<usize> {
        let p = self.problem;
        let key = |o: usize| -> (&T, T) {
            if fixed_is_a {
                (&cost[fixed * p.nb + o], self.ecc_a[fixed].abs_diff(&self.ecc_b[o]))
            } else {
                (&cost[o * p.nb + fixed], self.ecc_b[fixed].abs_diff(&self.ecc_a[o]))
            }
        };
        let n_other = if fixed_is_a { p.nb } else { p.na };
        let mut c: Vec<usize> = (0..n_other).filter(|&o| key(o).0 < &self.best).collect();
        c.sort_by(|&i, &j| key(i).cmp(&key(j)).then(i.cmp(&j)));
        c
    }

    fn feasible(&self, cost: &[T]) -> bool {
        let p = self.problem;
        for a in 0..p.na {
            if !self.assigned_a[a] && !(0..p.nb).any(|b| cost[a * p.nb + b] < self.best) {
                return false;
            }
        }
        for b in 0..p.nb {
            if self.cover_b[b] == 0 && !(0..p.na).any(|a| cost[a * p.nb + b] < self.best) {
                return false;
            }
        }
        true
    }

    fn run(&mut self, depth: usize, cur: T) {
        if self.done {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.aborted = true;
            self.done = true;
            return;
        }
        let p = self.problem;
        let cost = std::mem::take(&mut self.levels[depth]);

        let (fixed, fixed_is_a) = if depth < p.na {
            (self.order_a[depth], true)
        } else {
            match self.order_b.iter().copied().find(|&b| self.cover_b[b] == 0) {
                Some(b) => (b, false),
                None => {
                    if cur < self.best {
                        self.best = cur.clone();
                        self.best_pairs = self.pairs.clone();
                        if self.best <= self.floor {
                            self.done = true;
                        }
                    }
                    self.levels[depth] = cost;
                    return;
                }
            }
        };

        for other in self.candidates(&cost, fixed, fixed_is_a) {
            if self.done {
                break;
            }
            let (a, b) = if fixed_is_a { (fixed, other) } else { (other, fixed) };
            let step = &cost[a * p.nb + b];
            if step >= &self.best || cur >= self.best {
                continue;
            }
            let next_cur = if step > &cur { step.clone() } else { cur.clone() };

            let mut next = std::mem::take(&mut self.levels[depth + 1]);
            next.clone_from(&cost);
            p.absorb(&mut next, a, b);

            self.pairs.push((a, b));
            if fixed_is_a {
                self.assigned_a[a] = true;
            }
            self.cover_b[b] += 1;

            if self.feasible(&next) {
                self.levels[depth + 1] = next;
                self.run(depth + 1, next_cur);
            } else {
                self.levels[depth + 1] = next;
            }

            self.cover_b[b] -= 1;
            if fixed_is_a {
                self.assigned_a[a] = false;
            }
            self.pairs.pop();
        }
        self.levels[depth] = cost;
    }
}

/// Greedy completion: each point of `A` in eccentricity order takes its
/// cheapest partner, then uncovered points of `B` do the same.
pub(crate) fn greedy<T: Scalar>(p: &Problem<T>) -> Vec<(usize, usize)> {
    let s = Search::new(p, (T::zero(), Vec::new()), T::zero(), 0);
    let mut cost = p.initial_cost();
    let mut pairs = Vec::new();
    let mut covered = vec![false; p.nb];
    for &a in &s.order_a {
        let b = (0..p.nb)
            .min_by(|&x, &y| {
                let kx = (&cost[a * p.nb + x], s.ecc_a[a].abs_diff(&s.ecc_b[x]), x);
                let ky = (&cost[a * p.nb + y], s.ecc_a[a].abs_diff(&s.ecc_b[y]), y);
                kx.cmp(&ky)
            })
            .expect("nonempty B");
        p.absorb(&mut cost, a, b);
        covered[b] = true;
        pairs.push((a, b));
    }
    for &b in &s.order_b {
        if covered[b] {
            continue;
        }
        let a = (0..p.na)
            .min_by(|&x, &y| {
                let kx = (&cost[x * p.nb + b], s.ecc_b[b].abs_diff(&s.ecc_a[x]), x);
                let ky = (&cost[y * p.nb + b], s.ecc_b[b].abs_diff(&s.ecc_a[y]), y);
                kx.cmp(&ky)
            })
            .expect("nonempty A");
        p.absorb(&mut cost, a, b);
        covered[b] = true;
        pairs.push((a, b));
    }
    pairs
}

/// Searches for a correspondence with distortion strictly below the
/// incumbent `start`, stopping early once `floor` is reached.
pub(crate) fn solve<T: Scalar>(
    p: &Problem<T>,
    start: (T, Vec<(usize, usize)>),
    floor: T,
    budget: u64,
) -> Outcome<T> {
    if start.0 <= floor {
        return Outcome { best: start.0, pairs: start.1, nodes: 0, complete: true };
    }
    let mut s = Search::new(p, start, floor, budget);
    s.levels[0] = p.initial_cost();
    if s.feasible(&s.levels[0].clone()) {
        s.run(0, T::zero());
    }
    Outcome { best: s.best, pairs: s.best_pairs, nodes: s.nodes, complete: !s.aborted }
}
