//! Search for matrices with prescribed zeros whose product matches targets.
//!
//! The core is a small constraint solver over the unknown entries of `A`
//! and `B`. Each constraint says `sum_l A[i][l] * B[l][j] = t`. Domains are
//! bit sets of field values; a constraint with a single undetermined product
//! term narrows the domains of that term's two factors. Branching picks the
//! variable with the smallest domain (then the most constraints, then the
//! lowest index) and tries values in ascending order, so outcomes are
//! reproducible. Unknowns that occur in a single product term are branched
//! on last, as are unknowns whose every partner is such a single-use
//! unknown: those only absorb slack, and branching on them early multiplies
//! the work of refuting the rest.

use std::collections::VecDeque;

use super::{CiInstance, CiSolution, GciInstance, SolveOutcome};
use crate::error::Result;
use crate::field::{complete_to_inverse, FieldMatrix, PrimeField};

/// Default node budget for every search.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

type Domain = u128;

fn single_value(d: Domain) -> Option<u32> {
    (d.count_ones() == 1).then(|| d.trailing_zeros())
}

/// Unknown `A` (rows x inner) and `B` (inner x cols) with free masks and a
/// list of `(i, j, target)` constraints on the product (0-based).
#[derive(Clone, Debug)]
pub struct BilinearSystem {
    pub field: PrimeField,
    pub rows: usize,
    pub inner: usize,
    pub cols: usize,
    pub a_free: Vec<bool>,
    pub b_free: Vec<bool>,
    pub constraints: Vec<(usize, usize, u32)>,
}

struct Search {
    field: PrimeField,
    terms: Vec<Vec<(usize, usize)>>,
    targets: Vec<u32>,
    var_constraints: Vec<Vec<usize>>,
    /// Branching tier: 0 for core unknowns, 1 for unknowns that only ever
    /// multiply private ones, 2 for private unknowns.
    tier: Vec<u8>,
    domains: Vec<Domain>,
    trail: Vec<(usize, Domain)>,
    nodes: u64,
    budget: u64,
}

enum Flow {
    Found,
    Exhausted,
    OutOfBudget,
}

impl Search {
    fn set_domain(&mut self, v: usize, d: Domain, queue: &mut VecDeque<usize>, queued: &mut [bool]) -> bool {
        if d == self.domains[v] {
            return true;
        }
        self.trail.push((v, self.domains[v]));
        self.domains[v] = d;
        if d == 0 {
            return false;
        }
        for &c in &self.var_constraints[v] {
            if !queued[c] {
                queued[c] = true;
                queue.push_back(c);
            }
        }
        true
    }

    /// Values `r / a` for every nonzero `a` in `d`.
    fn quotient_set(&self, r: u32, d: Domain) -> Domain {
        let f = self.field;
        let mut out = 0;
        let mut rest = d & !1;
        while rest != 0 {
            let a = rest.trailing_zeros();
            rest &= rest - 1;
            out |= 1 << f.div(r, a);
        }
        out
    }

    fn propagate(&mut self, seeds: impl IntoIterator<Item = usize>) -> bool {
        let f = self.field;
        let mut queued = vec![false; self.terms.len()];
        let mut queue = VecDeque::new();
        for c in seeds {
            if !queued[c] {
                queued[c] = true;
                queue.push_back(c);
            }
        }
        while let Some(c) = queue.pop_front() {
            queued[c] = false;
            let mut sum = 0;
            let mut open: Option<(usize, usize)> = None;
            let mut open_count = 0;
            for &(x, y) in &self.terms[c] {
                let (dx, dy) = (self.domains[x], self.domains[y]);
                if dx == 1 || dy == 1 {
                    continue;
                }
                match (single_value(dx), single_value(dy)) {
                    (Some(a), Some(b)) => sum = f.add(sum, f.mul(a, b)),
                    _ => {
                        open_count += 1;
                        open = Some((x, y));
                        if open_count > 1 {
                            break;
                        }
                    }
                }
            }
            let target = self.targets[c];
            match open_count {
                0 => {
                    if sum != target {
                        return false;
                    }
                }
                1 => {
                    let (x, y) = open.expect("one open term");
                    let r = f.sub(target, sum);
                    let (dx, dy) = (self.domains[x], self.domains[y]);
                    let (nx, ny) = if r == 0 {
                        // x*y = 0: a factor that cannot be 0 forces the other to 0.
                        (if dy & 1 == 0 { dx & 1 } else { dx }, if dx & 1 == 0 { dy & 1 } else { dy })
                    } else {
                        (dx & self.quotient_set(r, dy), dy & self.quotient_set(r, dx))
                    };
                    if !self.set_domain(x, nx, &mut queue, &mut queued)
                        || !self.set_domain(y, ny, &mut queue, &mut queued)
                    {
                        return false;
                    }
                }
                _ => {}
            }
        }
        true
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (v, d) = self.trail.pop().expect("nonempty trail");
            self.domains[v] = d;
        }
    }

    fn pick(&self) -> Option<usize> {
        let mut best: Option<(u8, u32, std::cmp::Reverse<usize>, usize)> = None;
        for (v, &d) in self.domains.iter().enumerate() {
            let size = d.count_ones();
            if size <= 1 {
                continue;
            }
            let key = (self.tier[v], size, std::cmp::Reverse(self.var_constraints[v].len()), v);
            if best.is_none_or(|b| key < b) {
                best = Some(key);
            }
        }
        best.map(|b| b.3)
    }

    fn search(&mut self) -> Flow {
        let Some(v) = self.pick() else {
            return Flow::Found;
        };
        let dom = self.domains[v];
        for value in 0..self.field.modulus() {
            if dom >> value & 1 == 0 {
                continue;
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                return Flow::OutOfBudget;
            }
            let mark = self.trail.len();
            self.trail.push((v, dom));
            self.domains[v] = 1 << value;
            let seeds = self.var_constraints[v].clone();
            if self.propagate(seeds) {
                match self.search() {
                    Flow::Exhausted => {}
                    other => return other,
                }
            }
            self.undo_to(mark);
        }
        Flow::Exhausted
    }
}

impl BilinearSystem {
    /// First solution in the deterministic search order, `Ok(None)` when the
    /// search space is exhausted, or `Err(nodes)` when the budget runs out.
    pub fn solve(&self, budget: u64) -> std::result::Result<Option<(FieldMatrix, FieldMatrix)>, u64> {
        let (r, k, c) = (self.rows, self.inner, self.cols);
        let mut a_var = vec![None; r * k];
        let mut b_var = vec![None; k * c];
        let mut nvars = 0;
        for (slot, &free) in a_var.iter_mut().zip(&self.a_free) {
            if free {
                *slot = Some(nvars);
                nvars += 1;
            }
        }
        for (slot, &free) in b_var.iter_mut().zip(&self.b_free) {
            if free {
                *slot = Some(nvars);
                nvars += 1;
            }
        }
        let mut terms = Vec::with_capacity(self.constraints.len());
        let mut targets = Vec::with_capacity(self.constraints.len());
        let mut var_constraints = vec![Vec::new(); nvars];
        let mut occurrences = vec![0usize; nvars];
        for (ci, &(i, j, t)) in self.constraints.iter().enumerate() {
            let row: Vec<(usize, usize)> =
                (0..k).filter_map(|l| Some((a_var[i * k + l]?, b_var[l * c + j]?))).collect();
            for &(x, y) in &row {
                var_constraints[x].push(ci);
                var_constraints[y].push(ci);
                occurrences[x] += 1;
                occurrences[y] += 1;
            }
            terms.push(row);
            targets.push(t % self.field.modulus());
        }
        let private: Vec<bool> = occurrences.iter().map(|&o| o <= 1).collect();
        let mut slack_only = vec![true; nvars];
        for &(x, y) in terms.iter().flatten() {
            slack_only[x] &= private[y];
            slack_only[y] &= private[x];
        }
        let tier = (0..nvars)
            .map(|v| {
                if private[v] {
                    2
                } else if slack_only[v] {
                    1
                } else {
                    0
                }
            })
            .collect();
        let full: Domain = (1 << self.field.modulus()) - 1;
        let mut search = Search {
            field: self.field,
            terms,
            targets,
            var_constraints,
            tier,
            domains: vec![full; nvars],
            trail: Vec::new(),
            nodes: 0,
            budget,
        };
        let all: Vec<usize> = (0..self.constraints.len()).collect();
        if !search.propagate(all) {
            return Ok(None);
        }
        match search.search() {
            Flow::OutOfBudget => Err(search.nodes),
            Flow::Exhausted => Ok(None),
            Flow::Found => {
                let value = |v: Option<usize>| v.map_or(0, |v| single_value(search.domains[v]).unwrap_or(0));
                let a = a_var.iter().map(|&v| value(v)).collect();
                let b = b_var.iter().map(|&v| value(v)).collect();
                Ok(Some((
                    FieldMatrix::from_vec(self.field, r, k, a).expect("shape"),
                    FieldMatrix::from_vec(self.field, k, c, b).expect("shape"),
                )))
            }
        }
    }
}

/// Solves a CI instance.
///
/// Indices `k` whose row of `A` and column of `B` carry no zero constraint
/// are set aside: the remaining rows of `A` and columns of `B` form a
/// rectangular problem `A'B' = I`, and any solution of it extends to a full
/// solution by [`complete_to_inverse`] because the set-aside rows and columns
/// are unconstrained.
pub fn solve_ci(inst: &CiInstance, budget: u64) -> Result<SolveOutcome> {
    let n = inst.n;
    let f = inst.field;
    let row_free = |k: usize| !inst.p.iter().any(|&(i, _)| i == k + 1);
    let col_free = |k: usize| !inst.q.iter().any(|&(_, j)| j == k + 1);
    let (stripped, kept): (Vec<usize>, Vec<usize>) = (0..n).partition(|&k| row_free(k) && col_free(k));
    let r = kept.len();
    let sys = BilinearSystem {
        field: f,
        rows: r,
        inner: n,
        cols: r,
        a_free: kept
            .iter()
            .flat_map(|&i| (0..n).map(move |l| (i, l)))
            .map(|(i, l)| !inst.p.contains(&(i + 1, l + 1)))
            .collect(),
        b_free: (0..n)
            .flat_map(|l| kept.iter().map(move |&j| (l, j)))
            .map(|(l, j)| !inst.q.contains(&(l + 1, j + 1)))
            .collect(),
        constraints: (0..r).flat_map(|i| (0..r).map(move |j| (i, j, u32::from(i == j)))).collect(),
    };
    let (a_part, b_part) = match sys.solve(budget) {
        Err(nodes) => return Ok(SolveOutcome::BudgetExceeded { nodes }),
        Ok(None) => return Ok(SolveOutcome::NoSolution),
        Ok(Some(pair)) => pair,
    };
    let mut a = FieldMatrix::zeros(f, n, n);
    let mut b = FieldMatrix::zeros(f, n, n);
    for (ri, &i) in kept.iter().enumerate() {
        for l in 0..n {
            a.set(i, l, a_part.get(ri, l));
            b.set(l, i, b_part.get(l, ri));
        }
    }
    if !stripped.is_empty() {
        let (m_prime, n_prime) = complete_to_inverse(&a_part, &b_part)?;
        for (ri, &i) in stripped.iter().enumerate() {
            for l in 0..n {
                a.set(i, l, m_prime.get(ri, l));
                b.set(l, i, n_prime.get(l, ri));
            }
        }
    }
    let sol = CiSolution { a, b };
    debug_assert!(super::verify_ci(inst, &sol)?);
    Ok(SolveOutcome::Solved(sol))
}

/// Solves a GCI instance by joint search over `A` and `B`.
pub fn solve_gci(inst: &GciInstance, budget: u64) -> Result<SolveOutcome> {
    let (n, m) = (inst.n, inst.m);
    let sys = BilinearSystem {
        field: inst.field,
        rows: n,
        inner: m,
        cols: n,
        a_free: (0..n * m).map(|k| !inst.p.contains(&(k / m + 1, k % m + 1))).collect(),
        b_free: (0..m * n).map(|k| !inst.q.contains(&(k / n + 1, k % n + 1))).collect(),
        constraints: inst.r.iter().map(|&(i, j)| (i - 1, j - 1, u32::from(i == j))).collect(),
    };
    Ok(match sys.solve(budget) {
        Err(nodes) => SolveOutcome::BudgetExceeded { nodes },
        Ok(None) => SolveOutcome::NoSolution,
        Ok(Some((a, b))) => SolveOutcome::Solved(CiSolution { a, b }),
    })
}

/// Enumerates the free entries of `A` row by row, values ascending, keeping
/// only prefixes of full row rank; each invertible `A` is accepted when its
/// inverse respects `Q`. Exponential; used as an independent cross-check.
pub fn solve_ci_by_inverse(inst: &CiInstance, budget: u64) -> Result<SolveOutcome> {
    let n = inst.n;
    let f = inst.field;
    let free: Vec<Vec<usize>> =
        (0..n).map(|i| (0..n).filter(|&j| !inst.p.contains(&(i + 1, j + 1))).collect()).collect();
    let mut a = FieldMatrix::zeros(f, n, n);
    let mut nodes = 0u64;

    fn rows_of(a: &FieldMatrix, upto: usize) -> FieldMatrix {
        let idx: Vec<usize> = (0..upto).collect();
        let cols: Vec<usize> = (0..a.cols()).collect();
        a.select(&idx, &cols)
    }

    fn go(
        inst: &CiInstance,
        free: &[Vec<usize>],
        a: &mut FieldMatrix,
        row: usize,
        nodes: &mut u64,
        budget: u64,
    ) -> Result<std::result::Result<Option<CiSolution>, ()>> {
        let n = inst.n;
        let f = inst.field;
        if row == n {
            let b = a.inverse()?.expect("full-rank prefix of length n is invertible");
            let ok = inst.q.iter().all(|&(i, j)| b.get(i - 1, j - 1) == 0);
            return Ok(Ok(ok.then(|| CiSolution { a: a.clone(), b })));
        }
        let slots = &free[row];
        let total = (f.modulus() as u64).pow(slots.len() as u32);
        for code in 0..total {
            *nodes += 1;
            if *nodes > budget {
                return Ok(Err(()));
            }
            // Most significant digit first, so the enumeration is row-major ascending.
            let mut c = code;
            for &j in slots.iter().rev() {
                a.set(row, j, (c % f.modulus() as u64) as u32);
                c /= f.modulus() as u64;
            }
            if rows_of(a, row + 1).rank() == row + 1 {
                match go(inst, free, a, row + 1, nodes, budget)? {
                    Ok(None) => {}
                    done => return Ok(done),
                }
            }
        }
        for &j in slots {
            a.set(row, j, 0);
        }
        Ok(Ok(None))
    }

    Ok(match go(inst, &free, &mut a, 0, &mut nodes, budget)? {
        Ok(Some(sol)) => SolveOutcome::Solved(sol),
        Ok(None) => SolveOutcome::NoSolution,
        Err(()) => SolveOutcome::BudgetExceeded { nodes },
    })
}
