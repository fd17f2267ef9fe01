//! One-sided conditions on morphisms: kernels and cokernels that die after a
//! shift, injections, surjections, and the 3SAT gadget for surjections.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::field::{FieldMatrix, PrimeField};
use crate::interleaving::{advance, verify_presented, Decision, InterleavingCertificate, MorphismMatrix, Witness};
use crate::presentation::{direct_sum, CriticalGrid, GradedPresentation, Morphism, SpaceCache};
use crate::rational::{Point2, Rational};
use crate::sat::{Assignment, Cnf3};
use crate::staircase::{dshift_distance, dual_staircase, Staircase, StaircaseSum};

/// A shift bound, possibly infinite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Bound {
    Finite(Rational),
    Infinite,
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Finite(r) => write!(f, "{r}"),
            Bound::Infinite => write!(f, "inf"),
        }
    }
}

impl FromStr for Bound {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(Bound::Infinite),
            other => {
                let r: Rational = other.parse()?;
                if r < Rational::ZERO {
                    return Err(Error::Parse(format!("bound {r} is negative")));
                }
                Ok(Bound::Finite(r))
            }
        }
    }
}

/// `s` bounds the kernel, `t` the cokernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrivialityParams {
    pub s: Bound,
    pub t: Bound,
}

impl TrivialityParams {
    pub fn new(s: Bound, t: Bound) -> Result<Self> {
        for b in [s, t] {
            if let Bound::Finite(r) = b {
                if r < Rational::ZERO {
                    return Err(Error::Precondition(format!("negative bound {r}")));
                }
            }
        }
        Ok(TrivialityParams { s, t })
    }
}

/// Points at which kernel and cokernel conditions are checked for a shift
/// of `eps`: every pairing of a grade coordinate, or a grade coordinate
/// minus `eps`, in x with the same in y.
///
/// For any `p`, let `p'` be its floor in this grid. No grade coordinate lies
/// in `(p', p]`, and none lies in `(p' + eps, p + eps]` since its value
/// minus `eps` would sit in `(p', p]`. So both spaces and all maps at `p`
/// and `p + eps` agree with those at `p'` and `p' + eps`.
pub fn triviality_grid<'a>(grades: impl IntoIterator<Item = &'a Point2>, eps: Rational) -> CriticalGrid {
    let mut xs = BTreeSet::new();
    let mut ys = BTreeSet::new();
    for g in grades {
        xs.extend([g.x, g.x - eps]);
        ys.extend([g.y, g.y - eps]);
    }
    CriticalGrid::product(xs, ys)
}

fn presentation_grid(m: &GradedPresentation, n: &GradedPresentation, eps: Rational) -> CriticalGrid {
    let grades: Vec<Point2> = m.grades().chain(n.grades()).collect();
    triviality_grid(&grades, eps)
}

/// Whether `ker f_p -> ker f_{p+eps}` vanishes everywhere, for `f: m -> n`.
pub fn kernel_eps_trivial(f: &Morphism, m: &GradedPresentation, n: &GradedPresentation, eps: Rational) -> bool {
    let mut cm = SpaceCache::new(m);
    let mut cn = SpaceCache::new(n);
    presentation_grid(m, n, eps).points().iter().all(|p| {
        let fp = f.matrix_at(&mut cm, &mut cn, p);
        let kernel = fp.null_space();
        if kernel.is_empty() {
            return true;
        }
        let forward = cm.internal_map(p, &p.diag(eps));
        kernel.iter().all(|v| forward.apply(v).iter().all(|&c| c == 0))
    })
}

/// Whether `coker f_p -> coker f_{p+eps}` vanishes everywhere: the image
/// of `n_{p -> p+eps}` lies in the image of `f_{p+eps}`.
pub fn cokernel_eps_trivial(f: &Morphism, m: &GradedPresentation, n: &GradedPresentation, eps: Rational) -> bool {
    let mut cm = SpaceCache::new(m);
    let mut cn = SpaceCache::new(n);
    presentation_grid(m, n, eps).points().iter().all(|p| {
        let q = p.diag(eps);
        let fq = f.matrix_at(&mut cm, &mut cn, &q);
        let forward = cn.internal_map(p, &q);
        let r = fq.rank();
        r == fq.hstack(&forward).expect("same row count").rank()
    })
}

pub fn is_injective(f: &Morphism, m: &GradedPresentation, n: &GradedPresentation) -> bool {
    kernel_eps_trivial(f, m, n, Rational::ZERO)
}

pub fn is_surjective(f: &Morphism, m: &GradedPresentation, n: &GradedPresentation) -> bool {
    cokernel_eps_trivial(f, m, n, Rational::ZERO)
}

/// Summands of `sum` containing `p`, as a bit set.
fn members(sum: &StaircaseSum, p: &Point2) -> u64 {
    sum.summands.iter().enumerate().filter(|(_, s)| s.contains(p)).fold(0, |acc, (i, _)| acc | 1 << i)
}

fn bits(mask: u64) -> Vec<usize> {
    (0..64).filter(|&i| mask >> i & 1 == 1).collect()
}

fn check_width(sums: &[&StaircaseSum]) -> Result<()> {
    if sums.iter().any(|s| s.len() > 64) {
        return Err(Error::Precondition("more than 64 summands".into()));
    }
    if sums.windows(2).any(|w| w[0].field != w[1].field) {
        return Err(Error::FieldMismatch(sums[0].field.modulus(), sums[1].field.modulus()));
    }
    Ok(())
}

fn corner_grid(m: &StaircaseSum, n: &StaircaseSum, eps: Rational) -> CriticalGrid {
    let corners: Vec<Point2> = m.summands.iter().chain(&n.summands).flat_map(|s| s.corners().to_vec()).collect();
    triviality_grid(&corners, eps)
}

/// A rank condition on the submatrix of a matrix morphism at one membership
/// pattern. Masks select rows (target summands) and columns (source
/// summands).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum RankCheck {
    /// `f[rows, cols]` is onto `F^rows`.
    Onto { rows: u64, cols: u64 },
    /// `f[rows, cols]` is one-to-one.
    OneToOne { rows: u64, cols: u64 },
    /// The coordinate subspace `sub` of `F^rows` lies in the column space
    /// of `f[rows, cols]`.
    Covers { rows: u64, cols: u64, sub: u64 },
}

impl RankCheck {
    /// Columns the check reads.
    pub fn cols(&self) -> u64 {
        match *self {
            RankCheck::Onto { cols, .. } | RankCheck::OneToOne { cols, .. } | RankCheck::Covers { cols, .. } => cols,
        }
    }

    pub fn holds(&self, f: &FieldMatrix) -> bool {
        match *self {
            RankCheck::Onto { rows, cols } => f.select(&bits(rows), &bits(cols)).rank() == rows.count_ones() as usize,
            RankCheck::OneToOne { rows, cols } => {
                f.select(&bits(rows), &bits(cols)).rank() == cols.count_ones() as usize
            }
            RankCheck::Covers { rows, cols, sub } => {
                let rows = bits(rows);
                let fq = f.select(&rows, &bits(cols));
                let r = fq.rank();
                if r == rows.len() {
                    return true;
                }
                let sub = bits(sub);
                let mut inc = FieldMatrix::zeros(f.field(), rows.len(), sub.len());
                for (c, j) in sub.iter().enumerate() {
                    let row = rows.iter().position(|x| x == j).expect("subspace inside rows");
                    inc.set(row, c, 1);
                }
                fq.hstack(&inc).expect("same rows").rank() == r
            }
        }
    }
}

/// Kernel and cokernel conditions for matrix morphisms between two fixed
/// staircase sums at one shift.
///
/// Between staircase sums the space at `p` is spanned by the summands
/// containing `p` and internal maps are coordinate inclusions, so every
/// check only depends on which summands contain `p` and `p + eps`. Those
/// membership patterns are collected once.
#[derive(Clone, Debug)]
pub struct StaircaseChecker {
    /// `(I_p, J_p, I_{p+eps}, J_{p+eps})`: source and target members.
    signatures: Vec<(u64, u64, u64, u64)>,
}

impl StaircaseChecker {
    pub fn new(m: &StaircaseSum, n: &StaircaseSum, eps: Rational) -> Result<Self> {
        check_width(&[m, n])?;
        let mut set = BTreeSet::new();
        for p in corner_grid(m, n, eps).points() {
            let q = p.diag(eps);
            set.insert((members(m, p), members(n, p), members(m, &q), members(n, &q)));
        }
        Ok(StaircaseChecker { signatures: set.into_iter().collect() })
    }

    pub fn len(&self) -> usize {
        self.signatures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signatures.is_empty()
    }

    /// Since internal maps are injective here, the kernel map vanishes only
    /// when the kernel itself does: `f_p` must be one-to-one.
    pub fn kernel_checks(&self) -> Vec<RankCheck> {
        let set: BTreeSet<RankCheck> =
            self.signatures.iter().map(|&(ip, jp, _, _)| RankCheck::OneToOne { rows: jp, cols: ip }).collect();
        set.into_iter().collect()
    }

    /// `J_p` inside `F^{J_{p+eps}}` lies in the image of `f_{p+eps}`.
    pub fn cokernel_checks(&self) -> Vec<RankCheck> {
        let set: BTreeSet<RankCheck> =
            self.signatures.iter().map(|&(_, jp, iq, jq)| RankCheck::Covers { rows: jq, cols: iq, sub: jp }).collect();
        set.into_iter().collect()
    }

    pub fn kernel_trivial(&self, f: &FieldMatrix) -> bool {
        self.kernel_checks().iter().all(|c| c.holds(f))
    }

    pub fn cokernel_trivial(&self, f: &FieldMatrix) -> bool {
        self.cokernel_checks().iter().all(|c| c.holds(f))
    }
}

/// Kernel check for a matrix morphism `m -> n`, through the fast path.
pub fn staircase_kernel_eps_trivial(
    m: &StaircaseSum,
    n: &StaircaseSum,
    f: &FieldMatrix,
    eps: Rational,
) -> Result<bool> {
    Ok(StaircaseChecker::new(m, n, eps)?.kernel_trivial(f))
}

pub fn staircase_cokernel_eps_trivial(
    m: &StaircaseSum,
    n: &StaircaseSum,
    f: &FieldMatrix,
    eps: Rational,
) -> Result<bool> {
    Ok(StaircaseChecker::new(m, n, eps)?.cokernel_trivial(f))
}

/// Candidate columns for matrix morphisms `m -> n`: entries are free
/// exactly where the source summand lies inside the target summand, and
/// each column is either zero or has leading nonzero entry 1. Scaling a
/// column is an automorphism of the source, which changes neither kernels,
/// images nor cokernels.
fn column_choices(m: &StaircaseSum, n: &StaircaseSum) -> Vec<Vec<Vec<u32>>> {
    let field = m.field;
    m.summands
        .iter()
        .map(|s| {
            let free: Vec<usize> =
                (0..n.len()).filter(|&j| dshift_distance(s, &n.summands[j]) <= Rational::ZERO).collect();
            let mut v = vec![0u32; free.len()];
            let mut out = vec![vec![0u32; n.len()]];
            while advance(&mut v, field) {
                if v.iter().find(|&&c| c != 0) == Some(&1) {
                    let mut col = vec![0u32; n.len()];
                    for (&j, &c) in free.iter().zip(&v) {
                        col[j] = c;
                    }
                    out.push(col);
                }
            }
            out
        })
        .collect()
}

/// Every candidate matrix of [`column_choices`], first column varying
/// fastest.
#[derive(Clone, Debug)]
pub struct MatrixEnumerator {
    field: PrimeField,
    rows: usize,
    choices: Vec<Vec<Vec<u32>>>,
    idx: Vec<usize>,
    done: bool,
}

impl MatrixEnumerator {
    pub fn new(m: &StaircaseSum, n: &StaircaseSum) -> Self {
        MatrixEnumerator {
            field: m.field,
            rows: n.len(),
            idx: vec![0; m.len()],
            choices: column_choices(m, n),
            done: false,
        }
    }

    /// Number of matrices the enumeration visits, if it fits in a `u64`.
    pub fn total(&self) -> Option<u64> {
        self.choices.iter().try_fold(1u64, |acc, c| acc.checked_mul(c.len() as u64))
    }
}

impl Iterator for MatrixEnumerator {
    type Item = FieldMatrix;

    fn next(&mut self) -> Option<FieldMatrix> {
        if self.done {
            return None;
        }
        let mut out = FieldMatrix::zeros(self.field, self.rows, self.idx.len());
        for (c, &k) in self.idx.iter().enumerate() {
            for (r, &v) in self.choices[c][k].iter().enumerate() {
                out.set(r, c, v);
            }
        }
        self.done = true;
        for (c, k) in self.idx.iter_mut().enumerate() {
            *k += 1;
            if *k < self.choices[c].len() {
                self.done = false;
                break;
            }
            *k = 0;
        }
        Some(out)
    }
}

/// Searches for a morphism `m -> n` with `s`-trivial kernel and `t`-trivial
/// cokernel. `budget` caps the number of search nodes.
pub fn exists_st_trivial_morphism(
    m: &StaircaseSum,
    n: &StaircaseSum,
    params: TrivialityParams,
    budget: u64,
) -> Result<Decision<MorphismMatrix>> {
    check_width(&[m, n])?;
    if params.s == Bound::Infinite && params.t == Bound::Infinite {
        return Ok(Decision::Yes(MorphismMatrix::new(FieldMatrix::zeros(m.field, n.len(), m.len()))));
    }
    let mut checks = Vec::new();
    if let Bound::Finite(s) = params.s {
        checks.extend(StaircaseChecker::new(m, n, s)?.kernel_checks());
    }
    if let Bound::Finite(t) = params.t {
        checks.extend(StaircaseChecker::new(m, n, t)?.cokernel_checks());
    }
    search(m, n, &checks, budget)
}

/// Depth-first search over columns, left to right. A check runs as soon
/// as the last column it reads is assigned; one node per column value
/// tried.
pub fn search(
    m: &StaircaseSum,
    n: &StaircaseSum,
    checks: &[RankCheck],
    budget: u64,
) -> Result<Decision<MorphismMatrix>> {
    let k = m.len();
    let choices = column_choices(m, n);
    // Checks grouped by the depth at which they become decidable.
    let mut by_depth: Vec<Vec<RankCheck>> = vec![Vec::new(); k + 1];
    for c in checks {
        let cols = c.cols();
        let depth = if cols == 0 { 0 } else { 64 - cols.leading_zeros() as usize };
        by_depth[depth].push(*c);
    }
    let mut f = FieldMatrix::zeros(m.field, n.len(), k);
    if !by_depth[0].iter().all(|c| c.holds(&f)) {
        return Ok(Decision::No);
    }
    let mut idx = vec![0usize; k];
    let mut depth = 0usize;
    let mut nodes = 0u64;
    if k == 0 {
        return Ok(Decision::Yes(MorphismMatrix::new(f)));
    }
    loop {
        // Try the current value at `depth`.
        if idx[depth] < choices[depth].len() {
            nodes += 1;
            if nodes > budget {
                return Ok(Decision::BudgetExceeded { nodes: budget });
            }
            for (r, &v) in choices[depth][idx[depth]].iter().enumerate() {
                f.set(r, depth, v);
            }
            if by_depth[depth + 1].iter().all(|c| c.holds(&f)) {
                if depth + 1 == k {
                    return Ok(Decision::Yes(MorphismMatrix::new(f)));
                }
                depth += 1;
                idx[depth] = 0;
                continue;
            }
            idx[depth] += 1;
        } else {
            for r in 0..n.len() {
                f.set(r, depth, 0);
            }
            if depth == 0 {
                return Ok(Decision::No);
            }
            depth -= 1;
            idx[depth] += 1;
        }
    }
}

/// Membership patterns at the pairwise joins of the given corners.
///
/// For surjectivity take the target's corners: at any `p`, the join `p'`
/// of the target corners below `p` has the same target members and fewer
/// source members, so a rank deficit at `p` shows up at `p'`. Injectivity
/// is the mirror image with the source's corners.
fn join_signatures(m: &StaircaseSum, n: &StaircaseSum, of_target: bool) -> Vec<(u64, u64)> {
    let which = if of_target { n } else { m };
    let corners: Vec<Point2> = which.summands.iter().flat_map(|s| s.corners().to_vec()).collect();
    let grid = CriticalGrid::from_points(corners);
    let set: BTreeSet<(u64, u64)> = grid.points().iter().map(|p| (members(m, p), members(n, p))).collect();
    set.into_iter().collect()
}

/// Searches for a surjection `m -> n`.
pub fn exists_surjection(m: &StaircaseSum, n: &StaircaseSum, budget: u64) -> Result<Decision<MorphismMatrix>> {
    check_width(&[m, n])?;
    let checks: Vec<RankCheck> =
        join_signatures(m, n, true).into_iter().map(|(cols, rows)| RankCheck::Onto { rows, cols }).collect();
    search(m, n, &checks, budget)
}

/// Searches for an injection `m -> n`.
pub fn exists_injection(m: &StaircaseSum, n: &StaircaseSum, budget: u64) -> Result<Decision<MorphismMatrix>> {
    check_width(&[m, n])?;
    let checks: Vec<RankCheck> =
        join_signatures(m, n, false).into_iter().map(|(cols, rows)| RankCheck::OneToOne { rows, cols }).collect();
    search(m, n, &checks, budget)
}

/// Builds `g: n -> m^eps` from an injective `f: m -> n^eps` whose cokernel
/// is `2 eps`-trivial. For a generator of `n` at `h`, the element it
/// becomes at `h + 2 eps` lies in the image of `f` at `h + eps`, and
/// injectivity makes the preimage unique; that preimage is its image
/// under `g`. The pair is then re-verified.
pub fn complete_interleaving_from_injection(
    m: &GradedPresentation,
    n: &GradedPresentation,
    f: &Morphism,
    eps: Rational,
) -> Result<InterleavingCertificate> {
    let n_eps = n.shifted(eps);
    if !f.is_valid(m, &n_eps) {
        return Err(Error::Precondition("f is not a morphism into the shifted target".into()));
    }
    if !is_injective(f, m, &n_eps) {
        return Err(Error::Precondition("f is not injective".into()));
    }
    if !cokernel_eps_trivial(f, m, &n_eps, eps + eps) {
        return Err(Error::Precondition(format!("cokernel of f is not {}-trivial", eps + eps)));
    }
    let field = m.field();
    let mut cm = SpaceCache::new(m);
    let mut cn = SpaceCache::new(&n_eps);
    let mut images = Vec::with_capacity(n.num_generators());
    for (j, h) in n.generators().iter().enumerate() {
        let p = h.diag(eps);
        let fp = f.matrix_at(&mut cm, &mut cn, &p);
        let mut e = vec![0; n.num_generators()];
        e[j] = 1;
        let rhs = cn.get(&p).coords(field, &e);
        let pre = fp.solve(&rhs).ok_or_else(|| Error::Precondition(format!("no preimage for generator {j} at {p}")))?;
        images.push(cm.get(&p).lift(&pre));
    }
    let g = Morphism { images };
    if !verify_presented(m, n, f, &g, eps) {
        return Err(Error::Precondition("completed pair does not interleave".into()));
    }
    Ok(InterleavingCertificate { eps, witness: Witness::Presented { f: f.clone(), g } })
}

/// Presentation of the sum of reflected interiors, all generators at
/// `(-z_cut, -z_cut)`.
pub fn dual_sum(sum: &StaircaseSum, z_cut: Rational) -> Result<GradedPresentation> {
    let parts = sum.summands.iter().map(|s| dual_staircase(s, z_cut, sum.field)).collect::<Result<Vec<_>>>()?;
    direct_sum(&parts)
}

/// The dual of a matrix morphism `m -> n`: `n* -> m*` with the transposed
/// matrix, one generator per summand.
pub fn dual_morphism(f: &FieldMatrix) -> Morphism {
    Morphism::from_matrix(&f.transpose())
}

/// The 3SAT gadget for surjections.
///
/// Every corner is a point `(k, -k)` on the antidiagonal, so corners are
/// pairwise incomparable, and each summand has a corner at exactly the
/// points whose member list names it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurjectionGadget {
    /// Summands `A, B, M_1^1, ..., M_n^q`.
    pub m: StaircaseSum,
    /// Summands `N_1, N_2`.
    pub n: StaircaseSum,
    pub q: usize,
    pub num_vars: usize,
    pub m_names: Vec<String>,
    pub n_names: Vec<String>,
    pub corners: Vec<GadgetCorner>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GadgetCorner {
    pub label: String,
    pub point: Point2,
    pub members: Vec<String>,
}

impl SurjectionGadget {
    /// Column of `M_i^r` (both 1-based).
    pub fn column(&self, i: usize, r: usize) -> usize {
        2 + (i - 1) * self.q + (r - 1)
    }

    /// Reads an assignment off a surjection: with `d_i^r` the ratio of the
    /// two entries in column `M_i^r`, `x_i` is false iff `d_i^1 = 0`.
    pub fn decode(&self, f: &FieldMatrix) -> Assignment {
        let field = self.m.field;
        let values = (1..=self.num_vars)
            .map(|i| {
                let c = self.column(i, 1);
                let (top, bottom) = (f.get(0, c), f.get(1, c));
                bottom != 0 && field.div(top, bottom) != 0
            })
            .collect();
        Assignment { values }
    }
}

/// Builds the surjection gadget of a formula over a field with `q`
/// elements: a surjection `M -> N` exists iff the formula is satisfiable.
pub fn sat3_to_surjection(formula: &Cnf3, field: PrimeField) -> Result<SurjectionGadget> {
    let q = field.size();
    let nv = formula.num_vars();
    let mi = |i: usize, r: usize| format!("M_{i}^{r}");
    let mut m_names = vec!["A".to_string(), "B".to_string()];
    for i in 1..=nv {
        for r in 1..=q {
            m_names.push(mi(i, r));
        }
    }
    let n_names = vec!["N_1".to_string(), "N_2".to_string()];
    let both = || ["N_1".to_string(), "N_2".to_string()];
    let mut entries: Vec<(String, Vec<String>)> =
        vec![("a".into(), vec!["A".into(), "N_1".into()]), ("b".into(), vec!["B".into(), "N_2".into()])];
    for i in 1..=nv {
        for r in 1..=q {
            let mut mem = vec!["A".to_string(), mi(i, r)];
            mem.extend(both());
            entries.push((format!("g_{i}^{r}"), mem));
        }
    }
    for i in 1..=nv {
        for r in 1..=q {
            for s in r + 1..=q {
                let mut mem = vec![mi(i, r), mi(i, s)];
                mem.extend(both());
                entries.push((format!("g_{i}^{{{r},{s}}}"), mem));
            }
        }
    }
    for (j, clause) in formula.clauses().iter().enumerate() {
        let mut lits = *clause;
        lits.sort_by_key(|l| l.var);
        let sets: Vec<Vec<usize>> = lits.iter().map(|l| if l.negated { (2..=q).collect() } else { vec![1] }).collect();
        for &y in &sets[0] {
            for &z in &sets[1] {
                for &w in &sets[2] {
                    let mut mem = vec!["B".to_string()];
                    for (l, r) in lits.iter().zip([y, z, w]) {
                        mem.push(mi(l.var + 1, r));
                    }
                    mem.extend(both());
                    entries.push((format!("h_{}^{{{y},{z},{w}}}", j + 1), mem));
                }
            }
        }
    }
    let corners: Vec<GadgetCorner> = entries
        .into_iter()
        .enumerate()
        .map(|(k, (label, members))| GadgetCorner { label, point: Point2::int(k as i64 + 1, -(k as i64 + 1)), members })
        .collect();
    let build = |names: &[String]| -> Result<StaircaseSum> {
        let summands = names
            .iter()
            .map(|name| Staircase::normalize(corners.iter().filter(|c| c.members.contains(name)).map(|c| c.point)))
            .collect::<Result<Vec<_>>>()?;
        StaircaseSum::new(field, summands)
    };
    Ok(SurjectionGadget { m: build(&m_names)?, n: build(&n_names)?, q, num_vars: nv, m_names, n_names, corners })
}
