//! Interleavings.
//!
//! For sums of staircase modules an `eps`-interleaving is a pair of matrices
//! that are mutually inverse and vanish wherever the directed shift distance
//! between the summands exceeds `eps`, so deciding one is a CI instance. For
//! general presentations the deciders search the two Hom spaces directly.
//! Also here: the CI-to-modules gadget and the indecomposable wrap.

use std::collections::BTreeSet;

use crate::ci::{solve_ci, CiInstance, Pattern, SolveOutcome};
use crate::error::{Error, Result};
use crate::field::{FieldMatrix, PrimeField};
use crate::presentation::{hom_space, GradedPresentation, Morphism, Relation, SpaceCache};
use crate::rational::{Point2, Rational};
use crate::staircase::{dshift_distance, Staircase, StaircaseSum};

/// A morphism between staircase sums: entry `(j, i)` is the coefficient of
/// source summand `i` into target summand `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorphismMatrix {
    pub matrix: FieldMatrix,
    pub source_shape: usize,
    pub target_shape: usize,
}

impl MorphismMatrix {
    pub fn new(matrix: FieldMatrix) -> Self {
        MorphismMatrix { source_shape: matrix.cols(), target_shape: matrix.rows(), matrix }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        MorphismMatrix::new(FieldMatrix::identity(field, n))
    }

    /// Every nonzero entry `(j, i)` has `d_s(S_i, T_j) <= eps`.
    pub fn respects(&self, source: &StaircaseSum, target: &StaircaseSum, eps: Rational) -> bool {
        if self.source_shape != source.len() || self.target_shape != target.len() {
            return false;
        }
        (0..self.target_shape).all(|j| {
            (0..self.source_shape)
                .all(|i| self.matrix.get(j, i) == 0 || dshift_distance(&source.summands[i], &target.summands[j]) <= eps)
        })
    }

    /// The same morphism as generator images from `source` into
    /// `target^eps`, for use with the presentation machinery.
    pub fn to_morphism(&self, source: &StaircaseSum, target: &StaircaseSum, eps: Rational) -> Result<Morphism> {
        if !self.respects(source, target, eps) {
            return Err(Error::Precondition(format!("matrix is not a morphism at shift {eps}")));
        }
        let f = source.field;
        let t_offsets = offsets(target);
        let width: usize = target.summands.iter().map(Staircase::len).sum();
        let mut images = Vec::new();
        for (i, s) in source.summands.iter().enumerate() {
            for c in s.corners() {
                let at = c.diag(eps);
                let mut img = vec![0; width];
                for (j, t) in target.summands.iter().enumerate() {
                    let coef = self.matrix.get(j, i);
                    if coef == 0 {
                        continue;
                    }
                    let b = t.corners().iter().position(|b| b.leq(&at)).expect("containment checked");
                    img[t_offsets[j] + b] = f.add(img[t_offsets[j] + b], coef);
                }
                images.push(img);
            }
        }
        Ok(Morphism { images })
    }
}

/// Index of each summand's first generator in the sum's presentation.
pub(crate) fn offsets(sum: &StaircaseSum) -> Vec<usize> {
    let mut out = Vec::with_capacity(sum.len());
    let mut acc = 0;
    for s in &sum.summands {
        out.push(acc);
        acc += s.len();
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// `f: M -> N^eps` and `g: N -> M^eps` as summand matrices.
    Matrices { f: MorphismMatrix, g: MorphismMatrix },
    /// Generator images.
    Presented { f: Morphism, g: Morphism },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterleavingCertificate {
    pub eps: Rational,
    pub witness: Witness,
}

/// Answer of a bounded decision procedure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decision<T> {
    Yes(T),
    No,
    BudgetExceeded { nodes: u64 },
}

impl<T> Decision<T> {
    pub fn is_yes(&self) -> bool {
        matches!(self, Decision::Yes(_))
    }

    pub fn witness(&self) -> Option<&T> {
        match self {
            Decision::Yes(w) => Some(w),
            _ => None,
        }
    }

    /// `Some(answer)` unless the budget ran out.
    pub fn answer(&self) -> Option<bool> {
        match self {
            Decision::Yes(_) => Some(true),
            Decision::No => Some(false),
            Decision::BudgetExceeded { .. } => None,
        }
    }
}

fn check_square(m: &StaircaseSum, n: &StaircaseSum) -> Result<()> {
    if m.field != n.field {
        return Err(Error::FieldMismatch(m.field.modulus(), n.field.modulus()));
    }
    if m.len() != n.len() {
        return Err(Error::Dimension(format!("{} summands against {}", m.len(), n.len())));
    }
    Ok(())
}

/// Entries forced to zero at `eps`: `P` holds `(i, j)` with
/// `d_s(S_i, T_j) > eps` and `Q` holds `(j, i)` with `d_s(T_j, S_i) > eps`.
/// 1-based.
pub fn pattern_at(m: &StaircaseSum, n: &StaircaseSum, eps: Rational) -> Result<(Pattern, Pattern)> {
    check_square(m, n)?;
    let forward = m.distance_matrix(n);
    let backward = n.distance_matrix(m);
    let k = m.len();
    let mut p = Pattern::new();
    let mut q = Pattern::new();
    for a in 0..k {
        for b in 0..k {
            if forward[a][b] > eps {
                p.insert((a + 1, b + 1));
            }
            if backward[a][b] > eps {
                q.insert((a + 1, b + 1));
            }
        }
    }
    Ok((p, q))
}

/// Decides whether the two sums are `eps`-interleaved by solving the CI
/// instance of [`pattern_at`]. The certificate's `f` is `A^T` and `g` is
/// `B^T` for the CI solution `(A, B)`.
pub fn decide_interleaving_staircase(
    m: &StaircaseSum,
    n: &StaircaseSum,
    eps: Rational,
    budget: u64,
) -> Result<Decision<InterleavingCertificate>> {
    let (p, q) = pattern_at(m, n, eps)?;
    let k = m.len();
    let f = m.field;
    let diagonal_ok = (1..=k).all(|i| !p.contains(&(i, i)) && !q.contains(&(i, i)));
    if diagonal_ok {
        let id = MorphismMatrix::identity(f, k);
        return Ok(Decision::Yes(InterleavingCertificate { eps, witness: Witness::Matrices { f: id.clone(), g: id } }));
    }
    let inst = CiInstance::new(k, f, p, q)?;
    Ok(match solve_ci(&inst, budget)? {
        SolveOutcome::Solved(sol) => Decision::Yes(InterleavingCertificate {
            eps,
            witness: Witness::Matrices {
                f: MorphismMatrix::new(sol.a.transpose()),
                g: MorphismMatrix::new(sol.b.transpose()),
            },
        }),
        SolveOutcome::NoSolution => Decision::No,
        SolveOutcome::BudgetExceeded { nodes } => Decision::BudgetExceeded { nodes },
    })
}

/// Re-checks a certificate against the two sums (matrix witnesses) or
/// their presentations (generator witnesses).
pub fn verify_certificate(m: &StaircaseSum, n: &StaircaseSum, cert: &InterleavingCertificate) -> Result<bool> {
    match &cert.witness {
        Witness::Matrices { f, g } => {
            if !f.respects(m, n, cert.eps) || !g.respects(n, m, cert.eps) {
                return Ok(false);
            }
            let gf = g.matrix.mul(&f.matrix)?;
            let fg = f.matrix.mul(&g.matrix)?;
            Ok(gf == FieldMatrix::identity(m.field, m.len()) && fg == FieldMatrix::identity(n.field, n.len()))
        }
        Witness::Presented { f, g } => Ok(verify_presented(&m.presentation(), &n.presentation(), f, g, cert.eps)),
    }
}

/// `{0}` together with every directed shift distance between summands, in
/// both directions, ascending.
pub fn candidate_eps(m: &StaircaseSum, n: &StaircaseSum) -> Vec<Rational> {
    let mut set = BTreeSet::from([Rational::ZERO]);
    for row in m.distance_matrix(n).into_iter().chain(n.distance_matrix(m)) {
        set.extend(row);
    }
    set.into_iter().collect()
}

/// Interleaving distance between two sums with the same number of summands.
pub fn interleaving_distance_staircase(m: &StaircaseSum, n: &StaircaseSum, budget: u64) -> Result<Rational> {
    Ok(staircase_distance_certified(m, n, budget, 1)?.0)
}

/// The distance with a certificate at that distance. Candidates are tried in
/// ascending order, `threads` at a time; the smallest feasible one wins.
pub fn staircase_distance_certified(
    m: &StaircaseSum,
    n: &StaircaseSum,
    budget: u64,
    threads: usize,
) -> Result<(Rational, InterleavingCertificate)> {
    check_square(m, n)?;
    let candidates = candidate_eps(m, n);
    for chunk in candidates.chunks(threads.max(1)) {
        let results: Vec<Result<Decision<InterleavingCertificate>>> = if chunk.len() == 1 {
            vec![decide_interleaving_staircase(m, n, chunk[0], budget)]
        } else {
            std::thread::scope(|scope| {
                let handles: Vec<_> = chunk
                    .iter()
                    .map(|&eps| scope.spawn(move || decide_interleaving_staircase(m, n, eps, budget)))
                    .collect();
                handles.into_iter().map(|h| h.join().expect("decider thread panicked")).collect()
            })
        };
        for (eps, res) in chunk.iter().zip(results) {
            match res? {
                Decision::Yes(cert) => return Ok((*eps, cert)),
                Decision::No => {}
                Decision::BudgetExceeded { nodes } => return Err(Error::BudgetExceeded(nodes)),
            }
        }
    }
    unreachable!("the largest candidate admits the identity")
}

/// Whether `f: M -> N^eps` and `g: N -> M^eps` are morphisms whose
/// composites are the `2 eps` internal maps, checked on generators.
pub fn verify_presented(
    m: &GradedPresentation,
    n: &GradedPresentation,
    f: &Morphism,
    g: &Morphism,
    eps: Rational,
) -> bool {
    let field = m.field();
    let two = eps + eps;
    f.is_valid(m, &n.shifted(eps))
        && g.is_valid(n, &m.shifted(eps))
        && f.then(g, field).equals_in(&Morphism::identity(m), m, m, two)
        && g.then(f, field).equals_in(&Morphism::identity(n), n, n, two)
}

/// Coordinates of each generator's image, at that generator's grade plus
/// `shift`, concatenated.
fn flat_coords(mor: &Morphism, source: &GradedPresentation, cache: &mut SpaceCache, shift: Rational) -> Vec<u32> {
    let f = source.field();
    let mut out = Vec::new();
    for (img, g) in mor.images.iter().zip(source.generators()) {
        out.extend(cache.get(&g.diag(shift)).coords(f, img));
    }
    out
}

/// Decides `eps`-interleaving of two presentations.
///
/// Morphisms in the smaller of the two Hom spaces are enumerated; for each,
/// both composite conditions are linear in the coordinates of the other
/// morphism and are solved exactly. `budget` caps the number of enumerated
/// morphisms.
pub fn decide_interleaving_presented(
    m: &GradedPresentation,
    n: &GradedPresentation,
    eps: Rational,
    budget: u64,
) -> Result<Decision<InterleavingCertificate>> {
    if m.field() != n.field() {
        return Err(Error::FieldMismatch(m.field().modulus(), n.field().modulus()));
    }
    let field = m.field();
    let hom_mn = hom_space(m, &n.shifted(eps))?;
    let hom_nm = hom_space(n, &m.shifted(eps))?;
    // Enumerate the side with the smaller basis; `x` is the enumerated
    // module, `y` the other.
    let swap = hom_nm.len() < hom_mn.len();
    let (x, y, enum_basis, solve_basis) = if swap { (n, m, &hom_nm, &hom_mn) } else { (m, n, &hom_mn, &hom_nm) };
    let two = eps + eps;
    let mut cache_x = SpaceCache::new(x);
    let mut cache_y = SpaceCache::new(y);
    let target_x = flat_coords(&Morphism::identity(x), x, &mut cache_x, two);
    let target_y = flat_coords(&Morphism::identity(y), y, &mut cache_y, two);
    let rows = target_x.len() + target_y.len();
    // For basis elements a of the enumerated space and b of the other:
    // the composites b∘a on x and a∘b on y, flattened.
    let pair: Vec<Vec<Vec<u32>>> = enum_basis
        .iter()
        .map(|a| {
            solve_basis
                .iter()
                .map(|b| {
                    let mut v = flat_coords(&a.then(b, field), x, &mut cache_x, two);
                    v.extend(flat_coords(&b.then(a, field), y, &mut cache_y, two));
                    v
                })
                .collect()
        })
        .collect();
    let mut rhs = target_x;
    rhs.extend(target_y);
    let d = enum_basis.len();
    let size = field.size() as u64;
    let total = u32::try_from(d).ok().and_then(|d| size.checked_pow(d));
    let mut coeffs = vec![0u32; d];
    let mut nodes = 0u64;
    loop {
        nodes += 1;
        if nodes > budget {
            return Ok(Decision::BudgetExceeded { nodes: budget });
        }
        let mut system = FieldMatrix::zeros(field, rows, solve_basis.len());
        for (l, _) in solve_basis.iter().enumerate() {
            let mut col = vec![0u32; rows];
            for (k, &c) in coeffs.iter().enumerate() {
                if c != 0 {
                    field.axpy(&mut col, c, &pair[k][l]);
                }
            }
            for (r, v) in col.into_iter().enumerate() {
                system.set(r, l, v);
            }
        }
        if let Some(sol) = system.solve(&rhs) {
            let a = Morphism::combine(enum_basis, &coeffs, field, x.num_generators(), y.num_generators());
            let b = Morphism::combine(solve_basis, &sol, field, y.num_generators(), x.num_generators());
            let (f, g) = if swap { (b, a) } else { (a, b) };
            debug_assert!(verify_presented(m, n, &f, &g, eps));
            return Ok(Decision::Yes(InterleavingCertificate { eps, witness: Witness::Presented { f, g } }));
        }
        if !advance(&mut coeffs, field) {
            break;
        }
    }
    debug_assert!(total.is_none_or(|t| t == nodes));
    Ok(Decision::No)
}

/// Next coefficient vector in little-endian counting order.
pub(crate) fn advance(v: &mut [u32], field: PrimeField) -> bool {
    for c in v.iter_mut() {
        *c += 1;
        if *c < field.modulus() {
            return true;
        }
        *c = 0;
    }
    false
}

/// Staircases realizing a CI instance: `d_s(S_i, T_j)` is 3 for `(i, j)` in
/// `P` and 1 otherwise, `d_s(T_j, S_i)` is 3 for `(j, i)` in `Q` and 1
/// otherwise.
///
/// Both base staircases use the antidiagonal points `(-t, t)` for even `t`
/// in `[-4n², 4n²]`; base `S` moves its `t < 0` points down by `(1, 1)`,
/// base `T` its `t > 0` points. The `k`-th entry of `P` (row-major, from
/// 0) owns `t = 4k + 2`, the `k`-th entry of `Q` owns `t = -(4k + 2)`, so
/// owned points never touch. Moved corners can dominate their neighbours,
/// which normalization then drops.
pub fn ci_to_modules(inst: &CiInstance) -> Result<(StaircaseSum, StaircaseSum)> {
    let n = inst.n as i64;
    if n < 1 {
        return Err(Error::Precondition("gadget needs n >= 1".into()));
    }
    let bound = 4 * n * n;
    if inst.p.len() as i64 > n * n || inst.q.len() as i64 > n * n {
        return Err(Error::Precondition("pattern larger than n²".into()));
    }
    let ts: Vec<i64> = (-bound..=bound).step_by(2).collect();
    let base_s = |t: i64| if t < 0 { Point2::int(-t - 1, t - 1) } else { Point2::int(-t, t) };
    let base_t = |t: i64| if t > 0 { Point2::int(-t - 1, t - 1) } else { Point2::int(-t, t) };
    let d2 = Rational::int(2);
    let build = |base: &dyn Fn(i64) -> Point2, moves: &[(i64, Rational)]| -> Result<Staircase> {
        Staircase::normalize(ts.iter().map(|&t| match moves.iter().find(|(mt, _)| *mt == t) {
            Some(&(_, d)) => base(t).diag(d),
            None => base(t),
        }))
    };
    let p_t = |k: usize| 4 * k as i64 + 2;
    let q_t = |k: usize| -(4 * k as i64 + 2);
    let mut ss = Vec::new();
    let mut tt = Vec::new();
    for idx in 1..=inst.n {
        let mut s_moves = Vec::new();
        let mut t_moves = Vec::new();
        for (k, &(i, j)) in inst.p.iter().enumerate() {
            if i == idx {
                s_moves.push((p_t(k), -d2));
            }
            if j == idx {
                t_moves.push((p_t(k), d2));
            }
        }
        for (k, &(j, i)) in inst.q.iter().enumerate() {
            if i == idx {
                s_moves.push((q_t(k), d2));
            }
            if j == idx {
                t_moves.push((q_t(k), -d2));
            }
        }
        ss.push(build(&base_s, &s_moves)?);
        tt.push(build(&base_t, &t_moves)?);
    }
    Ok((StaircaseSum::new(inst.field, ss)?, StaircaseSum::new(inst.field, tt)?))
}

/// The levels `s_i = x + 7 + i/(n+1)` for `i = 0..=n+1`.
pub fn wrap_levels(x: Rational, n: usize) -> Vec<Rational> {
    let seven = Rational::int(7);
    (0..=n + 1).map(|i| x + seven + Rational::frac(i as i64, n as i64 + 1)).collect()
}

/// Wrap with `x` one past the sum's largest corner coordinate.
pub fn indecomposable_wrap(sum: &StaircaseSum) -> Result<GradedPresentation> {
    indecomposable_wrap_at(sum, sum.max_coord() + Rational::ONE)
}

/// Two wraps sharing one `x`, as interleaving comparisons need.
pub fn wrap_pair(m: &StaircaseSum, n: &StaircaseSum) -> Result<(GradedPresentation, GradedPresentation)> {
    let x = m.max_coord().max(n.max_coord()) + Rational::ONE;
    Ok((indecomposable_wrap_at(m, x)?, indecomposable_wrap_at(n, x)?))
}

/// An indecomposable module that agrees with the sum below
/// `(x+7, x+7)`. Above that, the `n+1` unit squares along the antidiagonal
/// carry one dimension each (the sum of all coordinates on the first, the
/// `i`-th coordinate on square `i`) and everything beyond them is zero.
pub fn indecomposable_wrap_at(sum: &StaircaseSum, x: Rational) -> Result<GradedPresentation> {
    let n = sum.len();
    if n == 0 {
        return Err(Error::Precondition("wrap of an empty sum".into()));
    }
    if x <= sum.max_coord() {
        return Err(Error::Precondition(format!("x = {x} must exceed every corner coordinate")));
    }
    let field = sum.field;
    let base = sum.presentation();
    let gens = base.generators().to_vec();
    let first = offsets(sum);
    let width = gens.len();
    let s = wrap_levels(x, n);
    let unit = |k: usize| {
        let mut v = vec![0; width];
        v[k] = 1;
        v
    };
    let mut relations = base.relations().to_vec();
    let corner0 = Point2::new(s[0], s[n]);
    for j in 1..n {
        let mut c = vec![0; width];
        c[first[j]] = 1;
        c[first[0]] = field.neg(1);
        relations.push(Relation { grade: corner0, coeffs: c });
    }
    for i in 1..=n {
        let grade = Point2::new(s[i], s[n - i]);
        for j in (0..n).filter(|&j| j + 1 != i) {
            relations.push(Relation { grade, coeffs: unit(first[j]) });
        }
    }
    let partial = GradedPresentation::new(field, gens.clone(), relations.clone())?;
    for i in 0..=n + 1 {
        let grade = Point2::new(s[i], s[n + 1 - i]);
        for &b in partial.space_at(&grade).basis() {
            relations.push(Relation { grade, coeffs: unit(b) });
        }
    }
    GradedPresentation::new(field, gens, relations)
}

/// The dimension the wrap should have at `p`, read off the case definition
/// and staircase membership alone.
pub fn wrap_expected_dim(sum: &StaircaseSum, x: Rational, p: &Point2) -> usize {
    let n = sum.len();
    let s = wrap_levels(x, n);
    if (0..=n + 1).any(|i| Point2::new(s[i], s[n + 1 - i]).leq(p)) {
        return 0;
    }
    let in_square = (0..=n).any(|i| s[i] <= p.x && p.x < s[i + 1] && s[n - i] <= p.y && p.y < s[n - i + 1]);
    if in_square {
        return 1;
    }
    sum.summands.iter().filter(|t| t.contains(p)).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ci::{solve_ci_by_inverse, verify_ci, DEFAULT_BUDGET};
    use crate::presentation::eval_dim;

    fn r(v: i64) -> Rational {
        Rational::int(v)
    }

    fn gf2() -> PrimeField {
        PrimeField::gf2()
    }

    fn single(x: i64, y: i64) -> StaircaseSum {
        StaircaseSum::new(gf2(), vec![Staircase::single(Point2::int(x, y))]).unwrap()
    }

    fn worked_unsolvable(f: PrimeField) -> CiInstance {
        CiInstance::new(3, f, [(1, 1), (1, 3)], [(2, 1)]).unwrap()
    }

    #[test]
    fn pattern_empty_at_large_eps() {
        let (m, n) = ci_to_modules(&worked_unsolvable(gf2())).unwrap();
        let (p, q) = pattern_at(&m, &n, r(3)).unwrap();
        assert!(p.is_empty() && q.is_empty());
    }

    #[test]
    fn pattern_at_one_recovers_instance() {
        let inst = worked_unsolvable(gf2());
        let (m, n) = ci_to_modules(&inst).unwrap();
        let (p, q) = pattern_at(&m, &n, r(1)).unwrap();
        assert_eq!(p, inst.p);
        assert_eq!(q, inst.q);
    }

    #[test]
    fn pattern_at_half_forbids_everything() {
        let (m, n) = ci_to_modules(&worked_unsolvable(gf2())).unwrap();
        let (p, q) = pattern_at(&m, &n, Rational::frac(1, 2)).unwrap();
        assert_eq!(p.len(), 9);
        assert_eq!(q.len(), 9);
    }

    #[test]
    fn pattern_rejects_unequal_counts() {
        let two = StaircaseSum::new(gf2(), vec![Staircase::single(Point2::int(0, 0)); 2]).unwrap();
        assert!(pattern_at(&single(0, 0), &two, r(1)).is_err());
    }

    #[test]
    fn gadget_trivial_instance_is_base_pair() {
        let inst = CiInstance::new(1, gf2(), [], []).unwrap();
        let (m, n) = ci_to_modules(&inst).unwrap();
        assert_eq!(m.summands[0].len(), 5);
        assert_eq!(n.summands[0].len(), 5);
        assert_eq!(m.distance_matrix(&n), vec![vec![r(1)]]);
        assert_eq!(n.distance_matrix(&m), vec![vec![r(1)]]);
        assert_eq!(interleaving_distance_staircase(&m, &n, DEFAULT_BUDGET).unwrap(), r(1));
    }

    #[test]
    fn gadget_single_forbidden_entry() {
        let inst = CiInstance::new(1, gf2(), [(1, 1)], []).unwrap();
        let (m, n) = ci_to_modules(&inst).unwrap();
        assert_eq!(m.distance_matrix(&n), vec![vec![r(3)]]);
        assert_eq!(n.distance_matrix(&m), vec![vec![r(1)]]);
        assert_eq!(interleaving_distance_staircase(&m, &n, DEFAULT_BUDGET).unwrap(), r(3));
    }

    /// Distances 3 on the pattern and 1 elsewhere, for every 2x2 pattern.
    #[test]
    fn gadget_distance_matrix_all_two_by_two() {
        for pb in 0..16u64 {
            for qb in 0..16u64 {
                let inst = CiInstance::from_bits(2, gf2(), pb, qb);
                let (m, n) = ci_to_modules(&inst).unwrap();
                let fw = m.distance_matrix(&n);
                let bw = n.distance_matrix(&m);
                for a in 0..2 {
                    for b in 0..2 {
                        let want_p = if inst.p.contains(&(a + 1, b + 1)) { 3 } else { 1 };
                        let want_q = if inst.q.contains(&(a + 1, b + 1)) { 3 } else { 1 };
                        assert_eq!(fw[a][b], r(want_p), "P {pb} Q {qb}");
                        assert_eq!(bw[a][b], r(want_q), "P {pb} Q {qb}");
                    }
                }
            }
        }
    }

    #[test]
    fn staircase_decider_on_gadgets() {
        let f = PrimeField::gf3();
        let solvable = CiInstance::new(3, f, [(2, 2), (3, 3)], [(2, 3), (3, 2)]).unwrap();
        let (m, n) = ci_to_modules(&solvable).unwrap();
        let d = decide_interleaving_staircase(&m, &n, r(1), DEFAULT_BUDGET).unwrap();
        let cert = d.witness().expect("solvable instance interleaves at 1");
        assert!(verify_certificate(&m, &n, cert).unwrap());

        let (m, n) = ci_to_modules(&worked_unsolvable(f)).unwrap();
        assert_eq!(decide_interleaving_staircase(&m, &n, r(1), DEFAULT_BUDGET).unwrap(), Decision::No);
        let d = decide_interleaving_staircase(&m, &n, r(3), DEFAULT_BUDGET).unwrap();
        assert!(verify_certificate(&m, &n, d.witness().unwrap()).unwrap());
    }

    #[test]
    fn certificate_matrices_solve_the_pattern_instance() {
        let f = gf2();
        for pb in [0b0110u64, 0b1001, 0b0001] {
            let inst = CiInstance::from_bits(2, f, pb, 0b0010);
            let (m, n) = ci_to_modules(&inst).unwrap();
            if let Decision::Yes(cert) = decide_interleaving_staircase(&m, &n, r(1), DEFAULT_BUDGET).unwrap() {
                let Witness::Matrices { f: fm, g: gm } = cert.witness else { panic!("matrix witness") };
                let sol = crate::ci::CiSolution { a: fm.matrix.transpose(), b: gm.matrix.transpose() };
                assert!(verify_ci(&inst, &sol).unwrap());
            }
        }
    }

    #[test]
    fn identical_sums_at_zero_give_identity() {
        let (m, _) = ci_to_modules(&worked_unsolvable(gf2())).unwrap();
        let d = decide_interleaving_staircase(&m, &m, r(0), DEFAULT_BUDGET).unwrap();
        let id = MorphismMatrix::identity(gf2(), 3);
        assert_eq!(
            d,
            Decision::Yes(InterleavingCertificate { eps: r(0), witness: Witness::Matrices { f: id.clone(), g: id } })
        );
        assert_eq!(interleaving_distance_staircase(&m, &m, DEFAULT_BUDGET).unwrap(), r(0));
    }

    #[test]
    fn single_staircases_two_apart() {
        let (a, b) = (single(0, 0), single(2, 2));
        assert_eq!(interleaving_distance_staircase(&a, &b, DEFAULT_BUDGET).unwrap(), r(2));
        let (pa, pb) = (a.presentation(), b.presentation());
        assert_eq!(decide_interleaving_presented(&pa, &pb, r(1), 1000).unwrap(), Decision::No);
        let d = decide_interleaving_presented(&pa, &pb, r(2), 1000).unwrap();
        assert!(verify_certificate(&a, &b, d.witness().unwrap()).unwrap());
    }

    #[test]
    fn presented_identity_at_zero() {
        let (m, _) = ci_to_modules(&worked_unsolvable(gf2())).unwrap();
        let pm = m.presentation();
        assert!(decide_interleaving_presented(&pm, &pm, r(0), 1000).unwrap().is_yes());
    }

    #[test]
    fn presented_gadget_one_by_one() {
        let inst = CiInstance::new(1, gf2(), [(1, 1)], []).unwrap();
        let (m, n) = ci_to_modules(&inst).unwrap();
        let (pm, pn) = (m.presentation(), n.presentation());
        assert_eq!(decide_interleaving_presented(&pm, &pn, r(1), 1000).unwrap(), Decision::No);
        assert!(decide_interleaving_presented(&pm, &pn, r(3), 1000).unwrap().is_yes());
    }

    #[test]
    fn presented_budget_is_reported() {
        // The zero morphism is tried first and fails; the second candidate
        // is over budget.
        let a = single(0, 0).presentation();
        let d = decide_interleaving_presented(&a, &a, r(0), 1).unwrap();
        assert_eq!(d, Decision::BudgetExceeded { nodes: 1 });
        assert!(decide_interleaving_presented(&a, &a, r(0), 2).unwrap().is_yes());
    }

    #[test]
    fn matrix_witness_converts_to_valid_generator_images() {
        let inst = CiInstance::new(3, PrimeField::gf3(), [(2, 2), (3, 3)], [(2, 3), (3, 2)]).unwrap();
        let (m, n) = ci_to_modules(&inst).unwrap();
        let Decision::Yes(cert) = decide_interleaving_staircase(&m, &n, r(1), DEFAULT_BUDGET).unwrap() else {
            panic!("solvable")
        };
        let Witness::Matrices { f, g } = cert.witness else { panic!() };
        let fm = f.to_morphism(&m, &n, r(1)).unwrap();
        let gm = g.to_morphism(&n, &m, r(1)).unwrap();
        assert!(verify_presented(&m.presentation(), &n.presentation(), &fm, &gm, r(1)));
    }

    #[test]
    fn agrees_with_inverse_enumeration_on_small_gadgets() {
        for pb in 0..16u64 {
            let inst = CiInstance::from_bits(2, gf2(), pb, 0b1000);
            let (m, n) = ci_to_modules(&inst).unwrap();
            let d = interleaving_distance_staircase(&m, &n, DEFAULT_BUDGET).unwrap();
            let solvable = solve_ci_by_inverse(&inst, DEFAULT_BUDGET).unwrap().is_solved();
            assert_eq!(d, if solvable { r(1) } else { r(3) });
        }
    }

    #[test]
    fn threaded_scan_matches_sequential() {
        for pb in [0u64, 0b0110, 0b1111] {
            let inst = CiInstance::from_bits(2, gf2(), pb, 0b0001);
            let (m, n) = ci_to_modules(&inst).unwrap();
            let one = staircase_distance_certified(&m, &n, DEFAULT_BUDGET, 1).unwrap();
            let four = staircase_distance_certified(&m, &n, DEFAULT_BUDGET, 4).unwrap();
            assert_eq!(one, four);
        }
    }

    #[test]
    fn wrap_levels_have_denominator_n_plus_one() {
        let s = wrap_levels(r(0), 2);
        assert_eq!(s, vec![r(7), Rational::frac(22, 3), Rational::frac(23, 3), r(8)]);
    }

    #[test]
    fn wrap_dimensions_follow_case_definition() {
        let inst = CiInstance::from_bits(2, gf2(), 0b0110, 0b0001);
        let (m, _) = ci_to_modules(&inst).unwrap();
        let x = m.max_coord() + Rational::ONE;
        let w = indecomposable_wrap_at(&m, x).unwrap();
        let s = wrap_levels(x, 2);
        let third = Rational::frac(1, 6);
        // Centres of the three squares.
        for i in 0..=2 {
            let p = Point2::new(s[i] + third, s[2 - i] + third);
            assert_eq!(eval_dim(&w, &p), 1);
        }
        // Beyond the zero corners.
        for i in 0..=3 {
            let p = Point2::new(s[i] + third, s[3 - i] + third);
            assert_eq!(eval_dim(&w, &p), 0);
        }
        let u = Point2::new(x, x);
        assert_eq!(eval_dim(&w, &u), 2);
        let step = Rational::frac(1, 2);
        let lo = -m.max_abs_coord() - r(1);
        let mut count = 0;
        let mut px = lo;
        while px <= s[3] + r(1) {
            let mut py = lo;
            while py <= s[3] + r(1) {
                let p = Point2::new(px, py);
                assert_eq!(eval_dim(&w, &p), wrap_expected_dim(&m, x, &p), "at {p}");
                count += 1;
                py = py + step;
            }
            px = px + step;
        }
        assert!(count >= 50);
    }

    #[test]
    fn wrap_is_indecomposable() {
        let inst = CiInstance::from_bits(2, gf2(), 0b0110, 0b0001);
        let (m, n) = ci_to_modules(&inst).unwrap();
        let (wm, wn) = wrap_pair(&m, &n).unwrap();
        assert_eq!(hom_space(&wm, &wm).unwrap().len(), 1);
        assert_eq!(hom_space(&wn, &wn).unwrap().len(), 1);
        // The unwrapped sum has a larger endomorphism space.
        assert!(hom_space(&m.presentation(), &m.presentation()).unwrap().len() >= 2);
    }

    #[test]
    fn wrap_preserves_interleaving_on_small_gadgets() {
        for (pb, qb) in [(0b0000u64, 0b0000u64), (0b0110, 0b0001), (0b1001, 0b0110), (0b0011, 0b0000)] {
            let inst = CiInstance::from_bits(2, gf2(), pb, qb);
            let (m, n) = ci_to_modules(&inst).unwrap();
            let (wm, wn) = wrap_pair(&m, &n).unwrap();
            for eps in [r(1), r(3)] {
                let want = decide_interleaving_staircase(&m, &n, eps, DEFAULT_BUDGET).unwrap().is_yes();
                let got = decide_interleaving_presented(&wm, &wn, eps, 1 << 20).unwrap();
                assert_eq!(got.is_yes(), want, "P {pb} Q {qb} eps {eps}");
            }
        }
    }

    #[test]
    fn wrap_rejects_small_x() {
        let (m, _) = ci_to_modules(&CiInstance::new(1, gf2(), [], []).unwrap()).unwrap();
        assert!(indecomposable_wrap_at(&m, r(0)).is_err());
        assert!(indecomposable_wrap(&m).is_ok());
    }
}
