//! Brute-force oracles and random generators shared by the integration
//! tests. Nothing here calls into the library's algorithms; only its data
//! types are used.

#![allow(dead_code)]

use interleave_forge::ci::CiInstance;
use interleave_forge::field::PrimeField;
use interleave_forge::rational::{Point2, Rational};
use interleave_forge::sat::{Clause3, Cnf3, Literal};
use interleave_forge::staircase::{Staircase, StaircaseSum};
use rand::seq::SliceRandom;
use rand::Rng;

pub type Mat = Vec<Vec<u32>>;

pub fn r(v: i64) -> Rational {
    Rational::int(v)
}

pub fn pt(x: i64, y: i64) -> Point2 {
    Point2::int(x, y)
}

pub fn mat_mul(p: u32, a: &Mat, b: &Mat) -> Mat {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols).map(|j| (0..inner).map(|k| row[k] as u64 * b[k][j] as u64).sum::<u64>() as u32 % p).collect()
        })
        .collect()
}

fn inv_mod(a: u32, p: u32) -> u32 {
    (1..p).find(|&x| a * x % p == 1).expect("nonzero residue")
}

/// Rank by plain elimination mod `p`.
pub fn rank(p: u32, m: &Mat) -> usize {
    let mut m = m.clone();
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..rows).find(|&i| m[i][c] != 0) else { continue };
        m.swap(r, piv);
        let inv = inv_mod(m[r][c], p);
        for v in m[r].iter_mut() {
            *v = *v * inv % p;
        }
        for i in 0..rows {
            if i != r && m[i][c] != 0 {
                let f = m[i][c];
                let pivot = m[r].clone();
                for (x, y) in m[i].iter_mut().zip(&pivot) {
                    *x = (*x + p * p - f * y % p) % p;
                }
            }
        }
        r += 1;
    }
    r
}

/// Every assignment of residues to `slots` positions, in counting order.
pub fn for_each_vector(p: u32, slots: usize, mut f: impl FnMut(&[u32]) -> bool) -> bool {
    let mut v = vec![0u32; slots];
    loop {
        if f(&v) {
            return true;
        }
        let mut k = 0;
        loop {
            if k == slots {
                return false;
            }
            v[k] += 1;
            if v[k] < p {
                break;
            }
            v[k] = 0;
            k += 1;
        }
    }
}

/// Whether some `A` (n x m) and `B` (m x n) with the zero patterns have
/// `AB` agreeing with the identity on `R`. Patterns are 1-based.
pub fn brute_gci(
    p: u32,
    n: usize,
    m: usize,
    zp: &[(usize, usize)],
    zq: &[(usize, usize)],
    rr: &[(usize, usize)],
) -> bool {
    let free_a: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (0..m).map(move |j| (i, j))).filter(|&(i, j)| !zp.contains(&(i + 1, j + 1))).collect();
    let free_b: Vec<(usize, usize)> =
        (0..m).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|&(i, j)| !zq.contains(&(i + 1, j + 1))).collect();
    for_each_vector(p, free_a.len(), |va| {
        let mut a = vec![vec![0; m]; n];
        for (&(i, j), &v) in free_a.iter().zip(va) {
            a[i][j] = v;
        }
        for_each_vector(p, free_b.len(), |vb| {
            let mut b = vec![vec![0; n]; m];
            for (&(i, j), &v) in free_b.iter().zip(vb) {
                b[i][j] = v;
            }
            let prod = mat_mul(p, &a, &b);
            rr.iter().all(|&(i, j)| prod[i - 1][j - 1] == u32::from(i == j))
        })
    })
}

/// Gauss-Jordan inverse mod `p`, or `None` if singular.
pub fn inverse(p: u32, a: &Mat) -> Option<Mat> {
    let n = a.len();
    let mut m: Mat = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| u32::from(i == j)));
            r
        })
        .collect();
    for c in 0..n {
        let piv = (c..n).find(|&i| m[i][c] != 0)?;
        m.swap(c, piv);
        let inv = inv_mod(m[c][c], p);
        for v in m[c].iter_mut() {
            *v = *v * inv % p;
        }
        for i in 0..n {
            if i != c && m[i][c] != 0 {
                let f = m[i][c];
                let pivot = m[c].clone();
                for (x, y) in m[i].iter_mut().zip(&pivot) {
                    *x = (*x + p * p - f * y % p) % p;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// CI by enumerating `A`: the only candidate `B` is its inverse.
pub fn brute_ci(inst: &CiInstance) -> bool {
    let (n, p) = (inst.n, inst.field.modulus());
    let free: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|&(i, j)| !inst.p.contains(&(i + 1, j + 1))).collect();
    for_each_vector(p, free.len(), |v| {
        let mut a = vec![vec![0; n]; n];
        for (&(i, j), &x) in free.iter().zip(v) {
            a[i][j] = x;
        }
        inverse(p, &a).is_some_and(|b| inst.q.iter().all(|&(i, j)| b[i - 1][j - 1] == 0))
    })
}

/// Membership by scanning every corner.
pub fn contains_scan(s: &Staircase, p: &Point2) -> bool {
    s.corners().iter().any(|a| a.x <= p.x && a.y <= p.y)
}

/// Least `eps >= 0` on the half-integer lattice up to `lim` with every
/// corner of `s` inside `t` after moving it up by `eps`.
pub fn ds_by_membership(s: &Staircase, t: &Staircase, lim: i64) -> Option<Rational> {
    (0..=2 * lim).map(|k| Rational::frac(k, 2)).find(|&e| s.corners().iter().all(|a| contains_scan(t, &a.diag(e))))
}

pub fn sat_eval(f: &Cnf3, v: &[bool]) -> bool {
    f.clauses().iter().all(|c| c.iter().any(|l| v[l.var] != l.negated))
}

pub fn sat_brute(f: &Cnf3) -> Option<Vec<bool>> {
    let n = f.num_vars();
    (0u64..1 << n).map(|mask| (0..n).map(|i| mask >> i & 1 == 1).collect::<Vec<_>>()).find(|v| sat_eval(f, v))
}

pub fn random_staircase(rng: &mut impl Rng, max_corners: usize, lo: i64, hi: i64) -> Staircase {
    let k = rng.gen_range(1..=max_corners);
    Staircase::normalize((0..k).map(|_| pt(rng.gen_range(lo..=hi), rng.gen_range(lo..=hi)))).unwrap()
}

pub fn random_sum(
    rng: &mut impl Rng,
    summands: usize,
    max_corners: usize,
    lo: i64,
    hi: i64,
    field: PrimeField,
) -> StaircaseSum {
    StaircaseSum::new(field, (0..summands).map(|_| random_staircase(rng, max_corners, lo, hi)).collect()).unwrap()
}

/// A random 3CNF with distinct variables in each clause.
pub fn random_formula(rng: &mut impl Rng, n: usize, m: usize) -> Cnf3 {
    let vars: Vec<usize> = (0..n).collect();
    let clauses: Vec<Clause3> = (0..m)
        .map(|_| {
            let pick: Vec<usize> = vars.choose_multiple(rng, 3).copied().collect();
            let lit = |v: usize, neg: bool| if neg { Literal::neg(v) } else { Literal::pos(v) };
            [lit(pick[0], rng.gen()), lit(pick[1], rng.gen()), lit(pick[2], rng.gen())]
        })
        .collect();
    Cnf3::new(n, clauses).unwrap()
}

/// Membership signatures `(source members, target members)` of two sums at
/// every point of the product of all corner coordinates. Spaces and maps of
/// staircase sums are constant on the cells of that grid.
pub fn grid_signatures(m: &StaircaseSum, n: &StaircaseSum) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut xs: Vec<Rational> = Vec::new();
    let mut ys: Vec<Rational> = Vec::new();
    for s in m.summands.iter().chain(&n.summands) {
        for c in s.corners() {
            xs.push(c.x);
            ys.push(c.y);
        }
    }
    xs.sort();
    xs.dedup();
    ys.sort();
    ys.dedup();
    let mut out = Vec::new();
    for &x in &xs {
        for &y in &ys {
            let p = Point2::new(x, y);
            let i: Vec<usize> = (0..m.len()).filter(|&k| contains_scan(&m.summands[k], &p)).collect();
            let j: Vec<usize> = (0..n.len()).filter(|&k| contains_scan(&n.summands[k], &p)).collect();
            out.push((i, j));
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Full enumeration of matrix morphisms between staircase sums: a
/// surjection exists iff some matrix, zero where the source summand is not
/// inside the target summand, has full row rank on every signature.
pub fn brute_surjection_exists(m: &StaircaseSum, n: &StaircaseSum) -> bool {
    let p = m.field.modulus();
    let sigs = grid_signatures(m, n);
    // Allowed entries: source summand i inside target summand j, tested by
    // corner membership.
    let free: Vec<(usize, usize)> = (0..n.len())
        .flat_map(|j| (0..m.len()).map(move |i| (j, i)))
        .filter(|&(j, i)| m.summands[i].corners().iter().all(|a| contains_scan(&n.summands[j], a)))
        .collect();
    for_each_vector(p, free.len(), |v| {
        let mut f = vec![vec![0u32; m.len()]; n.len()];
        for (&(j, i), &x) in free.iter().zip(v) {
            f[j][i] = x;
        }
        sigs.iter().all(|(is, js)| {
            let sub: Mat = js.iter().map(|&j| is.iter().map(|&i| f[j][i]).collect()).collect();
            rank(p, &sub) == js.len()
        })
    })
}
