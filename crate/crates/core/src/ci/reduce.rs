//! GCI to CI, and 3SAT to GCI.

use super::{CiInstance, CiSolution, GciInstance, Pattern};
use crate::error::{Error, Result};
use crate::field::{complete_to_inverse, FieldMatrix, PrimeField};
use crate::sat::{Assignment, Cnf3};

/// Where the GCI unknowns sit inside the CI instance built by [`gci_to_ci`].
///
/// The CI left matrix is `[A | I*]` over `m` unconstrained rows; the right
/// matrix is `[B; C]` beside `n` unconstrained columns. `A` is the top-left
/// `n x m` block on the left, `B` the top-left `m x n` block on the right.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GciEmbedding {
    pub n: usize,
    pub m: usize,
}

impl GciEmbedding {
    pub fn size(&self) -> usize {
        self.n + self.m
    }

    /// Reads the GCI solution back out of a CI solution.
    pub fn restrict(&self, sol: &CiSolution) -> CiSolution {
        let rows_n: Vec<usize> = (0..self.n).collect();
        let rows_m: Vec<usize> = (0..self.m).collect();
        CiSolution { a: sol.a.select(&rows_n, &rows_m), b: sol.b.select(&rows_m, &rows_n) }
    }

    /// Builds a CI solution from a GCI solution: `I* = I`, `C = I - AB`,
    /// then pads with [`complete_to_inverse`].
    pub fn lift(&self, gci: &GciInstance, sol: &CiSolution) -> Result<CiSolution> {
        if !super::verify_gci(gci, sol)? {
            return Err(Error::Precondition("GCI solution does not verify".into()));
        }
        let f = gci.field;
        let ident = FieldMatrix::identity(f, self.n);
        let top = sol.a.hstack(&ident)?;
        let c = ident.sub(&sol.a.mul(&sol.b)?)?;
        let left_block = sol.b.vstack(&c)?;
        let (m_prime, n_prime) = complete_to_inverse(&top, &left_block)?;
        Ok(CiSolution { a: top.vstack(&m_prime)?, b: left_block.hstack(&n_prime)? })
    }
}

/// Builds the square CI instance of size `n + m` equivalent to a GCI instance.
pub fn gci_to_ci(inst: &GciInstance) -> (CiInstance, GciEmbedding) {
    let (n, m) = (inst.n, inst.m);
    let mut p: Pattern = inst.p.clone();
    for i in 1..=n {
        for j in 1..=n {
            if i != j {
                p.insert((i, m + j));
            }
        }
    }
    let mut q: Pattern = inst.q.clone();
    for &(i, j) in &inst.r {
        q.insert((m + i, j));
    }
    let ci = CiInstance { n: n + m, field: inst.field, p, q };
    (ci, GciEmbedding { n, m })
}

/// Records how to read a truth assignment from a solution of the GCI
/// instance produced by [`sat3_to_gci`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Sat3Decoder {
    pub num_vars: usize,
    pub num_clauses: usize,
}

impl Sat3Decoder {
    /// `x_k` is true iff the first row of `A` is nonzero at column `3k+1`.
    pub fn decode(&self, a: &FieldMatrix) -> Assignment {
        Assignment::new((0..self.num_vars).map(|k| a.get(0, 3 * k) != 0).collect())
    }
}

/// The GCI instance `AB = C` that is solvable iff `f` is satisfiable.
///
/// `A` is `(2n+1+m) x (3n+1)`. Its first row may be nonzero at columns
/// `3k+1`, `3k+2` of each variable block and at the last column; each
/// variable contributes rows `(*,0,*)` and `(0,*,*)` on its block; each clause
/// adds a row whose only free entry is the last column. `B` is its transpose
/// shape: column 1 is free only at row `3n+1`, each variable contributes
/// columns free at rows `{3k+1, 3k+3}` and `{3k+2, 3k+3}`, and each clause
/// column is free at row `3n+1` plus row `3k+1` for a literal `x_k` and
/// `3k+2` for `¬x_k`. `C` is the identity on the top-left `(2n+1)` block, zero
/// on the rest of the first row and one on the rest of the diagonal.
pub fn sat3_to_gci(f: &Cnf3, field: PrimeField) -> Result<(GciInstance, Sat3Decoder)> {
    let nv = f.num_vars();
    if nv == 0 {
        return Err(Error::Precondition("the formula needs at least one variable".into()));
    }
    let mc = f.clauses().len();
    let rows = 2 * nv + 1 + mc;
    let cols = 3 * nv + 1;
    let last = cols;

    let mut a_free: Vec<Vec<usize>> = vec![Vec::new(); rows + 1];
    for k in 0..nv {
        a_free[1].extend([3 * k + 1, 3 * k + 2]);
        a_free[2 + 2 * k].extend([3 * k + 1, 3 * k + 3]);
        a_free[3 + 2 * k].extend([3 * k + 2, 3 * k + 3]);
    }
    a_free[1].push(last);
    for j in 0..mc {
        a_free[2 * nv + 2 + j].push(last);
    }

    let mut b_free: Vec<Vec<usize>> = vec![Vec::new(); rows + 1];
    b_free[1].push(last);
    for k in 0..nv {
        b_free[2 + 2 * k].extend([3 * k + 1, 3 * k + 3]);
        b_free[3 + 2 * k].extend([3 * k + 2, 3 * k + 3]);
    }
    for (j, clause) in f.clauses().iter().enumerate() {
        let col = &mut b_free[2 * nv + 2 + j];
        col.push(last);
        for lit in clause {
            col.push(3 * lit.var + if lit.negated { 2 } else { 1 });
        }
    }

    let p: Pattern =
        (1..=rows).flat_map(|i| (1..=cols).map(move |c| (i, c))).filter(|(i, c)| !a_free[*i].contains(c)).collect();
    let q: Pattern =
        (1..=cols).flat_map(|r| (1..=rows).map(move |j| (r, j))).filter(|(r, j)| !b_free[*j].contains(r)).collect();

    let head = 2 * nv + 1;
    let mut r = Pattern::new();
    for i in 1..=head {
        for j in 1..=head {
            r.insert((i, j));
        }
    }
    for j in head + 1..=rows {
        r.insert((1, j));
        r.insert((j, j));
    }
    let inst = GciInstance { n: rows, m: cols, field, p, q, r };
    Ok((inst, Sat3Decoder { num_vars: nv, num_clauses: mc }))
}

/// Reads the assignment from a verified solution of `sat3_to_gci(f)`.
pub fn extract_assignment(f: &Cnf3, gci: &GciInstance, decoder: &Sat3Decoder, sol: &CiSolution) -> Result<Assignment> {
    if !super::verify_gci(gci, sol)? {
        return Err(Error::Precondition("solution does not verify against the GCI instance".into()));
    }
    let a = decoder.decode(&sol.a);
    debug_assert!(f.eval(&a)?, "decoded assignment must satisfy the formula");
    Ok(a)
}
