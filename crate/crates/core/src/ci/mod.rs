//! Constrained invertibility problems.
//!
//! A CI instance asks for `A, B` over GF(p) with `AB = I_n`, `A` zero on `P`
//! and `B` zero on `Q`. The generalized variant (GCI) allows rectangular
//! `A` (n x m), `B` (m x n) and only requires `AB` to agree with `I_n` on the
//! entries in `R`. All index pairs are 1-based.

mod cnf;
mod reduce;
mod solver;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldMatrix, PrimeField};

pub use cnf::{ci_to_cnf, CnfEncoding};
pub use reduce::{extract_assignment, gci_to_ci, sat3_to_gci, GciEmbedding, Sat3Decoder};
pub use solver::{solve_ci, solve_ci_by_inverse, solve_gci, BilinearSystem, DEFAULT_BUDGET};

/// A 1-based (row, column) pair.
pub type Entry = (usize, usize);

/// A duplicate-free set of entries, iterated in row-major order.
pub type Pattern = BTreeSet<Entry>;

fn check_range(set: &Pattern, rows: usize, cols: usize, name: &str) -> Result<()> {
    for &(i, j) in set {
        if i == 0 || j == 0 || i > rows || j > cols {
            return Err(Error::Precondition(format!("{name} entry ({i},{j}) outside [1..{rows}]x[1..{cols}]")));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CiInstance {
    pub n: usize,
    pub field: PrimeField,
    pub p: Pattern,
    pub q: Pattern,
}

impl CiInstance {
    pub fn new(
        n: usize,
        field: PrimeField,
        p: impl IntoIterator<Item = Entry>,
        q: impl IntoIterator<Item = Entry>,
    ) -> Result<Self> {
        let inst = CiInstance { n, field, p: p.into_iter().collect(), q: q.into_iter().collect() };
        check_range(&inst.p, n, n, "P")?;
        check_range(&inst.q, n, n, "Q")?;
        Ok(inst)
    }

    /// The same problem as a GCI instance with `m = n` and `R` everything.
    pub fn as_gci(&self) -> GciInstance {
        let all = (1..=self.n).flat_map(|i| (1..=self.n).map(move |j| (i, j))).collect();
        GciInstance { n: self.n, m: self.n, field: self.field, p: self.p.clone(), q: self.q.clone(), r: all }
    }

    /// Decodes pattern bits as used by exhaustive sweeps: bit `k` of `p_bits`
    /// is entry `(k / n + 1, k % n + 1)`.
    pub fn from_bits(n: usize, field: PrimeField, p_bits: u64, q_bits: u64) -> Self {
        let decode = |bits: u64| -> Pattern {
            (0..n * n).filter(|k| bits >> k & 1 == 1).map(|k| (k / n + 1, k % n + 1)).collect()
        };
        CiInstance { n, field, p: decode(p_bits), q: decode(q_bits) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GciInstance {
    pub n: usize,
    pub m: usize,
    pub field: PrimeField,
    pub p: Pattern,
    pub q: Pattern,
    pub r: Pattern,
}

impl GciInstance {
    pub fn new(
        n: usize,
        m: usize,
        field: PrimeField,
        p: impl IntoIterator<Item = Entry>,
        q: impl IntoIterator<Item = Entry>,
        r: impl IntoIterator<Item = Entry>,
    ) -> Result<Self> {
        let inst = GciInstance {
            n,
            m,
            field,
            p: p.into_iter().collect(),
            q: q.into_iter().collect(),
            r: r.into_iter().collect(),
        };
        check_range(&inst.p, n, m, "P")?;
        check_range(&inst.q, m, n, "Q")?;
        check_range(&inst.r, n, n, "R")?;
        Ok(inst)
    }
}

/// A pair of matrices claimed to solve an instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CiSolution {
    pub a: FieldMatrix,
    pub b: FieldMatrix,
}

/// Result of a bounded search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    Solved(CiSolution),
    NoSolution,
    BudgetExceeded { nodes: u64 },
}

impl SolveOutcome {
    pub fn solution(&self) -> Option<&CiSolution> {
        match self {
            SolveOutcome::Solved(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_solved(&self) -> bool {
        matches!(self, SolveOutcome::Solved(_))
    }
}

fn zero_on(m: &FieldMatrix, set: &Pattern) -> bool {
    set.iter().all(|&(i, j)| m.get(i - 1, j - 1) == 0)
}

pub fn verify_ci(inst: &CiInstance, sol: &CiSolution) -> Result<bool> {
    let n = inst.n;
    for (name, mat) in [("A", &sol.a), ("B", &sol.b)] {
        if mat.rows() != n || mat.cols() != n {
            return Err(Error::Dimension(format!("{name} is {}x{}, instance needs {n}x{n}", mat.rows(), mat.cols())));
        }
        if mat.field() != inst.field {
            return Err(Error::FieldMismatch(mat.field().modulus(), inst.field.modulus()));
        }
    }
    Ok(zero_on(&sol.a, &inst.p)
        && zero_on(&sol.b, &inst.q)
        && sol.a.mul(&sol.b)? == FieldMatrix::identity(inst.field, n))
}

pub fn verify_gci(inst: &GciInstance, sol: &CiSolution) -> Result<bool> {
    let (n, m) = (inst.n, inst.m);
    if sol.a.rows() != n || sol.a.cols() != m || sol.b.rows() != m || sol.b.cols() != n {
        return Err(Error::Dimension(format!(
            "expected {n}x{m} and {m}x{n}, got {}x{} and {}x{}",
            sol.a.rows(),
            sol.a.cols(),
            sol.b.rows(),
            sol.b.cols()
        )));
    }
    for mat in [&sol.a, &sol.b] {
        if mat.field() != inst.field {
            return Err(Error::FieldMismatch(mat.field().modulus(), inst.field.modulus()));
        }
    }
    if !zero_on(&sol.a, &inst.p) || !zero_on(&sol.b, &inst.q) {
        return Ok(false);
    }
    let prod = sol.a.mul(&sol.b)?;
    Ok(inst.r.iter().all(|&(i, j)| prod.get(i - 1, j - 1) == u32::from(i == j)))
}

/// On-disk form of CI and GCI instances.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemFile {
    pub kind: ProblemKind,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    pub p: u32,
    #[serde(rename = "P", default)]
    pub pp: Vec<Entry>,
    #[serde(rename = "Q", default)]
    pub qq: Vec<Entry>,
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    pub rr: Option<Vec<Entry>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Ci,
    Gci,
}

/// Either kind of instance, as read from a file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Problem {
    Ci(CiInstance),
    Gci(GciInstance),
}

impl ProblemFile {
    /// Builds the instance; `p_override` replaces the modulus in the file.
    pub fn into_problem(self, p_override: Option<u32>) -> Result<Problem> {
        let field = PrimeField::new(p_override.unwrap_or(self.p))?;
        match self.kind {
            ProblemKind::Ci => {
                if self.rr.is_some() {
                    return Err(Error::Parse("a CI instance has no R".into()));
                }
                if self.m.is_some_and(|m| m != self.n) {
                    return Err(Error::Parse("a CI instance needs m = n".into()));
                }
                Ok(Problem::Ci(CiInstance::new(self.n, field, self.pp, self.qq)?))
            }
            ProblemKind::Gci => {
                let m = self.m.ok_or_else(|| Error::Parse("GCI instance without m".into()))?;
                let r = self.rr.ok_or_else(|| Error::Parse("GCI instance without R".into()))?;
                Ok(Problem::Gci(GciInstance::new(self.n, m, field, self.pp, self.qq, r)?))
            }
        }
    }

    pub fn from_ci(inst: &CiInstance) -> Self {
        ProblemFile {
            kind: ProblemKind::Ci,
            n: inst.n,
            m: None,
            p: inst.field.modulus(),
            pp: inst.p.iter().copied().collect(),
            qq: inst.q.iter().copied().collect(),
            rr: None,
        }
    }

    pub fn from_gci(inst: &GciInstance) -> Self {
        ProblemFile {
            kind: ProblemKind::Gci,
            n: inst.n,
            m: Some(inst.m),
            p: inst.field.modulus(),
            pp: inst.p.iter().copied().collect(),
            qq: inst.q.iter().copied().collect(),
            rr: Some(inst.r.iter().copied().collect()),
        }
    }
}

pub fn parse_problem(json: &str, p_override: Option<u32>) -> Result<Problem> {
    serde_json::from_str::<ProblemFile>(json)?.into_problem(p_override)
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn gf3() -> PrimeField {
        PrimeField::gf3()
    }

    pub fn solvable() -> CiInstance {
        CiInstance::new(3, gf3(), [(2, 2), (3, 3)], [(2, 3), (3, 2)]).unwrap()
    }

    pub fn unsolvable(field: PrimeField) -> CiInstance {
        CiInstance::new(3, field, [(1, 1), (1, 3)], [(2, 1)]).unwrap()
    }

    pub fn worked_solution() -> CiSolution {
        CiSolution {
            a: FieldMatrix::from_rows(gf3(), &[[1, 1, 1], [1, 0, 1], [1, 1, 0]]).unwrap(),
            b: FieldMatrix::from_rows(gf3(), &[[-1, 1, 1], [1, -1, 0], [1, 0, -1]]).unwrap(),
        }
    }

    pub fn small_gci(field: PrimeField) -> GciInstance {
        GciInstance::new(2, 3, field, [(2, 1), (2, 2), (2, 3)], [(1, 2), (2, 1), (3, 1), (3, 2)], [(1, 1), (1, 2)])
            .unwrap()
    }

    pub fn small_gci_solution(field: PrimeField) -> CiSolution {
        CiSolution {
            a: FieldMatrix::from_rows(field, &[[1, 0, 0], [0, 0, 0]]).unwrap(),
            b: FieldMatrix::from_rows(field, &[[1, 0], [0, 1], [0, 0]]).unwrap(),
        }
    }
}
