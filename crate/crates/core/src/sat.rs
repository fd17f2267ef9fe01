//! 3CNF formulas, DIMACS text, a brute-force oracle and a small DPLL for
//! general CNF.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest variable count `brute_force_sat` will enumerate.
pub const BRUTE_FORCE_MAX_VARS: usize = 25;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Literal {
    pub var: usize,
    pub negated: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Literal { var, negated: false }
    }

    pub fn neg(var: usize) -> Self {
        Literal { var, negated: true }
    }

    pub fn eval(&self, values: &[bool]) -> bool {
        values[self.var] != self.negated
    }

    fn to_dimacs(self) -> i64 {
        let v = self.var as i64 + 1;
        if self.negated {
            -v
        } else {
            v
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "¬x{}", self.var)
        } else {
            write!(f, "x{}", self.var)
        }
    }
}

pub type Clause3 = [Literal; 3];

/// A formula whose clauses have exactly three literals over distinct variables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cnf3 {
    num_vars: usize,
    clauses: Vec<Clause3>,
    #[serde(default, skip_serializing)]
    comments: Vec<String>,
}

impl Cnf3 {
    pub fn new(num_vars: usize, clauses: Vec<Clause3>) -> Result<Self> {
        for (j, c) in clauses.iter().enumerate() {
            for l in c {
                if l.var >= num_vars {
                    return Err(Error::Parse(format!(
                        "clause {} uses variable {} but only {num_vars} exist",
                        j + 1,
                        l.var + 1
                    )));
                }
            }
            if c[0].var == c[1].var || c[0].var == c[2].var || c[1].var == c[2].var {
                return Err(Error::Parse(format!("clause {} repeats a variable", j + 1)));
            }
        }
        Ok(Cnf3 { num_vars, clauses, comments: Vec::new() })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Clause3] {
        &self.clauses
    }

    /// Comment lines (without the leading `c`) found when parsing.
    pub fn comments(&self) -> &[String] {
        &self.comments
    }

    /// Evaluates the formula; errors if the assignment has the wrong length.
    pub fn eval(&self, a: &Assignment) -> Result<bool> {
        if a.values.len() != self.num_vars {
            return Err(Error::Dimension(format!(
                "assignment has {} values for {} variables",
                a.values.len(),
                self.num_vars
            )));
        }
        Ok(self.clauses.iter().all(|c| c.iter().any(|l| l.eval(&a.values))))
    }

    /// Every clause over the first three variables with every sign pattern.
    /// Unsatisfiable; handy as a negative fixture.
    pub fn all_sign_patterns(num_vars: usize) -> Self {
        assert!(num_vars >= 3);
        let clauses = (0..8u8).map(|mask| [0, 1, 2].map(|v| Literal { var: v, negated: mask >> v & 1 == 1 })).collect();
        Cnf3::new(num_vars, clauses).expect("valid clauses")
    }

    /// Renders DIMACS text. Comments are not emitted.
    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                out.push_str(&l.to_dimacs().to_string());
                out.push(' ');
            }
            out.push_str("0\n");
        }
        out
    }
}

impl fmt::Display for Cnf3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.clauses.is_empty() {
            return f.write_str("⊤");
        }
        let parts: Vec<String> = self.clauses.iter().map(|c| format!("({} ∨ {} ∨ {})", c[0], c[1], c[2])).collect();
        f.write_str(&parts.join(" ∧ "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub values: Vec<bool>,
}

impl Assignment {
    pub fn new(values: Vec<bool>) -> Self {
        Assignment { values }
    }

    fn from_mask(mask: u64, n: usize) -> Self {
        Assignment { values: (0..n).map(|i| mask >> i & 1 == 1).collect() }
    }
}

/// Header plus the clause literals, before any width check.
fn parse_dimacs_raw(text: &str) -> Result<(usize, Vec<Vec<i64>>, Vec<String>)> {
    let mut header: Option<(usize, usize)> = None;
    let mut comments = Vec::new();
    let mut clauses = Vec::new();
    let mut current = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('c') {
            if rest.is_empty() || rest.starts_with(char::is_whitespace) {
                comments.push(rest.trim().to_string());
                continue;
            }
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(Error::Parse(format!("line {}: second header", lineno + 1)));
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parsed = match fields.as_slice() {
                ["p", "cnf", v, c] => v.parse().ok().zip(c.parse().ok()),
                _ => None,
            };
            header =
                Some(parsed.ok_or_else(|| Error::Parse(format!("line {}: malformed header `{line}`", lineno + 1)))?);
            continue;
        }
        let Some((num_vars, _)) = header else {
            return Err(Error::Parse(format!("line {}: clause before header", lineno + 1)));
        };
        for tok in line.split_whitespace() {
            let lit: i64 =
                tok.parse().map_err(|_| Error::Parse(format!("line {}: bad literal `{tok}`", lineno + 1)))?;
            if lit == 0 {
                clauses.push(std::mem::take(&mut current));
            } else {
                if lit.unsigned_abs() as usize > num_vars {
                    return Err(Error::Parse(format!(
                        "line {}: variable {} out of range 1..={num_vars}",
                        lineno + 1,
                        lit.abs()
                    )));
                }
                current.push(lit);
            }
        }
    }
    let (num_vars, num_clauses) = header.ok_or_else(|| Error::Parse("missing `p cnf` header".into()))?;
    if !current.is_empty() {
        return Err(Error::Parse("last clause is not terminated by 0".into()));
    }
    if clauses.len() != num_clauses {
        return Err(Error::Parse(format!("header announces {num_clauses} clauses, found {}", clauses.len())));
    }
    Ok((num_vars, clauses, comments))
}

fn lit_from_dimacs(v: i64) -> Literal {
    Literal { var: v.unsigned_abs() as usize - 1, negated: v < 0 }
}

/// Parses DIMACS text where every clause has width exactly three.
pub fn parse_dimacs(text: &str) -> Result<Cnf3> {
    let (num_vars, raw, comments) = parse_dimacs_raw(text)?;
    let mut clauses = Vec::with_capacity(raw.len());
    for (j, c) in raw.iter().enumerate() {
        if c.len() != 3 {
            return Err(Error::Parse(format!("clause {} has width {}, expected 3", j + 1, c.len())));
        }
        clauses.push([lit_from_dimacs(c[0]), lit_from_dimacs(c[1]), lit_from_dimacs(c[2])]);
    }
    let mut f = Cnf3::new(num_vars, clauses)?;
    f.comments = comments;
    Ok(f)
}

pub fn emit_dimacs(f: &Cnf3) -> String {
    f.to_dimacs()
}

pub fn eval_assignment(f: &Cnf3, a: &Assignment) -> Result<bool> {
    f.eval(a)
}

/// Exhaustive search in binary counting order; the first satisfying
/// assignment (lowest as a bit mask, variable 0 least significant) wins.
pub fn brute_force_sat(f: &Cnf3) -> Result<Option<Assignment>> {
    let n = f.num_vars();
    if n > BRUTE_FORCE_MAX_VARS {
        return Err(Error::Precondition(format!(
            "brute force limited to {BRUTE_FORCE_MAX_VARS} variables, formula has {n}"
        )));
    }
    let masks: Vec<(u64, u64)> = f
        .clauses()
        .iter()
        .map(|c| {
            c.iter().fold((0u64, 0u64), |(p, q), l| if l.negated { (p, q | 1 << l.var) } else { (p | 1 << l.var, q) })
        })
        .collect();
    for a in 0..(1u64 << n) {
        if masks.iter().all(|&(p, q)| a & p != 0 || !a & q != 0) {
            return Ok(Some(Assignment::from_mask(a, n)));
        }
    }
    Ok(None)
}

/// CNF of arbitrary clause widths with DIMACS-style signed literals.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Cnf {
    pub num_vars: usize,
    pub clauses: Vec<Vec<i64>>,
}

impl Cnf {
    pub fn new() -> Self {
        Cnf::default()
    }

    /// Allocates a fresh variable and returns its 1-based index.
    pub fn fresh(&mut self) -> i64 {
        self.num_vars += 1;
        self.num_vars as i64
    }

    pub fn add(&mut self, clause: Vec<i64>) {
        debug_assert!(clause.iter().all(|&l| l != 0 && l.unsigned_abs() as usize <= self.num_vars));
        self.clauses.push(clause);
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                out.push_str(&l.to_string());
                out.push(' ');
            }
            out.push_str("0\n");
        }
        out
    }

    pub fn from_dimacs(text: &str) -> Result<Self> {
        let (num_vars, clauses, _) = parse_dimacs_raw(text)?;
        Ok(Cnf { num_vars, clauses })
    }

    /// Checks a full assignment (index 0 is variable 1).
    pub fn satisfied_by(&self, values: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|&l| values[l.unsigned_abs() as usize - 1] == (l > 0)))
    }

    /// A model, or `None` if unsatisfiable.
    pub fn solve(&self) -> Option<Vec<bool>> {
        Dpll::new(self).run()
    }

    /// All distinct projections of models onto `vars`, found by adding
    /// blocking clauses. Stops after `limit` models.
    pub fn enumerate_projected(&self, vars: &[i64], limit: usize) -> Vec<Vec<bool>> {
        let mut work = self.clone();
        let mut found = Vec::new();
        while found.len() < limit {
            let Some(model) = work.solve() else { break };
            let proj: Vec<bool> = vars.iter().map(|&v| model[v as usize - 1]).collect();
            work.add(vars.iter().zip(&proj).map(|(&v, &b)| if b { -v } else { v }).collect());
            found.push(proj);
        }
        found
    }
}

/// Plain DPLL: unit propagation, then branch on the lowest unassigned
/// variable, false first.
struct Dpll<'a> {
    cnf: &'a Cnf,
    values: Vec<Option<bool>>,
    trail: Vec<usize>,
}

impl<'a> Dpll<'a> {
    fn new(cnf: &'a Cnf) -> Self {
        Dpll { cnf, values: vec![None; cnf.num_vars], trail: Vec::new() }
    }

    fn lit_value(&self, l: i64) -> Option<bool> {
        self.values[l.unsigned_abs() as usize - 1].map(|v| v == (l > 0))
    }

    fn assign(&mut self, l: i64) {
        let v = l.unsigned_abs() as usize - 1;
        self.values[v] = Some(l > 0);
        self.trail.push(v);
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let v = self.trail.pop().expect("nonempty trail");
            self.values[v] = None;
        }
    }

    /// Returns false on conflict.
    fn propagate(&mut self) -> bool {
        loop {
            let mut changed = false;
            for c in &self.cnf.clauses {
                let mut unassigned = None;
                let mut open = 0;
                let mut sat = false;
                for &l in c {
                    match self.lit_value(l) {
                        Some(true) => {
                            sat = true;
                            break;
                        }
                        Some(false) => {}
                        None => {
                            open += 1;
                            unassigned = Some(l);
                        }
                    }
                }
                if sat {
                    continue;
                }
                match open {
                    0 => return false,
                    1 => {
                        self.assign(unassigned.expect("one open literal"));
                        changed = true;
                    }
                    _ => {}
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn search(&mut self) -> bool {
        if !self.propagate() {
            return false;
        }
        let Some(v) = self.values.iter().position(Option::is_none) else {
            return true;
        };
        for choice in [false, true] {
            let mark = self.trail.len();
            self.assign(if choice { v as i64 + 1 } else { -(v as i64 + 1) });
            if self.search() {
                return true;
            }
            self.undo_to(mark);
        }
        false
    }

    fn run(mut self) -> Option<Vec<bool>> {
        if self.search() {
            Some(self.values.iter().map(|v| v.unwrap_or(false)).collect())
        } else {
            None
        }
    }
}
