//! Prime-field arithmetic and dense matrices over GF(p).
//!
//! Every matrix carries its field, entries are stored as reduced residues
//! in row-major order. Elimination always pivots on the first nonzero entry
//! in row order, so ranks, inverses and completions are deterministic.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest modulus accepted by [`PrimeField::new`].
pub const MAX_PRIME: u32 = 97;

/// The prime field GF(p) for a small prime p.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self> {
        if !(2..=MAX_PRIME).contains(&p) || (2..p).take_while(|d| d * d <= p).any(|d| p.is_multiple_of(d)) {
            return Err(Error::InvalidField(p));
        }
        Ok(PrimeField { p })
    }

    /// GF(2), the field most gadgets are exercised over.
    pub fn gf2() -> Self {
        PrimeField { p: 2 }
    }

    pub fn gf3() -> Self {
        PrimeField { p: 3 }
    }

    #[inline]
    pub fn modulus(&self) -> u32 {
        self.p
    }

    /// Number of elements of the field.
    #[inline]
    pub fn size(&self) -> usize {
        self.p as usize
    }

    #[inline]
    pub fn reduce(&self, v: i64) -> u32 {
        v.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        (a + b) % self.p
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        (a + self.p - b) % self.p
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        (self.p - a) % self.p
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        (a * b) % self.p
    }

    /// Multiplicative inverse of a nonzero element (Fermat).
    pub fn inv(&self, a: u32) -> u32 {
        assert!(!a.is_multiple_of(self.p), "inverse of zero in GF({})", self.p);
        let mut result = 1u32;
        let mut base = a % self.p;
        let mut exp = self.p - 2;
        while exp > 0 {
            if exp & 1 == 1 {
                result = self.mul(result, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        result
    }

    #[inline]
    pub fn div(&self, a: u32, b: u32) -> u32 {
        self.mul(a, self.inv(b))
    }

    /// All elements in ascending order.
    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.p
    }

    /// Dot product of two equally long vectors.
    pub fn dot(&self, a: &[u32], b: &[u32]) -> u32 {
        debug_assert_eq!(a.len(), b.len());
        let acc: u64 = a.iter().zip(b).map(|(&x, &y)| (x * y) as u64).sum();
        (acc % self.p as u64) as u32
    }

    /// `dst += c * src`, entrywise.
    pub fn axpy(&self, dst: &mut [u32], c: u32, src: &[u32]) {
        if c == 0 {
            return;
        }
        for (d, &s) in dst.iter_mut().zip(src) {
            *d = (*d + c * s) % self.p;
        }
    }

    pub fn scale(&self, v: &mut [u32], c: u32) {
        for x in v.iter_mut() {
            *x = self.mul(*x, c);
        }
    }
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.p)
    }
}

/// Dense matrix over a prime field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldMatrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl FieldMatrix {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        FieldMatrix { field, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Builds a matrix from signed integer rows, reducing every entry mod p.
    pub fn from_rows<R: AsRef<[i64]>>(field: PrimeField, rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::Dimension(format!("ragged rows: expected {cols} entries, found {}", r.len())));
            }
            data.extend(r.iter().map(|&v| field.reduce(v)));
        }
        Ok(FieldMatrix { field, rows: rows.len(), cols, data })
    }

    /// Wraps already-reduced row-major data.
    pub fn from_vec(field: PrimeField, rows: usize, cols: usize, data: Vec<u32>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        if let Some(&bad) = data.iter().find(|&&v| v >= field.modulus()) {
            return Err(Error::Parse(format!("entry {bad} is not reduced mod {}", field.modulus())));
        }
        Ok(FieldMatrix { field, rows, cols, data })
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        debug_assert!(v < self.field.modulus());
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<u32> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn data(&self) -> &[u32] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn transpose(&self) -> FieldMatrix {
        let mut t = FieldMatrix::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn add(&self, other: &FieldMatrix) -> Result<FieldMatrix> {
        self.check_same_field(other)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "cannot add {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| self.field.add(a, b)).collect();
        Ok(FieldMatrix { field: self.field, rows: self.rows, cols: self.cols, data })
    }

    pub fn sub(&self, other: &FieldMatrix) -> Result<FieldMatrix> {
        self.check_same_field(other)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "cannot subtract {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| self.field.sub(a, b)).collect();
        Ok(FieldMatrix { field: self.field, rows: self.rows, cols: self.cols, data })
    }

    fn check_same_field(&self, other: &FieldMatrix) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(self.field.modulus(), other.field.modulus()));
        }
        Ok(())
    }

    /// Exact product `self * other`.
    pub fn mul(&self, other: &FieldMatrix) -> Result<FieldMatrix> {
        self.check_same_field(other)?;
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = self.field;
        let mut out = FieldMatrix::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a != 0 {
                    f.axpy(dst, a, other.row(k));
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols, "vector length does not match column count");
        (0..self.rows).map(|r| self.field.dot(self.row(r), v)).collect()
    }

    /// Rank by Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut work = self.clone();
        work.row_reduce().len()
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn row_reduce(&mut self) -> Vec<usize> {
        let f = self.field;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| self.get(i, c) != 0) else {
                continue;
            };
            if pr != r {
                for k in 0..self.cols {
                    self.data.swap(pr * self.cols + k, r * self.cols + k);
                }
            }
            let inv = f.inv(self.get(r, c));
            let cols = self.cols;
            f.scale(&mut self.data[r * cols..(r + 1) * cols], inv);
            let pivot_row = self.row(r).to_vec();
            for i in 0..self.rows {
                if i != r {
                    let factor = self.get(i, c);
                    if factor != 0 {
                        f.axpy(&mut self.data[i * cols..(i + 1) * cols], f.neg(factor), &pivot_row);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    /// Inverse of a square matrix, or `None` when it is singular.
    pub fn inverse(&self) -> Result<Option<FieldMatrix>> {
        if !self.is_square() {
            return Err(Error::Dimension(format!("inverse of a non-square {}x{} matrix", self.rows, self.cols)));
        }
        let n = self.rows;
        let mut aug = FieldMatrix::zeros(self.field, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, n + i, 1);
        }
        let pivots = aug.row_reduce();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Ok(None);
        }
        let mut inv = FieldMatrix::zeros(self.field, n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, aug.get(i, n + j));
            }
        }
        Ok(Some(inv))
    }

    /// A basis of the right null space `{x : self * x = 0}`.
    pub fn null_space(&self) -> Vec<Vec<u32>> {
        let f = self.field;
        let mut work = self.clone();
        let pivots = work.row_reduce();
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|c| !pivots.contains(c)) {
            let mut v = vec![0; self.cols];
            v[free] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(work.get(r, free));
            }
            basis.push(v);
        }
        basis
    }

    /// One solution of `self * x = rhs`, or `None` if the system is inconsistent.
    pub fn solve(&self, rhs: &[u32]) -> Option<Vec<u32>> {
        assert_eq!(rhs.len(), self.rows);
        let mut aug = FieldMatrix::zeros(self.field, self.rows, self.cols + 1);
        for (r, &v) in rhs.iter().enumerate() {
            for c in 0..self.cols {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, self.cols, v);
        }
        let pivots = aug.row_reduce();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![0; self.cols];
        for (r, &pc) in pivots.iter().enumerate() {
            x[pc] = aug.get(r, self.cols);
        }
        Some(x)
    }

    /// Sub-matrix on the given row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> FieldMatrix {
        let mut out = FieldMatrix::zeros(self.field, rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                out.set(i, j, self.get(r, c));
            }
        }
        out
    }

    /// Stacks `self` on top of `below`.
    pub fn vstack(&self, below: &FieldMatrix) -> Result<FieldMatrix> {
        self.check_same_field(below)?;
        if self.cols != below.cols {
            return Err(Error::Dimension("vstack with different column counts".into()));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&below.data);
        Ok(FieldMatrix { field: self.field, rows: self.rows + below.rows, cols: self.cols, data })
    }

    /// Places `right` to the right of `self`.
    pub fn hstack(&self, right: &FieldMatrix) -> Result<FieldMatrix> {
        Ok(self.transpose().vstack(&right.transpose())?.transpose())
    }

    /// Renders the matrix literal `p=..; rows=..; cols=..; data=..`.
    pub fn to_literal(&self) -> String {
        let rows: Vec<String> =
            (0..self.rows).map(|r| self.row(r).iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")).collect();
        format!("p={}; rows={}; cols={}; data={}", self.field.modulus(), self.rows, self.cols, rows.join(";"))
    }
}

impl fmt::Display for FieldMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_literal())
    }
}

impl FromStr for FieldMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut parts = s.splitn(4, ';').map(str::trim);
        let mut header = |key: &str| -> Result<String> {
            let part = parts.next().ok_or_else(|| Error::Parse(format!("missing `{key}=`")))?;
            part.strip_prefix(key)
                .and_then(|rest| rest.trim_start().strip_prefix('='))
                .map(|v| v.trim().to_string())
                .ok_or_else(|| Error::Parse(format!("expected `{key}=`, found `{part}`")))
        };
        let num = |v: String, what: &str| -> Result<usize> {
            v.parse().map_err(|_| Error::Parse(format!("bad {what} `{v}`")))
        };
        let p = num(header("p")?, "modulus")? as u32;
        let rows = num(header("rows")?, "row count")?;
        let cols = num(header("cols")?, "column count")?;
        let body = header("data")?;
        let field = PrimeField::new(p)?;
        let mut data = Vec::with_capacity(rows * cols);
        let row_texts: Vec<&str> = if rows == 0 || body.is_empty() { Vec::new() } else { body.split(';').collect() };
        if row_texts.len() != rows && !(cols == 0 && row_texts.is_empty()) {
            return Err(Error::Parse(format!("expected {rows} data rows, found {}", row_texts.len())));
        }
        for text in row_texts {
            let before = data.len();
            for tok in text.split_whitespace() {
                let v: u32 = tok.parse().map_err(|_| Error::Parse(format!("bad entry `{tok}`")))?;
                if v >= p {
                    return Err(Error::Parse(format!("entry {v} not reduced mod {p}")));
                }
                data.push(v);
            }
            if data.len() - before != cols {
                return Err(Error::Parse(format!("row has {} entries, expected {cols}", data.len() - before)));
            }
        }
        if cols == 0 {
            data.clear();
        }
        FieldMatrix::from_vec(field, rows, cols, data)
    }
}

/// Completes a one-sided inverse pair to a two-sided one.
///
/// Given `m` (n x k) and `n` (k x n) with `m * n = I_n` and `k > n`, returns
/// `(m_prime, n_prime)` such that `[m; m_prime] * [n | n_prime] = I_k`.
/// Greedily extends the rows of `m` by unit vectors to a full-rank square
/// matrix, projects the new rows away from the column space of `n`, and reads
/// `n_prime` off the inverse of the completed square matrix.
pub fn complete_to_inverse(m: &FieldMatrix, n: &FieldMatrix) -> Result<(FieldMatrix, FieldMatrix)> {
    let field = m.field();
    let (rows, k) = (m.rows(), m.cols());
    if n.rows() != k || n.cols() != rows {
        return Err(Error::Dimension(format!(
            "completion needs an {rows}x{k} and a {k}x{rows} matrix, got {}x{}",
            n.rows(),
            n.cols()
        )));
    }
    if k <= rows {
        return Err(Error::Precondition(format!("completion needs more columns ({k}) than rows ({rows})")));
    }
    if m.mul(n)? != FieldMatrix::identity(field, rows) {
        return Err(Error::Precondition("m * n is not the identity".into()));
    }

    // Greedy independent unit rows.
    let mut extra: Vec<Vec<u32>> = Vec::new();
    let mut current = m.clone();
    let mut rank = current.rank();
    for unit in 0..k {
        if extra.len() == k - rows {
            break;
        }
        let mut e = vec![0; k];
        e[unit] = 1;
        let candidate = current.vstack(&FieldMatrix::from_vec(field, 1, k, e.clone())?)?;
        let r = candidate.rank();
        if r > rank {
            rank = r;
            current = candidate;
            extra.push(e);
        }
    }
    debug_assert_eq!(extra.len(), k - rows);
    let m2 = FieldMatrix::from_vec(field, k - rows, k, extra.concat())?;
    let m_prime = m2.sub(&m2.mul(n)?.mul(m)?)?;
    let full = m.vstack(&m_prime)?;
    let inv = full.inverse()?.ok_or_else(|| Error::Precondition("completed matrix is singular".into()))?;
    let trailing: Vec<usize> = (rows..k).collect();
    let all_rows: Vec<usize> = (0..k).collect();
    let n_prime = inv.select(&all_rows, &trailing);
    Ok((m_prime, n_prime))
}
