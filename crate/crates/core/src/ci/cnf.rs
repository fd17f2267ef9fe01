//! Propositional encoding of CI over GF(2).

use super::{CiInstance, CiSolution};
use crate::error::{Error, Result};
use crate::field::FieldMatrix;
use crate::sat::Cnf;

/// A CNF together with the variables holding the matrix entries.
#[derive(Clone, Debug)]
pub struct CnfEncoding {
    pub cnf: Cnf,
    pub n: usize,
    /// DIMACS variable of `A[i][j]` at index `i * n + j` (0-based).
    pub a_vars: Vec<i64>,
    pub b_vars: Vec<i64>,
}

impl CnfEncoding {
    /// The matrix-entry variables, `A` first.
    pub fn entry_vars(&self) -> Vec<i64> {
        self.a_vars.iter().chain(&self.b_vars).copied().collect()
    }

    /// Reads `A` and `B` off a model (index 0 is variable 1).
    pub fn decode(&self, model: &[bool]) -> CiSolution {
        let field = crate::field::PrimeField::gf2();
        let read = |vars: &[i64]| -> FieldMatrix {
            let data = vars.iter().map(|&v| u32::from(model[v as usize - 1])).collect();
            FieldMatrix::from_vec(field, self.n, self.n, data).expect("n x n")
        };
        CiSolution { a: read(&self.a_vars), b: read(&self.b_vars) }
    }

    /// Decodes a projection onto [`CnfEncoding::entry_vars`].
    pub fn decode_projection(&self, values: &[bool]) -> CiSolution {
        let mut model = vec![false; self.cnf.num_vars];
        for (&v, &b) in self.entry_vars().iter().zip(values) {
            model[v as usize - 1] = b;
        }
        self.decode(&model)
    }
}

/// Encodes `AB = I` with the zero patterns. Each product `a_ik b_kj` gets a
/// Tseitin variable, each entry of the product is an XOR chain over those,
/// and the chain's last variable is fixed to the identity entry.
pub fn ci_to_cnf(inst: &CiInstance) -> Result<CnfEncoding> {
    if inst.field.modulus() != 2 {
        return Err(Error::Precondition(format!(
            "CNF export needs GF(2), instance is over GF({})",
            inst.field.modulus()
        )));
    }
    let n = inst.n;
    let mut cnf = Cnf::new();
    let a_vars: Vec<i64> = (0..n * n).map(|_| cnf.fresh()).collect();
    let b_vars: Vec<i64> = (0..n * n).map(|_| cnf.fresh()).collect();
    for &(i, j) in &inst.p {
        cnf.add(vec![-a_vars[(i - 1) * n + j - 1]]);
    }
    for &(i, j) in &inst.q {
        cnf.add(vec![-b_vars[(i - 1) * n + j - 1]]);
    }
    for i in 0..n {
        for j in 0..n {
            let mut acc: Option<i64> = None;
            for k in 0..n {
                let a = a_vars[i * n + k];
                let b = b_vars[k * n + j];
                let t = cnf.fresh();
                cnf.add(vec![-t, a]);
                cnf.add(vec![-t, b]);
                cnf.add(vec![t, -a, -b]);
                acc = Some(match acc {
                    None => t,
                    Some(s) => {
                        let x = cnf.fresh();
                        // x <-> s xor t
                        cnf.add(vec![-x, s, t]);
                        cnf.add(vec![-x, -s, -t]);
                        cnf.add(vec![x, -s, t]);
                        cnf.add(vec![x, s, -t]);
                        x
                    }
                });
            }
            let last = acc.expect("n >= 1");
            cnf.add(vec![if i == j { last } else { -last }]);
        }
    }
    Ok(CnfEncoding { cnf, n, a_vars, b_vars })
}
