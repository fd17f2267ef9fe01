//! Finitely presented two-parameter modules.
//!
//! A presentation lists generator grades and relations; each relation is a
//! coefficient vector over the generators, placed at a grade. The space at
//! `p` is spanned by the generators born at or below `p`, modulo the
//! relations placed at or below `p`.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldMatrix, PrimeField};
use crate::rational::{Point2, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relation {
    pub grade: Point2,
    pub coeffs: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedPresentation {
    field: PrimeField,
    generators: Vec<Point2>,
    relations: Vec<Relation>,
}

impl GradedPresentation {
    /// Checks coefficient lengths, residues, and that every relation only
    /// involves generators born at or below its grade.
    pub fn new(field: PrimeField, generators: Vec<Point2>, relations: Vec<Relation>) -> Result<Self> {
        for (k, rel) in relations.iter().enumerate() {
            if rel.coeffs.len() != generators.len() {
                return Err(Error::Dimension(format!(
                    "relation {k} has {} coefficients for {} generators",
                    rel.coeffs.len(),
                    generators.len()
                )));
            }
            for (i, &c) in rel.coeffs.iter().enumerate() {
                if c >= field.modulus() {
                    return Err(Error::Parse(format!("coefficient {c} not reduced mod {}", field.modulus())));
                }
                if c != 0 && !generators[i].leq(&rel.grade) {
                    return Err(Error::Precondition(format!(
                        "relation {k} at {} uses generator {i} born at {}",
                        rel.grade, generators[i]
                    )));
                }
            }
        }
        Ok(GradedPresentation { field, generators, relations })
    }

    /// The zero module.
    pub fn zero(field: PrimeField) -> Self {
        GradedPresentation { field, generators: Vec::new(), relations: Vec::new() }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn generators(&self) -> &[Point2] {
        &self.generators
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    /// Generator and relation grades, in that order, duplicates kept.
    pub fn grades(&self) -> impl Iterator<Item = Point2> + '_ {
        self.generators.iter().copied().chain(self.relations.iter().map(|r| r.grade))
    }

    /// The space at `p`, with its chosen basis.
    pub fn space_at(&self, p: &Point2) -> PointSpace {
        let f = self.field;
        let born: Vec<bool> = self.generators.iter().map(|g| g.leq(p)).collect();
        let mut rows: Vec<(usize, Vec<u32>)> = Vec::new();
        for rel in self.relations.iter().filter(|r| r.grade.leq(p)) {
            let mut v = rel.coeffs.clone();
            reduce(f, &rows, &mut v);
            let Some(piv) = v.iter().rposition(|&c| c != 0) else { continue };
            let inv = f.inv(v[piv]);
            f.scale(&mut v, inv);
            for (_, row) in rows.iter_mut() {
                let c = row[piv];
                if c != 0 {
                    f.axpy(row, f.neg(c), &v);
                }
            }
            rows.push((piv, v));
        }
        let pivots: BTreeSet<usize> = rows.iter().map(|&(piv, _)| piv).collect();
        let basis = (0..self.generators.len()).filter(|&i| born[i] && !pivots.contains(&i)).collect();
        PointSpace { grade: *p, born, rel_rows: rows, basis }
    }

    pub fn dim_at(&self, p: &Point2) -> usize {
        self.space_at(p).dim()
    }

    /// Matrix of the map from the space at `p` to the space at `q`.
    pub fn internal_map(&self, p: &Point2, q: &Point2) -> Result<FieldMatrix> {
        if !p.leq(q) {
            return Err(Error::Precondition(format!("internal map needs {p} <= {q}")));
        }
        Ok(internal_map_between(&self.space_at(p), &self.space_at(q), self.field))
    }

    /// `M^eps`: every grade moved down by `(eps, eps)`.
    pub fn shifted(&self, eps: Rational) -> Self {
        let d = -eps;
        GradedPresentation {
            field: self.field,
            generators: self.generators.iter().map(|g| g.diag(d)).collect(),
            relations: self
                .relations
                .iter()
                .map(|r| Relation { grade: r.grade.diag(d), coeffs: r.coeffs.clone() })
                .collect(),
        }
    }
}

/// Reduces `v` by fully reduced pivot rows.
fn reduce(f: PrimeField, rows: &[(usize, Vec<u32>)], v: &mut [u32]) {
    for (piv, row) in rows {
        let c = v[*piv];
        if c != 0 {
            f.axpy(v, f.neg(c), row);
        }
    }
}

/// Map between two spaces of the same presentation, `p <= q`.
fn internal_map_between(sp: &PointSpace, sq: &PointSpace, f: PrimeField) -> FieldMatrix {
    let mut m = FieldMatrix::zeros(f, sq.dim(), sp.dim());
    let n = sp.born.len();
    for (col, &b) in sp.basis.iter().enumerate() {
        let mut e = vec![0; n];
        e[b] = 1;
        for (row, v) in sq.coords(f, &e).into_iter().enumerate() {
            m.set(row, col, v);
        }
    }
    m
}

/// `Gen_p / Rel_p` with a fixed basis.
///
/// Relation rows are kept fully reduced with each pivot at the row's last
/// nonzero position, so the basis (the born non-pivot generators) is exactly
/// what greedy selection of generators in index order produces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSpace {
    pub grade: Point2,
    born: Vec<bool>,
    rel_rows: Vec<(usize, Vec<u32>)>,
    basis: Vec<usize>,
}

impl PointSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Number of generators born at this grade.
    pub fn ambient_dim(&self) -> usize {
        self.born.iter().filter(|&&b| b).count()
    }

    pub fn relation_rank(&self) -> usize {
        self.rel_rows.len()
    }

    /// Generator indices whose classes form the basis.
    pub fn basis(&self) -> &[usize] {
        &self.basis
    }

    pub fn is_born(&self, i: usize) -> bool {
        self.born[i]
    }

    /// Coordinates of the class of `x`, which must only involve born
    /// generators.
    pub fn coords(&self, f: PrimeField, x: &[u32]) -> Vec<u32> {
        debug_assert!(x.iter().enumerate().all(|(i, &c)| c == 0 || self.born[i]), "unborn generator");
        let mut v = x.to_vec();
        reduce(f, &self.rel_rows, &mut v);
        self.basis.iter().map(|&b| v[b]).collect()
    }

    /// The generator vector of a coordinate vector.
    pub fn lift(&self, coords: &[u32]) -> Vec<u32> {
        let mut v = vec![0; self.born.len()];
        for (&b, &c) in self.basis.iter().zip(coords) {
            v[b] = c;
        }
        v
    }
}

/// Caches spaces by grade for one computation.
pub struct SpaceCache<'a> {
    module: &'a GradedPresentation,
    spaces: HashMap<Point2, PointSpace>,
}

impl<'a> SpaceCache<'a> {
    pub fn new(module: &'a GradedPresentation) -> Self {
        SpaceCache { module, spaces: HashMap::new() }
    }

    pub fn module(&self) -> &'a GradedPresentation {
        self.module
    }

    pub fn get(&mut self, p: &Point2) -> &PointSpace {
        let module = self.module;
        self.spaces.entry(*p).or_insert_with(|| module.space_at(p))
    }

    pub fn internal_map(&mut self, p: &Point2, q: &Point2) -> FieldMatrix {
        debug_assert!(p.leq(q));
        let field = self.module.field;
        let sp = self.get(p).clone();
        let sq = self.get(q);
        internal_map_between(&sp, sq, field)
    }
}

/// A morphism given by the images of the source generators. Image `i` is a
/// vector over the target generators, read as an element of the target at
/// the grade of source generator `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Morphism {
    pub images: Vec<Vec<u32>>,
}

impl Morphism {
    pub fn identity(m: &GradedPresentation) -> Self {
        let n = m.num_generators();
        Morphism {
            images: (0..n)
                .map(|i| {
                    let mut e = vec![0; n];
                    e[i] = 1;
                    e
                })
                .collect(),
        }
    }

    pub fn zero(source: &GradedPresentation, target: &GradedPresentation) -> Self {
        Morphism { images: vec![vec![0; target.num_generators()]; source.num_generators()] }
    }

    /// Reads a matrix `F` (rows target generators, columns source
    /// generators) as generator images.
    pub fn from_matrix(f: &FieldMatrix) -> Self {
        Morphism { images: (0..f.cols()).map(|c| f.column(c)).collect() }
    }

    /// `after ∘ self`, composed at generator level.
    pub fn then(&self, after: &Morphism, field: PrimeField) -> Morphism {
        let width = after.images.first().map_or(0, Vec::len);
        Morphism {
            images: self
                .images
                .iter()
                .map(|y| {
                    let mut out = vec![0; width];
                    for (j, &c) in y.iter().enumerate() {
                        field.axpy(&mut out, c, &after.images[j]);
                    }
                    out
                })
                .collect(),
        }
    }

    /// Linear combination of morphisms with the same shape.
    pub fn combine(
        basis: &[Morphism],
        coeffs: &[u32],
        field: PrimeField,
        source_gens: usize,
        target_gens: usize,
    ) -> Morphism {
        let mut images = vec![vec![0; target_gens]; source_gens];
        for (m, &c) in basis.iter().zip(coeffs) {
            for (img, src) in images.iter_mut().zip(&m.images) {
                field.axpy(img, c, src);
            }
        }
        Morphism { images }
    }

    /// Every relation of the source lands in the target's relations, and
    /// every image only involves generators born early enough.
    pub fn is_valid(&self, source: &GradedPresentation, target: &GradedPresentation) -> bool {
        let f = source.field();
        if self.images.len() != source.num_generators()
            || self.images.iter().any(|y| y.len() != target.num_generators())
        {
            return false;
        }
        for (i, y) in self.images.iter().enumerate() {
            let g = source.generators()[i];
            if y.iter().enumerate().any(|(j, &c)| c != 0 && !target.generators()[j].leq(&g)) {
                return false;
            }
        }
        source.relations().iter().all(|rel| {
            let mut img = vec![0; target.num_generators()];
            for (i, &c) in rel.coeffs.iter().enumerate() {
                f.axpy(&mut img, c, &self.images[i]);
            }
            target.space_at(&rel.grade).coords(f, &img).iter().all(|&v| v == 0)
        })
    }

    /// The matrix of the morphism at `p`, in the cached bases.
    pub fn matrix_at(&self, src: &mut SpaceCache, tgt: &mut SpaceCache, p: &Point2) -> FieldMatrix {
        let f = src.module().field();
        let basis = src.get(p).basis().to_vec();
        let tspace = tgt.get(p);
        let mut m = FieldMatrix::zeros(f, tspace.dim(), basis.len());
        for (col, &b) in basis.iter().enumerate() {
            for (row, v) in tspace.coords(f, &self.images[b]).into_iter().enumerate() {
                m.set(row, col, v);
            }
        }
        m
    }

    /// Whether `self - other` vanishes as a morphism into `target`: each
    /// generator's images differ by a relation at that generator's grade.
    pub fn equals_in(
        &self,
        other: &Morphism,
        source: &GradedPresentation,
        target: &GradedPresentation,
        grade_shift: Rational,
    ) -> bool {
        let f = source.field();
        self.images.iter().zip(&other.images).enumerate().all(|(i, (a, b))| {
            let diff: Vec<u32> = a.iter().zip(b).map(|(&x, &y)| f.sub(x, y)).collect();
            let at = source.generators()[i].diag(grade_shift);
            target.space_at(&at).coords(f, &diff).iter().all(|&v| v == 0)
        })
    }
}

/// A basis of `Hom(m, n)`.
///
/// The unknowns are the coordinates of each generator's image in the target
/// space at that generator's grade; each relation of `m` must map to zero in
/// `n` at the relation's grade.
pub fn hom_space(m: &GradedPresentation, n: &GradedPresentation) -> Result<Vec<Morphism>> {
    if m.field() != n.field() {
        return Err(Error::FieldMismatch(m.field().modulus(), n.field().modulus()));
    }
    let f = m.field();
    let mut cache = SpaceCache::new(n);
    // Unknown blocks: generator i gets dim n_{g_i} unknowns.
    let mut offsets = Vec::with_capacity(m.num_generators());
    let mut bases: Vec<Vec<usize>> = Vec::with_capacity(m.num_generators());
    let mut total = 0;
    for g in m.generators() {
        let sp = cache.get(g);
        offsets.push(total);
        total += sp.dim();
        bases.push(sp.basis().to_vec());
    }
    let mut rows: Vec<Vec<u32>> = Vec::new();
    for rel in m.relations() {
        let sp = cache.get(&rel.grade).clone();
        if sp.dim() == 0 {
            continue;
        }
        // Column t of the block for generator i: coords at the relation grade
        // of basis element t of n at g_i, times the relation coefficient.
        let mut block = vec![vec![0u32; total]; sp.dim()];
        for (i, &c) in rel.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (t, &b) in bases[i].iter().enumerate() {
                let mut e = vec![0; n.num_generators()];
                e[b] = c;
                for (r, v) in sp.coords(f, &e).into_iter().enumerate() {
                    block[r][offsets[i] + t] = f.add(block[r][offsets[i] + t], v);
                }
            }
        }
        rows.extend(block);
    }
    let system = if rows.is_empty() {
        FieldMatrix::zeros(f, 0, total)
    } else {
        FieldMatrix::from_vec(f, rows.len(), total, rows.concat())?
    };
    let null = system.null_space();
    Ok(null
        .into_iter()
        .map(|v| Morphism {
            images: (0..m.num_generators())
                .map(|i| {
                    let mut y = vec![0; n.num_generators()];
                    for (t, &b) in bases[i].iter().enumerate() {
                        y[b] = v[offsets[i] + t];
                    }
                    y
                })
                .collect(),
        })
        .collect())
}

pub fn eval_dim(m: &GradedPresentation, p: &Point2) -> usize {
    m.dim_at(p)
}

pub fn eval_space(m: &GradedPresentation, p: &Point2) -> PointSpace {
    m.space_at(p)
}

pub fn internal_map(m: &GradedPresentation, p: &Point2, q: &Point2) -> Result<FieldMatrix> {
    m.internal_map(p, q)
}

pub fn shift_presentation(m: &GradedPresentation, eps: Rational) -> GradedPresentation {
    m.shifted(eps)
}

/// Block-diagonal sum.
pub fn direct_sum(ms: &[GradedPresentation]) -> Result<GradedPresentation> {
    let Some(first) = ms.first() else {
        return Err(Error::Precondition("direct sum of no modules".into()));
    };
    let f = first.field();
    let total: usize = ms.iter().map(GradedPresentation::num_generators).sum();
    let mut generators = Vec::with_capacity(total);
    let mut relations = Vec::new();
    let mut offset = 0;
    for m in ms {
        if m.field() != f {
            return Err(Error::FieldMismatch(f.modulus(), m.field().modulus()));
        }
        generators.extend_from_slice(m.generators());
        for rel in m.relations() {
            let mut coeffs = vec![0; total];
            coeffs[offset..offset + m.num_generators()].copy_from_slice(&rel.coeffs);
            relations.push(Relation { grade: rel.grade, coeffs });
        }
        offset += m.num_generators();
    }
    Ok(GradedPresentation { field: f, generators, relations })
}

/// Join-closed set of grades.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriticalGrid {
    points: Vec<Point2>,
}

impl CriticalGrid {
    /// All pairwise joins of the given points. The join of any finite subset
    /// is the join of two of its members, so this is the join closure.
    pub fn from_points(base: impl IntoIterator<Item = Point2>) -> Self {
        let base: BTreeSet<(Rational, Rational)> = base.into_iter().map(|p| (p.x, p.y)).collect();
        let xs: Vec<_> = base.iter().collect();
        let mut out = BTreeSet::new();
        for a in &xs {
            for b in &xs {
                out.insert((a.0.max(b.0), a.1.max(b.1)));
            }
        }
        CriticalGrid { points: out.into_iter().map(Point2::from).collect() }
    }

    /// Every pairing of an x coordinate with a y coordinate.
    pub fn product(xs: impl IntoIterator<Item = Rational>, ys: impl IntoIterator<Item = Rational>) -> Self {
        let xs: BTreeSet<Rational> = xs.into_iter().collect();
        let ys: BTreeSet<Rational> = ys.into_iter().collect();
        let points = xs.iter().flat_map(|&x| ys.iter().map(move |&y| Point2::new(x, y))).collect();
        CriticalGrid { points }
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: &Point2) -> bool {
        self.points.binary_search_by(|q| q.lex_cmp(p)).is_ok()
    }
}

/// Grades of all modules, each also moved down by every shift, join-closed.
pub fn critical_grid(ms: &[&GradedPresentation], shifts: &[Rational]) -> CriticalGrid {
    let mut base = Vec::new();
    for m in ms {
        for g in m.grades() {
            base.push(g);
            for &s in shifts {
                base.push(g.diag(-s));
            }
        }
    }
    CriticalGrid::from_points(base)
}

/// On-disk form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationFile {
    pub p: u32,
    pub generators: Vec<Point2>,
    #[serde(default)]
    pub relations: Vec<Relation>,
}

impl PresentationFile {
    pub fn from_presentation(m: &GradedPresentation) -> Self {
        PresentationFile {
            p: m.field().modulus(),
            generators: m.generators().to_vec(),
            relations: m.relations().to_vec(),
        }
    }

    pub fn into_presentation(self) -> Result<GradedPresentation> {
        GradedPresentation::new(PrimeField::new(self.p)?, self.generators, self.relations)
    }
}
