//! Staircases: finite antichains of corners and the up-closed regions they
//! generate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::presentation::{direct_sum, GradedPresentation, Relation};
use crate::rational::{Point2, Rational};

/// Corners sorted by increasing x, hence decreasing y.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Staircase {
    corners: Vec<Point2>,
}

impl Staircase {
    /// Drops dominated and repeated points and sorts the rest.
    pub fn normalize(points: impl IntoIterator<Item = Point2>) -> Result<Self> {
        let mut pts: Vec<Point2> = points.into_iter().collect();
        if pts.is_empty() {
            return Err(Error::Precondition("a staircase needs at least one corner".into()));
        }
        pts.sort_by(Point2::lex_cmp);
        pts.dedup();
        // After sorting by (x, y), a point survives iff its y is below every
        // earlier survivor's y.
        let mut corners: Vec<Point2> = Vec::with_capacity(pts.len());
        for p in pts {
            if corners.last().is_none_or(|last| p.y < last.y) {
                corners.push(p);
            }
        }
        Ok(Staircase { corners })
    }

    pub fn single(p: Point2) -> Self {
        Staircase { corners: vec![p] }
    }

    pub fn corners(&self) -> &[Point2] {
        &self.corners
    }

    pub fn len(&self) -> usize {
        self.corners.len()
    }

    pub fn is_empty(&self) -> bool {
        self.corners.is_empty()
    }

    /// Some corner lies below `p`. Only the last corner with `x <= p.x` can
    /// qualify, since it has the smallest y among those.
    pub fn contains(&self, p: &Point2) -> bool {
        let k = self.corners.partition_point(|a| a.x <= p.x);
        k > 0 && self.corners[k - 1].y <= p.y
    }

    /// Some corner lies strictly below `p` in both coordinates.
    pub fn interior_contains(&self, p: &Point2) -> bool {
        self.corners.iter().any(|a| a.strictly_below(p))
    }

    /// Every corner moved by `-(eps, eps)`.
    pub fn shift(&self, eps: Rational) -> Staircase {
        Staircase { corners: self.corners.iter().map(|a| a.diag(-eps)).collect() }
    }

    /// Grades where consecutive corners meet.
    pub fn joins(&self) -> Vec<Point2> {
        self.corners.windows(2).map(|w| Point2::new(w[1].x, w[0].y)).collect()
    }

    /// Largest absolute coordinate over all corners.
    pub fn max_abs_coord(&self) -> Rational {
        self.corners.iter().flat_map(|a| [a.x.abs(), a.y.abs()]).max().expect("nonempty")
    }

    pub fn max_coord(&self) -> Rational {
        self.corners.iter().flat_map(|a| [a.x, a.y]).max().expect("nonempty")
    }

    /// One generator per corner; relation `i` identifies corners `i` and
    /// `i+1` at their join.
    pub fn presentation(&self, field: PrimeField) -> GradedPresentation {
        let k = self.corners.len();
        let minus_one = field.neg(1);
        let relations = self
            .joins()
            .into_iter()
            .enumerate()
            .map(|(i, grade)| {
                let mut coeffs = vec![0; k];
                coeffs[i] = 1;
                coeffs[i + 1] = minus_one;
                Relation { grade, coeffs }
            })
            .collect();
        GradedPresentation::new(field, self.corners.clone(), relations).expect("joins dominate their corners")
    }
}

/// Least `eps >= 0` with `S ⊆ T^eps`.
///
/// A corner `a` of `S` lies in `T^eps` iff some corner `b` of `T` has
/// `b - (eps, eps) <= a`, i.e. `eps >= max(b.x - a.x, b.y - a.y)`.
pub fn dshift_distance(s: &Staircase, t: &Staircase) -> Rational {
    s.corners
        .iter()
        .map(|a| t.corners.iter().map(|b| (b.x - a.x).max(b.y - a.y)).min().expect("nonempty staircase"))
        .max()
        .expect("nonempty staircase")
        .max(Rational::ZERO)
}

pub fn normalize(points: impl IntoIterator<Item = Point2>) -> Result<Staircase> {
    Staircase::normalize(points)
}

pub fn contains(s: &Staircase, p: &Point2) -> bool {
    s.contains(p)
}

pub fn shift(s: &Staircase, eps: Rational) -> Staircase {
    s.shift(eps)
}

pub fn staircase_presentation(s: &Staircase, field: PrimeField) -> GradedPresentation {
    s.presentation(field)
}

/// Presentation of the reflected interior `{q : -q in interior(s)}`, cut off
/// below at `(-z_cut, -z_cut)`.
///
/// The reflected interior is the union of the open lower-left quadrants of
/// the negated corners. Its complement above the cut is generated by the
/// negated corners, the negated joins, and the two points where the region
/// meets the cut: `((-a_first).x, -z_cut)` and `(-z_cut, (-a_last).y)` with
/// corners in increasing x order.
pub fn dual_staircase(s: &Staircase, z_cut: Rational, field: PrimeField) -> Result<GradedPresentation> {
    if z_cut <= s.max_abs_coord() {
        return Err(Error::Precondition(format!("cut {z_cut} must exceed every |coordinate| ({})", s.max_abs_coord())));
    }
    let low = -z_cut;
    let first = s.corners.first().expect("nonempty");
    let last = s.corners.last().expect("nonempty");
    let mut grades: Vec<Point2> = s.corners.iter().map(Point2::neg).collect();
    grades.extend(s.joins().iter().map(Point2::neg));
    grades.push(Point2::new(low, -last.y));
    grades.push(Point2::new(-first.x, low));
    let relations = grades.into_iter().map(|grade| Relation { grade, coeffs: vec![1] }).collect();
    GradedPresentation::new(field, vec![Point2::new(low, low)], relations)
}

/// A direct sum of staircase modules.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StaircaseSum {
    pub field: PrimeField,
    pub summands: Vec<Staircase>,
}

impl StaircaseSum {
    pub fn new(field: PrimeField, summands: Vec<Staircase>) -> Result<Self> {
        if summands.is_empty() {
            return Err(Error::Precondition("a staircase sum needs at least one summand".into()));
        }
        Ok(StaircaseSum { field, summands })
    }

    pub fn len(&self) -> usize {
        self.summands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.summands.is_empty()
    }

    pub fn presentation(&self) -> GradedPresentation {
        let parts: Vec<GradedPresentation> = self.summands.iter().map(|s| s.presentation(self.field)).collect();
        direct_sum(&parts).expect("same field")
    }

    pub fn shift(&self, eps: Rational) -> StaircaseSum {
        StaircaseSum { field: self.field, summands: self.summands.iter().map(|s| s.shift(eps)).collect() }
    }

    pub fn max_coord(&self) -> Rational {
        self.summands.iter().map(Staircase::max_coord).max().expect("nonempty")
    }

    pub fn max_abs_coord(&self) -> Rational {
        self.summands.iter().map(Staircase::max_abs_coord).max().expect("nonempty")
    }

    /// `d_s` from every summand of `self` to every summand of `other`,
    /// indexed `[i][j]`.
    pub fn distance_matrix(&self, other: &StaircaseSum) -> Vec<Vec<Rational>> {
        self.summands.iter().map(|s| other.summands.iter().map(|t| dshift_distance(s, t)).collect()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StaircaseFile {
    pub corners: Vec<Point2>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StaircaseSumFile {
    pub p: u32,
    pub summands: Vec<StaircaseFile>,
}

impl StaircaseFile {
    pub fn from_staircase(s: &Staircase) -> Self {
        StaircaseFile { corners: s.corners.clone() }
    }

    pub fn into_staircase(self) -> Result<Staircase> {
        Staircase::normalize(self.corners)
    }
}

impl StaircaseSumFile {
    pub fn from_sum(s: &StaircaseSum) -> Self {
        StaircaseSumFile {
            p: s.field.modulus(),
            summands: s.summands.iter().map(StaircaseFile::from_staircase).collect(),
        }
    }

    pub fn into_sum(self) -> Result<StaircaseSum> {
        let field = PrimeField::new(self.p)?;
        let summands = self.summands.into_iter().map(StaircaseFile::into_staircase).collect::<Result<_>>()?;
        StaircaseSum::new(field, summands)
    }
}
