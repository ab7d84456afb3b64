//! Exact linear algebra over the rationals on sparse vectors.

use num_traits::{One, Zero};

use std::collections::BTreeMap;

use crate::graded::{Element, GradedSpace, LinearMap, Scalar};

/// Semi-echelon spanning set of a subspace.
///
/// Each stored row has a pivot coordinate (its smallest index after reduction by the earlier rows,
/// normalised to 1) and remembers which combination of inserted vectors produced it.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: Vec<Row>,
    inserted: usize,
}

#[derive(Clone, Debug)]
struct Row {
    pivot: usize,
    vec: Element,
    combo: Element,
}

impl Echelon {
    pub fn new() -> Self {
        Echelon::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn inserted(&self) -> usize {
        self.inserted
    }

    /// Reduces `v`, returning the residual and the combination `c` of inserted vectors
    /// with `v = residual + sum c_j * inserted_j`.
    pub fn reduce(&self, v: &Element) -> (Element, Element) {
        let mut res = v.clone();
        let mut combo = Element::zero();
        for row in &self.rows {
            if let Some(c) = res.coeff(row.pivot).cloned() {
                res.add_scaled(&-c.clone(), &row.vec);
                combo.add_scaled(&c, &row.combo);
            }
        }
        (res, combo)
    }

    pub fn contains(&self, v: &Element) -> bool {
        self.reduce(v).0.is_zero()
    }

    /// Inserts `v` and reports whether it was independent of what is already stored.
    /// Returns the index it was assigned as an inserted vector either way.
    pub fn insert(&mut self, v: &Element) -> (bool, usize) {
        let id = self.inserted;
        self.inserted += 1;
        let (res, combo) = self.reduce(v);
        if res.is_zero() {
            return (false, id);
        }
        let pivot = res.support().next().unwrap();
        let inv = Scalar::one() / res.get(pivot);
        let mut own = combo.negated();
        own.add_term(id, Scalar::one());
        self.rows.push(Row { pivot, vec: res.scaled(&inv), combo: own.scaled(&inv) });
        (true, id)
    }
}

pub fn rank(vectors: &[Element]) -> usize {
    let mut e = Echelon::new();
    for v in vectors {
        e.insert(v);
    }
    e.rank()
}

/// Finds `x` with `sum x_j * columns[j] = b`, preferring earlier columns as pivots;
/// coefficients of later dependent columns are zero.
pub fn solve(columns: &[Element], b: &Element) -> Option<Element> {
    let mut e = Echelon::new();
    for c in columns {
        e.insert(c);
    }
    let (res, combo) = e.reduce(b);
    res.is_zero().then_some(combo)
}

/// Basis of `{x : sum x_j * columns[j] = 0}` as coefficient vectors, one per dependent column.
pub fn kernel(columns: &[Element]) -> Vec<Element> {
    let mut e = Echelon::new();
    let mut out = Vec::new();
    for c in columns {
        let (res, combo) = e.reduce(c);
        let (indep, id) = e.insert(c);
        if !indep {
            debug_assert!(res.is_zero());
            let mut k = combo.negated();
            k.add_term(id, Scalar::one());
            out.push(k);
        }
    }
    out
}

/// Expands a coefficient vector over `vectors` into an element.
pub fn combine(vectors: &[Element], coeffs: &Element) -> Element {
    let mut out = Element::zero();
    for (j, c) in coeffs.iter() {
        out.add_scaled(c, &vectors[j]);
    }
    out
}

/// A subquotient `N / D` with `D` a subspace of `N`, presented by a chosen complement basis.
#[derive(Clone, Debug)]
pub struct Quotient {
    ech: Echelon,
    rel_count: usize,
    /// Inserted ids of the class representatives, in order.
    class_ids: Vec<usize>,
    pub classes: Vec<Element>,
    pub relations_rank: usize,
}

impl Quotient {
    /// Builds the quotient of `span(numerator)` by `span(relations)`.
    /// Returns `Err` with an offending relation if `relations` is not inside the numerator span.
    pub fn new(numerator: &[Element], relations: &[Element]) -> Result<Self, Element> {
        let mut num = Echelon::new();
        for v in numerator {
            num.insert(v);
        }
        for r in relations {
            if !num.contains(r) {
                return Err(r.clone());
            }
        }
        let mut ech = Echelon::new();
        for r in relations {
            ech.insert(r);
        }
        let rel_count = ech.inserted();
        let relations_rank = ech.rank();
        let mut class_ids = Vec::new();
        let mut classes = Vec::new();
        for v in numerator {
            let (indep, id) = ech.insert(v);
            if indep {
                class_ids.push(id);
                classes.push(v.clone());
            }
        }
        Ok(Quotient { ech, rel_count, class_ids, classes, relations_rank })
    }

    pub fn dim(&self) -> usize {
        self.classes.len()
    }

    /// Coordinates of the class of `v` in terms of `classes`, or `None` if `v` is outside the numerator.
    pub fn coordinates(&self, v: &Element) -> Option<Vec<Scalar>> {
        let (res, combo) = self.ech.reduce(v);
        if !res.is_zero() {
            return None;
        }
        debug_assert!(combo.support().all(|j| j < self.rel_count || self.class_ids.contains(&j)));
        Some(self.class_ids.iter().map(|&id| combo.get(id)).collect())
    }

    pub fn is_trivial_class(&self, v: &Element) -> Option<bool> {
        self.coordinates(v).map(|c| c.iter().all(Zero::is_zero))
    }
}

/// Rank of a dense matrix given as columns of equal length.
pub fn dense_rank(columns: &[Vec<Scalar>]) -> usize {
    let cols: Vec<Element> = columns
        .iter()
        .map(|c| Element::from_terms(c.iter().enumerate().map(|(i, x)| (i, x.clone()))))
        .collect();
    rank(&cols)
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum CohomologyError {
    #[error("not a differential: d has degree {0}, expected 1")]
    WrongDegree(i64),
    #[error("not a differential: d^2 is nonzero on basis vector {0}")]
    NotADifferential(usize),
}

/// Per-degree `dim ker d - rank d` for a degree +1 differential on `space`.
pub fn cohomology(space: &GradedSpace, d: &LinearMap) -> Result<BTreeMap<i64, usize>, CohomologyError> {
    if d.degree != 1 {
        return Err(CohomologyError::WrongDegree(d.degree));
    }
    for (i, col) in d.columns.iter().enumerate() {
        if !d.apply(col).is_zero() {
            return Err(CohomologyError::NotADifferential(i));
        }
    }
    let mut rank_from = BTreeMap::new();
    let mut dims = BTreeMap::new();
    for n in space.degrees() {
        let cols: Vec<Element> = (0..space.dim()).filter(|&i| space.degree(i) == n).map(|i| d.columns[i].clone()).collect();
        let r = rank(&cols);
        rank_from.insert(n, r);
        dims.insert(n, cols.len());
    }
    Ok(dims
        .iter()
        .map(|(&n, &dim)| (n, dim - rank_from[&n] - rank_from.get(&(n - 1)).copied().unwrap_or(0)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::int;

    fn v(xs: &[i64]) -> Element {
        Element::from_terms(xs.iter().enumerate().map(|(i, &x)| (i, int(x))))
    }

    #[test]
    fn rank_and_kernel() {
        let cols = vec![v(&[1, 2, 3]), v(&[2, 4, 6]), v(&[0, 1, 1]), v(&[1, 3, 4])];
        assert_eq!(rank(&cols), 2);
        let ker = kernel(&cols);
        assert_eq!(ker.len(), 2);
        for k in &ker {
            assert!(combine(&cols, k).is_zero());
        }
    }

    #[test]
    fn solve_prefers_early_columns() {
        let cols = vec![v(&[1, 0]), v(&[1, 0]), v(&[0, 1])];
        let x = solve(&cols, &v(&[2, 3])).unwrap();
        assert_eq!(x, Element::from_terms([(0, int(2)), (2, int(3))]));
        assert!(solve(&[v(&[1, 0])], &v(&[0, 1])).is_none());
    }

    #[test]
    fn quotient_coordinates() {
        let q = Quotient::new(&[v(&[1, 0, 0]), v(&[0, 1, 0])], &[v(&[1, 1, 0])]).unwrap();
        assert_eq!(q.dim(), 1);
        assert_eq!(q.coordinates(&v(&[1, 0, 0])), Some(vec![int(1)]));
        assert_eq!(q.coordinates(&v(&[0, 1, 0])), Some(vec![int(-1)]));
        assert_eq!(q.coordinates(&v(&[0, 0, 1])), None);
        assert!(Quotient::new(&[v(&[1, 0])], &[v(&[0, 1])]).is_err());
    }

    #[test]
    fn cohomology_of_s1() {
        let s = crate::fixtures::s1();
        let zero = LinearMap::zero(2, 1);
        assert_eq!(cohomology(&s, &zero).unwrap(), BTreeMap::from([(0, 1), (1, 1)]));
        let d = LinearMap { columns: vec![Element::basis(1), Element::zero()], degree: 1 };
        assert_eq!(cohomology(&s, &d).unwrap(), BTreeMap::from([(0, 0), (1, 0)]));
        let bad = LinearMap { columns: vec![Element::basis(1), Element::basis(1)], degree: 1 };
        assert_eq!(cohomology(&s, &bad), Err(CohomologyError::NotADifferential(0)));
    }
}
