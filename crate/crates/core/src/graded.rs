use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Exact rational scalar.
pub type Scalar = BigRational;

pub fn int(n: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

pub fn frac(p: i64, q: i64) -> Scalar {
    Scalar::new(BigInt::from(p), BigInt::from(q))
}

/// Formats a rational as `p/q`, or `p` when integral.
pub fn format_scalar(c: &Scalar) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

pub fn parse_scalar(s: &str) -> Option<Scalar> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                return None;
            }
            Some(Scalar::new(p, q))
        }
        None => s.parse::<BigInt>().ok().map(Scalar::from_integer),
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpaceError {
    #[error("duplicate basis id `{0}`")]
    DuplicateId(String),
    #[error("basis vector `{0}` has weight 0; weights start at 1")]
    ZeroWeight(String),
    #[error("unknown basis id `{0}`")]
    UnknownId(String),
    #[error("element has support outside the space (index {0})")]
    MixedSpaces(usize),
    #[error("element is not homogeneous (degrees {0} and {1})")]
    Inhomogeneous(i64, i64),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisVector {
    pub id: String,
    pub degree: i64,
    pub weight: u32,
}

impl BasisVector {
    pub fn new(id: impl Into<String>, degree: i64, weight: u32) -> Self {
        BasisVector { id: id.into(), degree, weight }
    }
}

/// Filtration weight of an element: the minimum weight in its support, or infinity for zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FiltrationWeight {
    Finite(u32),
    Infinite,
}

impl FiltrationWeight {
    pub fn is_at_least(self, p: u32) -> bool {
        match self {
            FiltrationWeight::Finite(w) => w >= p,
            FiltrationWeight::Infinite => true,
        }
    }

    pub fn finite(self) -> Option<u32> {
        match self {
            FiltrationWeight::Finite(w) => Some(w),
            FiltrationWeight::Infinite => None,
        }
    }
}

impl fmt::Display for FiltrationWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FiltrationWeight::Finite(w) => write!(f, "{w}"),
            FiltrationWeight::Infinite => write!(f, "inf"),
        }
    }
}

/// A sparse vector: basis index to nonzero coefficient.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Element {
    coeffs: BTreeMap<usize, Scalar>,
}

impl Element {
    pub fn zero() -> Self {
        Element::default()
    }

    pub fn basis(i: usize) -> Self {
        Self::term(i, Scalar::one())
    }

    pub fn term(i: usize, c: Scalar) -> Self {
        let mut e = Element::zero();
        e.add_term(i, c);
        e
    }

    pub fn from_terms<I: IntoIterator<Item = (usize, Scalar)>>(terms: I) -> Self {
        let mut e = Element::zero();
        for (i, c) in terms {
            e.add_term(i, c);
        }
        e
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn get(&self, i: usize) -> Scalar {
        self.coeffs.get(&i).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn coeff(&self, i: usize) -> Option<&Scalar> {
        self.coeffs.get(&i)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Scalar)> + '_ {
        self.coeffs.iter().map(|(i, c)| (*i, c))
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.coeffs.keys().copied()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn add_term(&mut self, i: usize, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.entry(i) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, c: &Scalar, other: &Element) {
        if c.is_zero() {
            return;
        }
        for (i, x) in other.iter() {
            self.add_term(i, c * x);
        }
    }

    pub fn scaled(&self, c: &Scalar) -> Element {
        if c.is_zero() {
            return Element::zero();
        }
        Element { coeffs: self.coeffs.iter().map(|(i, x)| (*i, x * c)).collect() }
    }

    pub fn negated(&self) -> Element {
        Element { coeffs: self.coeffs.iter().map(|(i, x)| (*i, -x)).collect() }
    }

    /// Keeps only the indices accepted by `keep`.
    pub fn filtered(&self, mut keep: impl FnMut(usize) -> bool) -> Element {
        Element {
            coeffs: self.coeffs.iter().filter(|(i, _)| keep(**i)).map(|(i, c)| (*i, c.clone())).collect(),
        }
    }

    pub fn remap(&self, f: impl Fn(usize) -> usize) -> Element {
        Element::from_terms(self.iter().map(|(i, c)| (f(i), c.clone())))
    }
}

impl Add for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        let mut out = self.clone();
        out.add_scaled(&Scalar::one(), rhs);
        out
    }
}

impl Sub for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        let mut out = self.clone();
        out.add_scaled(&-Scalar::one(), rhs);
        out
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.negated()
    }
}

impl AddAssign<&Element> for Element {
    fn add_assign(&mut self, rhs: &Element) {
        self.add_scaled(&Scalar::one(), rhs);
    }
}

/// Finite-dimensional graded space with a basis-aligned descending filtration:
/// `F_p` is spanned by the basis vectors of weight at least `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedSpace {
    basis: Vec<BasisVector>,
    index: HashMap<String, usize>,
}

impl GradedSpace {
    pub fn new(basis: Vec<BasisVector>) -> Result<Self, SpaceError> {
        let mut index = HashMap::with_capacity(basis.len());
        for (i, b) in basis.iter().enumerate() {
            if b.weight == 0 {
                return Err(SpaceError::ZeroWeight(b.id.clone()));
            }
            if index.insert(b.id.clone(), i).is_some() {
                return Err(SpaceError::DuplicateId(b.id.clone()));
            }
        }
        Ok(GradedSpace { basis, index })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BasisVector] {
        &self.basis
    }

    pub fn vector(&self, i: usize) -> &BasisVector {
        &self.basis[i]
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.basis[i].degree
    }

    pub fn weight(&self, i: usize) -> u32 {
        self.basis[i].weight
    }

    pub fn id(&self, i: usize) -> &str {
        &self.basis[i].id
    }

    pub fn index_of(&self, id: &str) -> Result<usize, SpaceError> {
        self.index.get(id).copied().ok_or_else(|| SpaceError::UnknownId(id.to_string()))
    }

    /// Smallest `N` with `F_N = 0`.
    pub fn nilpotency_bound(&self) -> u32 {
        self.basis.iter().map(|b| b.weight).max().map_or(1, |w| w + 1)
    }

    pub fn filtration_weight(&self, x: &Element) -> FiltrationWeight {
        x.support()
            .map(|i| self.weight(i))
            .min()
            .map_or(FiltrationWeight::Infinite, FiltrationWeight::Finite)
    }

    pub fn in_filtration(&self, x: &Element, p: u32) -> bool {
        self.filtration_weight(x).is_at_least(p)
    }

    pub fn check_element(&self, x: &Element) -> Result<(), SpaceError> {
        match x.max_index() {
            Some(i) if i >= self.dim() => Err(SpaceError::MixedSpaces(i)),
            _ => Ok(()),
        }
    }

    /// `Some(d)` for a nonzero homogeneous element, `None` for zero.
    pub fn degree_of(&self, x: &Element) -> Result<Option<i64>, SpaceError> {
        self.check_element(x)?;
        let mut deg = None;
        for i in x.support() {
            let d = self.degree(i);
            match deg {
                None => deg = Some(d),
                Some(e) if e != d => return Err(SpaceError::Inhomogeneous(e, d)),
                _ => {}
            }
        }
        Ok(deg)
    }

    pub fn is_homogeneous_of(&self, x: &Element, d: i64) -> bool {
        x.support().all(|i| self.degree(i) == d)
    }

    /// `x + c*y`, rejecting elements that do not live in this space.
    pub fn combine(&self, x: &Element, y: &Element, c: &Scalar) -> Result<Element, SpaceError> {
        self.check_element(x)?;
        self.check_element(y)?;
        let mut out = x.clone();
        out.add_scaled(c, y);
        Ok(out)
    }

    /// Basis indices of the given degree with weight at least `p`, ordered by (weight, index).
    pub fn layer_indices(&self, degree: i64, p: u32) -> Vec<usize> {
        let mut v: Vec<usize> =
            (0..self.dim()).filter(|&i| self.degree(i) == degree && self.weight(i) >= p).collect();
        v.sort_by_key(|&i| (self.weight(i), i));
        v
    }

    /// Components of `x` with weight strictly below `p`.
    pub fn below(&self, x: &Element, p: u32) -> Element {
        x.filtered(|i| self.weight(i) < p)
    }

    /// Components of `x` with weight exactly `p`.
    pub fn at_weight(&self, x: &Element, p: u32) -> Element {
        x.filtered(|i| self.weight(i) == p)
    }

    pub fn degrees(&self) -> Vec<i64> {
        let mut d: Vec<i64> = self.basis.iter().map(|b| b.degree).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    /// Human-readable rendering such as `e0 - 1/2*e1`.
    pub fn show(&self, x: &Element) -> String {
        if x.is_zero() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (k, (i, c)) in x.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            if !a.is_one() {
                s.push_str(&format_scalar(&a));
                s.push('*');
            }
            s.push_str(self.id(i));
        }
        s
    }
}

/// Linear map between graded spaces, stored as images of domain basis vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearMap {
    pub columns: Vec<Element>,
    pub degree: i64,
}

impl LinearMap {
    pub fn zero(domain_dim: usize, degree: i64) -> Self {
        LinearMap { columns: vec![Element::zero(); domain_dim], degree }
    }

    pub fn identity(dim: usize) -> Self {
        LinearMap { columns: (0..dim).map(Element::basis).collect(), degree: 0 }
    }

    pub fn apply(&self, x: &Element) -> Element {
        let mut out = Element::zero();
        for (i, c) in x.iter() {
            out.add_scaled(c, &self.columns[i]);
        }
        out
    }

    pub fn domain_dim(&self) -> usize {
        self.columns.len()
    }

    /// Checks that every column is homogeneous of degree `deg(source) + degree` in `codomain`.
    pub fn check_degree(&self, domain: &GradedSpace, codomain: &GradedSpace) -> Result<(), (usize, i64)> {
        for (i, col) in self.columns.iter().enumerate() {
            let want = domain.degree(i) + self.degree;
            if codomain.check_element(col).is_err() || !codomain.is_homogeneous_of(col, want) {
                return Err((i, want));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s1() -> GradedSpace {
        GradedSpace::new(vec![BasisVector::new("e0", 0, 2), BasisVector::new("e1", 1, 3)]).unwrap()
    }

    #[test]
    fn nilpotency_and_weights() {
        let s = s1();
        assert_eq!(s.nilpotency_bound(), 4);
        assert_eq!(s.filtration_weight(&Element::basis(1)), FiltrationWeight::Finite(3));
        assert_eq!(s.filtration_weight(&Element::zero()), FiltrationWeight::Infinite);
        assert!(s.in_filtration(&Element::basis(0), 2));
        assert!(!s.in_filtration(&Element::basis(0), 3));
        assert_eq!(GradedSpace::new(vec![]).unwrap().nilpotency_bound(), 1);
    }

    #[test]
    fn rejects_bad_bases() {
        let dup = GradedSpace::new(vec![BasisVector::new("a", 0, 1), BasisVector::new("a", 1, 1)]);
        assert_eq!(dup.unwrap_err(), SpaceError::DuplicateId("a".into()));
        let w0 = GradedSpace::new(vec![BasisVector::new("a", 0, 0)]);
        assert_eq!(w0.unwrap_err(), SpaceError::ZeroWeight("a".into()));
    }

    #[test]
    fn degree_checks() {
        let s = s1();
        let mixed = Element::from_terms([(0, int(1)), (1, int(1))]);
        assert_eq!(s.degree_of(&mixed), Err(SpaceError::Inhomogeneous(0, 1)));
        assert_eq!(s.degree_of(&Element::zero()), Ok(None));
        assert_eq!(s.degree_of(&Element::basis(5)), Err(SpaceError::MixedSpaces(5)));
        assert!(s.combine(&Element::basis(0), &Element::basis(7), &int(1)).is_err());
    }

    #[test]
    fn scalar_roundtrip() {
        for s in ["0", "-1/2", "3", "7/9"] {
            assert_eq!(format_scalar(&parse_scalar(s).unwrap()), s);
        }
        assert_eq!(format_scalar(&parse_scalar("4/2").unwrap()), "2");
        assert!(parse_scalar("1/0").is_none());
        assert!(parse_scalar("x").is_none());
    }

    #[test]
    fn cancellation_removes_terms() {
        let mut e = Element::basis(3);
        e.add_term(3, int(-1));
        assert!(e.is_zero());
        let x = Element::from_terms([(0, frac(1, 2)), (2, int(3))]);
        assert_eq!(&(&x - &x), &Element::zero());
        assert_eq!(s1().show(&Element::from_terms([(0, frac(-1, 2)), (1, int(1))])), "-1/2*e0 + e1");
    }
}
