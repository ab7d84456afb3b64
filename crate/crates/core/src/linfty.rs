//! Curved shifted L-infinity algebras on filtered graded spaces.
//!
//! Brackets `mu_n` are graded symmetric in the stored (shifted) degrees and all have degree +1.
//! They are stored on ascending basis-index tuples; other argument orders are recovered with
//! the Koszul sign of the sorting permutation.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::graded::{int, Element, FiltrationWeight, GradedSpace, LinearMap, Scalar, SpaceError};
use crate::koszul::{koszul_sign, sort_with_sign, unshuffles};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error("bracket on ({args}) must have degree {expected}, found {found}")]
    DegreeMismatch { args: String, expected: i64, found: i64 },
    #[error("bracket on ({0}) repeats an odd-degree argument and must vanish")]
    RepeatedOddArgument(String),
    #[error("expected an element of degree {expected}, found degree {found}")]
    WrongDegree { expected: i64, found: i64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurvedAlgebra {
    space: GradedSpace,
    entries: BTreeMap<Vec<usize>, Element>,
    arities: BTreeSet<usize>,
}

/// Accumulates bracket values and validates degrees and symmetry.
pub struct AlgebraBuilder {
    space: GradedSpace,
    entries: BTreeMap<Vec<usize>, Element>,
}

impl AlgebraBuilder {
    pub fn new(space: GradedSpace) -> Self {
        AlgebraBuilder { space, entries: BTreeMap::new() }
    }

    pub fn space(&self) -> &GradedSpace {
        &self.space
    }

    pub fn curvature(&mut self, value: Element) -> Result<&mut Self, AlgebraError> {
        self.bracket(&[], value)
    }

    /// Adds `value` to `mu_n(args)`; the arguments may be in any order.
    pub fn bracket(&mut self, args: &[usize], value: Element) -> Result<&mut Self, AlgebraError> {
        for &a in args {
            if a >= self.space.dim() {
                return Err(SpaceError::MixedSpaces(a).into());
            }
        }
        self.space.check_element(&value)?;
        if value.is_zero() {
            return Ok(self);
        }
        let label = || args.iter().map(|&a| self.space.id(a)).collect::<Vec<_>>().join(",");
        let Some((key, sign)) = sort_with_sign(args, |i| self.space.degree(i)) else {
            return Err(AlgebraError::RepeatedOddArgument(label()));
        };
        let expected = args.iter().map(|&a| self.space.degree(a)).sum::<i64>() + 1;
        match self.space.degree_of(&value)? {
            Some(d) if d != expected => {
                return Err(AlgebraError::DegreeMismatch { args: label(), expected, found: d })
            }
            _ => {}
        }
        let slot = self.entries.entry(key).or_default();
        slot.add_scaled(&int(sign), &value);
        Ok(self)
    }

    pub fn build(self) -> CurvedAlgebra {
        CurvedAlgebra::from_sorted_entries(self.space, self.entries)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiltrationViolation {
    pub args: Vec<usize>,
    pub required: u32,
    pub found: FiltrationWeight,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationViolation {
    pub args: Vec<usize>,
    pub defect: Element,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationReport {
    /// Largest relation arity that was checked.
    pub checked_through: usize,
    /// Tuples whose total weight reaches the nilpotency bound were skipped (all terms vanish).
    pub weight_cutoff: Option<u32>,
    pub tuples_checked: usize,
    pub violations: Vec<RelationViolation>,
}

impl RelationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl CurvedAlgebra {
    fn from_sorted_entries(space: GradedSpace, mut entries: BTreeMap<Vec<usize>, Element>) -> Self {
        entries.retain(|_, v| !v.is_zero());
        let arities = entries.keys().map(Vec::len).collect();
        CurvedAlgebra { space, entries, arities }
    }

    pub fn flat(space: GradedSpace) -> Self {
        Self::from_sorted_entries(space, BTreeMap::new())
    }

    pub fn space(&self) -> &GradedSpace {
        &self.space
    }

    /// Stored entries ordered by arity, then by argument tuple.
    pub fn entries(&self) -> Vec<(&Vec<usize>, &Element)> {
        let mut v: Vec<_> = self.entries.iter().collect();
        v.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(b.0)));
        v
    }

    pub fn entry(&self, sorted_args: &[usize]) -> Option<&Element> {
        self.entries.get(sorted_args)
    }

    pub fn entry_count(&self) -> usize {
        self.entries.len()
    }

    pub fn max_arity(&self) -> usize {
        self.arities.iter().next_back().copied().unwrap_or(0)
    }

    pub fn has_arity(&self, n: usize) -> bool {
        self.arities.contains(&n)
    }

    pub fn curvature(&self) -> Element {
        self.entries.get(&Vec::new()).cloned().unwrap_or_default()
    }

    pub fn curvature_filtration(&self) -> FiltrationWeight {
        self.space.filtration_weight(&self.curvature())
    }

    pub fn is_flat(&self) -> bool {
        self.curvature().is_zero()
    }

    /// `mu_n` on basis vectors in the given order.
    pub fn bracket_on_basis(&self, args: &[usize]) -> Element {
        if !self.has_arity(args.len()) {
            return Element::zero();
        }
        match sort_with_sign(args, |i| self.space.degree(i)) {
            None => Element::zero(),
            Some((key, sign)) => match self.entries.get(&key) {
                None => Element::zero(),
                Some(v) if sign == 1 => v.clone(),
                Some(v) => v.negated(),
            },
        }
    }

    /// `mu_n(x_1, ..., x_n)` by multilinear expansion.
    pub fn eval_bracket(&self, args: &[&Element]) -> Result<Element, AlgebraError> {
        for x in args {
            self.space.check_element(x)?;
        }
        let mut out = Element::zero();
        if !self.has_arity(args.len()) {
            return Ok(out);
        }
        let mut idx = Vec::with_capacity(args.len());
        self.expand(args, &mut idx, &Scalar::one(), &mut out);
        Ok(out)
    }

    fn expand(&self, args: &[&Element], idx: &mut Vec<usize>, coeff: &Scalar, out: &mut Element) {
        if idx.len() == args.len() {
            let v = self.bracket_on_basis(idx);
            out.add_scaled(coeff, &v);
            return;
        }
        for (i, c) in args[idx.len()].iter() {
            idx.push(i);
            self.expand(args, idx, &(coeff * c), out);
            idx.pop();
        }
    }

    pub fn mu1(&self, x: &Element) -> Element {
        let mut out = Element::zero();
        if !self.has_arity(1) {
            return out;
        }
        for (i, c) in x.iter() {
            if let Some(v) = self.entries.get(&vec![i]) {
                out.add_scaled(c, v);
            }
        }
        out
    }

    pub fn mu1_map(&self) -> LinearMap {
        LinearMap {
            columns: (0..self.space.dim()).map(|i| self.mu1(&Element::basis(i))).collect(),
            degree: 1,
        }
    }

    /// Entries whose value has lower filtration weight than the sum of the argument weights.
    pub fn check_filtration_compatibility(&self) -> Vec<FiltrationViolation> {
        let mut out = Vec::new();
        for (args, v) in self.entries() {
            let required: u32 = args.iter().map(|&a| self.space.weight(a)).sum::<u32>().max(1);
            let found = self.space.filtration_weight(v);
            if !found.is_at_least(required) {
                out.push(FiltrationViolation { args: args.clone(), required, found });
            }
        }
        out
    }

    /// Arity beyond which every relation vanishes: relations of arity `n` only involve
    /// `mu_{j+1}(mu_i(..), ..)` with `i + j = n`, and weights cut off at the nilpotency bound.
    pub fn relation_arity_bound(&self) -> usize {
        let m = self.max_arity();
        let algebraic = (2 * m).saturating_sub(1);
        if self.check_filtration_compatibility().is_empty() {
            algebraic.min(self.space.nilpotency_bound() as usize - 1)
        } else {
            algebraic
        }
    }

    /// The curved L-infinity relation evaluated on a tuple of basis vectors:
    /// `sum_{i+j=n} sum_{unshuffles s} e(s) mu_{j+1}(mu_i(x_s..), x_s..)`.
    pub fn relation_defect(&self, args: &[usize]) -> Element {
        let n = args.len();
        let degs: Vec<i64> = args.iter().map(|&a| self.space.degree(a)).collect();
        let mut acc = Element::zero();
        for i in 0..=n {
            let j = n - i;
            if !self.has_arity(i) || !self.has_arity(j + 1) {
                continue;
            }
            for s in unshuffles(i, j) {
                let inner_args: Vec<usize> = s[..i].iter().map(|&k| args[k]).collect();
                let inner = self.bracket_on_basis(&inner_args);
                if inner.is_zero() {
                    continue;
                }
                let sign = koszul_sign(&s, &degs);
                let mut outer_args = Vec::with_capacity(j + 1);
                outer_args.push(0);
                outer_args.extend(s[i..].iter().map(|&k| args[k]));
                for (b, c) in inner.iter() {
                    outer_args[0] = b;
                    let v = self.bracket_on_basis(&outer_args);
                    acc.add_scaled(&(c * int(sign)), &v);
                }
            }
        }
        acc
    }

    /// Checks the relations on every multiset of basis vectors of size up to `max_arity`.
    /// Graded symmetry of the relation makes multisets sufficient; multisets repeating an odd
    /// vector are skipped since the relation vanishes there. When the brackets respect the
    /// filtration, tuples whose weights sum to at least the nilpotency bound are skipped.
    pub fn check_relations(&self, max_arity: usize) -> RelationReport {
        let cutoff =
            self.check_filtration_compatibility().is_empty().then(|| self.space.nilpotency_bound());
        let mut report = RelationReport {
            checked_through: max_arity,
            weight_cutoff: cutoff,
            tuples_checked: 0,
            violations: Vec::new(),
        };
        let mut tuple = Vec::new();
        self.walk_multisets(max_arity, cutoff, 0, 0, &mut tuple, &mut |t| {
            report.tuples_checked += 1;
            let d = self.relation_defect(t);
            if !d.is_zero() {
                report.violations.push(RelationViolation { args: t.to_vec(), defect: d });
            }
        });
        report
    }

    /// Relation check up to [`Self::relation_arity_bound`], which covers every nontrivial relation.
    pub fn check_all_relations(&self) -> RelationReport {
        self.check_relations(self.relation_arity_bound())
    }

    fn walk_multisets(
        &self,
        max_len: usize,
        cutoff: Option<u32>,
        start: usize,
        weight: u32,
        tuple: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]),
    ) {
        visit(tuple);
        if tuple.len() == max_len {
            return;
        }
        for b in start..self.space.dim() {
            let w = weight + self.space.weight(b);
            if cutoff.is_some_and(|n| w >= n) {
                continue;
            }
            if tuple.last() == Some(&b) && self.space.degree(b) % 2 != 0 {
                continue;
            }
            tuple.push(b);
            self.walk_multisets(max_len, cutoff, b, w, tuple, visit);
            tuple.pop();
        }
    }

    fn require_degree_zero(&self, x: &Element) -> Result<(), AlgebraError> {
        match self.space.degree_of(x)? {
            Some(d) if d != 0 => Err(AlgebraError::WrongDegree { expected: 0, found: d }),
            _ => Ok(()),
        }
    }

    /// `M(x) = sum_k 1/k! mu_k(x, ..., x)` for `x` of degree 0.
    pub fn mc_defect(&self, x: &Element) -> Result<Element, AlgebraError> {
        self.require_degree_zero(x)?;
        let mut out = Element::zero();
        for (key, v) in &self.entries {
            if let Some(c) = monomial_weight(key, x) {
                out.add_scaled(&c, v);
            }
        }
        Ok(out)
    }

    /// The twisted algebra `mu^b_n(v..) = sum_k 1/k! mu_{k+n}(b, .., b, v..)` for `b` of degree 0.
    pub fn twist(&self, beta: &Element) -> Result<CurvedAlgebra, AlgebraError> {
        self.require_degree_zero(beta)?;
        let mut out: BTreeMap<Vec<usize>, Element> = BTreeMap::new();
        for (key, v) in &self.entries {
            // run-length groups of the key
            let mut groups: Vec<(usize, usize)> = Vec::new();
            for &k in key {
                match groups.last_mut() {
                    Some((g, m)) if *g == k => *m += 1,
                    _ => groups.push((k, 1)),
                }
            }
            let mut takes = vec![0usize; groups.len()];
            loop {
                let mut coeff = Scalar::one();
                let mut rest = Vec::with_capacity(key.len());
                for (g, &(idx, m)) in groups.iter().enumerate() {
                    let t = takes[g];
                    if t > 0 {
                        coeff *= power_over_factorial(&beta.get(idx), t);
                    }
                    rest.extend(std::iter::repeat(idx).take(m - t));
                }
                if !coeff.is_zero() {
                    out.entry(rest).or_default().add_scaled(&coeff, v);
                }
                // odometer over how many copies of each group are fed by beta
                let mut g = 0;
                loop {
                    if g == groups.len() {
                        break;
                    }
                    let (idx, m) = groups[g];
                    if takes[g] < m && beta.coeff(idx).is_some() {
                        takes[g] += 1;
                        break;
                    }
                    takes[g] = 0;
                    g += 1;
                }
                if g == groups.len() {
                    break;
                }
            }
        }
        Ok(CurvedAlgebra::from_sorted_entries(self.space.clone(), out))
    }

    /// Total number of distinct argument tuples across the stored entries, grouped by arity.
    pub fn arity_histogram(&self) -> HashMap<usize, usize> {
        let mut h = HashMap::new();
        for k in self.entries.keys() {
            *h.entry(k.len()).or_insert(0) += 1;
        }
        h
    }
}

/// `prod x_k / prod m_k!` over the multiset `key`, or `None` if `key` leaves the support of `x`.
fn monomial_weight(key: &[usize], x: &Element) -> Option<Scalar> {
    let mut c = Scalar::one();
    let mut k = 0;
    while k < key.len() {
        let idx = key[k];
        let mut m = 0;
        while k < key.len() && key[k] == idx {
            m += 1;
            k += 1;
        }
        let xi = x.coeff(idx)?;
        c *= power_over_factorial(xi, m);
    }
    Some(c)
}

fn power_over_factorial(x: &Scalar, t: usize) -> Scalar {
    let mut c = Scalar::one();
    for i in 1..=t {
        c = c * x / int(i as i64);
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graded::frac;

    #[test]
    fn fixture_relations_hold() {
        for alg in [fixtures::a1(), fixtures::a2(), fixtures::a3()] {
            assert!(alg.check_filtration_compatibility().is_empty());
            let rep = alg.check_all_relations();
            assert!(rep.is_ok(), "{:?}", rep.violations);
        }
    }

    #[test]
    fn curvature_without_differential_breaks_nothing_but_bad_mu1_does() {
        // mu_1^2 != 0 on a flat algebra
        let s = fixtures::space(&[("x", 0, 1), ("y", 1, 2), ("z", 2, 3)]);
        let mut b = AlgebraBuilder::new(s);
        b.bracket(&[0], Element::basis(1)).unwrap();
        b.bracket(&[1], Element::basis(2)).unwrap();
        let alg = b.build();
        let rep = alg.check_relations(1);
        assert_eq!(rep.violations.len(), 1);
        assert_eq!(rep.violations[0].args, vec![0]);
        assert_eq!(rep.violations[0].defect, Element::basis(2));
    }

    #[test]
    fn known_mc_defects() {
        let a1 = fixtures::a1();
        let e0 = Element::basis(0);
        assert!(a1.mc_defect(&e0.negated()).unwrap().is_zero());
        assert_eq!(a1.mc_defect(&Element::zero()).unwrap(), Element::basis(1));
        let a2 = fixtures::a2();
        let sol = Element::from_terms([(0, int(-1)), (1, int(-1))]);
        assert!(a2.mc_defect(&sol).unwrap().is_zero());
        // M(t a) = (1 + t + t^2) c in A3
        let a3 = fixtures::a3();
        let t = frac(1, 2);
        let m = a3.mc_defect(&Element::term(0, t.clone())).unwrap();
        assert_eq!(m, Element::term(1, int(1) + &t + &t * &t));
    }

    #[test]
    fn twist_examples() {
        let a2 = fixtures::a2();
        let tw = a2.twist(&Element::term(0, int(-1))).unwrap();
        assert_eq!(tw.curvature(), Element::basis(3));
        assert_eq!(tw.curvature_filtration(), FiltrationWeight::Finite(4));
        // mu_1^{-b}(b) = mu_1(b) - mu_2(b, b) = c - 2d
        assert_eq!(tw.mu1(&Element::basis(0)), Element::from_terms([(2, int(1)), (3, int(-2))]));
        assert!(tw.check_all_relations().is_ok());
        assert_eq!(a2.twist(&Element::zero()).unwrap(), a2);
        assert!(a2.twist(&Element::basis(2)).is_err());
    }

    #[test]
    fn builder_rejects_bad_entries() {
        let s = fixtures::space(&[("x", 0, 1), ("y", 1, 2)]);
        let mut b = AlgebraBuilder::new(s.clone());
        assert!(matches!(b.bracket(&[0], Element::basis(0)), Err(AlgebraError::DegreeMismatch { .. })));
        assert!(matches!(b.bracket(&[1, 1], Element::basis(0)), Err(AlgebraError::RepeatedOddArgument(_))));
        assert!(b.bracket(&[0, 7], Element::zero()).is_err());
        // odd arguments swap with a sign
        let s = fixtures::space(&[("u", 1, 1), ("v", 1, 1), ("w", 3, 3)]);
        let mut b = AlgebraBuilder::new(s);
        b.bracket(&[1, 0], Element::basis(2)).unwrap();
        let alg = b.build();
        assert_eq!(alg.entry(&[0, 1]), Some(&Element::term(2, int(-1))));
        assert_eq!(alg.bracket_on_basis(&[1, 0]), Element::basis(2));
    }

    #[test]
    fn filtration_violation_detected() {
        let s = fixtures::space(&[("x", 0, 2), ("y", 1, 1)]);
        let mut b = AlgebraBuilder::new(s);
        b.bracket(&[0], Element::basis(1)).unwrap();
        let v = b.build().check_filtration_compatibility();
        assert_eq!(v, vec![FiltrationViolation { args: vec![0], required: 2, found: FiltrationWeight::Finite(1) }]);
    }
}
