//! Power-series oracle: the MC map over graded rings `K[e_1..e_n]/(e_i^2)` and the two
//! master-equation forms, used to cross-check the componentwise relation checker.
//!
//! Elements of `g (x) R` are sums of `b (x) e^S` with the ring on the right. Bracket values
//! are looked up directly from the stored entries with an independent sorting sign, so this
//! module does not share the Koszul code path with [`crate::linfty`].

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::graded::{int, Element, Scalar, SpaceError};
use crate::linfty::CurvedAlgebra;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error("extended element must have total degree 0, found a term of degree {0}")]
    NotDegreeZero(i64),
    #[error("at most 63 ring generators are supported, asked for {0}")]
    TooManyGenerators(usize),
}

/// `K[e_1..e_n]/(e_i^2)` with graded-commuting generators of the given degrees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpsilonRing {
    degrees: Vec<i64>,
}

impl EpsilonRing {
    pub fn new(degrees: Vec<i64>) -> Result<Self, OracleError> {
        if degrees.len() > 63 {
            return Err(OracleError::TooManyGenerators(degrees.len()));
        }
        Ok(EpsilonRing { degrees })
    }

    pub fn generators(&self) -> usize {
        self.degrees.len()
    }

    /// The ring with one more generator appended (the tensor product with `K[e]/e^2`).
    pub fn extended(&self, degree: i64) -> Result<Self, OracleError> {
        let mut d = self.degrees.clone();
        d.push(degree);
        EpsilonRing::new(d)
    }

    pub fn monomial_degree(&self, mask: u64) -> i64 {
        (0..self.degrees.len()).filter(|&g| mask >> g & 1 == 1).map(|g| self.degrees[g]).sum()
    }

    /// `e^a * e^b = sign * e^{a|b}`, or `None` when a generator repeats.
    pub fn mul(&self, a: u64, b: u64) -> Option<(u64, i64)> {
        if a & b != 0 {
            return None;
        }
        let mut odd = 0i64;
        for g in 0..self.degrees.len() {
            if b >> g & 1 == 1 {
                // generators of `a` with larger index that `g` must pass
                for h in (g + 1)..self.degrees.len() {
                    if a >> h & 1 == 1 {
                        odd += self.degrees[g] * self.degrees[h];
                    }
                }
            }
        }
        Some((a | b, if odd.rem_euclid(2) == 0 { 1 } else { -1 }))
    }

    pub fn full_mask(&self) -> u64 {
        (1u64 << self.degrees.len()) - 1
    }
}

/// A finite sum `sum c * (b (x) e^mask)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExtendedElement {
    terms: BTreeMap<(u64, usize), Scalar>,
}

impl ExtendedElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn add_term(&mut self, mask: u64, basis: usize, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry((mask, basis)).or_insert_with(Scalar::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&(mask, basis));
        }
    }

    /// `x (x) e^mask`.
    pub fn add_tensor(&mut self, x: &Element, mask: u64, c: &Scalar) {
        for (b, a) in x.iter() {
            self.add_term(mask, b, a * c);
        }
    }

    pub fn add_scaled(&mut self, other: &ExtendedElement, c: &Scalar) {
        for (&(m, b), a) in &other.terms {
            self.add_term(m, b, a * c);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, usize, &Scalar)> {
        self.terms.iter().map(|(&(m, b), c)| (m, b, c))
    }

    /// The algebra coefficient of the monomial `e^mask`.
    pub fn coefficient(&self, mask: u64) -> Element {
        Element::from_terms(self.terms.iter().filter(|((m, _), _)| *m == mask).map(|((_, b), c)| (*b, c.clone())))
    }

    /// Multiplies every monomial on the right by `e^extra`.
    pub fn times_monomial(&self, ring: &EpsilonRing, extra: u64) -> ExtendedElement {
        let mut out = ExtendedElement::zero();
        for (&(m, b), c) in &self.terms {
            if let Some((mm, s)) = ring.mul(m, extra) {
                out.add_term(mm, b, c * int(s));
            }
        }
        out
    }
}

/// Stored bracket on basis vectors in the given order, with the sorting sign counted by
/// odd-odd inversions.
fn lookup(alg: &CurvedAlgebra, args: &[usize]) -> Element {
    let space = alg.space();
    let mut flips = 0usize;
    for a in 0..args.len() {
        for b in a + 1..args.len() {
            let odd = space.degree(args[a]) % 2 != 0 && space.degree(args[b]) % 2 != 0;
            if args[a] == args[b] && odd {
                return Element::zero();
            }
            if args[a] > args[b] && odd {
                flips += 1;
            }
        }
    }
    let mut key = args.to_vec();
    key.sort_unstable();
    match alg.entry(&key) {
        Some(v) if flips % 2 == 0 => v.clone(),
        Some(v) => v.negated(),
        None => Element::zero(),
    }
}

#[derive(Clone, Debug)]
struct Term {
    basis: usize,
    mask: u64,
    coeff: Scalar,
}

fn split(x: &ExtendedElement) -> Vec<Term> {
    x.terms().map(|(mask, basis, c)| Term { basis, mask, coeff: c.clone() }).collect()
}

/// `mu_n(b_1 (x) e^{m_1}, ..., b_n (x) e^{m_n})`, accumulated into `out` with factor `scale`.
fn bracket_terms(alg: &CurvedAlgebra, ring: &EpsilonRing, terms: &[&Term], scale: &Scalar, out: &mut ExtendedElement) {
    let space = alg.space();
    let mut odd = 0i64;
    for i in 0..terms.len() {
        for j in i + 1..terms.len() {
            odd += ring.monomial_degree(terms[i].mask) * space.degree(terms[j].basis);
        }
    }
    let mut sign = if odd.rem_euclid(2) == 0 { 1 } else { -1 };
    let mut mask = 0u64;
    let mut coeff = scale.clone();
    for t in terms {
        let Some((m, s)) = ring.mul(mask, t.mask) else { return };
        mask = m;
        sign *= s;
        coeff *= &t.coeff;
    }
    let args: Vec<usize> = terms.iter().map(|t| t.basis).collect();
    let val = lookup(alg, &args);
    out.add_tensor(&val, mask, &(coeff * int(sign)));
}

fn arities(alg: &CurvedAlgebra) -> Vec<usize> {
    (0..=alg.max_arity()).filter(|&n| alg.has_arity(n)).collect()
}

/// Visits non-decreasing index tuples of length `n` over `terms` whose masks are disjoint,
/// passing `1 / prod(multiplicity!)`.
fn multisets(terms: &[Term], n: usize, visit: &mut dyn FnMut(&[&Term], &Scalar)) {
    fn rec<'a>(
        terms: &'a [Term],
        n: usize,
        start: usize,
        used: u64,
        picked: &mut Vec<&'a Term>,
        run: usize,
        factor: Scalar,
        visit: &mut dyn FnMut(&[&Term], &Scalar),
    ) {
        if picked.len() == n {
            visit(picked, &factor);
            return;
        }
        for k in start..terms.len() {
            let t = &terms[k];
            if used & t.mask != 0 {
                continue;
            }
            let same = picked.last().is_some_and(|p| std::ptr::eq(*p, t));
            let r = if same { run + 1 } else { 1 };
            let f = &factor / int(r as i64);
            picked.push(t);
            rec(terms, n, k, used | t.mask, picked, r, f, visit);
            picked.pop();
        }
    }
    let mut picked = Vec::with_capacity(n);
    rec(terms, n, 0, 0, &mut picked, 0, Scalar::one(), visit);
}

fn check_total_degree_zero(alg: &CurvedAlgebra, ring: &EpsilonRing, x: &ExtendedElement) -> Result<(), OracleError> {
    for (m, b, _) in x.terms() {
        alg.space().check_element(&Element::basis(b))?;
        let d = alg.space().degree(b) + ring.monomial_degree(m);
        if d != 0 {
            return Err(OracleError::NotDegreeZero(d));
        }
    }
    Ok(())
}

/// `M^R(x) = sum_n 1/n! mu_n(x, ..., x)` for `x` of total degree 0.
pub fn power_series_mc(alg: &CurvedAlgebra, ring: &EpsilonRing, x: &ExtendedElement) -> Result<ExtendedElement, OracleError> {
    check_total_degree_zero(alg, ring, x)?;
    let terms = split(x);
    let mut out = ExtendedElement::zero();
    for n in arities(alg) {
        multisets(&terms, n, &mut |picked, f| bracket_terms(alg, ring, picked, f, &mut out));
    }
    Ok(out)
}

/// `DM^R(x)[v] = sum_{n>=1} n/n! mu_n(v, x, ..., x)`.
pub fn dm(alg: &CurvedAlgebra, ring: &EpsilonRing, x: &ExtendedElement, v: &ExtendedElement) -> Result<ExtendedElement, OracleError> {
    check_total_degree_zero(alg, ring, x)?;
    let terms = split(x);
    let vterms = split(v);
    let mut out = ExtendedElement::zero();
    for n in arities(alg).into_iter().filter(|&n| n >= 1) {
        for vt in &vterms {
            multisets(&terms, n - 1, &mut |picked, f| {
                let mut all = Vec::with_capacity(n);
                all.push(vt);
                all.extend_from_slice(picked);
                bracket_terms(alg, ring, &all, f, &mut out);
            });
        }
    }
    Ok(out)
}

/// First form: `DM^R(x)[M^R(x)]`, which vanishes for every `x` exactly when the relations hold.
pub fn master_form_one(alg: &CurvedAlgebra, ring: &EpsilonRing, x: &ExtendedElement) -> Result<ExtendedElement, OracleError> {
    let m = power_series_mc(alg, ring, x)?;
    dm(alg, ring, x, &m)
}

/// Second form: `M^{R(x)R'}(x (x) 1 + M^R(x) (x) e) - M^R(x) (x) 1` with `R' = K[e]/e^2`, `deg e = -1`.
pub fn master_form_two(alg: &CurvedAlgebra, ring: &EpsilonRing, x: &ExtendedElement) -> Result<ExtendedElement, OracleError> {
    let m = power_series_mc(alg, ring, x)?;
    let big = ring.extended(-1)?;
    let e = 1u64 << ring.generators();
    let mut arg = x.clone();
    arg.add_scaled(&m.times_monomial(&big, e), &Scalar::one());
    let mut out = power_series_mc(alg, &big, &arg)?;
    out.add_scaled(&m, &-Scalar::one());
    Ok(out)
}

/// `(-1)^{sum_{i<j} d_i d_j}`: the sign picked up when moving `e_i` (degree `-d_i`) past later arguments.
fn polar_sign(degrees: &[i64]) -> i64 {
    let mut odd = 0i64;
    for i in 0..degrees.len() {
        for j in i + 1..degrees.len() {
            odd += degrees[i] * degrees[j];
        }
    }
    if odd.rem_euclid(2) == 0 { 1 } else { -1 }
}

/// Sample point `x = sum_i x_i (x) e_i` with one generator of degree `-deg x_i` per slot.
pub fn polarization_sample(alg: &CurvedAlgebra, args: &[&Element]) -> Result<(EpsilonRing, ExtendedElement, Vec<i64>), OracleError> {
    let mut degrees = Vec::with_capacity(args.len());
    for a in args {
        degrees.push(alg.space().degree_of(a)?.unwrap_or(0));
    }
    let ring = EpsilonRing::new(degrees.iter().map(|d| -d).collect())?;
    let mut x = ExtendedElement::zero();
    for (i, a) in args.iter().enumerate() {
        x.add_tensor(a, 1u64 << i, &Scalar::one());
    }
    Ok((ring, x, degrees))
}

/// `mu_n(x_1..x_n)` read off from the `e_1...e_n` coefficient of `M^R(sum x_i (x) e_i)`.
/// Arguments must be homogeneous.
pub fn polarize(alg: &CurvedAlgebra, args: &[&Element]) -> Result<Element, OracleError> {
    let (ring, x, degrees) = polarization_sample(alg, args)?;
    let m = power_series_mc(alg, &ring, &x)?;
    Ok(m.coefficient(ring.full_mask()).scaled(&int(polar_sign(&degrees))))
}

/// The relation defect on a basis tuple read off from the top coefficient of the first master form.
pub fn polarized_relation(alg: &CurvedAlgebra, args: &[usize]) -> Result<Element, OracleError> {
    let elems: Vec<Element> = args.iter().map(|&a| Element::basis(a)).collect();
    let refs: Vec<&Element> = elems.iter().collect();
    let (ring, x, degrees) = polarization_sample(alg, &refs)?;
    let f = master_form_one(alg, &ring, &x)?;
    Ok(f.coefficient(ring.full_mask()).scaled(&int(polar_sign(&degrees))))
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MasterReport {
    pub samples: usize,
    pub form_one_failures: Vec<Vec<usize>>,
    pub form_two_failures: Vec<Vec<usize>>,
}

impl MasterReport {
    pub fn form_one_ok(&self) -> bool {
        self.form_one_failures.is_empty()
    }

    pub fn form_two_ok(&self) -> bool {
        self.form_two_failures.is_empty()
    }
}

/// Evaluates both master forms on the polarization-complete sample set: one sample per
/// multiset of basis vectors of size at most `max_arity` (including the empty one).
pub fn check_master_equation(alg: &CurvedAlgebra, max_arity: usize) -> Result<MasterReport, OracleError> {
    let mut report = MasterReport::default();
    let dim = alg.space().dim();
    let mut tuple: Vec<usize> = Vec::new();
    let mut stack: Vec<Vec<usize>> = vec![Vec::new()];
    while let Some(t) = stack.pop() {
        tuple.clone_from(&t);
        let elems: Vec<Element> = tuple.iter().map(|&a| Element::basis(a)).collect();
        let refs: Vec<&Element> = elems.iter().collect();
        let (ring, x, _) = polarization_sample(alg, &refs)?;
        report.samples += 1;
        if !master_form_one(alg, &ring, &x)?.is_zero() {
            report.form_one_failures.push(tuple.clone());
        }
        if !master_form_two(alg, &ring, &x)?.is_zero() {
            report.form_two_failures.push(tuple.clone());
        }
        if t.len() < max_arity {
            let start = t.last().copied().unwrap_or(0);
            for b in (start..dim).rev() {
                let mut next = t.clone();
                next.push(b);
                stack.push(next);
            }
        }
    }
    report.form_one_failures.sort();
    report.form_two_failures.sort();
    Ok(report)
}
