//! Truncated A-infinity algebras in the shifted convention and their bar constructions.
//!
//! Operations `m_n` have degree +1. The bar coalgebra keeps words of length `1..=cap+1`;
//! a word of length `k+1` has bar weight `k`.

use std::collections::{BTreeMap, HashMap};

use num_traits::One;
use thiserror::Error;

use crate::graded::{int, BasisVector, Element, GradedSpace, Scalar, SpaceError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AInftyError {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error("operation on ({word}) must have degree {expected}, found {found}")]
    DegreeMismatch { word: String, expected: i64, found: i64 },
    #[error("operation arity {arity} is outside 1..={max} for weight cap {cap}")]
    ArityOutOfRange { arity: usize, max: usize, cap: usize },
    #[error("Stasheff relation fails on ({word}) at bar weight {weight}: {defect}")]
    StasheffViolation { word: String, weight: usize, defect: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AInftyAlgebra {
    space: GradedSpace,
    ops: BTreeMap<Vec<usize>, Element>,
    weight_cap: usize,
}

pub struct AInftyBuilder {
    space: GradedSpace,
    ops: BTreeMap<Vec<usize>, Element>,
    weight_cap: usize,
}

impl AInftyBuilder {
    pub fn new(space: GradedSpace, weight_cap: usize) -> Self {
        AInftyBuilder { space, ops: BTreeMap::new(), weight_cap }
    }

    /// Adds `value` to `m_n(word)`.
    pub fn op(&mut self, word: &[usize], value: Element) -> Result<&mut Self, AInftyError> {
        let max = self.weight_cap + 1;
        if word.is_empty() || word.len() > max {
            return Err(AInftyError::ArityOutOfRange { arity: word.len(), max, cap: self.weight_cap });
        }
        for &a in word {
            if a >= self.space.dim() {
                return Err(SpaceError::MixedSpaces(a).into());
            }
        }
        self.space.check_element(&value)?;
        let expected = word.iter().map(|&a| self.space.degree(a)).sum::<i64>() + 1;
        if let Some(d) = self.space.degree_of(&value)? {
            if d != expected {
                return Err(AInftyError::DegreeMismatch { word: label(&self.space, word), expected, found: d });
            }
        }
        self.ops.entry(word.to_vec()).or_default().add_scaled(&Scalar::one(), &value);
        Ok(self)
    }

    /// Validates the Stasheff relations on all words within the truncation.
    pub fn build(self) -> Result<AInftyAlgebra, AInftyError> {
        let alg = self.build_unchecked();
        alg.check_stasheff()?;
        Ok(alg)
    }

    pub fn build_unchecked(self) -> AInftyAlgebra {
        let mut ops = self.ops;
        ops.retain(|_, v| !v.is_zero());
        AInftyAlgebra { space: self.space, ops, weight_cap: self.weight_cap }
    }
}

pub(crate) fn label(space: &GradedSpace, word: &[usize]) -> String {
    word.iter().map(|&a| space.id(a)).collect::<Vec<_>>().join(",")
}

impl AInftyAlgebra {
    pub fn space(&self) -> &GradedSpace {
        &self.space
    }

    pub fn weight_cap(&self) -> usize {
        self.weight_cap
    }

    pub fn ops(&self) -> impl Iterator<Item = (&Vec<usize>, &Element)> {
        self.ops.iter()
    }

    /// Operations ordered by arity, then word.
    pub fn sorted_ops(&self) -> Vec<(&Vec<usize>, &Element)> {
        let mut v: Vec<_> = self.ops.iter().collect();
        v.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(b.0)));
        v
    }

    pub fn op_on(&self, word: &[usize]) -> Option<&Element> {
        self.ops.get(word)
    }

    pub fn max_arity(&self) -> usize {
        self.ops.keys().map(Vec::len).max().unwrap_or(0)
    }

    /// Only `m_1` and `m_2` are nonzero.
    pub fn is_strict(&self) -> bool {
        self.max_arity() <= 2
    }

    pub fn m1(&self, x: &Element) -> Element {
        let mut out = Element::zero();
        for (i, c) in x.iter() {
            if let Some(v) = self.ops.get(&vec![i]) {
                out.add_scaled(c, v);
            }
        }
        out
    }

    /// Same operations under a different truncation.
    pub fn with_weight_cap(&self, weight_cap: usize) -> AInftyAlgebra {
        let mut ops = self.ops.clone();
        ops.retain(|w, _| w.len() <= weight_cap + 1);
        AInftyAlgebra { space: self.space.clone(), ops, weight_cap }
    }

    pub fn check_stasheff(&self) -> Result<(), AInftyError> {
        let bar = BarCoalgebra::new(&self.space, self.weight_cap);
        let d = bar_differential(self, &bar).total();
        for v in 0..bar.len() {
            let mut dd = Element::zero();
            for (w, c) in d[v].iter() {
                dd.add_scaled(c, &d[w]);
            }
            if !dd.is_zero() {
                let word = bar.word(v);
                return Err(AInftyError::StasheffViolation {
                    word: label(&self.space, word),
                    weight: word.len() - 1,
                    defect: bar.show(&self.space, &dd),
                });
            }
        }
        Ok(())
    }
}

/// Words of length `1..=cap+1` over a basis, ordered by length then lexicographically.
#[derive(Clone, Debug)]
pub struct BarCoalgebra {
    words: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
    degrees: Vec<i64>,
}

impl BarCoalgebra {
    pub fn new(letters: &GradedSpace, weight_cap: usize) -> Self {
        let n = letters.dim();
        let mut words: Vec<Vec<usize>> = Vec::new();
        let mut layer: Vec<Vec<usize>> = vec![Vec::new()];
        for _ in 0..=weight_cap {
            let mut next = Vec::with_capacity(layer.len() * n);
            for w in &layer {
                for a in 0..n {
                    let mut x = w.clone();
                    x.push(a);
                    next.push(x);
                }
            }
            words.extend(next.iter().cloned());
            layer = next;
        }
        let index = words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        let degrees = words.iter().map(|w| w.iter().map(|&a| letters.degree(a)).sum()).collect();
        BarCoalgebra { words, index, degrees }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn word(&self, i: usize) -> &[usize] {
        &self.words[i]
    }

    pub fn index_of(&self, word: &[usize]) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.degrees[i]
    }

    pub fn bar_weight(&self, i: usize) -> usize {
        self.words[i].len() - 1
    }

    /// The bar coalgebra as a filtered graded space (filtration weight = word length).
    pub fn as_space(&self, letters: &GradedSpace) -> GradedSpace {
        GradedSpace::new(
            (0..self.len())
                .map(|i| BasisVector::new(word_id(letters, self.word(i)), self.degree(i), self.words[i].len() as u32))
                .collect(),
        )
        .expect("words are distinct")
    }

    pub fn show(&self, letters: &GradedSpace, x: &Element) -> String {
        self.as_space(letters).show(x)
    }

    /// Tensor product of elements of the letter space, as an element over words.
    /// Terms that would exceed the truncation are dropped.
    pub fn tensor(&self, parts: &[&Element]) -> Element {
        let mut out = Element::zero();
        let mut word = Vec::with_capacity(parts.len());
        self.tensor_rec(parts, &mut word, &Scalar::one(), &mut out);
        out
    }

    fn tensor_rec(&self, parts: &[&Element], word: &mut Vec<usize>, c: &Scalar, out: &mut Element) {
        if word.len() == parts.len() {
            if let Some(i) = self.index_of(word) {
                out.add_term(i, c.clone());
            }
            return;
        }
        for (a, x) in parts[word.len()].iter() {
            word.push(a);
            self.tensor_rec(parts, word, &(c * x), out);
            word.pop();
        }
    }
}

pub fn word_id(letters: &GradedSpace, word: &[usize]) -> String {
    format!("[{}]", label(letters, word))
}

/// The bar differential split into its pieces. For the associative operad the cooperadic
/// part `d1` vanishes identically; it is kept so the split matches other operads.
#[derive(Clone, Debug)]
pub struct BarDifferential {
    pub internal: Vec<Element>,
    pub d1: Vec<Element>,
    pub d2: Vec<Element>,
}

impl BarDifferential {
    pub fn total(&self) -> Vec<Element> {
        (0..self.internal.len())
            .map(|i| {
                let mut t = &self.internal[i] + &self.d1[i];
                t += &self.d2[i];
                t
            })
            .collect()
    }
}

/// `D(a_1..a_L) = sum (-1)^{|a_1|+..+|a_i|} a_1..a_i m_j(a_{i+1}..a_{i+j}) a_{i+j+1}..a_L`.
/// The `j = 1` terms form the internal part and `j >= 2` the block-collapsing part.
pub fn bar_differential(alg: &AInftyAlgebra, bar: &BarCoalgebra) -> BarDifferential {
    let space = &alg.space;
    let n = bar.len();
    let mut internal = vec![Element::zero(); n];
    let mut d2 = vec![Element::zero(); n];
    for v in 0..n {
        let word = bar.word(v);
        let l = word.len();
        let mut prefix_deg = 0i64;
        for i in 0..l {
            for j in 1..=(l - i) {
                let Some(val) = alg.ops.get(&word[i..i + j]) else { continue };
                let sign = if prefix_deg % 2 == 0 { 1 } else { -1 };
                let prefix: Vec<Element> = word[..i].iter().map(|&a| Element::basis(a)).collect();
                let suffix: Vec<Element> = word[i + j..].iter().map(|&a| Element::basis(a)).collect();
                let mut parts: Vec<&Element> = prefix.iter().collect();
                parts.push(val);
                parts.extend(suffix.iter());
                let t = bar.tensor(&parts);
                let target = if j == 1 { &mut internal[v] } else { &mut d2[v] };
                target.add_scaled(&int(sign), &t);
            }
            prefix_deg += space.degree(word[i]);
        }
    }
    BarDifferential { internal, d1: vec![Element::zero(); n], d2 }
}
