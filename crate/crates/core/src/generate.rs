//! Seeded random instances: relation-valid layered algebras, raw (usually invalid) algebras,
//! flat filtered complexes, and hypothesis-satisfying solver inputs.
//!
//! Layered algebras split the basis into `U`, `W`, `Z`. Brackets of `U`-vectors land in
//! `W + Z`, brackets with exactly one `W` argument (the rest in `U`) land in `Z`, and every
//! other bracket vanishes. The relations are then linear in the second family, so a random
//! choice is repaired by projecting onto their solution space.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graded::{frac, int, BasisVector, Element, GradedSpace, Scalar};
use crate::linalg::kernel;
use crate::linfty::{AlgebraBuilder, CurvedAlgebra};

pub fn small_scalar<R: Rng>(rng: &mut R) -> Scalar {
    let p = rng.gen_range(-3..=3);
    if rng.gen_bool(0.75) {
        int(p)
    } else {
        frac(p, rng.gen_range(2..=3))
    }
}

pub fn nonzero_scalar<R: Rng>(rng: &mut R) -> Scalar {
    loop {
        let c = small_scalar(rng);
        if c != int(0) {
            return c;
        }
    }
}

/// Sorted multisets over `pool` of each size in `sizes`, skipping repeated odd-degree entries.
fn multisets(pool: &[usize], sizes: std::ops::RangeInclusive<usize>, space: &GradedSpace) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    fn rec(pool: &[usize], start: usize, len: usize, cur: &mut Vec<usize>, space: &GradedSpace, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for k in start..pool.len() {
            let b = pool[k];
            if cur.last() == Some(&b) && space.degree(b) % 2 != 0 {
                continue;
            }
            cur.push(b);
            rec(pool, k, len, cur, space, out);
            cur.pop();
        }
    }
    for n in sizes {
        rec(pool, 0, n, &mut Vec::new(), space, &mut out);
    }
    out
}

fn weight_sum(space: &GradedSpace, key: &[usize]) -> u32 {
    key.iter().map(|&k| space.weight(k)).sum::<u32>().max(1)
}

/// Random value for `mu(key)` supported on `targets` of the right degree and enough weight.
fn random_value<R: Rng>(rng: &mut R, space: &GradedSpace, key: &[usize], targets: &[usize], density: f64) -> Element {
    let deg = key.iter().map(|&k| space.degree(k)).sum::<i64>() + 1;
    let w = weight_sum(space, key);
    let mut v = Element::zero();
    for &t in targets {
        if space.degree(t) == deg && space.weight(t) >= w && rng.gen_bool(density) {
            v.add_term(t, nonzero_scalar(rng));
        }
    }
    v
}

#[derive(Clone, Debug)]
pub struct LayeredParams {
    pub u: usize,
    pub w: usize,
    pub z: usize,
    pub max_arity: usize,
    pub min_degree: i64,
    pub max_degree: i64,
    pub max_weight: u32,
    pub curved: bool,
    pub density: f64,
}

impl Default for LayeredParams {
    fn default() -> Self {
        LayeredParams { u: 2, w: 1, z: 1, max_arity: 3, min_degree: -1, max_degree: 2, max_weight: 4, curved: true, density: 0.6 }
    }
}

/// Layer assignment of a layered algebra's basis.
#[derive(Clone, Debug)]
pub struct Layers {
    pub u: Vec<usize>,
    pub w: Vec<usize>,
    pub z: Vec<usize>,
}

/// Builds a layered algebra from a space and layers, with random first-family brackets and
/// repaired second-family brackets.
pub fn layered_on<R: Rng>(rng: &mut R, space: GradedSpace, layers: &Layers, max_arity: usize, curved: bool, density: f64) -> CurvedAlgebra {
    let mut wz = layers.w.clone();
    wz.extend(&layers.z);
    let first_min = if curved { 0 } else { 1 };
    let mut base = AlgebraBuilder::new(space.clone());
    for key in multisets(&layers.u, first_min..=max_arity, &space) {
        let v = random_value(rng, &space, &key, &wz, density);
        base.bracket(&key, v).expect("degree-matched value");
    }
    let first: Vec<(Vec<usize>, Element)> =
        base.build().entries().into_iter().map(|(k, v)| (k.clone(), v.clone())).collect();
    repair_second_family(rng, &space, layers, &first, max_arity)
}

fn with_entry(alg: &CurvedAlgebra, key: &[usize], value: &Element) -> CurvedAlgebra {
    let mut b = AlgebraBuilder::new(alg.space().clone());
    for (k, v) in alg.entries() {
        b.bracket(k, v.clone()).unwrap();
    }
    b.bracket(key, value.clone()).unwrap();
    b.build()
}

/// Random layered algebra. Degrees and weights of `W` and `Z` are read off random bracket
/// shapes so that compositions actually occur. Always satisfies the relations.
pub fn layered_algebra<R: Rng>(rng: &mut R, p: &LayeredParams) -> CurvedAlgebra {
    let mut basis: Vec<BasisVector> = Vec::new();
    let mut layers = Layers { u: vec![], w: vec![], z: vec![] };
    for k in 0..p.u {
        let d = rng.gen_range(p.min_degree..=p.max_degree).clamp(-1, 1);
        let d = if rng.gen_bool(0.5) { 0 } else { d };
        basis.push(BasisVector::new(format!("u{k}"), d, rng.gen_range(1..=2)));
        layers.u.push(basis.len() - 1);
    }
    // a random shape over U: returns (degree, weight) of a bracket on it
    let shape = |rng: &mut R, basis: &[BasisVector], u: &[usize], max_len: usize| {
        let len = rng.gen_range(0..=max_len);
        let mut d = 1i64;
        let mut w = 0u32;
        for _ in 0..len {
            let b = &basis[u[rng.gen_range(0..u.len())]];
            d += b.degree;
            w += b.weight;
        }
        (d, w)
    };
    for k in 0..p.w {
        let (d, w) = if layers.u.is_empty() { (1, 1) } else { shape(rng, &basis, &layers.u, p.max_arity) };
        let w = (w + rng.gen_range(0..=1)).clamp(1, p.max_weight);
        basis.push(BasisVector::new(format!("w{k}"), d, w));
        layers.w.push(basis.len() - 1);
    }
    for k in 0..p.z {
        let (d, w) = if !layers.w.is_empty() && rng.gen_bool(0.7) {
            let wb = basis[layers.w[rng.gen_range(0..layers.w.len())]].clone();
            let (d, w) = if layers.u.is_empty() { (1, 0) } else { shape(rng, &basis, &layers.u, p.max_arity - 1) };
            (d + wb.degree, w + wb.weight)
        } else if !layers.u.is_empty() {
            shape(rng, &basis, &layers.u, p.max_arity)
        } else {
            (1, 1)
        };
        let w = (w + rng.gen_range(0..=1)).clamp(1, p.max_weight + 1);
        basis.push(BasisVector::new(format!("z{k}"), d, w));
        layers.z.push(basis.len() - 1);
    }
    let space = GradedSpace::new(basis).unwrap();
    layered_on(rng, space, &layers, p.max_arity, p.curved, p.density)
}

/// Random degree-0 element supported on the given indices.
pub fn random_degree_zero<R: Rng>(rng: &mut R, space: &GradedSpace, min_weight: u32) -> Element {
    let mut x = Element::zero();
    for i in 0..space.dim() {
        if space.degree(i) == 0 && space.weight(i) >= min_weight && rng.gen_bool(0.7) {
            x.add_term(i, small_scalar(rng));
        }
    }
    x
}

/// Random weight-additive brackets with no attempt at satisfying the relations.
pub fn raw_algebra<R: Rng>(rng: &mut R, dim: usize, max_arity: usize, density: f64) -> CurvedAlgebra {
    let basis = (0..dim)
        .map(|k| BasisVector::new(format!("v{k}"), rng.gen_range(-1..=1), [1, 1, 2, 3, 4][rng.gen_range(0..5)]))
        .collect();
    let space = GradedSpace::new(basis).unwrap();
    let all: Vec<usize> = (0..dim).collect();
    let mut b = AlgebraBuilder::new(space.clone());
    for key in multisets(&all, 0..=max_arity, &space) {
        let v = random_value(rng, &space, &key, &all, density);
        b.bracket(&key, v).unwrap();
    }
    b.build()
}

/// Adds a random degree-compatible term to one randomly chosen bracket value
/// (keeping filtration compatibility). Usually breaks the relations of a valid algebra.
pub fn perturbed<R: Rng>(rng: &mut R, alg: &CurvedAlgebra) -> CurvedAlgebra {
    let space = alg.space();
    let all: Vec<usize> = (0..space.dim()).collect();
    let keys: Vec<Vec<usize>> = multisets(&all, 0..=alg.max_arity().max(1), space)
        .into_iter()
        .filter(|k| !random_value(rng, space, k, &all, 1.0).is_zero())
        .collect();
    let mut b = AlgebraBuilder::new(space.clone());
    for (k, v) in alg.entries() {
        b.bracket(k, v.clone()).unwrap();
    }
    if let Some(k) = keys.choose(rng) {
        let v = random_value(rng, space, k, &all, 0.5);
        b.bracket(k, v).unwrap();
    }
    b.build()
}

/// Flat algebra whose only bracket is a random filtered differential `mu_1` with `mu_1^2 = 0`,
/// built by conjugating a matching `b_i -> b_j` by a random unipotent filtered automorphism.
pub fn random_complex<R: Rng>(rng: &mut R, dim: usize) -> CurvedAlgebra {
    let basis: Vec<BasisVector> = (0..dim)
        .map(|k| BasisVector::new(format!("v{k}"), rng.gen_range(-1..=2), rng.gen_range(1..=4)))
        .collect();
    let space = GradedSpace::new(basis).unwrap();
    // pairing: sources and targets disjoint, target one degree up and no lighter
    let mut order: Vec<usize> = (0..dim).collect();
    order.shuffle(rng);
    let mut used = vec![false; dim];
    let mut d0 = vec![Element::zero(); dim];
    for &s in &order {
        if used[s] {
            continue;
        }
        let cands: Vec<usize> = (0..dim)
            .filter(|&t| !used[t] && t != s && space.degree(t) == space.degree(s) + 1 && space.weight(t) >= space.weight(s))
            .collect();
        if let Some(&t) = cands.choose(rng) {
            if rng.gen_bool(0.8) {
                used[s] = true;
                used[t] = true;
                d0[s] = Element::term(t, nonzero_scalar(rng));
            }
        }
    }
    // g = 1 + N, N strictly upper triangular in the index order, degree and filtration preserving
    let mut n = vec![Element::zero(); dim];
    for i in 0..dim {
        for j in i + 1..dim {
            if space.degree(j) == space.degree(i) && space.weight(j) >= space.weight(i) && rng.gen_bool(0.5) {
                n[i].add_term(j, small_scalar(rng));
            }
        }
    }
    let apply = |m: &[Element], x: &Element| {
        let mut out = Element::zero();
        for (i, c) in x.iter() {
            out.add_scaled(c, &m[i]);
        }
        out
    };
    let g = |x: &Element| &apply(&n, x) + x;
    let g_inv = |x: &Element| {
        // (1 + N)^{-1} = sum (-N)^k
        let mut out = x.clone();
        let mut term = x.clone();
        for _ in 0..dim {
            term = apply(&n, &term).negated();
            if term.is_zero() {
                break;
            }
            out += &term;
        }
        out
    };
    let mut b = AlgebraBuilder::new(space);
    for i in 0..dim {
        let v = g(&apply(&d0, &g_inv(&Element::basis(i))));
        b.bracket(&[i], v).unwrap();
    }
    b.build()
}

/// A layered algebra meeting the solver hypotheses for the given `r`: curvature in
/// `F_{2r+1}` and `E_{r+1}` vanishing in total degree 1. Degree-0 vectors `U` surject onto the
/// degree-1 targets through `mu_1` with weight shift at most `r`.
pub fn solver_instance<R: Rng>(rng: &mut R, r: u32, max_arity: usize) -> CurvedAlgebra {
    let n_targets = rng.gen_range(1..=3usize);
    let n_w = rng.gen_range(1..=n_targets);
    let extra_u = rng.gen_range(0..=1usize);
    let n_z2 = rng.gen_range(0..=2usize);
    let mut basis = Vec::new();
    let mut target_weights = Vec::new();
    for _ in 0..n_targets {
        target_weights.push(rng.gen_range(2 * r + 1..=2 * r + 4));
    }
    let mut layers = Layers { u: vec![], w: vec![], z: vec![] };
    for (k, &tw) in target_weights.iter().enumerate() {
        let uw = rng.gen_range(tw.saturating_sub(r).max(1)..=tw);
        basis.push(BasisVector::new(format!("u{k}"), 0, uw));
        layers.u.push(basis.len() - 1);
    }
    for k in 0..extra_u {
        basis.push(BasisVector::new(format!("u{}", n_targets + k), 0, rng.gen_range(1..=2 * r + 2)));
        layers.u.push(basis.len() - 1);
    }
    let mut targets = Vec::new();
    for (k, &tw) in target_weights.iter().enumerate() {
        let name = if k < n_w { format!("w{k}") } else { format!("z{k}") };
        basis.push(BasisVector::new(name, 1, tw));
        targets.push(basis.len() - 1);
        if k < n_w {
            layers.w.push(basis.len() - 1);
        } else {
            layers.z.push(basis.len() - 1);
        }
    }
    for k in 0..n_z2 {
        basis.push(BasisVector::new(format!("t{k}"), 2, rng.gen_range(2 * r + 2..=2 * r + 6)));
        layers.z.push(basis.len() - 1);
    }
    let space = GradedSpace::new(basis).unwrap();
    let random = layered_on(rng, space.clone(), &layers, max_arity, true, 0.5);
    // overwrite mu_1 on the paired U-vectors to make it filtered-surjective in degree 1,
    // and push the curvature into F_{2r+1}
    let mut b = AlgebraBuilder::new(space.clone());
    for (key, v) in random.entries() {
        match key.len() {
            0 => {
                let c = v.filtered(|i| space.weight(i) >= 2 * r + 1);
                b.curvature(c).unwrap();
            }
            1 if key[0] < n_targets => {
                let t = targets[key[0]];
                let mut val = Element::term(t, nonzero_scalar(rng));
                val.add_scaled(&Scalar::from_integer(1.into()), &v.filtered(|i| space.weight(i) > space.weight(t)));
                b.bracket(key, val).unwrap();
            }
            _ => {
                b.bracket(key, v.clone()).unwrap();
            }
        }
    }
    for (k, &t) in targets.iter().enumerate() {
        if b.space().degree(t) == 1 && random.entry(&[k]).is_none() {
            b.bracket(&[k], Element::term(t, nonzero_scalar(rng))).unwrap();
        }
    }
    let candidate = b.build();
    // the overwrite changes the first family, so redo the repair of the second family
    let first: Vec<(Vec<usize>, Element)> = candidate
        .entries()
        .into_iter()
        .filter(|(k, _)| k.iter().all(|i| layers.u.contains(i)))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    repair_second_family(rng, &space, &layers, &first, max_arity)
}

/// Keeps the given first-family brackets and re-draws the second family on its solution space.
pub fn repair_second_family<R: Rng>(
    rng: &mut R,
    space: &GradedSpace,
    layers: &Layers,
    first: &[(Vec<usize>, Element)],
    max_arity: usize,
) -> CurvedAlgebra {
    let mut base = AlgebraBuilder::new(space.clone());
    for (k, v) in first {
        base.bracket(k, v.clone()).unwrap();
    }
    let base = base.build();
    let mut unknowns: Vec<(Vec<usize>, usize)> = Vec::new();
    for &w in &layers.w {
        for rest in multisets(&layers.u, 0..=max_arity.saturating_sub(1), space) {
            let mut key = rest.clone();
            key.push(w);
            key.sort_unstable();
            let deg = key.iter().map(|&k| space.degree(k)).sum::<i64>() + 1;
            let wt = weight_sum(space, &key);
            for &z in &layers.z {
                if space.degree(z) == deg && space.weight(z) >= wt {
                    unknowns.push((key.clone(), z));
                }
            }
        }
    }
    let tuples = multisets(&layers.u, 0..=(2 * max_arity).saturating_sub(1), space);
    let columns: Vec<Element> = unknowns
        .iter()
        .map(|(key, z)| {
            let alg = with_entry(&base, key, &Element::basis(*z));
            let mut col = Element::zero();
            for (ti, t) in tuples.iter().enumerate() {
                for (b, c) in alg.relation_defect(t).iter() {
                    col.add_term(ti * space.dim() + b, c.clone());
                }
            }
            col
        })
        .collect();
    let mut b = AlgebraBuilder::new(space.clone());
    for (k, v) in base.entries() {
        b.bracket(k, v.clone()).unwrap();
    }
    for k in kernel(&columns) {
        if rng.gen_bool(0.6) {
            let c = nonzero_scalar(rng);
            for (j, x) in k.iter() {
                let (key, z) = &unknowns[j];
                b.bracket(key, Element::term(*z, &c * x)).unwrap();
            }
        }
    }
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn layered_algebras_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let alg = layered_algebra(&mut rng, &LayeredParams::default());
            assert!(alg.check_filtration_compatibility().is_empty());
            assert!(alg.check_all_relations().is_ok());
        }
    }

    #[test]
    fn random_complexes_square_to_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let alg = random_complex(&mut rng, 6);
            assert!(alg.check_filtration_compatibility().is_empty());
            assert!(alg.check_all_relations().is_ok());
        }
    }

    #[test]
    fn solver_instances_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let alg = solver_instance(&mut rng, 1, 3);
            assert!(alg.check_filtration_compatibility().is_empty());
            assert!(alg.check_all_relations().is_ok());
            assert!(alg.curvature_filtration().is_at_least(3));
        }
    }
}
