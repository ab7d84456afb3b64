//! Small worked examples used by tests, benches and the CLI golden files.

use crate::ainfty::{AInftyAlgebra, AInftyBuilder};
use crate::defcomplex::{hom_from_linear, push_forward, DefSpace};
use crate::graded::{int, BasisVector, Element, GradedSpace, LinearMap};
use crate::linfty::{AlgebraBuilder, CurvedAlgebra};

/// Builds a space from `(id, degree, weight)` triples.
pub fn space(basis: &[(&str, i64, u32)]) -> GradedSpace {
    GradedSpace::new(basis.iter().map(|&(id, d, w)| BasisVector::new(id, d, w)).collect())
        .expect("fixture space")
}

/// `e0` in degree 0 and weight 2, `e1` in degree 1 and weight 3.
pub fn s1() -> GradedSpace {
    space(&[("e0", 0, 2), ("e1", 1, 3)])
}

/// `mu_0 = e1`, `mu_1(e0) = e1`. MC element `-e0`.
pub fn a1() -> CurvedAlgebra {
    let mut b = AlgebraBuilder::new(s1());
    b.curvature(Element::basis(1)).unwrap();
    b.bracket(&[0], Element::basis(1)).unwrap();
    b.build()
}

/// Basis `b, e` (degree 0, weights 2, 3) and `c, d` (degree 1, weights 3, 4) with
/// `mu_0 = c`, `mu_1(b) = c`, `mu_1(e) = d`, `mu_2(b, b) = 2d`. MC element `-b - e`.
pub fn a2() -> CurvedAlgebra {
    let s = space(&[("b", 0, 2), ("e", 0, 3), ("c", 1, 3), ("d", 1, 4)]);
    let mut b = AlgebraBuilder::new(s);
    b.curvature(Element::basis(2)).unwrap();
    b.bracket(&[0], Element::basis(2)).unwrap();
    b.bracket(&[1], Element::basis(3)).unwrap();
    b.bracket(&[0, 0], Element::term(3, int(2))).unwrap();
    b.build()
}

/// `a` (degree 0, weight 1), `c` (degree 1, weight 3) with `mu_0 = c`, `mu_1(a) = c`,
/// `mu_2(a, a) = 2c`. The curvature survives to the second page, and
/// `M(ta) = (1 + t + t^2) c` has no rational root.
pub fn a3() -> CurvedAlgebra {
    let s = space(&[("a", 0, 1), ("c", 1, 3)]);
    let mut b = AlgebraBuilder::new(s);
    b.curvature(Element::basis(1)).unwrap();
    b.bracket(&[0], Element::basis(1)).unwrap();
    b.bracket(&[0, 0], Element::term(1, int(2))).unwrap();
    b.build()
}

/// Strict `k[x]/x^2`. Both basis vectors sit in shifted degree -1, where the shifted product
/// is the ordinary one.
pub fn dual_numbers(weight_cap: usize) -> AInftyAlgebra {
    let s = space(&[("1", -1, 1), ("x", -1, 1)]);
    let mut b = AInftyBuilder::new(s, weight_cap);
    b.op(&[0, 0], Element::basis(0)).unwrap();
    b.op(&[0, 1], Element::basis(1)).unwrap();
    b.op(&[1, 0], Element::basis(1)).unwrap();
    b.build().expect("k[x]/x^2 is associative")
}

/// Cohomology-of-the-circle shape: unit `1` (unshifted degree 0) and `x` (unshifted degree 1),
/// `x^2 = 0`. Shifted degrees are -1 and 0; the shifted product carries the sign `(-1)^{|a|}`.
pub fn circle(weight_cap: usize) -> AInftyAlgebra {
    let s = space(&[("1", -1, 1), ("x", 0, 1)]);
    let mut b = AInftyBuilder::new(s, weight_cap);
    b.op(&[0, 0], Element::basis(0)).unwrap();
    b.op(&[0, 1], Element::basis(1)).unwrap();
    b.op(&[1, 0], Element::term(1, int(-1))).unwrap();
    b.build().expect("circle algebra is associative")
}

/// Three-dimensional space with vanishing products.
pub fn trivial_massey_space() -> GradedSpace {
    space(&[("x", 0, 1), ("y", 0, 1), ("z", 1, 1)])
}

pub fn trivial_massey(weight_cap: usize) -> AInftyAlgebra {
    AInftyBuilder::new(trivial_massey_space(), weight_cap).build().expect("zero structure")
}

/// Same space as [`trivial_massey`] with a single triple product `m_3(x, y, x) = z`.
/// Not formal: any morphism to the trivial structure would have to kill `m_3`.
pub fn massey_m3(weight_cap: usize) -> AInftyAlgebra {
    let mut b = AInftyBuilder::new(trivial_massey_space(), weight_cap);
    b.op(&[0, 1, 0], Element::basis(2)).unwrap();
    b.build().expect("single m3 is A-infinity through the truncation")
}

/// The circle algebra `H` at weight cap 2 together with a structure on the same space that
/// agrees with `H` through `m_2` and has an exact `m_3`: the transport of `H` along
/// `id + [1,x]->1`.
pub fn circle_exact_m3() -> (AInftyAlgebra, AInftyAlgebra) {
    let h = circle(2);
    let def = DefSpace::new(h.space(), h.space(), 2);
    let mut g = hom_from_linear(&def, &LinearMap::identity(2)).expect("identity has degree 0");
    g.add_term(def.index_of_word(&[0, 1], 0).unwrap(), int(1));
    let t = push_forward(&h, &g).expect("unipotent degree 0 map");
    (h, t)
}
