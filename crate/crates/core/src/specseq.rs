//! Pages of the spectral sequence of the filtration under `mu_1`, their differentials,
//! and the obstruction lift used by the MC solver.
//!
//! `E_r^{p,q}` is the quotient of `Z_r^p = {z in F_p g^{p+q} : mu_1 z in F_{p+r}}` by
//! `Z_{r-1}^{p+1} + mu_1(Z_{r-1}^{p-r+1})`. With curvature in `F_c` the construction is well
//! defined for `r <= r_max + 1`, `r_max = floor((c-1)/2)`, and `d_r` exists for `r <= r_max`.

use num_traits::Zero;
use thiserror::Error;

use crate::graded::{Element, FiltrationWeight, Scalar, SpaceError};
use crate::linalg::{dense_rank, kernel, solve, Quotient};
use crate::linfty::CurvedAlgebra;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpecSeqError {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error("page {r} is beyond the curvature bound (pages exist up to {limit})")]
    PageBeyondCurvatureBound { r: u32, limit: u32 },
    #[error("E_{r}^{{{p},{q}}}: the denominator is not contained in the numerator")]
    IllDefinedPage { r: u32, p: i64, q: i64 },
    #[error("d_{s} on E^{{{p},{q}}} leaves the target numerator")]
    DifferentialEscapes { s: u32, p: i64, q: i64 },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LiftError {
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("no lift: the class survives to the next page")]
    NoLift,
}

/// `None` for flat algebras (every page is defined).
pub fn r_max(alg: &CurvedAlgebra) -> Option<u32> {
    match alg.curvature_filtration() {
        FiltrationWeight::Infinite => None,
        FiltrationWeight::Finite(c) => Some((c - 1) / 2),
    }
}

fn check_page_index(alg: &CurvedAlgebra, r: u32) -> Result<(), SpecSeqError> {
    match r_max(alg) {
        Some(m) if r > m + 1 => Err(SpecSeqError::PageBeyondCurvatureBound { r, limit: m + 1 }),
        _ => Ok(()),
    }
}

fn clamp(p: i64) -> u32 {
    p.clamp(1, u32::MAX as i64) as u32
}

/// `{z in F_p g^n : mu_1 z in F_{p+r}}`; `r` may be -1.
pub fn cycles(alg: &CurvedAlgebra, r: i64, p: i64, n: i64) -> Vec<Element> {
    let space = alg.space();
    let idx = space.layer_indices(n, clamp(p));
    let bound = p + r;
    let cols: Vec<Element> = idx
        .iter()
        .map(|&i| alg.mu1(&Element::basis(i)).filtered(|j| (space.weight(j) as i64) < bound))
        .collect();
    kernel(&cols).iter().map(|k| k.remap(|j| idx[j])).collect()
}

/// `Z_{r-1}^{p+1} + mu_1(Z_{r-1}^{p-r+1})` in degree `n`.
pub fn boundaries(alg: &CurvedAlgebra, r: i64, p: i64, n: i64) -> Vec<Element> {
    let mut out = cycles(alg, r - 1, p + 1, n);
    for y in cycles(alg, r - 1, p - r + 1, n - 1) {
        let b = alg.mu1(&y);
        if !b.is_zero() {
            out.push(b);
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct Page {
    pub r: u32,
    pub p: i64,
    pub q: i64,
    pub numerator: Vec<Element>,
    pub relations: Vec<Element>,
    quotient: Quotient,
}

impl Page {
    pub fn dim(&self) -> usize {
        self.quotient.dim()
    }

    /// Representatives of a basis of the page.
    pub fn classes(&self) -> &[Element] {
        &self.quotient.classes
    }

    /// Coordinates of the class of `v`, or `None` if `v` is not in the numerator.
    pub fn coordinates(&self, v: &Element) -> Option<Vec<Scalar>> {
        self.quotient.coordinates(v)
    }

    pub fn total_degree(&self) -> i64 {
        self.p + self.q
    }
}

fn build_page(alg: &CurvedAlgebra, r: u32, p: i64, q: i64) -> Result<Page, SpecSeqError> {
    let n = p + q;
    let numerator = cycles(alg, r as i64, p, n);
    let relations = boundaries(alg, r as i64, p, n);
    let quotient = Quotient::new(&numerator, &relations).map_err(|_| SpecSeqError::IllDefinedPage { r, p, q })?;
    Ok(Page { r, p, q, numerator, relations, quotient })
}

pub fn page(alg: &CurvedAlgebra, r: u32, p: i64, q: i64) -> Result<Page, SpecSeqError> {
    check_page_index(alg, r)?;
    build_page(alg, r, p, q)
}

/// Matrix of `d_s : E_s^{p,q} -> E_s^{p+s,q-s+1}`, one column per source class.
#[derive(Clone, Debug)]
pub struct PageMap {
    pub source: Page,
    pub target: Page,
    pub columns: Vec<Vec<Scalar>>,
}

impl PageMap {
    pub fn rank(&self) -> usize {
        dense_rank(&self.columns)
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(|c| c.iter().all(Zero::is_zero))
    }

    /// Image of a class given by coordinates.
    pub fn apply(&self, coords: &[Scalar]) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(); self.target.dim()];
        for (c, col) in coords.iter().zip(&self.columns) {
            for (o, x) in out.iter_mut().zip(col) {
                *o += c * x;
            }
        }
        out
    }
}

/// `d_s` on `E_s^{p,q}`. On page `r_max + 1` no finer differential is defined and the zero
/// map is returned.
pub fn page_differential(alg: &CurvedAlgebra, s: u32, p: i64, q: i64) -> Result<PageMap, SpecSeqError> {
    check_page_index(alg, s)?;
    let source = build_page(alg, s, p, q)?;
    let target = build_page(alg, s, p + s as i64, q - s as i64 + 1)?;
    let top = r_max(alg).is_some_and(|m| s == m + 1);
    let mut columns = Vec::with_capacity(source.dim());
    for z in source.classes() {
        if top {
            columns.push(vec![Scalar::zero(); target.dim()]);
            continue;
        }
        let img = alg.mu1(z);
        let c = target.coordinates(&img).ok_or(SpecSeqError::DifferentialEscapes { s, p, q })?;
        columns.push(c);
    }
    Ok(PageMap { source, target, columns })
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct PageEntry {
    pub p: i64,
    pub q: i64,
    pub dim: usize,
}

/// Positions `(p, n)` where `E_0` can be nonzero: some basis vector of weight `p`, degree `n`.
pub fn occupied(alg: &CurvedAlgebra) -> Vec<(i64, i64)> {
    let space = alg.space();
    let mut v: Vec<(i64, i64)> = (0..space.dim()).map(|i| (space.weight(i) as i64, space.degree(i))).collect();
    v.sort_by_key(|&(p, n)| (n, p));
    v.dedup();
    v
}

/// Dimensions of the nonzero-capable entries of page `r`, by total degree then `p`.
pub fn page_table(alg: &CurvedAlgebra, r: u32, total_degree: Option<i64>) -> Result<Vec<PageEntry>, SpecSeqError> {
    check_page_index(alg, r)?;
    let mut out = Vec::new();
    for (p, n) in occupied(alg) {
        if total_degree.is_some_and(|t| t != n) {
            continue;
        }
        let pg = build_page(alg, r, p, n - p)?;
        out.push(PageEntry { p, q: n - p, dim: pg.dim() });
    }
    Ok(out)
}

/// `E_{r+1}^{p,q} = 0` for every `p` with `p + q = n`. Requires `r <= r_max`.
pub fn vanishing_in_total_degree(alg: &CurvedAlgebra, r: u32, n: i64) -> Result<bool, SpecSeqError> {
    check_page_index(alg, r + 1)?;
    for (p, m) in occupied(alg) {
        if m == n && build_page(alg, r + 1, p, n - p)?.dim() != 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Nonzero entries of page `r` in total degree `n`, with class representatives.
pub fn surviving_classes(alg: &CurvedAlgebra, r: u32, n: i64) -> Result<Vec<Page>, SpecSeqError> {
    check_page_index(alg, r)?;
    let mut out = Vec::new();
    for (p, m) in occupied(alg) {
        if m == n {
            let pg = build_page(alg, r, p, n - p)?;
            if pg.dim() > 0 {
                out.push(pg);
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Default)]
pub struct PageStructureReport {
    pub checks: usize,
    pub failures: Vec<String>,
}

impl PageStructureReport {
    pub fn is_ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// For every page `s < up_to` and every occupied position checks that the denominator lies in the
/// numerator, that `d_s` lands in the claimed target and kills relations, that `d_s d_s = 0`, and
/// that `dim E_{s+1} = dim H(E_s, d_s)`. Page `up_to` itself is checked for well-definedness.
pub fn verify_page_structure(alg: &CurvedAlgebra, up_to: u32) -> Result<PageStructureReport, SpecSeqError> {
    check_page_index(alg, up_to)?;
    let mut rep = PageStructureReport::default();
    let positions = occupied(alg);
    for s in 0..=up_to {
        for &(p, n) in &positions {
            rep.checks += 1;
            let q = n - p;
            let pg = match build_page(alg, s, p, q) {
                Ok(pg) => pg,
                Err(e) => {
                    rep.failures.push(e.to_string());
                    continue;
                }
            };
            if s == up_to {
                continue;
            }
            let d = match page_differential(alg, s, p, q) {
                Ok(d) => d,
                Err(e) => {
                    rep.failures.push(e.to_string());
                    continue;
                }
            };
            for rel in &pg.relations {
                let img = alg.mu1(rel);
                if d.target.coordinates(&img).map(|c| c.iter().all(Zero::is_zero)) != Some(true) {
                    rep.failures.push(format!("d_{s} on E^{{{p},{q}}} does not kill a relation"));
                }
            }
            let s64 = s as i64;
            match page_differential(alg, s, p + s64, q - s64 + 1) {
                Ok(d2) => {
                    for col in &d.columns {
                        if d2.apply(col).iter().any(|x| !x.is_zero()) {
                            rep.failures.push(format!("d_{s} d_{s} != 0 starting at E^{{{p},{q}}}"));
                        }
                    }
                }
                Err(e) => rep.failures.push(e.to_string()),
            }
            let incoming = page_differential(alg, s, p - s64, q + s64 - 1).map(|m| m.rank());
            let next = build_page(alg, s + 1, p, q).map(|pg| pg.dim());
            match (incoming, next) {
                (Ok(rin), Ok(dn)) => {
                    let homology = pg.dim() - d.rank() - rin;
                    if homology != dn {
                        rep.failures.push(format!(
                            "dim E_{}^{{{p},{q}}} = {dn} but homology of d_{s} has dim {homology}",
                            s + 1
                        ));
                    }
                }
                (Err(e), _) | (_, Err(e)) => rep.failures.push(e.to_string()),
            }
        }
    }
    Ok(rep)
}

/// Given `x in F_p g^n` with `mu_1 x in F_{p+r+1}`, finds `y in F_{p-r} g^{n-1}` with
/// `mu_1 y in F_p` and `x - mu_1 y in F_{p+1}`. Unknowns are ordered lowest weight first, then by
/// basis order; free unknowns are set to zero. A lift exists exactly when `[x] = 0` in `E_{r+1}^{p,q}`.
pub fn lift_obstruction(alg: &CurvedAlgebra, x: &Element, p: u32, r: u32) -> Result<Element, LiftError> {
    let space = alg.space();
    if x.is_zero() {
        return Ok(Element::zero());
    }
    let bad = |m: String| Err(LiftError::PreconditionViolated(m));
    let n = match space.degree_of(x) {
        Ok(Some(n)) => n,
        Ok(None) => unreachable!(),
        Err(e) => return bad(e.to_string()),
    };
    if !space.in_filtration(x, p) {
        return bad(format!("element is not in F_{p}"));
    }
    if !space.in_filtration(&alg.mu1(x), p + r + 1) {
        return bad(format!("mu_1 of the element is not in F_{}", p + r + 1));
    }
    if p < r + 1 {
        return bad(format!("p - r = {} is below 1", p as i64 - r as i64));
    }
    let idx = space.layer_indices(n - 1, p - r);
    let cols: Vec<Element> =
        idx.iter().map(|&i| alg.mu1(&Element::basis(i)).filtered(|j| space.weight(j) <= p)).collect();
    let rhs = x.filtered(|j| space.weight(j) <= p);
    let coeffs = solve(&cols, &rhs).ok_or(LiftError::NoLift)?;
    let y = coeffs.remap(|j| idx[j]);
    let my = alg.mu1(&y);
    assert!(
        space.in_filtration(&y, p - r) && space.in_filtration(&my, p) && space.in_filtration(&(x - &my), p + 1),
        "lift self-check failed"
    );
    Ok(y)
}
