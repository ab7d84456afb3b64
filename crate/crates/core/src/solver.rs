//! Maurer-Cartan elements by repeated curvature-raising twists.
//!
//! Each step lifts the curvature `mu_0 in F_k` to some `alpha_k in F_{k-r}` with
//! `mu_0 - mu_1(alpha_k) in F_{k+1}` and twists by `-alpha_k`; since `k >= 2r + 1` the quadratic
//! and higher terms land in `F_{k+1}` as well. The product of twists is the twist by
//! `alpha = -(alpha_1 + alpha_2 + ...)`, which is then an MC element of the input.

use thiserror::Error;

use crate::graded::{Element, FiltrationWeight};
use crate::linfty::{AlgebraError, CurvedAlgebra, RelationReport};
use crate::specseq::{lift_obstruction, LiftError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub k: u32,
    /// `alpha_k`; the algebra is twisted by its negative.
    pub twist: Element,
    pub before: u32,
    pub after: FiltrationWeight,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub alpha: Element,
    pub r: u32,
    pub steps: Vec<Step>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Hypothesis {
    CurvatureTooLow { required: u32, found: u32 },
    /// The curvature at step `k` has a nonzero class in `E_{r+1}^{p,q}`.
    Obstructed { k: u32, p: i64, q: i64, representative: Element, steps: Vec<Step> },
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SolveError {
    #[error("hypothesis failed: {0:?}")]
    HypothesisFailed(Hypothesis),
    #[error("input is not a curved L-infinity algebra ({} relation violations, {} filtration violations)", .relations.violations.len(), .filtration)]
    RelationCheckFailed { relations: RelationReport, filtration: usize },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Clone, Debug)]
pub struct StepResult {
    pub alpha_k: Element,
    pub twisted: CurvedAlgebra,
}

/// One twist. Returns `Ok(Err(representative))` when the curvature class survives.
pub fn curvature_step(alg: &CurvedAlgebra, r: u32, k: u32) -> Result<Result<StepResult, Element>, SolveError> {
    let found = alg.curvature_filtration();
    if k < 2 * r + 1 || !found.is_at_least(k) {
        return Err(SolveError::PreconditionViolated(format!(
            "need curvature filtration >= k >= 2r+1, got k = {k}, r = {r}, curvature filtration {found}"
        )));
    }
    let mu0 = alg.curvature();
    let alpha_k = match lift_obstruction(alg, &mu0, k, r) {
        Ok(y) => y,
        Err(LiftError::NoLift) => return Ok(Err(mu0)),
        Err(LiftError::PreconditionViolated(m)) => return Err(SolveError::PreconditionViolated(m)),
    };
    let twisted = alg.twist(&alpha_k.negated())?;
    debug_assert!(twisted.curvature_filtration().is_at_least(k + 1));
    Ok(Ok(StepResult { alpha_k, twisted }))
}

/// Checks the relations and filtration compatibility, then solves.
pub fn solve_mc(alg: &CurvedAlgebra, r: u32) -> Result<Certificate, SolveError> {
    let filtration = alg.check_filtration_compatibility().len();
    let relations = alg.check_all_relations();
    if filtration > 0 || !relations.is_ok() {
        return Err(SolveError::RelationCheckFailed { relations, filtration });
    }
    solve_mc_unchecked(alg, r)
}

/// [`solve_mc`] without the up-front relation check, for inputs known to be valid.
pub fn solve_mc_unchecked(alg: &CurvedAlgebra, r: u32) -> Result<Certificate, SolveError> {
    let mut steps = Vec::new();
    let mut alpha = Element::zero();
    let mut current = alg.clone();
    let mut first = true;
    while let FiltrationWeight::Finite(k) = current.curvature_filtration() {
        if first && k < 2 * r + 1 {
            return Err(SolveError::HypothesisFailed(Hypothesis::CurvatureTooLow { required: 2 * r + 1, found: k }));
        }
        first = false;
        match curvature_step(&current, r, k)? {
            Ok(StepResult { alpha_k, twisted }) => {
                let after = twisted.curvature_filtration();
                if !after.is_at_least(k + 1) {
                    return Err(SolveError::PreconditionViolated(format!("twist at k = {k} did not raise the curvature")));
                }
                alpha = &alpha - &alpha_k;
                steps.push(Step { k, twist: alpha_k, before: k, after });
                current = twisted;
            }
            Err(representative) => {
                let p = k as i64;
                return Err(SolveError::HypothesisFailed(Hypothesis::Obstructed {
                    k,
                    p,
                    q: 1 - p,
                    representative,
                    steps,
                }));
            }
        }
    }
    Ok(Certificate { alpha, r, steps })
}

/// Replays a certificate against `alg`; `Err` names the first failing check.
pub fn check_certificate(alg: &CurvedAlgebra, cert: &Certificate) -> Result<(), String> {
    let space = alg.space();
    let r = cert.r;
    let mut current = alg.clone();
    let mut sum = Element::zero();
    for (i, st) in cert.steps.iter().enumerate() {
        let found = current.curvature_filtration();
        if found != FiltrationWeight::Finite(st.before) || st.k != st.before {
            return Err(format!("step {i}: recorded curvature weight {} but found {found}", st.before));
        }
        if st.k < 2 * r + 1 {
            return Err(format!("step {i}: k = {} below 2r+1", st.k));
        }
        if space.check_element(&st.twist).is_err() || !space.is_homogeneous_of(&st.twist, 0) {
            return Err(format!("step {i}: twist is not a degree 0 element"));
        }
        if !space.in_filtration(&st.twist, st.k - r) {
            return Err(format!("step {i}: twist is not in F_{}", st.k - r));
        }
        current = current.twist(&st.twist.negated()).map_err(|e| format!("step {i}: {e}"))?;
        let after = current.curvature_filtration();
        if after != st.after {
            return Err(format!("step {i}: recorded weight after {} but found {after}", st.after));
        }
        if !after.is_at_least(st.before + 1) {
            return Err(format!("step {i}: curvature weight did not increase"));
        }
        sum.add_scaled(&crate::graded::int(1), &st.twist);
    }
    if !current.is_flat() {
        return Err("final curvature is nonzero".into());
    }
    if cert.alpha != sum.negated() {
        return Err("alpha is not minus the sum of the twists".into());
    }
    if !space.is_homogeneous_of(&cert.alpha, 0) || !space.in_filtration(&cert.alpha, r + 1) {
        return Err(format!("alpha is not a degree 0 element of F_{}", r + 1));
    }
    let defect = alg.mc_defect(&cert.alpha).map_err(|e| e.to_string())?;
    if !defect.is_zero() {
        return Err(format!("mc defect is {}", space.show(&defect)));
    }
    Ok(())
}

pub fn verify_certificate(alg: &CurvedAlgebra, cert: &Certificate) -> bool {
    check_certificate(alg, cert).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graded::int;

    #[test]
    fn steps_on_fixtures() {
        let st = curvature_step(&fixtures::a1(), 1, 3).unwrap().unwrap();
        assert_eq!(st.alpha_k, Element::basis(0));
        assert!(st.twisted.is_flat());
        let st = curvature_step(&fixtures::a2(), 1, 3).unwrap().unwrap();
        assert_eq!(st.alpha_k, Element::basis(0));
        assert_eq!(st.twisted.curvature(), Element::basis(3));
        assert_eq!(curvature_step(&fixtures::a3(), 1, 3).unwrap().unwrap_err(), Element::basis(1));
        assert!(matches!(curvature_step(&fixtures::a1(), 2, 3), Err(SolveError::PreconditionViolated(_))));
    }

    #[test]
    fn solves_fixtures() {
        let a1 = fixtures::a1();
        let c = solve_mc(&a1, 1).unwrap();
        assert_eq!(c.alpha, Element::term(0, int(-1)));
        assert_eq!(c.steps.len(), 1);
        assert_eq!((c.steps[0].before, c.steps[0].after), (3, FiltrationWeight::Infinite));
        assert!(verify_certificate(&a1, &c));

        let a2 = fixtures::a2();
        let c = solve_mc(&a2, 1).unwrap();
        assert_eq!(c.alpha, Element::from_terms([(0, int(-1)), (1, int(-1))]));
        let trace: Vec<_> = c.steps.iter().map(|s| (s.before, s.after)).collect();
        assert_eq!(trace, vec![(3, FiltrationWeight::Finite(4)), (4, FiltrationWeight::Infinite)]);
        assert!(a2.mc_defect(&c.alpha).unwrap().is_zero());
        assert!(verify_certificate(&a2, &c));

        let mut bad = c.clone();
        bad.alpha = &bad.alpha + &Element::basis(1);
        assert!(!verify_certificate(&a2, &bad));
        assert_eq!(a2.mc_defect(&bad.alpha).unwrap(), Element::basis(3));

        match solve_mc(&fixtures::a3(), 1) {
            Err(SolveError::HypothesisFailed(Hypothesis::Obstructed { k, p, q, representative, .. })) => {
                assert_eq!((k, p, q), (3, 3, -2));
                assert_eq!(representative, Element::basis(1));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn flat_and_low_curvature() {
        let flat = CurvedAlgebra::flat(fixtures::s1());
        let c = solve_mc(&flat, 3).unwrap();
        assert!(c.alpha.is_zero() && c.steps.is_empty());
        assert!(verify_certificate(&flat, &c));
        assert!(matches!(
            solve_mc(&fixtures::a1(), 2),
            Err(SolveError::HypothesisFailed(Hypothesis::CurvatureTooLow { required: 5, found: 3 }))
        ));
    }
}
