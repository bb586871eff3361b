//! Analysis of the set of allowable initial conditions: freeness of the
//! state space via the saturated minor-ideal (projectivity) test, and
//! non-autonomy / faithfulness of the state space as a lower-dimensional
//! behavior.

use crate::dnnl::NormalizationResult;
use crate::groebner::saturated_model;
use crate::laurent::LaurentPoly;
use crate::realization::FirstOrderRealization;

/// Report on the state space of a realization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateSpaceReport {
    pub gamma: usize,
    pub d: usize,
    pub rank: usize,
    pub is_free: bool,
    pub is_nonautonomous: bool,
}

/// Freeness of the state space: compute the rank r of X and the
/// Laurent-saturated ideal of its r-by-r minors; the state space is free
/// exactly when that ideal is the unit ideal (projective, hence free).
/// An empty X is free by definition.
pub fn freeness_check(real: &FirstOrderRealization) -> (bool, usize) {
    let r = real.x.rank();
    if r == 0 {
        return (true, 0);
    }
    let minors = real.x.minors(r).expect("minors of computed rank");
    let gens: Vec<Vec<LaurentPoly>> = minors
        .into_iter()
        .filter(|m| !m.is_zero())
        .map(|m| vec![m])
        .collect();
    if gens.is_empty() {
        return (false, r);
    }
    let model = saturated_model(&gens, real.d, 1);
    let one = vec![LaurentPoly::one(real.d)];
    (model.member(&one), r)
}

/// Bezout witness for a free state space: Laurent cofactors expressing 1
/// over the r-by-r minors of X. `None` when the minor ideal is proper.
pub fn freeness_witness(
    real: &FirstOrderRealization,
) -> Option<(Vec<LaurentPoly>, Vec<LaurentPoly>)> {
    let r = real.x.rank();
    if r == 0 {
        return Some((Vec::new(), Vec::new()));
    }
    let minors: Vec<LaurentPoly> = real
        .x
        .minors(r)
        .expect("minors of computed rank")
        .into_iter()
        .filter(|m| !m.is_zero())
        .collect();
    let rows: Vec<Vec<LaurentPoly>> = minors.iter().map(|m| vec![m.clone()]).collect();
    if rows.is_empty() {
        return None;
    }
    let model = saturated_model(&rows, real.d, 1);
    let w = model.member_witness(&[LaurentPoly::one(real.d)])?;
    Some((w, minors))
}

/// Non-autonomy of the state space as a d-D behavior: true iff the
/// annihilator of the transformed quotient module meets the small ring in
/// the zero ideal (the module is faithful over the small ring).
pub fn nonautonomy_check(norm: &NormalizationResult) -> bool {
    norm.transformed
        .annihilator()
        .contract_to_subring(norm.d)
        .is_zero_span()
}

pub fn state_space_report(
    real: &FirstOrderRealization,
    norm: &NormalizationResult,
) -> StateSpaceReport {
    let (is_free, rank) = freeness_check(real);
    StateSpaceReport {
        gamma: real.gamma,
        d: real.d,
        rank,
        is_free,
        is_nonautonomous: nonautonomy_check(norm),
    }
}
