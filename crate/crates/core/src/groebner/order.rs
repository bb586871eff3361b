//! Monomial orders on polynomial monomials and their module extensions.

use std::cmp::Ordering;

use crate::laurent::ExpVec;

/// Order on polynomial monomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BaseOrder {
    /// Graded reverse lexicographic.
    GrevLex,
    /// Pure lexicographic, s1 > s2 > ...
    Lex,
    /// Block elimination order: monomials are compared grevlex on the
    /// eliminated block first, then grevlex on the kept block. Any monomial
    /// containing an eliminated variable ranks above all monomials free of
    /// them.
    Elim { eliminated: Vec<bool> },
}

impl BaseOrder {
    /// Eliminate every variable with index >= `d` out of `n`.
    pub fn elim_suffix(n: usize, d: usize) -> Self {
        BaseOrder::Elim {
            eliminated: (0..n).map(|i| i >= d).collect(),
        }
    }

    /// Eliminate exactly the listed variable indices.
    pub fn elim_set(n: usize, vars: &[usize]) -> Self {
        let mut mask = vec![false; n];
        for &v in vars {
            mask[v] = true;
        }
        BaseOrder::Elim { eliminated: mask }
    }

    pub fn cmp_mono(&self, a: &ExpVec, b: &ExpVec) -> Ordering {
        match self {
            BaseOrder::GrevLex => grevlex(&a.0, &b.0),
            BaseOrder::Lex => lex(&a.0, &b.0),
            BaseOrder::Elim { eliminated } => {
                let pick = |e: &ExpVec, flag: bool| -> Vec<i64> {
                    e.0.iter()
                        .zip(eliminated)
                        .filter(|(_, &m)| m == flag)
                        .map(|(&v, _)| v)
                        .collect()
                };
                grevlex(&pick(a, true), &pick(b, true))
                    .then_with(|| grevlex(&pick(a, false), &pick(b, false)))
            }
        }
    }
}

fn grevlex(a: &[i64], b: &[i64]) -> Ordering {
    let da: i64 = a.iter().sum();
    let db: i64 = b.iter().sum();
    match da.cmp(&db) {
        Ordering::Equal => {}
        ord => return ord,
    }
    for i in (0..a.len()).rev() {
        if a[i] != b[i] {
            return if a[i] < b[i] {
                Ordering::Greater
            } else {
                Ordering::Less
            };
        }
    }
    Ordering::Equal
}

fn lex(a: &[i64], b: &[i64]) -> Ordering {
    for i in 0..a.len() {
        if a[i] != b[i] {
            return a[i].cmp(&b[i]);
        }
    }
    Ordering::Equal
}

/// How positions enter the comparison of module monomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PositionRule {
    /// Term over position: the base order decides; ties go to the lower
    /// position index.
    TermOverPosition,
    /// Position over term: the lower position index dominates outright;
    /// the base order only breaks ties within a position. A reduced basis
    /// under this rule is echelon in the positions.
    PositionOverTerm,
    /// Positions below `split` dominate positions at or above it; inside a
    /// block the base order decides, then the lower position index.
    FirstBlockDominates { split: usize },
}

/// A module monomial order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModOrder {
    pub base: BaseOrder,
    pub rule: PositionRule,
}

impl ModOrder {
    pub fn grevlex_top() -> Self {
        ModOrder {
            base: BaseOrder::GrevLex,
            rule: PositionRule::TermOverPosition,
        }
    }

    pub fn elim_top(n: usize, d: usize) -> Self {
        ModOrder {
            base: BaseOrder::elim_suffix(n, d),
            rule: PositionRule::TermOverPosition,
        }
    }

    pub fn grevlex_pot() -> Self {
        ModOrder {
            base: BaseOrder::GrevLex,
            rule: PositionRule::PositionOverTerm,
        }
    }

    /// Order for syzygy extraction on vectors split as `A^split (+) A^rest`.
    pub fn syzygy(split: usize) -> Self {
        ModOrder {
            base: BaseOrder::GrevLex,
            rule: PositionRule::FirstBlockDominates { split },
        }
    }

    /// Compare module monomials `(exp, pos)`. Greater means larger.
    pub fn cmp(&self, a: (&ExpVec, usize), b: (&ExpVec, usize)) -> Ordering {
        match &self.rule {
            PositionRule::TermOverPosition => {
                self.base.cmp_mono(a.0, b.0).then_with(|| b.1.cmp(&a.1))
            }
            PositionRule::PositionOverTerm => {
                b.1.cmp(&a.1).then_with(|| self.base.cmp_mono(a.0, b.0))
            }
            PositionRule::FirstBlockDominates { split } => {
                let blk = |p: usize| usize::from(p >= *split); // 0 = dominant block
                blk(b.1)
                    .cmp(&blk(a.1))
                    .then_with(|| self.base.cmp_mono(a.0, b.0))
                    .then_with(|| b.1.cmp(&a.1))
            }
        }
    }
}
