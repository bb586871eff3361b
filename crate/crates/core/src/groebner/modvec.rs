//! Elements of the free module A^q over the polynomial ring, stored as a
//! dense vector of sparse polynomials (q stays small here).

use num_rational::BigRational;

use crate::laurent::{ExpVec, LaurentPoly};

use super::order::ModOrder;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ModVec {
    comps: Vec<LaurentPoly>,
}

impl ModVec {
    pub fn new(comps: Vec<LaurentPoly>) -> Self {
        debug_assert!(!comps.is_empty());
        debug_assert!(comps.iter().all(|p| p.nvars() == comps[0].nvars()));
        ModVec { comps }
    }

    pub fn zero(nvars: usize, rank: usize) -> Self {
        ModVec {
            comps: vec![LaurentPoly::zero(nvars); rank],
        }
    }

    /// `p * e_pos`.
    pub fn from_poly(nvars: usize, rank: usize, pos: usize, p: LaurentPoly) -> Self {
        let mut v = Self::zero(nvars, rank);
        v.comps[pos] = p;
        v
    }

    pub fn rank(&self) -> usize {
        self.comps.len()
    }

    pub fn nvars(&self) -> usize {
        self.comps[0].nvars()
    }

    pub fn comp(&self, i: usize) -> &LaurentPoly {
        &self.comps[i]
    }

    pub fn comps(&self) -> &[LaurentPoly] {
        &self.comps
    }

    pub fn into_comps(self) -> Vec<LaurentPoly> {
        self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|p| p.is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        ModVec {
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        ModVec {
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        ModVec {
            comps: self.comps.iter().map(|p| p.neg()).collect(),
        }
    }

    pub fn mul_poly(&self, f: &LaurentPoly) -> Self {
        ModVec {
            comps: self.comps.iter().map(|p| p.mul(f)).collect(),
        }
    }

    pub fn mul_term(&self, exp: &ExpVec, c: &BigRational) -> Self {
        ModVec {
            comps: self.comps.iter().map(|p| p.mul_term(exp, c)).collect(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        ModVec {
            comps: self.comps.iter().map(|p| p.scale(c)).collect(),
        }
    }

    pub fn shift(&self, mu: &ExpVec) -> Self {
        ModVec {
            comps: self.comps.iter().map(|p| p.shift(mu)).collect(),
        }
    }

    /// Leading module term under `order`: `(position, exponents, coefficient)`.
    pub fn lead(&self, order: &ModOrder) -> Option<(usize, ExpVec, BigRational)> {
        let mut best: Option<(usize, &ExpVec, &BigRational)> = None;
        for (pos, p) in self.comps.iter().enumerate() {
            for (e, c) in p.terms() {
                match &best {
                    None => best = Some((pos, e, c)),
                    Some((bp, be, _)) => {
                        if order.cmp((e, pos), (be, *bp)) == std::cmp::Ordering::Greater {
                            best = Some((pos, e, c));
                        }
                    }
                }
            }
        }
        best.map(|(p, e, c)| (p, e.clone(), c.clone()))
    }

    /// Every variable exponent is nonnegative in every component.
    pub fn is_polynomial(&self) -> bool {
        self.comps.iter().all(|p| p.is_polynomial())
    }

    pub fn free_of_vars_from(&self, d: usize) -> bool {
        self.comps.iter().all(|p| p.free_of_vars_from(d))
    }

    pub fn extend_vars(&self, extra: usize) -> Self {
        ModVec {
            comps: self.comps.iter().map(|p| p.extend_vars(extra)).collect(),
        }
    }

    pub fn project_vars(&self, d: usize) -> Self {
        ModVec {
            comps: self.comps.iter().map(|p| p.project_vars(d)).collect(),
        }
    }

    /// Combined per-variable minimum exponent across components.
    pub fn min_exponents(&self) -> Option<ExpVec> {
        let mut mins: Option<Vec<i64>> = None;
        for p in &self.comps {
            if let Some(m) = p.min_exponents() {
                match &mut mins {
                    None => mins = Some(m.0.clone()),
                    Some(acc) => {
                        for (a, &v) in acc.iter_mut().zip(&m.0) {
                            *a = (*a).min(v);
                        }
                    }
                }
            }
        }
        mins.map(ExpVec)
    }

    /// Clear to a polynomial representative: returns `(g, mu)` with
    /// `g = sigma^mu * self`, all exponents nonnegative.
    pub fn clear(&self) -> Option<(Self, ExpVec)> {
        let mins = self.min_exponents()?;
        let mu = ExpVec(mins.0.iter().map(|&v| -v.min(0)).collect());
        Some((self.shift(&mu), mu))
    }
}
