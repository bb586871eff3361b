//! Buchberger completion and multivariate division for submodules of free
//! modules over the polynomial ring, with optional cofactor tracking.

use num_rational::BigRational;

use crate::laurent::{ExpVec, LaurentPoly};

use super::modvec::ModVec;
use super::order::ModOrder;

/// Result of a full normal-form computation: `input = remainder + sum
/// cofactor[i] * basis[i]`, and no term of the remainder is divisible by any
/// basis leading term.
pub struct NormalForm {
    pub remainder: ModVec,
    pub cofactors: Vec<LaurentPoly>,
}

/// Full normal form of `f` against `basis` under `order`.
pub fn normal_form(f: &ModVec, basis: &[ModVec], order: &ModOrder) -> NormalForm {
    let nvars = f.nvars();
    let leads: Vec<_> = basis.iter().map(|b| b.lead(order)).collect();
    let mut work = f.clone();
    let mut rem = ModVec::zero(nvars, f.rank());
    let mut cof = vec![LaurentPoly::zero(nvars); basis.len()];
    while let Some((pos, exp, c)) = work.lead(order) {
        let mut reduced = false;
        for (i, lead) in leads.iter().enumerate() {
            let Some((lp, le, lc)) = lead else { continue };
            if *lp == pos && le.divides(&exp) {
                let de = exp.sub(le);
                let dc = &c / lc;
                work = work.sub(&basis[i].mul_term(&de, &dc));
                cof[i] = cof[i].add(&LaurentPoly::monomial(nvars, de, dc));
                reduced = true;
                break;
            }
        }
        if !reduced {
            let t = ModVec::from_poly(nvars, f.rank(), pos, LaurentPoly::monomial(nvars, exp, c));
            rem = rem.add(&t);
            work = work.sub(&t);
        }
    }
    NormalForm {
        remainder: rem,
        cofactors: cof,
    }
}

/// A completed (reduced, monic) Groebner basis. `expr`, when present, writes
/// each basis element as a combination of the ORIGINAL input generators; the
/// combination is polynomial when the inputs were polynomial, Laurent when
/// tracking passed through a localization step.
#[derive(Clone, Debug)]
pub struct Groebner {
    pub order: ModOrder,
    pub gens: Vec<ModVec>,
    pub expr: Option<Vec<Vec<LaurentPoly>>>,
}

impl Groebner {
    pub fn reduce(&self, f: &ModVec) -> NormalForm {
        normal_form(f, &self.gens, &self.order)
    }

    pub fn contains(&self, f: &ModVec) -> bool {
        self.reduce(f).remainder.is_zero()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }
}

/// Buchberger completion with the normal selection strategy (smallest lcm
/// degree first). Product criterion applies in ambient rank 1 only; it is not
/// valid for modules.
pub fn buchberger(inputs: &[ModVec], order: &ModOrder, track: bool) -> Groebner {
    let n_in = inputs.len();
    let nvars = inputs.first().map(|v| v.nvars()).unwrap_or(0);
    let rank = inputs.first().map(|v| v.rank()).unwrap_or(1);
    debug_assert!(inputs.iter().all(|v| v.is_polynomial()));

    let mut basis: Vec<ModVec> = Vec::new();
    let mut exprs: Vec<Vec<LaurentPoly>> = Vec::new();
    let mut leads: Vec<(usize, ExpVec, BigRational)> = Vec::new();

    let push = |g: ModVec,
                e: Vec<LaurentPoly>,
                basis: &mut Vec<ModVec>,
                exprs: &mut Vec<Vec<LaurentPoly>>,
                leads: &mut Vec<(usize, ExpVec, BigRational)>| {
        let (_, _, lc) = g.lead(order).expect("nonzero");
        let inv = lc.recip();
        let g = g.scale(&inv);
        let e: Vec<LaurentPoly> = e.iter().map(|p| p.scale(&inv)).collect();
        leads.push(g.lead(order).unwrap());
        basis.push(g);
        exprs.push(e);
    };

    for (i, f) in inputs.iter().enumerate() {
        if f.is_zero() {
            continue;
        }
        let mut e = vec![LaurentPoly::zero(nvars); n_in];
        e[i] = LaurentPoly::one(nvars);
        push(f.clone(), e, &mut basis, &mut exprs, &mut leads);
    }

    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            if leads[i].0 == leads[j].0 {
                pairs.push((i, j));
            }
        }
    }

    while !pairs.is_empty() {
        // normal strategy: smallest lcm total degree, then index order
        let lcm_deg = |&(i, j): &(usize, usize)| -> i64 {
            let (a, b) = (&leads[i].1, &leads[j].1);
            a.0.iter().zip(&b.0).map(|(&x, &y)| x.max(y)).sum()
        };
        let best = pairs
            .iter()
            .enumerate()
            .min_by_key(|(_, p)| (lcm_deg(p), p.0, p.1))
            .map(|(idx, _)| idx)
            .unwrap();
        let (i, j) = pairs.swap_remove(best);

        // product criterion (valid for ideals only)
        if rank == 1 {
            let coprime = leads[i]
                .1
                 .0
                .iter()
                .zip(&leads[j].1 .0)
                .all(|(&a, &b)| a.min(b) == 0);
            if coprime {
                continue;
            }
        }

        let lcm = ExpVec(
            leads[i]
                .1
                 .0
                .iter()
                .zip(&leads[j].1 .0)
                .map(|(&a, &b)| a.max(b))
                .collect(),
        );
        let ui = lcm.sub(&leads[i].1);
        let uj = lcm.sub(&leads[j].1);
        let ci = leads[i].2.recip();
        let cj = leads[j].2.recip();
        let s = basis[i]
            .mul_term(&ui, &ci)
            .sub(&basis[j].mul_term(&uj, &cj));
        let nf = normal_form(&s, &basis, order);
        if nf.remainder.is_zero() {
            continue;
        }
        let new_expr = if track {
            let mut e: Vec<LaurentPoly> = exprs[i]
                .iter()
                .zip(&exprs[j])
                .map(|(a, b)| a.mul_term(&ui, &ci).sub(&b.mul_term(&uj, &cj)))
                .collect();
            for (k, q) in nf.cofactors.iter().enumerate() {
                if q.is_zero() {
                    continue;
                }
                for (ev, bv) in e.iter_mut().zip(&exprs[k]) {
                    *ev = ev.sub(&q.mul(bv));
                }
            }
            e
        } else {
            vec![LaurentPoly::zero(nvars); n_in]
        };
        let new_idx = basis.len();
        push(nf.remainder, new_expr, &mut basis, &mut exprs, &mut leads);
        for k in 0..new_idx {
            if leads[k].0 == leads[new_idx].0 {
                pairs.push((k, new_idx));
            }
        }
    }

    // minimalize: drop generators whose lead is divisible by another lead
    let keep: Vec<usize> = (0..basis.len())
        .filter(|&i| {
            !(0..basis.len()).any(|k| {
                k != i
                    && leads[k].0 == leads[i].0
                    && leads[k].1.divides(&leads[i].1)
                    && (leads[k].1 != leads[i].1 || k < i)
            })
        })
        .collect();
    let mut kept: Vec<ModVec> = keep.iter().map(|&i| basis[i].clone()).collect();
    let mut kept_expr: Vec<Vec<LaurentPoly>> = keep.iter().map(|&i| exprs[i].clone()).collect();

    // tail-reduce to the reduced basis
    for i in 0..kept.len() {
        let others: Vec<ModVec> = kept
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != i)
            .map(|(_, g)| g.clone())
            .collect();
        let nf = normal_form(&kept[i], &others, order);
        if track {
            let mut e = kept_expr[i].clone();
            let mut oi = 0;
            for k in 0..kept.len() {
                if k == i {
                    continue;
                }
                let q = &nf.cofactors[oi];
                oi += 1;
                if q.is_zero() {
                    continue;
                }
                for (ev, bv) in e.iter_mut().zip(&kept_expr[k]) {
                    *ev = ev.sub(&q.mul(bv));
                }
            }
            kept_expr[i] = e;
        }
        kept[i] = nf.remainder;
    }

    // deterministic order: leads descending
    let mut idx: Vec<usize> = (0..kept.len()).collect();
    idx.sort_by(|&a, &b| {
        let la = kept[a].lead(order).unwrap();
        let lb = kept[b].lead(order).unwrap();
        order.cmp((&lb.1, lb.0), (&la.1, la.0))
    });
    let gens: Vec<ModVec> = idx.iter().map(|&i| kept[i].clone()).collect();
    let expr = if track {
        Some(idx.iter().map(|&i| kept_expr[i].clone()).collect())
    } else {
        None
    };

    Groebner {
        order: order.clone(),
        gens,
        expr,
    }
}
