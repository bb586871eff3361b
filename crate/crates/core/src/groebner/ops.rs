//! Module-level operations built on Buchberger completion: syzygies, colon
//! modules, saturation, contraction to a subring, and ideal intersection.
//!
//! Laurent semantics are realized on polynomial representatives: a row of
//! Laurent polynomials is cleared by a unit monomial, and membership in the
//! Laurent span becomes membership in the saturation of the cleared module
//! by the product of all variables.

use num_rational::BigRational;
use num_traits::One;

use crate::laurent::{ExpVec, LaurentPoly};

use super::buchberger::{buchberger, normal_form, Groebner};
use super::modvec::ModVec;
use super::order::ModOrder;

/// Generators of the syzygy module of `rows` (polynomial vectors in A^q):
/// all `s` with `sum_i s_i * rows_i = 0`. Output vectors have rank
/// `rows.len()`.
pub fn syzygies_poly(rows: &[ModVec]) -> Vec<ModVec> {
    let k = rows.len();
    if k == 0 {
        return Vec::new();
    }
    let q = rows[0].rank();
    let nvars = rows[0].nvars();
    let mut augmented = Vec::with_capacity(k);
    for (i, r) in rows.iter().enumerate() {
        let mut comps = r.comps().to_vec();
        comps.extend((0..k).map(|j| {
            if j == i {
                LaurentPoly::one(nvars)
            } else {
                LaurentPoly::zero(nvars)
            }
        }));
        augmented.push(ModVec::new(comps));
    }
    let gb = buchberger(&augmented, &ModOrder::syzygy(q), false);
    gb.gens
        .iter()
        .filter(|g| (0..q).all(|i| g.comp(i).is_zero()))
        .map(|g| ModVec::new(g.comps()[q..].to_vec()))
        .collect()
}

/// Syzygies of rows of LAURENT vectors over the Laurent ring: rows are
/// cleared to polynomial form, polynomial syzygies are extracted, and the
/// clearing units are folded back in.
pub fn syzygies_laurent(rows: &[Vec<LaurentPoly>]) -> Vec<Vec<LaurentPoly>> {
    let nonzero: Vec<(usize, ModVec, ExpVec)> = rows
        .iter()
        .enumerate()
        .filter_map(|(i, r)| {
            let v = ModVec::new(r.clone());
            v.clear().map(|(cleared, mu)| (i, cleared, mu))
        })
        .collect();
    let k = rows.len();
    let nvars = rows
        .first()
        .and_then(|r| r.first())
        .map(|p| p.nvars())
        .unwrap_or(0);
    let mut out = Vec::new();
    // a zero row has the trivial syzygy e_i
    for (i, r) in rows.iter().enumerate() {
        if r.iter().all(|p| p.is_zero()) {
            let mut s = vec![LaurentPoly::zero(nvars); k];
            s[i] = LaurentPoly::one(nvars);
            out.push(s);
        }
    }
    if nonzero.is_empty() {
        return out;
    }
    let cleared: Vec<ModVec> = nonzero.iter().map(|(_, v, _)| v.clone()).collect();
    for s in syzygies_poly(&cleared) {
        let mut full = vec![LaurentPoly::zero(nvars); k];
        for (slot, (orig_idx, _, mu)) in nonzero.iter().enumerate() {
            // cleared_i = sigma^mu * orig_i, so the original picks up sigma^mu
            full[*orig_idx] = s.comp(slot).shift(mu);
        }
        out.push(full);
    }
    out
}

/// Tracked generating set: `gens[i] = sum_j expr[i][j] * original[j]` as an
/// identity over the Laurent ring.
#[derive(Clone, Debug)]
pub struct Tracked {
    pub gens: Vec<ModVec>,
    pub expr: Vec<Vec<LaurentPoly>>,
    pub n_orig: usize,
}

impl Tracked {
    /// Clear Laurent rows to polynomial representatives, tracking the unit.
    pub fn from_laurent_rows(rows: &[Vec<LaurentPoly>], nvars: usize) -> Self {
        let n_orig = rows.len();
        let mut gens = Vec::new();
        let mut expr = Vec::new();
        for (i, r) in rows.iter().enumerate() {
            let v = ModVec::new(r.clone());
            if let Some((cleared, mu)) = v.clear() {
                gens.push(cleared);
                let mut e = vec![LaurentPoly::zero(nvars); n_orig];
                e[i] = LaurentPoly::monomial(nvars, mu, BigRational::one());
                expr.push(e);
            }
        }
        Tracked { gens, expr, n_orig }
    }
}

/// Module colon `(M : g)` of polynomial generators, with tracking when `g`
/// is a unit monomial of the Laurent ring. Returns generators `v` with
/// `g * v` in `M`, each tracked back to the original rows when possible.
fn colon_tracked(cur: &Tracked, g: &LaurentPoly, q: usize, nvars: usize) -> Tracked {
    let k = cur.gens.len();
    let mut family: Vec<ModVec> = (0..q)
        .map(|i| ModVec::from_poly(nvars, q, i, g.clone()))
        .collect();
    family.extend(cur.gens.iter().cloned());
    let syz = syzygies_poly(&family);
    let g_inv = g.unit_inverse().ok();
    let mut gens = Vec::new();
    let mut expr = Vec::new();
    for s in syz {
        let v = ModVec::new(s.comps()[..q].to_vec());
        if v.is_zero() {
            continue;
        }
        // g*v = -sum_k c_k f_k, so v = -(1/g) * sum_k c_k f_k
        let mut e = vec![LaurentPoly::zero(nvars); cur.n_orig];
        if let Some(gi) = &g_inv {
            for kk in 0..k {
                let c = s.comp(q + kk);
                if c.is_zero() {
                    continue;
                }
                for (ev, bv) in e.iter_mut().zip(&cur.expr[kk]) {
                    *ev = ev.sub(&c.mul(bv));
                }
            }
            for ev in e.iter_mut() {
                *ev = ev.mul(gi);
            }
        }
        gens.push(v);
        expr.push(e);
    }
    Tracked {
        gens,
        expr,
        n_orig: cur.n_orig,
    }
}

/// Saturation `M : g^infinity` by iterated colon, stabilized by span
/// equality. Returns the stabilized generating set with tracking.
pub fn saturate_tracked(start: Tracked, g: &LaurentPoly, q: usize, nvars: usize) -> Tracked {
    let order = ModOrder::grevlex_top();
    let mut cur = start;
    loop {
        let gb_cur = buchberger(&cur.gens, &order, false);
        let next = colon_tracked(&cur, g, q, nvars);
        let grew = next.gens.iter().any(|v| !gb_cur.contains(v));
        if !grew {
            return cur;
        }
        cur = next;
    }
}

/// Saturated Groebner model of the Laurent span of `rows`: membership of a
/// cleared polynomial vector in the model decides Laurent-span membership.
/// Basis elements carry Laurent cofactors against the original rows.
#[derive(Clone, Debug)]
pub struct SatModel {
    pub gb: Groebner,
    /// `gb.gens[i] = sum_j expr[i][j] * original_row[j]` over the Laurent ring
    pub expr: Vec<Vec<LaurentPoly>>,
    pub nvars: usize,
    pub rank: usize,
}

pub fn all_vars_product(nvars: usize) -> LaurentPoly {
    LaurentPoly::monomial(nvars, ExpVec(vec![1; nvars]), BigRational::one())
}

pub fn saturated_model(rows: &[Vec<LaurentPoly>], nvars: usize, rank: usize) -> SatModel {
    let tracked = Tracked::from_laurent_rows(rows, nvars);
    let sat = saturate_tracked(tracked, &all_vars_product(nvars), rank, nvars);
    let gb = buchberger(&sat.gens, &ModOrder::grevlex_top(), true);
    // compose: gb element = sum poly_cofactor * sat.gens, sat gen = Laurent comb of rows
    let expr = gb
        .expr
        .as_ref()
        .unwrap()
        .iter()
        .map(|coefs| {
            let mut e = vec![LaurentPoly::zero(nvars); rows.len()];
            for (c, sat_expr) in coefs.iter().zip(&sat.expr) {
                if c.is_zero() {
                    continue;
                }
                for (ev, bv) in e.iter_mut().zip(sat_expr) {
                    *ev = ev.add(&c.mul(bv));
                }
            }
            e
        })
        .collect();
    SatModel {
        gb,
        expr,
        nvars,
        rank,
    }
}

impl SatModel {
    /// Laurent-span membership of a row vector.
    pub fn member(&self, row: &[LaurentPoly]) -> bool {
        let v = ModVec::new(row.to_vec());
        match v.clear() {
            None => true, // zero vector
            Some((cleared, _)) => self.gb.contains(&cleared),
        }
    }

    /// Membership with an explicit Laurent cofactor row `F` such that
    /// `row = sum_j F_j * original_row_j`.
    pub fn member_witness(&self, row: &[LaurentPoly]) -> Option<Vec<LaurentPoly>> {
        let n_orig = self.expr.first().map(|e| e.len()).unwrap_or(0);
        let v = ModVec::new(row.to_vec());
        let Some((cleared, mu)) = v.clear() else {
            return Some(vec![LaurentPoly::zero(self.nvars); n_orig]);
        };
        let nf = self.gb.reduce(&cleared);
        if !nf.remainder.is_zero() {
            return None;
        }
        let shift_back = mu.neg();
        let mut out = vec![LaurentPoly::zero(self.nvars); n_orig];
        for (c, e) in nf.cofactors.iter().zip(&self.expr) {
            if c.is_zero() {
                continue;
            }
            for (ov, bv) in out.iter_mut().zip(e) {
                *ov = ov.add(&c.mul(bv).shift(&shift_back));
            }
        }
        Some(out)
    }
}

/// Untracked saturation of polynomial module generators.
pub fn saturate_rows(gens: Vec<ModVec>, g: &LaurentPoly, q: usize, nvars: usize) -> Vec<ModVec> {
    let n = gens.len();
    let tracked = Tracked {
        gens,
        expr: vec![Vec::new(); n],
        n_orig: 0,
    };
    saturate_tracked(tracked, g, q, nvars).gens
}

/// Generators of the elements of the Laurent span of `rows` that are free
/// of the listed variables (saturate, block-eliminate, filter). Output rows
/// keep the full variable count.
pub fn eliminate_vars(
    rows: &[Vec<LaurentPoly>],
    nvars: usize,
    rank: usize,
    vars: &[usize],
) -> Vec<Vec<LaurentPoly>> {
    let tracked = Tracked::from_laurent_rows(rows, nvars);
    let sat = saturate_rows(tracked.gens, &all_vars_product(nvars), rank, nvars);
    let order = ModOrder {
        base: super::order::BaseOrder::elim_set(nvars, vars),
        rule: super::order::PositionRule::TermOverPosition,
    };
    let gb = buchberger(&sat, &order, false);
    gb.gens
        .iter()
        .filter(|g| {
            g.comps()
                .iter()
                .all(|p| vars.iter().all(|&v| !p.involves_var(v)))
        })
        .map(|g| g.comps().to_vec())
        .collect()
}

/// Contraction to the subring in the first `d` variables: generators of the
/// set of elements of the Laurent span of `rows` that are free of variables
/// `d+1..n`, returned over `d` variables.
pub fn contract_rows(
    rows: &[Vec<LaurentPoly>],
    nvars: usize,
    rank: usize,
    d: usize,
) -> Vec<Vec<LaurentPoly>> {
    assert!(d <= nvars);
    let vars: Vec<usize> = (d..nvars).collect();
    eliminate_vars(rows, nvars, rank, &vars)
        .into_iter()
        .map(|r| r.into_iter().map(|p| p.project_vars(d)).collect())
        .collect()
}

/// Exact intersection of two Laurent ideals (scalar spans) over `nvars`
/// variables, via the auxiliary-variable construction `t*a + (1-t)*b`.
pub fn intersect_ideals(a: &[LaurentPoly], b: &[LaurentPoly], nvars: usize) -> Vec<LaurentPoly> {
    let sat_of = |gens: &[LaurentPoly]| -> Vec<ModVec> {
        let rows: Vec<Vec<LaurentPoly>> = gens.iter().map(|p| vec![p.clone()]).collect();
        let tracked = Tracked::from_laurent_rows(&rows, nvars);
        saturate_rows(tracked.gens, &all_vars_product(nvars), 1, nvars)
    };
    let sa = sat_of(a);
    let sb = sat_of(b);
    if sa.is_empty() || sb.is_empty() {
        return Vec::new();
    }
    let t = LaurentPoly::var(nvars + 1, nvars);
    let one_minus_t = LaurentPoly::one(nvars + 1).sub(&t);
    let mut j = Vec::new();
    for v in &sa {
        j.push(ModVec::new(vec![v.comp(0).extend_vars(1).mul(&t)]));
    }
    for v in &sb {
        j.push(ModVec::new(vec![v
            .comp(0)
            .extend_vars(1)
            .mul(&one_minus_t)]));
    }
    let order = ModOrder::elim_top(nvars + 1, nvars);
    let gb = buchberger(&j, &order, false);
    gb.gens
        .iter()
        .filter(|g| g.free_of_vars_from(nvars))
        .map(|g| g.comp(0).project_vars(nvars))
        .collect()
}

/// Colon of a Laurent span by a single element: generators of
/// `{ v : g * v in span(rows) }` over the Laurent ring.
pub fn colon_by_element(
    rows: &[Vec<LaurentPoly>],
    g: &LaurentPoly,
    nvars: usize,
    rank: usize,
) -> Vec<Vec<LaurentPoly>> {
    assert!(!g.is_zero());
    // stack [g*e_1 .. g*e_rank ; rows] and read Laurent syzygies
    let mut stack: Vec<Vec<LaurentPoly>> = (0..rank)
        .map(|i| {
            let mut r = vec![LaurentPoly::zero(nvars); rank];
            r[i] = g.clone();
            r
        })
        .collect();
    stack.extend(rows.iter().cloned());
    let syz = syzygies_laurent(&stack);
    syz.into_iter()
        .map(|s| s[..rank].to_vec())
        .filter(|v| v.iter().any(|p| !p.is_zero()))
        .collect()
}

/// Normal-form remainder wrapper used by callers that think in rows.
pub fn row_normal_form(f: &[LaurentPoly], gb: &Groebner) -> Vec<LaurentPoly> {
    normal_form(&ModVec::new(f.to_vec()), &gb.gens, &gb.order)
        .remainder
        .into_comps()
}
