//! First-order realization of a strongly relevant system: integrality
//! certificates, the parallelepiped generating set, companion matrices,
//! the matrix of relations, the output matrix, E-lifts, the realization
//! membership test, and the latent-variable export.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::behavior::EquationModule;
use crate::dnnl::{IntegralityCertificate, NormalizationResult};
use crate::error::PipelineError;
use crate::groebner::{eliminate_vars, saturated_model, syzygies_laurent, SatModel};
use crate::laurent::{ExpVec, LaurentMatrix, LaurentPoly};

/// One generator of the quotient module over the small ring: a monomial in
/// the big variables times a standard basis vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    /// Exponents over the full ring; zero on the first `d` variables.
    pub exp: ExpVec,
    /// Index of the standard basis vector it multiplies.
    pub basis: usize,
}

/// The realization tuple `(d, gamma, generators, X, A_1.., C, certificates)`
/// together with the transformed system it presents.
pub struct FirstOrderRealization {
    pub n: usize,
    pub q: usize,
    pub d: usize,
    pub gamma: usize,
    pub generators: Vec<Generator>,
    /// Relation matrix over the small ring (delta x gamma, nvars = d).
    pub x: LaurentMatrix,
    /// Companion matrices over the small ring (gamma x gamma, nvars = d).
    pub a: Vec<LaurentMatrix>,
    pub a_inv: Vec<LaurentMatrix>,
    /// Output matrix (q x gamma, nvars = d).
    pub c: LaurentMatrix,
    pub certificates: Vec<IntegralityCertificate>,
    /// The (already normalized) system being realized.
    pub system: EquationModule,
    x_model: OnceLock<Arc<SatModel>>,
    power_cache: Mutex<HashMap<(usize, i64), Arc<LaurentMatrix>>>,
}

impl std::fmt::Debug for FirstOrderRealization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FirstOrderRealization")
            .field("n", &self.n)
            .field("q", &self.q)
            .field("d", &self.d)
            .field("gamma", &self.gamma)
            .finish()
    }
}

/// Validate flow candidates and fill the gaps by fresh extraction from the
/// annihilator ideal. `ann` is scalar (an ideal over the full ring).
pub(crate) fn finalize_certificates(
    ann: &EquationModule,
    d: usize,
    bound: Option<usize>,
    candidates: &[Option<LaurentPoly>],
) -> Result<Vec<IntegralityCertificate>, PipelineError> {
    let n = ann.nvars();
    let mut out = Vec::new();
    for var in d..n {
        if let Some(p) = candidates.get(var).and_then(|c| c.clone()) {
            let coeffs = p.coeffs_in_var(var);
            let degree = coeffs.keys().last().copied().unwrap_or(0) as usize;
            let cert = IntegralityCertificate {
                var,
                poly: p,
                degree,
            };
            if cert.well_formed(d) && cert.contained_in(ann) {
                out.push(cert);
                continue;
            }
        }
        out.push(extract_single(ann, d, var, bound)?);
    }
    Ok(out)
}

/// Find, for each big variable, a monic certificate with unit trailing
/// coefficient inside the annihilator of the quotient module. Errors with
/// the strong-relevance failure when none exists within the bound.
pub fn extract_certificates(
    sys: &EquationModule,
    d: usize,
    bound: Option<usize>,
) -> Result<Vec<IntegralityCertificate>, PipelineError> {
    let ann = sys.annihilator();
    if ann.is_zero_span() {
        return Err(PipelineError::NotAutonomous);
    }
    let none = vec![None; sys.nvars()];
    finalize_certificates(&ann, d, bound, &none)
}

fn extract_single(
    ann: &EquationModule,
    d: usize,
    var: usize,
    bound: Option<usize>,
) -> Result<IntegralityCertificate, PipelineError> {
    let n = ann.nvars();
    let others: Vec<usize> = (d..n).filter(|&v| v != var).collect();
    let elim = eliminate_vars(ann.rows(), n, 1, &others);
    let gens: Vec<LaurentPoly> = elim.into_iter().map(|r| r[0].clone()).collect();

    // scan basis elements, normalized so the lowest power of the variable is 0
    let mut best: Option<(usize, usize, LaurentPoly)> = None;
    for g in &gens {
        if g.is_zero() {
            continue;
        }
        let coeffs = g.coeffs_in_var(var);
        let (&lo, _) = coeffs.first_key_value().unwrap();
        let (&hi, ctop) = coeffs.last_key_value().unwrap();
        if hi == lo {
            continue;
        }
        let c0 = coeffs.get(&lo).unwrap();
        if !c0.is_unit() || !ctop.is_unit() {
            continue;
        }
        let mut shift = ExpVec::zeros(n);
        shift.0[var] = -lo;
        let p = g.shift(&shift).mul(&ctop.unit_inverse().unwrap());
        let degree = (hi - lo) as usize;
        let key = (degree, p.num_terms());
        if best
            .as_ref()
            .map(|(bd, bt, bp)| {
                key < (*bd, *bt) || (key == (*bd, *bt) && p.to_string() < bp.to_string())
            })
            .unwrap_or(true)
        {
            best = Some((degree, p.num_terms(), p));
        }
    }
    if let Some((degree, _, poly)) = best {
        let cert = IntegralityCertificate { var, poly, degree };
        debug_assert!(cert.well_formed(d) && cert.contained_in(ann));
        return Ok(cert);
    }

    // bounded linear-algebra search for a monic combination with a unit tail
    let default_bound = gens
        .iter()
        .map(|g| g.cleared_total_degree() as usize)
        .max()
        .unwrap_or(1)
        .max(1)
        * 2;
    let b = bound.unwrap_or(default_bound);
    if let Some(cert) = search_certificate(ann, &gens, d, var, b) {
        return Ok(cert);
    }
    Err(PipelineError::NotStronglyRelevant {
        var: var + 1,
        d,
        bound: b,
    })
}

/// Search for `p = y^L + a_{L-1} y^{L-1} + ... + a_1 y + c sigma^{mu0}` in
/// the eliminated ideal, with the `a_j` supported on a bounded exponent
/// window of the small variables. Membership is a linear condition through
/// the normal form, so each `(L, mu0)` choice is an exact linear solve.
pub(crate) fn search_certificate(
    ann: &EquationModule,
    elim_gens: &[LaurentPoly],
    d: usize,
    var: usize,
    bound: usize,
) -> Option<IntegralityCertificate> {
    let n = ann.nvars();
    if elim_gens.is_empty() {
        return None;
    }
    let model = saturated_model(
        &elim_gens
            .iter()
            .map(|g| vec![g.clone()])
            .collect::<Vec<_>>(),
        n,
        1,
    );
    let window = small_var_window(n, d, bound as i64);
    if window.len() > 2048 {
        return None;
    }
    // clearing shift: make every candidate monomial polynomial
    let mut shift = ExpVec::zeros(n);
    for v in 0..d {
        shift.0[v] = bound as i64;
    }
    let nf_of = |e: &ExpVec| -> LaurentPoly {
        let m = LaurentPoly::monomial(n, e.add(&shift), BigRational::one());
        crate::groebner::row_normal_form(&[m], &model.gb)[0].clone()
    };
    for l in 1..=bound {
        // fixed part: y^L
        let mut e_top = ExpVec::zeros(n);
        e_top.0[var] = l as i64;
        let nf_top = nf_of(&e_top);
        // unknown columns: (j, mu) for 1 <= j < L over the window, plus the tail
        let mut cols: Vec<(usize, ExpVec)> = Vec::new();
        for j in 1..l {
            for mu in &window {
                let mut e = mu.clone();
                e.0[var] = j as i64;
                cols.push((j, e));
            }
        }
        for mu0 in &window {
            let mut all_cols = cols.clone();
            all_cols.push((0, mu0.clone()));
            let nfs: Vec<LaurentPoly> = all_cols.iter().map(|(_, e)| nf_of(e)).collect();
            // index the monomials appearing in any normal form
            let mut index: BTreeMap<ExpVec, usize> = BTreeMap::new();
            for p in nfs.iter().chain(std::iter::once(&nf_top)) {
                for (e, _) in p.terms() {
                    let next = index.len();
                    index.entry(e.clone()).or_insert(next);
                }
            }
            let rows = index.len();
            if rows == 0 {
                // everything already reduces to zero; tail coefficient 1 works
                let mut p = LaurentPoly::monomial(n, e_top.clone(), BigRational::one());
                let mut e0 = mu0.clone();
                e0.0[var] = 0;
                p = p.add(&LaurentPoly::monomial(n, e0, BigRational::one()));
                let cert = IntegralityCertificate {
                    var,
                    poly: p,
                    degree: l,
                };
                if cert.well_formed(d) && cert.contained_in(ann) {
                    return Some(cert);
                }
                continue;
            }
            let ncols = all_cols.len();
            let mut mat = vec![vec![BigRational::zero(); ncols]; rows];
            let mut rhs = vec![BigRational::zero(); rows];
            for (ci, p) in nfs.iter().enumerate() {
                for (e, c) in p.terms() {
                    mat[index[e]][ci] = c.clone();
                }
            }
            for (e, c) in nf_top.terms() {
                rhs[index[e]] = -c.clone();
            }
            let Some(sol) = crate::linalg::solve(&mat, &rhs, ncols) else {
                continue;
            };
            // the tail coefficient must be nonzero; adjust by a nullspace
            // direction when the particular solution leaves it zero
            let tail_idx = ncols - 1;
            let mut x = sol;
            if x[tail_idx].is_zero() {
                let ns = crate::linalg::nullspace(mat.clone(), ncols);
                if let Some(v) = ns.iter().find(|v| !v[tail_idx].is_zero()) {
                    for (xi, vi) in x.iter_mut().zip(v) {
                        *xi += vi;
                    }
                } else {
                    continue;
                }
            }
            let mut p = LaurentPoly::monomial(n, e_top.clone(), BigRational::one());
            for ((_, e), c) in all_cols.iter().zip(&x) {
                p = p.add(&LaurentPoly::monomial(n, e.clone(), c.clone()));
            }
            let cert = IntegralityCertificate {
                var,
                poly: p,
                degree: l,
            };
            if cert.well_formed(d) && cert.contained_in(ann) {
                return Some(cert);
            }
        }
    }
    None
}

fn small_var_window(n: usize, d: usize, bound: i64) -> Vec<ExpVec> {
    let mut out = vec![ExpVec::zeros(n)];
    for v in 0..d {
        let mut next = Vec::new();
        for e in &out {
            for k in -bound..=bound {
                let mut e2 = e.clone();
                e2.0[v] = k;
                next.push(e2);
            }
        }
        out = next;
    }
    out
}

/// The parallelepiped generating set: monomials with exponents below each
/// certificate degree, basis index outermost, first big variable fastest.
pub fn build_generating_set(
    certs: &[IntegralityCertificate],
    n: usize,
    q: usize,
) -> Vec<Generator> {
    let mut sorted = certs.to_vec();
    sorted.sort_by_key(|c| c.var);
    let sizes: Vec<usize> = sorted.iter().map(|c| c.degree).collect();
    let count: usize = sizes.iter().product();
    let mut out = Vec::with_capacity(q * count);
    for basis in 0..q {
        for idx in 0..count {
            let mut rem = idx;
            let mut exp = ExpVec::zeros(n);
            for (c, &l) in sorted.iter().zip(&sizes) {
                exp.0[c.var] = (rem % l) as i64;
                rem /= l;
            }
            out.push(Generator { exp, basis });
        }
    }
    out
}

/// Reduce a scalar polynomial in the big variables (coefficients over the
/// small ring) into the span of the parallelepiped monomials, by two-sided
/// division against the certificates. The result maps each parallelepiped
/// exponent to its coefficient over the small ring.
fn reduce_scalar(
    h: &LaurentPoly,
    certs: &[IntegralityCertificate],
) -> BTreeMap<ExpVec, LaurentPoly> {
    let n = h.nvars();
    let mut work = h.clone();
    let mut sorted = certs.to_vec();
    sorted.sort_by_key(|c| c.var);
    for cert in &sorted {
        let var = cert.var;
        let l = cert.degree as i64;
        let coeffs = cert.coeffs();
        let a0 = coeffs.get(&0).unwrap().clone();
        let a0_inv = a0.unit_inverse().unwrap();
        loop {
            // highest out-of-range exponent first
            let hit = work
                .terms()
                .filter(|(e, _)| e.0[var] >= l)
                .max_by_key(|(e, _)| e.0[var])
                .map(|(e, c)| (e.clone(), c.clone()));
            let Some((e, c)) = hit else { break };
            // subtract c * sigma^{e - L e_var} * p
            let mut shift = e.clone();
            shift.0[var] -= l;
            work = work.sub(&cert.poly.mul_term(&shift, &c));
        }
        loop {
            let hit = work
                .terms()
                .filter(|(e, _)| e.0[var] < 0)
                .min_by_key(|(e, _)| e.0[var])
                .map(|(e, c)| (e.clone(), c.clone()));
            let Some((e, c)) = hit else { break };
            // subtract c * a0^{-1} * sigma^{e} * p  (kills the a0-term at e)
            let m = LaurentPoly::monomial(n, e, c).mul(&a0_inv);
            work = work.sub(&cert.poly.mul(&m));
        }
    }
    // group by big-variable exponent pattern
    let mut spanned: BTreeMap<ExpVec, LaurentPoly> = BTreeMap::new();
    let small_mask: Vec<bool> = {
        let mut m = vec![true; n];
        for c in &sorted {
            m[c.var] = false;
        }
        m
    };
    for (e, c) in work.terms() {
        let mut big = ExpVec::zeros(n);
        let mut small = ExpVec::zeros(n);
        for v in 0..n {
            if small_mask[v] {
                small.0[v] = e.0[v];
            } else {
                big.0[v] = e.0[v];
            }
        }
        let entry = spanned.entry(big).or_insert_with(|| LaurentPoly::zero(n));
        *entry = entry.add(&LaurentPoly::monomial(n, small, c.clone()));
    }
    spanned
}

/// Reduce a row vector over the full ring to a coefficient row of length
/// `gamma` over the small ring (returned over the full ring; every entry is
/// free of big variables).
pub fn reduce_to_span(
    row: &[LaurentPoly],
    certs: &[IntegralityCertificate],
    gens: &[Generator],
) -> Vec<LaurentPoly> {
    let n = row[0].nvars();
    let gamma = gens.len();
    let mut out = vec![LaurentPoly::zero(n); gamma];
    let index_of: HashMap<(usize, ExpVec), usize> = gens
        .iter()
        .enumerate()
        .map(|(i, g)| ((g.basis, g.exp.clone()), i))
        .collect();
    for (j, h) in row.iter().enumerate() {
        if h.is_zero() {
            continue;
        }
        for (big, coeff) in reduce_scalar(h, certs) {
            let idx = *index_of
                .get(&(j, big))
                .expect("reduced exponent lies on the parallelepiped");
            out[idx] = out[idx].add(&coeff);
        }
    }
    out
}

/// Companion matrices: row k of `A_j` expresses `sigma_{d+j} * g_k` over the
/// generating set. Each matrix must come out unimodular over the small ring.
pub fn companion_matrices(
    gens: &[Generator],
    certs: &[IntegralityCertificate],
    n: usize,
    q: usize,
    d: usize,
) -> Result<Vec<LaurentMatrix>, PipelineError> {
    let gamma = gens.len();
    let mut out = Vec::new();
    for j in 0..n - d {
        let var = d + j;
        let mut rows = Vec::with_capacity(gamma);
        for g in gens {
            let mut row_vec = vec![LaurentPoly::zero(n); q];
            let mut e = g.exp.clone();
            e.0[var] += 1;
            row_vec[g.basis] = LaurentPoly::monomial(n, e, BigRational::one());
            let coeffs = reduce_to_span(&row_vec, certs, gens);
            rows.push(coeffs.into_iter().map(|p| p.project_vars(d)).collect());
        }
        let a = LaurentMatrix::from_rows(d, rows);
        let det = a.det().map_err(PipelineError::Ring)?;
        if !det.is_unit() {
            return Err(PipelineError::RelationsNotInvariant(format!(
                "companion matrix for s{} has non-unit determinant {}",
                var + 1,
                det
            )));
        }
        out.push(a);
    }
    Ok(out)
}

/// The matrix of relations: syzygies of the stacked generator lifts over
/// the equation rows, projected to the generator block and contracted to
/// the small ring.
pub fn matrix_of_relations(sys: &EquationModule, gens: &[Generator], d: usize) -> LaurentMatrix {
    let n = sys.nvars();
    let q = sys.q();
    let gamma = gens.len();
    let mut stack: Vec<Vec<LaurentPoly>> = gens
        .iter()
        .map(|g| {
            let mut row = vec![LaurentPoly::zero(n); q];
            row[g.basis] = LaurentPoly::monomial(n, g.exp.clone(), BigRational::one());
            row
        })
        .collect();
    stack.extend(sys.rows().iter().cloned());
    let syz = syzygies_laurent(&stack);
    let projected: Vec<Vec<LaurentPoly>> = syz
        .into_iter()
        .map(|s| s[..gamma].to_vec())
        .filter(|r| r.iter().any(|p| !p.is_zero()))
        .collect();
    let contracted = crate::groebner::contract_rows(&projected, n, gamma, d);
    if contracted.is_empty() {
        LaurentMatrix::empty(d, gamma)
    } else {
        LaurentMatrix::from_rows(d, contracted)
    }
}

/// The output matrix: a 0/1 selection picking the generator `1 * e_i` for
/// each basis index (the parallelepiped always contains the monomial 1).
pub fn output_matrix(gens: &[Generator], n: usize, q: usize, d: usize) -> LaurentMatrix {
    let gamma = gens.len();
    let mut rows = vec![vec![LaurentPoly::zero(d); gamma]; q];
    for i in 0..q {
        let idx = gens
            .iter()
            .position(|g| g.basis == i && g.exp == ExpVec::zeros(n))
            .expect("generating set contains the monomial 1 for every basis index");
        rows[i][idx] = LaurentPoly::one(d);
    }
    LaurentMatrix::from_rows(d, rows)
}

impl FirstOrderRealization {
    /// Build the realization of an (already strongly relevant) system at
    /// level `d` with the given certificates.
    pub fn build(
        sys: &EquationModule,
        d: usize,
        certificates: Vec<IntegralityCertificate>,
    ) -> Result<Self, PipelineError> {
        let n = sys.nvars();
        let q = sys.q();
        if d >= n || certificates.len() != n - d {
            return Err(PipelineError::NotAutonomous);
        }
        // certificates may come from an external artifact; validate the
        // shape before dividing by their coefficients
        let mut vars: Vec<usize> = certificates.iter().map(|c| c.var).collect();
        vars.sort_unstable();
        let expected: Vec<usize> = (d..n).collect();
        if vars != expected {
            return Err(PipelineError::NormalizationIncomplete {
                d,
                detail: "certificates do not cover the variables beyond the level".into(),
            });
        }
        for c in &certificates {
            if !c.well_formed(d) {
                return Err(PipelineError::NormalizationIncomplete {
                    d,
                    detail: format!(
                        "certificate for s{} is not monic with a unit tail",
                        c.var + 1
                    ),
                });
            }
        }
        let gens = build_generating_set(&certificates, n, q);
        let a = companion_matrices(&gens, &certificates, n, q, d)?;
        let a_inv: Result<Vec<_>, _> = a.iter().map(|m| m.adjugate_inverse()).collect();
        let a_inv = a_inv.map_err(PipelineError::Ring)?;
        let x = matrix_of_relations(sys, &gens, d);
        let c = output_matrix(&gens, n, q, d);
        Ok(FirstOrderRealization {
            n,
            q,
            d,
            gamma: gens.len(),
            generators: gens,
            x,
            a,
            a_inv,
            c,
            certificates,
            system: sys.clone(),
            x_model: OnceLock::new(),
            power_cache: Mutex::new(HashMap::new()),
        })
    }

    /// Build from a normalization result (realizes the transformed system).
    pub fn from_normalization(norm: &NormalizationResult) -> Result<Self, PipelineError> {
        Self::build(&norm.transformed, norm.d, norm.certificates.clone())
    }

    /// Saturated model of the row span of X over the small ring.
    pub fn x_model(&self) -> Arc<SatModel> {
        self.x_model
            .get_or_init(|| Arc::new(saturated_model(&self.x.rows_vec(), self.d, self.gamma)))
            .clone()
    }

    /// `A_j^e` with exact negative powers via the stored ring inverses;
    /// memoized per (j, e).
    pub fn companion_power(&self, j: usize, e: i64) -> Arc<LaurentMatrix> {
        if let Some(m) = self.power_cache.lock().unwrap().get(&(j, e)) {
            return m.clone();
        }
        let m = Arc::new(
            self.a[j]
                .pow_signed(&self.a_inv[j], e)
                .expect("companion powers are square"),
        );
        self.power_cache.lock().unwrap().insert((j, e), m.clone());
        m
    }

    /// Product `C * prod_j A_j^{tail_j}` for a tail of big-variable shifts.
    pub fn output_operator(&self, tail: &[i64]) -> LaurentMatrix {
        assert_eq!(tail.len(), self.n - self.d);
        let mut m = self.c.clone();
        for (j, &e) in tail.iter().enumerate() {
            if e != 0 {
                m = m.mul(&self.companion_power(j, e)).unwrap();
            }
        }
        m
    }

    /// Product `prod_j A_j^{tail_j}` alone (the state flow operator).
    pub fn state_operator(&self, tail: &[i64]) -> LaurentMatrix {
        assert_eq!(tail.len(), self.n - self.d);
        let mut m = LaurentMatrix::identity(self.d, self.gamma);
        for (j, &e) in tail.iter().enumerate() {
            if e != 0 {
                m = m.mul(&self.companion_power(j, e)).unwrap();
            }
        }
        m
    }

    /// The expression of Lemma-style membership: map a row vector over the
    /// full ring to its presentation in the small free module.
    pub fn present(&self, row: &[LaurentPoly]) -> Vec<LaurentPoly> {
        assert_eq!(row.len(), self.q);
        let mut acc = LaurentMatrix::zero(self.d, 1, self.gamma);
        for (j, f) in row.iter().enumerate() {
            for (e, coeff) in f.terms() {
                let head = ExpVec(e.0[..self.d].to_vec());
                let tail: Vec<i64> = e.0[self.d..].to_vec();
                let mut cj = LaurentMatrix::from_rows(self.d, vec![self.c.row(j)]);
                for (jj, &ee) in tail.iter().enumerate() {
                    if ee != 0 {
                        cj = cj.mul(&self.companion_power(jj, ee)).unwrap();
                    }
                }
                let scaled = cj.map(|p| p.mul_term(&head, coeff));
                acc = acc.add(&scaled).unwrap();
            }
        }
        acc.row(0)
    }

    /// Membership test through the realization: true iff the presentation
    /// of `row` lies in the row span of X, with a witness cofactor row.
    pub fn member_test(&self, row: &[LaurentPoly]) -> (bool, Option<Vec<LaurentPoly>>) {
        let v = self.present(row);
        if v.iter().all(|p| p.is_zero()) {
            return (true, Some(vec![LaurentPoly::zero(self.d); self.x.nrows()]));
        }
        if self.x.nrows() == 0 {
            return (false, None);
        }
        match self.x_model().member_witness(&v) {
            Some(w) => (true, Some(w)),
            None => (false, None),
        }
    }

    /// For each companion matrix, the E-lift with `X * A_j = E_j * X`.
    /// Fails when a row of `X * A_j` does not divide over the span of X.
    pub fn lift_through_relations(&self) -> Result<Vec<LaurentMatrix>, PipelineError> {
        let mut out = Vec::new();
        for (j, a) in self.a.iter().enumerate() {
            if self.x.nrows() == 0 {
                out.push(LaurentMatrix::empty(self.d, 0));
                continue;
            }
            let xa = self.x.mul(a).map_err(PipelineError::Ring)?;
            let mut rows = Vec::new();
            for i in 0..xa.nrows() {
                let w = self.x_model().member_witness(&xa.row(i)).ok_or_else(|| {
                    PipelineError::RelationsNotInvariant(format!(
                        "row {} of X*A_{} leaves a remainder",
                        i + 1,
                        j + 1
                    ))
                })?;
                rows.push(w);
            }
            let e = LaurentMatrix::from_rows(self.d, rows);
            debug_assert_eq!(e.mul(&self.x).unwrap(), xa);
            out.push(e);
        }
        Ok(out)
    }

    /// The latent-variable block matrix `[X 0; sigma_{d+i} I - A_i 0; -C I]`
    /// over the full ring.
    pub fn export_latent(&self) -> LaurentMatrix {
        let n = self.n;
        let d = self.d;
        let gamma = self.gamma;
        let q = self.q;
        let x_full = self.x.extend_vars(n - d);
        let zero_right = LaurentMatrix::zero(n, x_full.nrows(), q);
        let mut m = x_full.hstack(&zero_right).unwrap();
        for (i, a) in self.a.iter().enumerate() {
            let var = LaurentPoly::var(n, d + i);
            let block = LaurentMatrix::identity(n, gamma)
                .scale(&var)
                .sub(&a.extend_vars(n - d))
                .unwrap();
            let block = block.hstack(&LaurentMatrix::zero(n, gamma, q)).unwrap();
            m = m.vstack(&block).unwrap();
        }
        let bottom = self
            .c
            .extend_vars(n - d)
            .map(|p| p.neg())
            .hstack(&LaurentMatrix::identity(n, q))
            .unwrap();
        m.vstack(&bottom).unwrap()
    }
}
