//! Discrete Noether normalization: Z-unimodular coordinate changes of the
//! lattice, the induced ring and module maps, single-polynomial
//! normalization, the step-down recursion, and the full flow driver with
//! integrality certificates carried through.

use crate::behavior::EquationModule;
use crate::error::{PipelineError, RingError};
use crate::laurent::{ExpVec, LaurentMatrix, LaurentPoly};
use crate::linalg::{int_det, unimodular_inverse};

/// An n-by-n integer matrix with determinant +-1, acting on exponent
/// vectors as `nu -> T nu` and on the ring by `sigma^nu -> sigma^{T nu}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnimodularTransform {
    mat: Vec<Vec<i64>>,
    inv: Vec<Vec<i64>>,
}

impl UnimodularTransform {
    pub fn new(mat: Vec<Vec<i64>>) -> Result<Self, RingError> {
        let n = mat.len();
        if mat.iter().any(|r| r.len() != n) {
            return Err(RingError::DimMismatch("transform must be square".into()));
        }
        let inv = unimodular_inverse(&mat).ok_or(RingError::NotUnimodular)?;
        Ok(UnimodularTransform { mat, inv })
    }

    pub fn identity(n: usize) -> Self {
        let mat: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
            .collect();
        UnimodularTransform {
            inv: mat.clone(),
            mat,
        }
    }

    /// Lower-triangular transform with unit diagonal and last row
    /// `(t_1, ..., t_{n-1}, 1)`.
    pub fn shear_last_row(t: &[i64]) -> Self {
        let n = t.len() + 1;
        let mut mat = Self::identity(n).mat;
        for (j, &tj) in t.iter().enumerate() {
            mat[n - 1][j] = tj;
        }
        Self::new(mat).expect("triangular with unit diagonal is unimodular")
    }

    /// `blockdiag(self, I_extra)`.
    pub fn block_diag(&self, extra: usize) -> Self {
        let k = self.n();
        let n = k + extra;
        let mut mat = Self::identity(n).mat;
        for i in 0..k {
            for j in 0..k {
                mat[i][j] = self.mat[i][j];
            }
        }
        Self::new(mat).unwrap()
    }

    pub fn n(&self) -> usize {
        self.mat.len()
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.mat
    }

    pub fn det(&self) -> i64 {
        i64::try_from(&int_det(&self.mat)).unwrap()
    }

    pub fn inverse(&self) -> Self {
        UnimodularTransform {
            mat: self.inv.clone(),
            inv: self.mat.clone(),
        }
    }

    /// `self * other` as matrices, so `phi_{self.compose(other)} =
    /// phi_self after phi_other`.
    pub fn compose(&self, other: &Self) -> Self {
        let n = self.n();
        assert_eq!(n, other.n());
        let mut mat = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in 0..n {
                mat[i][j] = (0..n).map(|k| self.mat[i][k] * other.mat[k][j]).sum();
            }
        }
        Self::new(mat).expect("product of unimodular matrices is unimodular")
    }

    pub fn is_identity(&self) -> bool {
        let n = self.n();
        (0..n).all(|i| (0..n).all(|j| self.mat[i][j] == i64::from(i == j)))
    }

    pub fn apply_exp(&self, nu: &ExpVec) -> ExpVec {
        let n = self.n();
        assert_eq!(nu.len(), n);
        ExpVec(
            (0..n)
                .map(|i| (0..n).map(|j| self.mat[i][j] * nu.0[j]).sum())
                .collect(),
        )
    }

    /// The ring automorphism: re-key every term by `nu -> T nu`.
    pub fn phi_poly(&self, f: &LaurentPoly) -> LaurentPoly {
        assert_eq!(f.nvars(), self.n());
        let mut out = LaurentPoly::zero(f.nvars());
        for (e, c) in f.terms() {
            out = out.add(&LaurentPoly::monomial(
                f.nvars(),
                self.apply_exp(e),
                c.clone(),
            ));
        }
        out
    }

    pub fn phi_row(&self, row: &[LaurentPoly]) -> Vec<LaurentPoly> {
        row.iter().map(|p| self.phi_poly(p)).collect()
    }

    pub fn phi_matrix(&self, m: &LaurentMatrix) -> LaurentMatrix {
        m.map(|p| self.phi_poly(p))
    }

    /// The module map: entry-wise ring automorphism on the rows.
    pub fn phi_module(&self, sys: &EquationModule) -> EquationModule {
        let rows = sys.rows().iter().map(|r| self.phi_row(r)).collect();
        EquationModule::new(sys.nvars(), sys.q(), rows).unwrap()
    }
}

/// One integrality certificate: `p = sigma_i^L + a_{L-1} sigma_i^{L-1} +
/// ... + a_0` with coefficients over the small ring and `a_0` a unit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegralityCertificate {
    /// 0-based full-ring variable index (in `d..n`).
    pub var: usize,
    /// Monic polynomial in `sigma_{var+1}` over the first `d` variables,
    /// stored over the full ring.
    pub poly: LaurentPoly,
    /// Degree in the certified variable.
    pub degree: usize,
}

impl IntegralityCertificate {
    /// Coefficient map: sigma_var-degree -> coefficient over the small ring.
    pub fn coeffs(&self) -> std::collections::BTreeMap<i64, LaurentPoly> {
        self.poly.coeffs_in_var(self.var)
    }

    /// Shape check: pure in `var` over the first `d` variables, monic with
    /// rational leading coefficient 1, trailing coefficient a unit.
    pub fn well_formed(&self, d: usize) -> bool {
        let n = self.poly.nvars();
        if self.var < d || self.var >= n {
            return false;
        }
        // no other big variable occurs
        for v in d..n {
            if v != self.var && self.poly.involves_var(v) {
                return false;
            }
        }
        let coeffs = self.coeffs();
        let Some((&lo, c0)) = coeffs.first_key_value() else {
            return false;
        };
        let Some((&hi, ctop)) = coeffs.last_key_value() else {
            return false;
        };
        lo == 0 && hi == self.degree as i64 && hi >= 1 && c0.is_unit() && ctop.is_one()
    }

    /// Membership of the certificate in the annihilator ideal.
    pub fn contained_in(&self, ann: &EquationModule) -> bool {
        ann.member(std::slice::from_ref(&self.poly))
    }
}

/// Output of the normalization flow.
#[derive(Clone, Debug)]
pub struct NormalizationResult {
    pub t: UnimodularTransform,
    pub d: usize,
    pub transformed: EquationModule,
    pub certificates: Vec<IntegralityCertificate>,
}

/// How the flow picks the element to normalize at each level.
#[derive(Clone, Copy, Debug)]
pub enum ElementSelection {
    /// Smallest cleared total degree, then fewest terms, then smallest
    /// leading monomial.
    Canonical,
    /// Seeded random pick among the basis generators (used to cross-check
    /// that the reported d does not depend on the path).
    Seeded(u64),
}

#[derive(Clone, Copy, Debug)]
pub struct NormalizeOptions {
    /// Bound for the minimal t-search (max absolute entry).
    pub t_bound: i64,
    /// Optional override for the certificate-combination degree bound.
    pub cert_bound: Option<usize>,
    pub selection: ElementSelection,
}

impl Default for NormalizeOptions {
    fn default() -> Self {
        NormalizeOptions {
            t_bound: 8,
            cert_bound: None,
            selection: ElementSelection::Canonical,
        }
    }
}

/// Deterministic fallback t-vector: mixed-radix base `2D+1` with `D` the
/// largest coordinate magnitude over the support; collision-free by digit
/// uniqueness.
pub fn fallback_t(f: &LaurentPoly) -> Vec<i64> {
    let n = f.nvars();
    let d_mag = f
        .support()
        .flat_map(|e| e.0.iter())
        .map(|v| v.abs())
        .max()
        .unwrap_or(0);
    let base = 2 * d_mag + 1;
    (0..n.saturating_sub(1))
        .map(|i| base.pow((n - 1 - i) as u32))
        .collect()
}

fn dots_distinct(f: &LaurentPoly, t: &[i64]) -> bool {
    let mut seen = std::collections::HashSet::new();
    for e in f.support() {
        let dot: i64 = t.iter().zip(&e.0).map(|(&a, &b)| a * b).sum::<i64>() + e.0[e.len() - 1];
        if !seen.insert(dot) {
            return false;
        }
    }
    true
}

/// Enumerate candidate t-vectors shell by shell: all `t` with max |t_i| = b
/// for b = 0, 1, ..., bound, each coordinate running through
/// 0, 1, -1, 2, -2, ...
fn minimal_t_search(f: &LaurentPoly, bound: i64) -> Option<Vec<i64>> {
    let k = f.nvars() - 1;
    if k == 0 {
        return Some(Vec::new());
    }
    let seq: Vec<i64> = std::iter::once(0)
        .chain((1..=bound).flat_map(|v| [v, -v]))
        .collect();
    for b in 0..=bound {
        let shell: Vec<i64> = seq.iter().copied().filter(|v| v.abs() <= b).collect();
        let mut idx = vec![0usize; k];
        loop {
            let t: Vec<i64> = idx.iter().map(|&i| shell[i]).collect();
            if t.iter().map(|v| v.abs()).max().unwrap() == b && dots_distinct(f, &t) {
                return Some(t);
            }
            // odometer increment
            let mut pos = k;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < shell.len() {
                    break;
                }
                idx[pos] = 0;
                if pos == 0 {
                    pos = usize::MAX;
                    break;
                }
            }
            if pos == usize::MAX {
                break;
            }
        }
    }
    None
}

/// Normalize a single nonzero polynomial: find a shear `T` so that the
/// terms of `phi_T(f)`, read in the last variable, have pairwise distinct
/// degrees (all coefficients over the smaller ring are then units).
/// Returns `(T, phi_T(f))`.
pub fn normalize_polynomial(
    f: &LaurentPoly,
    t_bound: i64,
) -> Result<(UnimodularTransform, LaurentPoly), PipelineError> {
    if f.is_zero() {
        return Err(PipelineError::Ring(RingError::ZeroInput));
    }
    let t = match minimal_t_search(f, t_bound) {
        Some(t) => t,
        None => {
            let t = fallback_t(f);
            debug_assert!(dots_distinct(f, &t));
            t
        }
    };
    let tr = if t.is_empty() && f.nvars() == 1 {
        UnimodularTransform::identity(1)
    } else {
        UnimodularTransform::shear_last_row(&t)
    };
    let image = tr.phi_poly(f);
    Ok((tr, image))
}

/// Candidate integrality certificate read off a normalized polynomial:
/// divide through by the unit coefficient of the highest power of the last
/// variable, then shift so the lowest power is zero.
fn candidate_from_normalized(g: &LaurentPoly, var: usize) -> Option<LaurentPoly> {
    let coeffs = g.coeffs_in_var(var);
    let (&hi, ctop) = coeffs.last_key_value()?;
    let (&lo, _) = coeffs.first_key_value()?;
    if hi == lo {
        return None; // single power: no monic relation of positive degree
    }
    let inv = ctop.unit_inverse().ok()?;
    let mut shift = ExpVec::zeros(g.nvars());
    shift.0[var] = -lo;
    Some(g.mul(&inv).shift(&shift))
}

fn select_element(gens: &[LaurentPoly], selection: ElementSelection) -> LaurentPoly {
    debug_assert!(!gens.is_empty());
    match selection {
        ElementSelection::Canonical => {
            let mut best: Option<&LaurentPoly> = None;
            for g in gens {
                let better = match best {
                    None => true,
                    Some(b) => {
                        let ka = (g.cleared_total_degree(), g.num_terms());
                        let kb = (b.cleared_total_degree(), b.num_terms());
                        ka < kb
                            || (ka == kb && {
                                // smaller grevlex leading monomial preferred
                                let (ga, _) = g.clear_to_polynomial().unwrap();
                                let (gb, _) = b.clear_to_polynomial().unwrap();
                                let la = ga
                                    .support()
                                    .max_by(|x, y| crate::laurent::cmp_grevlex(x, y))
                                    .unwrap()
                                    .clone();
                                let lb = gb
                                    .support()
                                    .max_by(|x, y| crate::laurent::cmp_grevlex(x, y))
                                    .unwrap()
                                    .clone();
                                crate::laurent::cmp_grevlex(&la, &lb) == std::cmp::Ordering::Less
                            })
                    }
                };
                if better {
                    best = Some(g);
                }
            }
            best.unwrap().clone()
        }
        ElementSelection::Seeded(seed) => {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            gens[rng.gen_range(0..gens.len())].clone()
        }
    }
}

/// Nonzero saturated basis generators of an ideal, used by the flow for
/// element selection.
fn basis_gens(ideal: &EquationModule) -> Vec<LaurentPoly> {
    ideal
        .sat_model()
        .gb
        .gens
        .iter()
        .map(|g| g.comp(0).clone())
        .filter(|p| !p.is_zero())
        .collect()
}

/// One step-down: normalize the intersection ideal `a ∩ A_d` inside the
/// smaller ring and embed the shear as `blockdiag(T~, I)`. `Ok(None)` means
/// the intersection is zero and the flow stops at this level.
pub fn step_down(
    a: &EquationModule,
    d: usize,
    opts: &NormalizeOptions,
) -> Result<Option<(UnimodularTransform, EquationModule)>, PipelineError> {
    let n = a.nvars();
    assert!(d >= 1 && d <= n);
    let inter = if d == n {
        a.clone()
    } else {
        a.contract_to_subring(d)
    };
    if inter.is_zero_span() {
        return Ok(None);
    }
    let f = select_element(&basis_gens(&inter), opts.selection);
    let (t_small, _) = normalize_polynomial(&f, opts.t_bound)?;
    let t = t_small.block_diag(n - d);
    Ok(Some((t.clone(), t.phi_module(a))))
}

/// Internal flow state shared by the ideal and module drivers.
struct FlowOutcome {
    t: UnimodularTransform,
    d: usize,
    transformed_ideal: EquationModule,
    candidates: Vec<Option<LaurentPoly>>,
}

fn run_flow(a: &EquationModule, opts: &NormalizeOptions) -> Result<FlowOutcome, PipelineError> {
    let n = a.nvars();
    assert_eq!(a.q(), 1, "the flow operates on ideals");
    if a.is_zero_span() {
        return Ok(FlowOutcome {
            t: UnimodularTransform::identity(n),
            d: n,
            transformed_ideal: a.clone(),
            candidates: vec![None; n],
        });
    }
    let mut t_total = UnimodularTransform::identity(n);
    let mut current = a.clone();
    let mut candidates: Vec<Option<LaurentPoly>> = vec![None; n];
    let mut level = n;
    let d = loop {
        // normalize an element of the current intersection ideal at `level`
        let inter = if level == n {
            current.clone()
        } else {
            current.contract_to_subring(level)
        };
        debug_assert!(!inter.is_zero_span());
        let f = select_element(&basis_gens(&inter), opts.selection);
        let (t_small, image) = normalize_polynomial(&f, opts.t_bound)?;
        let t_step = t_small.block_diag(n - level);
        current = t_step.phi_module(&current);
        t_total = t_step.compose(&t_total);
        for c in candidates.iter_mut().flatten() {
            *c = t_step.phi_poly(c);
        }
        candidates[level - 1] = candidate_from_normalized(&image.extend_vars(n - level), level - 1);

        let next = current.contract_to_subring(level - 1);
        if next.is_zero_span() {
            break level - 1;
        }
        if level == 1 {
            // nonzero constants: the unit ideal; the quotient is the zero
            // module and the flow bottoms out at d = 0
            break 0;
        }
        level -= 1;
    };
    Ok(FlowOutcome {
        t: t_total,
        d,
        transformed_ideal: current,
        candidates,
    })
}

/// Normalize an ideal per the flow chart: returns the composite transform,
/// the stopping level `d` (reported as the Krull dimension), the
/// transformed ideal, and a monic-unit certificate for every variable
/// beyond `d`.
pub fn dnnl_ideal(
    a: &EquationModule,
    opts: &NormalizeOptions,
) -> Result<NormalizationResult, PipelineError> {
    let flow = run_flow(a, opts)?;
    let certificates = crate::realization::finalize_certificates(
        &flow.transformed_ideal,
        flow.d,
        opts.cert_bound,
        &flow.candidates,
    )
    .map_err(|e| incomplete(flow.d, e))?;
    Ok(NormalizationResult {
        t: flow.t,
        d: flow.d,
        transformed: flow.transformed_ideal,
        certificates,
    })
}

/// A certificate that the flow guarantees to exist could not be produced
/// within the configured bound; surface the partial state.
fn incomplete(d: usize, e: PipelineError) -> PipelineError {
    match e {
        PipelineError::NotStronglyRelevant { var, bound, .. } => {
            PipelineError::NormalizationIncomplete {
                d,
                detail: format!(
                    "no certificate for s{} within degree bound {} (raise --cert-bound)",
                    var, bound
                ),
            }
        }
        other => other,
    }
}

/// Module-level normalization: run the flow on the annihilator ideal and
/// apply the induced module map to the equation module.
pub fn dnnl_module(
    sys: &EquationModule,
    opts: &NormalizeOptions,
) -> Result<NormalizationResult, PipelineError> {
    let ann = sys.annihilator();
    let flow = run_flow(&ann, opts)?;
    let transformed = flow.t.phi_module(sys);
    let certificates = crate::realization::finalize_certificates(
        &flow.transformed_ideal,
        flow.d,
        opts.cert_bound,
        &flow.candidates,
    )
    .map_err(|e| incomplete(flow.d, e))?;
    // each certificate must send every basis vector into the span
    for c in &certificates {
        for j in 0..transformed.q() {
            let mut row = vec![LaurentPoly::zero(transformed.nvars()); transformed.q()];
            row[j] = c.poly.clone();
            debug_assert!(transformed.member(&row));
        }
    }
    Ok(NormalizationResult {
        t: flow.t,
        d: flow.d,
        transformed,
        certificates,
    })
}

/// Random unimodular transform composed of seeded elementary shears and
/// permutations; used by the property suites.
pub fn random_elementary_transform(n: usize, steps: usize, seed: u64) -> UnimodularTransform {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut t = UnimodularTransform::identity(n);
    for _ in 0..steps {
        let mut mat = UnimodularTransform::identity(n).mat;
        match rng.gen_range(0..3) {
            0 => {
                // row shear: row_i += k * row_j
                let i = rng.gen_range(0..n);
                let mut j = rng.gen_range(0..n);
                if n > 1 {
                    while j == i {
                        j = rng.gen_range(0..n);
                    }
                    mat[i][j] = rng.gen_range(-3..=3);
                }
            }
            1 => {
                // swap two axes
                if n > 1 {
                    let i = rng.gen_range(0..n);
                    let mut j = rng.gen_range(0..n);
                    while j == i {
                        j = rng.gen_range(0..n);
                    }
                    mat.swap(i, j);
                }
            }
            _ => {
                // flip one axis
                let i = rng.gen_range(0..n);
                mat[i][i] = -1;
            }
        }
        t = UnimodularTransform::new(mat).unwrap().compose(&t);
    }
    t
}
