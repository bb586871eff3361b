//! The systems-theory layer over raw modules: kernel representations,
//! the characteristic ideal, the autonomy test, annihilators of quotient
//! modules, and the action of quotient-module elements on trajectories
//! through lifts.

use std::sync::{Arc, OnceLock};

use crate::error::RingError;
use crate::groebner::{
    colon_by_element, contract_rows, intersect_ideals, saturated_model, syzygies_laurent, SatModel,
};
use crate::laurent::{LaurentMatrix, LaurentPoly};

/// A kernel representation: the rows of `R` generate the equation module
/// inside the free module of rank `q` over the Laurent ring in `n`
/// variables. The saturated Groebner model of the row span is computed once
/// and shared.
#[derive(Clone, Debug)]
pub struct EquationModule {
    n: usize,
    q: usize,
    rows: Vec<Vec<LaurentPoly>>,
    sat: Arc<OnceLock<Arc<SatModel>>>,
}

impl EquationModule {
    pub fn new(n: usize, q: usize, rows: Vec<Vec<LaurentPoly>>) -> Result<Self, RingError> {
        assert!(q > 0, "need at least one dependent variable");
        for r in &rows {
            if r.len() != q {
                return Err(RingError::DimMismatch(format!(
                    "row width {} != q = {}",
                    r.len(),
                    q
                )));
            }
            for p in r {
                if p.nvars() != n {
                    return Err(RingError::VarMismatch {
                        left: p.nvars(),
                        right: n,
                    });
                }
            }
        }
        Ok(EquationModule {
            n,
            q,
            rows,
            sat: Arc::new(OnceLock::new()),
        })
    }

    /// Scalar system: an ideal presented by its generators.
    pub fn ideal(n: usize, gens: Vec<LaurentPoly>) -> Result<Self, RingError> {
        Self::new(n, 1, gens.into_iter().map(|g| vec![g]).collect())
    }

    pub fn from_matrix(m: &LaurentMatrix) -> Self {
        EquationModule {
            n: m.nvars(),
            q: m.ncols(),
            rows: m.rows_vec(),
            sat: Arc::new(OnceLock::new()),
        }
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn rows(&self) -> &[Vec<LaurentPoly>] {
        &self.rows
    }

    pub fn matrix(&self) -> LaurentMatrix {
        if self.rows.is_empty() {
            LaurentMatrix::empty(self.n, self.q)
        } else {
            LaurentMatrix::from_rows(self.n, self.rows.clone())
        }
    }

    /// Generators of a scalar span (q = 1 only).
    pub fn ideal_gens(&self) -> Vec<LaurentPoly> {
        assert_eq!(self.q, 1, "ideal_gens on a non-scalar module");
        self.rows.iter().map(|r| r[0].clone()).collect()
    }

    pub fn is_zero_span(&self) -> bool {
        self.rows.iter().all(|r| r.iter().all(|p| p.is_zero()))
    }

    /// The cached saturated Groebner model of the row span.
    pub fn sat_model(&self) -> Arc<SatModel> {
        self.sat
            .get_or_init(|| Arc::new(saturated_model(&self.rows, self.n, self.q)))
            .clone()
    }

    /// Laurent-span membership of a row vector.
    pub fn member(&self, row: &[LaurentPoly]) -> bool {
        assert_eq!(row.len(), self.q, "row width mismatch");
        if row.iter().all(|p| p.is_zero()) {
            return true;
        }
        self.sat_model().member(row)
    }

    /// Membership with Laurent cofactors against the stored rows.
    pub fn member_witness(&self, row: &[LaurentPoly]) -> Option<Vec<LaurentPoly>> {
        self.sat_model().member_witness(row)
    }

    pub fn spans_equal(&self, other: &EquationModule) -> bool {
        if self.n != other.n || self.q != other.q {
            return false;
        }
        self.rows.iter().all(|r| other.member(r)) && other.rows.iter().all(|r| self.member(r))
    }

    /// Elements of the span free of variables `d+1..n`, as a module over the
    /// smaller Laurent ring (output has `nvars = d`).
    pub fn contract_to_subring(&self, d: usize) -> EquationModule {
        assert!(d <= self.n);
        let rows = contract_rows(&self.rows, self.n, self.q, d);
        EquationModule {
            n: d,
            q: self.q,
            rows,
            sat: Arc::new(OnceLock::new()),
        }
    }

    /// Rows generating `{ r : r * R = 0 }` over the Laurent ring, where the
    /// stored rows are those of `R`.
    pub fn syzygies(&self) -> Vec<Vec<LaurentPoly>> {
        syzygies_laurent(&self.rows)
    }

    /// The ideal generated by the q-by-q minors of `R`; the zero ideal when
    /// `R` has fewer rows than `q`.
    pub fn characteristic_ideal(&self) -> EquationModule {
        let m = self.matrix();
        if m.nrows() < self.q {
            return EquationModule::ideal(self.n, Vec::new()).unwrap();
        }
        let minors = m.minors(self.q).expect("square minors");
        let gens: Vec<LaurentPoly> = minors.into_iter().filter(|p| !p.is_zero()).collect();
        EquationModule::ideal(self.n, gens).unwrap()
    }

    /// The annihilator ideal of the quotient module: the intersection over
    /// `j` of the colon ideals `{ f : f * e_j in span(R) }`.
    pub fn annihilator(&self) -> EquationModule {
        let mut acc: Option<Vec<LaurentPoly>> = None;
        for j in 0..self.q {
            let mut e = vec![LaurentPoly::zero(self.n); self.q];
            e[j] = LaurentPoly::one(self.n);
            // colon by the basis vector: syzygies of [e_j ; rows], first coord
            let mut stack = vec![e];
            stack.extend(self.rows.iter().cloned());
            let syz = syzygies_laurent(&stack);
            let colon: Vec<LaurentPoly> = syz
                .into_iter()
                .map(|s| s[0].clone())
                .filter(|p| !p.is_zero())
                .collect();
            acc = Some(match acc {
                None => colon,
                Some(prev) => intersect_ideals(&prev, &colon, self.n),
            });
        }
        EquationModule::ideal(self.n, acc.unwrap_or_default()).unwrap()
    }

    /// Autonomy is decided by a nonzero annihilator; the minors test is an
    /// optional cross-check exposed through `autonomy_report`.
    pub fn is_autonomous(&self) -> bool {
        !self.annihilator().is_zero_span()
    }

    /// Colon of the span by a scalar element, as a module.
    pub fn colon_element(&self, g: &LaurentPoly) -> EquationModule {
        let rows = colon_by_element(&self.rows, g, self.n, self.q);
        EquationModule {
            n: self.n,
            q: self.q,
            rows,
            sat: Arc::new(OnceLock::new()),
        }
    }

    /// Ideal intersection (q = 1 both sides).
    pub fn intersect(&self, other: &EquationModule) -> EquationModule {
        assert_eq!(self.q, 1);
        assert_eq!(other.q, 1);
        assert_eq!(self.n, other.n);
        let gens = intersect_ideals(&self.ideal_gens(), &other.ideal_gens(), self.n);
        EquationModule::ideal(self.n, gens).unwrap()
    }
}

/// Autonomy decided by the annihilator, with the characteristic-ideal
/// cross-check when it is informative (rows >= q).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutonomyReport {
    pub by_annihilator: bool,
    pub by_minors: Option<bool>,
}

impl AutonomyReport {
    pub fn disagreement(&self) -> bool {
        matches!(self.by_minors, Some(m) if m != self.by_annihilator)
    }
}

pub fn autonomy_report(sys: &EquationModule) -> AutonomyReport {
    let by_annihilator = sys.is_autonomous();
    let by_minors = if sys.rows().len() >= sys.q() {
        Some(!sys.characteristic_ideal().is_zero_span())
    } else {
        None
    };
    AutonomyReport {
        by_annihilator,
        by_minors,
    }
}

/// The quotient module of a kernel representation. Elements act on
/// trajectories through lifts; class equality is decided by membership of
/// the difference in the equation module.
#[derive(Clone, Debug)]
pub struct QuotientModule {
    sys: EquationModule,
}

impl QuotientModule {
    pub fn new(sys: EquationModule) -> Self {
        QuotientModule { sys }
    }

    pub fn system(&self) -> &EquationModule {
        &self.sys
    }

    /// Two lifts present the same class iff their difference lies in the
    /// equation module.
    pub fn same_class(&self, a: &[LaurentPoly], b: &[LaurentPoly]) -> bool {
        let diff: Vec<LaurentPoly> = a.iter().zip(b).map(|(x, y)| x.sub(y)).collect();
        self.sys.member(&diff)
    }

    /// A normal-form representative of the class of `lift` (idempotent on
    /// polynomial lifts; Laurent lifts are cleared first).
    pub fn reduce(&self, lift: &[LaurentPoly]) -> Vec<LaurentPoly> {
        use crate::groebner::{row_normal_form, ModVec};
        let v = ModVec::new(lift.to_vec());
        match v.clear() {
            None => lift.to_vec(),
            Some((cleared, mu)) => {
                let model = self.sys.sat_model();
                let rem = row_normal_form(cleared.comps(), &model.gb);
                rem.iter().map(|p| p.shift(&mu.neg())).collect()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::parse_poly;

    fn p(n: usize, s: &str) -> LaurentPoly {
        parse_poly(n, s).unwrap()
    }

    /// The 3-D scalar system used throughout: ker col(s3^2-2s3+1,
    /// s2^2-2s2+1, s1s3-s1-s2-s3+2).
    pub(crate) fn three_d_scalar() -> EquationModule {
        EquationModule::ideal(
            3,
            vec![
                p(3, "s3^2 - 2*s3 + 1"),
                p(3, "s2^2 - 2*s2 + 1"),
                p(3, "s1*s3 - s1 - s2 - s3 + 2"),
            ],
        )
        .unwrap()
    }

    /// The 2x2 module example: R = [[s1-1, 2], [1, s2-1]].
    pub(crate) fn module_2x2() -> EquationModule {
        EquationModule::new(
            2,
            2,
            vec![
                vec![p(2, "s1 - 1"), p(2, "2")],
                vec![p(2, "1"), p(2, "s2 - 1")],
            ],
        )
        .unwrap()
    }

    #[test]
    fn characteristic_ideal_of_module_example() {
        let sys = module_2x2();
        let chi = sys.characteristic_ideal();
        let expected = EquationModule::ideal(2, vec![p(2, "s1*s2 - s1 - s2 - 1")]).unwrap();
        assert!(chi.spans_equal(&expected));

        // fewer rows than q: zero ideal
        let wide = EquationModule::new(2, 2, vec![vec![p(2, "s1"), p(2, "1")]]).unwrap();
        assert!(wide.characteristic_ideal().is_zero_span());

        // scalar case: the entries themselves
        let scalar = EquationModule::ideal(2, vec![p(2, "s1 - 1")]).unwrap();
        assert!(scalar.characteristic_ideal().spans_equal(&scalar));
    }

    #[test]
    fn annihilator_of_module_example() {
        let sys = module_2x2();
        let ann = sys.annihilator();
        let expected = EquationModule::ideal(2, vec![p(2, "s1*s2 - s2 - s1 - 1")]).unwrap();
        assert!(ann.spans_equal(&expected));
        // every annihilator generator multiplies every basis vector into the span
        for g in ann.ideal_gens() {
            for j in 0..2 {
                let mut row = vec![LaurentPoly::zero(2); 2];
                row[j] = g.clone();
                assert!(sys.member(&row));
            }
        }
    }

    #[test]
    fn annihilator_equals_ideal_for_scalar_systems() {
        let sys = three_d_scalar();
        let ann = sys.annihilator();
        assert!(ann.spans_equal(&sys));
        assert!(ann.member(&[p(3, "s2^2 - 2*s2 + 1")]));
        assert!(ann.member(&[p(3, "s3^2 - 2*s3 + 1")]));
    }

    #[test]
    fn autonomy_examples() {
        assert!(three_d_scalar().is_autonomous());
        let free = EquationModule::new(2, 1, vec![]).unwrap();
        assert!(!free.is_autonomous());
        let scalar = EquationModule::ideal(2, vec![p(2, "s1*s2 - s1 - s2 + 1")]).unwrap();
        assert!(scalar.is_autonomous());
        let rep = autonomy_report(&three_d_scalar());
        assert!(rep.by_annihilator);
        assert_eq!(rep.by_minors, Some(true));
        assert!(!rep.disagreement());
    }

    #[test]
    fn membership_golden_cases() {
        let sys = three_d_scalar();
        assert!(sys.member(&[p(3, "s1*s3 - s1 - s2 - s3 + 2")]));
        assert!(sys.member(&[p(3, "s1^-5").mul(&p(3, "s2^2 - 2*s2 + 1"))]));
        assert!(!sys.member(&[p(3, "s3 - 1")]));
    }

    #[test]
    fn contract_examples() {
        // <s2-1, s1-1> contracted to the first variable
        let sys = EquationModule::ideal(2, vec![p(2, "s2 - 1"), p(2, "s1 - 1")]).unwrap();
        let c = sys.contract_to_subring(1);
        let expected = EquationModule::ideal(1, vec![p(1, "s1 - 1")]).unwrap();
        assert!(c.spans_equal(&expected));
        // full contraction of a full module
        let full = EquationModule::ideal(2, vec![p(2, "1")]).unwrap();
        assert!(full
            .contract_to_subring(1)
            .spans_equal(&EquationModule::ideal(1, vec![p(1, "1")]).unwrap()));
    }

    #[test]
    fn quotient_class_equality() {
        let sys = three_d_scalar();
        let m = QuotientModule::new(sys.clone());
        let a = vec![p(3, "s2")];
        let b = vec![p(3, "s2").add(&p(3, "s2^2 - 2*s2 + 1"))];
        assert!(m.same_class(&a, &b));
        assert!(!m.same_class(&a, &[p(3, "s3")]));
        let r = m.reduce(&b);
        assert!(m.same_class(&r, &a));
    }

    #[test]
    fn autonomy_invariant_under_row_mixes() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let sys = module_2x2();
        let base = sys.is_autonomous();
        for _ in 0..5 {
            let mut rows = sys.rows().to_vec();
            // add a random polynomial multiple of one row to the other
            let c = p(
                2,
                &format!(
                    "{}*s1^{}",
                    rng.gen_range(-3i64..4).max(1),
                    rng.gen_range(-1i64..2)
                ),
            );
            let (i, j) = if rng.gen_bool(0.5) { (0, 1) } else { (1, 0) };
            let mixed: Vec<LaurentPoly> = rows[i]
                .iter()
                .zip(&rows[j])
                .map(|(a, b)| a.add(&c.mul(b)))
                .collect();
            rows[i] = mixed;
            let mixed_sys = EquationModule::new(2, 2, rows).unwrap();
            assert!(mixed_sys.spans_equal(&sys));
            assert_eq!(mixed_sys.is_autonomous(), base);
        }
    }
}
