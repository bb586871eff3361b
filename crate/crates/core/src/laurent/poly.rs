//! Sparse Laurent polynomials over the rationals.
//!
//! A polynomial is a finite map from integer exponent vectors to nonzero
//! exact rational coefficients. The map is kept canonical at all times:
//! no zero coefficients are ever stored, so structural equality of the
//! term maps is equality of ring elements.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::RingError;

/// Exponent vector of a monomial: one signed shift offset per variable.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ExpVec(pub Vec<i64>);

impl ExpVec {
    pub fn zeros(n: usize) -> Self {
        ExpVec(vec![0; n])
    }

    pub fn unit(n: usize, var: usize) -> Self {
        let mut e = vec![0; n];
        e[var] = 1;
        ExpVec(e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, other: &ExpVec) -> ExpVec {
        ExpVec(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &ExpVec) -> ExpVec {
        ExpVec(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> ExpVec {
        ExpVec(self.0.iter().map(|a| -a).collect())
    }

    pub fn total_degree(&self) -> i64 {
        self.0.iter().sum()
    }

    /// Componentwise divisibility for monomials with nonnegative exponents.
    pub fn divides(&self, other: &ExpVec) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }
}

/// Sparse Laurent polynomial in `nvars` variables with rational coefficients.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LaurentPoly {
    nvars: usize,
    terms: BTreeMap<ExpVec, BigRational>,
}

impl LaurentPoly {
    pub fn zero(nvars: usize) -> Self {
        LaurentPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigRational::one())
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(ExpVec::zeros(nvars), c);
        }
        LaurentPoly { nvars, terms }
    }

    pub fn from_int(nvars: usize, c: i64) -> Self {
        Self::constant(nvars, BigRational::from_integer(c.into()))
    }

    /// The monomial `c * sigma^exp`.
    pub fn monomial(nvars: usize, exp: ExpVec, c: BigRational) -> Self {
        assert_eq!(exp.len(), nvars);
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        LaurentPoly { nvars, terms }
    }

    /// The variable `s<var+1>`.
    pub fn var(nvars: usize, var: usize) -> Self {
        Self::monomial(nvars, ExpVec::unit(nvars, var), BigRational::one())
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExpVec, &BigRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exp: &ExpVec) -> BigRational {
        self.terms
            .get(exp)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = &ExpVec> {
        self.terms.keys()
    }

    fn check_vars(&self, other: &Self) -> Result<(), RingError> {
        if self.nvars != other.nvars {
            return Err(RingError::VarMismatch {
                left: self.nvars,
                right: other.nvars,
            });
        }
        Ok(())
    }

    fn insert_term(terms: &mut BTreeMap<ExpVec, BigRational>, exp: ExpVec, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match terms.entry(exp) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_vars(other)
            .expect("variable-count mismatch in add");
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            Self::insert_term(&mut terms, e.clone(), c.clone());
        }
        LaurentPoly {
            nvars: self.nvars,
            terms,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check_vars(other)
            .expect("variable-count mismatch in sub");
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            Self::insert_term(&mut terms, e.clone(), -c.clone());
        }
        LaurentPoly {
            nvars: self.nvars,
            terms,
        }
    }

    pub fn neg(&self) -> Self {
        LaurentPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_vars(other)
            .expect("variable-count mismatch in mul");
        let mut terms = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                Self::insert_term(&mut terms, ea.add(eb), ca * cb);
            }
        }
        LaurentPoly {
            nvars: self.nvars,
            terms,
        }
    }

    /// Multiply by the single term `c * sigma^exp`.
    pub fn mul_term(&self, exp: &ExpVec, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        LaurentPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, k)| (e.add(exp), k * c))
                .collect(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        LaurentPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, k)| (e.clone(), k * c)).collect(),
        }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.nvars);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// A unit of the Laurent ring is a single monomial with nonzero coefficient.
    pub fn is_unit(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .map(|(e, c)| e.is_zero() && c.is_one())
                .unwrap_or(false)
    }

    /// Inverse of a unit. Errors when `self` is not a single monomial.
    pub fn unit_inverse(&self) -> Result<Self, RingError> {
        if !self.is_unit() {
            return Err(RingError::NotUnimodular);
        }
        let (e, c) = self.terms.iter().next().unwrap();
        Ok(Self::monomial(self.nvars, e.neg(), c.recip()))
    }

    /// Per-variable minimum exponent over the support. `None` for the zero polynomial.
    pub fn min_exponents(&self) -> Option<ExpVec> {
        if self.terms.is_empty() {
            return None;
        }
        let mut mins = vec![i64::MAX; self.nvars];
        for e in self.terms.keys() {
            for (m, &v) in mins.iter_mut().zip(&e.0) {
                *m = (*m).min(v);
            }
        }
        Some(ExpVec(mins))
    }

    /// Per-variable maximum exponent over the support. `None` for the zero polynomial.
    pub fn max_exponents(&self) -> Option<ExpVec> {
        if self.terms.is_empty() {
            return None;
        }
        let mut maxs = vec![i64::MIN; self.nvars];
        for e in self.terms.keys() {
            for (m, &v) in maxs.iter_mut().zip(&e.0) {
                *m = (*m).max(v);
            }
        }
        Some(ExpVec(maxs))
    }

    /// Canonical polynomial representative: returns `(g, mu)` with
    /// `g = sigma^mu * f`, every exponent of `g` nonnegative, and each
    /// variable reaching exponent 0 in some term of `g`.
    pub fn clear_to_polynomial(&self) -> Result<(Self, ExpVec), RingError> {
        let mins = self.min_exponents().ok_or(RingError::ZeroInput)?;
        let mu = mins.neg();
        Ok((self.shift(&mu), mu))
    }

    /// Multiply by the monomial `sigma^mu`.
    pub fn shift(&self, mu: &ExpVec) -> Self {
        LaurentPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.add(mu), c.clone()))
                .collect(),
        }
    }

    /// True when every exponent is nonnegative.
    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(|e| e.0.iter().all(|&v| v >= 0))
    }

    /// Total degree after clearing: maximum total degree over the support
    /// of the canonical polynomial representative; 0 for the zero polynomial.
    pub fn cleared_total_degree(&self) -> i64 {
        match self.min_exponents() {
            None => 0,
            Some(mins) => self
                .terms
                .keys()
                .map(|e| e.sub(&mins).total_degree())
                .max()
                .unwrap_or(0),
        }
    }

    pub fn involves_var(&self, var: usize) -> bool {
        self.terms.keys().any(|e| e.0[var] != 0)
    }

    /// True when every variable with index >= `d` has exponent 0 everywhere.
    pub fn free_of_vars_from(&self, d: usize) -> bool {
        self.terms.keys().all(|e| e.0[d..].iter().all(|&v| v == 0))
    }

    /// Append `extra` fresh variables (exponent 0 everywhere).
    pub fn extend_vars(&self, extra: usize) -> Self {
        LaurentPoly {
            nvars: self.nvars + extra,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut v = e.0.clone();
                    v.resize(v.len() + extra, 0);
                    (ExpVec(v), c.clone())
                })
                .collect(),
        }
    }

    /// Keep only the first `d` variables. Panics if any dropped variable occurs.
    pub fn project_vars(&self, d: usize) -> Self {
        assert!(
            self.free_of_vars_from(d),
            "cannot project: polynomial involves a dropped variable"
        );
        LaurentPoly {
            nvars: d,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (ExpVec(e.0[..d].to_vec()), c.clone()))
                .collect(),
        }
    }

    /// View as a univariate polynomial in `var`: map from the exponent of
    /// `var` to the coefficient (with `var`'s exponent zeroed out).
    pub fn coeffs_in_var(&self, var: usize) -> BTreeMap<i64, LaurentPoly> {
        let mut out: BTreeMap<i64, LaurentPoly> = BTreeMap::new();
        for (e, c) in &self.terms {
            let k = e.0[var];
            let mut rest = e.clone();
            rest.0[var] = 0;
            let entry = out
                .entry(k)
                .or_insert_with(|| LaurentPoly::zero(self.nvars));
            *entry = entry.add(&LaurentPoly::monomial(self.nvars, rest, c.clone()));
        }
        out
    }

    /// Exact evaluation at a rational point (componentwise nonzero for
    /// negative exponents to stay defined).
    pub fn eval(&self, point: &[BigRational]) -> BigRational {
        assert_eq!(point.len(), self.nvars);
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(&e.0) {
                if k >= 0 {
                    for _ in 0..k {
                        t *= x;
                    }
                } else {
                    let inv = x.recip();
                    for _ in 0..(-k) {
                        t *= &inv;
                    }
                }
            }
            acc += t;
        }
        acc
    }

    /// Exact division in the polynomial world: `self = q * rhs` with zero
    /// remainder. Returns `None` when the division is not exact.
    pub fn exact_div(&self, rhs: &Self) -> Option<Self> {
        if rhs.is_zero() {
            return None;
        }
        let mut rem = self.clone();
        let mut quot = Self::zero(self.nvars);
        let (lead_e, lead_c) = rhs.lead_term_grevlex()?;
        while !rem.is_zero() {
            let (re, rc) = rem.lead_term_grevlex().unwrap();
            let de = re.sub(&lead_e);
            if de.0.iter().any(|&v| v < 0) {
                return None;
            }
            let dc = &rc / &lead_c;
            let t = Self::monomial(self.nvars, de, dc);
            quot = quot.add(&t);
            rem = rem.sub(&t.mul(rhs));
        }
        Some(quot)
    }

    /// Leading term under grevlex (largest). `None` for zero.
    fn lead_term_grevlex(&self) -> Option<(ExpVec, BigRational)> {
        self.terms
            .iter()
            .max_by(|(a, _), (b, _)| cmp_grevlex(a, b))
            .map(|(e, c)| (e.clone(), c.clone()))
    }

    /// Deterministic display ordering: graded on cleared exponents, ties
    /// broken by raw lexicographic comparison, largest first.
    fn display_order(&self) -> Vec<(&ExpVec, &BigRational)> {
        let mins = self
            .min_exponents()
            .unwrap_or_else(|| ExpVec::zeros(self.nvars));
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|(a, _), (b, _)| {
            let da = a.sub(&mins).total_degree();
            let db = b.sub(&mins).total_degree();
            db.cmp(&da).then_with(|| b.0.cmp(&a.0))
        });
        v
    }
}

/// Grevlex comparison: higher total degree wins; on ties the rightmost
/// differing exponent decides, smaller value winning.
pub fn cmp_grevlex(a: &ExpVec, b: &ExpVec) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    let da = a.total_degree();
    let db = b.total_degree();
    match da.cmp(&db) {
        Ordering::Equal => {}
        ord => return ord,
    }
    for i in (0..a.len()).rev() {
        if a.0[i] != b.0[i] {
            return if a.0[i] < b.0[i] {
                Ordering::Greater
            } else {
                Ordering::Less
            };
        }
    }
    Ordering::Equal
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let ordered = self.display_order();
        for (i, (e, c)) in ordered.iter().enumerate() {
            let neg = c.is_negative();
            let mag = if neg { -(*c).clone() } else { (*c).clone() };
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let vars: Vec<String> =
                e.0.iter()
                    .enumerate()
                    .filter(|(_, &k)| k != 0)
                    .map(|(v, &k)| {
                        if k == 1 {
                            format!("s{}", v + 1)
                        } else {
                            format!("s{}^{}", v + 1, k)
                        }
                    })
                    .collect();
            if vars.is_empty() {
                write!(f, "{}", mag)?;
            } else if mag.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{}*{}", mag, vars.join("*"))?;
            }
        }
        Ok(())
    }
}
