//! Matrices over the Laurent polynomial ring.
//!
//! Determinants use cofactor expansion up to 4x4 and fraction-free
//! (Bareiss) elimination above; rank is computed fraction-free over the
//! polynomial domain after clearing rows by unit monomials.

use num_rational::BigRational;

use crate::error::RingError;

use super::poly::{ExpVec, LaurentPoly};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LaurentMatrix {
    nvars: usize,
    rows: usize,
    cols: usize,
    data: Vec<LaurentPoly>,
}

impl LaurentMatrix {
    pub fn from_rows(nvars: usize, rows: Vec<Vec<LaurentPoly>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
        let mut data = Vec::with_capacity(nrows * ncols);
        for r in rows {
            assert_eq!(r.len(), ncols, "ragged rows");
            for p in r {
                assert_eq!(p.nvars(), nvars, "entry variable-count mismatch");
                data.push(p);
            }
        }
        LaurentMatrix {
            nvars,
            rows: nrows,
            cols: ncols,
            data,
        }
    }

    pub fn empty(nvars: usize, cols: usize) -> Self {
        LaurentMatrix {
            nvars,
            rows: 0,
            cols,
            data: Vec::new(),
        }
    }

    pub fn zero(nvars: usize, rows: usize, cols: usize) -> Self {
        LaurentMatrix {
            nvars,
            rows,
            cols,
            data: vec![LaurentPoly::zero(nvars); rows * cols],
        }
    }

    pub fn identity(nvars: usize, n: usize) -> Self {
        let mut m = Self::zero(nvars, n, n);
        for i in 0..n {
            *m.entry_mut(i, i) = LaurentPoly::one(nvars);
        }
        m
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, i: usize, j: usize) -> &LaurentPoly {
        &self.data[i * self.cols + j]
    }

    pub fn entry_mut(&mut self, i: usize, j: usize) -> &mut LaurentPoly {
        &mut self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> Vec<LaurentPoly> {
        (0..self.cols).map(|j| self.entry(i, j).clone()).collect()
    }

    pub fn rows_vec(&self) -> Vec<Vec<LaurentPoly>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|p| p.is_zero())
    }

    pub fn map(&self, f: impl Fn(&LaurentPoly) -> LaurentPoly) -> Self {
        LaurentMatrix {
            nvars: self.nvars,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zero(self.nvars, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *out.entry_mut(j, i) = self.entry(i, j).clone();
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self, RingError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(RingError::DimMismatch(format!(
                "{}x{} + {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(LaurentMatrix {
            nvars: self.nvars,
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.add(b))
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, RingError> {
        self.add(&other.map(|p| p.neg()))
    }

    pub fn mul(&self, other: &Self) -> Result<Self, RingError> {
        if self.cols != other.rows {
            return Err(RingError::DimMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zero(self.nvars, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = LaurentPoly::zero(self.nvars);
                for k in 0..self.cols {
                    acc = acc.add(&self.entry(i, k).mul(other.entry(k, j)));
                }
                *out.entry_mut(i, j) = acc;
            }
        }
        Ok(out)
    }

    pub fn scale(&self, f: &LaurentPoly) -> Self {
        self.map(|p| p.mul(f))
    }

    pub fn vstack(&self, other: &Self) -> Result<Self, RingError> {
        if self.cols != other.cols {
            return Err(RingError::DimMismatch(format!(
                "vstack {}x{} over {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(LaurentMatrix {
            nvars: self.nvars,
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn hstack(&self, other: &Self) -> Result<Self, RingError> {
        if self.rows != other.rows {
            return Err(RingError::DimMismatch(format!(
                "hstack {}x{} with {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        if self.rows == 0 {
            return Ok(LaurentMatrix {
                nvars: self.nvars,
                rows: 0,
                cols: self.cols + other.cols,
                data: Vec::new(),
            });
        }
        let mut rows = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut r = self.row(i);
            r.extend(other.row(i));
            rows.push(r);
        }
        Ok(Self::from_rows(self.nvars, rows))
    }

    /// Clear every row by a unit monomial so all entries become genuine
    /// polynomials; returns the cleared matrix and the total shift, so that
    /// `det(self) = sigma^{-shift} * det(cleared)`.
    fn clear_rows(&self) -> (Self, ExpVec) {
        let mut total = ExpVec::zeros(self.nvars);
        let mut out = self.clone();
        for i in 0..self.rows {
            let mut mins = vec![0i64; self.nvars];
            let mut any = false;
            for j in 0..self.cols {
                if let Some(m) = self.entry(i, j).min_exponents() {
                    for (acc, &v) in mins.iter_mut().zip(&m.0) {
                        *acc = if any { (*acc).min(v) } else { v };
                    }
                    any = true;
                }
            }
            if !any {
                continue;
            }
            let mu = ExpVec(mins.iter().map(|&v| -v.min(0)).collect());
            if mu.is_zero() {
                continue;
            }
            for j in 0..self.cols {
                *out.entry_mut(i, j) = out.entry(i, j).shift(&mu);
            }
            total = total.add(&mu);
        }
        (out, total)
    }

    /// Exact determinant over the Laurent ring.
    pub fn det(&self) -> Result<LaurentPoly, RingError> {
        if self.rows != self.cols {
            return Err(RingError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        if self.rows == 0 {
            return Ok(LaurentPoly::one(self.nvars));
        }
        let (cleared, shift) = self.clear_rows();
        let d = if self.rows <= 4 {
            cleared.det_cofactor()
        } else {
            cleared.det_bareiss()
        };
        Ok(d.shift(&shift.neg()))
    }

    fn det_cofactor(&self) -> LaurentPoly {
        let n = self.rows;
        if n == 1 {
            return self.entry(0, 0).clone();
        }
        let mut acc = LaurentPoly::zero(self.nvars);
        for j in 0..n {
            let a = self.entry(0, j);
            if a.is_zero() {
                continue;
            }
            let sub = self.submatrix(&(1..n).collect::<Vec<_>>(), &minor_cols(n, j));
            let term = a.mul(&sub.det_cofactor());
            acc = if j % 2 == 0 {
                acc.add(&term)
            } else {
                acc.sub(&term)
            };
        }
        acc
    }

    fn det_bareiss(&self) -> LaurentPoly {
        let n = self.rows;
        let mut m: Vec<Vec<LaurentPoly>> = self.rows_vec();
        let mut prev = LaurentPoly::one(self.nvars);
        let mut sign = false;
        for k in 0..n - 1 {
            if m[k][k].is_zero() {
                match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                    Some(r) => {
                        m.swap(k, r);
                        sign = !sign;
                    }
                    None => return LaurentPoly::zero(self.nvars),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = m[k][k].mul(&m[i][j]).sub(&m[i][k].mul(&m[k][j]));
                    m[i][j] = num
                        .exact_div(&prev)
                        .expect("Bareiss division is exact over an integral domain");
                }
                m[i][k] = LaurentPoly::zero(self.nvars);
            }
            prev = m[k][k].clone();
        }
        let d = m[n - 1][n - 1].clone();
        if sign {
            d.neg()
        } else {
            d
        }
    }

    /// Rank over the fraction field, by fraction-free elimination with full
    /// pivoting on the cleared polynomial matrix.
    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        let (cleared, _) = self.clear_rows();
        let mut m = cleared.rows_vec();
        let (nr, nc) = (self.rows, self.cols);
        let mut prev = LaurentPoly::one(self.nvars);
        let mut rank = 0;
        let mut row = 0;
        let mut col_order: Vec<usize> = (0..nc).collect();
        let mut col = 0;
        while row < nr && col < nc {
            // full pivot search in the remaining block
            let mut pivot = None;
            'search: for cj in col..nc {
                for ri in row..nr {
                    if !m[ri][col_order[cj]].is_zero() {
                        pivot = Some((ri, cj));
                        break 'search;
                    }
                }
            }
            let Some((ri, cj)) = pivot else { break };
            m.swap(row, ri);
            col_order.swap(col, cj);
            let pc = col_order[col];
            for i in row + 1..nr {
                for cj2 in col + 1..nc {
                    let j = col_order[cj2];
                    let num = m[row][pc].mul(&m[i][j]).sub(&m[i][pc].mul(&m[row][j]));
                    m[i][j] = num
                        .exact_div(&prev)
                        .expect("Bareiss division is exact over an integral domain");
                }
                m[i][pc] = LaurentPoly::zero(self.nvars);
            }
            prev = m[row][pc].clone();
            rank += 1;
            row += 1;
            col += 1;
        }
        rank
    }

    /// Inverse over the ring via the adjugate; requires a unit determinant.
    pub fn adjugate_inverse(&self) -> Result<Self, RingError> {
        if self.rows != self.cols {
            return Err(RingError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let d = self.det()?;
        if !d.is_unit() {
            return Err(RingError::NotUnimodular);
        }
        let dinv = d.unit_inverse()?;
        if n == 0 {
            return Ok(self.clone());
        }
        let mut adj = Self::zero(self.nvars, n, n);
        for i in 0..n {
            for j in 0..n {
                // adj[i][j] = (-1)^{i+j} * det(minor with row j, col i removed)
                let sub = self.submatrix(&minor_cols(n, j), &minor_cols(n, i));
                let mut c = if n == 1 {
                    LaurentPoly::one(self.nvars)
                } else {
                    sub.det()?
                };
                if (i + j) % 2 == 1 {
                    c = c.neg();
                }
                *adj.entry_mut(i, j) = c.mul(&dinv);
            }
        }
        Ok(adj)
    }

    /// Signed power using a precomputed ring inverse for negative exponents.
    pub fn pow_signed(&self, inv: &Self, e: i64) -> Result<Self, RingError> {
        let base = if e >= 0 { self } else { inv };
        let mut k = e.unsigned_abs();
        let mut acc = Self::identity(self.nvars, self.rows);
        let mut b = base.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&b)?;
            }
            k >>= 1;
            if k > 0 {
                b = b.mul(&b)?;
            }
        }
        Ok(acc)
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut out = Self::zero(self.nvars, rows.len(), cols.len());
        for (oi, &i) in rows.iter().enumerate() {
            for (oj, &j) in cols.iter().enumerate() {
                *out.entry_mut(oi, oj) = self.entry(i, j).clone();
            }
        }
        out
    }

    /// All k-by-k minors (as determinants) over the Laurent ring.
    pub fn minors(&self, k: usize) -> Result<Vec<LaurentPoly>, RingError> {
        if k == 0 || k > self.rows || k > self.cols {
            return Ok(Vec::new());
        }
        let row_sets = combinations(self.rows, k);
        let col_sets = combinations(self.cols, k);
        let mut out = Vec::new();
        for rs in &row_sets {
            for cs in &col_sets {
                out.push(self.submatrix(rs, cs).det()?);
            }
        }
        Ok(out)
    }

    /// Evaluate every entry at a rational point.
    pub fn eval(&self, point: &[BigRational]) -> Vec<Vec<BigRational>> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self.entry(i, j).eval(point))
                    .collect()
            })
            .collect()
    }

    pub fn extend_vars(&self, extra: usize) -> Self {
        LaurentMatrix {
            nvars: self.nvars + extra,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|p| p.extend_vars(extra)).collect(),
        }
    }

    pub fn project_vars(&self, d: usize) -> Self {
        LaurentMatrix {
            nvars: d,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|p| p.project_vars(d)).collect(),
        }
    }
}

fn minor_cols(n: usize, skip: usize) -> Vec<usize> {
    (0..n).filter(|&c| c != skip).collect()
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

impl std::fmt::Display for LaurentMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.entry(i, j))?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}
