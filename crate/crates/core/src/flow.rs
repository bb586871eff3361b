//! Finite-window trajectory evaluation: shift-operator action,
//! compatibility checking, the recursion and renormalization stages of the
//! solution algorithms, window-size planning, and the brute-force
//! verification oracle.

use std::collections::HashMap;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::behavior::EquationModule;
use crate::dnnl::{dnnl_module, NormalizationResult, NormalizeOptions, UnimodularTransform};
use crate::error::{PipelineError, WindowError};
use crate::exec::{map_collect, EvalMode};
use crate::laurent::{ExpVec, LaurentMatrix, LaurentPoly};
use crate::realization::FirstOrderRealization;

/// A finite axis-aligned box of lattice points carrying a dense array of
/// exact rational vectors. A zero-dimensional window is a single vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrajectoryWindow {
    lo: Vec<i64>,
    hi: Vec<i64>,
    width: usize,
    values: Vec<BigRational>,
}

impl TrajectoryWindow {
    pub fn zeros(lo: Vec<i64>, hi: Vec<i64>, width: usize) -> Self {
        assert_eq!(lo.len(), hi.len());
        assert!(
            lo.iter().zip(&hi).all(|(a, b)| a <= b),
            "box must satisfy lo <= hi"
        );
        let count: usize = lo
            .iter()
            .zip(&hi)
            .map(|(a, b)| (b - a + 1) as usize)
            .product();
        TrajectoryWindow {
            lo,
            hi,
            width,
            values: vec![BigRational::zero(); count * width],
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[i64] {
        &self.lo
    }

    pub fn hi(&self) -> &[i64] {
        &self.hi
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn num_points(&self) -> usize {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| (b - a + 1) as usize)
            .product()
    }

    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [BigRational] {
        &mut self.values
    }

    pub fn contains_point(&self, p: &[i64]) -> bool {
        p.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(v, (a, b))| a <= v && v <= b)
    }

    pub fn contains_box(&self, lo: &[i64], hi: &[i64]) -> bool {
        self.lo.iter().zip(lo).all(|(a, b)| a <= b) && self.hi.iter().zip(hi).all(|(a, b)| a >= b)
    }

    fn offset_of(&self, p: &[i64]) -> usize {
        let mut idx = 0usize;
        for (k, v) in p.iter().enumerate() {
            let span = (self.hi[k] - self.lo[k] + 1) as usize;
            idx = idx * span + (v - self.lo[k]) as usize;
        }
        idx
    }

    /// The lattice point at flat index `i` (row-major, last axis fastest).
    pub fn point_at(&self, mut i: usize) -> Vec<i64> {
        let k = self.dim();
        let mut p = vec![0i64; k];
        for ax in (0..k).rev() {
            let span = (self.hi[ax] - self.lo[ax] + 1) as usize;
            p[ax] = self.lo[ax] + (i % span) as i64;
            i /= span;
        }
        p
    }

    pub fn get(&self, p: &[i64]) -> &[BigRational] {
        debug_assert!(self.contains_point(p));
        let o = self.offset_of(p) * self.width;
        &self.values[o..o + self.width]
    }

    pub fn set(&mut self, p: &[i64], vals: Vec<BigRational>) {
        debug_assert!(self.contains_point(p));
        debug_assert_eq!(vals.len(), self.width);
        let o = self.offset_of(p) * self.width;
        self.values[o..o + self.width].clone_from_slice(&vals);
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }

    /// Restriction to a sub-box.
    pub fn restrict(&self, lo: &[i64], hi: &[i64]) -> Option<TrajectoryWindow> {
        if !self.contains_box(lo, hi) {
            return None;
        }
        let mut out = TrajectoryWindow::zeros(lo.to_vec(), hi.to_vec(), self.width);
        for i in 0..out.num_points() {
            let p = out.point_at(i);
            out.set(&p, self.get(&p).to_vec());
        }
        Some(out)
    }
}

/// Per-axis minimum and maximum shift offsets over the support of every
/// entry of `m`. `None` when no entry has any term.
fn operator_offsets(m: &LaurentMatrix) -> Option<(Vec<i64>, Vec<i64>)> {
    let k = m.nvars();
    let mut mins: Option<Vec<i64>> = None;
    let mut maxs: Option<Vec<i64>> = None;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let e = m.entry(i, j);
            if let (Some(lo), Some(hi)) = (e.min_exponents(), e.max_exponents()) {
                match (&mut mins, &mut maxs) {
                    (Some(mv), Some(xv)) => {
                        for ax in 0..k {
                            mv[ax] = mv[ax].min(lo.0[ax]);
                            xv[ax] = xv[ax].max(hi.0[ax]);
                        }
                    }
                    _ => {
                        mins = Some(lo.0);
                        maxs = Some(hi.0);
                    }
                }
            }
        }
    }
    mins.zip(maxs)
}

/// Apply a matrix of shift operators to a window:
/// `(M w)(nu)_r = sum_j sum_{(e,c) in M[r][j]} c * w(nu + e)_j`,
/// on the largest box where every needed sample exists.
pub fn apply_operator(
    m: &LaurentMatrix,
    w: &TrajectoryWindow,
    mode: EvalMode,
) -> Result<TrajectoryWindow, WindowError> {
    if m.ncols() != w.width() {
        return Err(WindowError::WidthMismatch {
            got: w.width(),
            expected: m.ncols(),
        });
    }
    assert_eq!(m.nvars(), w.dim(), "operator/window dimension mismatch");
    let (mins, maxs) = operator_offsets(m).unwrap_or_else(|| (vec![0; w.dim()], vec![0; w.dim()]));
    let lo: Vec<i64> = w.lo().iter().zip(&mins).map(|(a, b)| a - b).collect();
    let hi: Vec<i64> = w.hi().iter().zip(&maxs).map(|(a, b)| a - b).collect();
    if lo.iter().zip(&hi).any(|(a, b)| a > b) {
        let padding = lo
            .iter()
            .zip(&hi)
            .map(|(a, b)| if a > b { (0, a - b) } else { (0, 0) })
            .collect();
        return Err(WindowError::Exhausted { padding });
    }
    let mut out = TrajectoryWindow::zeros(lo, hi, m.nrows());
    let vals = map_collect(mode, out.num_points(), |i| {
        let p = out.point_at(i);
        let mut row_vals = Vec::with_capacity(m.nrows());
        for r in 0..m.nrows() {
            let mut acc = BigRational::zero();
            for j in 0..m.ncols() {
                for (e, c) in m.entry(r, j).terms() {
                    let q: Vec<i64> = p.iter().zip(&e.0).map(|(a, b)| a + b).collect();
                    acc += c * &w.get(&q)[j];
                }
            }
            row_vals.push(acc);
        }
        row_vals
    });
    for (i, rv) in vals.into_iter().enumerate() {
        let p = out.point_at(i);
        out.set(&p, rv);
    }
    Ok(out)
}

/// Action of a quotient-module element (through a lift) on a trajectory.
pub fn act_on_trajectory(
    lift: &[LaurentPoly],
    w: &TrajectoryWindow,
    mode: EvalMode,
) -> Result<TrajectoryWindow, WindowError> {
    let n = lift[0].nvars();
    let m = LaurentMatrix::from_rows(n, vec![lift.to_vec()]);
    apply_operator(&m, w, mode)
}

/// `X(sigma_1) x = 0` on the largest checkable box.
pub fn check_compatibility(
    x_matrix: &LaurentMatrix,
    x: &TrajectoryWindow,
    mode: EvalMode,
) -> Result<bool, WindowError> {
    if x_matrix.nrows() == 0 {
        return Ok(true);
    }
    let res = apply_operator(x_matrix, x, mode)?;
    if res.num_points() == 0 {
        return Err(WindowError::NothingToCheck);
    }
    Ok(res.is_zero())
}

/// Verification report of the brute-force oracle.
#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub max_residual: BigRational,
    pub points_checked: usize,
    pub rows_checked: usize,
}

impl VerifyReport {
    pub fn is_exact(&self) -> bool {
        self.max_residual.is_zero()
    }
}

/// Evaluate every row of the kernel representation at every point where the
/// shifted samples exist; the maximum absolute residual must be exactly 0
/// for a solution.
pub fn verify_solution(
    sys: &EquationModule,
    w: &TrajectoryWindow,
    mode: EvalMode,
) -> Result<VerifyReport, WindowError> {
    if sys.q() != w.width() {
        return Err(WindowError::WidthMismatch {
            got: w.width(),
            expected: sys.q(),
        });
    }
    let mut max_residual = BigRational::zero();
    let mut points = 0usize;
    let mut rows = 0usize;
    for row in sys.rows() {
        let m = LaurentMatrix::from_rows(sys.nvars(), vec![row.clone()]);
        match apply_operator(&m, w, mode) {
            Ok(res) => {
                rows += 1;
                points += res.num_points();
                for v in res.values() {
                    let a = v.abs();
                    if a > max_residual {
                        max_residual = a;
                    }
                }
            }
            Err(WindowError::Exhausted { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    if points == 0 {
        return Err(WindowError::NothingToCheck);
    }
    Ok(VerifyReport {
        max_residual,
        points_checked: points,
        rows_checked: rows,
    })
}

/// Cache of output operators `C * prod_j A_j^{tau_j}` keyed by the tail.
struct OperatorCache<'a> {
    real: &'a FirstOrderRealization,
    ops: HashMap<Vec<i64>, Arc<LaurentMatrix>>,
}

impl<'a> OperatorCache<'a> {
    fn new(real: &'a FirstOrderRealization) -> Self {
        OperatorCache {
            real,
            ops: HashMap::new(),
        }
    }

    fn get(&mut self, tail: &[i64]) -> Arc<LaurentMatrix> {
        if let Some(m) = self.ops.get(tail) {
            return m.clone();
        }
        let m = Arc::new(self.real.output_operator(tail));
        self.ops.insert(tail.to_vec(), m.clone());
        m
    }
}

fn split_point(p: &[i64], d: usize) -> (Vec<i64>, Vec<i64>) {
    (p[..d].to_vec(), p[d..].to_vec())
}

/// The box of initial-condition samples needed to evaluate the solution
/// formula on `out_box`: the head range widened by the exact supports of
/// the output operators over every tail in the box.
pub fn required_input_box(
    real: &FirstOrderRealization,
    out_lo: &[i64],
    out_hi: &[i64],
) -> (Vec<i64>, Vec<i64>) {
    let d = real.d;
    let points = box_points(out_lo, out_hi);
    let mut cache = OperatorCache::new(real);
    let mut lo = vec![i64::MAX; d];
    let mut hi = vec![i64::MIN; d];
    let mut seen = false;
    for p in &points {
        let (head, tail) = split_point(p, d);
        let op = cache.get(&tail);
        let (mins, maxs) = operator_offsets(&op).unwrap_or_else(|| (vec![0; d], vec![0; d]));
        for ax in 0..d {
            lo[ax] = lo[ax].min(head[ax] + mins[ax]);
            hi[ax] = hi[ax].max(head[ax] + maxs[ax]);
        }
        seen = true;
    }
    if !seen || d == 0 {
        return (Vec::new(), Vec::new());
    }
    (lo, hi)
}

fn box_points(lo: &[i64], hi: &[i64]) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for (a, b) in lo.iter().zip(hi) {
        let mut next = Vec::new();
        for p in &out {
            for v in *a..=*b {
                let mut p2 = p.clone();
                p2.push(v);
                next.push(p2);
            }
        }
        out = next;
    }
    out
}

/// Evaluate the solution formula `w(nu) = (C prod A_i^{nu_{d+i}} x)(head)`
/// at an explicit list of full-dimensional points, returning the values in
/// input order.
fn evaluate_at_points(
    real: &FirstOrderRealization,
    x: &TrajectoryWindow,
    points: &[Vec<i64>],
    mode: EvalMode,
) -> Result<Vec<Vec<BigRational>>, WindowError> {
    let d = real.d;
    // materialize the operators sequentially for determinism, then fan out
    let mut cache = OperatorCache::new(real);
    let ops: Vec<Arc<LaurentMatrix>> = points.iter().map(|p| cache.get(&p[d..])).collect();
    // bounds check with the exact required box
    for (p, op) in points.iter().zip(&ops) {
        let (mins, maxs) = operator_offsets(op).unwrap_or_else(|| (vec![0; d], vec![0; d]));
        let need_lo: Vec<i64> = (0..d).map(|ax| p[ax] + mins[ax]).collect();
        let need_hi: Vec<i64> = (0..d).map(|ax| p[ax] + maxs[ax]).collect();
        if !x.contains_box(&need_lo, &need_hi) {
            return Err(WindowError::InsufficientSupport {
                needed: format!("{:?}..{:?}", need_lo, need_hi),
            });
        }
    }
    let vals = map_collect(mode, points.len(), |i| {
        let p = &points[i];
        let op = &ops[i];
        let head = &p[..d];
        let mut row_vals = Vec::with_capacity(op.nrows());
        for r in 0..op.nrows() {
            let mut acc = BigRational::zero();
            for j in 0..op.ncols() {
                for (e, c) in op.entry(r, j).terms() {
                    let q: Vec<i64> = head.iter().zip(&e.0).map(|(a, b)| a + b).collect();
                    acc += c * &x.get(&q)[j];
                }
            }
            row_vals.push(acc);
        }
        row_vals
    });
    Ok(vals)
}

/// Solution formula for a strongly relevant realization: exact `w` on the
/// requested box from a compatible initial-condition window.
pub fn solve_strongly_relevant(
    real: &FirstOrderRealization,
    x: &TrajectoryWindow,
    out_lo: &[i64],
    out_hi: &[i64],
    mode: EvalMode,
) -> Result<TrajectoryWindow, WindowError> {
    assert_eq!(out_lo.len(), real.n);
    if x.width() != real.gamma || x.dim() != real.d {
        return Err(WindowError::WidthMismatch {
            got: x.width(),
            expected: real.gamma,
        });
    }
    let (need_lo, need_hi) = required_input_box(real, out_lo, out_hi);
    if real.d > 0 && !x.contains_box(&need_lo, &need_hi) {
        return Err(WindowError::InsufficientSupport {
            needed: format!("{:?}..{:?}", need_lo, need_hi),
        });
    }
    if !check_compatibility(&real.x, x, mode)? {
        return Err(WindowError::Incompatible);
    }
    let points = box_points(out_lo, out_hi);
    let vals = evaluate_at_points(real, x, &points, mode)?;
    let mut out = TrajectoryWindow::zeros(out_lo.to_vec(), out_hi.to_vec(), real.q);
    for (p, v) in points.iter().zip(vals) {
        out.set(p, v);
    }
    Ok(out)
}

/// Renormalization: the pull-back `w(nu) = w~(T nu)` on the requested box.
pub fn renormalize(
    w_tilde: &TrajectoryWindow,
    t: &UnimodularTransform,
    out_lo: &[i64],
    out_hi: &[i64],
) -> Result<TrajectoryWindow, WindowError> {
    let n = w_tilde.dim();
    assert_eq!(t.n(), n);
    let points = box_points(out_lo, out_hi);
    let mut out = TrajectoryWindow::zeros(out_lo.to_vec(), out_hi.to_vec(), w_tilde.width());
    let mut need_lo = vec![i64::MAX; n];
    let mut need_hi = vec![i64::MIN; n];
    let mut missing = false;
    for p in &points {
        let tp = t.apply_exp(&ExpVec(p.clone()));
        for ax in 0..n {
            need_lo[ax] = need_lo[ax].min(tp.0[ax]);
            need_hi[ax] = need_hi[ax].max(tp.0[ax]);
        }
        if !w_tilde.contains_point(&tp.0) {
            missing = true;
        }
    }
    if missing {
        return Err(WindowError::MissingPullbackPoints {
            needed: format!("{:?}..{:?}", need_lo, need_hi),
        });
    }
    for p in &points {
        let tp = t.apply_exp(&ExpVec(p.clone()));
        out.set(p, w_tilde.get(&tp.0).to_vec());
    }
    Ok(out)
}

/// Everything produced by the general solver.
pub struct GeneralSolution {
    pub w: TrajectoryWindow,
    pub normalization: NormalizationResult,
    pub realization: FirstOrderRealization,
    pub x_used: TrajectoryWindow,
}

/// Errors from the end-to-end solver.
#[derive(Debug, thiserror::Error)]
pub enum SolveError {
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Window(#[from] WindowError),
}

/// Recursion plus renormalization from already-built parts: evaluate the
/// transformed solution exactly on the image point set `{T nu}` and pull it
/// back to the requested box. When no initial condition is supplied, a
/// compatible one is sampled with the given seed.
pub fn solve_realized(
    real: &FirstOrderRealization,
    t: &UnimodularTransform,
    x: Option<TrajectoryWindow>,
    out_lo: &[i64],
    out_hi: &[i64],
    seed: u64,
    mode: EvalMode,
) -> Result<(TrajectoryWindow, TrajectoryWindow), SolveError> {
    let points = box_points(out_lo, out_hi);
    let image: Vec<Vec<i64>> = points
        .iter()
        .map(|p| t.apply_exp(&ExpVec(p.clone())).0)
        .collect();
    // required x-box over the image tails
    let d = real.d;
    let mut need_lo = vec![i64::MAX; d];
    let mut need_hi = vec![i64::MIN; d];
    {
        let mut cache = OperatorCache::new(real);
        for p in &image {
            let op = cache.get(&p[d..]);
            let (mins, maxs) = operator_offsets(&op).unwrap_or_else(|| (vec![0; d], vec![0; d]));
            for ax in 0..d {
                need_lo[ax] = need_lo[ax].min(p[ax] + mins[ax]);
                need_hi[ax] = need_hi[ax].max(p[ax] + maxs[ax]);
            }
        }
        if d > 0 && need_lo[0] == i64::MAX {
            need_lo = vec![0; d];
            need_hi = vec![0; d];
        }
    }
    let x = match x {
        Some(x) => {
            if d > 0 && !x.contains_box(&need_lo, &need_hi) {
                return Err(WindowError::InsufficientSupport {
                    needed: format!("{:?}..{:?}", need_lo, need_hi),
                }
                .into());
            }
            if !check_compatibility(&real.x, &x, mode)? {
                return Err(WindowError::Incompatible.into());
            }
            x
        }
        None => sample_compatible(real, &need_lo, &need_hi, seed)?,
    };
    let vals = evaluate_at_points(real, &x, &image, mode)?;
    let mut w = TrajectoryWindow::zeros(out_lo.to_vec(), out_hi.to_vec(), real.q);
    for (p, v) in points.iter().zip(vals) {
        w.set(p, v);
    }
    Ok((w, x))
}

/// Full pipeline: normalization, regularization, recursion over the exact
/// image point set, and renormalization.
pub fn solve_general(
    sys: &EquationModule,
    x: Option<TrajectoryWindow>,
    out_lo: &[i64],
    out_hi: &[i64],
    opts: &NormalizeOptions,
    seed: u64,
    mode: EvalMode,
) -> Result<GeneralSolution, SolveError> {
    if !sys.is_autonomous() {
        return Err(PipelineError::NotAutonomous.into());
    }
    let norm = dnnl_module(sys, opts)?;
    let real = FirstOrderRealization::from_normalization(&norm)?;
    let (w, x_used) = solve_realized(&real, &norm.t, x, out_lo, out_hi, seed, mode)?;
    Ok(GeneralSolution {
        w,
        normalization: norm,
        realization: real,
        x_used,
    })
}

/// Rows of a position-echelon basis of the X row span (saturated, reduced
/// under a position-over-term order). Windowed kernels of such a basis are
/// restrictions of global state trajectories: the pivot recurrences march
/// every window sample out to all of the lattice.
fn echelon_state_rows(real: &FirstOrderRealization) -> Vec<Vec<LaurentPoly>> {
    use crate::groebner::{buchberger, ModOrder, Tracked};
    let xm = &real.x;
    if xm.nrows() == 0 {
        return Vec::new();
    }
    let d = real.d;
    let tracked = Tracked::from_laurent_rows(&xm.rows_vec(), d);
    let sat = crate::groebner::saturate_rows(
        tracked.gens,
        &crate::groebner::all_vars_product(d),
        real.gamma,
        d,
    );
    let gb = buchberger(&sat, &ModOrder::grevlex_pot(), false);
    gb.gens.iter().map(|g| g.comps().to_vec()).collect()
}

/// Sample an exact random element of the state space on the box: solve the
/// compatibility equations of the echelon basis over the samples and draw a
/// seeded rational combination of the nullspace basis.
pub fn sample_compatible(
    real: &FirstOrderRealization,
    lo: &[i64],
    hi: &[i64],
    seed: u64,
) -> Result<TrajectoryWindow, WindowError> {
    let gamma = real.gamma;
    let mut x = TrajectoryWindow::zeros(lo.to_vec(), hi.to_vec(), gamma);
    let npoints = x.num_points();
    let unknowns = npoints * gamma;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let index_of =
        |w: &TrajectoryWindow, p: &[i64], j: usize| -> usize { w.offset_of(p) * gamma + j };
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    for erow in echelon_state_rows(real) {
        let m = LaurentMatrix::from_rows(real.d, vec![erow]);
        let Some((mins, maxs)) = operator_offsets(&m) else {
            continue;
        };
        let clo: Vec<i64> = lo.iter().zip(&mins).map(|(a, b)| a - b).collect();
        let chi: Vec<i64> = hi.iter().zip(&maxs).map(|(a, b)| a - b).collect();
        if clo.iter().zip(&chi).any(|(a, b)| a > b) {
            continue;
        }
        for p in box_points(&clo, &chi) {
            let mut row = vec![BigRational::zero(); unknowns];
            for j in 0..gamma {
                for (e, c) in m.entry(0, j).terms() {
                    let q: Vec<i64> = p.iter().zip(&e.0).map(|(a, b)| a + b).collect();
                    row[index_of(&x, &q, j)] += c;
                }
            }
            rows.push(row);
        }
    }
    let sample: Vec<BigRational> = if rows.is_empty() {
        (0..unknowns)
            .map(|_| BigRational::from_integer(rng.gen_range(-5i64..=5).into()))
            .collect()
    } else {
        let basis = crate::linalg::nullspace(rows, unknowns);
        let mut acc = vec![BigRational::zero(); unknowns];
        for b in &basis {
            let k = BigRational::from_integer(rng.gen_range(-5i64..=5).into());
            if k.is_zero() {
                continue;
            }
            for (a, v) in acc.iter_mut().zip(b) {
                *a += v * &k;
            }
        }
        acc
    };
    x.values_mut().clone_from_slice(&sample);
    debug_assert!(check_compatibility(&real.x, &x, EvalMode::Sequential).unwrap_or(true));
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::parse_poly;
    use crate::realization::extract_certificates;

    fn p(n: usize, s: &str) -> LaurentPoly {
        parse_poly(n, s).unwrap()
    }

    fn q(v: i64) -> BigRational {
        BigRational::from_integer(v.into())
    }

    fn three_d_realization() -> FirstOrderRealization {
        let sys = EquationModule::ideal(
            3,
            vec![
                p(3, "s3^2 - 2*s3 + 1"),
                p(3, "s2^2 - 2*s2 + 1"),
                p(3, "s1*s3 - s1 - s2 - s3 + 2"),
            ],
        )
        .unwrap();
        let certs = extract_certificates(&sys, 1, None).unwrap();
        FirstOrderRealization::build(&sys, 1, certs).unwrap()
    }

    #[test]
    fn shift_operator_action() {
        // M = [s1] on [0,3]: output on [-1,2] with out(nu) = w(nu+1)
        let mut w = TrajectoryWindow::zeros(vec![0], vec![3], 1);
        for v in 0..=3i64 {
            w.set(&[v], vec![q(v * v)]);
        }
        let m = LaurentMatrix::from_rows(1, vec![vec![p(1, "s1")]]);
        let out = apply_operator(&m, &w, EvalMode::Sequential).unwrap();
        assert_eq!(out.lo(), &[-1]);
        assert_eq!(out.hi(), &[2]);
        for v in -1..=2i64 {
            assert_eq!(out.get(&[v])[0], q((v + 1) * (v + 1)));
        }
        // identity leaves the window unchanged
        let id = LaurentMatrix::identity(1, 1);
        assert_eq!(apply_operator(&id, &w, EvalMode::Sequential).unwrap(), w);
    }

    #[test]
    fn window_exhaustion_reports_padding() {
        let w = TrajectoryWindow::zeros(vec![0], vec![1], 1);
        let m = LaurentMatrix::from_rows(1, vec![vec![p(1, "s1^3 - 1")]]);
        match apply_operator(&m, &w, EvalMode::Sequential) {
            Err(WindowError::Exhausted { padding }) => assert_eq!(padding, vec![(0, 2)]),
            other => panic!("expected exhaustion, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn compatibility_on_constant_states() {
        let real = three_d_realization();
        // x = col(a,a,a,a) constant in nu_1 satisfies both relation rows
        let mut x = TrajectoryWindow::zeros(vec![-2], vec![2], 4);
        for v in -2..=2i64 {
            x.set(&[v], vec![q(7), q(7), q(7), q(7)]);
        }
        assert!(check_compatibility(&real.x, &x, EvalMode::Sequential).unwrap());
        // a random window is generically incompatible
        let mut y = TrajectoryWindow::zeros(vec![-2], vec![2], 4);
        let mut k = 1i64;
        for v in -2..=2i64 {
            y.set(&[v], vec![q(k), q(2 * k + 1), q(3 * k), q(k - 4)]);
            k += 3;
        }
        assert!(!check_compatibility(&real.x, &y, EvalMode::Sequential).unwrap());
        // empty X is vacuously compatible
        let empty = LaurentMatrix::empty(1, 4);
        assert!(check_compatibility(&empty, &y, EvalMode::Sequential).unwrap());
    }

    #[test]
    fn d0_solution_matches_closed_form() {
        let sys = EquationModule::ideal(2, vec![p(2, "s1 - 2"), p(2, "s2 - 3")]).unwrap();
        let sol = solve_general(
            &sys,
            None,
            &[-4, -4],
            &[4, 4],
            &NormalizeOptions::default(),
            99,
            EvalMode::Sequential,
        )
        .unwrap();
        // w(nu) = w(0,0) * 2^{nu1} 3^{nu2}
        let w0 = sol.w.get(&[0, 0])[0].clone();
        assert!(!w0.is_zero());
        for p0 in -4..=4i64 {
            for p1 in -4..=4i64 {
                let expected = &w0 * pow_rat(2, p0) * pow_rat(3, p1);
                assert_eq!(sol.w.get(&[p0, p1])[0], expected);
            }
        }
        let report = verify_solution(&sys, &sol.w, EvalMode::Sequential).unwrap();
        assert!(report.is_exact());
    }

    fn pow_rat(base: i64, e: i64) -> BigRational {
        let b = BigRational::from_integer(base.into());
        if e >= 0 {
            num_traits::pow::pow(b, e as usize)
        } else {
            num_traits::pow::pow(b.recip(), (-e) as usize)
        }
    }

    #[test]
    fn strongly_relevant_solution_verifies() {
        let real = three_d_realization();
        let (lo, hi) = required_input_box(&real, &[-2, -2, -2], &[2, 2, 2]);
        let x = sample_compatible(&real, &lo, &hi, 5).unwrap();
        let w = solve_strongly_relevant(&real, &x, &[-2, -2, -2], &[2, 2, 2], EvalMode::Sequential)
            .unwrap();
        let report = verify_solution(&real.system, &w, EvalMode::Sequential).unwrap();
        assert!(report.is_exact());
        // nu_tail = 0 reduces to w = (C x)(head)
        for h in -2..=2i64 {
            assert_eq!(w.get(&[h, 0, 0])[0], x.get(&[h])[0]);
        }
    }

    #[test]
    fn flow_property_and_backward_consistency() {
        let real = three_d_realization();
        let (lo, hi) = required_input_box(&real, &[0, -2, -2], &[0, 2, 2]);
        let x = sample_compatible(&real, &lo, &hi, 11).unwrap();
        // evaluate states via powers and check the one-step flow relations
        for tail in [[0i64, 0], [1, 0], [0, 1], [-1, 1]] {
            for j in 0..2usize {
                let mut up = tail;
                up[j] += 1;
                let op_up = real
                    .output_operator(&up)
                    .mul(&LaurentMatrix::identity(1, real.gamma))
                    .unwrap();
                let op_a = real.output_operator(&tail).mul(&real.a[j]).unwrap();
                assert_eq!(op_up, op_a);
            }
        }
        // order independence of the power product
        let op_a = real
            .companion_power(0, 2)
            .mul(&real.companion_power(1, -1))
            .unwrap();
        let op_b = real
            .companion_power(1, -1)
            .mul(&real.companion_power(0, 2))
            .unwrap();
        assert_eq!(op_a, op_b);
        // and on actual state values: x(tau + e_j) = A_j x(tau) pointwise
        let state_at = |tail: &[i64], head: i64| -> Vec<BigRational> {
            let op = real.state_operator(tail);
            (0..real.gamma)
                .map(|r| {
                    let mut acc = BigRational::zero();
                    for j in 0..real.gamma {
                        for (e, c) in op.entry(r, j).terms() {
                            acc += c * &x.get(&[head + e.0[0]])[j];
                        }
                    }
                    acc
                })
                .collect()
        };
        for tail in [[0i64, 0], [1, -1]] {
            for j in 0..2usize {
                let mut up = tail;
                up[j] += 1;
                let here = state_at(&tail, 0);
                let there = state_at(&up, 0);
                // A_j is constant here, so the flow relation is a plain
                // matrix-vector product on the samples
                let applied: Vec<BigRational> = (0..real.gamma)
                    .map(|r| {
                        (0..real.gamma)
                            .map(|k| real.a[j].entry(r, k).coeff(&ExpVec(vec![0])) * &here[k])
                            .sum()
                    })
                    .collect();
                assert_eq!(applied, there);
            }
        }
    }

    #[test]
    fn quotient_action_through_lifts() {
        // two lifts of the same class act identically on a solved trajectory
        let real = three_d_realization();
        let sys = real.system.clone();
        let (lo, hi) = required_input_box(&real, &[-4, -4, -4], &[4, 4, 4]);
        let x = sample_compatible(&real, &lo, &hi, 77).unwrap();
        let w = solve_strongly_relevant(&real, &x, &[-4, -4, -4], &[4, 4, 4], EvalMode::Sequential)
            .unwrap();
        let lift_a = vec![p(3, "s2 + s1^-1")];
        let lift_b = vec![lift_a[0].add(&sys.rows()[1][0])];
        let out_a = act_on_trajectory(&lift_a, &w, EvalMode::Sequential).unwrap();
        let out_b = act_on_trajectory(&lift_b, &w, EvalMode::Sequential).unwrap();
        let common = out_b.restrict(out_b.lo(), out_b.hi()).unwrap();
        let out_a_common = out_a.restrict(common.lo(), common.hi()).unwrap();
        assert_eq!(out_a_common, common);
        // identity lift leaves the window unchanged; a pure shift translates it
        let id_out = act_on_trajectory(&[p(3, "1")], &w, EvalMode::Sequential).unwrap();
        assert_eq!(id_out, w);
        let shifted = act_on_trajectory(&[p(3, "s1")], &w, EvalMode::Sequential).unwrap();
        for pt in [[0i64, 0, 0], [-1, 2, 1]] {
            let moved = [pt[0] + 1, pt[1], pt[2]];
            assert_eq!(shifted.get(&pt)[0], w.get(&moved)[0]);
        }
    }

    #[test]
    fn action_is_bilinear() {
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(88);
        let rand_lift = |rng: &mut ChaCha8Rng| {
            let mut f = LaurentPoly::zero(2);
            for _ in 0..2 {
                let e = ExpVec(vec![rng.gen_range(-1..2), rng.gen_range(-1..2)]);
                f = f.add(&LaurentPoly::monomial(2, e, q(rng.gen_range(-3..4))));
            }
            f
        };
        let mut w1 = TrajectoryWindow::zeros(vec![-3, -3], vec![3, 3], 1);
        let mut w2 = w1.clone();
        let v1: Vec<BigRational> = (0..w1.num_points())
            .map(|_| q(rng.gen_range(-5..6)))
            .collect();
        let v2: Vec<BigRational> = (0..w2.num_points())
            .map(|_| q(rng.gen_range(-5..6)))
            .collect();
        w1.values_mut().clone_from_slice(&v1);
        w2.values_mut().clone_from_slice(&v2);
        for _ in 0..10 {
            let m1 = rand_lift(&mut rng);
            let m2 = rand_lift(&mut rng);
            // linear in the lift
            let both = act_on_trajectory(&[m1.add(&m2)], &w1, EvalMode::Sequential).unwrap();
            let a = act_on_trajectory(&[m1.clone()], &w1, EvalMode::Sequential).unwrap();
            let b = act_on_trajectory(&[m2.clone()], &w1, EvalMode::Sequential).unwrap();
            let a_c = a.restrict(both.lo(), both.hi()).unwrap();
            let b_c = b.restrict(both.lo(), both.hi()).unwrap();
            for i in 0..both.num_points() {
                let pt = both.point_at(i);
                assert_eq!(both.get(&pt)[0], &a_c.get(&pt)[0] + &b_c.get(&pt)[0]);
            }
            // linear in the window
            let mut sum = w1.clone();
            let sv: Vec<BigRational> = w1
                .values()
                .iter()
                .zip(w2.values())
                .map(|(x, y)| x + y)
                .collect();
            sum.values_mut().clone_from_slice(&sv);
            let on_sum = act_on_trajectory(&[m1.clone()], &sum, EvalMode::Sequential).unwrap();
            let on_1 = act_on_trajectory(&[m1.clone()], &w1, EvalMode::Sequential).unwrap();
            let on_2 = act_on_trajectory(&[m1.clone()], &w2, EvalMode::Sequential).unwrap();
            for i in 0..on_sum.num_points() {
                let pt = on_sum.point_at(i);
                assert_eq!(on_sum.get(&pt)[0], &on_1.get(&pt)[0] + &on_2.get(&pt)[0]);
            }
        }
    }

    #[test]
    fn backward_forward_consistency() {
        // solving out to nu and applying A_i^{-1} returns the nu - e_i slice
        let real = three_d_realization();
        let (lo, hi) = required_input_box(&real, &[-3, -3, -3], &[3, 3, 3]);
        let x = sample_compatible(&real, &lo, &hi, 55).unwrap();
        let state_at = |tail: &[i64], head: i64| -> Vec<BigRational> {
            let op = real.state_operator(tail);
            (0..real.gamma)
                .map(|r| {
                    let mut acc = BigRational::zero();
                    for j in 0..real.gamma {
                        for (e, c) in op.entry(r, j).terms() {
                            acc += c * &x.get(&[head + e.0[0]])[j];
                        }
                    }
                    acc
                })
                .collect()
        };
        for tail in [[2i64, 1], [0, 2], [-1, -1]] {
            for j in 0..2usize {
                let mut prev = tail;
                prev[j] -= 1;
                // operator route: A_j^{-1} after the full power product
                let op_here = real
                    .companion_power(0, tail[0])
                    .mul(&real.companion_power(1, tail[1]))
                    .unwrap();
                let back = real.a_inv[j].mul(&op_here).unwrap();
                let op_prev = real
                    .companion_power(0, prev[0])
                    .mul(&real.companion_power(1, prev[1]))
                    .unwrap();
                assert_eq!(back, op_prev);
                // value route: applying A_j^{-1} to the state at tail
                // reproduces the state one step back (constant inverses here)
                let here = state_at(&tail, 0);
                let stepped: Vec<BigRational> = (0..real.gamma)
                    .map(|r| {
                        (0..real.gamma)
                            .map(|k| real.a_inv[j].entry(r, k).coeff(&ExpVec(vec![0])) * &here[k])
                            .sum()
                    })
                    .collect();
                assert_eq!(stepped, state_at(&prev, 0));
            }
        }
    }

    #[test]
    fn renormalize_identity_and_point_mass() {
        let mut w = TrajectoryWindow::zeros(vec![-2, -2], vec![2, 2], 1);
        w.set(&[0, 0], vec![q(1)]);
        let id = UnimodularTransform::identity(2);
        let r = renormalize(&w, &id, &[-1, -1], &[1, 1]).unwrap();
        assert_eq!(r.get(&[0, 0])[0], q(1));
        assert_eq!(r.get(&[1, 1])[0], q(0));
        // point mass at the origin is fixed by any unimodular pull-back
        let t = UnimodularTransform::new(vec![vec![1, 0], vec![2, 1]]).unwrap();
        let mut big = TrajectoryWindow::zeros(vec![-3, -9], vec![3, 9], 1);
        big.set(&[0, 0], vec![q(1)]);
        let r = renormalize(&big, &t, &[-1, -1], &[1, 1]).unwrap();
        assert_eq!(r.get(&[0, 0])[0], q(1));
        for pt in [[1i64, 0], [0, 1], [1, 1], [-1, 0]] {
            assert_eq!(r.get(&pt)[0], q(0));
        }
        // missing points are rejected with the needed box
        assert!(matches!(
            renormalize(&w, &t, &[-2, -2], &[2, 2]),
            Err(WindowError::MissingPullbackPoints { .. })
        ));
    }

    #[test]
    fn full_pipeline_on_non_strongly_relevant_system() {
        let sys = EquationModule::ideal(2, vec![p(2, "s1*s2 - s1 - s2 + 1")]).unwrap();
        let sol = solve_general(
            &sys,
            None,
            &[-3, -3],
            &[3, 3],
            &NormalizeOptions::default(),
            17,
            EvalMode::Sequential,
        )
        .unwrap();
        assert_eq!(sol.normalization.t.matrix(), &[vec![1, 0], vec![2, 1]]);
        let report = verify_solution(&sys, &sol.w, EvalMode::Sequential).unwrap();
        assert!(report.is_exact());
        assert!(report.points_checked > 0);
    }

    #[test]
    fn pull_back_operator_identity() {
        use crate::dnnl::random_elementary_transform;
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for case in 0..10u64 {
            let t = random_elementary_transform(2, 3, 300 + case);
            // random operator row with small support
            let mut r = LaurentPoly::zero(2);
            for _ in 0..3 {
                let e = ExpVec(vec![rng.gen_range(-1..2), rng.gen_range(-1..2)]);
                r = r.add(&LaurentPoly::monomial(2, e, q(rng.gen_range(-3..4))));
            }
            // a random trajectory on the exact box both routes need:
            // the image of [-8,8]^2 under T (corner bounding box)
            let mut blo = vec![i64::MAX; 2];
            let mut bhi = vec![i64::MIN; 2];
            for cx in [-8i64, 8] {
                for cy in [-8i64, 8] {
                    let tp = t.apply_exp(&ExpVec(vec![cx, cy]));
                    for ax in 0..2 {
                        blo[ax] = blo[ax].min(tp.0[ax]);
                        bhi[ax] = bhi[ax].max(tp.0[ax]);
                    }
                }
            }
            let mut w = TrajectoryWindow::zeros(blo, bhi, 1);
            let vals: Vec<BigRational> = (0..w.num_points())
                .map(|_| q(rng.gen_range(-9..10)))
                .collect();
            w.values_mut().clone_from_slice(&vals);
            let v = renormalize(&w, &t, &[-6, -6], &[6, 6]).unwrap();
            let m = LaurentMatrix::from_rows(2, vec![vec![r.clone()]]);
            let lhs = apply_operator(&m, &v, EvalMode::Sequential).unwrap();
            let phi_m = LaurentMatrix::from_rows(2, vec![vec![t.phi_poly(&r)]]);
            let u = apply_operator(&phi_m, &w, EvalMode::Sequential).unwrap();
            let rhs = renormalize(&u, &t, lhs.lo(), lhs.hi()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn latent_representation_annihilates_stacked_trajectories() {
        // the exported block matrix applied to col(state, w) vanishes on the
        // window, cross-checking the latent export against the solver
        let real = three_d_realization();
        let (lo, hi) = required_input_box(&real, &[-3, -3, -3], &[3, 3, 3]);
        let x = sample_compatible(&real, &lo, &hi, 41).unwrap();
        let w = solve_strongly_relevant(&real, &x, &[-3, -3, -3], &[3, 3, 3], EvalMode::Sequential)
            .unwrap();
        // stacked window: state identified as an n-D trajectory, then w
        let mut z = TrajectoryWindow::zeros(vec![-3, -3, -3], vec![3, 3, 3], real.gamma + 1);
        for i in 0..z.num_points() {
            let pt = z.point_at(i);
            let op = real.state_operator(&pt[1..]);
            let mut vals = Vec::with_capacity(real.gamma + 1);
            for r in 0..real.gamma {
                let mut acc = BigRational::zero();
                for j in 0..real.gamma {
                    for (e, c) in op.entry(r, j).terms() {
                        acc += c * &x.get(&[pt[0] + e.0[0]])[j];
                    }
                }
                vals.push(acc);
            }
            vals.push(w.get(&pt)[0].clone());
            z.set(&pt, vals);
        }
        let latent = real.export_latent();
        let res = apply_operator(&latent, &z, EvalMode::Sequential).unwrap();
        assert!(res.is_zero());
    }

    #[test]
    fn module_system_end_to_end() {
        // the two-variable module example (q = 2) through the full pipeline
        let sys = EquationModule::new(
            2,
            2,
            vec![
                vec![p(2, "s1 - 1"), p(2, "2")],
                vec![p(2, "1"), p(2, "s2 - 1")],
            ],
        )
        .unwrap();
        let sol = solve_general(
            &sys,
            None,
            &[-2, -2],
            &[2, 2],
            &NormalizeOptions::default(),
            13,
            EvalMode::Sequential,
        )
        .unwrap();
        assert_eq!(sol.w.width(), 2);
        let report = verify_solution(&sys, &sol.w, EvalMode::Sequential).unwrap();
        assert!(report.is_exact());
        assert!(report.points_checked > 0);
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let real = three_d_realization();
        let (lo, hi) = required_input_box(&real, &[-2, -2, -2], &[2, 2, 2]);
        let x = sample_compatible(&real, &lo, &hi, 31).unwrap();
        let a = solve_strongly_relevant(&real, &x, &[-2, -2, -2], &[2, 2, 2], EvalMode::Sequential)
            .unwrap();
        let b = solve_strongly_relevant(&real, &x, &[-2, -2, -2], &[2, 2, 2], EvalMode::Parallel)
            .unwrap();
        assert_eq!(a, b);
        let ra = verify_solution(&real.system, &a, EvalMode::Sequential).unwrap();
        let rb = verify_solution(&real.system, &b, EvalMode::Parallel).unwrap();
        assert_eq!(ra.max_residual, rb.max_residual);
        assert_eq!(ra.points_checked, rb.points_checked);
    }

    #[test]
    fn one_d_system_degenerates_cleanly() {
        // the classical 1-D case: ker(s1 - 2) has d = 0 and w(k) = w(0) 2^k
        let sys = EquationModule::ideal(1, vec![p(1, "s1 - 2")]).unwrap();
        let sol = solve_general(
            &sys,
            None,
            &[-3],
            &[3],
            &NormalizeOptions::default(),
            2,
            EvalMode::Sequential,
        )
        .unwrap();
        assert_eq!(sol.normalization.d, 0);
        assert_eq!(sol.realization.gamma, 1);
        let w0 = sol.w.get(&[0])[0].clone();
        for k in -3..=3i64 {
            let expected = &w0 * pow_rat(2, k);
            assert_eq!(sol.w.get(&[k])[0], expected);
        }
        assert!(verify_solution(&sys, &sol.w, EvalMode::Sequential)
            .unwrap()
            .is_exact());
    }

    #[test]
    fn malformed_certificates_are_rejected() {
        use crate::dnnl::IntegralityCertificate;
        let sys = EquationModule::ideal(2, vec![p(2, "s1*s2^3 - s1*s2^2 - s2 + 1")]).unwrap();
        // tail coefficient is not a unit
        let bad = IntegralityCertificate {
            var: 1,
            poly: p(2, "s2^2 + s1*s2 + s1 + 1"),
            degree: 2,
        };
        assert!(FirstOrderRealization::build(&sys, 1, vec![bad]).is_err());
        // wrong variable coverage
        let misplaced = IntegralityCertificate {
            var: 0,
            poly: p(2, "s1 - 1"),
            degree: 1,
        };
        assert!(FirstOrderRealization::build(&sys, 1, vec![misplaced]).is_err());
    }

    #[test]
    fn verifier_detects_perturbation() {
        let sys = EquationModule::ideal(2, vec![p(2, "s1 - 2"), p(2, "s2 - 3")]).unwrap();
        let sol = solve_general(
            &sys,
            None,
            &[-2, -2],
            &[2, 2],
            &NormalizeOptions::default(),
            3,
            EvalMode::Sequential,
        )
        .unwrap();
        let mut w = sol.w.clone();
        let base = w.get(&[0, 0])[0].clone();
        w.set(&[0, 0], vec![base + q(1)]);
        let report = verify_solution(&sys, &w, EvalMode::Sequential).unwrap();
        assert!(!report.is_exact());
        // the zero window is always a solution
        let z = TrajectoryWindow::zeros(vec![-2, -2], vec![2, 2], 1);
        assert!(verify_solution(&sys, &z, EvalMode::Sequential)
            .unwrap()
            .is_exact());
    }

    #[test]
    fn required_box_matches_exact_supports() {
        let real = three_d_realization();
        // constant companions: the x-box equals the head range
        let (lo, hi) = required_input_box(&real, &[-3, 0, 0], &[3, 5, 5]);
        assert_eq!((lo, hi), (vec![-3], vec![3]));
        // d = 0: empty box
        let sys = EquationModule::ideal(2, vec![p(2, "s1 - 2"), p(2, "s2 - 3")]).unwrap();
        let norm = dnnl_module(&sys, &NormalizeOptions::default()).unwrap();
        let real0 = FirstOrderRealization::from_normalization(&norm).unwrap();
        let (lo, hi) = required_input_box(&real0, &[0, 0], &[2, 2]);
        assert!(lo.is_empty() && hi.is_empty());
        // a realization with sigma_1-dependent companions widens the box by
        // the exact support of the powers: compare against direct products
        let sys2 = EquationModule::ideal(2, vec![p(2, "s1*s2 - s1 - s2 + 1")]).unwrap();
        let norm2 = dnnl_module(&sys2, &NormalizeOptions::default()).unwrap();
        let real2 = FirstOrderRealization::from_normalization(&norm2).unwrap();
        let n_pow = 5i64;
        let (lo2, hi2) = required_input_box(&real2, &[0, n_pow], &[0, n_pow]);
        let mut direct = real2.c.clone();
        for _ in 0..n_pow {
            direct = direct.mul(&real2.a[0]).unwrap();
        }
        let (mins, maxs) = operator_offsets(&direct).unwrap();
        assert_eq!(lo2, mins);
        assert_eq!(hi2, maxs);
    }
}
