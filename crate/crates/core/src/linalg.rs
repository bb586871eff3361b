//! Dense exact linear algebra over the rationals and the integers.
//!
//! Small helper kernels: reduced row echelon form, nullspace bases, and
//! particular solutions for the window samplers and certificate searches;
//! integer determinants and adjugate inverses for lattice transforms.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Reduced row echelon form in place; returns the pivot column of each
/// pivot row, in order.
pub fn rref(m: &mut [Vec<BigRational>]) -> Vec<usize> {
    let nr = m.len();
    if nr == 0 {
        return Vec::new();
    }
    let nc = m[0].len();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..nc {
        let Some(pr) = (row..nr).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, pr);
        let inv = m[row][col].recip();
        for j in col..nc {
            m[row][j] = &m[row][j] * &inv;
        }
        for r in 0..nr {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for j in col..nc {
                    let sub = &m[row][j] * &f;
                    m[r][j] = &m[r][j] - &sub;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == nr {
            break;
        }
    }
    pivots
}

/// Basis of the right nullspace of `m` (one vector per free column).
pub fn nullspace(mut m: Vec<Vec<BigRational>>, ncols: usize) -> Vec<Vec<BigRational>> {
    let pivots = rref(&mut m);
    let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
    let mut basis = Vec::new();
    for free in 0..ncols {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![BigRational::zero(); ncols];
        v[free] = BigRational::one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = -m[r][free].clone();
        }
        basis.push(v);
    }
    basis
}

/// One solution of `m x = rhs`, or `None` when inconsistent.
pub fn solve(
    m: &[Vec<BigRational>],
    rhs: &[BigRational],
    ncols: usize,
) -> Option<Vec<BigRational>> {
    let mut aug: Vec<Vec<BigRational>> = m
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    // inconsistent when a pivot lands in the augmented column
    if pivots.contains(&ncols) {
        return None;
    }
    let mut x = vec![BigRational::zero(); ncols];
    for (r, &pc) in pivots.iter().enumerate() {
        x[pc] = aug[r][ncols].clone();
    }
    Some(x)
}

/// Exact integer determinant by fraction-free elimination.
pub fn int_det(m: &[Vec<i64>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = m
        .iter()
        .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
        .collect();
    let mut prev = BigInt::one();
    let mut sign = false;
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = !sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &a[k][k] * &a[i][j] - &a[i][k] * &a[k][j];
                a[i][j] = num / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if sign {
        -d
    } else {
        d
    }
}

/// Inverse of an integer matrix with determinant +-1.
pub fn unimodular_inverse(m: &[Vec<i64>]) -> Option<Vec<Vec<i64>>> {
    let n = m.len();
    let det = int_det(m);
    if det.magnitude() != &BigInt::one().magnitude().clone() {
        return None;
    }
    let det_sign: i64 = if det.is_negative() { -1 } else { 1 };
    if n == 0 {
        return Some(Vec::new());
    }
    let mut inv = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in 0..n {
            let sub: Vec<Vec<i64>> = (0..n)
                .filter(|&r| r != j)
                .map(|r| (0..n).filter(|&c| c != i).map(|c| m[r][c]).collect())
                .collect();
            let mut c = if n == 1 { BigInt::one() } else { int_det(&sub) };
            if (i + j) % 2 == 1 {
                c = -c;
            }
            let v: BigInt = c * det_sign;
            inv[i][j] = i64::try_from(&v).expect("unimodular inverse entry fits in i64");
        }
    }
    Some(inv)
}
