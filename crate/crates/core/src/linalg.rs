//! Exact linear algebra over Z and Q used by the lattice layer.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Solves `x * rows^T = rhs`, i.e. `sum_j rows[i][j] * x[j] = rhs[i]` for every i,
/// over Q. Returns one particular solution (free variables set to zero) or `None`
/// when the system is inconsistent.
pub fn solve_rational(
    rows: &[Vec<BigRational>],
    rhs: &[BigRational],
    unknowns: usize,
) -> Option<Vec<BigRational>> {
    let mut m: Vec<Vec<BigRational>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut row = r.clone();
            row.push(b.clone());
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..unknowns {
        let Some(pr) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, pr);
        let lead = m[r][c].clone();
        for x in m[r].iter_mut() {
            *x = &*x / &lead;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row[c..=unknowns].iter_mut().zip(&pivot_row[c..=unknowns]) {
                    *x = &*x - &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    if m[r..].iter().any(|row| !row[unknowns].is_zero()) {
        return None;
    }
    let mut x = vec![BigRational::zero(); unknowns];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = m[i][unknowns].clone();
    }
    Some(x)
}

pub fn rat(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// Integer basis of `{x in Z^N : sum_i x_i * rows[i] = 0}` for `N = rows.len()`
/// row vectors of length `n`, by unimodular row reduction of `[rows | I]`.
pub fn integer_left_kernel(rows: &[Vec<i64>], n: usize) -> Vec<Vec<i64>> {
    let big_n = rows.len();
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row: Vec<i128> = r.iter().map(|&x| x as i128).collect();
            row.extend((0..big_n).map(|j| i128::from(i == j)));
            row
        })
        .collect();
    let mut top = 0;
    for c in 0..n {
        while let Some(pr) = (top..big_n)
            .filter(|&i| m[i][c] != 0)
            .min_by_key(|&i| m[i][c].abs())
        {
            m.swap(top, pr);
            let mut done = true;
            for i in top + 1..big_n {
                if m[i][c] != 0 {
                    let q = m[i][c].div_euclid(m[top][c]);
                    let (head, tail) = m.split_at_mut(i);
                    for (x, y) in tail[0].iter_mut().zip(&head[top]) {
                        *x -= q * y;
                    }
                    if m[i][c] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                top += 1;
                break;
            }
        }
        if top == big_n {
            break;
        }
    }
    let mut basis: Vec<Vec<i64>> = m[top..]
        .iter()
        .map(|row| row[n..].iter().map(|&x| x as i64).collect())
        .collect();
    size_reduce(&mut basis);
    for b in basis.iter_mut() {
        if b.iter().rev().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
            b.iter_mut().for_each(|x| *x = -*x);
        }
    }
    basis.sort();
    basis
}

fn norm1(v: &[i64]) -> i64 {
    v.iter().map(|x| x.abs()).sum()
}

/// Greedy pairwise reduction: replace b_i by b_i -/+ b_j while the 1-norm drops.
fn size_reduce(basis: &mut [Vec<i64>]) {
    let mut improved = true;
    while improved {
        improved = false;
        for i in 0..basis.len() {
            for j in 0..basis.len() {
                if i == j {
                    continue;
                }
                for sign in [1i64, -1] {
                    let cand: Vec<i64> = basis[i]
                        .iter()
                        .zip(&basis[j])
                        .map(|(x, y)| x - sign * y)
                        .collect();
                    if norm1(&cand) < norm1(&basis[i]) {
                        basis[i] = cand;
                        improved = true;
                    }
                }
            }
        }
    }
}

/// Coordinates of `target` in the span of `basis` over Q, if it lies there.
pub fn rational_coordinates(basis: &[Vec<i64>], target: &[i64]) -> Option<Vec<BigRational>> {
    let n = target.len();
    // one equation per coordinate: sum_k c_k basis[k][j] = target[j]
    let rows: Vec<Vec<BigRational>> = (0..n)
        .map(|j| basis.iter().map(|b| rat(b[j])).collect())
        .collect();
    let rhs: Vec<BigRational> = target.iter().map(|&x| rat(x)).collect();
    solve_rational(&rows, &rhs, basis.len())
}

pub fn is_integral(x: &BigRational) -> bool {
    x.denom().is_one() || x.denom().abs().is_one()
}
