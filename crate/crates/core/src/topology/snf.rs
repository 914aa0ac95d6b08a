//! Smith normal form of integer matrices.
//!
//! Dense elimination pivoting on the entry of least absolute value. Runs in
//! `i128` first and falls back to arbitrary precision on overflow.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};

/// Invariant factors `d1 | d2 | …` of `m`, padded with zeros to
/// `min(rows, cols)` entries. All entries are nonnegative.
pub fn smith_normal_form(m: &[Vec<i64>]) -> Vec<BigInt> {
    let wide: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    smith_normal_form_i128(wide)
}

pub(crate) fn smith_normal_form_i128(m: Vec<Vec<i128>>) -> Vec<BigInt> {
    match snf_in_place(m.clone()) {
        Some(d) => d.into_iter().map(BigInt::from).collect(),
        None => {
            let big: Vec<Vec<BigInt>> = m
                .into_iter()
                .map(|r| r.into_iter().map(BigInt::from).collect())
                .collect();
            snf_in_place(big).expect("arbitrary precision cannot overflow")
        }
    }
}

/// Returns `None` if an intermediate value overflows `T`.
fn snf_in_place<T>(mut a: Vec<Vec<T>>) -> Option<Vec<T>>
where
    T: Integer + Signed + Clone + CheckedMul + CheckedSub,
{
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let size = rows.min(cols);
    let mut diag = Vec::with_capacity(size);

    for t in 0..size {
        let Some((pi, pj)) = min_abs_entry(&a, t, rows, cols) else {
            diag.resize(size, T::zero());
            return Some(diag);
        };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut clean = true;
            for i in t + 1..rows {
                if !a[i][t].is_zero() {
                    let q = a[i][t].div_floor(&a[t][t]);
                    for j in t..cols {
                        let sub = q.checked_mul(&a[t][j])?;
                        a[i][j] = a[i][j].checked_sub(&sub)?;
                    }
                    clean &= a[i][t].is_zero();
                }
            }
            for j in t + 1..cols {
                if !a[t][j].is_zero() {
                    let q = a[t][j].div_floor(&a[t][t]);
                    for i in t..rows {
                        let sub = q.checked_mul(&a[i][t])?;
                        a[i][j] = a[i][j].checked_sub(&sub)?;
                    }
                    clean &= a[t][j].is_zero();
                }
            }
            if !clean {
                // a smaller remainder sits in row or column t; make it the pivot
                let mut best = (t, t);
                for i in t + 1..rows {
                    if !a[i][t].is_zero() && a[i][t].abs() < a[best.0][best.1].abs() {
                        best = (i, t);
                    }
                }
                for j in t + 1..cols {
                    if !a[t][j].is_zero() && a[t][j].abs() < a[best.0][best.1].abs() {
                        best = (t, j);
                    }
                }
                if best.0 != t {
                    a.swap(t, best.0);
                } else if best.1 != t {
                    for row in a.iter_mut() {
                        row.swap(t, best.1);
                    }
                }
                continue;
            }
            // divisibility: pull a non-multiple into row t and retry
            let p = a[t][t].clone();
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a[i][j].is_multiple_of(&p)));
            match bad {
                Some(i) => {
                    for j in t..cols {
                        a[t][j] = a[t][j].clone() + a[i][j].clone();
                    }
                }
                None => break,
            }
        }
        diag.push(a[t][t].abs());
    }
    Some(diag)
}

fn min_abs_entry<T: Signed + Clone + PartialOrd>(a: &[Vec<T>], t: usize, rows: usize, cols: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..rows {
        for j in t..cols {
            if a[i][j].is_zero() {
                continue;
            }
            match best {
                Some((bi, bj)) if a[i][j].abs() >= a[bi][bj].abs() => {}
                _ => best = Some((i, j)),
            }
            if a[i][j].abs().is_one() {
                return best;
            }
        }
    }
    best
}

/// Rank of an integer matrix modulo a prime `p < 2^62`.
pub(crate) fn rank_mod_p(m: &[Vec<i128>], p: u64) -> usize {
    let p128 = p as i128;
    let mut a: Vec<Vec<u64>> = m
        .iter()
        .map(|r| r.iter().map(|&x| x.rem_euclid(p128) as u64).collect())
        .collect();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mulmod = |x: u64, y: u64| ((x as u128 * y as u128) % p as u128) as u64;
    let powmod = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(acc, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        acc
    };
    let mut r = 0;
    for c in 0..cols {
        let Some(pr) = (r..rows).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, pr);
        let inv = powmod(a[r][c], p - 2);
        for i in r + 1..rows {
            if a[i][c] != 0 {
                let f = mulmod(a[i][c], inv);
                for j in c..cols {
                    let sub = mulmod(f, a[r][j]);
                    a[i][j] = (a[i][j] + p - sub) % p;
                }
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

/// Nonzero invariant factors that differ from one, as `u64`.
pub(crate) fn torsion_of(diag: &[BigInt]) -> Option<Vec<u64>> {
    diag.iter()
        .filter(|d| !d.is_zero() && !d.is_one())
        .map(|d| d.to_u64())
        .collect()
}
