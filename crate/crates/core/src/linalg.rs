//! Dense matrices over `F_q`, stored as rows.

use crate::gf::{Elem, Field};

pub type Vector = Vec<Elem>;
pub type Matrix = Vec<Vec<Elem>>;

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Elem::ONE } else { Elem::ZERO }).collect())
        .collect()
}

pub fn dot(f: &Field, a: &[Elem], b: &[Elem]) -> Elem {
    a.iter()
        .zip(b)
        .fold(Elem::ZERO, |acc, (&x, &y)| f.add(acc, f.mul(x, y)))
}

pub fn scale(f: &Field, c: Elem, v: &[Elem]) -> Vector {
    v.iter().map(|&x| f.mul(c, x)).collect()
}

/// `a + c·b`
pub fn axpy(f: &Field, a: &[Elem], c: Elem, b: &[Elem]) -> Vector {
    a.iter().zip(b).map(|(&x, &y)| f.add(x, f.mul(c, y))).collect()
}

pub fn transpose(m: &Matrix) -> Matrix {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len()).map(|j| m.iter().map(|r| r[j]).collect()).collect()
}

pub fn mat_mul(f: &Field, a: &Matrix, b: &Matrix) -> Matrix {
    let bt = transpose(b);
    a.iter()
        .map(|row| bt.iter().map(|col| dot(f, row, col)).collect())
        .collect()
}

/// `M v` with `v` a column vector.
pub fn mat_vec(f: &Field, m: &Matrix, v: &[Elem]) -> Vector {
    m.iter().map(|row| dot(f, row, v)).collect()
}

/// Reduced row echelon form. Returns the nonzero rows and their pivot columns.
pub fn rref(f: &Field, mut rows: Matrix) -> (Matrix, Vec<usize>) {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(pr) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = f.inv(rows[r][c]).unwrap();
        let pivot_row = scale(f, inv, &rows[r]);
        rows[r] = pivot_row.clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let factor = f.neg(row[c]);
                *row = axpy(f, row, factor, &pivot_row);
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    (rows, pivots)
}

pub fn rank(f: &Field, rows: &Matrix) -> usize {
    rref(f, rows.clone()).1.len()
}

pub fn det(f: &Field, m: &Matrix) -> Elem {
    let n = m.len();
    let mut a = m.clone();
    let mut d = Elem::ONE;
    for c in 0..n {
        let Some(pr) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Elem::ZERO;
        };
        if pr != c {
            a.swap(pr, c);
            d = f.neg(d);
        }
        d = f.mul(d, a[c][c]);
        let inv = f.inv(a[c][c]).unwrap();
        for i in c + 1..n {
            if !a[i][c].is_zero() {
                let factor = f.neg(f.mul(a[i][c], inv));
                let pivot = a[c].clone();
                a[i] = axpy(f, &a[i], factor, &pivot);
            }
        }
    }
    d
}

/// Basis of `{x : M x = 0}` for an `r × ncols` matrix `M`.
pub fn null_space(f: &Field, m: &Matrix, ncols: usize) -> Matrix {
    let (red, pivots) = if m.is_empty() {
        (Vec::new(), Vec::new())
    } else {
        rref(f, m.clone())
    };
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![Elem::ZERO; ncols];
            v[fc] = Elem::ONE;
            for (row, &pc) in red.iter().zip(&pivots) {
                v[pc] = f.neg(row[fc]);
            }
            v
        })
        .collect()
}

pub fn inverse(f: &Field, m: &Matrix) -> Option<Matrix> {
    let n = m.len();
    let aug: Matrix = m
        .iter()
        .zip(identity(n))
        .map(|(row, id)| row.iter().copied().chain(id).collect())
        .collect();
    let (red, pivots) = rref(f, aug);
    if pivots.len() < n || pivots[n - 1] >= n {
        return None;
    }
    Some(red.into_iter().map(|row| row[n..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::Field;

    fn m(f: &Field, rows: &[&[i64]]) -> Matrix {
        rows.iter()
            .map(|r| r.iter().map(|&x| f.from_int(x)).collect())
            .collect()
    }

    #[test]
    fn det_and_inverse() {
        let f = Field::new(7, 1).unwrap();
        let a = m(&f, &[&[1, 2], &[3, 4]]);
        assert_eq!(det(&f, &a), f.from_int(-2));
        let inv = inverse(&f, &a).unwrap();
        assert_eq!(mat_mul(&f, &a, &inv), identity(2));
        assert!(inverse(&f, &m(&f, &[&[1, 2], &[2, 4]])).is_none());
    }

    #[test]
    fn null_space_of_rank_one() {
        let f = Field::new(5, 1).unwrap();
        let a = m(&f, &[&[1, 1, 0]]);
        let ns = null_space(&f, &a, 3);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(mat_vec(&f, &a, v).iter().all(|x| x.is_zero()));
        }
        assert_eq!(null_space(&f, &Vec::new(), 2), identity(2));
    }
}
