//! Sparse integer matrices and unimodular pre-elimination.
//!
//! Pivots on `±1` entries only, so every elimination step is invertible over
//! the integers and contributes an invariant factor of one. Whatever cannot be
//! pivoted this way is handed back as a dense residual.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use super::TopologyError;

/// Column-major sparse matrix. Entries in each column are sorted by row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: Vec<Vec<(u32, i64)>>,
}

impl SparseMatrix {
    pub fn new(rows: usize, cols: Vec<Vec<(u32, i64)>>) -> Self {
        let cols = cols
            .into_iter()
            .map(|mut c| {
                c.sort_unstable_by_key(|e| e.0);
                let mut merged: Vec<(u32, i64)> = Vec::with_capacity(c.len());
                for (r, v) in c {
                    match merged.last_mut() {
                        Some(last) if last.0 == r => last.1 += v,
                        _ => merged.push((r, v)),
                    }
                }
                merged.retain(|e| e.1 != 0);
                merged
            })
            .collect();
        SparseMatrix { rows, cols }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols.len()
    }

    pub fn column(&self, j: usize) -> &[(u32, i64)] {
        &self.cols[j]
    }

    pub fn cols_iter(&self) -> impl Iterator<Item = &[(u32, i64)]> {
        self.cols.iter().map(Vec::as_slice)
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut d = vec![vec![0i64; self.cols.len()]; self.rows];
        for (j, col) in self.cols.iter().enumerate() {
            for &(r, v) in col {
                d[r as usize][j] = v;
            }
        }
        d
    }

    /// `self · other`.
    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        let cols = other
            .cols
            .iter()
            .map(|oc| {
                let mut acc: Vec<(u32, i64)> = Vec::new();
                for &(k, w) in oc {
                    for &(r, v) in &self.cols[k as usize] {
                        acc.push((r, v * w));
                    }
                }
                acc
            })
            .collect();
        SparseMatrix::new(self.rows, cols)
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(Vec::is_empty)
    }
}

/// Outcome of [`unimodular_reduce`].
#[derive(Debug, Clone)]
pub struct Reduction {
    /// Number of unit pivots eliminated.
    pub unit_rank: usize,
    /// Remaining block after the unit pivots are removed, dense and row-major.
    pub residual: Vec<Vec<i128>>,
}

/// Eliminates `±1` pivots. Singleton rows and columns go first since they
/// cause no fill-in; otherwise the shortest column is used, pivoting in its
/// sparsest row.
pub fn unimodular_reduce(m: &SparseMatrix) -> Result<Reduction, TopologyError> {
    let mut st = Eliminator::new(m);
    loop {
        while let Some(item) = st.singletons.pop() {
            let (r, c) = match item {
                Singleton::Row(r) if st.row_occ[r as usize].len() == 1 => {
                    (r, *st.row_occ[r as usize].iter().next().unwrap())
                }
                Singleton::Col(c) if st.cols[c as usize].len() == 1 => (st.cols[c as usize][0].0, c),
                _ => continue,
            };
            if st.entry(r, c).abs() == 1 {
                st.pivot(r, c)?;
            }
        }
        let Some(Reverse((len, c))) = st.heap.pop() else {
            break;
        };
        let cu = c as usize;
        if st.cols[cu].len() != len || len == 0 {
            continue;
        }
        let pivot = st.cols[cu]
            .iter()
            .filter(|e| e.1.abs() == 1)
            .min_by_key(|e| (st.row_occ[e.0 as usize].len(), e.0))
            .map(|e| e.0);
        if let Some(r) = pivot {
            st.pivot(r, c)?;
        }
    }
    Ok(st.finish())
}

enum Singleton {
    Row(u32),
    Col(u32),
}

struct Eliminator {
    rows: usize,
    cols: Vec<Vec<(u32, i128)>>,
    row_occ: Vec<BTreeSet<u32>>,
    heap: BinaryHeap<Reverse<(usize, u32)>>,
    singletons: Vec<Singleton>,
    unit_rank: usize,
}

impl Eliminator {
    fn new(m: &SparseMatrix) -> Self {
        let cols: Vec<Vec<(u32, i128)>> = m
            .cols
            .iter()
            .map(|c| c.iter().map(|&(r, v)| (r, v as i128)).collect())
            .collect();
        let mut row_occ: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); m.rows];
        for (j, col) in cols.iter().enumerate() {
            for &(r, _) in col {
                row_occ[r as usize].insert(j as u32);
            }
        }
        let heap = cols
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_empty())
            .map(|(j, c)| Reverse((c.len(), j as u32)))
            .collect();
        let mut singletons: Vec<Singleton> = (0..m.rows as u32)
            .rev()
            .filter(|&r| row_occ[r as usize].len() == 1)
            .map(Singleton::Row)
            .collect();
        singletons.extend(
            (0..cols.len() as u32)
                .rev()
                .filter(|&c| cols[c as usize].len() == 1)
                .map(Singleton::Col),
        );
        Eliminator { rows: m.rows, cols, row_occ, heap, singletons, unit_rank: 0 }
    }

    fn entry(&self, r: u32, c: u32) -> i128 {
        let col = &self.cols[c as usize];
        col.binary_search_by_key(&r, |e| e.0).map_or(0, |i| col[i].1)
    }

    /// Clears row `r` with column operations, then drops row `r` and column `c`.
    fn pivot(&mut self, r: u32, c: u32) -> Result<(), TopologyError> {
        let pv = self.entry(r, c);
        debug_assert_eq!(pv.abs(), 1);
        let pivot_col = std::mem::take(&mut self.cols[c as usize]);
        for &(rr, _) in &pivot_col {
            self.row_occ[rr as usize].remove(&c);
        }
        let others: Vec<u32> = self.row_occ[r as usize].iter().copied().collect();
        for j in others {
            let ju = j as usize;
            let factor = self.entry(r, j) * pv;
            let (merged, added, removed) = axpy_column(&self.cols[ju], factor, &pivot_col)?;
            self.cols[ju] = merged;
            for rr in added {
                self.row_occ[rr as usize].insert(j);
            }
            for rr in removed {
                self.row_occ[rr as usize].remove(&j);
                if self.row_occ[rr as usize].len() == 1 {
                    self.singletons.push(Singleton::Row(rr));
                }
            }
            match self.cols[ju].len() {
                0 => {}
                1 => self.singletons.push(Singleton::Col(j)),
                len => self.heap.push(Reverse((len, j))),
            }
        }
        debug_assert!(self.row_occ[r as usize].is_empty());
        for &(rr, _) in &pivot_col {
            if self.row_occ[rr as usize].len() == 1 {
                self.singletons.push(Singleton::Row(rr));
            }
        }
        self.unit_rank += 1;
        Ok(())
    }

    fn finish(self) -> Reduction {
        let live_cols: Vec<usize> = (0..self.cols.len()).filter(|&j| !self.cols[j].is_empty()).collect();
        let live_rows: Vec<usize> = (0..self.rows).filter(|&r| !self.row_occ[r].is_empty()).collect();
        let mut row_pos = vec![usize::MAX; self.rows];
        for (i, &r) in live_rows.iter().enumerate() {
            row_pos[r] = i;
        }
        let mut residual = vec![vec![0i128; live_cols.len()]; live_rows.len()];
        for (jj, &j) in live_cols.iter().enumerate() {
            for &(r, v) in &self.cols[j] {
                residual[row_pos[r as usize]][jj] = v;
            }
        }
        Reduction { unit_rank: self.unit_rank, residual }
    }
}

type Merge = (Vec<(u32, i128)>, Vec<u32>, Vec<u32>);

/// `a − f·p` for sorted sparse columns, with the rows that became nonzero and
/// the rows that vanished.
fn axpy_column(a: &[(u32, i128)], f: i128, p: &[(u32, i128)]) -> Result<Merge, TopologyError> {
    let mut out = Vec::with_capacity(a.len() + p.len());
    let mut added = Vec::new();
    let mut removed = Vec::new();
    let (mut i, mut k) = (0, 0);
    while i < a.len() || k < p.len() {
        let take_a = k == p.len() || (i < a.len() && a[i].0 < p[k].0);
        let take_p = i == a.len() || (k < p.len() && p[k].0 < a[i].0);
        if take_a {
            out.push(a[i]);
            i += 1;
        } else if take_p {
            let v = f.checked_mul(p[k].1).ok_or(TopologyError::Overflow)?;
            out.push((p[k].0, -v));
            added.push(p[k].0);
            k += 1;
        } else {
            let v = f
                .checked_mul(p[k].1)
                .and_then(|x| a[i].1.checked_sub(x))
                .ok_or(TopologyError::Overflow)?;
            if v == 0 {
                removed.push(a[i].0);
            } else {
                out.push((a[i].0, v));
            }
            i += 1;
            k += 1;
        }
    }
    Ok((out, added, removed))
}
