//! The orthogonal space `F_q^{n+1}` with the standard (identity Gram) form,
//! its subspaces, and their square / nonsquare / degenerate classification.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{Elem, Field, FieldRef, QuadraticClass};
use crate::linalg::{self, Matrix, Vector};

/// Default cap on the number of subspaces a single enumeration may produce.
pub const DEFAULT_SUBSPACE_BUDGET: u128 = 10_000_000;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum OrthoError {
    #[error("empty input")]
    EmptyInput,
    #[error("ambient dimension must be at least 2, got {0}")]
    InvalidDimension(usize),
    #[error("vector has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("subspace dimension {d} outside 1..={ambient}")]
    InvalidSubspaceDimension { d: usize, ambient: usize },
    #[error("enumeration needs {required} subspaces, budget is {bound}")]
    BudgetExceeded { bound: u128, required: u128 },
    #[error("subspace is degenerate")]
    DegenerateSubspace,
    #[error("vectors are linearly dependent or zero")]
    NotABasis,
    #[error("malformed subspace text: {0}")]
    Parse(String),
}

/// A nonzero subspace, stored as the rows of its reduced row echelon basis.
///
/// Two subspaces are equal iff their RREF matrices are identical.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    rows: Matrix,
}

impl Subspace {
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.rows[0].len()
    }

    pub fn basis(&self) -> &Matrix {
        &self.rows
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows
            .iter()
            .map(|r| r.iter().position(|x| !x.is_zero()).unwrap())
            .collect()
    }

    /// `v ∈ self`, by reducing `v` against the echelon rows.
    pub fn contains(&self, f: &Field, v: &[Elem]) -> bool {
        let mut w = v.to_vec();
        for row in &self.rows {
            let pc = row.iter().position(|x| !x.is_zero()).unwrap();
            if !w[pc].is_zero() {
                let c = f.neg(w[pc]);
                w = linalg::axpy(f, &w, c, row);
            }
        }
        w.iter().all(|x| x.is_zero())
    }

    pub fn contains_subspace(&self, f: &Field, other: &Subspace) -> bool {
        other.dim() <= self.dim() && other.rows.iter().all(|r| self.contains(f, r))
    }

    /// Parses the text form produced by `Display`.
    pub fn parse(space: &AmbientSpace, s: &str) -> Result<Subspace, OrthoError> {
        let rows = s
            .split(';')
            .map(|row| {
                row.split(',')
                    .map(|t| {
                        let v: u32 = t.trim().parse().map_err(|_| OrthoError::Parse(s.to_string()))?;
                        space
                            .field()
                            .from_packed(v)
                            .ok_or_else(|| OrthoError::Parse(s.to_string()))
                    })
                    .collect::<Result<Vector, _>>()
            })
            .collect::<Result<Matrix, _>>()?;
        let dim = rows.len();
        let w = space.span(&rows)?.ok_or(OrthoError::NotABasis)?;
        if w.dim() != dim || w.rows != rows {
            return Err(OrthoError::Parse(format!("{s} is not a reduced echelon basis")));
        }
        Ok(w)
    }
}

impl fmt::Display for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text: Vec<String> = self
            .rows
            .iter()
            .map(|r| r.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(","))
            .collect();
        write!(f, "{}", text.join(";"))
    }
}

/// Classification of a subspace by the determinant of its Gram matrix.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SubspaceClass {
    Square,
    Nonsquare,
    Degenerate { radical_dim: usize },
}

impl SubspaceClass {
    pub fn is_nondegenerate(self) -> bool {
        !matches!(self, SubspaceClass::Degenerate { .. })
    }
}

/// `F_q^dim` with the form `(u, v) = Σ u_i v_i`.
#[derive(Clone, Debug)]
pub struct AmbientSpace {
    field: FieldRef,
    dim: usize,
}

/// Gaussian binomial coefficient `[n choose d]_q`.
pub fn gaussian_binomial(n: usize, d: usize, q: u64) -> u128 {
    if d > n {
        return 0;
    }
    let q = q as u128;
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..d {
        num = num.saturating_mul(q.saturating_pow((n - i) as u32) - 1);
        den = den.saturating_mul(q.saturating_pow((i + 1) as u32) - 1);
    }
    num / den
}

impl AmbientSpace {
    pub fn new(field: FieldRef, dim: usize) -> Result<Self, OrthoError> {
        if dim < 2 {
            return Err(OrthoError::InvalidDimension(dim));
        }
        Ok(AmbientSpace { field, dim })
    }

    pub fn field(&self) -> &FieldRef {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gram(&self) -> Matrix {
        linalg::identity(self.dim)
    }

    pub fn form(&self, u: &[Elem], v: &[Elem]) -> Elem {
        linalg::dot(&self.field, u, v)
    }

    pub fn norm(&self, v: &[Elem]) -> Elem {
        self.form(v, v)
    }

    pub fn vector(&self, entries: &[i64]) -> Vector {
        entries.iter().map(|&x| self.field.from_int(x)).collect()
    }

    pub fn unit(&self, i: usize) -> Vector {
        let mut v = vec![Elem::ZERO; self.dim];
        v[i] = Elem::ONE;
        v
    }

    /// The whole space as a subspace.
    pub fn full(&self) -> Subspace {
        Subspace {
            rows: linalg::identity(self.dim),
        }
    }

    fn check_len(&self, v: &[Elem]) -> Result<(), OrthoError> {
        if v.len() != self.dim {
            return Err(OrthoError::LengthMismatch {
                expected: self.dim,
                got: v.len(),
            });
        }
        Ok(())
    }

    /// Span of the given vectors; `None` for the zero space.
    pub fn span(&self, vectors: &[Vector]) -> Result<Option<Subspace>, OrthoError> {
        for v in vectors {
            self.check_len(v)?;
        }
        Ok(self.span_unchecked(vectors.to_vec()))
    }

    pub(crate) fn span_unchecked(&self, vectors: Matrix) -> Option<Subspace> {
        if vectors.is_empty() {
            return None;
        }
        let (rows, _) = linalg::rref(&self.field, vectors);
        (!rows.is_empty()).then_some(Subspace { rows })
    }

    /// Span of linearly independent vectors.
    pub fn subspace(&self, basis: &[Vector]) -> Result<Subspace, OrthoError> {
        let w = self.span(basis)?.ok_or(OrthoError::NotABasis)?;
        if w.dim() != basis.len() {
            return Err(OrthoError::NotABasis);
        }
        Ok(w)
    }

    pub fn gram_matrix(&self, vectors: &[Vector]) -> Result<Matrix, OrthoError> {
        if vectors.is_empty() {
            return Err(OrthoError::EmptyInput);
        }
        for v in vectors {
            self.check_len(v)?;
        }
        Ok(vectors
            .iter()
            .map(|u| vectors.iter().map(|v| self.form(u, v)).collect())
            .collect())
    }

    /// Classifies the span of a basis (vectors assumed independent).
    pub fn classify_basis(&self, basis: &[Vector]) -> SubspaceClass {
        let g = self.gram_matrix(basis).expect("nonempty basis");
        let d = linalg::det(&self.field, &g);
        match self.field.quadratic_class(d) {
            QuadraticClass::Square => SubspaceClass::Square,
            QuadraticClass::Nonsquare => SubspaceClass::Nonsquare,
            QuadraticClass::Zero => SubspaceClass::Degenerate {
                radical_dim: basis.len() - linalg::rank(&self.field, &g),
            },
        }
    }

    pub fn classify(&self, w: &Subspace) -> SubspaceClass {
        self.classify_basis(&w.rows)
    }

    /// Radical of the restricted form; `None` when `w` is nondegenerate.
    pub fn radical(&self, w: &Subspace) -> Option<Subspace> {
        let g = self.gram_matrix(&w.rows).expect("nonempty basis");
        let kernel = linalg::null_space(&self.field, &g, w.dim());
        let vectors: Matrix = kernel
            .iter()
            .map(|coeffs| self.combine(coeffs, &w.rows))
            .collect();
        self.span_unchecked(vectors)
    }

    fn combine(&self, coeffs: &[Elem], basis: &[Vector]) -> Vector {
        let mut v = vec![Elem::ZERO; self.dim];
        for (&c, b) in coeffs.iter().zip(basis) {
            if !c.is_zero() {
                v = linalg::axpy(&self.field, &v, c, b);
            }
        }
        v
    }

    /// Orthogonal complement; `None` when `w` is the whole space.
    pub fn perp(&self, w: &Subspace) -> Option<Subspace> {
        let ns = linalg::null_space(&self.field, &w.rows, self.dim);
        self.span_unchecked(ns)
    }

    /// Intersection of two subspaces; `None` when it is zero.
    pub fn intersect(&self, a: &Subspace, b: &Subspace) -> Option<Subspace> {
        let mut eqs = linalg::null_space(&self.field, &a.rows, self.dim);
        eqs.extend(linalg::null_space(&self.field, &b.rows, self.dim));
        if eqs.is_empty() {
            return Some(a.clone());
        }
        self.span_unchecked(linalg::null_space(&self.field, &eqs, self.dim))
    }

    /// Every `d`-dimensional subspace, optionally filtered by class, in
    /// canonical order: pivot sets lexicographically, then the free entries
    /// in field order with the first free entry most significant.
    pub fn enumerate_subspaces(
        &self,
        d: usize,
        filter: Option<SubspaceClass>,
    ) -> Result<Vec<Subspace>, OrthoError> {
        self.enumerate_subspaces_with_budget(d, filter, DEFAULT_SUBSPACE_BUDGET)
    }

    pub fn enumerate_subspaces_with_budget(
        &self,
        d: usize,
        filter: Option<SubspaceClass>,
        budget: u128,
    ) -> Result<Vec<Subspace>, OrthoError> {
        if d == 0 || d > self.dim {
            return Err(OrthoError::InvalidSubspaceDimension { d, ambient: self.dim });
        }
        let required = gaussian_binomial(self.dim, d, self.field.q() as u64);
        if required > budget {
            return Err(OrthoError::BudgetExceeded { bound: budget, required });
        }
        let mut out = Vec::new();
        for_each_rref(&self.field, self.dim, d, |rows| {
            if filter.is_none_or(|c| self.classify_basis(rows) == c) {
                out.push(Subspace { rows: rows.clone() });
            }
        });
        Ok(out)
    }

    /// Every `d`-dimensional subspace of `s`, in the canonical order of
    /// coordinates with respect to the echelon basis of `s`.
    pub fn enumerate_within(
        &self,
        s: &Subspace,
        d: usize,
        filter: Option<SubspaceClass>,
        budget: u128,
    ) -> Result<Vec<Subspace>, OrthoError> {
        if d == 0 || d > s.dim() {
            return Err(OrthoError::InvalidSubspaceDimension { d, ambient: s.dim() });
        }
        let required = gaussian_binomial(s.dim(), d, self.field.q() as u64);
        if required > budget {
            return Err(OrthoError::BudgetExceeded { bound: budget, required });
        }
        let mut out = Vec::new();
        for_each_rref(&self.field, s.dim(), d, |coords| {
            let vectors: Matrix = coords.iter().map(|c| self.combine(c, &s.rows)).collect();
            if filter.is_none_or(|c| self.classify_basis(&vectors) == c) {
                out.push(self.span_unchecked(vectors).expect("independent"));
            }
        });
        Ok(out)
    }

    /// Pairwise-orthogonal, nonisotropic basis of a nondegenerate subspace.
    pub fn orthogonal_basis(&self, w: &Subspace) -> Result<Vec<Vector>, OrthoError> {
        if !self.classify(w).is_nondegenerate() {
            return Err(OrthoError::DegenerateSubspace);
        }
        let f = &self.field;
        let mut rest: Matrix = w.rows.clone();
        let mut out = Vec::with_capacity(rest.len());
        while !rest.is_empty() {
            let pivot = match rest.iter().position(|v| !self.norm(v).is_zero()) {
                Some(i) => rest.remove(i),
                None => {
                    // all basis vectors isotropic: some pairwise sum is not
                    let (i, j) = (0..rest.len())
                        .flat_map(|i| (i + 1..rest.len()).map(move |j| (i, j)))
                        .find(|&(i, j)| !self.form(&rest[i], &rest[j]).is_zero())
                        .ok_or(OrthoError::DegenerateSubspace)?;
                    let sum = linalg::axpy(f, &rest[i], Elem::ONE, &rest[j]);
                    rest.remove(i);
                    sum
                }
            };
            let inv = f.inv(self.norm(&pivot)).unwrap();
            rest = rest
                .into_iter()
                .map(|v| {
                    let c = f.neg(f.mul(self.form(&v, &pivot), inv));
                    linalg::axpy(f, &v, c, &pivot)
                })
                .collect();
            out.push(pivot);
        }
        Ok(out)
    }
}

/// Calls `visit` with every `d × n` RREF matrix over `f` in canonical order.
fn for_each_rref(f: &Field, n: usize, d: usize, mut visit: impl FnMut(&Matrix)) {
    let elems: Vec<Elem> = f.elements().collect();
    let q = elems.len();
    let mut pivots: Vec<usize> = (0..d).collect();
    loop {
        let free: Vec<(usize, usize)> = (0..d)
            .flat_map(|i| {
                let pv = &pivots;
                (pv[i] + 1..n).filter(move |j| !pv.contains(j)).map(move |j| (i, j))
            })
            .collect();
        let mut rows: Matrix = vec![vec![Elem::ZERO; n]; d];
        for (i, &pc) in pivots.iter().enumerate() {
            rows[i][pc] = Elem::ONE;
        }
        let mut counter = vec![0usize; free.len()];
        loop {
            for (&(i, j), &c) in free.iter().zip(&counter) {
                rows[i][j] = elems[c];
            }
            visit(&rows);
            // last free entry is least significant
            let mut carry = true;
            for c in counter.iter_mut().rev() {
                *c += 1;
                if *c < q {
                    carry = false;
                    break;
                }
                *c = 0;
            }
            if carry {
                break;
            }
        }
        // next pivot set in lexicographic order
        let Some(i) = (0..d).rev().find(|&i| pivots[i] < n - d + i) else {
            return;
        };
        pivots[i] += 1;
        for j in i + 1..d {
            pivots[j] = pivots[j - 1] + 1;
        }
    }
}
