//! Arithmetic in finite fields of odd characteristic.
//!
//! Elements are stored as their coefficient sequence (low degree first) packed
//! into one integer `Σ c_i p^i`. That packed value is also the serialized form,
//! so `t` in `F_9 = Z_3[t]/(t²+1)` prints as `3`.
//!
//! The *canonical element order* compares coefficient sequences
//! lexicographically starting from the constant term. For prime fields it
//! agrees with the integer order; for extension fields it does not, and
//! [`Field::rank`] gives the position of an element in that order.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Largest field order accepted by [`Field::new`].
pub const DEFAULT_FIELD_BOUND: u64 = 1 << 20;

/// Square roots above this order use the discrete-log table instead of a scan.
const EXHAUSTIVE_SQRT_BOUND: u32 = 1 << 16;

const NONE: u32 = u32::MAX;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum GfError {
    #[error("{0} is not an odd prime")]
    InvalidPrime(u64),
    #[error("extension degree must be at least 1")]
    InvalidDegree,
    #[error("{0} is not a power of an odd prime")]
    NotOddPrimePower(u64),
    #[error("field order {q} exceeds the configured bound {bound}")]
    FieldTooLarge { q: u64, bound: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("elements belong to different fields ({0} vs {1})")]
    FieldMismatch(String, String),
    #[error("internal error: {0}")]
    Internal(String),
}

/// A field element in packed form. Only meaningful together with its [`Field`].
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Elem(pub u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn packed(self) -> u32 {
        self.0
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Quadratic character of an element.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum QuadraticClass {
    Zero,
    Square,
    Nonsquare,
}

impl QuadraticClass {
    /// Class of a product, given the classes of the factors.
    pub fn mul(self, other: QuadraticClass) -> QuadraticClass {
        use QuadraticClass::*;
        match (self, other) {
            (Zero, _) | (_, Zero) => Zero,
            (Square, Square) | (Nonsquare, Nonsquare) => Square,
            _ => Nonsquare,
        }
    }
}

/// The field `F_q`, `q = p^k`, with its lookup tables.
///
/// Immutable after construction; share it through [`FieldRef`].
pub struct Field {
    p: u32,
    k: u32,
    q: u32,
    modulus: Vec<u32>,
    minus_one_is_square: bool,
    /// `exp[i] = g^i` for `i < 2(q-1)`, `g` the least primitive element.
    exp: Vec<u32>,
    log: Vec<u32>,
    /// Zech logarithms: `zech[i] = log(1 + g^i)`, `NONE` when `1 + g^i = 0`.
    zech: Vec<u32>,
    neg: Vec<u32>,
    /// `true` at the packed index of every nonzero square.
    square_table: Vec<bool>,
    rank: Vec<u32>,
    by_rank: Vec<u32>,
}

pub type FieldRef = Arc<Field>;

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("p", &self.p)
            .field("k", &self.k)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.p, self.k)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.k == other.k && self.modulus == other.modulus
    }
}

impl Eq for Field {}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q` as `p^k` with `p` an odd prime.
pub fn odd_prime_power(q: u64) -> Option<(u32, u32)> {
    if q < 3 || q.is_multiple_of(2) {
        return None;
    }
    let mut p = 3;
    while p * p <= q && !q.is_multiple_of(p) {
        p += 2;
    }
    if !q.is_multiple_of(p) {
        p = q;
    }
    let mut rest = q;
    let mut k = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        k += 1;
    }
    (rest == 1 && is_prime(p)).then_some((p as u32, k))
}

/// Odd prime powers in `lo..=hi`, ascending.
pub fn odd_prime_powers(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi).filter(|&q| odd_prime_power(q).is_some()).collect()
}

// --- polynomial helpers over Z_p, coefficient vectors low degree first ---

fn poly_trim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

/// Remainder of `a` modulo the monic polynomial `m`.
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap() as u64;
        let shift = r.len() - 1 - dm;
        for (i, &c) in m.iter().enumerate() {
            let sub = lead * c as u64 % p as u64;
            let cur = r[shift + i] as u64;
            r[shift + i] = ((cur + p as u64 - sub) % p as u64) as u32;
        }
        poly_trim(&mut r);
    }
    r
}

fn poly_mulmod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    let prod: Vec<u32> = prod.into_iter().map(|c| c as u32).collect();
    poly_rem(&prod, m, p)
}

/// Monic polynomial of degree `deg` whose lower coefficients are the base-`p`
/// digits of `index`, constant term most significant.
fn monic_from_lex_index(index: u64, deg: u32, p: u32) -> Vec<u32> {
    let mut coeffs = vec![0u32; deg as usize + 1];
    let mut rest = index;
    for i in (0..deg as usize).rev() {
        coeffs[i] = (rest % p as u64) as u32;
        rest /= p as u64;
    }
    coeffs[deg as usize] = 1;
    coeffs
}

fn is_irreducible(m: &[u32], p: u32) -> bool {
    let deg = (m.len() - 1) as u32;
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d);
        for idx in 0..count {
            let f = monic_from_lex_index(idx, d, p);
            if poly_rem(m, &f, p).is_empty() {
                return false;
            }
        }
    }
    true
}

fn unpack(v: u32, p: u32, k: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(k as usize);
    let mut rest = v;
    for _ in 0..k {
        out.push(rest % p);
        rest /= p;
    }
    out
}

fn pack(coeffs: &[u32], p: u32) -> u32 {
    coeffs.iter().rev().fold(0, |acc, &c| acc * p + c)
}

impl Field {
    /// Builds `F_{p^k}` with the default size bound.
    pub fn new(p: u64, k: u32) -> Result<FieldRef, GfError> {
        Self::with_bound(p, k, DEFAULT_FIELD_BOUND)
    }

    /// Builds `F_q` from its order.
    pub fn from_order(q: u64) -> Result<FieldRef, GfError> {
        let (p, k) = odd_prime_power(q).ok_or(GfError::NotOddPrimePower(q))?;
        Self::new(p as u64, k)
    }

    pub fn with_bound(p: u64, k: u32, bound: u64) -> Result<FieldRef, GfError> {
        if p.is_multiple_of(2) || !is_prime(p) {
            return Err(GfError::InvalidPrime(p));
        }
        if k == 0 {
            return Err(GfError::InvalidDegree);
        }
        let q = p
            .checked_pow(k)
            .filter(|&q| q <= bound && q <= u32::MAX as u64)
            .ok_or(GfError::FieldTooLarge {
                q: p.saturating_pow(k),
                bound,
            })?;
        let (p, q) = (p as u32, q as u32);

        let modulus = if k == 1 {
            vec![0, 1]
        } else {
            (0..(p as u64).pow(k))
                .map(|idx| monic_from_lex_index(idx, k, p))
                .find(|m| is_irreducible(m, p))
                .ok_or_else(|| GfError::Internal(format!("no irreducible of degree {k} over Z_{p}")))?
        };

        let mut rank = vec![0u32; q as usize];
        let mut by_rank = vec![0u32; q as usize];
        for v in 0..q {
            // reversing the digits turns "constant term first" into integer order
            let digits = unpack(v, p, k);
            let r = digits.iter().fold(0u32, |acc, &c| acc * p + c);
            rank[v as usize] = r;
            by_rank[r as usize] = v;
        }

        let exp = Self::primitive_powers(p, k, q, &modulus, &by_rank)?;
        let mut log = vec![NONE; q as usize];
        for (i, &e) in exp.iter().enumerate().take((q - 1) as usize) {
            log[e as usize] = i as u32;
        }

        let neg: Vec<u32> = (0..q)
            .map(|v| {
                let c: Vec<u32> = unpack(v, p, k).iter().map(|&x| (p - x) % p).collect();
                pack(&c, p)
            })
            .collect();

        let mut field = Field {
            p,
            k,
            q,
            modulus,
            minus_one_is_square: false,
            exp,
            log,
            zech: Vec::new(),
            neg,
            square_table: Vec::new(),
            rank,
            by_rank,
        };
        if k > 1 {
            field.zech = (0..q - 1)
                .map(|i| {
                    let gi = unpack(field.exp[i as usize], p, k);
                    let mut c = gi.clone();
                    c[0] = (c[0] + 1) % p;
                    let s = pack(&c, p);
                    if s == 0 {
                        NONE
                    } else {
                        field.log[s as usize]
                    }
                })
                .collect();
        }
        // Euler criterion: a is a nonzero square iff a^((q-1)/2) = 1
        let half = ((q - 1) / 2) as u64;
        field.square_table = (0..q)
            .map(|v| v != 0 && field.pow(Elem(v), half) == Elem::ONE)
            .collect();
        field.minus_one_is_square = field.square_table[field.neg[1] as usize];
        Ok(Arc::new(field))
    }

    /// Powers of the least primitive element, repeated twice so that
    /// `exp[i + j]` never needs a reduction for `i, j < q - 1`.
    fn primitive_powers(
        p: u32,
        k: u32,
        q: u32,
        modulus: &[u32],
        by_rank: &[u32],
    ) -> Result<Vec<u32>, GfError> {
        let order = (q - 1) as usize;
        for &cand in by_rank.iter().skip(1) {
            let g = unpack(cand, p, k);
            let mut powers = Vec::with_capacity(2 * order);
            let mut cur = vec![1u32];
            loop {
                let mut padded = cur.clone();
                padded.resize(k as usize, 0);
                let packed = pack(&padded, p);
                if !powers.is_empty() && packed == 1 {
                    break;
                }
                powers.push(packed);
                if powers.len() > order {
                    break;
                }
                cur = if k == 1 {
                    let v = (*cur.first().unwrap_or(&0) as u64 * g[0] as u64 % p as u64) as u32;
                    if v == 0 {
                        Vec::new()
                    } else {
                        vec![v]
                    }
                } else {
                    poly_mulmod(&cur, &g, modulus, p)
                };
            }
            if powers.len() == order {
                let again = powers.clone();
                powers.extend(again);
                return Ok(powers);
            }
        }
        Err(GfError::Internal(format!("no primitive element in F_{q}")))
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Defining polynomial, low degree first, monic.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn minus_one_is_square(&self) -> bool {
        self.minus_one_is_square
    }

    pub fn square_table(&self) -> &[bool] {
        &self.square_table
    }

    pub fn zero(&self) -> Elem {
        Elem::ZERO
    }

    pub fn one(&self) -> Elem {
        Elem::ONE
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, v: i64) -> Elem {
        Elem(v.rem_euclid(self.p as i64) as u32)
    }

    /// Element with the given packed value.
    pub fn from_packed(&self, v: u32) -> Option<Elem> {
        (v < self.q).then_some(Elem(v))
    }

    /// Coefficients, low degree first.
    pub fn coeffs(&self, a: Elem) -> Vec<u32> {
        unpack(a.0, self.p, self.k)
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Option<Elem> {
        if coeffs.len() != self.k as usize || coeffs.iter().any(|&c| c >= self.p) {
            return None;
        }
        Some(Elem(pack(coeffs, self.p)))
    }

    /// Position of `a` in the canonical element order.
    #[inline]
    pub fn rank(&self, a: Elem) -> u32 {
        self.rank[a.0 as usize]
    }

    /// All elements in canonical order (zero first).
    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        self.by_rank.iter().map(|&v| Elem(v))
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        if self.k == 1 {
            let s = a.0 + b.0;
            return Elem(if s >= self.p { s - self.p } else { s });
        }
        if a.0 == 0 {
            return b;
        }
        if b.0 == 0 {
            return a;
        }
        let (la, lb) = (self.log[a.0 as usize], self.log[b.0 as usize]);
        let m = self.q - 1;
        let d = if lb >= la { lb - la } else { lb + m - la };
        let z = self.zech[d as usize];
        if z == NONE {
            Elem::ZERO
        } else {
            Elem(self.exp[(la + z) as usize])
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        Elem(self.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a.0 == 0 || b.0 == 0 {
            return Elem::ZERO;
        }
        if self.k == 1 {
            return Elem((a.0 as u64 * b.0 as u64 % self.p as u64) as u32);
        }
        Elem(self.exp[(self.log[a.0 as usize] + self.log[b.0 as usize]) as usize])
    }

    #[inline]
    pub fn inv(&self, a: Elem) -> Option<Elem> {
        if a.0 == 0 {
            return None;
        }
        let l = self.log[a.0 as usize];
        Some(Elem(self.exp[((self.q - 1 - l) % (self.q - 1)) as usize]))
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem, GfError> {
        let inv = self.inv(b).ok_or(GfError::DivisionByZero)?;
        Ok(self.mul(a, inv))
    }

    pub fn pow(&self, a: Elem, mut e: u64) -> Elem {
        let mut base = a;
        let mut acc = Elem::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    #[inline]
    pub fn square(&self, a: Elem) -> Elem {
        self.mul(a, a)
    }

    #[inline]
    pub fn quadratic_class(&self, a: Elem) -> QuadraticClass {
        if a.0 == 0 {
            QuadraticClass::Zero
        } else if self.square_table[a.0 as usize] {
            QuadraticClass::Square
        } else {
            QuadraticClass::Nonsquare
        }
    }

    #[inline]
    pub fn is_nonzero_square(&self, a: Elem) -> bool {
        self.square_table[a.0 as usize]
    }

    /// The square root with the least canonical coefficient sequence.
    pub fn sqrt(&self, a: Elem) -> Option<Elem> {
        match self.quadratic_class(a) {
            QuadraticClass::Zero => Some(Elem::ZERO),
            QuadraticClass::Nonsquare => None,
            QuadraticClass::Square if self.q <= EXHAUSTIVE_SQRT_BOUND => {
                self.elements().find(|&x| self.square(x) == a)
            }
            QuadraticClass::Square => {
                let half = self.log[a.0 as usize] / 2;
                let r = Elem(self.exp[half as usize]);
                let s = self.neg(r);
                Some(if self.rank(r) <= self.rank(s) { r } else { s })
            }
        }
    }

    /// The least nonsquare in canonical order.
    pub fn least_nonsquare(&self) -> Elem {
        self.elements()
            .find(|&x| self.quadratic_class(x) == QuadraticClass::Nonsquare)
            .expect("odd-order field has nonsquares")
    }
}

/// Arithmetic operation selector for [`field_arith`].
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// A field element that carries its field; the checked counterpart of [`Elem`].
#[derive(Clone, Debug)]
pub struct FqElement {
    field: FieldRef,
    value: Elem,
}

impl PartialEq for FqElement {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value && *self.field == *other.field
    }
}

impl Eq for FqElement {}

impl FqElement {
    pub fn new(field: &FieldRef, value: Elem) -> Self {
        FqElement {
            field: field.clone(),
            value,
        }
    }

    pub fn from_coeffs(field: &FieldRef, coeffs: &[u32]) -> Option<Self> {
        field.from_coeffs(coeffs).map(|v| Self::new(field, v))
    }

    pub fn field(&self) -> &FieldRef {
        &self.field
    }

    pub fn value(&self) -> Elem {
        self.value
    }

    pub fn coeffs(&self) -> Vec<u32> {
        self.field.coeffs(self.value)
    }

    pub fn quadratic_class(&self) -> QuadraticClass {
        self.field.quadratic_class(self.value)
    }

    pub fn square_root(&self) -> Option<FqElement> {
        self.field.sqrt(self.value).map(|r| Self::new(&self.field, r))
    }
}

impl fmt::Display for FqElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Checked arithmetic on elements that carry their field.
pub fn field_arith(a: &FqElement, b: &FqElement, op: ArithOp) -> Result<FqElement, GfError> {
    if *a.field != *b.field {
        return Err(GfError::FieldMismatch(a.field.to_string(), b.field.to_string()));
    }
    let f = &a.field;
    let v = match op {
        ArithOp::Add => f.add(a.value, b.value),
        ArithOp::Sub => f.sub(a.value, b.value),
        ArithOp::Mul => f.mul(a.value, b.value),
        ArithOp::Div => f.div(a.value, b.value)?,
    };
    Ok(FqElement::new(f, v))
}
