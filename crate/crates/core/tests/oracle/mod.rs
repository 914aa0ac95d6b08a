//! Brute-force reference implementations, sharing no code with the library.
//! Field elements are integers `0..q` whose base-`p` digits are polynomial
//! coefficients, so `0` and `1` are the field's zero and one.

#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};

pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 3 || q.is_multiple_of(2) {
        return None;
    }
    let p = (3..=q).step_by(2).find(|d| q.is_multiple_of(*d))?;
    let (mut r, mut k) = (q, 0);
    while r % p == 0 {
        r /= p;
        k += 1;
    }
    (r == 1).then_some((p, k))
}

pub fn odd_prime_powers(lo: u32, hi: u32) -> Vec<u32> {
    (lo..=hi).filter(|&q| prime_power(q).is_some()).collect()
}

pub struct Gf {
    pub p: u32,
    pub q: u32,
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<u32>,
    square: Vec<bool>,
}

fn digits(x: u32, p: u32, k: u32) -> Vec<u32> {
    let mut d = Vec::with_capacity(k as usize);
    let mut x = x;
    for _ in 0..k {
        d.push(x % p);
        x /= p;
    }
    d
}

fn undigits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Product of two polynomials reduced by the monic `modulus` (low degree first,
/// leading coefficient omitted).
fn poly_mul(a: &[u32], b: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    let k = modulus.len();
    let mut prod = vec![0u32; 2 * k];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    for d in (k..2 * k).rev() {
        let c = prod[d];
        if c != 0 {
            prod[d] = 0;
            // x^k = −modulus
            for (t, &m) in modulus.iter().enumerate() {
                prod[d - k + t] = (prod[d - k + t] + p - c * m % p) % p;
            }
        }
    }
    prod.truncate(k);
    prod
}

impl Gf {
    pub fn new(q: u32) -> Gf {
        let (p, k) = prime_power(q).expect("odd prime power");
        let qs = q as usize;
        let mut add = vec![0; qs * qs];
        for a in 0..q {
            let da = digits(a, p, k);
            for b in 0..q {
                let s: Vec<u32> = digits(b, p, k).iter().zip(&da).map(|(x, y)| (x + y) % p).collect();
                add[(a * q + b) as usize] = undigits(&s, p);
            }
        }
        // first monic modulus that makes every nonzero element invertible
        let mul = (0..q)
            .find_map(|m| {
                let modulus = digits(m, p, k);
                let mut mul = vec![0; qs * qs];
                for a in 0..q {
                    let da = digits(a, p, k);
                    for b in 0..q {
                        mul[(a * q + b) as usize] = undigits(&poly_mul(&da, &digits(b, p, k), &modulus, p), p);
                    }
                }
                (1..q).all(|a| (1..q).any(|b| mul[(a * q + b) as usize] == 1)).then_some(mul)
            })
            .expect("an irreducible modulus exists");
        let neg = (0..q).map(|a| (0..q).find(|&b| add[(a * q + b) as usize] == 0).unwrap()).collect();
        let mut inv = vec![0; qs];
        for a in 1..q {
            inv[a as usize] = (1..q).find(|&b| mul[(a * q + b) as usize] == 1).unwrap();
        }
        let mut square = vec![false; qs];
        for a in 1..q {
            square[mul[(a * q + a) as usize] as usize] = true;
        }
        Gf { p, q, add, mul, neg, inv, square }
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        self.add[(a * self.q + b) as usize]
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg[b as usize])
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[(a * self.q + b) as usize]
    }

    pub fn inv(&self, a: u32) -> u32 {
        assert!(a != 0);
        self.inv[a as usize]
    }

    /// Nonzero square.
    pub fn is_square(&self, a: u32) -> bool {
        self.square[a as usize]
    }

    pub fn is_nonsquare(&self, a: u32) -> bool {
        a != 0 && !self.square[a as usize]
    }

    pub fn dot(&self, u: &[u32], v: &[u32]) -> u32 {
        u.iter().zip(v).fold(0, |acc, (&x, &y)| self.add(acc, self.mul(x, y)))
    }

    pub fn det(&self, m: &[Vec<u32>]) -> u32 {
        let mut a = m.to_vec();
        let n = a.len();
        let mut det = 1;
        for c in 0..n {
            let Some(r) = (c..n).find(|&r| a[r][c] != 0) else { return 0 };
            if r != c {
                a.swap(r, c);
                det = self.neg[det as usize];
            }
            det = self.mul(det, a[c][c]);
            let iv = self.inv(a[c][c]);
            for r in c + 1..n {
                let f = self.mul(a[r][c], iv);
                if f != 0 {
                    for j in c..n {
                        let t = self.mul(f, a[c][j]);
                        a[r][j] = self.sub(a[r][j], t);
                    }
                }
            }
        }
        det
    }

    pub fn gram_det(&self, vs: &[Vec<u32>]) -> u32 {
        let g: Vec<Vec<u32>> = vs.iter().map(|u| vs.iter().map(|v| self.dot(u, v)).collect()).collect();
        self.det(&g)
    }

    pub fn rank(&self, rows: &[Vec<u32>]) -> usize {
        let mut a = rows.to_vec();
        let cols = a.first().map_or(0, Vec::len);
        let mut rank = 0;
        for c in 0..cols {
            let Some(r) = (rank..a.len()).find(|&r| a[r][c] != 0) else { continue };
            a.swap(r, rank);
            let iv = self.inv(a[rank][c]);
            for r in 0..a.len() {
                if r != rank && a[r][c] != 0 {
                    let f = self.mul(a[r][c], iv);
                    for j in 0..cols {
                        let t = self.mul(f, a[rank][j]);
                        a[r][j] = self.sub(a[r][j], t);
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    /// Scales `v` so its first nonzero entry is one.
    pub fn normalize(&self, v: &[u32]) -> Vec<u32> {
        let lead = *v.iter().find(|&&x| x != 0).expect("nonzero vector");
        let iv = self.inv(lead);
        v.iter().map(|&x| self.mul(x, iv)).collect()
    }

    /// Projective points of `F_q^dim` in normalized form.
    pub fn points(&self, dim: usize) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        let total = (self.q as u64).pow(dim as u32);
        for code in 1..total {
            let mut v = vec![0u32; dim];
            let mut c = code;
            for x in v.iter_mut().rev() {
                *x = (c % self.q as u64) as u32;
                c /= self.q as u64;
            }
            if v.iter().find(|&&x| x != 0) == Some(&1) {
                out.push(v);
            }
        }
        out
    }

    /// Reflection in the nonisotropic `u`.
    pub fn reflect(&self, u: &[u32], v: &[u32]) -> Vec<u32> {
        let c = self.mul(self.add(1, 1), self.mul(self.dot(u, v), self.inv(self.dot(u, u))));
        v.iter().zip(u).map(|(&x, &y)| self.sub(x, self.mul(c, y))).collect()
    }
}

/// Whether the sum-of-squares search fails at `q`: some `c` with `c² + 1` a
/// nonzero square has no `a, b ≠ 0` with `a² + 1`, `b² + 1` nonzero squares and
/// `c² = a² + b²`.
pub fn joes_fails(f: &Gf) -> bool {
    let good: Vec<u32> = (0..f.q).filter(|&x| f.is_square(f.add(f.mul(x, x), 1))).collect();
    let squares: HashSet<u32> = good.iter().filter(|&&a| a != 0).map(|&a| f.mul(a, a)).collect();
    let sums: HashSet<u32> = squares.iter().flat_map(|&u| squares.iter().map(move |&v| (u, v))).map(|(u, v)| f.add(u, v)).collect();
    good.iter().any(|&c| !sums.contains(&f.mul(c, c)))
}

/// Points of `F_q^dim` whose norm is a nonzero square.
pub fn square_points(f: &Gf, dim: usize) -> Vec<Vec<u32>> {
    f.points(dim).into_iter().filter(|v| f.is_square(f.dot(v, v))).collect()
}

/// Diameter of the graph on square points of `F_q^{n+1}`, adjacent when they
/// span a square-type line; `None` if disconnected.
pub fn collinearity_diameter(f: &Gf, n: usize) -> Option<usize> {
    let pts = square_points(f, n + 1);
    let m = pts.len();
    let mut adj = vec![Vec::new(); m];
    for i in 0..m {
        for j in i + 1..m {
            if f.is_square(f.gram_det(&[pts[i].clone(), pts[j].clone()])) {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    let mut diameter = 0;
    for s in 0..m {
        let mut dist = vec![usize::MAX; m];
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        diameter = diameter.max(*dist.iter().max()?);
        if dist.contains(&usize::MAX) {
            return None;
        }
    }
    Some(diameter)
}

/// `Π_{d=2}^{n+1} N(d)` with `N(d)` the square points of `F_q^d`: a chamber
/// is a chain of hyperplane choices, each `w^⊥` for a square point `w`.
pub fn chamber_count(f: &Gf, n: usize) -> usize {
    (2..=n + 1).map(|d| square_points(f, d).len()).product()
}

/// A subspace as its sorted set of normalized points.
pub type PointSet = Vec<Vec<u32>>;

pub fn span_points(f: &Gf, basis: &[Vec<u32>]) -> PointSet {
    let d = basis.len();
    let dim = basis[0].len();
    let mut out = Vec::new();
    let total = (f.q as u64).pow(d as u32);
    for code in 1..total {
        let mut c = code;
        let mut v = vec![0u32; dim];
        for b in basis {
            let coef = (c % f.q as u64) as u32;
            c /= f.q as u64;
            for (x, &y) in v.iter_mut().zip(b) {
                *x = f.add(*x, f.mul(coef, y));
            }
        }
        if v.iter().any(|&x| x != 0) {
            out.push(f.normalize(&v));
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Orbit size of one chamber under all reflections in nonisotropic points.
/// Chambers are chains of square-type subspaces of dims `1..=n`, each kept
/// as a point set.
pub fn chamber_orbit_size(f: &Gf, n: usize) -> usize {
    let dim = n + 1;
    // a chamber from an orthonormal-ish chain: e1 ⊂ <e1,e2> ⊂ ...
    let basis: Vec<Vec<u32>> = (0..n).map(|i| (0..dim).map(|j| u32::from(i == j)).collect()).collect();
    let seed: Vec<PointSet> = (1..=n).map(|d| span_points(f, &basis[..d])).collect();
    let mirrors: Vec<Vec<u32>> = f.points(dim).into_iter().filter(|u| f.dot(u, u) != 0).collect();
    let mut seen = HashSet::from([seed.clone()]);
    let mut queue = VecDeque::from([seed]);
    while let Some(ch) = queue.pop_front() {
        for u in &mirrors {
            let img: Vec<PointSet> = ch
                .iter()
                .map(|set| {
                    let mut s: PointSet = set.iter().map(|v| f.normalize(&f.reflect(u, v))).collect();
                    s.sort();
                    s
                })
                .collect();
            if seen.insert(img.clone()) {
                queue.push_back(img);
            }
        }
    }
    seen.len()
}
