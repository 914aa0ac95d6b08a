//! Randomised invariants of the library, cross-checked where possible against
//! the brute-force oracles.

mod oracle;

use proptest::prelude::*;

use sqgeom::gf::{Elem, Field, FieldRef};
use sqgeom::group::{find_isometry, reflection};
use sqgeom::lemmas::{joes_lemma_verify, line_type_census, LineClass};
use sqgeom::linalg::{Matrix, Vector};
use sqgeom::ortho::{gaussian_binomial, AmbientSpace, Subspace};
use sqgeom::topology::{
    abelianization, coset_enumerate, homology_h1, pi1_presentation, AbelianInvariants, CosetOptions, CosetOutcome,
    TopologyError, TwoComplex,
};

use oracle::Gf;

const ORDERS: [u64; 8] = [3, 5, 7, 9, 13, 25, 27, 49];

fn field(q: u64) -> FieldRef {
    Field::from_order(q).unwrap()
}

fn elem(f: &Field, x: u32) -> Elem {
    f.from_packed(x % f.q()).unwrap()
}

fn vectors(f: &Field, dim: usize, raw: &[u32]) -> Matrix {
    raw.chunks(dim).map(|c| c.iter().map(|&x| elem(f, x)).collect()).collect()
}

fn space(q: u64, dim: usize) -> AmbientSpace {
    AmbientSpace::new(field(q), dim).unwrap()
}

/// A random invertible `d × d` matrix, or `None` if the draw was singular.
fn invertible(f: &Field, d: usize, raw: &[u32]) -> Option<Matrix> {
    let m = vectors(f, d, &raw[..d * d]);
    (!sqgeom::linalg::det(f, &m).is_zero()).then_some(m)
}

fn combine(f: &Field, coeffs: &[Elem], basis: &[Vector]) -> Vector {
    let mut v = vec![Elem::ZERO; basis[0].len()];
    for (&c, b) in coeffs.iter().zip(basis) {
        v = sqgeom::linalg::axpy(f, &v, c, b);
    }
    v
}

fn raw(n: usize) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0u32..1 << 16, n)
}

/// Random triangles on at most eight vertices.
fn complex() -> impl Strategy<Value = TwoComplex> {
    prop::collection::vec((0u32..8, 0u32..8, 0u32..8), 1..16).prop_map(|ts| {
        let ts: Vec<[u32; 3]> = ts.into_iter().filter(|(a, b, c)| a != b && b != c && a != c).map(|(a, b, c)| [a, b, c]).collect();
        TwoComplex::from_triangles(8, ts).unwrap()
    })
}

/// Free rank and order of the torsion part.
fn coarse(a: &AbelianInvariants) -> (usize, u64) {
    (a.free_rank, a.torsion.iter().product())
}

/// `H1` of a disjoint union from its components' abelianized fundamental groups.
fn abelianized_pi1(c: &TwoComplex) -> (usize, u64) {
    match pi1_presentation(c, 0) {
        Ok(p) => coarse(&abelianization(&p).unwrap()),
        Err(TopologyError::Disconnected { components }) => components
            .iter()
            .map(|p| coarse(&abelianization(p).unwrap()))
            .fold((0, 1), |(r, t), (r2, t2)| (r + r2, t * t2)),
        Err(e) => panic!("{e}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(qi in 0..ORDERS.len(), a in any::<u32>(), b in any::<u32>(), c in any::<u32>()) {
        let f = field(ORDERS[qi]);
        let (a, b, c) = (elem(&f, a), elem(&f, b), elem(&f, c));
        prop_assert_eq!(f.add(a, b), f.add(b, a));
        prop_assert_eq!(f.mul(a, b), f.mul(b, a));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.sub(f.add(a, b), b), a);
        prop_assert_eq!(f.pow(a, f.q() as u64), a);
        if !a.is_zero() {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), Elem::ONE);
        }
        if let Some(r) = f.sqrt(a) {
            prop_assert_eq!(f.square(r), a);
        }
    }

    #[test]
    fn square_classes_match_oracle(qi in 0..ORDERS.len()) {
        let q = ORDERS[qi];
        let (f, o) = (field(q), Gf::new(q as u32));
        let lib = f.elements().filter(|&x| f.is_nonzero_square(x)).count();
        let ora = (0..q as u32).filter(|&x| o.is_square(x)).count();
        prop_assert_eq!(lib, ora);
        prop_assert_eq!(lib as u64, (q - 1) / 2);
        prop_assert_eq!(f.minus_one_is_square(), q % 4 == 1);
    }

    #[test]
    fn classification_is_basis_invariant(qi in 0..4usize, d in 1usize..4, basis in raw(12), change in raw(9)) {
        let s = space(ORDERS[qi + 1], 4);
        let f = s.field().clone();
        let b: Matrix = vectors(&f, 4, &basis[..4 * d]);
        let Ok(w) = s.subspace(&b) else { return Ok(()) };
        let Some(g) = invertible(&f, d, &change) else { return Ok(()) };
        let b2: Matrix = g.iter().map(|row| combine(&f, row, &b)).collect();
        prop_assert_eq!(s.classify_basis(&b2), s.classify(&w));
        prop_assert_eq!(s.subspace(&b2).unwrap(), w);
    }

    #[test]
    fn perp_is_an_involution(qi in 0..4usize, d in 1usize..4, basis in raw(12)) {
        let s = space(ORDERS[qi + 1], 4);
        let f = s.field().clone();
        let Ok(w) = s.subspace(&vectors(&f, 4, &basis[..4 * d])) else { return Ok(()) };
        let p = s.perp(&w).unwrap();
        prop_assert_eq!(p.dim(), 4 - d);
        prop_assert_eq!(s.perp(&p).unwrap(), w.clone());
        // nondegenerate exactly when W ∩ W^⊥ = 0
        prop_assert_eq!(s.classify(&w).is_nondegenerate(), s.intersect(&w, &p).is_none());
    }

    #[test]
    fn reflections_are_isometric_involutions(qi in 0..4usize, v in raw(4), x in raw(4), y in raw(4)) {
        let s = space(ORDERS[qi + 1], 4);
        let f = s.field().clone();
        let v: Vector = vectors(&f, 4, &v).remove(0);
        let Ok(r) = reflection(&s, &v) else {
            prop_assert!(s.norm(&v).is_zero());
            return Ok(());
        };
        prop_assert!(r.is_isometry(&f));
        let (x, y) = (vectors(&f, 4, &x).remove(0), vectors(&f, 4, &y).remove(0));
        prop_assert_eq!(r.apply(&f, &r.apply(&f, &x)), x.clone());
        prop_assert_eq!(s.form(&r.apply(&f, &x), &r.apply(&f, &y)), s.form(&x, &y));
        prop_assert_eq!(r.apply(&f, &v), v.iter().map(|&c| f.neg(c)).collect::<Vector>());
    }

    #[test]
    fn witt_extension_maps_w1_onto_w2(qi in 0..3usize, d in 1usize..3, a in raw(6), b in raw(6)) {
        let s = space(ORDERS[qi + 1], 3);
        let f = s.field().clone();
        let (Ok(w1), Ok(w2)) = (s.subspace(&vectors(&f, 3, &a[..3 * d])), s.subspace(&vectors(&f, 3, &b[..3 * d]))) else {
            return Ok(());
        };
        let (c1, c2) = (s.classify(&w1), s.classify(&w2));
        if c1 != c2 || !c1.is_nondegenerate() {
            prop_assert!(find_isometry(&s, &w1, &w2).is_err());
            return Ok(());
        }
        let g = find_isometry(&s, &w1, &w2).unwrap();
        prop_assert!(g.is_isometry(&f));
        prop_assert_eq!(g.image(&s, &w1), w2);
    }

    #[test]
    fn boundary_of_boundary_vanishes(c in complex()) {
        prop_assert!(c.boundary1().mul(&c.boundary2()).is_zero());
    }

    #[test]
    fn abelianized_pi1_is_h1(c in complex()) {
        let h = homology_h1(&c).unwrap();
        prop_assert!(h.exact);
        prop_assert_eq!(abelianized_pi1(&c), coarse(&h.invariants));
        // Betti number over F_101 from the oracle's ranks
        let o = Gf::new(101);
        let d2: Vec<Vec<u32>> = c.boundary2().to_dense().iter().map(|r| r.iter().map(|&x| x.rem_euclid(101) as u32).collect()).collect();
        let d1: Vec<Vec<u32>> = c.boundary1().to_dense().iter().map(|r| r.iter().map(|&x| x.rem_euclid(101) as u32).collect()).collect();
        let rank2 = if c.triangles().is_empty() { 0 } else { o.rank(&d2) };
        prop_assert_eq!(h.invariants.free_rank, c.edges().len() - o.rank(&d1) - rank2);
    }

    #[test]
    fn trivial_pi1_has_trivial_h1(c in complex()) {
        let Ok(p) = pi1_presentation(&c, 0) else { return Ok(()) };
        let opts = CosetOptions { budget: 100_000, ..Default::default() };
        if coset_enumerate(&p.simplify(), &[], &opts) == CosetOutcome::TrivialGroup {
            prop_assert!(homology_h1(&c).unwrap().invariants.is_trivial());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn subspace_counts_are_gaussian(qi in 0..3usize, n in 2usize..4, d in 1usize..4) {
        let q = [3u64, 5, 7][qi];
        prop_assume!(d <= n);
        let s = space(q, n);
        prop_assert_eq!(s.enumerate_subspaces(d, None).unwrap().len() as u128, gaussian_binomial(n, d, q));
    }

    #[test]
    fn joes_witnesses_are_closed_under_negation(i in 0usize..60) {
        let q = sqgeom::gf::odd_prime_powers(3, 400)[i];
        let f = field(q);
        let r = joes_lemma_verify(&f);
        prop_assert_eq!(r.witnesses.is_empty(), !oracle::joes_fails(&Gf::new(q as u32)));
        for &c in &r.witnesses {
            let minus = f.neg(elem(&f, c)).packed();
            prop_assert!(r.witnesses.contains(&minus));
        }
    }

    #[test]
    fn lines_have_q_plus_one_points(qi in 0..4usize) {
        let q = [5u64, 9, 13, 17][qi];
        let f = field(q);
        for class in [LineClass::Plus, LineClass::Minus] {
            let c = line_type_census(&f, class).unwrap();
            prop_assert_eq!(c.count("square") + c.count("nonsquare") + c.count("isotropic"), q + 1);
        }
    }
}

#[test]
fn subspace_equality_is_rref_equality() {
    let s = space(5, 3);
    let f = s.field().clone();
    let a: Subspace = s.subspace(&[s.vector(&[1, 2, 0]), s.vector(&[0, 1, 1])]).unwrap();
    let b = s.subspace(&[s.vector(&[1, 3, 1]), s.vector(&[2, 4, 0])]).unwrap();
    assert_eq!(a, b);
    assert!(a.contains(&f, &s.vector(&[1, 3, 1])));
}
