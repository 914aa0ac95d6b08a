//! Isometries of the standard form: reflections, flag orbits, Witt extension.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::geometry::{Flag, Geometry, ObjectId};
use crate::gf::{Elem, Field};
use crate::linalg::{self, Matrix, Vector};
use crate::ortho::{AmbientSpace, OrthoError, Subspace, SubspaceClass};

/// Default cap on orbit sizes.
pub const DEFAULT_ORBIT_BUDGET: usize = 5_000_000;

#[derive(Debug, Error)]
pub enum GroupError {
    #[error("vector is isotropic")]
    IsotropicVector,
    #[error("dimensions differ: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("classes differ: {0:?} vs {1:?}")]
    ClassMismatch(SubspaceClass, SubspaceClass),
    #[error("input subspace is degenerate")]
    DegenerateInput,
    #[error("orbit exceeds budget {0}")]
    BudgetExceeded(usize),
    #[error("image of {0} is not an object of the geometry")]
    NotAnAutomorphism(ObjectId),
    #[error(transparent)]
    Ortho(#[from] OrthoError),
}

/// A matrix `M` with `Mᵀ M = I`, acting on column vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsometryMatrix {
    m: Matrix,
    det: Elem,
}

impl IsometryMatrix {
    pub fn identity(dim: usize) -> Self {
        IsometryMatrix { m: linalg::identity(dim), det: Elem::ONE }
    }

    /// Checks `Mᵀ M = I`.
    pub fn from_matrix(f: &Field, m: Matrix) -> Option<Self> {
        let n = m.len();
        if m.iter().any(|r| r.len() != n) {
            return None;
        }
        if linalg::mat_mul(f, &linalg::transpose(&m), &m) != linalg::identity(n) {
            return None;
        }
        let det = linalg::det(f, &m);
        Some(IsometryMatrix { m, det })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.m
    }

    pub fn det(&self) -> Elem {
        self.det
    }

    pub fn dim(&self) -> usize {
        self.m.len()
    }

    pub fn apply(&self, f: &Field, v: &[Elem]) -> Vector {
        linalg::mat_vec(f, &self.m, v)
    }

    pub fn image(&self, space: &AmbientSpace, w: &Subspace) -> Subspace {
        let f = space.field();
        let rows: Matrix = w.basis().iter().map(|v| self.apply(f, v)).collect();
        space.span_unchecked(rows).expect("isometries are injective")
    }

    /// `self ∘ other`.
    pub fn compose(&self, f: &Field, other: &IsometryMatrix) -> IsometryMatrix {
        IsometryMatrix { m: linalg::mat_mul(f, &self.m, &other.m), det: f.mul(self.det, other.det) }
    }

    pub fn is_isometry(&self, f: &Field) -> bool {
        linalg::mat_mul(f, &linalg::transpose(&self.m), &self.m) == linalg::identity(self.dim())
    }

    /// Row-major packed entries.
    pub fn packed_rows(&self) -> Vec<Vec<u32>> {
        self.m.iter().map(|r| r.iter().map(|e| e.packed()).collect()).collect()
    }
}

/// `r_v(x) = x − 2 (x,v)/(v,v) · v`.
pub fn reflection(space: &AmbientSpace, v: &[Elem]) -> Result<IsometryMatrix, GroupError> {
    let f = space.field();
    let nv = space.norm(v);
    if nv.is_zero() {
        return Err(GroupError::IsotropicVector);
    }
    let c = f.div(f.from_int(2), nv).expect("nonzero norm");
    let n = space.dim();
    let m = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let id = if i == j { Elem::ONE } else { Elem::ZERO };
                    f.sub(id, f.mul(c, f.mul(v[i], v[j])))
                })
                .collect()
        })
        .collect();
    Ok(IsometryMatrix { m, det: f.from_int(-1) })
}

/// Reflections in every nonisotropic point of the ambient space, in the
/// canonical point order.
pub fn reflection_pool(space: &AmbientSpace) -> Result<Vec<IsometryMatrix>, GroupError> {
    let points = space.enumerate_subspaces(1, None)?;
    points
        .iter()
        .filter(|p| !space.norm(&p.basis()[0]).is_zero())
        .map(|p| reflection(space, &p.basis()[0]))
        .collect()
}

/// Acts on a geometry's objects, caching object images per generator.
struct Action<'a> {
    g: &'a Geometry,
    gens: &'a [IsometryMatrix],
    cache: HashMap<(usize, ObjectId), ObjectId>,
}

impl Action<'_> {
    fn image(&mut self, k: usize, id: ObjectId) -> Result<ObjectId, GroupError> {
        if let Some(&o) = self.cache.get(&(k, id)) {
            return Ok(o);
        }
        let w = self.gens[k].image(self.g.ambient(), self.g.object(id));
        let o = self.g.lookup(&w).ok_or(GroupError::NotAnAutomorphism(id))?;
        self.cache.insert((k, id), o);
        Ok(o)
    }

    fn flag_image(&mut self, k: usize, flag: &Flag) -> Result<Flag, GroupError> {
        let members = flag
            .members()
            .iter()
            .map(|&id| self.image(k, id))
            .collect::<Result<Vec<_>, _>>()?;
        // isometries preserve dimension, so type order is kept
        Ok(Flag::from_sorted_unchecked(members))
    }
}

/// Closure of `seed` under `generators`, as a sorted set of flags.
pub fn orbit(
    g: &Geometry,
    seed: &Flag,
    generators: &[IsometryMatrix],
    budget: usize,
) -> Result<BTreeSet<Flag>, GroupError> {
    let mut action = Action { g, gens: generators, cache: HashMap::new() };
    let mut seen = BTreeSet::from([seed.clone()]);
    let mut queue = VecDeque::from([seed.clone()]);
    while let Some(flag) = queue.pop_front() {
        for k in 0..generators.len() {
            let img = action.flag_image(k, &flag)?;
            if !seen.contains(&img) {
                if seen.len() >= budget {
                    return Err(GroupError::BudgetExceeded(budget));
                }
                seen.insert(img.clone());
                queue.push_back(img);
            }
        }
    }
    Ok(seen)
}

#[derive(Debug, Clone, Serialize)]
pub struct TypeOrbit {
    pub ty: usize,
    pub object_count: usize,
    pub orbit_size: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct FlagTransitivity {
    pub transitive: bool,
    pub generator_count: usize,
    pub chamber_count: usize,
    pub chamber_orbit_size: usize,
    pub type_orbits: Vec<TypeOrbit>,
    /// Chamber orbit under products of two reflections, which generate `SO`.
    pub so_chamber_orbit_size: usize,
}

/// Orbit of the first chamber under the full reflection pool, compared with
/// the chamber count.
pub fn verify_flag_transitivity(g: &Geometry, budget: usize) -> Result<FlagTransitivity, GroupError> {
    let chambers = g.chambers();
    let chamber_count = chambers.len();
    let pool = reflection_pool(g.ambient())?;
    let seed = chambers.first().cloned().unwrap_or_else(|| Flag::from_sorted_unchecked(Vec::new()));
    verify_from_seed(g, &seed, chamber_count, &pool, budget)
}

/// As [`verify_flag_transitivity`] with a chosen seed chamber.
pub fn verify_flag_transitivity_from(g: &Geometry, seed: &Flag, budget: usize) -> Result<FlagTransitivity, GroupError> {
    let pool = reflection_pool(g.ambient())?;
    verify_from_seed(g, seed, g.chamber_count(), &pool, budget)
}

fn verify_from_seed(
    g: &Geometry,
    seed: &Flag,
    chamber_count: usize,
    pool: &[IsometryMatrix],
    budget: usize,
) -> Result<FlagTransitivity, GroupError> {
    let f = g.field();
    let chamber_orbit_size = orbit(g, seed, pool, budget)?.len();
    let mut type_orbits = Vec::new();
    for ty in g.types() {
        let object_count = g.objects(ty).len();
        let orbit_size = match seed.members().iter().find(|o| o.ty == ty) {
            Some(&o) => orbit(g, &Flag::from_sorted_unchecked(vec![o]), pool, budget)?.len(),
            None => 0,
        };
        type_orbits.push(TypeOrbit { ty, object_count, orbit_size });
    }
    let so_gens: Vec<IsometryMatrix> = pool
        .split_first()
        .map(|(r0, rest)| rest.iter().map(|r| r0.compose(f, r)).collect())
        .unwrap_or_default();
    let so_chamber_orbit_size = orbit(g, seed, &so_gens, budget)?.len();
    Ok(FlagTransitivity {
        transitive: chamber_count > 0 && chamber_orbit_size == chamber_count,
        generator_count: pool.len(),
        chamber_count,
        chamber_orbit_size,
        type_orbits,
        so_chamber_orbit_size,
    })
}

/// An isometry of the ambient space mapping `w1` onto `w2` (Witt extension).
pub fn find_isometry(space: &AmbientSpace, w1: &Subspace, w2: &Subspace) -> Result<IsometryMatrix, GroupError> {
    if w1.dim() != w2.dim() {
        return Err(GroupError::DimensionMismatch(w1.dim(), w2.dim()));
    }
    let (c1, c2) = (space.classify(w1), space.classify(w2));
    if !c1.is_nondegenerate() || !c2.is_nondegenerate() {
        return Err(GroupError::DegenerateInput);
    }
    if c1 != c2 {
        return Err(GroupError::ClassMismatch(c1, c2));
    }
    if w1 == w2 {
        return Ok(IsometryMatrix::identity(space.dim()));
    }
    let f = space.field();
    let b1 = adapted_basis(space, w1)?;
    let b2 = adapted_basis(space, w2)?;
    // columns of B are the basis vectors; M = B2 B1^-1
    let b1m = linalg::transpose(&b1);
    let b2m = linalg::transpose(&b2);
    let inv = linalg::inverse(f, &b1m).expect("basis of the whole space");
    let m = linalg::mat_mul(f, &b2m, &inv);
    Ok(IsometryMatrix::from_matrix(f, m).expect("normalized bases have equal Gram matrices"))
}

/// Orthogonal basis of `w` followed by one of `w^⊥`, each normalized so the
/// norms read `1, …, 1` or `1, …, 1, g`.
fn adapted_basis(space: &AmbientSpace, w: &Subspace) -> Result<Vec<Vector>, GroupError> {
    let mut out = normalized(space, space.orthogonal_basis(w)?);
    if let Some(perp) = space.perp(w) {
        out.extend(normalized(space, space.orthogonal_basis(&perp)?));
    }
    Ok(out)
}

fn normalized(space: &AmbientSpace, basis: Vec<Vector>) -> Vec<Vector> {
    let f = space.field();
    let g = f.least_nonsquare();
    let (mut ones, mut gs) = (Vec::new(), Vec::new());
    for v in basis {
        let n = space.norm(&v);
        let (target, list) = if f.is_nonzero_square(n) { (Elem::ONE, &mut ones) } else { (g, &mut gs) };
        let s = f.sqrt(f.div(n, target).unwrap()).expect("square by construction");
        list.push(linalg::scale(f, f.inv(s).unwrap(), &v));
    }
    if gs.len() >= 2 {
        // x² + y² = 1/g turns two vectors of norm g into two of norm 1
        let target = f.inv(g).unwrap();
        let (x, y) = f
            .elements()
            .find_map(|x| f.sqrt(f.sub(target, f.square(x))).map(|y| (x, y)))
            .expect("every element is a sum of two squares");
        while gs.len() >= 2 {
            let u = gs.remove(0);
            let w = gs.remove(0);
            ones.push(linalg::axpy(f, &linalg::scale(f, x, &u), y, &w));
            ones.push(linalg::axpy(f, &linalg::scale(f, x, &w), f.neg(y), &u));
        }
    }
    ones.extend(gs);
    ones
}
