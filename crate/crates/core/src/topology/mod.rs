//! The incidence 2-complex, its first homology and fundamental group.

mod coset;
pub mod fixtures;
mod presentation;
mod snf;
mod sparse;

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::geometry::{CollinearityGraph, Geometry, ObjectId};

pub use coset::{coset_enumerate, CosetOptions, CosetOutcome, DEFAULT_COSET_BUDGET, DEFAULT_TABLE_ENTRY_CAP};
pub use presentation::{abelianization, pi1_presentation, GroupPresentation};
pub use snf::smith_normal_form;
pub use sparse::{unimodular_reduce, Reduction, SparseMatrix};

/// Default cap on the number of triangles in an incidence complex.
pub const DEFAULT_TRIANGLE_BUDGET: usize = 10_000_000;

/// Residual blocks larger than this (in either dimension) skip the exact
/// Smith form and fall back to modular ranks.
pub const DENSE_SNF_LIMIT: usize = 3000;

/// Hard cap on the residual for the modular fallback.
pub const DENSE_MODULAR_LIMIT: usize = 20_000;

const LARGE_PRIME: u64 = 2_305_843_009_213_693_951; // 2^61 - 1
const SMALL_PRIMES: [u64; 6] = [2, 3, 5, 7, 11, 13];

#[derive(Debug, Error)]
pub enum TopologyError {
    #[error("{what}: {required} exceeds budget {bound}")]
    BudgetExceeded { what: &'static str, bound: u128, required: u128 },
    #[error("vertex {0} out of range")]
    InvalidVertex(u32),
    #[error("triangle {0:?} has a side that is not an edge")]
    MissingEdge([u32; 3]),
    #[error("degenerate cell {0:?}")]
    DegenerateCell(Vec<u32>),
    #[error("complex is disconnected ({} components)", components.len())]
    Disconnected { components: Vec<GroupPresentation> },
    #[error("not a triangle: {0}")]
    NotATriangle(String),
    #[error("integer overflow during elimination")]
    Overflow,
    #[error("bad presentation: {0}")]
    Parse(String),
}

/// A simplicial 2-complex on vertices `0..vertex_count`. Edges and triangles
/// are stored with ascending vertices, in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoComplex {
    vertex_count: usize,
    edges: Vec<[u32; 2]>,
    triangles: Vec<[u32; 3]>,
    edge_index: HashMap<[u32; 2], u32>,
}

impl TwoComplex {
    pub fn new(vertex_count: usize, edges: Vec<[u32; 2]>, triangles: Vec<[u32; 3]>) -> Result<Self, TopologyError> {
        let check = |v: u32| {
            if (v as usize) < vertex_count {
                Ok(v)
            } else {
                Err(TopologyError::InvalidVertex(v))
            }
        };
        let mut es = Vec::with_capacity(edges.len());
        for [a, b] in edges {
            check(a)?;
            check(b)?;
            if a == b {
                return Err(TopologyError::DegenerateCell(vec![a, b]));
            }
            es.push([a.min(b), a.max(b)]);
        }
        es.sort_unstable();
        es.dedup();
        let edge_index: HashMap<[u32; 2], u32> = es.iter().enumerate().map(|(i, &e)| (e, i as u32)).collect();
        let mut ts = Vec::with_capacity(triangles.len());
        for t in triangles {
            let mut s = t;
            for &v in &s {
                check(v)?;
            }
            s.sort_unstable();
            if s[0] == s[1] || s[1] == s[2] {
                return Err(TopologyError::DegenerateCell(t.to_vec()));
            }
            for e in [[s[0], s[1]], [s[0], s[2]], [s[1], s[2]]] {
                if !edge_index.contains_key(&e) {
                    return Err(TopologyError::MissingEdge(t));
                }
            }
            ts.push(s);
        }
        ts.sort_unstable();
        ts.dedup();
        Ok(TwoComplex { vertex_count, edges: es, triangles: ts, edge_index })
    }

    /// The complex generated by `triangles`, with their sides as edges.
    pub fn from_triangles(vertex_count: usize, triangles: Vec<[u32; 3]>) -> Result<Self, TopologyError> {
        let edges = triangles
            .iter()
            .flat_map(|t| [[t[0], t[1]], [t[0], t[2]], [t[1], t[2]]])
            .collect();
        TwoComplex::new(vertex_count, edges, triangles)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[[u32; 2]] {
        &self.edges
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    pub fn edge_id(&self, a: u32, b: u32) -> Option<usize> {
        self.edge_index.get(&[a.min(b), a.max(b)]).map(|&i| i as usize)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count as i64 - self.edges.len() as i64 + self.triangles.len() as i64
    }

    /// `∂1[u,v] = v − u`.
    pub fn boundary1(&self) -> SparseMatrix {
        let cols = self.edges.iter().map(|&[u, v]| vec![(u, -1), (v, 1)]).collect();
        SparseMatrix::new(self.vertex_count, cols)
    }

    /// `∂2[a,b,c] = [b,c] − [a,c] + [a,b]`.
    pub fn boundary2(&self) -> SparseMatrix {
        let cols = self
            .triangles
            .iter()
            .map(|&[a, b, c]| {
                let e = |x, y| self.edge_index[&[x, y]];
                vec![(e(b, c), 1), (e(a, c), -1), (e(a, b), 1)]
            })
            .collect();
        SparseMatrix::new(self.edges.len(), cols)
    }

    /// Neighbours of each vertex in ascending order.
    pub fn adjacency(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for &[u, v] in &self.edges {
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        for a in adj.iter_mut() {
            a.sort_unstable();
        }
        adj
    }
}

/// Incidence complex of a geometry together with the object behind each vertex.
#[derive(Debug, Clone)]
pub struct IncidenceComplex {
    pub complex: TwoComplex,
    pub vertices: Vec<ObjectId>,
}

impl IncidenceComplex {
    pub fn vertex_of(&self, id: ObjectId) -> Option<u32> {
        self.vertices.binary_search(&id).ok().map(|i| i as u32)
    }
}

/// Vertices are all objects (ordered by type, then index); edges join
/// incident pairs and triangles are incident triples of distinct types.
pub fn incidence_complex(g: &Geometry, triangle_budget: usize) -> Result<IncidenceComplex, TopologyError> {
    let types: Vec<usize> = g.types().collect();
    let mut offset = HashMap::new();
    let mut vertices = Vec::new();
    for &t in &types {
        offset.insert(t, vertices.len() as u32);
        vertices.extend(g.ids(t));
    }
    let vid = |id: ObjectId| offset[&id.ty] + id.idx as u32;

    let mut triangle_count: u128 = 0;
    for &t3 in &types {
        for c in g.ids(t3) {
            for &t2 in types.iter().filter(|&&t| t < t3) {
                for &b in g.incident_of_type(c, t2) {
                    let bid = ObjectId { ty: t2, idx: b };
                    for &t1 in types.iter().filter(|&&t| t < t2) {
                        triangle_count += g.incident_of_type(bid, t1).len() as u128;
                    }
                }
            }
        }
    }
    if triangle_count > triangle_budget as u128 {
        return Err(TopologyError::BudgetExceeded {
            what: "incidence triangles",
            bound: triangle_budget as u128,
            required: triangle_count,
        });
    }

    let mut edges = Vec::new();
    let mut triangles = Vec::with_capacity(triangle_count as usize);
    for &t3 in &types {
        for c in g.ids(t3) {
            for &t2 in types.iter().filter(|&&t| t < t3) {
                for &b in g.incident_of_type(c, t2) {
                    let bid = ObjectId { ty: t2, idx: b };
                    edges.push([vid(bid), vid(c)]);
                    for &t1 in types.iter().filter(|&&t| t < t2) {
                        for &a in g.incident_of_type(bid, t1) {
                            triangles.push([vid(ObjectId { ty: t1, idx: a }), vid(bid), vid(c)]);
                        }
                    }
                }
            }
        }
    }
    let complex = TwoComplex::new(vertices.len(), edges, triangles)?;
    Ok(IncidenceComplex { complex, vertices })
}

/// A finitely generated abelian group `Z^free_rank ⊕ ⊕ Z/d_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AbelianInvariants {
    pub free_rank: usize,
    /// Invariant factors greater than one, each dividing the next.
    pub torsion: Vec<u64>,
}

impl AbelianInvariants {
    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }
}

impl std::fmt::Display for AbelianInvariants {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HomologyResult {
    pub invariants: AbelianInvariants,
    pub rank_boundary1: usize,
    pub rank_boundary2: usize,
    /// False when the residual block was too large for an exact Smith form.
    /// Torsion is then only probed at [`SMALL_PRIMES`] and left empty.
    pub exact: bool,
    /// Small primes at which `∂2` loses rank, if any (inexact mode only).
    pub torsion_primes: Vec<u64>,
}

/// Rank and nontrivial invariant factors of an integer matrix.
pub(crate) struct IntegerForm {
    pub rank: usize,
    pub torsion: Vec<u64>,
    pub exact: bool,
    pub torsion_primes: Vec<u64>,
}

pub(crate) fn integer_form(m: &SparseMatrix) -> Result<IntegerForm, TopologyError> {
    let red = unimodular_reduce(m)?;
    let rows = red.residual.len();
    let cols = red.residual.first().map_or(0, Vec::len);
    if rows.max(cols) <= DENSE_SNF_LIMIT {
        let diag = snf::smith_normal_form_i128(red.residual);
        let nonzero = diag.iter().filter(|d| !num_traits::Zero::is_zero(*d)).count();
        let torsion = snf::torsion_of(&diag).ok_or(TopologyError::Overflow)?;
        return Ok(IntegerForm { rank: red.unit_rank + nonzero, torsion, exact: true, torsion_primes: Vec::new() });
    }
    if rows.max(cols) > DENSE_MODULAR_LIMIT {
        return Err(TopologyError::BudgetExceeded {
            what: "residual block",
            bound: DENSE_MODULAR_LIMIT as u128,
            required: rows.max(cols) as u128,
        });
    }
    log::warn!("residual {rows}x{cols} too large for exact Smith form; using modular ranks");
    let r = snf::rank_mod_p(&red.residual, LARGE_PRIME);
    let torsion_primes = SMALL_PRIMES
        .iter()
        .copied()
        .filter(|&p| snf::rank_mod_p(&red.residual, p) < r)
        .collect();
    Ok(IntegerForm { rank: red.unit_rank + r, torsion: Vec::new(), exact: false, torsion_primes })
}

/// `H1(K; Z) = ker ∂1 / im ∂2`.
///
/// The cycle space is free on the edges outside a spanning forest (taken in
/// edge order), and reading off those coordinates is an isomorphism, so
/// `H1 = coker(P ∂2)` with `P` the projection onto non-forest edges.
pub fn homology_h1(c: &TwoComplex) -> Result<HomologyResult, TopologyError> {
    let forest = spanning_forest(c);
    let rank_boundary1 = forest.iter().filter(|&&t| t).count();
    let mut row_of = vec![u32::MAX; c.edges.len()];
    let mut m = 0u32;
    for (i, &in_forest) in forest.iter().enumerate() {
        if !in_forest {
            row_of[i] = m;
            m += 1;
        }
    }
    let cols = c
        .boundary2()
        .cols_iter()
        .map(|col| {
            col.iter()
                .filter(|e| row_of[e.0 as usize] != u32::MAX)
                .map(|&(r, v)| (row_of[r as usize], v))
                .collect()
        })
        .collect();
    let projected = SparseMatrix::new(m as usize, cols);
    let d2 = integer_form(&projected)?;
    Ok(HomologyResult {
        invariants: AbelianInvariants { free_rank: m as usize - d2.rank, torsion: d2.torsion },
        rank_boundary1,
        rank_boundary2: d2.rank,
        exact: d2.exact,
        torsion_primes: d2.torsion_primes,
    })
}

/// Kruskal-style spanning forest over the edge list; `true` marks forest edges.
fn spanning_forest(c: &TwoComplex) -> Vec<bool> {
    let mut parent: Vec<u32> = (0..c.vertex_count as u32).collect();
    fn find(parent: &mut [u32], mut x: u32) -> u32 {
        while parent[x as usize] != x {
            parent[x as usize] = parent[parent[x as usize] as usize];
            x = parent[x as usize];
        }
        x
    }
    c.edges
        .iter()
        .map(|&[u, v]| {
            let (a, b) = (find(&mut parent, u), find(&mut parent, v));
            if a == b {
                false
            } else {
                parent[a.max(b) as usize] = a.min(b);
                true
            }
        })
        .collect()
}

/// Rational Betti numbers `b0, b1, b2` from boundary ranks.
pub fn betti_numbers(c: &TwoComplex, h: &HomologyResult) -> [usize; 3] {
    [
        c.vertex_count - h.rank_boundary1,
        h.invariants.free_rank,
        c.triangles.len() - h.rank_boundary2,
    ]
}

#[derive(Debug, Clone, Serialize)]
pub struct TriangleCheck {
    pub geometric: bool,
    /// Least object (by type, then index) containing the span of the three points.
    pub witness: Option<ObjectId>,
}

/// Whether three pairwise collinear points lie in a common object.
pub fn triangle_geometric(g: &Geometry, a: ObjectId, b: ObjectId, c: ObjectId) -> Result<TriangleCheck, TopologyError> {
    triangle_geometric_in(g, &g.collinearity_graph(), a, b, c)
}

/// As [`triangle_geometric`], reusing a collinearity graph of `g`.
pub fn triangle_geometric_in(
    g: &Geometry,
    graph: &CollinearityGraph,
    a: ObjectId,
    b: ObjectId,
    c: ObjectId,
) -> Result<TriangleCheck, TopologyError> {
    let pts = [a, b, c];
    for p in pts {
        if p.ty != 1 || p.idx >= g.objects(1).len() {
            return Err(TopologyError::NotATriangle(format!("{p} is not a point")));
        }
    }
    if a == b || b == c || a == c {
        return Err(TopologyError::NotATriangle("points are not distinct".into()));
    }
    for (x, y) in [(a, b), (b, c), (a, c)] {
        if !graph.adjacent(x.idx, y.idx) {
            return Err(TopologyError::NotATriangle(format!("{x} and {y} are not collinear")));
        }
    }
    let f = g.field();
    let vectors: Vec<_> = pts.iter().map(|&p| g.object(p).basis()[0].clone()).collect();
    let span = g
        .ambient()
        .span(&vectors)
        .map_err(|e| TopologyError::NotATriangle(e.to_string()))?
        .expect("points are nonzero");
    let witness = g
        .types()
        .filter(|&t| t >= span.dim())
        .flat_map(|t| g.ids(t))
        .find(|&id| g.object(id).contains_subspace(f, &span));
    Ok(TriangleCheck { geometric: witness.is_some(), witness })
}
