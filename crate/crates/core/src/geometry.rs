//! The geometry of proper nondegenerate square-type subspaces.
//!
//! Objects of type `t` are the square-type subspaces of dimension `t`, for
//! `t = 1..=n` where `n + 1` is the dimension of the underlying space.
//! Incidence is symmetrized containment.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{Field, GfError};
use crate::ortho::{AmbientSpace, OrthoError, Subspace, SubspaceClass, DEFAULT_SUBSPACE_BUDGET};

/// Default cap on the total number of objects of a geometry.
pub const DEFAULT_OBJECT_BUDGET: usize = 10_000_000;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("q = {0} is even")]
    EvenCharacteristic(u64),
    #[error("q = {0} is not a prime power")]
    NotPrimePower(u64),
    #[error("rank must be at least {min}, got {n}")]
    InvalidRank { n: usize, min: usize },
    #[error("-1 is a nonsquare in F_{0}; pass the override to build anyway")]
    MinusOneNonsquare(u64),
    #[error("geometry would hold {required} objects, budget is {bound}")]
    BudgetExceeded { bound: usize, required: usize },
    #[error("flag is empty")]
    EmptyFlag,
    #[error("flag is not a flag of this geometry: {0}")]
    FlagNotInGeometry(String),
    #[error(transparent)]
    Ortho(#[from] OrthoError),
    #[error(transparent)]
    Gf(#[from] GfError),
}

#[derive(Clone, Debug)]
pub struct BuildOptions {
    /// Permit `q ≡ 3 (mod 4)`.
    pub allow_minus_one_nonsquare: bool,
    pub subspace_budget: u128,
    pub object_budget: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            allow_minus_one_nonsquare: false,
            subspace_budget: DEFAULT_SUBSPACE_BUDGET,
            object_budget: DEFAULT_OBJECT_BUDGET,
        }
    }
}

/// An object handle: its type (= dimension) and index within that type.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ObjectId {
    pub ty: usize,
    pub idx: usize,
}

impl fmt::Display for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.ty, self.idx)
    }
}

/// A set of pairwise incident objects, sorted by type.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Flag(Vec<ObjectId>);

impl Flag {
    pub fn members(&self) -> &[ObjectId] {
        &self.0
    }

    pub fn types(&self) -> Vec<usize> {
        self.0.iter().map(|o| o.ty).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub(crate) fn from_sorted_unchecked(members: Vec<ObjectId>) -> Flag {
        Flag(members)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Provenance {
    pub description: String,
    pub notes: Vec<String>,
}

/// Objects strictly below / above each object, grouped by type.
struct Incidences {
    /// `down[t-1][i][s-1]`: indices of type-`s` objects inside object `(t, i)`, `s < t`.
    down: Vec<Vec<Vec<Vec<usize>>>>,
    /// `up[t-1][i][s-1]`: indices of type-`s` objects containing `(t, i)`, `s > t`.
    up: Vec<Vec<Vec<Vec<usize>>>>,
}

pub struct Geometry {
    ambient: AmbientSpace,
    space: Subspace,
    objects: Vec<Vec<Subspace>>,
    index: Vec<HashMap<Subspace, usize>>,
    provenance: Provenance,
    incidences: OnceLock<Incidences>,
}

impl fmt::Debug for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Geometry")
            .field("n", &self.n())
            .field("q", &self.q())
            .field("counts", &self.counts())
            .finish()
    }
}

/// Builds the geometry on `F_q^{n+1}`.
pub fn build_geometry(n: usize, q: u64, opts: &BuildOptions) -> Result<Geometry, GeometryError> {
    if q.is_multiple_of(2) {
        return Err(GeometryError::EvenCharacteristic(q));
    }
    if n < 2 {
        return Err(GeometryError::InvalidRank { n, min: 2 });
    }
    let field = Field::from_order(q).map_err(|_| GeometryError::NotPrimePower(q))?;
    let mut notes = Vec::new();
    if !field.minus_one_is_square() {
        if !opts.allow_minus_one_nonsquare {
            return Err(GeometryError::MinusOneNonsquare(q));
        }
        notes.push(format!("-1 is a nonsquare in F_{q}; built under override"));
    }
    let ambient = AmbientSpace::new(field, n + 1)?;
    let space = ambient.full();
    let mut g = Geometry::on_space(&ambient, &space, opts)?;
    g.provenance = Provenance {
        description: format!("square-type subspaces of F_{q}^{}", n + 1),
        notes,
    };
    Ok(g)
}

impl Geometry {
    /// Geometry of square-type proper subspaces of a nondegenerate subspace
    /// `space` (rank `dim(space) - 1`, which may be 1).
    pub fn on_space(
        ambient: &AmbientSpace,
        space: &Subspace,
        opts: &BuildOptions,
    ) -> Result<Geometry, GeometryError> {
        let m = space.dim();
        if m < 2 {
            return Err(GeometryError::InvalidRank { n: m.saturating_sub(1), min: 1 });
        }
        let full = m == ambient.dim();
        let mut objects = Vec::with_capacity(m - 1);
        let mut total = 0usize;
        for t in 1..m {
            let objs = if full {
                ambient.enumerate_subspaces_with_budget(t, Some(SubspaceClass::Square), opts.subspace_budget)?
            } else {
                ambient.enumerate_within(space, t, Some(SubspaceClass::Square), opts.subspace_budget)?
            };
            total += objs.len();
            if total > opts.object_budget {
                return Err(GeometryError::BudgetExceeded {
                    bound: opts.object_budget,
                    required: total,
                });
            }
            objects.push(objs);
        }
        let index = objects
            .iter()
            .map(|objs| objs.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect())
            .collect();
        Ok(Geometry {
            ambient: ambient.clone(),
            space: space.clone(),
            objects,
            index,
            provenance: Provenance {
                description: format!("square-type subspaces of {space}"),
                notes: Vec::new(),
            },
            incidences: OnceLock::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.space.dim() - 1
    }

    pub fn q(&self) -> u32 {
        self.ambient.field().q()
    }

    pub fn field(&self) -> &Field {
        self.ambient.field()
    }

    pub fn ambient(&self) -> &AmbientSpace {
        &self.ambient
    }

    /// The space the geometry lives on.
    pub fn space(&self) -> &Subspace {
        &self.space
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn types(&self) -> std::ops::RangeInclusive<usize> {
        1..=self.n()
    }

    pub fn objects(&self, ty: usize) -> &[Subspace] {
        &self.objects[ty - 1]
    }

    pub fn object(&self, id: ObjectId) -> &Subspace {
        &self.objects[id.ty - 1][id.idx]
    }

    pub fn ids(&self, ty: usize) -> impl Iterator<Item = ObjectId> {
        (0..self.objects[ty - 1].len()).map(move |idx| ObjectId { ty, idx })
    }

    pub fn all_ids(&self) -> impl Iterator<Item = ObjectId> + '_ {
        self.types().flat_map(move |t| self.ids(t))
    }

    pub fn counts(&self) -> Vec<usize> {
        self.objects.iter().map(Vec::len).collect()
    }

    pub fn object_count(&self) -> usize {
        self.objects.iter().map(Vec::len).sum()
    }

    pub fn lookup(&self, w: &Subspace) -> Option<ObjectId> {
        let ty = w.dim();
        if ty == 0 || ty > self.n() {
            return None;
        }
        self.index[ty - 1].get(w).map(|&idx| ObjectId { ty, idx })
    }

    fn valid(&self, id: ObjectId) -> bool {
        (1..=self.n()).contains(&id.ty) && id.idx < self.objects[id.ty - 1].len()
    }

    /// Containment in either direction, or equality.
    pub fn incident(&self, a: ObjectId, b: ObjectId) -> bool {
        if a == b {
            return true;
        }
        if a.ty == b.ty {
            return false;
        }
        let (lo, hi) = if a.ty < b.ty { (a, b) } else { (b, a) };
        self.object(hi).contains_subspace(self.field(), self.object(lo))
    }

    /// Validates and sorts a set of objects into a flag.
    pub fn flag(&self, members: &[ObjectId]) -> Result<Flag, GeometryError> {
        let mut m = members.to_vec();
        m.sort();
        m.dedup();
        if let Some(bad) = m.iter().find(|&&id| !self.valid(id)) {
            return Err(GeometryError::FlagNotInGeometry(format!("unknown object {bad}")));
        }
        for (i, &a) in m.iter().enumerate() {
            for &b in &m[i + 1..] {
                if !self.incident(a, b) {
                    return Err(GeometryError::FlagNotInGeometry(format!("{a} and {b} are not incident")));
                }
            }
        }
        Ok(Flag(m))
    }

    fn incidences(&self) -> &Incidences {
        self.incidences.get_or_init(|| self.compute_incidences())
    }

    fn compute_incidences(&self) -> Incidences {
        let n = self.n();
        let mut down: Vec<Vec<Vec<Vec<usize>>>> = Vec::with_capacity(n);
        for t in 1..=n {
            let lists = self.objects[t - 1]
                .iter()
                .map(|w| {
                    (1..t)
                        .map(|s| {
                            let mut subs: Vec<usize> = self
                                .ambient
                                .enumerate_within(w, s, Some(SubspaceClass::Square), u128::MAX)
                                .expect("within budget")
                                .iter()
                                .map(|x| self.index[s - 1][x])
                                .collect();
                            subs.sort_unstable();
                            subs
                        })
                        .collect()
                })
                .collect();
            down.push(lists);
        }
        let mut up: Vec<Vec<Vec<Vec<usize>>>> = self
            .objects
            .iter()
            .map(|objs| vec![vec![Vec::new(); n]; objs.len()])
            .collect();
        for t in 1..=n {
            for (i, lists) in down[t - 1].iter().enumerate() {
                for (s, subs) in lists.iter().enumerate() {
                    for &j in subs {
                        up[s][j][t - 1].push(i);
                    }
                }
            }
        }
        Incidences { down, up }
    }

    /// Type-`s` objects incident to `id` (excluding `id` itself).
    pub fn incident_of_type(&self, id: ObjectId, s: usize) -> &[usize] {
        let inc = self.incidences();
        if s < id.ty {
            &inc.down[id.ty - 1][id.idx][s - 1]
        } else {
            &inc.up[id.ty - 1][id.idx][s - 1]
        }
    }

    /// Every chamber, as chains listed from type 1 upward, in lexicographic
    /// order of object indices.
    pub fn chambers(&self) -> Vec<Flag> {
        let n = self.n();
        let mut out = Vec::new();
        let mut chain = Vec::with_capacity(n);
        for id in self.ids(1) {
            chain.push(id);
            self.extend_upward(&mut chain, n, &mut out);
            chain.pop();
        }
        out
    }

    fn extend_upward(&self, chain: &mut Vec<ObjectId>, n: usize, out: &mut Vec<Flag>) {
        let last = *chain.last().unwrap();
        if last.ty == n {
            out.push(Flag(chain.clone()));
            return;
        }
        let next = last.ty + 1;
        for &idx in self.incident_of_type(last, next) {
            chain.push(ObjectId { ty: next, idx });
            self.extend_upward(chain, n, out);
            chain.pop();
        }
    }

    pub fn chamber_count(&self) -> usize {
        // counted bottom-up without materializing the chambers
        let n = self.n();
        let mut below: Vec<u64> = vec![1; self.objects[0].len()];
        for t in 2..=n {
            below = self
                .ids(t)
                .map(|id| self.incident_of_type(id, t - 1).iter().map(|&j| below[j]).sum())
                .collect();
        }
        below.iter().sum::<u64>() as usize
    }

    /// Residue of a nonempty flag.
    pub fn residue(&self, flag: &Flag) -> Result<Residue, GeometryError> {
        if flag.is_empty() {
            return Err(GeometryError::EmptyFlag);
        }
        let flag = self.flag(flag.members())?;
        let n = self.n();
        let flag_types = flag.types();
        let member_of_type = |t: usize| flag.members().iter().copied().find(|m| m.ty == t);
        let remaining: Vec<usize> = (1..=n).filter(|t| !flag_types.contains(t)).collect();

        let objects: Vec<(usize, Vec<ObjectId>)> = remaining
            .iter()
            .map(|&t| {
                let ids = self
                    .ids(t)
                    .filter(|&x| flag.members().iter().all(|&m| self.incident(x, m)))
                    .collect();
                (t, ids)
            })
            .collect();

        let mut factors = Vec::new();
        let mut start = 0;
        while start < remaining.len() {
            let mut end = start;
            while end + 1 < remaining.len() && remaining[end + 1] == remaining[end] + 1 {
                end += 1;
            }
            let (lo_t, hi_t) = (remaining[start], remaining[end]);
            let lower = member_of_type(lo_t - 1);
            let upper = member_of_type(hi_t + 1);
            let top = upper.map_or_else(|| self.space.clone(), |u| self.object(u).clone());
            let bounded = match lower {
                None => Some(top),
                Some(l) => self
                    .ambient
                    .perp(self.object(l))
                    .and_then(|p| self.ambient.intersect(&p, &top)),
            };
            let comparison = bounded
                .map(|s| {
                    let opts = BuildOptions {
                        allow_minus_one_nonsquare: true,
                        ..BuildOptions::default()
                    };
                    Geometry::on_space(&self.ambient, &s, &opts)
                })
                .transpose()?;
            let factor_objects = objects[start..=end].iter().map(|(_, ids)| ids.clone()).collect();
            factors.push(ResidueFactor {
                types: (lo_t, hi_t),
                lower,
                upper,
                objects: factor_objects,
                comparison,
            });
            start = end + 1;
        }
        Ok(Residue { flag, objects, factors })
    }

    /// Degree of every object in the incidence graph, grouped by type and sorted.
    pub fn incidence_degrees(&self) -> Vec<(usize, Vec<usize>)> {
        let n = self.n();
        self.types()
            .map(|t| {
                let mut degs: Vec<usize> = self
                    .ids(t)
                    .map(|id| (1..=n).filter(|&s| s != t).map(|s| self.incident_of_type(id, s).len()).sum())
                    .collect();
                degs.sort_unstable();
                (t, degs)
            })
            .collect()
    }

    pub fn collinearity_graph(&self) -> CollinearityGraph {
        let points = self.objects(1);
        let mut adjacency = vec![Vec::new(); points.len()];
        if self.n() >= 2 {
            for i in 0..points.len() {
                for j in i + 1..points.len() {
                    let basis = [points[i].basis()[0].clone(), points[j].basis()[0].clone()];
                    if self.ambient.classify_basis(&basis) == SubspaceClass::Square {
                        adjacency[i].push(j);
                        adjacency[j].push(i);
                    }
                }
            }
        }
        CollinearityGraph { adjacency }
    }

    /// Collinearity degrees counted through lines: each square-type line
    /// through `p` contributes its other square-type points.
    pub fn collinearity_degrees_via_lines(&self) -> Vec<usize> {
        let mut deg = vec![0; self.objects(1).len()];
        if self.n() >= 2 {
            for line in self.ids(2) {
                let pts = self.incident_of_type(line, 1);
                for &p in pts {
                    deg[p] += pts.len() - 1;
                }
            }
        }
        deg
    }

    /// Whether every flag lies in a chamber. Checks that every flag that
    /// admits no further object has all types.
    pub fn is_transversal(&self) -> Transversality {
        let n = self.n();
        let mut chain = Vec::new();
        let mut counterexample = None;
        self.visit_chains(&mut chain, 0, n, &mut |c: &[ObjectId]| {
            if c.len() < n && !self.extendable(c) {
                counterexample = Some(c.to_vec());
                return false;
            }
            true
        });
        Transversality {
            transversal: counterexample.is_none(),
            counterexample,
        }
    }

    /// Visits every nonempty chain whose types ascend; stops when `visit` returns false.
    fn visit_chains(
        &self,
        chain: &mut Vec<ObjectId>,
        min_ty: usize,
        n: usize,
        visit: &mut dyn FnMut(&[ObjectId]) -> bool,
    ) -> bool {
        for t in min_ty + 1..=n {
            let candidates: Vec<usize> = match chain.last() {
                None => (0..self.objects[t - 1].len()).collect(),
                Some(&last) => self.incident_of_type(last, t).to_vec(),
            };
            for idx in candidates {
                chain.push(ObjectId { ty: t, idx });
                let keep_going = visit(chain) && self.visit_chains(chain, t, n, visit);
                chain.pop();
                if !keep_going {
                    return false;
                }
            }
        }
        true
    }

    /// Whether some object can be added to the chain.
    fn extendable(&self, chain: &[ObjectId]) -> bool {
        let n = self.n();
        let present: Vec<usize> = chain.iter().map(|c| c.ty).collect();
        (1..=n).filter(|t| !present.contains(t)).any(|t| {
            let below = chain.iter().rev().find(|c| c.ty < t).copied();
            let above = chain.iter().find(|c| c.ty > t).copied();
            match (below, above) {
                (Some(b), Some(a)) => {
                    let ups = self.incident_of_type(b, t);
                    self.incident_of_type(a, t).iter().any(|x| ups.binary_search(x).is_ok())
                }
                (Some(b), None) => !self.incident_of_type(b, t).is_empty(),
                (None, Some(a)) => !self.incident_of_type(a, t).is_empty(),
                (None, None) => !self.objects[t - 1].is_empty(),
            }
        })
    }

    pub fn summary(&self) -> GeometrySummary {
        let conn = connectivity(&self.collinearity_graph());
        GeometrySummary {
            n: self.n(),
            q: self.q(),
            counts_per_type: self.counts(),
            connected: conn.connected,
            diameter: conn.diameter,
            transversal: self.is_transversal().transversal,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeometrySummary {
    pub n: usize,
    pub q: u32,
    pub counts_per_type: Vec<usize>,
    pub connected: bool,
    /// `None` when disconnected.
    pub diameter: Option<usize>,
    pub transversal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transversality {
    pub transversal: bool,
    pub counterexample: Option<Vec<ObjectId>>,
}

/// Objects incident to every member of a flag.
#[derive(Debug)]
pub struct Residue {
    pub flag: Flag,
    /// Per remaining type, the incident objects.
    pub objects: Vec<(usize, Vec<ObjectId>)>,
    /// One factor per maximal run of consecutive remaining types.
    pub factors: Vec<ResidueFactor>,
}

impl Residue {
    pub fn counts_per_type(&self) -> Vec<(usize, usize)> {
        self.objects.iter().map(|(t, ids)| (*t, ids.len())).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }
}

/// The part of a residue with types `lo..=hi`, bounded below by the flag
/// member of type `lo - 1` and above by the member of type `hi + 1`.
#[derive(Debug)]
pub struct ResidueFactor {
    pub types: (usize, usize),
    pub lower: Option<ObjectId>,
    pub upper: Option<ObjectId>,
    pub objects: Vec<Vec<ObjectId>>,
    /// The geometry on `lower^⊥ ∩ upper`, whose type `j` corresponds to
    /// factor type `lo - 1 + j`.
    pub comparison: Option<Geometry>,
}

impl ResidueFactor {
    pub fn counts(&self) -> Vec<usize> {
        self.objects.iter().map(Vec::len).collect()
    }

    /// Incidence-graph degrees inside the factor, grouped by factor type.
    pub fn incidence_degrees(&self, g: &Geometry) -> Vec<Vec<usize>> {
        let all: Vec<ObjectId> = self.objects.iter().flatten().copied().collect();
        self.objects
            .iter()
            .map(|ids| {
                let mut degs: Vec<usize> = ids
                    .iter()
                    .map(|&a| all.iter().filter(|&&b| b != a && g.incident(a, b)).count())
                    .collect();
                degs.sort_unstable();
                degs
            })
            .collect()
    }
}

/// Graph on points; two points are adjacent when they span a square-type line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollinearityGraph {
    pub adjacency: Vec<Vec<usize>>,
}

impl CollinearityGraph {
    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].binary_search(&b).is_ok()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Connectivity {
    pub connected: bool,
    /// `None` stands for an infinite diameter.
    pub diameter: Option<usize>,
    pub component_count: usize,
}

/// Breadth-first distances from `s`; `usize::MAX` marks unreachable vertices.
pub fn bfs_distances(adjacency: &[Vec<usize>], s: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; adjacency.len()];
    dist[s] = 0;
    let mut queue = VecDeque::from([s]);
    while let Some(u) = queue.pop_front() {
        for &v in &adjacency[u] {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

pub fn connectivity(graph: &CollinearityGraph) -> Connectivity {
    let n = graph.vertex_count();
    let mut component = vec![usize::MAX; n];
    let mut components = 0;
    for s in 0..n {
        if component[s] == usize::MAX {
            for (v, d) in bfs_distances(&graph.adjacency, s).into_iter().enumerate() {
                if d != usize::MAX {
                    component[v] = components;
                }
            }
            components += 1;
        }
    }
    let connected = components <= 1;
    let diameter = connected.then(|| {
        (0..n)
            .map(|s| bfs_distances(&graph.adjacency, s).into_iter().max().unwrap_or(0))
            .max()
            .unwrap_or(0)
    });
    Connectivity {
        connected,
        diameter,
        component_count: components,
    }
}
