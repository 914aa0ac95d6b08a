//! Measurements behind every check kind. Each returns the observed value an
//! expectation is compared against, plus free-form details.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use sqgeom::geometry::{build_geometry, connectivity, BuildOptions, Geometry, GeometryError, ObjectId};
use sqgeom::gf::{odd_prime_power, odd_prime_powers, Elem, Field, FieldRef, GfError};
use sqgeom::group::{verify_flag_transitivity, GroupError, DEFAULT_ORBIT_BUDGET};
use sqgeom::lemmas::{
    degenerate_plane_census, hasse_margin, joes_lemma_verify, line_type_census, radical_plane_check,
    sum_of_squares_count, summarize_scan, CensusResult, JoesLemmaResult, LemmaError, LemmaStatus, LineClass,
};
use sqgeom::ortho::{OrthoError, SubspaceClass, DEFAULT_SUBSPACE_BUDGET};
use sqgeom::topology::{
    abelianization, coset_enumerate, fixtures, homology_h1, incidence_complex, pi1_presentation,
    triangle_geometric_in, CosetOptions, CosetOutcome, GroupPresentation, TopologyError, DEFAULT_COSET_BUDGET,
    DEFAULT_TABLE_ENTRY_CAP, DEFAULT_TRIANGLE_BUDGET,
};

use crate::registry::{Claim, Instance};
use crate::report::{Outcome, VerificationReport, TOOL_VERSION};

/// The window in which the exception list is asserted.
pub const EXCEPTION_WINDOW: (u32, u32) = (5, 409);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    JoesScan,
    JoesSingle,
    LineCensus,
    SumOfSquares,
    DegeneratePlane,
    RadicalPlane,
    Build,
    Diameter,
    Transversal,
    Transitivity,
    Residues,
    Triangles,
    H1,
    Pi1,
    OpenCase,
    H1Fixture,
    CosetFixture,
}

#[derive(Debug, Clone, Copy)]
pub struct Budgets {
    /// Triangles of the incidence complex.
    pub cells: usize,
    pub cosets: usize,
    pub subspaces: u128,
    pub orbit: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            cells: DEFAULT_TRIANGLE_BUDGET,
            cosets: DEFAULT_COSET_BUDGET,
            subspaces: DEFAULT_SUBSPACE_BUDGET,
            orbit: DEFAULT_ORBIT_BUDGET,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RunConfig {
    pub seed: u64,
    pub budgets: Budgets,
    pub timings: bool,
    /// Build geometries even when `-1` is a nonsquare.
    pub allow_minus_one_nonsquare: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { seed: 1, budgets: Budgets::default(), timings: false, allow_minus_one_nonsquare: false }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CheckError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("{0}")]
    Failed(String),
}

impl From<GfError> for CheckError {
    fn from(e: GfError) -> Self {
        CheckError::InvalidParameters(e.to_string())
    }
}

impl From<LemmaError> for CheckError {
    fn from(e: LemmaError) -> Self {
        match e {
            LemmaError::Gf(e) => e.into(),
            LemmaError::MinusOneNonsquare(_) => CheckError::InvalidParameters(e.to_string()),
            e => CheckError::Failed(e.to_string()),
        }
    }
}

pub enum Measurement {
    Done { observed: Value, details: Value },
    Exceeded { details: Value },
}

fn exceeded(what: impl std::fmt::Display) -> Result<Measurement, CheckError> {
    Ok(Measurement::Exceeded { details: json!({ "budget": what.to_string() }) })
}

fn param_u64(params: &Value, key: &str) -> Result<u64, CheckError> {
    params
        .get(key)
        .and_then(Value::as_u64)
        .ok_or_else(|| CheckError::InvalidParameters(format!("missing integer parameter {key}")))
}

fn param_str<'a>(params: &'a Value, key: &str) -> Result<&'a str, CheckError> {
    params
        .get(key)
        .and_then(Value::as_str)
        .ok_or_else(|| CheckError::InvalidParameters(format!("missing string parameter {key}")))
}

fn field(params: &Value) -> Result<FieldRef, CheckError> {
    Ok(Field::from_order(param_u64(params, "q")?)?)
}

fn require_minus_one_square(f: &Field) -> Result<(), CheckError> {
    if f.minus_one_is_square() {
        Ok(())
    } else {
        Err(CheckError::InvalidParameters(format!("q = {} must be 1 mod 4", f.q())))
    }
}

/// Runs one check and wraps it as a report.
pub fn run(
    claim_id: &str,
    kind: CheckKind,
    parameters: &Value,
    expected: Option<&Value>,
    annotations: (Option<&str>, Option<&str>),
    cfg: &RunConfig,
) -> VerificationReport {
    let start = Instant::now();
    let measured = measure(kind, parameters, cfg);
    let wall = cfg.timings.then(|| start.elapsed().as_millis() as u64);
    assemble(claim_id, parameters, measured, expected, annotations, wall)
}

/// Compares a measurement with its expectation. Errors on asserted claims
/// count as failures.
pub fn assemble(
    claim_id: &str,
    parameters: &Value,
    measured: Result<Measurement, CheckError>,
    expected: Option<&Value>,
    annotations: (Option<&str>, Option<&str>),
    wall_time_ms: Option<u64>,
) -> VerificationReport {
    let mut values = serde_json::Map::new();
    let outcome = match measured {
        Ok(Measurement::Done { observed, details }) => {
            let outcome = match expected {
                Some(e) if *e == observed => Outcome::Pass,
                Some(_) => Outcome::Fail,
                None => Outcome::Computed,
            };
            values.insert("observed".into(), observed);
            values.insert("details".into(), details);
            outcome
        }
        Ok(Measurement::Exceeded { details }) => {
            values.insert("details".into(), details);
            Outcome::Exceeded
        }
        Err(e) => {
            log::warn!("{claim_id}: {e}");
            values.insert("error".into(), Value::String(e.to_string()));
            if expected.is_some() {
                Outcome::Fail
            } else {
                Outcome::Computed
            }
        }
    };
    if let (Some(e), true) = (expected, outcome != Outcome::Computed) {
        values.insert("expected".into(), e.clone());
    }
    if let Some(a) = annotations.0 {
        values.insert("anchor".into(), Value::String(a.to_string()));
    }
    if let Some(n) = annotations.1 {
        values.insert("note".into(), Value::String(n.to_string()));
    }
    VerificationReport {
        claim_id: claim_id.to_string(),
        parameters: parameters.clone(),
        outcome,
        values: Value::Object(values),
        wall_time_ms,
        tool_version: TOOL_VERSION.to_string(),
    }
}

/// Runs a registry instance.
pub fn run_instance(claim: &Claim, instance: &Instance, cfg: &RunConfig) -> VerificationReport {
    run(
        &claim.claim_id,
        claim.check,
        &instance.parameters,
        instance.expected.as_ref(),
        (Some(&claim.anchor), claim.note.as_deref()),
        cfg,
    )
}

pub fn measure(kind: CheckKind, params: &Value, cfg: &RunConfig) -> Result<Measurement, CheckError> {
    match kind {
        CheckKind::JoesScan => {
            let q_min = param_u64(params, "q_min")?;
            let q_max = param_u64(params, "q_max")?;
            let mod4 = Mod4::parse(param_str(params, "mod4")?)?;
            let results = joes_scan(q_min, q_max, mod4)?;
            Ok(joes_scan_measurement(&results))
        }
        CheckKind::JoesSingle => {
            let f = field(params)?;
            let r = joes_lemma_verify(&f);
            let m = hasse_margin(f.q() as u64);
            Ok(Measurement::Done {
                observed: json!({ "status": r.status, "margin_positive": m.margin_positive }),
                details: json!({
                    "q_mod_4": f.q() % 4,
                    "witnesses": r.witnesses,
                    "checked_c_count": r.checked_c_count,
                }),
            })
        }
        CheckKind::LineCensus => {
            let f = field(params)?;
            let plus = line_type_census(&f, LineClass::Plus)?;
            let minus = line_type_census(&f, LineClass::Minus)?;
            Ok(Measurement::Done {
                observed: json!({
                    "plus": plus.counts,
                    "minus": minus.counts,
                    "uniform": plus.uniform && minus.uniform,
                }),
                details: json!({ "plus": census_details(&plus), "minus": census_details(&minus) }),
            })
        }
        CheckKind::SumOfSquares => {
            let f = field(params)?;
            require_minus_one_square(&f)?;
            let mut counts: Vec<u64> = f.elements().filter(|a| !a.is_zero()).map(|a| sum_of_squares_count(&f, a)).collect();
            counts.sort_unstable();
            counts.dedup();
            Ok(Measurement::Done {
                observed: json!({ "nonzero_alpha_counts": counts }),
                details: json!({ "zero_alpha_count": sum_of_squares_count(&f, Elem::ZERO) }),
            })
        }
        CheckKind::DegeneratePlane => {
            let f = field(params)?;
            require_minus_one_square(&f)?;
            let sq = degenerate_plane_census(&f, SubspaceClass::Square, cfg.seed)?;
            let ns = degenerate_plane_census(&f, SubspaceClass::Nonsquare, cfg.seed)?;
            let entry = |c: &CensusResult| {
                json!({
                    "isotropic": c.count("isotropic"),
                    "square": c.count("square"),
                    "nonsquare": c.count("nonsquare"),
                    "uniform": c.uniform,
                })
            };
            Ok(Measurement::Done {
                observed: json!({ "square_type": entry(&sq), "nonsquare_type": entry(&ns) }),
                details: json!({
                    "seed": cfg.seed,
                    "square_type": census_details(&sq),
                    "nonsquare_type": census_details(&ns),
                }),
            })
        }
        CheckKind::RadicalPlane => {
            let f = field(params)?;
            require_minus_one_square(&f)?;
            let c = radical_plane_check(&f)?;
            Ok(Measurement::Done { observed: json!({ "uniform": c.uniform }), details: census_details(&c) })
        }
        CheckKind::Build => with_geometry(params, cfg, |g| {
            Ok(Measurement::Done {
                observed: json!({ "counts_per_type": g.counts() }),
                details: json!({ "chambers": g.chamber_count(), "provenance": g.provenance() }),
            })
        }),
        CheckKind::Diameter => with_geometry(params, cfg, |g| {
            let graph = g.collinearity_graph();
            let conn = connectivity(&graph);
            let mut degrees = graph.degrees();
            degrees.sort_unstable();
            degrees.dedup();
            Ok(Measurement::Done {
                observed: json!({ "connected": conn.connected, "diameter": conn.diameter }),
                details: json!({
                    "points": graph.vertex_count(),
                    "components": conn.component_count,
                    "distinct_degrees": degrees,
                }),
            })
        }),
        CheckKind::Transversal => with_geometry(params, cfg, |g| {
            let t = g.is_transversal();
            let counterexample = t.counterexample.map(|c| c.iter().map(ToString::to_string).collect::<Vec<_>>());
            Ok(Measurement::Done {
                observed: json!({ "transversal": t.transversal }),
                details: json!({ "counterexample": counterexample }),
            })
        }),
        CheckKind::Transitivity => with_geometry(params, cfg, |g| match verify_flag_transitivity(g, cfg.budgets.orbit) {
            Ok(t) => Ok(Measurement::Done { observed: json!({ "transitive": t.transitive }), details: json!(t) }),
            Err(GroupError::BudgetExceeded(b)) => exceeded(format!("orbit budget {b}")),
            Err(e) => Err(CheckError::Failed(e.to_string())),
        }),
        CheckKind::Residues => with_geometry(params, cfg, residues),
        CheckKind::Triangles => {
            let samples = params.get("samples").and_then(Value::as_u64).unwrap_or(1000) as usize;
            with_geometry(params, cfg, |g| triangles(g, samples, cfg.seed))
        }
        CheckKind::H1 => with_geometry(params, cfg, |g| topology_probe(g, cfg, true, false)),
        CheckKind::Pi1 => with_geometry(params, cfg, |g| topology_probe(g, cfg, false, true)),
        CheckKind::OpenCase => with_geometry(params, cfg, |g| topology_probe(g, cfg, true, true)),
        CheckKind::H1Fixture => {
            let c = match param_str(params, "fixture")? {
                "tetrahedron" => fixtures::tetrahedron_boundary(),
                "torus" => fixtures::torus(),
                "projective_plane" => fixtures::projective_plane(),
                "filled_triangle" => fixtures::filled_triangle(),
                "square_cycle" => fixtures::square_cycle(),
                other => return Err(CheckError::InvalidParameters(format!("unknown fixture {other}"))),
            };
            let h = homology_h1(&c).map_err(|e| CheckError::Failed(e.to_string()))?;
            Ok(Measurement::Done {
                observed: json!(h.invariants),
                details: json!({ "euler_characteristic": c.euler_characteristic(), "exact": h.exact }),
            })
        }
        CheckKind::CosetFixture => {
            let p = match param_str(params, "fixture")? {
                "s3" => GroupPresentation::new(2, vec![vec![1, 1], vec![2, 2], vec![1, 2, 1, 2, 1, 2]]),
                "trivial_cyclic" => GroupPresentation::new(1, vec![vec![1]]),
                other => return Err(CheckError::InvalidParameters(format!("unknown fixture {other}"))),
            };
            let out = coset_enumerate(&p, &[], &coset_options(cfg));
            Ok(Measurement::Done { observed: json!(out), details: json!({ "presentation": p.to_text() }) })
        }
    }
}

fn census_details(c: &CensusResult) -> Value {
    json!({ "context": c.context, "checked": c.checked, "counts": c.counts })
}

fn coset_options(cfg: &RunConfig) -> CosetOptions {
    CosetOptions { budget: cfg.budgets.cosets, table_entry_cap: DEFAULT_TABLE_ENTRY_CAP }
}

fn with_geometry(
    params: &Value,
    cfg: &RunConfig,
    body: impl FnOnce(&Geometry) -> Result<Measurement, CheckError>,
) -> Result<Measurement, CheckError> {
    let n = param_u64(params, "n")? as usize;
    let q = param_u64(params, "q")?;
    let opts = BuildOptions {
        subspace_budget: cfg.budgets.subspaces,
        allow_minus_one_nonsquare: cfg.allow_minus_one_nonsquare,
        ..BuildOptions::default()
    };
    match build_geometry(n, q, &opts) {
        Ok(g) => body(&g),
        Err(GeometryError::BudgetExceeded { bound, required }) => {
            exceeded(format!("{required} objects, budget {bound}"))
        }
        Err(GeometryError::Ortho(OrthoError::BudgetExceeded { bound, required })) => {
            exceeded(format!("{required} subspaces, budget {bound}"))
        }
        Err(e) => Err(CheckError::InvalidParameters(e.to_string())),
    }
}

/// For every point `p`, the residue of `{p}` against the geometry on `p^⊥`:
/// per-type counts and incidence degree multisets.
fn residues(g: &Geometry) -> Result<Measurement, CheckError> {
    let mut mismatches = Vec::new();
    let mut counts = None;
    for p in g.ids(1) {
        let flag = g.flag(&[p]).map_err(|e| CheckError::Failed(e.to_string()))?;
        let res = g.residue(&flag).map_err(|e| CheckError::Failed(e.to_string()))?;
        let ok = res.factors.iter().all(|f| {
            let Some(cmp) = &f.comparison else { return false };
            let cmp_degrees: Vec<Vec<usize>> = cmp.incidence_degrees().into_iter().map(|(_, d)| d).collect();
            f.counts() == cmp.counts() && f.incidence_degrees(g) == cmp_degrees
        });
        if !ok {
            mismatches.push(p.to_string());
        }
        counts.get_or_insert_with(|| res.counts_per_type());
    }
    Ok(Measurement::Done {
        observed: json!({ "all_match": mismatches.is_empty() }),
        details: json!({
            "points_checked": g.objects(1).len(),
            "residue_counts_per_type": counts,
            "mismatches": mismatches,
        }),
    })
}

/// Samples pairwise collinear triples: a uniform point, a uniform neighbour,
/// then a uniform common neighbour.
fn triangles(g: &Geometry, samples: usize, seed: u64) -> Result<Measurement, CheckError> {
    let graph = g.collinearity_graph();
    let points = graph.vertex_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    let mut witness_types = std::collections::BTreeMap::<usize, usize>::new();
    let mut drawn = 0;
    let mut attempts = 0;
    while drawn < samples && points > 0 && attempts < 100 * samples {
        attempts += 1;
        let a = rng.gen_range(0..points);
        let na = &graph.adjacency[a];
        if na.is_empty() {
            continue;
        }
        let b = na[rng.gen_range(0..na.len())];
        let common: Vec<usize> = na.iter().copied().filter(|&c| c != b && graph.adjacent(b, c)).collect();
        if common.is_empty() {
            continue;
        }
        let c = common[rng.gen_range(0..common.len())];
        drawn += 1;
        let pt = |idx| ObjectId { ty: 1, idx };
        let t = triangle_geometric_in(g, &graph, pt(a), pt(b), pt(c)).map_err(|e| CheckError::Failed(e.to_string()))?;
        match t.witness {
            Some(w) => *witness_types.entry(w.ty).or_default() += 1,
            None => failures.push([a, b, c]),
        }
    }
    Ok(Measurement::Done {
        observed: json!({ "all_geometric": drawn == samples && failures.is_empty() }),
        details: json!({
            "seed": seed,
            "sampled": drawn,
            "witness_types": witness_types,
            "non_geometric": failures,
        }),
    })
}

/// H1 of the incidence complex and/or its fundamental group. Enumeration
/// runs on a Tietze-simplified copy of the presentation and is skipped when
/// the abelianization is already infinite.
fn topology_probe(g: &Geometry, cfg: &RunConfig, want_h1: bool, want_pi1: bool) -> Result<Measurement, CheckError> {
    let ic = match incidence_complex(g, cfg.budgets.cells) {
        Ok(ic) => ic,
        Err(TopologyError::BudgetExceeded { what, bound, required }) => {
            return exceeded(format!("{what}: {required}, budget {bound}"))
        }
        Err(e) => return Err(CheckError::Failed(e.to_string())),
    };
    let c = &ic.complex;
    let mut observed = serde_json::Map::new();
    let mut details = serde_json::Map::new();
    details.insert(
        "cells".into(),
        json!({
            "vertices": c.vertex_count(),
            "edges": c.edges().len(),
            "triangles": c.triangles().len(),
            "euler_characteristic": c.euler_characteristic(),
        }),
    );
    let fail = |e: TopologyError| CheckError::Failed(e.to_string());
    if want_h1 {
        let h = homology_h1(c).map_err(fail)?;
        observed.insert("h1".into(), json!(h.invariants));
        observed.insert("h1_exact".into(), json!(h.exact));
        details.insert("h1".into(), json!({ "text": h.invariants.to_string(), "torsion_primes": h.torsion_primes }));
    }
    let mut exceeded_cosets = false;
    if want_pi1 {
        let p = pi1_presentation(c, 0).map_err(fail)?;
        let s = p.simplify();
        let ab = abelianization(&s).map_err(fail)?;
        let enumeration = if ab.free_rank > 0 {
            json!({ "kind": "Skipped", "reason": "abelianization is infinite" })
        } else {
            let out = coset_enumerate(&s, &[], &coset_options(cfg));
            exceeded_cosets = matches!(out, CosetOutcome::Exceeded { .. });
            json!(out)
        };
        observed.insert("pi1_abelianization".into(), json!(ab));
        observed.insert("coset_enumeration".into(), enumeration);
        details.insert(
            "presentation".into(),
            json!({
                "generators": p.generator_count,
                "relators": p.relators.len(),
                "simplified_generators": s.generator_count,
                "simplified_relators": s.relators.len(),
            }),
        );
    }
    if exceeded_cosets {
        details.insert("observed".into(), Value::Object(observed));
        return Ok(Measurement::Exceeded { details: Value::Object(details) });
    }
    Ok(Measurement::Done { observed: Value::Object(observed), details: Value::Object(details) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mod4 {
    One,
    Three,
    All,
}

impl Mod4 {
    pub fn parse(s: &str) -> Result<Mod4, CheckError> {
        match s {
            "1" => Ok(Mod4::One),
            "3" => Ok(Mod4::Three),
            "all" => Ok(Mod4::All),
            _ => Err(CheckError::InvalidParameters(format!("mod4 must be 1, 3 or all, got {s}"))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Mod4::One => "1",
            Mod4::Three => "3",
            Mod4::All => "all",
        }
    }

    fn admits(self, q: u64) -> bool {
        match self {
            Mod4::One => q % 4 == 1,
            Mod4::Three => q % 4 == 3,
            Mod4::All => true,
        }
    }
}

/// The search over every odd prime power in range, one task per `q`, in
/// ascending order.
pub fn joes_scan(q_min: u64, q_max: u64, mod4: Mod4) -> Result<Vec<JoesLemmaResult>, CheckError> {
    if q_min > q_max {
        return Err(CheckError::InvalidParameters(format!("empty range {q_min}..{q_max}")));
    }
    odd_prime_powers(q_min, q_max)
        .into_par_iter()
        .filter(|&q| mod4.admits(q))
        .map(|q| Ok(joes_lemma_verify(&*Field::from_order(q)?)))
        .collect()
}

/// Failing `q ≡ 1 mod 4` inside [`EXCEPTION_WINDOW`], with the three-way
/// comparison against both published lists.
pub fn joes_scan_measurement(results: &[JoesLemmaResult]) -> Measurement {
    let summary = summarize_scan(results);
    let failing: Vec<u32> = summary
        .failing_1_mod_4
        .iter()
        .copied()
        .filter(|&q| (EXCEPTION_WINDOW.0..=EXCEPTION_WINDOW.1).contains(&q))
        .collect();
    let fails_at_zero_only: Vec<u32> = results
        .iter()
        .filter(|r| r.status == LemmaStatus::Fails && r.witnesses == [0])
        .map(|r| r.q)
        .collect();
    Measurement::Done {
        observed: json!({ "failing": failing }),
        details: json!({
            "scanned": results.len(),
            "failing_1_mod_4": summary.failing_1_mod_4,
            "failing_3_mod_4": summary.failing_3_mod_4,
            "fails_only_at_c_zero": fails_at_zero_only,
            "list_disagreements": summary.disagreements,
        }),
    }
}

/// Whether `q` is a prime power admitted by the census commands.
pub fn is_odd_prime_power(q: u64) -> bool {
    odd_prime_power(q).is_some()
}
