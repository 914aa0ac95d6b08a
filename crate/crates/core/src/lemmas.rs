//! Exhaustive checks of the counting lemmas and the sum-of-squares search.

use std::collections::BTreeMap;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::gf::{odd_prime_powers, Elem, Field, FieldRef, GfError, QuadraticClass};
use crate::ortho::{AmbientSpace, OrthoError, Subspace, SubspaceClass};

#[derive(Debug, Error)]
pub enum LemmaError {
    #[error(transparent)]
    Gf(#[from] GfError),
    #[error(transparent)]
    Ortho(#[from] OrthoError),
    #[error("q = {0} must be 1 mod 4")]
    MinusOneNonsquare(u32),
    #[error("no {0:?} subspace exists here")]
    NoRepresentative(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LemmaStatus {
    Holds,
    Fails,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JoesLemmaResult {
    pub q: u32,
    pub status: LemmaStatus,
    /// Packed values of every `c` without an admissible `(a, b)`, in field order.
    pub witnesses: Vec<u32>,
    pub checked_c_count: usize,
}

/// For each `c` with `c² + 1` a nonzero square, looks for `a, b ≠ 0` with
/// `a² + 1`, `b² + 1` nonzero squares and `c² = a² + b²`. `c = 0` is included.
pub fn joes_lemma_verify(f: &Field) -> JoesLemmaResult {
    let sq = f.square_table();
    let is_sq = |x: Elem| sq[x.packed() as usize];
    let one = Elem::ONE;
    let good_a: Vec<Elem> = f
        .elements()
        .filter(|&a| !a.is_zero() && is_sq(f.add(f.square(a), one)))
        .collect();
    let mut witnesses = Vec::new();
    let mut checked = 0;
    for c in f.elements() {
        let c2 = f.square(c);
        if !is_sq(f.add(c2, one)) {
            continue;
        }
        checked += 1;
        // b² = c² − a² must be a nonzero square t, with t + 1 a nonzero square
        let solvable = good_a.iter().any(|&a| {
            let t = f.sub(c2, f.square(a));
            is_sq(t) && is_sq(f.add(t, one))
        });
        if !solvable {
            witnesses.push(c.packed());
        }
    }
    JoesLemmaResult {
        q: f.q(),
        status: if witnesses.is_empty() { LemmaStatus::Holds } else { LemmaStatus::Fails },
        witnesses,
        checked_c_count: checked,
    }
}

/// [`joes_lemma_verify`] for every odd prime power in `[q_min, q_max]`.
pub fn joes_lemma_scan(q_min: u64, q_max: u64) -> Result<Vec<JoesLemmaResult>, LemmaError> {
    odd_prime_powers(q_min, q_max)
        .into_iter()
        .map(|q| Ok(joes_lemma_verify(&*Field::from_order(q)?)))
        .collect()
}

/// The values of `q < 413` the text lists as needing a computer check that
/// still had no solution.
pub const UNSOLVED_LIST: [u32; 22] = [3, 5, 7, 9, 11, 13, 17, 19, 23, 25, 27, 29, 31, 37, 41, 43, 47, 53, 59, 61, 73, 103];
/// The text's final list of exceptions.
pub const BAD_LIST: [u32; 10] = [5, 9, 13, 17, 25, 29, 37, 41, 53, 73];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ListComparison {
    pub q: u32,
    pub tool_fails: bool,
    pub in_unsolved_list: bool,
    pub in_bad_list: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanSummary {
    pub failing_1_mod_4: Vec<u32>,
    pub failing_3_mod_4: Vec<u32>,
    /// Every scanned `q` on which the tool and the two published lists do
    /// not all agree.
    pub disagreements: Vec<ListComparison>,
}

pub fn summarize_scan(results: &[JoesLemmaResult]) -> ScanSummary {
    let fails = |m: u32| {
        results
            .iter()
            .filter(|r| r.q % 4 == m && r.status == LemmaStatus::Fails)
            .map(|r| r.q)
            .collect()
    };
    let disagreements = results
        .iter()
        .map(|r| ListComparison {
            q: r.q,
            tool_fails: r.status == LemmaStatus::Fails,
            in_unsolved_list: UNSOLVED_LIST.contains(&r.q),
            in_bad_list: BAD_LIST.contains(&r.q),
        })
        .filter(|c| !(c.tool_fails == c.in_unsolved_list && c.tool_fails == c.in_bad_list))
        .collect();
    ScanSummary { failing_1_mod_4: fails(1), failing_3_mod_4: fails(3), disagreements }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HasseMargin {
    pub q: u64,
    /// `q + 1 − 18√q > 48`.
    pub margin_positive: bool,
}

/// Exact test of `q + 1 − 18√q > 48`, i.e. `q > 47` and `(q − 47)² > 324 q`.
pub fn hasse_margin(q: u64) -> HasseMargin {
    let q128 = q as u128;
    let positive = q > 47 && (q128 - 47) * (q128 - 47) > 324 * q128;
    HasseMargin { q, margin_positive: positive }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusResult {
    pub q: u32,
    pub context: String,
    pub counts: BTreeMap<String, u64>,
    /// Number of subspaces compared against the representative.
    pub checked: u64,
    /// Whether every checked subspace gave the same counts.
    pub uniform: bool,
}

impl CensusResult {
    pub fn count(&self, label: &str) -> u64 {
        self.counts.get(label).copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LineClass {
    Plus,
    Minus,
}

/// `(square, nonsquare, isotropic)` points of a subspace.
fn point_census(space: &AmbientSpace, w: &Subspace) -> Result<[u64; 3], LemmaError> {
    let f = space.field();
    let mut counts = [0u64; 3];
    for p in space.enumerate_within(w, 1, None, u128::MAX)? {
        match f.quadratic_class(space.norm(&p.basis()[0])) {
            QuadraticClass::Square => counts[0] += 1,
            QuadraticClass::Nonsquare => counts[1] += 1,
            QuadraticClass::Zero => counts[2] += 1,
        }
    }
    Ok(counts)
}

fn census_map(c: [u64; 3]) -> BTreeMap<String, u64> {
    BTreeMap::from([
        ("square".to_string(), c[0]),
        ("nonsquare".to_string(), c[1]),
        ("isotropic".to_string(), c[2]),
    ])
}

fn line_class(space: &AmbientSpace, w: &Subspace) -> Result<Option<LineClass>, LemmaError> {
    if !space.classify(w).is_nondegenerate() {
        return Ok(None);
    }
    let iso = point_census(space, w)?[2];
    Ok(Some(if iso > 0 { LineClass::Plus } else { LineClass::Minus }))
}

/// Point classes on a line of the given class: a representative from
/// `F_q²` when the plane itself has that class, else the first such line of
/// `F_q³`; then every line of that class in `F_q³` is compared with it.
pub fn line_type_census(field: &FieldRef, class: LineClass) -> Result<CensusResult, LemmaError> {
    let plane = AmbientSpace::new(field.clone(), 2)?;
    let space3 = AmbientSpace::new(field.clone(), 3)?;
    let mut lines = Vec::new();
    for w in space3.enumerate_subspaces(2, None)? {
        if line_class(&space3, &w)? == Some(class) {
            lines.push(w);
        }
    }
    let (rep, context) = if line_class(&plane, &plane.full())? == Some(class) {
        (point_census(&plane, &plane.full())?, "F_q^2".to_string())
    } else {
        let first = lines.first().ok_or_else(|| LemmaError::NoRepresentative(format!("{class:?} line")))?;
        (point_census(&space3, first)?, format!("line {first} of F_q^3"))
    };
    let mut uniform = true;
    for w in &lines {
        uniform &= point_census(&space3, w)? == rep;
    }
    Ok(CensusResult {
        q: field.q(),
        context: format!("{class:?} line, representative {context}"),
        counts: census_map(rep),
        checked: lines.len() as u64,
        uniform,
    })
}

/// Ordered pairs `(x, y)` with `x² + y² = alpha`.
pub fn sum_of_squares_count(f: &Field, alpha: Elem) -> u64 {
    let mut by_square = vec![0u64; f.q() as usize];
    for x in f.elements() {
        by_square[f.square(x).packed() as usize] += 1;
    }
    f.elements()
        .map(|x| by_square[f.sub(alpha, f.square(x)).packed() as usize])
        .sum()
}

/// Degenerate planes of nondegenerate 3-spaces of `F_q⁴` of the given class:
/// all of them inside the first such 3-space, plus ten more 3-spaces drawn
/// with `seed`.
pub fn degenerate_plane_census(field: &FieldRef, class: SubspaceClass, seed: u64) -> Result<CensusResult, LemmaError> {
    let space = AmbientSpace::new(field.clone(), 4)?;
    let spaces = space.enumerate_subspaces(3, Some(class))?;
    let first = spaces.first().ok_or_else(|| LemmaError::NoRepresentative(format!("{class:?} 3-space")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let others = sample(&mut rng, spaces.len() - 1, 10.min(spaces.len() - 1));
    let mut chosen = vec![first];
    chosen.extend(others.iter().map(|i| &spaces[i + 1]));

    let mut rep: Option<[u64; 3]> = None;
    let mut uniform = true;
    let mut checked = 0;
    for w in chosen {
        for u in space.enumerate_within(w, 2, None, u128::MAX)? {
            if space.classify(&u).is_nondegenerate() {
                continue;
            }
            checked += 1;
            let c = point_census(&space, &u)?;
            match rep {
                None => rep = Some(c),
                Some(r) => uniform &= r == c,
            }
        }
    }
    Ok(CensusResult {
        q: field.q(),
        context: format!("degenerate planes of {class:?} 3-spaces of F_q^4, representative {first}"),
        counts: census_map(rep.unwrap_or_default()),
        checked,
        uniform,
    })
}

/// Every 3-space of `F_q⁴` with a 1-dimensional radical: do all its planes
/// avoiding the radical share one nondegenerate class?
pub fn radical_plane_check(field: &FieldRef) -> Result<CensusResult, LemmaError> {
    let space = AmbientSpace::new(field.clone(), 4)?;
    let f = space.field();
    let (mut checked, mut square, mut nonsquare) = (0u64, 0u64, 0u64);
    let mut uniform = true;
    for w in space.enumerate_subspaces(3, Some(SubspaceClass::Degenerate { radical_dim: 1 }))? {
        checked += 1;
        let r = space.radical(&w).expect("degenerate");
        let mut seen: Option<SubspaceClass> = None;
        for u in space.enumerate_within(&w, 2, None, u128::MAX)? {
            if u.contains(f, &r.basis()[0]) {
                continue;
            }
            let c = space.classify(&u);
            uniform &= c.is_nondegenerate() && seen.is_none_or(|s| s == c);
            seen = Some(c);
        }
        match seen {
            Some(SubspaceClass::Square) => square += 1,
            Some(SubspaceClass::Nonsquare) => nonsquare += 1,
            _ => {}
        }
    }
    Ok(CensusResult {
        q: field.q(),
        context: "3-spaces of F_q^4 with 1-dimensional radical".into(),
        counts: BTreeMap::from([
            ("square_type_spaces".to_string(), square),
            ("nonsquare_type_spaces".to_string(), nonsquare),
        ]),
        checked,
        uniform,
    })
}
