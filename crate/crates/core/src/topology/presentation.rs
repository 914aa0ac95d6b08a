//! Edge-path presentations of the fundamental group.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use serde::Serialize;

use super::{integer_form, AbelianInvariants, SparseMatrix, TopologyError, TwoComplex};

/// Generators `g1..gn`; a relator is a word of nonzero letters, `+i` for `gi`
/// and `-i` for its inverse.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupPresentation {
    pub generator_count: usize,
    pub relators: Vec<Vec<i32>>,
}

impl GroupPresentation {
    /// Freely reduces every relator and drops the empty ones.
    pub fn new(generator_count: usize, relators: Vec<Vec<i32>>) -> Self {
        let relators = relators
            .into_iter()
            .map(|r| free_reduce(&r))
            .filter(|r| !r.is_empty())
            .collect();
        GroupPresentation { generator_count, relators }
    }

    /// Tietze moves: drops generators killed by a relator of length one and
    /// eliminates one generator for each relator of length two in distinct
    /// generators. Relators are cyclically reduced and deduplicated.
    pub fn simplify(&self) -> GroupPresentation {
        let n = self.generator_count;
        // sub[k]: letter that generator k+1 equals, 0 for the identity, None if kept
        let mut sub: Vec<Option<i32>> = vec![None; n];
        let mut rels: Vec<Vec<i32>> = self.relators.clone();
        loop {
            let mut changed = false;
            for r in rels.iter_mut() {
                *r = cyclic_reduce(&free_reduce(&resolve_word(&sub, r)));
                match r.as_slice() {
                    [x] => {
                        sub[x.unsigned_abs() as usize - 1] = Some(0);
                        changed = true;
                    }
                    [x, y] if x.abs() != y.abs() => {
                        // x y = 1, so y = x^-1
                        let k = y.unsigned_abs() as usize - 1;
                        sub[k] = Some(if *y > 0 { -x } else { *x });
                        changed = true;
                    }
                    _ => continue,
                }
                r.clear();
            }
            rels.retain(|r| !r.is_empty());
            if !changed {
                break;
            }
        }
        let mut renumber = vec![0i32; n];
        let mut m = 0;
        for k in 0..n {
            if sub[k].is_none() {
                m += 1;
                renumber[k] = m;
            }
        }
        let mut out: Vec<Vec<i32>> = rels
            .into_iter()
            .map(|r| r.iter().map(|&x| x.signum() * renumber[x.unsigned_abs() as usize - 1]).collect())
            .collect();
        out.sort();
        out.dedup();
        GroupPresentation::new(m as usize, out)
    }

    /// First line `generators: g1,g2,…`, then one relator per line.
    pub fn to_text(&self) -> String {
        self.to_string()
    }

    pub fn from_text(text: &str) -> Result<Self, TopologyError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let head = lines
            .next()
            .and_then(|l| l.trim().strip_prefix("generators:"))
            .ok_or_else(|| TopologyError::Parse("missing generators line".into()))?;
        let names: Vec<&str> = head.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
        for (i, name) in names.iter().enumerate() {
            if *name != format!("g{}", i + 1) {
                return Err(TopologyError::Parse(format!("unexpected generator {name}")));
            }
        }
        let n = names.len();
        let mut relators = Vec::new();
        for line in lines {
            let word = line
                .split_whitespace()
                .map(|tok| parse_letter(tok, n))
                .collect::<Result<Vec<_>, _>>()?;
            relators.push(word);
        }
        Ok(GroupPresentation::new(n, relators))
    }
}

fn parse_letter(tok: &str, n: usize) -> Result<i32, TopologyError> {
    let (sign, digits) = if let Some(d) = tok.strip_prefix('g') {
        (1, d)
    } else if let Some(d) = tok.strip_prefix('G') {
        (-1, d)
    } else {
        return Err(TopologyError::Parse(format!("bad letter {tok}")));
    };
    match digits.parse::<usize>() {
        Ok(i) if (1..=n).contains(&i) => Ok(sign * i as i32),
        _ => Err(TopologyError::Parse(format!("bad letter {tok}"))),
    }
}

impl fmt::Display for GroupPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = (1..=self.generator_count).map(|i| format!("g{i}")).collect();
        writeln!(f, "generators: {}", gens.join(","))?;
        for r in &self.relators {
            let letters: Vec<String> = r
                .iter()
                .map(|&x| if x > 0 { format!("g{x}") } else { format!("G{}", -x) })
                .collect();
            writeln!(f, "{}", letters.join(" "))?;
        }
        Ok(())
    }
}

pub(crate) fn free_reduce(word: &[i32]) -> Vec<i32> {
    let mut out: Vec<i32> = Vec::with_capacity(word.len());
    for &x in word {
        if out.last() == Some(&-x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

fn cyclic_reduce(word: &[i32]) -> Vec<i32> {
    let mut s = 0;
    let mut e = word.len();
    while e - s >= 2 && word[s] == -word[e - 1] {
        s += 1;
        e -= 1;
    }
    word[s..e].to_vec()
}

fn resolve_letter(sub: &[Option<i32>], mut x: i32) -> i32 {
    loop {
        match sub[x.unsigned_abs() as usize - 1] {
            None => return x,
            Some(0) => return 0,
            Some(y) => x = if x > 0 { y } else { -y },
        }
    }
}

fn resolve_word(sub: &[Option<i32>], w: &[i32]) -> Vec<i32> {
    w.iter().map(|&x| resolve_letter(sub, x)).filter(|&x| x != 0).collect()
}

/// Presentation of `π1(K, base)`: a BFS spanning tree from `base`, one
/// generator per non-tree edge (in edge order) and one relator per triangle.
///
/// A disconnected complex yields [`TopologyError::Disconnected`] with one
/// presentation per component, the component of `base` first.
pub fn pi1_presentation(c: &TwoComplex, base: u32) -> Result<GroupPresentation, TopologyError> {
    if base as usize >= c.vertex_count() {
        return Err(TopologyError::InvalidVertex(base));
    }
    let adj = c.adjacency();
    let mut component = vec![usize::MAX; c.vertex_count()];
    let mut tree: HashSet<usize> = HashSet::new();
    let mut roots = vec![base];
    roots.extend(0..c.vertex_count() as u32);
    let mut ncomp = 0;
    for root in roots {
        if component[root as usize] != usize::MAX {
            continue;
        }
        component[root as usize] = ncomp;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u as usize] {
                if component[v as usize] == usize::MAX {
                    component[v as usize] = ncomp;
                    tree.insert(c.edge_id(u, v).unwrap());
                    queue.push_back(v);
                }
            }
        }
        ncomp += 1;
    }

    // per-component generator numbering
    let mut gen_of = vec![0i32; c.edges().len()];
    let mut counts = vec![0usize; ncomp];
    for (i, &[u, _]) in c.edges().iter().enumerate() {
        if !tree.contains(&i) {
            let k = component[u as usize];
            counts[k] += 1;
            gen_of[i] = counts[k] as i32;
        }
    }
    let mut relators = vec![Vec::new(); ncomp];
    for &[a, b, t] in c.triangles() {
        let e = |x, y| c.edge_id(x, y).unwrap();
        // loop a → b → t → a
        let word: Vec<i32> = [gen_of[e(a, b)], gen_of[e(b, t)], -gen_of[e(a, t)]]
            .into_iter()
            .filter(|&x| x != 0)
            .collect();
        relators[component[a as usize]].push(word);
    }
    let mut pres: Vec<GroupPresentation> = counts
        .into_iter()
        .zip(relators)
        .map(|(n, r)| GroupPresentation::new(n, r))
        .collect();
    if ncomp == 1 {
        Ok(pres.pop().unwrap())
    } else {
        Err(TopologyError::Disconnected { components: pres })
    }
}

/// `G / [G, G]` from the exponent-sum matrix of the relators.
pub fn abelianization(p: &GroupPresentation) -> Result<AbelianInvariants, TopologyError> {
    let cols = p
        .relators
        .iter()
        .map(|r| r.iter().map(|&x| (x.unsigned_abs() - 1, x.signum() as i64)).collect())
        .collect();
    let m = SparseMatrix::new(p.generator_count, cols);
    let form = integer_form(&m)?;
    if !form.exact {
        return Err(TopologyError::BudgetExceeded {
            what: "abelianization residual",
            bound: super::DENSE_SNF_LIMIT as u128,
            required: p.generator_count as u128,
        });
    }
    Ok(AbelianInvariants { free_rank: p.generator_count - form.rank, torsion: form.torsion })
}
