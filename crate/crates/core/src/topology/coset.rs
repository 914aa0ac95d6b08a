//! Todd–Coxeter coset enumeration, HLT strategy with deferred coincidence
//! processing through a union-find queue.

use serde::Serialize;

use super::GroupPresentation;

pub const DEFAULT_COSET_BUDGET: usize = 5_000_000;
/// Cap on `cosets × columns` of the coset table (256 MiB of `u32`).
pub const DEFAULT_TABLE_ENTRY_CAP: usize = 1 << 26;

#[derive(Debug, Clone, Copy)]
pub struct CosetOptions {
    /// Maximum number of cosets ever defined.
    pub budget: usize,
    pub table_entry_cap: usize,
}

impl Default for CosetOptions {
    fn default() -> Self {
        CosetOptions { budget: DEFAULT_COSET_BUDGET, table_entry_cap: DEFAULT_TABLE_ENTRY_CAP }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum CosetOutcome {
    TrivialGroup,
    /// Index of the subgroup (group order when the subgroup is trivial).
    FiniteIndex { index: usize },
    Exceeded { cosets_defined: usize },
}

struct Table {
    cols: usize,
    data: Vec<u32>,
    parent: Vec<u32>,
    defined: usize,
    limit: usize,
    queue: Vec<u32>,
}

#[derive(Debug)]
struct OutOfCosets;

impl Table {
    fn get(&self, c: u32, x: usize) -> u32 {
        self.data[c as usize * self.cols + x]
    }

    fn set(&mut self, c: u32, x: usize, d: u32) {
        self.data[c as usize * self.cols + x] = d;
    }

    fn alive(&self, c: u32) -> bool {
        self.parent[c as usize] == c
    }

    fn define(&mut self, c: u32, x: usize) -> Result<(), OutOfCosets> {
        if self.defined >= self.limit {
            return Err(OutOfCosets);
        }
        self.defined += 1;
        let d = self.parent.len() as u32;
        self.parent.push(d);
        self.data.resize(self.data.len() + self.cols, 0);
        self.set(c, x, d);
        self.set(d, x ^ 1, c);
        Ok(())
    }

    fn rep(&mut self, mut k: u32) -> u32 {
        let mut root = k;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        while self.parent[k as usize] != root {
            let next = self.parent[k as usize];
            self.parent[k as usize] = root;
            k = next;
        }
        root
    }

    fn merge(&mut self, k: u32, l: u32) {
        let (k, l) = (self.rep(k), self.rep(l));
        if k == l {
            return;
        }
        let (mu, nu) = (k.min(l), k.max(l));
        self.parent[nu as usize] = mu;
        self.queue.push(nu);
    }

    fn coincidence(&mut self, a: u32, b: u32) {
        self.queue.clear();
        self.merge(a, b);
        let mut i = 0;
        while i < self.queue.len() {
            let g = self.queue[i];
            i += 1;
            for x in 0..self.cols {
                let d = self.get(g, x);
                if d == 0 {
                    continue;
                }
                self.set(d, x ^ 1, 0);
                let mu = self.rep(g);
                let nu = self.rep(d);
                let mx = self.get(mu, x);
                if mx != 0 {
                    self.merge(nu, mx);
                } else {
                    let nx = self.get(nu, x ^ 1);
                    if nx != 0 {
                        self.merge(mu, nx);
                    } else {
                        self.set(mu, x, nu);
                        self.set(nu, x ^ 1, mu);
                    }
                }
            }
        }
    }

    fn scan_and_fill(&mut self, c: u32, w: &[usize]) -> Result<(), OutOfCosets> {
        if w.is_empty() {
            return Ok(());
        }
        let (mut f, mut b) = (c, c);
        let (mut i, mut j) = (0usize, w.len() as isize - 1);
        loop {
            while (i as isize) <= j && self.get(f, w[i]) != 0 {
                f = self.get(f, w[i]);
                i += 1;
            }
            if i as isize > j {
                if f != b {
                    self.coincidence(f, b);
                }
                return Ok(());
            }
            while j >= i as isize && self.get(b, w[j as usize] ^ 1) != 0 {
                b = self.get(b, w[j as usize] ^ 1);
                j -= 1;
            }
            if j < i as isize {
                self.coincidence(f, b);
                return Ok(());
            }
            if j == i as isize {
                self.set(f, w[i], b);
                self.set(b, w[i] ^ 1, f);
                return Ok(());
            }
            self.define(f, w[i])?;
        }
    }
}

fn letters(word: &[i32]) -> Vec<usize> {
    word.iter()
        .map(|&x| 2 * (x.unsigned_abs() as usize - 1) + usize::from(x < 0))
        .collect()
}

/// Enumerates the cosets of the subgroup generated by `subgroup` in the group
/// presented by `p`.
pub fn coset_enumerate(p: &GroupPresentation, subgroup: &[Vec<i32>], opts: &CosetOptions) -> CosetOutcome {
    if p.generator_count == 0 {
        return CosetOutcome::TrivialGroup;
    }
    let cols = 2 * p.generator_count;
    let limit = opts.budget.min(opts.table_entry_cap / cols);
    let mut rels: Vec<Vec<usize>> = p.relators.iter().map(|r| letters(r)).collect();
    rels.sort_by_key(Vec::len);
    let mut t = Table { cols, data: vec![0; 2 * cols], parent: vec![0, 1], defined: 1, limit, queue: Vec::new() };

    let run = |t: &mut Table| -> Result<(), OutOfCosets> {
        for w in subgroup {
            t.scan_and_fill(1, &letters(w))?;
        }
        let mut c = 1u32;
        while (c as usize) < t.parent.len() {
            for r in &rels {
                if !t.alive(c) {
                    break;
                }
                t.scan_and_fill(c, r)?;
            }
            if t.alive(c) {
                for x in 0..cols {
                    if t.get(c, x) == 0 {
                        t.define(c, x)?;
                    }
                }
            }
            c += 1;
        }
        Ok(())
    };
    match run(&mut t) {
        Err(OutOfCosets) => CosetOutcome::Exceeded { cosets_defined: t.defined },
        Ok(()) => {
            let index = (1..t.parent.len() as u32).filter(|&c| t.alive(c)).count();
            if index == 1 && subgroup.is_empty() {
                CosetOutcome::TrivialGroup
            } else {
                CosetOutcome::FiniteIndex { index }
            }
        }
    }
}
