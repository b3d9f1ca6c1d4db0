//! Search for large trace-zero excluded subsets, i.e. large cliques in the
//! graph on SL(2, F) with A ~ B iff trace(A⁻¹B) ≠ 0.
//!
//! The graph is a Cayley graph, so some maximum clique contains I. Matrices
//! with the same nonzero trace t are conjugate, conjugation fixes I and
//! preserves the relation, and so does the entrywise Frobenius. Hence some
//! maximum clique also contains R_t = [0 1; 1 t] for t a representative of
//! a Frobenius orbit on F*. For each such t the search runs a bitset
//! branch-and-bound with a greedy-coloring bound on the common neighbourhood
//! of I and R_t.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::sl2::{is_trace_zero_excluded, sl2_enumerate, ExcludedSubset, Mat2F};

/// Branch-and-bound only runs on candidate sets up to this size; larger
/// graphs get the greedy extension alone.
pub const DENSE_LIMIT: usize = 6000;

type Idx4 = [usize; 4];

fn rel_trace(f: &Field, a: &Idx4, b: &Idx4) -> usize {
    let m = |x, y| f.idx_mul(x, y);
    let s1 = f.idx_add(m(a[1], b[2]), m(b[1], a[2]));
    let s2 = f.idx_add(m(b[0], a[3]), m(a[0], b[3]));
    f.idx_add(s1, s2)
}

fn adjacent(f: &Field, a: &Idx4, b: &Idx4) -> bool {
    rel_trace(f, a, b) != 0
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchReport {
    pub s: u32,
    pub vertices: usize,
    pub budget: u64,
    pub nodes: u64,
    pub seed_size: usize,
    pub greedy_size: usize,
    pub best_size: usize,
    /// The search finished within budget, so `best_size` is the clique number.
    pub exact: bool,
    /// Branch-and-bound ran (candidate sets within [`DENSE_LIMIT`]).
    pub branch_and_bound: bool,
    /// Canonical indices of the traces t used for the second fixed member.
    pub orbit_representatives: Vec<usize>,
}

struct Budget {
    limit: u64,
    used: u64,
}

impl Budget {
    fn take(&mut self) -> bool {
        if self.used >= self.limit {
            return false;
        }
        self.used += 1;
        true
    }
}

/// Extends `start` by first-fit over `pool` in order. Each addition costs one
/// node.
fn greedy_extend(f: &Field, start: &[Idx4], pool: &[Idx4], budget: &mut Budget) -> Vec<Idx4> {
    let mut clique = start.to_vec();
    for v in pool {
        if clique.contains(v) || !clique.iter().all(|c| adjacent(f, c, v)) {
            continue;
        }
        if !budget.take() {
            break;
        }
        clique.push(*v);
    }
    clique
}

#[derive(Clone)]
struct Bits {
    words: Vec<u64>,
}

impl Bits {
    fn new(n: usize) -> Bits {
        Bits {
            words: vec![0; n.div_ceil(64)],
        }
    }

    fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    fn clear(&mut self, i: usize) {
        self.words[i / 64] &= !(1 << (i % 64));
    }

    fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    fn and(&self, other: &Bits) -> Bits {
        Bits {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    fn and_not_assign(&mut self, other: &Bits) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    fn first(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }
}

/// Orders vertices by repeatedly removing one of minimum degree; the
/// result lists the last removed first.
fn degeneracy_order(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut removed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !removed[v])
            .min_by_key(|&v| (degree[v], v))
            .expect("vertices remain");
        removed[v] = true;
        order.push(v);
        for &u in &adj[v] {
            if !removed[u] {
                degree[u] -= 1;
            }
        }
    }
    order.reverse();
    order
}

struct Bnb<'a> {
    adj: Vec<Bits>,
    budget: &'a mut Budget,
    best: usize,
    best_clique: Option<Vec<usize>>,
    current: Vec<usize>,
    aborted: bool,
}

impl Bnb<'_> {
    /// Greedy sequential coloring in vertex order; returns vertices with
    /// their color numbers, colors non-decreasing.
    fn color(&self, p: &Bits) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut uncolored = p.clone();
        let mut color = 0;
        while !uncolored.is_empty() {
            color += 1;
            let mut q = uncolored.clone();
            while let Some(v) = q.first() {
                q.clear(v);
                q.and_not_assign(&self.adj[v]);
                uncolored.clear(v);
                out.push((v, color));
            }
        }
        out
    }

    fn expand(&mut self, mut p: Bits) {
        if !self.budget.take() {
            self.aborted = true;
            return;
        }
        let colored = self.color(&p);
        for &(v, color) in colored.iter().rev() {
            if self.current.len() + color <= self.best {
                return;
            }
            self.current.push(v);
            let next = p.and(&self.adj[v]);
            if next.is_empty() {
                if self.current.len() > self.best {
                    self.best = self.current.len();
                    self.best_clique = Some(self.current.clone());
                }
            } else {
                self.expand(next);
            }
            self.current.pop();
            if self.aborted {
                return;
            }
            p.clear(v);
        }
    }
}

/// Maximum clique among `cands`, given that `fixed` members are already
/// chosen. Returns the best extension strictly larger than `incumbent`
/// (total size), and whether the search completed.
fn branch_and_bound(
    f: &Field,
    cands: &[Idx4],
    fixed: usize,
    incumbent: usize,
    budget: &mut Budget,
) -> (Option<Vec<Idx4>>, bool) {
    let n = cands.len();
    let mut lists = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            if adjacent(f, &cands[i], &cands[j]) {
                lists[i].push(j);
                lists[j].push(i);
            }
        }
    }
    let order = degeneracy_order(&lists);
    let mut pos = vec![0; n];
    for (p, &v) in order.iter().enumerate() {
        pos[v] = p;
    }
    let mut adj = vec![Bits::new(n); n];
    for (v, list) in lists.iter().enumerate() {
        for &u in list {
            adj[pos[v]].set(pos[u]);
        }
    }
    let mut all = Bits::new(n);
    for i in 0..n {
        all.set(i);
    }
    let mut bnb = Bnb {
        adj,
        budget,
        best: incumbent.saturating_sub(fixed),
        best_clique: None,
        current: Vec::new(),
        aborted: false,
    };
    if n > 0 {
        bnb.expand(all);
    }
    let found = bnb
        .best_clique
        .map(|c| c.into_iter().map(|p| cands[order[p]]).collect());
    (found, !bnb.aborted)
}

fn lex_better(a: &[Idx4], b: &[Idx4]) -> bool {
    a.len() > b.len() || (a.len() == b.len() && a < b)
}

fn sorted(mut v: Vec<Idx4>) -> Vec<Idx4> {
    v.sort();
    v
}

/// Searches for a large trace-zero excluded subset.
///
/// The result is the largest of the seed, its greedy extension and the
/// branch-and-bound incumbent, members sorted by canonical indices; ties go
/// to the lexicographically smallest member list. `budget` bounds the number
/// of search nodes (greedy additions included). The result is re-verified
/// before returning.
pub fn search_excluded_subset(
    field: &Field,
    budget: u64,
    seed: Option<&[Mat2F]>,
) -> Result<(ExcludedSubset, SearchReport)> {
    let f = field;
    let q = f.q();
    let group: Vec<Idx4> = sl2_enumerate(f)?.map(|m| m.indices()).collect();
    let identity: Idx4 = [1, 0, 0, 1];

    let seed: Vec<Idx4> = match seed {
        Some(s) if !s.is_empty() => {
            let outcome = is_trace_zero_excluded(f, s)?;
            if let Some(v) = outcome.violation {
                return Err(Error::NotExcluded(v.first, v.second));
            }
            s.iter().map(Mat2F::indices).collect()
        }
        _ => vec![identity],
    };
    let mut budget = Budget {
        limit: budget,
        used: 0,
    };

    let greedy = greedy_extend(f, &seed, &group, &mut budget);
    let mut best = sorted(greedy.clone());
    let seed_sorted = sorted(seed.clone());
    if lex_better(&seed_sorted, &best) {
        best = seed_sorted;
    }

    // Frobenius orbit representatives of F*.
    let reps: Vec<usize> = (1..q)
        .filter(|&t| {
            let mut x = f.idx_square(t);
            while x != t {
                if x < t {
                    return false;
                }
                x = f.idx_square(x);
            }
            true
        })
        .collect();

    let neighbours_of_identity: Vec<Idx4> = group
        .iter()
        .copied()
        .filter(|v| adjacent(f, &identity, v))
        .collect();
    let mut exact = budget.used < budget.limit;
    let mut ran_bnb = false;
    for &t in &reps {
        if !exact {
            break;
        }
        let rt: Idx4 = [0, 1, 1, t];
        let cands: Vec<Idx4> = neighbours_of_identity
            .iter()
            .copied()
            .filter(|v| *v != rt && adjacent(f, &rt, v))
            .collect();
        if cands.len() > DENSE_LIMIT {
            exact = false;
            break;
        }
        ran_bnb = true;
        let (found, complete) = branch_and_bound(f, &cands, 2, best.len(), &mut budget);
        if let Some(ext) = found {
            let mut clique = vec![identity, rt];
            clique.extend(ext);
            let clique = sorted(clique);
            if lex_better(&clique, &best) {
                best = clique;
            }
        }
        exact &= complete;
    }
    if reps.is_empty() {
        exact = false;
    }

    let members = best
        .iter()
        .map(|&idx| Mat2F::from_indices(f, idx))
        .collect::<Result<Vec<_>>>()?;
    let subset = ExcludedSubset::new(f, members)?;
    let report = SearchReport {
        s: f.s(),
        vertices: group.len(),
        budget: budget.limit,
        nodes: budget.used,
        seed_size: seed.len(),
        greedy_size: greedy.len(),
        best_size: subset.len(),
        exact,
        branch_and_bound: ran_bnb,
        orbit_representatives: reps,
    };
    Ok((subset, report))
}
